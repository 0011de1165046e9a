#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mindist {

/// Process exit codes. No other values are ever returned.
enum ExitCode : int {
  kExitGlobalUnique = 0,
  kExitInputError = 1,
  kExitNotCertified = 2,
  kExitNoneFound = 3,
  kExitVerifyFailed = 4,
};

/// Entry point of the `mindist` tool:
///   mindist solve|verify|perturb|oracle|sample --instance <path>
///           [--config k=v]... [--out <path>] [--format json|text|csv] [--seed <int>]
///   perturb adds --direction v1,v2,... and --schedule k1,k2,...
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mindist
