#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "mindist/problem.hpp"

namespace mindist {

enum class SeparationStatus {
  AnalyticallyCertified,  // c = 0 closed-form sufficient condition holds
  NumericallyPlausible,   // every sampled z on Z_c has h(z) > 0
  Violated,               // some sampled z on Z_c has h(z) <= 0
  Undetermined,           // no point of Z_c could be sampled
};

std::string_view to_string(SeparationStatus s);

struct SeparationReport {
  SeparationStatus status = SeparationStatus::Undetermined;
  bool analytic_applicable = false;  // c = 0, r > 0, eta > r^2/2
  bool analytic_holds = false;
  double force_threshold = 0.0;      // 0.5 (0.5 r^2 - eta)^2 / r
  double min_sampled_h = 0.0;
  std::size_t samples = 0;
};

/// Sufficient condition for Y_c and Z_c to be disjoint with h > 0 on Z_c,
/// plus a sampled check of h over Z_c (always run). The sample uses the
/// oracle's direction grid at resolution m, except that for n > 3 the
/// per-axis resolution is lowered so the grid holds at most m^2 directions.
SeparationReport check_separation(const ProblemInstance& inst, int m = 64,
                                  std::uint64_t seed = 0);

}  // namespace mindist
