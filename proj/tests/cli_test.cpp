#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mindist/cli.hpp"
#include "mindist/records.hpp"
#include "test_support.hpp"

using namespace mindist;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "mindist_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

std::string fixture(const char* name) { return support::fixture(name).string(); }

}  // namespace

TEST(Cli, SolveCertifiesSphereQuartic) {
  const CliRun r = run({"solve", "--instance", fixture("sphere_quartic.json")});
  EXPECT_EQ(r.code, kExitGlobalUnique) << r.err;
  EXPECT_NE(r.out.find("GlobalUnique"), std::string::npos);
}

TEST(Cli, SolveJsonRecordCarriesWitness) {
  const CliRun r = run({"solve", "--instance", fixture("ellipsoid_quartic.json"), "--format", "json"});
  ASSERT_EQ(r.code, kExitGlobalUnique) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("status"), "GlobalUnique");
  EXPECT_NEAR(j.at("dual_point").at("lambda").get<double>(), support::ref::kEllipsoidDual.lam, 1e-6);
  EXPECT_TRUE(j.at("diagnostics").at("in_sa_plus").get<bool>());
}

TEST(Cli, JsonOutputRoundTripsByteForByte) {
  const CliRun r = run({"solve", "--instance", fixture("sphere_quartic.json"), "--format", "json"});
  ASSERT_EQ(r.code, kExitGlobalUnique);
  EXPECT_EQ(canonical_dump(nlohmann::json::parse(r.out)), r.out);
}

TEST(Cli, SymmetricDegenerateExitsNotCertified) {
  const CliRun r = run({"solve", "--instance", fixture("symmetric_degenerate.json")});
  EXPECT_EQ(r.code, kExitNotCertified);
}

TEST(Cli, NoneFoundExitCode) {
  const CliRun r = run({"solve", "--instance", fixture("sphere_quartic.json"), "--config", "maxIter=1"});
  EXPECT_EQ(r.code, kExitNoneFound);
}

TEST(Cli, MissingInstanceFileIsInputError) {
  const CliRun r = run({"solve", "--instance", "/nonexistent/instance.json"});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, TruncatedJsonReportsPosition) {
  const fs::path p = write_temp("truncated.json", "{\"n\": 2, \"A\": [[1, 0], [0, 1]");
  const CliRun r = run({"solve", "--instance", p.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFieldIsRejected) {
  const fs::path p = write_temp(
      "unknown.json",
      R"({"n": 2, "A": [[1, 0], [0, 1]], "r": 1, "alpha": 1, "eta": 1, "f": [0, 0], "c": [5, 0], "beta": 3})");
  const CliRun r = run({"solve", "--instance", p.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("beta"), std::string::npos) << r.err;
}

TEST(Cli, BadConfigKeyOrValueIsInputError) {
  EXPECT_EQ(run({"solve", "--instance", fixture("sphere_quartic.json"), "--config", "bogus=1"}).code,
            kExitInputError);
  EXPECT_EQ(run({"solve", "--instance", fixture("sphere_quartic.json"), "--config", "gradTol=-1"}).code,
            kExitInputError);
  EXPECT_EQ(run({"solve", "--instance", fixture("sphere_quartic.json"), "--format", "yaml"}).code,
            kExitInputError);
}

TEST(Cli, UnknownSubcommandIsInputError) { EXPECT_EQ(run({"frobnicate"}).code, kExitInputError); }

TEST(Cli, PerturbReproducesTable) {
  const CliRun r = run({"perturb", "--instance", fixture("symmetric_degenerate.json"), "--direction",
                     "0,1", "--schedule", "64,1000,10000,100000", "--format", "json"});
  ASSERT_EQ(r.code, kExitGlobalUnique) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  const auto& trace = j.at("perturbation_trace");
  ASSERT_EQ(trace.size(), support::ref::kPerturbationTable.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& row = support::ref::kPerturbationTable[i];
    EXPECT_EQ(trace[i].at("status"), "GlobalUnique");
    EXPECT_NEAR(trace[i].at("x_bar").at("y")[0].get<double>(), row.y(0), 1e-6);
    EXPECT_NEAR(trace[i].at("x_bar").at("y")[1].get<double>(), row.y(1), 1e-6);
  }
}

TEST(Cli, PerturbDefaultsToLastAxisAndRequiresSchedule) {
  const CliRun r = run({"perturb", "--instance", fixture("symmetric_degenerate.json"), "--schedule",
                     "1000", "--format", "csv"});
  EXPECT_EQ(r.code, kExitGlobalUnique) << r.err;
  EXPECT_EQ(r.out.rfind("k,status,lambda,mu,sigma,y1,y2,z1,z2\n", 0), 0u);
  EXPECT_EQ(run({"perturb", "--instance", fixture("symmetric_degenerate.json")}).code,
            kExitInputError);
  EXPECT_EQ(run({"perturb", "--instance", fixture("symmetric_degenerate.json"), "--schedule", ""}).code,
            kExitInputError);
  EXPECT_EQ(run({"perturb", "--instance", fixture("symmetric_degenerate.json"), "--schedule", "10",
                 "--direction", "0,0"})
                .code,
            kExitInputError);
}

TEST(Cli, VerifyPassesOnCertifiedFixtures) {
  for (const char* name : {"sphere_quartic.json", "ellipsoid_quartic.json"}) {
    const CliRun r = run({"verify", "--instance", fixture(name)});
    EXPECT_EQ(r.code, kExitGlobalUnique) << name << '\n' << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    for (const char* check : {"separation", "spectral", "certificate", "duality_gap", "lemma1", "kkt",
                              "hessian_pd", "oracle"}) {
      EXPECT_NE(r.out.find(std::string("PASS ") + check), std::string::npos) << check;
    }
  }
}

TEST(Cli, VerifyRefusesIntersectingSurfaces) {
  const fs::path p = write_temp(
      "crossing.json",
      R"({"n": 2, "A": [[1, 0], [0, 1]], "r": 1, "alpha": 1, "eta": 1, "f": [0, 0], "c": [0.5, 0]})");
  const CliRun r = run({"verify", "--instance", p.string()});
  EXPECT_EQ(r.code, kExitVerifyFailed);
  EXPECT_NE(r.out.find("FAIL separation"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("refused"), std::string::npos);
}

TEST(Cli, VerifyFailsWhenNotCertified) {
  const CliRun r = run({"verify", "--instance", fixture("symmetric_degenerate.json")});
  EXPECT_EQ(r.code, kExitVerifyFailed);
  EXPECT_NE(r.out.find("FAIL certificate"), std::string::npos) << r.out;
}

TEST(Cli, OracleReportsMinimum) {
  const CliRun r = run({"oracle", "--instance", fixture("sphere_quartic.json"), "--format", "json",
                     "--config", "m=48"});
  ASSERT_EQ(r.code, kExitGlobalUnique) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("pi").get<double>(),
              pi_value(support::sphere_fixture(), {support::ref::kSphereY, support::ref::kSphereZ}),
              1e-8);
}

TEST(Cli, SampleWritesCsvToFile) {
  const fs::path out = fs::temp_directory_path() / "mindist_cli_test" / "samples.csv";
  fs::create_directories(out.parent_path());
  fs::remove(out);
  const CliRun r = run({"sample", "--instance", fixture("symmetric_degenerate.json"), "--config", "m=16",
                     "--out", out.string()});
  ASSERT_EQ(r.code, kExitGlobalUnique) << r.err;
  std::ifstream is(out);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "surface,x1,x2");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_GT(rows, 16u);
}

TEST(Cli, OracleAndSampleRefuseHighDimensions) {
  std::ostringstream doc;
  doc << R"({"n": 5, "A": [)";
  for (int i = 0; i < 5; ++i) {
    doc << (i ? ", " : "") << '[';
    for (int j = 0; j < 5; ++j) doc << (j ? ", " : "") << (i == j ? 1 : 0);
    doc << ']';
  }
  doc << R"(], "r": 1, "alpha": 1, "eta": 1, "f": [0, 0, 0, 0, 1], "c": [5, 0, 0, 0, 0]})";
  const fs::path p = write_temp("five.json", doc.str());
  for (const char* cmd : {"oracle", "sample"}) {
    const CliRun r = run({cmd, "--instance", p.string()});
    EXPECT_EQ(r.code, kExitInputError) << cmd;
    EXPECT_NE(r.err.find("warning"), std::string::npos) << cmd;
  }
  EXPECT_EQ(run({"solve", "--instance", p.string()}).code, kExitGlobalUnique);
}

TEST(Cli, InstalledBinaryUsesSameExitCodes) {
  const std::string bin = MINDIST_CLI_PATH;
  const std::string base = bin + " solve --instance " + fixture("symmetric_degenerate.json") +
                           " > /dev/null 2>&1";
  const int status = std::system(base.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), kExitNotCertified);
}
