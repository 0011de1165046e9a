#include "mindist/cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mindist/errors.hpp"
#include "mindist/instance_io.hpp"
#include "mindist/oracle.hpp"
#include "mindist/records.hpp"
#include "mindist/separation.hpp"
#include "mindist/solver.hpp"

namespace mindist {

namespace {

using nlohmann::json;

constexpr int kOracleMaxDim = 4;

enum class Format { Json, Text, Csv };

struct RunManifest {
  std::string command;
  std::string instance_path;
  std::vector<std::string> config_overrides;
  std::string output_path;
  std::string format = "text";
  std::uint64_t seed = 0;
  std::string direction;
  std::string schedule;
  bool schedule_given = false;
};

/// Settings reachable through --config k=v.
struct Settings {
  SolverConfig solver;
  int oracle_m = 96;
  int sample_m = 64;
  bool polish = true;
};

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("config value for '" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("config value for '" + key + "' is not an integer: '" + text + "'");
  }
  return v;
}

Settings build_settings(const std::vector<std::string>& overrides) {
  Settings s;
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("config override must be key=value: '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "gradTol") {
      s.solver.grad_tol = parse_number(key, val);
    } else if (key == "maxIter") {
      s.solver.max_iter = parse_int(key, val);
    } else if (key == "dampingShrink") {
      s.solver.damping_shrink = parse_number(key, val);
    } else if (key == "minStep") {
      s.solver.min_step = parse_number(key, val);
    } else if (key == "dedupTol") {
      s.solver.dedup_tol = parse_number(key, val);
    } else if (key == "separationResolution") {
      s.solver.separation_resolution = parse_int(key, val);
    } else if (key == "m") {
      s.oracle_m = s.sample_m = parse_int(key, val);
    } else if (key == "polish") {
      if (val != "true" && val != "false") throw InputError("config 'polish' must be true or false");
      s.polish = val == "true";
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  s.solver.validate();
  return s;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InputError(std::string("empty entry in ") + what);
    out.push_back(parse_number(what, item));
  }
  return out;
}

Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "text") return Format::Text;
  if (f == "csv") return Format::Csv;
  throw InputError("unknown format '" + f + "'");
}

int exit_code(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::GlobalUnique: return kExitGlobalUnique;
    case CertificateStatus::StationaryNotCertified: return kExitNotCertified;
    case CertificateStatus::NoneFound: return kExitNoneFound;
  }
  return kExitNoneFound;
}

std::string fmt7(double v) {
  std::ostringstream os;
  os << std::setprecision(7) << v;
  return os.str();
}

std::string fmt7(const Vector& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt7(v(i));
  os << ')';
  return os.str();
}

std::string fmt7(const DualPoint& dp) {
  return "(" + fmt7(dp.lam) + ", " + fmt7(dp.mu) + ", " + fmt7(dp.sig) + ")";
}

void text_summary(std::ostream& os, const Certificate& cert) {
  os << "status: " << to_string(cert.status) << '\n';
  if (cert.separation) os << "separation: " << to_string(cert.separation->status) << '\n';
  os << "stationary points found: " << cert.stationary_points.size() << '\n';
  if (!cert.witness) return;
  const StationaryPoint& w = *cert.witness;
  os << "dual point (lambda, mu, sigma): " << fmt7(w.dp) << '\n'
     << "y: " << fmt7(w.x.y) << '\n'
     << "z: " << fmt7(w.x.z) << '\n'
     << "pi: " << fmt7(w.pi) << "  pi_d: " << fmt7(w.pi_d) << '\n'
     << "grad norm: " << fmt7(w.grad_norm) << '\n'
     << "residuals |h|, |g|: " << fmt7(w.h_residual) << ", " << fmt7(w.g_residual) << '\n'
     << "in S_a+: " << (w.diagnostics.in_sa_plus ? "yes" : "no")
     << (w.diagnostics.certifying ? " (mu > 0, certifying)" : "") << '\n';
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_solve(const RunManifest& man, const ProblemInstance& inst, const Settings& s,
              std::ostream& out, std::ostream& err) {
  const Format fmt = parse_format(man.format);
  if (fmt == Format::Csv) throw InputError("solve supports json and text formats");
  const Certificate cert = solve_global(inst, s.solver);
  if (cert.separation && cert.separation->status != SeparationStatus::AnalyticallyCertified) {
    err << "warning: surface separation is " << to_string(cert.separation->status) << '\n';
  }
  Output o(man.output_path, out);
  if (fmt == Format::Json) {
    o.stream() << canonical_dump(certificate_record(cert));
  } else {
    text_summary(o.stream(), cert);
  }
  return exit_code(cert.status);
}

int cmd_perturb(const RunManifest& man, const ProblemInstance& inst, const Settings& s,
                std::ostream& out) {
  const Format fmt = parse_format(man.format);
  if (!man.schedule_given) throw InputError("perturb requires --schedule");
  const std::vector<double> schedule = parse_list(man.schedule, "--schedule");
  if (schedule.empty()) throw InputError("perturbation schedule is empty");
  Vector e = Vector::Zero(inst.dim());
  if (man.direction.empty()) {
    e(inst.dim() - 1) = 1.0;
  } else {
    const std::vector<double> d = parse_list(man.direction, "--direction");
    if (static_cast<int>(d.size()) != inst.dim()) {
      throw InputError("--direction must have " + std::to_string(inst.dim()) + " entries");
    }
    e = Eigen::Map<const Vector>(d.data(), inst.dim());
  }
  const Certificate cert = perturb_and_solve(inst, e, schedule, s.solver);

  Output o(man.output_path, out);
  std::ostream& os = o.stream();
  if (fmt == Format::Json) {
    os << canonical_dump(certificate_record(cert));
  } else if (fmt == Format::Csv) {
    const int n = inst.dim();
    os << "k,status,lambda,mu,sigma";
    for (int i = 0; i < n; ++i) os << ",y" << (i + 1);
    for (int i = 0; i < n; ++i) os << ",z" << (i + 1);
    os << '\n' << std::setprecision(17);
    for (const PerturbationStep& step : cert.perturbation_trace) {
      os << step.k << ',' << to_string(step.status);
      if (step.witness) {
        const StationaryPoint& w = *step.witness;
        os << ',' << w.dp.lam << ',' << w.dp.mu << ',' << w.dp.sig;
        for (int i = 0; i < n; ++i) os << ',' << w.x.y(i);
        for (int i = 0; i < n; ++i) os << ',' << w.x.z(i);
      } else {
        for (int i = 0; i < 3 + 2 * n; ++i) os << ',';
      }
      os << '\n';
    }
  } else {
    os << "k | (lambda, mu, sigma) | y | z | status\n";
    for (const PerturbationStep& step : cert.perturbation_trace) {
      os << fmt7(step.k) << " | ";
      if (step.witness) {
        os << fmt7(step.witness->dp) << " | " << fmt7(step.witness->x.y) << " | "
           << fmt7(step.witness->x.z);
      } else {
        os << "- | - | -";
      }
      os << " | " << to_string(step.status) << '\n';
    }
    os << "final status: " << to_string(cert.status) << '\n';
  }
  return exit_code(cert.status);
}

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

int cmd_verify(const RunManifest& man, const ProblemInstance& inst, const Settings& s,
               std::ostream& out) {
  const Format fmt = parse_format(man.format);
  if (fmt == Format::Csv) throw InputError("verify supports json and text formats");
  std::vector<CheckOutcome> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const SeparationReport sep = check_separation(inst, s.solver.separation_resolution, man.seed);
  const bool separated = sep.status == SeparationStatus::AnalyticallyCertified ||
                         sep.status == SeparationStatus::NumericallyPlausible;
  add("separation", separated,
      std::string(to_string(sep.status)) + ", min sampled h = " + fmt7(sep.min_sampled_h));

  if (separated) {
    const SpectralCache cache(inst);
    {
      const double recon = (inst.A() - cache.Q() * cache.beta().asDiagonal() * cache.Q().transpose())
                               .cwiseAbs()
                               .maxCoeff();
      bool ok = recon <= 1e-8 * std::max(1.0, inst.A().cwiseAbs().maxCoeff());
      std::string detail = "reconstruction error " + fmt7(recon);
      if (inst.dim() <= 3) {
        const double diff = (closed_form_eigenvalues(inst.A()) - cache.beta()).cwiseAbs().maxCoeff();
        ok = ok && diff <= 1e-8 * std::max(1.0, cache.beta().maxCoeff());
        detail += ", closed-form eigenvalue difference " + fmt7(diff);
      }
      add("spectral", ok, detail);
    }

    const Certificate cert = solve_global(inst, s.solver);
    add("certificate", cert.status == CertificateStatus::GlobalUnique,
        std::string(to_string(cert.status)));

    if (cert.status == CertificateStatus::GlobalUnique) {
      const StationaryPoint& w = *cert.witness;
      const GapReport gap = duality_gap(inst, cache, w.x, w.dp);
      add("duality_gap", gap.max_gap <= 1e-7 * std::max(1.0, std::abs(gap.pi)),
          "max gap " + fmt7(gap.max_gap));

      const Lemma1Report lem = verify_lemma1(inst, w);
      add("lemma1", lem.applicable && lem.consistent,
          "stationarity " + fmt7(lem.stationarity) + ", predicates (mu=0, lam=0, infeasible) = (" +
              std::to_string(lem.mu_zero) + ", " + std::to_string(lem.lam_zero) + ", " +
              std::to_string(lem.infeasible) + ")");

      const KktReport kkt = kkt_check(inst, w.x, w.dp.lam, w.dp.mu, 1e-6);
      add("kkt", kkt.passed(),
          "stationarity " + fmt7(kkt.stationarity) + ", feasibility " + fmt7(kkt.feasibility));

      try {
        const HessianReport hess = xi_hessian_x(inst, cache, w.dp);
        add("hessian_pd", hess.pd_direct && hess.pd_scalar,
            "min eigenvalue " + fmt7(hess.min_eigenvalue));
      } catch (const ConsistencyError& e) {
        add("hessian_pd", false, e.what());
      }

      if (inst.dim() <= kOracleMaxDim) {
        const OracleResult orc = brute_force_min(inst, cache, s.oracle_m, true, man.seed);
        double lowest = orc.raw_best_pi;
        for (const PolishedPair& p : orc.local_minima) lowest = std::min(lowest, p.pi);
        const double dist = std::sqrt((orc.best_pair.y - w.x.y).squaredNorm() +
                                      (orc.best_pair.z - w.x.z).squaredNorm());
        add("oracle", lowest >= w.pi - 1e-6 && dist <= 1e-4,
            "oracle pi " + fmt7(orc.pi) + " vs certified " + fmt7(w.pi) + ", argmin distance " +
                fmt7(dist));
      } else {
        add("oracle", true, "skipped: brute force limited to n <= 4");
      }
    }
  }

  bool all = true;
  for (const auto& c : checks) all = all && c.passed;
  Output o(man.output_path, out);
  if (fmt == Format::Json) {
    json arr = json::array();
    for (const auto& c : checks) {
      arr.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    o.stream() << canonical_dump(json{{"checks", std::move(arr)}, {"passed", all}});
  } else {
    for (const auto& c : checks) {
      o.stream() << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    if (!separated) o.stream() << "verification refused: surfaces are not separated\n";
    o.stream() << (all ? "all checks passed" : "verification failed") << '\n';
  }
  return all ? kExitGlobalUnique : kExitVerifyFailed;
}

void require_oracle_dim(const ProblemInstance& inst, std::ostream& err) {
  if (inst.dim() > kOracleMaxDim) {
    err << "warning: brute-force oracle is limited to n <= " << kOracleMaxDim << " (n = "
        << inst.dim() << ")\n";
    throw InputError("instance dimension exceeds the oracle limit");
  }
  if (inst.dim() == kOracleMaxDim) {
    err << "warning: n = 4 brute force scales as m^6 pair evaluations\n";
  }
}

int cmd_oracle(const RunManifest& man, const ProblemInstance& inst, const Settings& s,
               std::ostream& out, std::ostream& err) {
  const Format fmt = parse_format(man.format);
  if (fmt == Format::Csv) throw InputError("oracle supports json and text formats");
  require_oracle_dim(inst, err);
  const SpectralCache cache(inst);
  const OracleResult res = brute_force_min(inst, cache, s.oracle_m, s.polish, man.seed);
  Output o(man.output_path, out);
  if (fmt == Format::Json) {
    o.stream() << canonical_dump(to_json(res));
  } else {
    o.stream() << "pi: " << fmt7(res.pi) << "  distance: " << fmt7(res.distance) << '\n'
               << "y: " << fmt7(res.best_pair.y) << '\n'
               << "z: " << fmt7(res.best_pair.z) << '\n'
               << "samples: " << res.y_samples << " on Y, " << res.z_samples << " on Z (m = "
               << res.resolution << ")\n"
               << "local minima: " << res.local_minima.size() << '\n';
    for (const PolishedPair& p : res.local_minima) {
      o.stream() << "  pi " << fmt7(p.pi) << "  y " << fmt7(p.x.y) << "  z " << fmt7(p.x.z) << '\n';
    }
  }
  return kExitGlobalUnique;
}

int cmd_sample(const RunManifest& man, const ProblemInstance& inst, const Settings& s,
               std::ostream& out, std::ostream& err) {
  const Format fmt = man.format == "text" ? Format::Csv : parse_format(man.format);
  if (fmt == Format::Text) throw InputError("sample supports csv and json formats");
  require_oracle_dim(inst, err);
  const SpectralCache cache(inst);
  const SurfaceSample ys = sample_surface_y(inst, cache, s.sample_m, man.seed);
  const SurfaceSample zs = sample_surface_z(inst, s.sample_m, man.seed);
  Output o(man.output_path, out);
  if (fmt == Format::Csv) {
    write_surface_csv(o.stream(), ys, zs);
  } else {
    json ypts = json::array(), zpts = json::array();
    for (const Vector& p : ys.points) ypts.push_back(to_json(p));
    for (const Vector& p : zs.points) zpts.push_back(to_json(p));
    o.stream() << canonical_dump(json{{"Y", std::move(ypts)},
                                      {"Z", std::move(zpts)},
                                      {"y_residual_bound", ys.residual_bound},
                                      {"z_residual_bound", zs.residual_bound}});
  }
  return kExitGlobalUnique;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal distance between an ellipsoid and a quartic surface"};
  app.require_subcommand(1);
  RunManifest man;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--instance", man.instance_path, "instance JSON file")->required();
    sub->add_option("--config", man.config_overrides, "configuration override key=value");
    sub->add_option("--out", man.output_path, "write output to this file");
    sub->add_option("--format", man.format, "json, text or csv");
    sub->add_option("--seed", man.seed, "seed for the random direction sampler (n > 3)");
  };
  for (const char* name : {"solve", "verify", "perturb", "oracle", "sample"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    if (std::string_view(name) == "perturb") {
      sub->add_option("--direction", man.direction, "perturbation direction v1,v2,...");
      sub->add_option("--schedule", man.schedule, "perturbation schedule k1,k2,...");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitGlobalUnique;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    man.command = sub->get_name();
    if (man.command == "perturb") man.schedule_given = sub->count("--schedule") > 0;
  }

  try {
    const Settings settings = build_settings(man.config_overrides);
    const ProblemInstance inst = load_instance(man.instance_path);
    if (man.command == "solve") return cmd_solve(man, inst, settings, out, err);
    if (man.command == "perturb") return cmd_perturb(man, inst, settings, out);
    if (man.command == "verify") return cmd_verify(man, inst, settings, out);
    if (man.command == "oracle") return cmd_oracle(man, inst, settings, out, err);
    if (man.command == "sample") return cmd_sample(man, inst, settings, out, err);
    err << "error: unknown command\n";
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return man.command == "verify" ? kExitVerifyFailed : kExitInputError;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("mindist");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mindist
