#include "mindist/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mindist/errors.hpp"

namespace mindist {

namespace {

constexpr double kContinuationRatio = 1.2;

bool dual_less(const StationaryPoint& a, const StationaryPoint& b) {
  if (a.pi_d != b.pi_d) return a.pi_d < b.pi_d;
  if (a.dp.lam != b.dp.lam) return a.dp.lam < b.dp.lam;
  if (a.dp.mu != b.dp.mu) return a.dp.mu < b.dp.mu;
  return a.dp.sig < b.dp.sig;
}

double x_distance(const PrimalPoint& a, const PrimalPoint& b) {
  return std::sqrt((a.y - b.y).squaredNorm() + (a.z - b.z).squaredNorm());
}

/// Gradient at v, or nothing when v is outside S_a.
std::optional<Eigen::Vector3d> try_gradient(const ProblemInstance& inst,
                                            const SpectralCache& cache,
                                            const Eigen::Vector3d& v) {
  const DualPoint dp = DualPoint::from_vector(v);
  if (!dual_diagnostics(inst, cache, dp).in_sa) return std::nullopt;
  return pi_d_gradient(inst, cache, dp);
}

std::optional<Eigen::Matrix3d> fd_jacobian(const ProblemInstance& inst, const SpectralCache& cache,
                                           const Eigen::Vector3d& v, const Eigen::Vector3d& fv) {
  Eigen::Matrix3d J;
  for (int j = 0; j < 3; ++j) {
    const double step = std::max(1e-7, 1e-7 * std::abs(v(j)));
    Eigen::Vector3d vp = v, vm = v;
    vp(j) += step;
    vm(j) -= step;
    const auto fp = try_gradient(inst, cache, vp);
    const auto fm = try_gradient(inst, cache, vm);
    if (fp && fm) {
      J.col(j) = (*fp - *fm) / (2.0 * step);
    } else if (fp) {
      J.col(j) = (*fp - fv) / step;
    } else if (fm) {
      J.col(j) = (fv - *fm) / step;
    } else {
      return std::nullopt;
    }
  }
  return J;
}

DualPoint nudge_into_sa(const ProblemInstance& inst, const SpectralCache& cache, DualPoint dp) {
  double delta = 10.0 * kSaTol;
  for (int tries = 0; tries < 12 && !dual_diagnostics(inst, cache, dp).in_sa; ++tries) {
    dp.lam += delta * (1.0 + std::abs(dp.lam));
    dp.sig += delta * (1.0 + std::abs(dp.sig));
    delta *= 10.0;
  }
  return dp;
}

}  // namespace

std::string_view to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::GlobalUnique: return "GlobalUnique";
    case CertificateStatus::StationaryNotCertified: return "StationaryNotCertified";
    case CertificateStatus::NoneFound: return "NoneFound";
  }
  return "NoneFound";
}

std::vector<DualPoint> SolverConfig::default_seed_grid() {
  std::vector<DualPoint> seeds;
  for (double lam : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (double mu : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
      for (double sig : {-0.5, -0.1, -0.02, 0.02, 0.1, 0.5, 1.0}) {
        seeds.push_back({lam, mu, sig});
      }
    }
  }
  return seeds;
}

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw InputError("gradTol must be positive");
  if (max_iter < 1) throw InputError("maxIter must be at least 1");
  if (!(damping_shrink > 0.0 && damping_shrink < 1.0)) {
    throw InputError("dampingShrink must lie in (0, 1)");
  }
  if (!(min_step > 0.0)) throw InputError("minStep must be positive");
  if (!(dedup_tol > 0.0)) throw InputError("dedupTol must be positive");
  if (seeds.empty()) throw InputError("seed grid is empty");
  if (separation_resolution < 4) throw InputError("separation resolution must be >= 4");
}

StationaryPoint make_stationary_point(const ProblemInstance& inst, const SpectralCache& cache,
                                      const DualPoint& dp, int iterations) {
  StationaryPoint sp;
  sp.dp = dp;
  sp.iterations = iterations;
  sp.diagnostics = dual_diagnostics(inst, cache, dp);
  sp.x = x_of_dual(inst, cache, dp);
  sp.grad_norm = xi_gradient(inst, sp.x, dp).tail<3>().norm();
  sp.h_residual = std::abs(h_value(inst, sp.x.y));
  sp.g_residual = std::abs(g_value(inst, sp.x.z));
  sp.pi = pi_value(inst, sp.x);
  sp.pi_d = xi_value(inst, sp.x, dp);
  return sp;
}

std::optional<StationaryPoint> newton_solve(const ProblemInstance& inst,
                                            const SpectralCache& cache, DualPoint seed,
                                            const SolverConfig& cfg) {
  seed = nudge_into_sa(inst, cache, seed);
  Eigen::Vector3d v = seed.as_vector();
  auto f0 = try_gradient(inst, cache, v);
  if (!f0) return std::nullopt;
  Eigen::Vector3d F = *f0;

  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    if (!F.allFinite()) throw NumericError("non-finite dual gradient during Newton iteration");
    const double norm = F.norm();
    if (norm <= cfg.grad_tol) {
      return make_stationary_point(inst, cache, DualPoint::from_vector(v), iter);
    }
    if (iter == cfg.max_iter) break;

    const auto J = fd_jacobian(inst, cache, v, F);
    if (!J) return std::nullopt;
    const Eigen::Vector3d delta = J->colPivHouseholderQr().solve(-F);
    if (!delta.allFinite()) return std::nullopt;

    bool accepted = false;
    for (double t = 1.0; t >= cfg.min_step; t *= cfg.damping_shrink) {
      const Eigen::Vector3d trial = v + t * delta;
      const auto ft = try_gradient(inst, cache, trial);
      if (ft && ft->allFinite() && ft->norm() < norm) {
        v = trial;
        F = *ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

Certificate solve_global(const ProblemInstance& inst, const SolverConfig& cfg,
                         const std::vector<DualPoint>& extra_seeds) {
  cfg.validate();
  const SpectralCache cache(inst);
  Certificate cert;
  cert.separation = check_separation(inst, cfg.separation_resolution);

  std::vector<DualPoint> seeds = extra_seeds;
  seeds.insert(seeds.end(), cfg.seeds.begin(), cfg.seeds.end());

  std::vector<StationaryPoint> found;
  for (const DualPoint& seed : seeds) {
    try {
      if (auto sp = newton_solve(inst, cache, seed, cfg)) found.push_back(std::move(*sp));
    } catch (const NumericError&) {
      // A diverging seed only loses itself.
    } catch (const SingularityError&) {
    }
  }
  std::sort(found.begin(), found.end(), dual_less);
  for (auto& sp : found) {
    const bool dup = std::any_of(
        cert.stationary_points.begin(), cert.stationary_points.end(),
        [&](const StationaryPoint& q) {
          return (q.dp.as_vector() - sp.dp.as_vector()).norm() <= cfg.dedup_tol;
        });
    if (!dup) cert.stationary_points.push_back(std::move(sp));
  }

  const StationaryPoint* witness = nullptr;
  for (const StationaryPoint& sp : cert.stationary_points) {
    if (!sp.diagnostics.certifying) continue;
    if (witness == nullptr) {
      witness = &sp;
    } else if (x_distance(sp.x, witness->x) > cfg.dedup_tol) {
      std::ostringstream os;
      os << "two certifying S_a+ stationary points recover different minimizers: ("
         << witness->dp.lam << ", " << witness->dp.mu << ", " << witness->dp.sig << ") and ("
         << sp.dp.lam << ", " << sp.dp.mu << ", " << sp.dp.sig << ")";
      throw ConsistencyError(os.str());
    }
  }
  if (witness != nullptr) {
    cert.status = CertificateStatus::GlobalUnique;
    cert.witness = *witness;
  } else if (!cert.stationary_points.empty()) {
    cert.status = CertificateStatus::StationaryNotCertified;
    cert.witness = *std::min_element(
        cert.stationary_points.begin(), cert.stationary_points.end(),
        [](const StationaryPoint& a, const StationaryPoint& b) {
          const bool fa = std::max(a.h_residual, a.g_residual) <= 1e-6;
          const bool fb = std::max(b.h_residual, b.g_residual) <= 1e-6;
          if (fa != fb) return fa;
          return a.pi < b.pi;
        });
  } else {
    cert.status = CertificateStatus::NoneFound;
  }
  return cert;
}

Certificate perturb_and_solve(const ProblemInstance& inst, const Vector& direction,
                              const std::vector<double>& schedule, const SolverConfig& cfg) {
  require_dim(inst, direction, "perturbation direction");
  if (direction.isZero(0.0)) throw InputError("perturbation direction must be nonzero");
  if (schedule.empty()) throw InputError("perturbation schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] > schedule[i - 1]))) {
      throw InputError("perturbation schedule must be positive and strictly increasing");
    }
  }
  cfg.validate();

  Certificate last;
  std::vector<PerturbationStep> trace;
  std::vector<DualPoint> warm;
  double prev_k = 0.0;
  for (double k : schedule) {
    // Near-degenerate instances put several stationary points close together;
    // following the witness through small geometric steps in k keeps Newton on
    // its branch where a single jump would not.
    if (!warm.empty()) {
      DualPoint tracked = warm.front();
      for (double kk = prev_k * kContinuationRatio; kk < k; kk *= kContinuationRatio) {
        try {
          const ProblemInstance mid = inst.with_force(inst.f() + direction / kk);
          const SpectralCache mid_cache(mid);
          const auto sp = newton_solve(mid, mid_cache, tracked, cfg);
          if (!sp) break;
          tracked = sp->dp;
        } catch (const std::exception&) {
          break;
        }
      }
      warm.push_back(tracked);
    }
    prev_k = k;
    PerturbationStep step;
    step.k = k;
    step.force = inst.f() + direction / k;
    try {
      last = solve_global(inst.with_force(step.force), cfg, warm);
      step.status = last.status;
      step.witness = last.witness;
      if (last.witness) warm = {last.witness->dp};
    } catch (const std::exception&) {
      last = Certificate{};
      step.status = CertificateStatus::NoneFound;
    }
    trace.push_back(std::move(step));
  }
  last.perturbation_trace = std::move(trace);
  return last;
}

Lemma1Report verify_lemma1(const ProblemInstance& inst, const PrimalPoint& x,
                           const DualPoint& dp, double stationarity_tol) {
  Lemma1Report rep;
  rep.stationarity = xi_gradient(inst, x, dp).lpNorm<Eigen::Infinity>();
  rep.applicable = rep.stationarity <= stationarity_tol;
  rep.mu_zero = std::abs(dp.mu) <= 1e-8;
  rep.lam_zero = std::abs(dp.lam) <= 1e-8;
  rep.infeasible = std::max(std::abs(h_value(inst, x.y)), std::abs(g_value(inst, x.z))) > 1e-6;
  rep.consistent = !rep.applicable ||
                   (rep.mu_zero == rep.lam_zero && rep.lam_zero == rep.infeasible);
  return rep;
}

Lemma1Report verify_lemma1(const ProblemInstance& inst, const StationaryPoint& sp) {
  return verify_lemma1(inst, sp.x, sp.dp);
}

}  // namespace mindist
