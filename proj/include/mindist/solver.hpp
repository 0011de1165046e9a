#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mindist/dual.hpp"
#include "mindist/problem.hpp"
#include "mindist/separation.hpp"

namespace mindist {

struct SolverConfig {
  double grad_tol = 1e-10;
  int max_iter = 200;
  double damping_shrink = 0.5;
  double min_step = 1e-14;
  double dedup_tol = 1e-6;
  std::vector<DualPoint> seeds = default_seed_grid();
  int separation_resolution = 64;

  /// lam in {0.1, 0.5, 1, 2, 5} x mu in {0.5, 1, 2, 5, 10, 20}
  /// x sig in {+-0.02, +-0.1, +-0.5, 1}.
  static std::vector<DualPoint> default_seed_grid();

  /// Throws InputError on a non-positive tolerance, max_iter < 1, a shrink
  /// factor outside (0, 1) or an empty seed grid.
  void validate() const;
};

struct StationaryPoint {
  DualPoint dp;
  double grad_norm = 0.0;
  DualDiagnostics diagnostics;
  PrimalPoint x;
  double h_residual = 0.0;  // |h(y)|
  double g_residual = 0.0;  // |g(z)|
  double pi = 0.0;
  double pi_d = 0.0;
  int iterations = 0;
};

enum class CertificateStatus { GlobalUnique, StationaryNotCertified, NoneFound };

std::string_view to_string(CertificateStatus s);

struct PerturbationStep {
  double k = 0.0;
  Vector force;  // f + e / k
  CertificateStatus status = CertificateStatus::NoneFound;
  std::optional<StationaryPoint> witness;
};

struct Certificate {
  CertificateStatus status = CertificateStatus::NoneFound;
  std::optional<StationaryPoint> witness;
  std::vector<StationaryPoint> stationary_points;  // deduplicated, sorted by pi_d
  std::optional<SeparationReport> separation;
  std::vector<PerturbationStep> perturbation_trace;
};

/// Builds the full record for a dual point (recovered x, residuals, values).
/// Requires dp in S_a.
StationaryPoint make_stationary_point(const ProblemInstance& inst, const SpectralCache& cache,
                                      const DualPoint& dp, int iterations = 0);

/// Damped Newton on grad Pi^d = 0 with a central-difference 3x3 Jacobian.
/// Returns nothing when the seed does not converge to grad_tol within max_iter.
/// Throws NumericError if the residual turns NaN/Inf.
std::optional<StationaryPoint> newton_solve(const ProblemInstance& inst,
                                            const SpectralCache& cache, DualPoint seed,
                                            const SolverConfig& cfg);

/// Multistart search over cfg.seeds (plus extra_seeds), deduplication and
/// classification. GlobalUnique requires a stationary point in S_a^+ with
/// mu > 0 (DualDiagnostics::certifying). Throws ConsistencyError if two such
/// points recover different minimizers.
Certificate solve_global(const ProblemInstance& inst, const SolverConfig& cfg,
                         const std::vector<DualPoint>& extra_seeds = {});

/// Solves the sequence of instances with f replaced by f + e / k for each k of
/// the (strictly increasing, positive) schedule. Each run is additionally
/// warm-started from the previous run's witness, tracked by Newton continuation
/// through intermediate k values spaced by a factor of 1.2. The returned certificate
/// carries the last run's status and witness plus the whole trace.
Certificate perturb_and_solve(const ProblemInstance& inst, const Vector& direction,
                              const std::vector<double>& schedule, const SolverConfig& cfg);

struct Lemma1Report {
  bool applicable = false;  // the point is a stationary point of Xi
  double stationarity = 0.0;
  bool mu_zero = false;
  bool lam_zero = false;
  bool infeasible = false;
  bool consistent = true;   // all three predicates equal (only when applicable)
};

/// Checks that mu = 0, lam = 0 and x outside X_c hold together or fail together
/// at a stationary point of Xi. Points with |grad Xi|_inf > stationarity_tol are
/// reported as not applicable.
Lemma1Report verify_lemma1(const ProblemInstance& inst, const PrimalPoint& x,
                           const DualPoint& dp, double stationarity_tol = 1e-6);
Lemma1Report verify_lemma1(const ProblemInstance& inst, const StationaryPoint& sp);

}  // namespace mindist
