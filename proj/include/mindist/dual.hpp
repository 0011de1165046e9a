#pragma once

#include <vector>

#include "mindist/problem.hpp"

namespace mindist {

/// Threshold separating a genuinely singular eigen-factor from roundoff.
inline constexpr double kSaTol = 1e-9;

/// (lam, mu, sig): multipliers of h and g and the canonical dual variable.
struct DualPoint {
  double lam = 0.0;
  double mu = 0.0;
  double sig = 0.0;

  Eigen::Vector3d as_vector() const { return {lam, mu, sig}; }
  static DualPoint from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

/// Eigendecomposition A = Q diag(beta) Q' with beta ascending. Every matrix
/// that appears in the dual problem is a function of A and therefore diagonal
/// in the basis Q.
class SpectralCache {
 public:
  /// Throws NumericError if the eigensolver fails or its output violates the
  /// orthogonality / reconstruction bounds.
  explicit SpectralCache(const ProblemInstance& inst);

  const Matrix& Q() const { return Q_; }
  const Vector& beta() const { return beta_; }

  Vector to_eigenbasis(const Vector& v) const { return Q_.transpose() * v; }
  Vector from_eigenbasis(const Vector& w) const { return Q_ * w; }

 private:
  Matrix Q_;
  Vector beta_;
};

struct DualDiagnostics {
  Vector d;                          // d_i = (1 + mu sig)(1 + lam beta_i) - 1
  Vector one_plus_lam_beta;          // eigenvalues of I + lam A
  double min_one_plus_lam_beta = 0;  // min_i (1 + lam beta_i)
  bool in_sa = false;                // all |d_i| > kSaTol
  bool in_sa_plus = false;           // I + lam A > 0 and G > 0
  // in_sa_plus and mu > 0. Only then does Xi(., lam, mu, sig) bound the
  // Lagrangian from below, which the global optimality argument needs; S_a+
  // stationary points with mu < 0 exist and can recover non-optimal pairs.
  bool certifying = false;
  bool sig_in_conjugate_domain = false;  // sig >= -alpha eta
};

DualDiagnostics dual_diagnostics(const ProblemInstance& inst, const SpectralCache& cache,
                                 const DualPoint& dp);

/// Primal recovery map: the unique x with grad_x Xi(x, dp) = 0. Throws
/// SingularityError (listing the offending d_i) when dp is outside S_a.
PrimalPoint x_of_dual(const ProblemInstance& inst, const SpectralCache& cache,
                      const DualPoint& dp);

/// Total complementary function
///   Xi = 1/2|y - z|^2 + lam h(y) + mu (Lambda(z) sig - V*(sig) - f'(z - c)).
/// sig below -alpha eta is evaluated anyway; callers read the domain flag from
/// dual_diagnostics.
double xi_value(const ProblemInstance& inst, const PrimalPoint& x, const DualPoint& dp);

/// Full gradient of Xi in (y, z, lam, mu, sig), length 2n + 3.
Vector xi_gradient(const ProblemInstance& inst, const PrimalPoint& x, const DualPoint& dp);

double pi_d_value(const ProblemInstance& inst, const SpectralCache& cache, const DualPoint& dp);

/// Gradient of the dual function via the envelope identity: the partial
/// derivatives of Xi in (lam, mu, sig) evaluated at x_of_dual(dp).
Eigen::Vector3d pi_d_gradient(const ProblemInstance& inst, const SpectralCache& cache,
                              const DualPoint& dp);

struct HessianReport {
  Matrix hessian;             // [[I + lam A, -I], [-I, (1 + mu sig) I]]
  double min_eigenvalue = 0;  // smallest eigenvalue of the block matrix
  bool pd_scalar = false;     // via the d_i / (1 + lam beta_i) criterion
  bool pd_direct = false;     // via min_eigenvalue
};

/// Assembles the x-Hessian of Xi and decides positive definiteness two
/// independent ways. Throws ConsistencyError when they disagree away from the
/// boundary of the PD cone.
HessianReport xi_hessian_x(const ProblemInstance& inst, const SpectralCache& cache,
                           const DualPoint& dp);

struct GapReport {
  double pi = 0;
  double lagrangian = 0;
  double xi = 0;
  double pi_d = 0;
  double max_gap = 0;  // max pairwise |difference| of the four values
};

GapReport duality_gap(const ProblemInstance& inst, const SpectralCache& cache,
                      const PrimalPoint& x, const DualPoint& dp);

}  // namespace mindist

namespace mindist {

/// Eigenvalues (ascending) of a symmetric 2x2 or 3x3 matrix from the quadratic
/// formula and the trigonometric solution of the characteristic cubic. Used as
/// a cross-check on the iterative eigensolver.
Vector closed_form_eigenvalues(const Matrix& A);

}  // namespace mindist
