#pragma once

#include <Eigen/Dense>

namespace mindist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Data of the minimal-distance problem between the ellipsoid
///   Y_c = { y : 1/2 (y'Ay - r^2) = 0 }
/// and the quartic surface
///   Z_c = { z : 1/2 alpha (1/2 |z - c|^2 - eta)^2 - f'(z - c) = 0 }.
///
/// Immutable; construction validates every invariant.
class ProblemInstance {
 public:
  /// Throws InputError when A is not symmetric (max|A - A'| > 1e-10 max(1, max|A|)),
  /// not positive definite, when r, alpha or eta are not positive, or on any
  /// dimension mismatch.
  ProblemInstance(Matrix A, double r, double alpha, double eta, Vector f, Vector c);

  int dim() const { return static_cast<int>(A_.rows()); }
  const Matrix& A() const { return A_; }
  double r() const { return r_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }
  const Vector& f() const { return f_; }
  const Vector& c() const { return c_; }

  /// Same instance with the force vector replaced.
  ProblemInstance with_force(Vector f) const;

 private:
  Matrix A_;
  double r_;
  double alpha_;
  double eta_;
  Vector f_;
  Vector c_;
};

struct PrimalPoint {
  Vector y;
  Vector z;
};

/// Canonical function V(xi) = 1/2 alpha (xi - eta)^2 on xi >= 0 and its
/// Legendre conjugate V*(sig) = sig^2 / (2 alpha) + eta sig on sig >= -alpha eta.
/// Evaluations outside those domains throw DomainError.
class CanonicalFunction {
 public:
  CanonicalFunction(double alpha, double eta) : alpha_(alpha), eta_(eta) {}
  explicit CanonicalFunction(const ProblemInstance& inst)
      : CanonicalFunction(inst.alpha(), inst.eta()) {}

  double value(double xi) const;
  double derivative(double xi) const;
  double conjugate(double sig) const;
  double conjugate_derivative(double sig) const;

  bool in_primal_domain(double xi) const { return xi >= 0.0; }
  bool in_dual_domain(double sig) const { return sig >= -alpha_ * eta_; }

  // Unchecked forms, used where the domain is tracked as a diagnostic instead.
  double conjugate_unchecked(double sig) const { return sig * sig / (2.0 * alpha_) + eta_ * sig; }
  double conjugate_derivative_unchecked(double sig) const { return sig / alpha_ + eta_; }

 private:
  double alpha_;
  double eta_;
};

double h_value(const ProblemInstance& inst, const Vector& y);
double g_value(const ProblemInstance& inst, const Vector& z);
double pi_value(const ProblemInstance& inst, const PrimalPoint& x);
double lagrangian(const ProblemInstance& inst, const PrimalPoint& x, double lam, double mu);

/// xi = Lambda(z) = 1/2 |z - c|^2.
double geometric_operator(const ProblemInstance& inst, const Vector& z);

Vector h_gradient(const ProblemInstance& inst, const Vector& y);
Vector g_gradient(const ProblemInstance& inst, const Vector& z);
Matrix g_hessian(const ProblemInstance& inst, const Vector& z);

/// Throws InputError unless v has the instance dimension.
void require_dim(const ProblemInstance& inst, const Vector& v, const char* what);

}  // namespace mindist
