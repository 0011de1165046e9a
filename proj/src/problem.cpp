#include "mindist/problem.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mindist/errors.hpp"

namespace mindist {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be a positive finite number, got " << v;
    throw InputError(os.str());
  }
}

}  // namespace

ProblemInstance::ProblemInstance(Matrix A, double r, double alpha, double eta, Vector f, Vector c)
    : A_(std::move(A)), r_(r), alpha_(alpha), eta_(eta), f_(std::move(f)), c_(std::move(c)) {
  const auto n = A_.rows();
  if (n < 2 || A_.cols() != n) {
    throw InputError("A must be a square matrix of dimension n >= 2");
  }
  if (f_.size() != n || c_.size() != n) {
    throw InputError("f and c must have length n = " + std::to_string(n));
  }
  if (!A_.allFinite() || !f_.allFinite() || !c_.allFinite()) {
    throw InputError("instance data contains non-finite entries");
  }
  require_positive(r_, "r");
  require_positive(alpha_, "alpha");
  require_positive(eta_, "eta");

  const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
  const double asym = (A_ - A_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    std::ostringstream os;
    os << "A is not symmetric (max|A - A'| = " << asym << ")";
    throw InputError(os.str());
  }
  // Symmetrize away the admissible roundoff so downstream spectral work sees
  // an exactly symmetric matrix.
  A_ = 0.5 * (A_ + A_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(A_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0)) {
    throw InputError("A must be positive definite");
  }
}

ProblemInstance ProblemInstance::with_force(Vector f) const {
  return ProblemInstance(A_, r_, alpha_, eta_, std::move(f), c_);
}

double CanonicalFunction::value(double xi) const {
  if (!in_primal_domain(xi)) throw DomainError("V evaluated at xi < 0", xi);
  return 0.5 * alpha_ * (xi - eta_) * (xi - eta_);
}

double CanonicalFunction::derivative(double xi) const {
  if (!in_primal_domain(xi)) throw DomainError("DV evaluated at xi < 0", xi);
  return alpha_ * (xi - eta_);
}

double CanonicalFunction::conjugate(double sig) const {
  if (!in_dual_domain(sig)) throw DomainError("V* evaluated at sig < -alpha*eta", sig);
  return conjugate_unchecked(sig);
}

double CanonicalFunction::conjugate_derivative(double sig) const {
  if (!in_dual_domain(sig)) throw DomainError("DV* evaluated at sig < -alpha*eta", sig);
  return conjugate_derivative_unchecked(sig);
}

void require_dim(const ProblemInstance& inst, const Vector& v, const char* what) {
  if (v.size() != inst.dim()) {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected " << inst.dim();
    throw InputError(os.str());
  }
}

double h_value(const ProblemInstance& inst, const Vector& y) {
  require_dim(inst, y, "y");
  return 0.5 * (y.dot(inst.A() * y) - inst.r() * inst.r());
}

double geometric_operator(const ProblemInstance& inst, const Vector& z) {
  require_dim(inst, z, "z");
  return 0.5 * (z - inst.c()).squaredNorm();
}

double g_value(const ProblemInstance& inst, const Vector& z) {
  const double xi = geometric_operator(inst, z);
  const double t = xi - inst.eta();
  return 0.5 * inst.alpha() * t * t - inst.f().dot(z - inst.c());
}

double pi_value(const ProblemInstance& inst, const PrimalPoint& x) {
  require_dim(inst, x.y, "y");
  require_dim(inst, x.z, "z");
  return 0.5 * (x.y - x.z).squaredNorm();
}

double lagrangian(const ProblemInstance& inst, const PrimalPoint& x, double lam, double mu) {
  return pi_value(inst, x) + lam * h_value(inst, x.y) + mu * g_value(inst, x.z);
}

Vector h_gradient(const ProblemInstance& inst, const Vector& y) {
  require_dim(inst, y, "y");
  return inst.A() * y;
}

Vector g_gradient(const ProblemInstance& inst, const Vector& z) {
  const double xi = geometric_operator(inst, z);
  return inst.alpha() * (xi - inst.eta()) * (z - inst.c()) - inst.f();
}

Matrix g_hessian(const ProblemInstance& inst, const Vector& z) {
  const double xi = geometric_operator(inst, z);
  const Vector d = z - inst.c();
  const auto n = inst.dim();
  return inst.alpha() * (d * d.transpose()) +
         inst.alpha() * (xi - inst.eta()) * Matrix::Identity(n, n);
}

}  // namespace mindist
