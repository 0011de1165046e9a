#include "mindist/dual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mindist/errors.hpp"

namespace mindist {

SpectralCache::SpectralCache(const ProblemInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(inst.A());
  if (es.info() != Eigen::Success) {
    throw NumericError("eigendecomposition of A failed");
  }
  Q_ = es.eigenvectors();
  beta_ = es.eigenvalues();  // ascending

  const auto n = inst.dim();
  const double orth = (Q_.transpose() * Q_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, inst.A().cwiseAbs().maxCoeff());
  const double recon =
      (inst.A() - Q_ * beta_.asDiagonal() * Q_.transpose()).cwiseAbs().maxCoeff();
  if (orth > 1e-10 || recon > 1e-8 * scale || !(beta_.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "eigendecomposition of A out of tolerance (orthogonality " << orth
       << ", reconstruction " << recon << ")";
    throw NumericError(os.str());
  }
}

DualDiagnostics dual_diagnostics(const ProblemInstance& inst, const SpectralCache& cache,
                                 const DualPoint& dp) {
  DualDiagnostics diag;
  const Vector& beta = cache.beta();
  diag.one_plus_lam_beta = (1.0 + dp.lam * beta.array()).matrix();
  diag.d = ((1.0 + dp.mu * dp.sig) * diag.one_plus_lam_beta.array() - 1.0).matrix();
  diag.min_one_plus_lam_beta = diag.one_plus_lam_beta.minCoeff();
  diag.in_sa = (diag.d.array().abs() > kSaTol).all();
  diag.in_sa_plus = diag.min_one_plus_lam_beta > kSaTol && (diag.d.array() > kSaTol).all();
  diag.certifying = diag.in_sa_plus && dp.mu > kSaTol;
  diag.sig_in_conjugate_domain = CanonicalFunction(inst).in_dual_domain(dp.sig);
  return diag;
}

PrimalPoint x_of_dual(const ProblemInstance& inst, const SpectralCache& cache,
                      const DualPoint& dp) {
  const DualDiagnostics diag = dual_diagnostics(inst, cache, dp);
  if (!diag.in_sa) {
    std::vector<double> bad;
    for (Eigen::Index i = 0; i < diag.d.size(); ++i) {
      if (std::abs(diag.d(i)) <= kSaTol) bad.push_back(diag.d(i));
    }
    std::ostringstream os;
    os << "dual point (" << dp.lam << ", " << dp.mu << ", " << dp.sig
       << ") is outside S_a: " << bad.size() << " singular eigen-factor(s)";
    throw SingularityError(os.str(), std::move(bad));
  }

  // y = mu G^{-1} (f + sig c), z = (I + lam A) y, all diagonal in the eigenbasis.
  const Vector rhs = cache.to_eigenbasis(inst.f() + dp.sig * inst.c());
  const Vector w = (dp.mu * rhs.array() / diag.d.array()).matrix();
  PrimalPoint x;
  x.y = cache.from_eigenbasis(w);
  x.z = cache.from_eigenbasis((diag.one_plus_lam_beta.array() * w.array()).matrix());
  return x;
}

double xi_value(const ProblemInstance& inst, const PrimalPoint& x, const DualPoint& dp) {
  const CanonicalFunction v(inst);
  const double coupling = geometric_operator(inst, x.z) * dp.sig - v.conjugate_unchecked(dp.sig) -
                          inst.f().dot(x.z - inst.c());
  return pi_value(inst, x) + dp.lam * h_value(inst, x.y) + dp.mu * coupling;
}

Vector xi_gradient(const ProblemInstance& inst, const PrimalPoint& x, const DualPoint& dp) {
  const auto n = inst.dim();
  const CanonicalFunction v(inst);
  const double xi = geometric_operator(inst, x.z);
  Vector grad(2 * n + 3);
  grad.head(n) = x.y - x.z + dp.lam * (inst.A() * x.y);
  grad.segment(n, n) = x.z - x.y + dp.mu * dp.sig * (x.z - inst.c()) - dp.mu * inst.f();
  grad(2 * n) = h_value(inst, x.y);
  grad(2 * n + 1) = xi * dp.sig - v.conjugate_unchecked(dp.sig) - inst.f().dot(x.z - inst.c());
  grad(2 * n + 2) = dp.mu * (xi - v.conjugate_derivative_unchecked(dp.sig));
  return grad;
}

double pi_d_value(const ProblemInstance& inst, const SpectralCache& cache, const DualPoint& dp) {
  return xi_value(inst, x_of_dual(inst, cache, dp), dp);
}

Eigen::Vector3d pi_d_gradient(const ProblemInstance& inst, const SpectralCache& cache,
                              const DualPoint& dp) {
  const PrimalPoint x = x_of_dual(inst, cache, dp);
  const Vector full = xi_gradient(inst, x, dp);
  return full.tail<3>();
}

HessianReport xi_hessian_x(const ProblemInstance& inst, const SpectralCache& cache,
                           const DualPoint& dp) {
  const auto n = inst.dim();
  const Matrix I = Matrix::Identity(n, n);
  HessianReport rep;
  rep.hessian.resize(2 * n, 2 * n);
  rep.hessian << I + dp.lam * inst.A(), -I, -I, (1.0 + dp.mu * dp.sig) * I;

  Eigen::SelfAdjointEigenSolver<Matrix> es(rep.hessian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on the Xi Hessian");
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.pd_direct = rep.min_eigenvalue > 0.0;

  const DualDiagnostics diag = dual_diagnostics(inst, cache, dp);
  rep.pd_scalar = diag.in_sa_plus;

  if (rep.pd_scalar != rep.pd_direct) {
    // Within a thin band around the PD boundary the two thresholds may
    // legitimately fall on different sides.
    const double scalar_margin =
        std::min(std::abs(diag.min_one_plus_lam_beta), diag.d.cwiseAbs().minCoeff());
    const double scale = 1.0 + rep.hessian.cwiseAbs().maxCoeff();
    if (std::abs(rep.min_eigenvalue) > 1e-8 * scale && scalar_margin > 10.0 * kSaTol) {
      std::ostringstream os;
      os << "PD tests disagree at (" << dp.lam << ", " << dp.mu << ", " << dp.sig
         << "): scalar=" << rep.pd_scalar << " direct=" << rep.pd_direct
         << " min eigenvalue=" << rep.min_eigenvalue;
      throw ConsistencyError(os.str());
    }
  }
  return rep;
}

GapReport duality_gap(const ProblemInstance& inst, const SpectralCache& cache,
                      const PrimalPoint& x, const DualPoint& dp) {
  GapReport rep;
  rep.pi = pi_value(inst, x);
  rep.lagrangian = lagrangian(inst, x, dp.lam, dp.mu);
  rep.xi = xi_value(inst, x, dp);
  rep.pi_d = pi_d_value(inst, cache, dp);
  const double vals[] = {rep.pi, rep.lagrangian, rep.xi, rep.pi_d};
  const auto [lo, hi] = std::minmax_element(std::begin(vals), std::end(vals));
  rep.max_gap = *hi - *lo;
  return rep;
}

}  // namespace mindist

namespace mindist {

Vector closed_form_eigenvalues(const Matrix& A) {
  if (A.rows() == 2 && A.cols() == 2) {
    const double mean = 0.5 * (A(0, 0) + A(1, 1));
    const double half_diff = 0.5 * (A(0, 0) - A(1, 1));
    const double rad = std::hypot(half_diff, A(0, 1));
    return Vector{{mean - rad, mean + rad}};
  }
  if (A.rows() == 3 && A.cols() == 3) {
    const double q = A.trace() / 3.0;
    const double off = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
    const double p2 = (A(0, 0) - q) * (A(0, 0) - q) + (A(1, 1) - q) * (A(1, 1) - q) +
                      (A(2, 2) - q) * (A(2, 2) - q) + 2.0 * off;
    const double p = std::sqrt(p2 / 6.0);
    if (p == 0.0) return Vector::Constant(3, q);
    const Matrix B = (A - q * Matrix::Identity(3, 3)) / p;
    const double half_det = std::clamp(B.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double two_pi_3 = 2.0943951023931954923;
    Vector ev(3);
    ev << q + 2.0 * p * std::cos(phi + two_pi_3), q + 2.0 * p * std::cos(phi - two_pi_3),
        q + 2.0 * p * std::cos(phi);
    std::sort(ev.data(), ev.data() + 3);
    return ev;
  }
  throw InputError("closed-form eigenvalues are only available for 2x2 and 3x3 matrices");
}

}  // namespace mindist
