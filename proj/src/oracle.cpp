#include "mindist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <tuple>

#include "mindist/errors.hpp"

namespace mindist {

namespace {

constexpr int kRadialCells = 512;
constexpr int kPolishSeeds = 20;
constexpr double kBasinSeparation = 1e-4;
constexpr double kPolishResidual = 1e-10;
constexpr double kPolishTangential = 1e-7;

/// The radial restriction q(rho) = 1/2 alpha (rho^2/2 - eta)^2 - s rho of g
/// along z = c + rho u, with s = f'u.
struct RadialQuartic {
  double alpha;
  double eta;
  double s;

  double value(double rho) const {
    const double t = 0.5 * rho * rho - eta;
    return 0.5 * alpha * t * t - s * rho;
  }
  double slope(double rho) const { return alpha * rho * (0.5 * rho * rho - eta) - s; }
  double curvature(double rho) const { return alpha * (1.5 * rho * rho - eta); }
};

/// Root of a function with a sign change on [a, b]: Newton steps safeguarded
/// by bisection, run to interval collapse.
template <typename F, typename DF>
double bracketed_root(F fn, DF dfn, double a, double b) {
  double fa = fn(a);
  if (fa == 0.0) return a;
  if (fn(b) == 0.0) return b;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = fn(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double dfx = dfn(x);
    double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (next == x || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b)) {
      return next;
    }
    x = next;
  }
  return x;
}

Matrix as_columns(const std::vector<Vector>& pts, int n) {
  Matrix m(n, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = pts[j];
  return m;
}

Vector concat(const PrimalPoint& x) {
  Vector v(x.y.size() + x.z.size());
  v << x.y, x.z;
  return v;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

Vector tangential(const Vector& v, const Vector& normal) {
  const double nn = normal.squaredNorm();
  if (nn == 0.0) return v;
  return v - (v.dot(normal) / nn) * normal;
}

/// Newton return to Z_c along grad g.
bool return_to_z(const ProblemInstance& inst, Vector& z) {
  for (int it = 0; it < 60; ++it) {
    const double gv = g_value(inst, z);
    if (std::abs(gv) <= 1e-15) return true;
    const Vector grad = g_gradient(inst, z);
    const double gg = grad.squaredNorm();
    if (gg < 1e-300) return false;
    z -= (gv / gg) * grad;
  }
  return std::abs(g_value(inst, z)) <= 1e-12;
}

/// Decreases 1/2 |z - target|^2 over Z_c starting from z.
void descend_on_z(const ProblemInstance& inst, const Vector& target, Vector& z) {
  for (int it = 0; it < 20; ++it) {
    const Vector step = tangential(z - target, g_gradient(inst, z));
    if (step.norm() < 1e-15) return;
    const double before = (z - target).squaredNorm();
    double t = 1.0;
    bool moved = false;
    while (t > 1e-8) {
      Vector trial = z - t * step;
      if (return_to_z(inst, trial) && (trial - target).squaredNorm() < before) {
        z = trial;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return;
  }
}

/// Newton on (y - z + lam A y, z - y + mu grad g, h, g) = 0.
void kkt_newton(const ProblemInstance& inst, PrimalPoint& x) {
  const int n = inst.dim();
  auto [lam, mu] = least_squares_multipliers(inst, x);
  const Matrix I = Matrix::Identity(n, n);

  auto residual = [&](const Vector& y, const Vector& z, double l, double m) {
    Vector F(2 * n + 2);
    F.head(n) = y - z + l * (inst.A() * y);
    F.segment(n, n) = z - y + m * g_gradient(inst, z);
    F(2 * n) = h_value(inst, y);
    F(2 * n + 1) = g_value(inst, z);
    return F;
  };

  const PrimalPoint start = x;
  const double start_pi = pi_value(inst, x);
  Vector y = x.y, z = x.z;
  Vector F = residual(y, z, lam, mu);
  for (int it = 0; it < 40 && F.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
    Matrix J = Matrix::Zero(2 * n + 2, 2 * n + 2);
    J.block(0, 0, n, n) = I + lam * inst.A();
    J.block(0, n, n, n) = -I;
    J.block(0, 2 * n, n, 1) = inst.A() * y;
    J.block(n, 0, n, n) = -I;
    J.block(n, n, n, n) = I + mu * g_hessian(inst, z);
    J.block(n, 2 * n + 1, n, 1) = g_gradient(inst, z);
    J.block(2 * n, 0, 1, n) = (inst.A() * y).transpose();
    J.block(2 * n + 1, n, 1, n) = g_gradient(inst, z).transpose();
    const Vector delta = J.fullPivLu().solve(-F);
    if (!delta.allFinite()) break;
    const Vector ny = y + delta.head(n), nz = z + delta.segment(n, n);
    const double nl = lam + delta(2 * n), nm = mu + delta(2 * n + 1);
    const Vector NF = residual(ny, nz, nl, nm);
    if (!(NF.norm() < F.norm())) break;
    y = ny;
    z = nz;
    lam = nl;
    mu = nm;
    F = NF;
  }
  PrimalPoint refined{y, z};
  const double moved = (concat(refined) - concat(start)).norm();
  const double pi = pi_value(inst, refined);
  if (moved <= 1e-3 && pi <= start_pi + 1e-8 * std::max(1.0, start_pi)) x = std::move(refined);
}

}  // namespace

double radial_bound(const ProblemInstance& inst) {
  return 2.0 * std::sqrt(2.0 * inst.eta()) +
         2.0 * std::cbrt(2.0 * inst.f().norm() / inst.alpha()) + 1.0;
}

std::vector<double> radial_roots(const ProblemInstance& inst, const Vector& u) {
  require_dim(inst, u, "u");
  if (std::abs(u.norm() - 1.0) > 1e-12) throw InputError("radial direction must be a unit vector");

  const RadialQuartic q{inst.alpha(), inst.eta(), inst.f().dot(u)};
  const double rmax = radial_bound(inst);
  auto qv = [&](double t) { return q.value(t); };
  auto qd = [&](double t) { return q.slope(t); };
  auto qdd = [&](double t) { return q.curvature(t); };

  // q' decreases up to sqrt(2 eta / 3) and increases after it, so it has at
  // most one root on each side; those roots are the critical points of q.
  const double inflection = std::sqrt(2.0 * inst.eta() / 3.0);
  std::vector<double> critical;
  for (auto [a, b] : {std::pair{0.0, inflection}, std::pair{inflection, rmax}}) {
    const double sa = q.slope(a), sb = q.slope(b);
    if (sa == 0.0) critical.push_back(a);
    if ((sa < 0.0) != (sb < 0.0) && sb != 0.0) critical.push_back(bracketed_root(qd, qdd, a, b));
  }

  std::vector<double> breaks;
  for (int i = 0; i <= kRadialCells; ++i) breaks.push_back(rmax * i / kRadialCells);
  breaks.insert(breaks.end(), critical.begin(), critical.end());
  std::sort(breaks.begin(), breaks.end());

  const double touch_tol = 1e-14 * std::max(1.0, 0.5 * inst.alpha() * inst.eta() * inst.eta());
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    const double fa = q.value(a), fb = q.value(b);
    if (fa == 0.0 && a > 0.0) roots.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      roots.push_back(bracketed_root(qv, qd, a, b));
    }
  }
  // Touching (double) roots: a local minimum of q sitting on zero.
  for (double rc : critical) {
    if (rc > 0.0 && q.curvature(rc) > 0.0 && std::abs(q.value(rc)) <= touch_tol) {
      roots.push_back(rc);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-13 * b; }),
              roots.end());
  return roots;
}

std::vector<Vector> unit_directions(int n, int m, std::uint64_t seed) {
  if (n < 2 || m < 1) throw InputError("direction grid needs n >= 2 and m >= 1");
  std::vector<Vector> dirs;
  if (n == 2) {
    for (int j = 0; j < m; ++j) {
      const double t = 2.0 * std::numbers::pi * j / m;
      dirs.emplace_back(Vector{{std::cos(t), std::sin(t)}});
    }
  } else if (n == 3) {
    const int count = m * m;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double zc = 1.0 - (2.0 * i + 1.0) / count;
      const double rad = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const double phi = golden * i;
      dirs.emplace_back(Vector{{rad * std::cos(phi), rad * std::sin(phi), zc}});
    }
  } else {
    const double total = std::pow(static_cast<double>(m), n - 1);
    if (total > 5e7) throw InputError("direction grid too large for n > 3; reduce m");
    const auto count = static_cast<std::size_t>(total);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    while (dirs.size() < count) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = normal(rng);
      const double norm = v.norm();
      if (norm < 1e-12) continue;
      v /= norm;
      dirs.push_back(v);
      if (dirs.size() < count) dirs.push_back(-v);
    }
  }
  return dirs;
}

SurfaceSample sample_surface_y(const ProblemInstance& inst, const SpectralCache& cache, int m,
                               std::uint64_t seed) {
  if (m < 4) throw InputError("surface sampling needs m >= 4");
  const Vector inv_sqrt_beta = cache.beta().array().rsqrt().matrix();
  SurfaceSample out;
  for (const Vector& u : unit_directions(inst.dim(), m, seed)) {
    Vector y = cache.from_eigenbasis((inst.r() * inv_sqrt_beta.array() * u.array()).matrix());
    out.residual_bound = std::max(out.residual_bound, std::abs(h_value(inst, y)));
    out.points.push_back(std::move(y));
  }
  return out;
}

SurfaceSample sample_surface_z(const ProblemInstance& inst, int m, std::uint64_t seed) {
  if (m < 4) throw InputError("surface sampling needs m >= 4");
  SurfaceSample out;
  for (const Vector& u : unit_directions(inst.dim(), m, seed)) {
    for (double rho : radial_roots(inst, u)) {
      Vector z = inst.c() + rho * u;
      out.residual_bound = std::max(out.residual_bound, std::abs(g_value(inst, z)));
      out.points.push_back(std::move(z));
    }
  }
  return out;
}

Vector project_to_ellipsoid(const ProblemInstance& inst, const SpectralCache& cache,
                            const Vector& p) {
  require_dim(inst, p, "p");
  const Vector& beta = cache.beta();
  const Vector ph = cache.to_eigenbasis(p);
  const double r2 = inst.r() * inst.r();

  // phi(t) = sum beta_i ph_i^2 / (1 + t beta_i)^2 - r^2 is decreasing on
  // (-1/beta_max, inf); its root is the multiplier of the nearest point.
  auto phi = [&](double t) {
    return (beta.array() * ph.array().square() / (1.0 + t * beta.array()).square()).sum() - r2;
  };
  auto dphi = [&](double t) {
    return (-2.0 * beta.array().square() * ph.array().square() / (1.0 + t * beta.array()).cube())
        .sum();
  };

  const double bmax = beta.maxCoeff();
  double lo, hi;
  if (phi(0.0) >= 0.0) {
    lo = 0.0;
    hi = 1.0;
    while (phi(hi) > 0.0 && hi < 1e300) hi *= 2.0;
  } else {
    hi = 0.0;
    lo = -1.0 / bmax;
    double gap = 1.0 / bmax;
    // Approach the pole; if phi never turns positive this is the hard case.
    do {
      gap *= 1e-2;
    } while (phi(-1.0 / bmax + gap) < 0.0 && gap > 1e-14 / bmax);
    lo = -1.0 / bmax + gap;
    if (phi(lo) < 0.0) {
      // Hard case: the multiplier sits at the pole and the top eigen-direction
      // absorbs the remaining norm.
      Vector yh = Vector::Zero(ph.size());
      const double t = -1.0 / bmax;
      double used = 0.0;
      Eigen::Index top = ph.size() - 1;
      for (Eigen::Index i = 0; i < top; ++i) {
        yh(i) = ph(i) / (1.0 + t * beta(i));
        used += beta(i) * yh(i) * yh(i);
      }
      yh(top) = std::sqrt(std::max(0.0, r2 - used) / beta(top));
      if (ph(top) < 0.0) yh(top) = -yh(top);
      return cache.from_eigenbasis(yh);
    }
  }
  const double t = bracketed_root(phi, dphi, lo, hi);
  Vector y = cache.from_eigenbasis((ph.array() / (1.0 + t * beta.array())).matrix());
  const double q = y.dot(inst.A() * y);
  if (q > 0.0) y *= inst.r() / std::sqrt(q);
  return y;
}

std::optional<PrimalPoint> polish_pair(const ProblemInstance& inst, const SpectralCache& cache,
                                       PrimalPoint x) {
  if (!return_to_z(inst, x.z)) return std::nullopt;
  for (int it = 0; it < 2000; ++it) {
    const PrimalPoint prev = x;
    x.y = project_to_ellipsoid(inst, cache, x.z);
    descend_on_z(inst, x.y, x.z);
    if ((concat(x) - concat(prev)).lpNorm<Eigen::Infinity>() < 1e-13) break;
  }
  kkt_newton(inst, x);

  const double resid = std::max(std::abs(h_value(inst, x.y)), std::abs(g_value(inst, x.z)));
  const double ty = tangential(x.y - x.z, h_gradient(inst, x.y)).norm();
  const double tz = tangential(x.z - x.y, g_gradient(inst, x.z)).norm();
  if (!(resid <= kPolishResidual && ty <= kPolishTangential && tz <= kPolishTangential)) {
    return std::nullopt;
  }
  return x;
}

OracleResult brute_force_min(const ProblemInstance& inst, const SpectralCache& cache, int m,
                             bool polish, std::uint64_t seed) {
  if (m < 16) throw InputError("brute force needs m >= 16");
  const SurfaceSample ys = sample_surface_y(inst, cache, m, seed);
  const SurfaceSample zs = sample_surface_z(inst, m, seed);
  if (zs.points.empty()) throw NumericError("Z_c sample is empty; the surface may be empty");

  const int n = inst.dim();
  const Matrix Y = as_columns(ys.points, n);

  // Nearest y-sample for every z-sample.
  std::vector<std::tuple<double, std::size_t, Eigen::Index>> cand;
  cand.reserve(zs.points.size());
  for (std::size_t j = 0; j < zs.points.size(); ++j) {
    Eigen::Index best;
    const double d2 = (Y.colwise() - zs.points[j]).colwise().squaredNorm().minCoeff(&best);
    cand.emplace_back(d2, j, best);
  }
  const auto keep = std::min<std::size_t>(kPolishSeeds, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end());

  OracleResult res;
  res.resolution = m;
  res.y_samples = ys.points.size();
  res.z_samples = zs.points.size();
  const auto& [d2, zj, yi] = cand.front();
  res.raw_best_pi = 0.5 * d2;
  res.best_pair = PrimalPoint{Y.col(yi), zs.points[zj]};
  res.pi = res.raw_best_pi;

  if (polish) {
    std::vector<PolishedPair> polished;
    for (std::size_t k = 0; k < keep; ++k) {
      const auto& [cd2, cz, cy] = cand[k];
      if (auto px = polish_pair(inst, cache, PrimalPoint{Y.col(cy), zs.points[cz]})) {
        const double pi = pi_value(inst, *px);
        polished.push_back({std::move(*px), pi});
      }
    }
    std::sort(polished.begin(), polished.end(), [](const PolishedPair& a, const PolishedPair& b) {
      if (a.pi != b.pi) return a.pi < b.pi;
      return lex_less(concat(a.x), concat(b.x));
    });
    for (auto& p : polished) {
      const bool dup = std::any_of(res.local_minima.begin(), res.local_minima.end(),
                                   [&](const PolishedPair& q) {
                                     return (concat(q.x) - concat(p.x)).norm() <= kBasinSeparation;
                                   });
      if (!dup) res.local_minima.push_back(std::move(p));
    }
    if (!res.local_minima.empty() && res.local_minima.front().pi <= res.pi) {
      res.best_pair = res.local_minima.front().x;
      res.pi = res.local_minima.front().pi;
    }
  }
  res.distance = std::sqrt(2.0 * res.pi);
  return res;
}

std::pair<double, double> least_squares_multipliers(const ProblemInstance& inst,
                                                    const PrimalPoint& x) {
  const Vector gh = h_gradient(inst, x.y);
  const Vector gg = g_gradient(inst, x.z);
  const double hh = gh.squaredNorm();
  const double ggn = gg.squaredNorm();
  const double lam = hh > 0.0 ? -(x.y - x.z).dot(gh) / hh : 0.0;
  const double mu = ggn > 0.0 ? -(x.z - x.y).dot(gg) / ggn : 0.0;
  return {lam, mu};
}

KktReport kkt_check(const ProblemInstance& inst, const PrimalPoint& x, double lam, double mu,
                    double tol) {
  KktReport rep;
  const Vector ry = x.y - x.z + lam * h_gradient(inst, x.y);
  const Vector rz = x.z - x.y + mu * g_gradient(inst, x.z);
  rep.stationarity = std::max(ry.lpNorm<Eigen::Infinity>(), rz.lpNorm<Eigen::Infinity>());
  rep.feasibility = std::max(std::abs(h_value(inst, x.y)), std::abs(g_value(inst, x.z)));
  rep.stationary = rep.stationarity <= tol;
  rep.feasible = rep.feasibility <= tol;
  return rep;
}

void write_surface_csv(std::ostream& os, const SurfaceSample& ys, const SurfaceSample& zs) {
  const auto n = ys.points.empty() ? (zs.points.empty() ? 0 : zs.points.front().size())
                                   : ys.points.front().size();
  os << "surface";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << '\n';
  const auto old = os.precision(17);
  for (const auto& [label, sample] : {std::pair{"Y", &ys}, std::pair{"Z", &zs}}) {
    for (const Vector& p : sample->points) {
      os << label;
      for (Eigen::Index i = 0; i < p.size(); ++i) os << ',' << p(i);
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace mindist
