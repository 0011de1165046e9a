#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mindist/dual.hpp"
#include "mindist/problem.hpp"

namespace mindist {

/// Points on one of the two surfaces together with the worst constraint residual.
struct SurfaceSample {
  std::vector<Vector> points;
  double residual_bound = 0.0;
};

struct PolishedPair {
  PrimalPoint x;
  double pi = 0.0;
};

struct OracleResult {
  PrimalPoint best_pair;
  double distance = 0.0;      // |y - z|
  double pi = 0.0;            // 1/2 distance^2
  double raw_best_pi = 0.0;   // best pair over the unpolished sample clouds
  int resolution = 0;         // directions-per-dimension m
  std::size_t y_samples = 0;
  std::size_t z_samples = 0;
  std::vector<PolishedPair> local_minima;  // sorted by (pi, lexicographic x)
};

struct KktReport {
  double stationarity = 0.0;  // |grad Pi + lam grad h + mu grad g|_inf
  double feasibility = 0.0;   // max(|h(y)|, |g(z)|)
  bool stationary = false;
  bool feasible = false;
  bool passed() const { return stationary && feasible; }
};

/// Positive roots of the radial quartic q(rho) = g(c + rho u), each polished
/// to |q| <= 1e-12 (relative to the coefficient scale). Double roots that only
/// touch zero are detected at the critical points of q.
std::vector<double> radial_roots(const ProblemInstance& inst, const Vector& u);

/// Bound beyond which the radial quartic is strictly positive.
double radial_bound(const ProblemInstance& inst);

/// Deterministic quasi-uniform unit directions: m equally spaced angles for
/// n = 2, an m^2-point Fibonacci spiral for n = 3, and m^(n-1) seeded random
/// antipodal pairs for n > 3.
std::vector<Vector> unit_directions(int n, int m, std::uint64_t seed = 0);

SurfaceSample sample_surface_y(const ProblemInstance& inst, const SpectralCache& cache, int m,
                               std::uint64_t seed = 0);
SurfaceSample sample_surface_z(const ProblemInstance& inst, int m, std::uint64_t seed = 0);

/// Nearest point of the ellipsoid Y_c to p (secular equation in the eigenbasis).
Vector project_to_ellipsoid(const ProblemInstance& inst, const SpectralCache& cache,
                            const Vector& p);

/// Refines a candidate pair to a local minimizer of the distance on X_c:
/// alternating tangent-space descent, then Newton on the KKT system.
/// Returns nothing if the refined pair misses the residual (1e-10) or
/// tangential-gradient (1e-7) targets.
std::optional<PrimalPoint> polish_pair(const ProblemInstance& inst, const SpectralCache& cache,
                                       PrimalPoint x);

/// Exhaustive nearest-pair search over both sample clouds, optionally polishing
/// the K = 20 best candidates. Throws NumericError if Z_c yields no samples.
OracleResult brute_force_min(const ProblemInstance& inst, const SpectralCache& cache, int m,
                             bool polish, std::uint64_t seed = 0);

/// Multipliers minimizing the stationarity residual at x in the least-squares sense.
std::pair<double, double> least_squares_multipliers(const ProblemInstance& inst,
                                                    const PrimalPoint& x);

KktReport kkt_check(const ProblemInstance& inst, const PrimalPoint& x, double lam, double mu,
                    double tol);

/// One point per row: surface,x1,...,xn.
void write_surface_csv(std::ostream& os, const SurfaceSample& ys, const SurfaceSample& zs);

}  // namespace mindist
