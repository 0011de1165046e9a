#include "mindist/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mindist/oracle.hpp"

namespace mindist {

std::string_view to_string(SeparationStatus s) {
  switch (s) {
    case SeparationStatus::AnalyticallyCertified: return "analytically_certified";
    case SeparationStatus::NumericallyPlausible: return "numerically_plausible";
    case SeparationStatus::Violated: return "violated";
    case SeparationStatus::Undetermined: return "undetermined";
  }
  return "undetermined";
}

SeparationReport check_separation(const ProblemInstance& inst, int m, std::uint64_t seed) {
  SeparationReport rep;
  const double r = inst.r();
  const double eta = inst.eta();
  rep.analytic_applicable = inst.c().isZero(0.0) && eta > 0.5 * r * r;
  const double gap = 0.5 * r * r - eta;
  rep.force_threshold = 0.5 * gap * gap / r;
  rep.analytic_holds = rep.analytic_applicable && inst.f().norm() < rep.force_threshold;

  int grid_m = m;
  if (inst.dim() > 3) {
    grid_m = static_cast<int>(std::pow(static_cast<double>(m) * m, 1.0 / (inst.dim() - 1)));
    grid_m = std::max(grid_m, 4);
  }
  const SurfaceSample zs = sample_surface_z(inst, grid_m, seed);
  rep.samples = zs.points.size();
  rep.min_sampled_h = std::numeric_limits<double>::infinity();
  for (const Vector& z : zs.points) rep.min_sampled_h = std::min(rep.min_sampled_h, h_value(inst, z));

  if (rep.analytic_holds) {
    rep.status = SeparationStatus::AnalyticallyCertified;
  } else if (rep.samples == 0) {
    rep.status = SeparationStatus::Undetermined;
  } else {
    rep.status = rep.min_sampled_h > 0.0 ? SeparationStatus::NumericallyPlausible
                                         : SeparationStatus::Violated;
  }
  return rep;
}

}  // namespace mindist
