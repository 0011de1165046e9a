#include "mindist/records.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>

namespace mindist {

using nlohmann::json;

namespace {

void format_double(std::ostringstream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
  // Keep floats recognizably floating-point so a reparse preserves the type.
  if (std::string_view(buf).find_first_of(".e") == std::string_view::npos) os << ".0";
}

void dump(std::ostringstream& os, const json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map keeps keys sorted
        if (!first) os << ",\n";
        first = false;
        os << pad << json(key).dump() << ": ";
        dump(os, value, depth + 1);
      }
      os << '\n' << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) os << ",\n";
        os << pad;
        dump(os, j[i], depth + 1);
      }
      os << '\n' << close_pad << ']';
      return;
    }
    case json::value_t::number_float:
      format_double(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

json trace_entry(const PerturbationStep& step) {
  json e{{"k", step.k}, {"f", to_json(step.force)}, {"status", to_string(step.status)}};
  if (step.witness) {
    e["dual_point"] = to_json(step.witness->dp);
    e["x_bar"] = json{{"y", to_json(step.witness->x.y)}, {"z", to_json(step.witness->x.z)}};
    e["in_sa_plus"] = step.witness->diagnostics.in_sa_plus;
  }
  return e;
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::ostringstream os;
  dump(os, j, 0);
  os << '\n';
  return os.str();
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const DualPoint& dp) {
  return json{{"lambda", dp.lam}, {"mu", dp.mu}, {"sigma", dp.sig}};
}

json to_json(const DualDiagnostics& diag) {
  return json{{"certifying", diag.certifying},
              {"d", to_json(diag.d)},
              {"in_sa", diag.in_sa},
              {"in_sa_plus", diag.in_sa_plus},
              {"min_one_plus_lambda_beta", diag.min_one_plus_lam_beta},
              {"sigma_in_conjugate_domain", diag.sig_in_conjugate_domain}};
}

json to_json(const SeparationReport& rep) {
  return json{{"status", to_string(rep.status)},
              {"analytic_applicable", rep.analytic_applicable},
              {"analytic_holds", rep.analytic_holds},
              {"force_threshold", rep.force_threshold},
              {"min_sampled_h", rep.min_sampled_h},
              {"samples", rep.samples}};
}

json to_json(const StationaryPoint& sp) {
  return json{{"dual_point", to_json(sp.dp)},
              {"x_bar", json{{"y", to_json(sp.x.y)}, {"z", to_json(sp.x.z)}}},
              {"pi", sp.pi},
              {"pi_d", sp.pi_d},
              {"grad_norm", sp.grad_norm},
              {"diagnostics", to_json(sp.diagnostics)},
              {"residuals", json{{"h", sp.h_residual}, {"g", sp.g_residual}}}};
}

json to_json(const OracleResult& res) {
  json minima = json::array();
  for (const PolishedPair& p : res.local_minima) {
    minima.push_back(json{{"y", to_json(p.x.y)}, {"z", to_json(p.x.z)}, {"pi", p.pi}});
  }
  return json{{"best_pair", json{{"y", to_json(res.best_pair.y)}, {"z", to_json(res.best_pair.z)}}},
              {"distance", res.distance},
              {"pi", res.pi},
              {"raw_best_pi", res.raw_best_pi},
              {"resolution", res.resolution},
              {"y_samples", res.y_samples},
              {"z_samples", res.z_samples},
              {"local_minima", std::move(minima)}};
}

json certificate_record(const Certificate& cert) {
  json rec = cert.witness ? to_json(*cert.witness) : json::object();
  rec["status"] = to_string(cert.status);
  rec["stationary_points_found"] = cert.stationary_points.size();
  if (cert.separation) rec["separation"] = to_json(*cert.separation);
  if (!cert.perturbation_trace.empty()) {
    json trace = json::array();
    for (const PerturbationStep& step : cert.perturbation_trace) trace.push_back(trace_entry(step));
    rec["perturbation_trace"] = std::move(trace);
  }
  return rec;
}

}  // namespace mindist
