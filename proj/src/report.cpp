#include "qchsh/report.hpp"

#include <cstdio>
#include <cstdlib>

namespace qchsh {

namespace {

using nlohmann::ordered_json;

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(rounded(*v)) : ordered_json(nullptr);
}

ordered_json triple_json(const PhaseTriple& t) {
  const PhaseTriple w = t.wrapped();
  return ordered_json::array({rounded(w[0]), rounded(w[1]), rounded(w[2])});
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  if (std::string(buf) == "-0") return "0";
  return buf;
}

double rounded(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.a1) << ',' << format_number(r.a2) << ',' << format_number(r.a3) << ','
        << format_number(r.epsilon) << ',' << format_number(r.s_max_analytic) << ','
        << format_number(r.s_min_analytic) << ',' << optional_cell(r.s_max_numeric) << ','
        << optional_cell(r.s_min_numeric) << ',' << to_string(r.branch) << ','
        << (r.violates ? "true" : "false") << '\n';
  }
}

ordered_json sweep_json(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"a1", rounded(r.a1)},
                   {"a2", rounded(r.a2)},
                   {"a3", rounded(r.a3)},
                   {"epsilon", rounded(r.epsilon)},
                   {"s_max_analytic", rounded(r.s_max_analytic)},
                   {"s_min_analytic", rounded(r.s_min_analytic)},
                   {"s_max_numeric", optional_json(r.s_max_numeric)},
                   {"s_min_numeric", optional_json(r.s_min_numeric)},
                   {"branch", std::string(to_string(r.branch))},
                   {"violates", r.violates}});
  }
  return arr;
}

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells) {
  out << kRegionHeader << '\n';
  for (const auto& c : cells) {
    out << format_number(c.a1) << ',' << format_number(c.epsilon) << ',' << format_number(c.s_max)
        << ',' << (c.violates ? "true" : "false") << '\n';
  }
}

ordered_json region_json(const std::vector<RegionCell>& cells) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) {
    arr.push_back({{"a1", rounded(c.a1)},
                   {"epsilon", rounded(c.epsilon)},
                   {"s_max", rounded(c.s_max)},
                   {"violates", c.violates}});
  }
  return arr;
}

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& points) {
  out << kBoundaryHeader << '\n';
  for (const auto& p : points) {
    out << format_number(p.epsilon) << ',' << format_number(p.a1) << ',' << format_number(p.s_max)
        << '\n';
  }
}

ordered_json boundary_json(const std::vector<BoundaryPoint>& points) {
  ordered_json out = ordered_json::array();
  for (const auto& p : points) {
    out.push_back({{"epsilon", rounded(p.epsilon)}, {"a1", rounded(p.a1)}, {"s_max", rounded(p.s_max)}});
  }
  return out;
}

ordered_json settings_json(const SettingsConfig& s) {
  return {{"A1", triple_json(s.a1)},
          {"A2", triple_json(s.a2)},
          {"B1", triple_json(s.b1)},
          {"B2", triple_json(s.b2)}};
}

ordered_json report_json(const ViolationReport& r) {
  return {{"s_max", rounded(r.s_max)},
          {"s_min", rounded(r.s_min)},
          {"branch", std::string(to_string(r.branch))},
          {"k", ordered_json::array({rounded(r.k.k1), rounded(r.k.k2), rounded(r.k.k3)})},
          {"a_max", rounded(r.a_max)},
          {"f_thr", optional_json(r.f_thr)},
          {"violates_upper", r.violates_upper}};
}

ordered_json optimization_json(const OptimizationResult& r) {
  return {{"best_s", rounded(r.best_s)},
          {"gradient_norm", rounded(r.gradient_norm)},
          {"restarts_used", r.restarts_used},
          {"converged", r.converged},
          {"settings", settings_json(r.best_settings)}};
}

ordered_json section4_json(const Section4Comparison& c) {
  ordered_json classes = ordered_json::array();
  for (double v : c.custom_at_tritter_optima) classes.push_back(rounded(v));
  return {{"state", ordered_json::array({rounded(c.state.a1()), rounded(c.state.a2()),
                                         rounded(c.state.a3())})},
          {"tritter_s_max", rounded(c.tritter_s_max)},
          {"tritter_s_max_numeric", rounded(c.tritter_s_max_numeric)},
          {"custom_basis_s_max", rounded(c.custom_basis_s_max)},
          {"custom_at_tritter_optima", classes},
          {"custom_basis_reoptimized", rounded(c.custom_basis_reoptimized)},
          {"custom_settings", settings_json(c.custom_settings)}};
}

}  // namespace qchsh
