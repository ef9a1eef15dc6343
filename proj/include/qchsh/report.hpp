// Text serialization of results: fixed-column CSV with 12 significant digits
// and a JSON mirror carrying the same fields and the same rounded values.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qchsh/experiments.hpp"
#include "qchsh/optimizer.hpp"

namespace qchsh {

/// %.12g, with negative zero printed as 0.
std::string format_number(double x);
/// The double that format_number(x) denotes.
double rounded(double x);

inline constexpr const char* kSweepHeader =
    "a1,a2,a3,epsilon,s_max_analytic,s_min_analytic,s_max_numeric,s_min_numeric,branch,violates";
inline constexpr const char* kRegionHeader = "a1,epsilon,s_max,violates";
inline constexpr const char* kBoundaryHeader = "epsilon,a1,s_max";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows);

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells);
nlohmann::ordered_json region_json(const std::vector<RegionCell>& cells);

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& points);
nlohmann::ordered_json boundary_json(const std::vector<BoundaryPoint>& points);

/// Settings as {"A1": [phi1, phi2, phi3], ...}, angles wrapped to [0, 2 pi).
nlohmann::ordered_json settings_json(const SettingsConfig& settings);

nlohmann::ordered_json report_json(const ViolationReport& report);
nlohmann::ordered_json optimization_json(const OptimizationResult& result);
nlohmann::ordered_json section4_json(const Section4Comparison& c);

}  // namespace qchsh
