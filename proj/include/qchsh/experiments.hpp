// Parameter sweeps over the one-parameter state families
//   a2 = sqrt((3 - a1^2) eps),  a3 = sqrt((3 - a1^2)(1 - eps)),
// the violation region in the (a1, eps) plane, and the fixed x-basis
// comparison state.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qchsh/analytic.hpp"
#include "qchsh/optimizer.hpp"
#include "qchsh/qstate.hpp"

namespace qchsh {

enum class SweepMode { Analytic, Numeric, Both };

struct SweepSpec {
  double a1_min = -std::sqrt(3.0);
  double a1_max = std::sqrt(3.0);
  int a1_steps = 121;
  double epsilon = 0.5;
  SweepMode mode = SweepMode::Analytic;

  /// Throws std::invalid_argument on an empty grid, a1 range outside
  /// [-sqrt3, sqrt3] or epsilon outside [0, 1].
  void validate() const;
};

struct SweepRow {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double epsilon = 0.0;
  double s_max_analytic = 0.0;
  double s_min_analytic = 0.0;
  std::optional<double> s_max_numeric;
  std::optional<double> s_min_numeric;
  Branch branch = Branch::S1;
  CoefficientPair k1_pair = CoefficientPair::P12;
  bool violates = false;
};

/// Grid point k of n on [lo, hi]. Symmetric ranges give exactly mirrored
/// points (x_k == -x_{n-1-k}).
double grid_point(double lo, double hi, int k, int n);

/// One row per grid point, ordered by a1. Numeric columns are filled in the
/// Numeric and Both modes using `optimizer` (its thread count is ignored:
/// rows are distributed over threads instead).
std::vector<SweepRow> sweep_fig1(const SweepSpec& spec, const OptimizerConfig& optimizer = {});

struct RegionCell {
  double a1 = 0.0;
  double epsilon = 0.0;
  double s_max = 0.0;
  bool violates = false;
};

/// Analytic S_max on an a1_steps x eps_steps grid over [-sqrt3, sqrt3] x [0, 1],
/// a1-major order. Both counts must be >= 2.
std::vector<RegionCell> violation_region(int a1_steps = 200, int eps_steps = 100);

struct BoundaryPoint {
  double epsilon = 0.0;
  double a1 = 0.0;
  double s_max = 0.0;
};

/// Points with S_max = 2 located by bisection in a1 for each epsilon of an
/// eps_steps grid; both signs of a1 are reported.
std::vector<BoundaryPoint> violation_boundary(int eps_steps = 100, int scan_points = 2001);

struct Section4Comparison {
  PureState state = PureState(1.0, 1.0, 1.0);
  /// Analytic tritter S_max and the multi-start confirmation.
  double tritter_s_max = 0.0;
  double tritter_s_max_numeric = 0.0;
  /// x-basis-input tritter S at every distinct tritter-optimal setting class,
  /// ascending.
  std::vector<double> custom_at_tritter_optima;
  /// Smallest entry of custom_at_tritter_optima: the value obtained at any
  /// tritter-optimal setting.
  double custom_basis_s_max = 0.0;
  SettingsConfig custom_settings;
  /// Unrestricted phase optimization with x-basis inputs.
  double custom_basis_reoptimized = 0.0;
};

inline constexpr double kSection4A1 = 1.56;
inline constexpr double kSection4Epsilon = 0.5;

Section4Comparison section4_comparison(const OptimizerConfig& optimizer = {});

}  // namespace qchsh
