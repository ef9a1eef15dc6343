// Multi-start maximization/minimization of S over the 12 measurement phases,
// and the exhaustive local-deterministic enumeration of the classical bounds.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qchsh/correlation.hpp"
#include "qchsh/qstate.hpp"

namespace qchsh {

struct OptimizerConfig {
  int restarts = 64;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  std::uint64_t step_seed = 0x5eedc0ffee123457ULL;
  double finite_difference_step = 1e-6;
  /// Worker threads for the restarts; 0 picks default_thread_count().
  std::size_t threads = 0;

  /// Throws std::invalid_argument on nonpositive counts or steps.
  void validate() const;
};

enum class Direction { Maximize, Minimize };

using Angles = std::array<double, SettingsConfig::kAngles>;
using Gradient = Angles;
using Objective = std::function<double(const Angles&)>;

/// Outcome of one local ascent/descent from one random start.
struct LocalResult {
  double value = 0.0;
  Angles angles{};
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OptimizationResult {
  double best_s = 0.0;
  SettingsConfig best_settings;
  double gradient_norm = 0.0;  // Euclidean norm at best_settings
  int restarts_used = 0;
  bool converged = false;      // converged => gradient_norm < gradient_tolerance
  /// Every restart's local optimum, in restart order.
  std::vector<LocalResult> runs;
};

/// Central finite-difference gradient of an arbitrary objective.
Gradient finite_difference_gradient(const Objective& f, const Angles& x, double step);

/// dS/dphi for all 12 angles (order of SettingsConfig::to_array) by central
/// differences of s_via_t.
Gradient gradient_s(const PureState& state, const SettingsConfig& settings, double step = 1e-6);

/// Random initial angles of restart `index`: uniform in [0, 2 pi)^12, drawn
/// from a generator keyed by (seed, index) alone.
Angles initial_angles(std::uint64_t seed, std::size_t index);

/// Gradient ascent (or descent) with Barzilai-Borwein trial steps and
/// backtracking; stops when the gradient norm drops below tolerance, no
/// further progress is possible, or max_iterations is reached.
LocalResult local_search(const Objective& f, Angles start, Direction dir,
                         const OptimizerConfig& config);

/// Multi-start driver for an arbitrary 12-angle objective. Restarts run
/// concurrently; the reduction keeps the best value, ties going to the lowest
/// restart index.
OptimizationResult optimize(const Objective& f, Direction dir, const OptimizerConfig& config);

OptimizationResult maximize_s(const PureState& state, const OptimizerConfig& config = {});
OptimizationResult minimize_s(const PureState& state, const OptimizerConfig& config = {});

/// A deterministic local strategy: one 1-based outcome for each of
/// A1, A2, B1, B2.
struct LhvStrategy {
  std::array<int, 4> outcome{};
};

/// S of a deterministic strategy, with Q_ij = alpha^(l_i + m_j).
double lhv_s(const LhvStrategy& strategy);

/// All 3^4 = 81 deterministic strategies.
std::vector<LhvStrategy> lhv_strategies();

struct LhvExtrema {
  double max_s;
  double min_s;
};

LhvExtrema lhv_extrema();

}  // namespace qchsh
