#include "qchsh/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qchsh/correlation.hpp"
#include "qchsh/parallel.hpp"

namespace qchsh {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kRangeSlack = 1e-12;
// Two tritter optima whose x-basis values differ by less than this belong to
// the same class.
constexpr double kClassTol = 1e-6;
// A restart counts as tritter-optimal when within this of the analytic S_max.
constexpr double kOptimalTol = 1e-6;

double region_s_max(double a1, double epsilon) {
  return s_max_analytic(PureState::from_a1_epsilon(a1, epsilon)).s_max;
}

}  // namespace

void SweepSpec::validate() const {
  if (a1_steps < 1) throw std::invalid_argument("a1_steps must be positive");
  if (!(a1_min <= a1_max)) throw std::invalid_argument("a1_min must not exceed a1_max");
  if (a1_min < -kSqrt3 - kRangeSlack || a1_max > kSqrt3 + kRangeSlack) {
    throw std::invalid_argument("a1 range must lie inside [-sqrt(3), sqrt(3)]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

double grid_point(double lo, double hi, int k, int n) {
  if (n <= 1) return lo;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  return mid + half * static_cast<double>(2 * k - (n - 1)) / static_cast<double>(n - 1);
}

std::vector<SweepRow> sweep_fig1(const SweepSpec& spec, const OptimizerConfig& optimizer) {
  spec.validate();
  const bool numeric = spec.mode != SweepMode::Analytic;
  if (numeric) optimizer.validate();
  OptimizerConfig per_row = optimizer;
  per_row.threads = 1;

  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.a1_steps));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double a1 = grid_point(spec.a1_min, spec.a1_max, static_cast<int>(i), spec.a1_steps);
    const PureState state = PureState::from_a1_epsilon(a1, spec.epsilon);
    const ViolationReport rep = s_max_analytic(state);

    SweepRow& row = rows[i];
    row.a1 = state.a1();
    row.a2 = state.a2();
    row.a3 = state.a3();
    row.epsilon = spec.epsilon;
    row.s_max_analytic = rep.s_max;
    row.s_min_analytic = rep.s_min;
    row.branch = rep.branch;
    row.k1_pair = rep.k.k1_pair;
    row.violates = rep.violates_upper;
    if (numeric) {
      row.s_max_numeric = maximize_s(state, per_row).best_s;
      row.s_min_numeric = minimize_s(state, per_row).best_s;
    }
  });
  return rows;
}

std::vector<RegionCell> violation_region(int a1_steps, int eps_steps) {
  if (a1_steps < 2 || eps_steps < 2) throw std::invalid_argument("region grid needs >= 2 steps per axis");
  std::vector<RegionCell> cells(static_cast<std::size_t>(a1_steps) * eps_steps);
  parallel_for(static_cast<std::size_t>(a1_steps), [&](std::size_t i) {
    const double a1 = grid_point(-kSqrt3, kSqrt3, static_cast<int>(i), a1_steps);
    for (int j = 0; j < eps_steps; ++j) {
      const double eps = grid_point(0.0, 1.0, j, eps_steps);
      RegionCell& c = cells[i * eps_steps + j];
      c.a1 = a1;
      c.epsilon = eps;
      c.s_max = region_s_max(a1, eps);
      c.violates = c.s_max > kLocalBoundUpper;
    }
  });
  return cells;
}

std::vector<BoundaryPoint> violation_boundary(int eps_steps, int scan_points) {
  if (eps_steps < 2 || scan_points < 2) throw std::invalid_argument("boundary grid needs >= 2 steps");
  std::vector<std::vector<BoundaryPoint>> per_eps(static_cast<std::size_t>(eps_steps));
  parallel_for(per_eps.size(), [&](std::size_t j) {
    const double eps = grid_point(0.0, 1.0, static_cast<int>(j), eps_steps);
    auto excess = [eps](double a1) { return region_s_max(a1, eps) - kLocalBoundUpper; };

    double lo = 0.0;
    double f_lo = excess(lo);
    for (int k = 1; k < scan_points; ++k) {
      const double hi = grid_point(0.0, kSqrt3, k, scan_points);
      const double f_hi = excess(hi);
      if ((f_lo <= 0.0) != (f_hi <= 0.0)) {
        double a = lo, b = hi, fa = f_lo;
        while (b - a > 1e-15 * std::max(1.0, std::abs(b))) {
          const double mid = 0.5 * (a + b);
          if (mid <= a || mid >= b) break;
          const double fm = excess(mid);
          if ((fm <= 0.0) == (fa <= 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        const double root = std::abs(excess(a)) <= std::abs(excess(b)) ? a : b;
        const double s = region_s_max(root, eps);
        per_eps[j].push_back({eps, root, s});
        if (root != 0.0) per_eps[j].push_back({eps, -root, region_s_max(-root, eps)});
      }
      lo = hi;
      f_lo = f_hi;
    }
  });

  std::vector<BoundaryPoint> out;
  for (auto& v : per_eps) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Section4Comparison section4_comparison(const OptimizerConfig& optimizer) {
  Section4Comparison c;
  c.state = PureState::from_a1_epsilon(kSection4A1, kSection4Epsilon);
  const PureState& state = c.state;
  c.tritter_s_max = s_max_analytic(state).s_max;

  const OptimizationResult tritter = maximize_s(state, optimizer);
  c.tritter_s_max_numeric = tritter.best_s;

  const MeasurementBasis modes = section4_basis();
  struct Candidate {
    double value;
    std::size_t restart;
  };
  std::vector<Candidate> found;
  for (std::size_t i = 0; i < tritter.runs.size(); ++i) {
    const LocalResult& run = tritter.runs[i];
    if (run.value < c.tritter_s_max - kOptimalTol) continue;
    found.push_back({s_value(state, SettingsConfig::from_array(run.angles), modes), i});
  }
  if (found.empty()) {
    throw std::runtime_error("no restart reached the tritter optimum; increase restarts");
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  for (const auto& f : found) {
    if (c.custom_at_tritter_optima.empty() ||
        f.value - c.custom_at_tritter_optima.back() > kClassTol) {
      c.custom_at_tritter_optima.push_back(f.value);
    }
  }
  c.custom_basis_s_max = found.front().value;
  c.custom_settings = SettingsConfig::from_array(tritter.runs[found.front().restart].angles);

  const OptimizationResult reopt = optimize(
      [&](const Angles& x) { return s_value(state, SettingsConfig::from_array(x), modes); },
      Direction::Maximize, optimizer);
  c.custom_basis_reoptimized = reopt.best_s;
  return c;
}

}  // namespace qchsh
