#include "qchsh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qchsh/parallel.hpp"

namespace qchsh {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e3;
constexpr int kMaxHalvings = 60;

double norm2(const Angles& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const Angles& a, const Angles& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Exact value of 2 Re(alpha^k) and 2 Im(alpha^k) / sqrt3.
int twice_re_alpha(int k) { return ((k % 3) + 3) % 3 == 0 ? 2 : -1; }
int twice_im_alpha_over_sqrt3(int k) {
  switch (((k % 3) + 3) % 3) {
    case 0:
      return 0;
    case 1:
      return 1;
    default:
      return -1;
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts <= 0) throw std::invalid_argument("restarts must be positive");
  if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("gradient_tolerance must be > 0");
  if (!(finite_difference_step > 0.0)) {
    throw std::invalid_argument("finite_difference_step must be > 0");
  }
}

Gradient finite_difference_gradient(const Objective& f, const Angles& x, double step) {
  Gradient g{};
  Angles probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

Gradient gradient_s(const PureState& state, const SettingsConfig& settings, double step) {
  const Objective f = [&state](const Angles& x) {
    return s_via_t(state, SettingsConfig::from_array(x));
  };
  return finite_difference_gradient(f, settings.to_array(), step);
}

Angles initial_angles(std::uint64_t seed, std::size_t index) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index))));
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  Angles x{};
  for (double& v : x) v = dist(rng);
  return x;
}

LocalResult local_search(const Objective& f, Angles x, Direction dir,
                         const OptimizerConfig& config) {
  const double sign = dir == Direction::Maximize ? 1.0 : -1.0;
  const Objective g = [&](const Angles& a) { return sign * f(a); };
  const double h = config.finite_difference_step;

  LocalResult out;
  double gx = g(x);
  Gradient grad = finite_difference_gradient(g, x, h);
  double gnorm = norm2(grad);
  double step = 1.0;

  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (gnorm < config.gradient_tolerance) break;

    // Roundoff allowance so that a flat neighbourhood of the optimum does not
    // stall the search before the gradient test can pass.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(gx));
    Angles xn{};
    double gn = 0.0;
    bool accepted = false;
    for (int k = 0; k < kMaxHalvings && step >= kMinStep; ++k) {
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + step * grad[i];
      gn = g(xn);
      if (gn >= gx + kArmijo * step * gnorm * gnorm - slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Gradient grad_n = finite_difference_gradient(g, xn, h);
    Angles s{}, y{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = xn[i] - x[i];
      y[i] = grad_n[i] - grad[i];
    }
    // Ascent on g: curvature along s is negative, so -s.y > 0 for a BB step.
    const double curv = -dot(s, y);
    step = curv > 0.0 ? std::clamp(dot(s, s) / curv, kMinStep, kMaxStep) : std::min(2.0 * step, kMaxStep);

    x = xn;
    gx = gn;
    grad = grad_n;
    gnorm = norm2(grad);
  }

  out.value = f(x);
  out.angles = x;
  out.gradient_norm = gnorm;
  out.iterations = it;
  out.converged = gnorm < config.gradient_tolerance;
  return out;
}

OptimizationResult optimize(const Objective& f, Direction dir, const OptimizerConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.restarts);
  std::vector<LocalResult> runs(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        runs[i] = local_search(f, initial_angles(config.step_seed, i), dir, config);
      },
      config.threads == 0 ? default_thread_count() : config.threads);

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const bool better = dir == Direction::Maximize ? runs[i].value > runs[best].value
                                                   : runs[i].value < runs[best].value;
    if (better) best = i;
  }

  OptimizationResult r;
  r.best_s = runs[best].value;
  r.best_settings = SettingsConfig::from_array(runs[best].angles);
  r.gradient_norm = runs[best].gradient_norm;
  r.converged = runs[best].converged;
  r.restarts_used = config.restarts;
  r.runs = std::move(runs);
  return r;
}

OptimizationResult maximize_s(const PureState& state, const OptimizerConfig& config) {
  return optimize([&state](const Angles& x) { return s_via_t(state, SettingsConfig::from_array(x)); },
                  Direction::Maximize, config);
}

OptimizationResult minimize_s(const PureState& state, const OptimizerConfig& config) {
  return optimize([&state](const Angles& x) { return s_via_t(state, SettingsConfig::from_array(x)); },
                  Direction::Minimize, config);
}

// ---------------------------------------------------------------------------
// Local deterministic strategies

double lhv_s(const LhvStrategy& st) {
  const int a1 = st.outcome[0], a2 = st.outcome[1], b1 = st.outcome[2], b2 = st.outcome[3];
  const int k11 = a1 + b1, k12 = a1 + b2, k21 = a2 + b1, k22 = a2 + b2;
  // 2S as an integer: each alpha^k contributes exact halves.
  const int twice_s = twice_re_alpha(k11) + twice_re_alpha(k12) - twice_re_alpha(k21) +
                      twice_re_alpha(k22) + twice_im_alpha_over_sqrt3(k11) -
                      twice_im_alpha_over_sqrt3(k12) - twice_im_alpha_over_sqrt3(k21) +
                      twice_im_alpha_over_sqrt3(k22);
  return twice_s / 2.0;
}

std::vector<LhvStrategy> lhv_strategies() {
  std::vector<LhvStrategy> all;
  all.reserve(81);
  for (int a1 = 1; a1 <= 3; ++a1)
    for (int a2 = 1; a2 <= 3; ++a2)
      for (int b1 = 1; b1 <= 3; ++b1)
        for (int b2 = 1; b2 <= 3; ++b2) all.push_back({{a1, a2, b1, b2}});
  return all;
}

LhvExtrema lhv_extrema() {
  LhvExtrema e{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& st : lhv_strategies()) {
    const double s = lhv_s(st);
    e.max_s = std::max(e.max_s, s);
    e.min_s = std::min(e.min_s, s);
  }
  return e;
}

}  // namespace qchsh
