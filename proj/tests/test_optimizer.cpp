#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qchsh/analytic.hpp"
#include "qchsh/optimizer.hpp"

using namespace qchsh;
using doctest::Approx;

namespace {

const double kMaxEntangledSMax = 2.0 / 9.0 * (6.0 + 4.0 * std::sqrt(3.0));

std::array<double, 3> sorted_abs(const TCoefficients& t) {
  std::array<double, 3> v{std::abs(t.t12), std::abs(t.t13), std::abs(t.t23)};
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST_CASE("OptimizerConfig defaults and validation") {
  const OptimizerConfig c;
  CHECK(c.restarts == 64);
  CHECK(c.max_iterations == 2000);
  CHECK(c.gradient_tolerance == 1e-8);
  CHECK(c.finite_difference_step == 1e-6);
  CHECK_NOTHROW(c.validate());

  OptimizerConfig bad = c;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.finite_difference_step = -1.0;
  CHECK_THROWS_AS(maximize_s(PureState(1, 1, 1), bad), std::invalid_argument);
}

TEST_CASE("initial angles are keyed by seed and restart index only") {
  const Angles a = initial_angles(7, 3);
  CHECK(a == initial_angles(7, 3));
  CHECK(a != initial_angles(7, 4));
  CHECK(a != initial_angles(8, 3));
  for (double x : a) {
    CHECK(x >= 0.0);
    CHECK(x < kTwoPi);
  }
}

TEST_CASE("maximize_s") {
  SUBCASE("maximally entangled state") {
    const OptimizationResult r = maximize_s(PureState(1, 1, 1));
    CHECK(std::abs(r.best_s - kMaxEntangledSMax) < 1e-4);
    CHECK(r.converged);
    CHECK(r.gradient_norm < 1e-8);
    CHECK(r.restarts_used == 64);
    CHECK(r.runs.size() == 64);
    CHECK(s_value(PureState(1, 1, 1), r.best_settings) == Approx(r.best_s).epsilon(1e-10));
  }
  SUBCASE("optimal state") {
    const auto opt = global_optimum();
    CHECK(std::abs(maximize_s(opt.state).best_s - 2.91485) < 1e-4);
  }
  SUBCASE("product state") {
    const PureState s(std::sqrt(3.0), 0, 0);
    CHECK(std::abs(maximize_s(s).best_s) < 1e-9);
    CHECK(std::abs(minimize_s(s).best_s) < 1e-9);
  }
}

TEST_CASE("minimize_s on the maximally entangled state reaches -4") {
  CHECK(std::abs(minimize_s(PureState(1, 1, 1)).best_s + 4.0) < 1e-4);
}

TEST_CASE("numeric extrema agree with the closed forms and never exceed them") {
  std::mt19937_64 rng(31);
  OptimizerConfig cfg;
  cfg.restarts = 32;
  for (int t = 0; t < 12; ++t) {
    const auto a = oracle::random_coefficients(rng);
    const PureState s(a[0], a[1], a[2]);
    const ViolationReport rep = s_max_analytic(s);
    const OptimizationResult hi = maximize_s(s, cfg);
    const OptimizationResult lo = minimize_s(s, cfg);
    CHECK(hi.best_s <= rep.s_max + 1e-6);
    CHECK(std::abs(hi.best_s - rep.s_max) < 2e-4);
    CHECK(lo.best_s >= rep.s_min - 1e-6);
    CHECK(std::abs(lo.best_s - rep.s_min) < 2e-4);
    for (const auto& run : hi.runs) {
      if (run.converged) CHECK(run.gradient_norm < cfg.gradient_tolerance);
      CHECK(run.value <= rep.s_max + 1e-6);
    }
  }
}

TEST_CASE("S2-branch states: the optimizer finds the (4/3, 4/3, 4/3) vertex") {
  // eps = 0.5 and a1 between the two thresholds: S2 > S1 although
  // a1 < sqrt(6 + 3 sqrt3)/2.
  const PureState s = PureState::from_a1_epsilon(1.64545, 0.5);
  const ViolationReport rep = s_max_analytic(s);
  REQUIRE(rep.branch == Branch::S2);
  REQUIRE(rep.a_max < branch_threshold());
  const OptimizationResult r = maximize_s(s);
  CHECK(std::abs(r.best_s - rep.s_max) < 2e-4);

  const TCoefficients t = t_coefficients(r.best_settings);
  const auto v = sorted_abs(t);
  CHECK(v[0] == Approx(kTMax).epsilon(1e-5));
  CHECK(v[1] == Approx(kTMax).epsilon(1e-5));
  CHECK(v[2] == Approx(kTMax).epsilon(1e-5));
  CHECK(t.t12 * t.t13 * t.t23 < 0.0);
}

TEST_CASE("S1-branch maximizer realizes the (4/3, 4/(3 sqrt3), 4/(3 sqrt3)) vertex") {
  for (const PureState& s : {PureState(1, 1, 1), global_optimum().state}) {
    const OptimizationResult r = maximize_s(s);
    const TCoefficients t = t_coefficients(r.best_settings);
    const auto v = sorted_abs(t);
    CHECK(v[0] == Approx(kTMax).epsilon(1e-5));
    CHECK(v[1] == Approx(kTSubMax).epsilon(1e-5));
    CHECK(v[2] == Approx(kTSubMax).epsilon(1e-5));
    CHECK(t.t12 * t.t13 * t.t23 > 0.0);
  }
}

TEST_CASE("gradient_s") {
  SUBCASE("vanishes at a converged maximizer") {
    const PureState s(1, 1, 1);
    const OptimizationResult r = maximize_s(s);
    const Gradient g = gradient_s(s, r.best_settings);
    for (double x : g) CHECK(std::abs(x) < 1e-6);
  }
  SUBCASE("step 1e-6 and 1e-4 agree to O(h^2)") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int t = 0; t < 20; ++t) {
      const auto a = oracle::random_coefficients(rng);
      const PureState s(a[0], a[1], a[2]);
      Angles x{};
      for (double& v : x) v = u(rng);
      const SettingsConfig c = SettingsConfig::from_array(x);
      const Gradient fine = gradient_s(s, c, 1e-6);
      const Gradient coarse = gradient_s(s, c, 1e-4);
      // Truncation error h^2 |S'''| / 6 stays below 1e-7 at h = 1e-4.
      for (std::size_t i = 0; i < fine.size(); ++i) CHECK(std::abs(fine[i] - coarse[i]) < 1e-7);
    }
  }
  SUBCASE("identically zero for a product state") {
    const PureState s(0, 0, std::sqrt(3.0));
    const Gradient g = gradient_s(s, SettingsConfig::from_array(initial_angles(1, 1)));
    for (double x : g) CHECK(x == 0.0);
  }
  SUBCASE("gauge directions carry no gradient") {
    const PureState s(1.2, 0.9, std::sqrt(3.0 - 1.44 - 0.81));
    const Gradient g = gradient_s(s, SettingsConfig::from_array(initial_angles(2, 5)));
    for (int setting = 0; setting < 4; ++setting) {
      CHECK(std::abs(g[3 * setting] + g[3 * setting + 1] + g[3 * setting + 2]) < 1e-9);
    }
  }
}

TEST_CASE("determinism across runs and thread counts") {
  const PureState s = PureState::from_a1_epsilon(0.4, 0.3);
  OptimizerConfig one;
  one.threads = 1;
  OptimizerConfig many = one;
  many.threads = 4;
  const OptimizationResult a = maximize_s(s, one);
  const OptimizationResult b = maximize_s(s, one);
  const OptimizationResult c = maximize_s(s, many);
  CHECK(a.best_s == b.best_s);
  CHECK(a.best_s == c.best_s);
  CHECK(a.best_settings.to_array() == c.best_settings.to_array());
  for (std::size_t i = 0; i < a.runs.size(); ++i) CHECK(a.runs[i].value == c.runs[i].value);

  OptimizerConfig other = one;
  other.step_seed = 99;
  CHECK(maximize_s(s, other).best_settings.to_array() != a.best_settings.to_array());
}

TEST_CASE("local deterministic strategies") {
  const auto all = lhv_strategies();
  CHECK(all.size() == 81);

  const LhvExtrema e = lhv_extrema();
  CHECK(e.max_s == 2.0);
  CHECK(e.min_s == -4.0);

  // All outcomes 3: every exponent is a multiple of 3, all Q = 1, S = 1+1-1+1.
  const LhvStrategy all_three{{3, 3, 3, 3}};
  CHECK(std::find_if(all.begin(), all.end(), [](const LhvStrategy& s) {
          return s.outcome == std::array<int, 4>{3, 3, 3, 3};
        }) != all.end());
  CHECK(lhv_s(all_three) == 2.0);

  // Direct complex evaluation of the same sum, independent of the exact
  // integer bookkeeping.
  for (const auto& st : all) {
    auto q = [](int l, int m) { return std::polar(1.0, 2.0 * kPi * (l + m) / 3.0); };
    const cx q11 = q(st.outcome[0], st.outcome[2]), q12 = q(st.outcome[0], st.outcome[3]);
    const cx q21 = q(st.outcome[1], st.outcome[2]), q22 = q(st.outcome[1], st.outcome[3]);
    const double direct =
        (q11 + q12 - q21 + q22).real() + (q11 - q12 - q21 + q22).imag() / std::sqrt(3.0);
    CHECK(lhv_s(st) == Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("mixtures of deterministic strategies stay inside [-4, 2]") {
  std::mt19937_64 rng(33);
  const auto all = lhv_strategies();
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double p = w(rng);
    const LhvStrategy& x = all[pick(rng)];
    const LhvStrategy& y = all[pick(rng)];
    // Mix the correlation functions, then form S.
    auto q = [](const LhvStrategy& s, int i, int j) {
      return std::polar(1.0, 2.0 * kPi * (s.outcome[i] + s.outcome[2 + j]) / 3.0);
    };
    auto mix = [&](int i, int j) { return p * q(x, i, j) + (1.0 - p) * q(y, i, j); };
    const cx q11 = mix(0, 0), q12 = mix(0, 1), q21 = mix(1, 0), q22 = mix(1, 1);
    const double s = (q11 + q12 - q21 + q22).real() + (q11 - q12 - q21 + q22).imag() / std::sqrt(3.0);
    CHECK(s <= 2.0 + 1e-12);
    CHECK(s >= -4.0 - 1e-12);
  }
}
