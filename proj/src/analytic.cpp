#include "qchsh/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qchsh {

std::string_view to_string(Branch b) { return b == Branch::S1 ? "S1" : "S2"; }

std::string_view to_string(CoefficientPair p) {
  switch (p) {
    case CoefficientPair::P12:
      return "a1a2";
    case CoefficientPair::P13:
      return "a1a3";
    default:
      return "a2a3";
  }
}

KValues k_values(const PureState& state) {
  struct Entry {
    double value;
    CoefficientPair pair;
  };
  std::array<Entry, 3> k{{{std::abs(state.a1() * state.a2()), CoefficientPair::P12},
                          {std::abs(state.a1() * state.a3()), CoefficientPair::P13},
                          {std::abs(state.a2() * state.a3()), CoefficientPair::P23}}};
  std::stable_sort(k.begin(), k.end(),
                   [](const Entry& x, const Entry& y) { return x.value > y.value; });
  return {k[0].value, k[1].value, k[2].value, k[0].pair, k[1].pair, k[2].pair};
}

double s1_value(const KValues& k) { return kTMax * k.k1 + kTSubMax * (k.k2 + k.k3); }

double s2_value(const KValues& k) { return kTMax * (k.k1 + k.k2 - k.k3); }

ViolationReport s_max_analytic(const PureState& state) {
  ViolationReport r;
  r.k = k_values(state);
  const auto& a = state.coefficients();
  r.a_max = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});

  const double s1 = s1_value(r.k);
  const double s2 = s2_value(r.k);
  r.branch = s2 > s1 ? Branch::S2 : Branch::S1;
  r.s_max = std::max(s1, s2);
  r.s_min = s_min_analytic(state);
  r.violates_upper = r.s_max > kLocalBoundUpper;
  if (r.violates_upper) r.f_thr = f_thr(r.s_max);
  return r;
}

double s_min_analytic(const PureState& state) {
  const KValues k = k_values(state);
  return -kTMax * (k.k1 + k.k2 + k.k3);
}

double branch_threshold() { return std::sqrt(6.0 + 3.0 * std::sqrt(3.0)) / 2.0; }

double branch_ratio_threshold() { return 2.0 - std::sqrt(3.0); }

StateOptimum global_optimum() {
  const double a1 = std::sqrt(1.5 * (1.0 - std::sqrt(3.0 / 11.0)));
  const double minor = std::sqrt((3.0 - a1 * a1) / 2.0);
  return {1.0 + std::sqrt(11.0 / 3.0), PureState(a1, minor, minor)};
}

StateOptimum global_minimum() { return {kSBarMin, PureState(1.0, 1.0, 1.0)}; }

double f_thr(double s_max) {
  if (!(s_max > 0.0)) throw std::domain_error("f_thr requires s_max > 0");
  return 1.0 - 2.0 / s_max;
}

}  // namespace qchsh
