// Closed-form extrema of S over tritter settings for the state family
// (1/sqrt3) sum_i a_i |ii>, global extremes over states, and the threshold
// noise admixture.
//
// Everything here depends on the state only through the K-values, the sorted
// products |a_i a_j|, so results are invariant under permutations and sign
// flips of the coefficients.
#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include "qchsh/qstate.hpp"

namespace qchsh {

/// Which coefficient pair a product |a_i a_j| comes from.
enum class CoefficientPair { P12, P13, P23 };

std::string_view to_string(CoefficientPair p);

struct KValues {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;  // k1 >= k2 >= k3 >= 0
  /// Source pair of each entry; ties keep the order 12, 13, 23.
  CoefficientPair k1_pair = CoefficientPair::P12;
  CoefficientPair k2_pair = CoefficientPair::P13;
  CoefficientPair k3_pair = CoefficientPair::P23;
};

/// Which vertex family of the (T12, T13, T23) polyhedron realizes S_max.
///   S1: (|T1|,|T2|,|T3|) = (4/3, 4/(3 sqrt3), 4/(3 sqrt3)), T1 T2 T3 > 0
///   S2: (4/3, 4/3, 4/3), T1 T2 T3 < 0
enum class Branch { S1, S2 };

std::string_view to_string(Branch b);

struct ViolationReport {
  double s_max = 0.0;
  double s_min = 0.0;
  Branch branch = Branch::S1;
  KValues k;
  double a_max = 0.0;
  std::optional<double> f_thr;  // present only when s_max > 2
  bool violates_upper = false;
};

inline constexpr double kTMax = 4.0 / 3.0;
inline const double kTSubMax = 4.0 / (3.0 * std::sqrt(3.0));
/// 1 + sqrt(11/3), the largest S_max over the state family.
inline const double kSBarMax = 1.0 + std::sqrt(11.0 / 3.0);
inline constexpr double kSBarMin = -4.0;
inline constexpr double kLocalBoundUpper = 2.0;
inline constexpr double kLocalBoundLower = -4.0;
/// F_thr of the maximally entangled two-qubit state; reference only.
inline constexpr double kQubitFThr = 0.29289;

/// Stable descending sort of {|a1 a2|, |a1 a3|, |a2 a3|}.
KValues k_values(const PureState& state);

/// (4/3) K1 + (4/(3 sqrt3)) (K2 + K3)
double s1_value(const KValues& k);
/// (4/3) (K1 + K2 - K3)
double s2_value(const KValues& k);

/// S_max = max(S1, S2); the report's branch names the larger one (S1 on ties).
ViolationReport s_max_analytic(const PureState& state);

/// -(4/3) (K1 + K2 + K3)
double s_min_analytic(const PureState& state);

/// sqrt(6 + 3 sqrt3) / 2 ~= 1.67303: for every normalized state with
/// max|a_i| above this value the S2 vertex dominates.
double branch_threshold();
/// 2 - sqrt3: S2 >= S1 exactly when K3 <= (2 - sqrt3) K2.
double branch_ratio_threshold();

struct StateOptimum {
  double value;
  PureState state;
};

/// (1 + sqrt(11/3), the maximizing state with a2 = a3)
StateOptimum global_optimum();
/// (-4, (1, 1, 1))
StateOptimum global_minimum();

/// 1 - 2 / s_max. Throws std::domain_error for s_max <= 0.
double f_thr(double s_max);

}  // namespace qchsh
