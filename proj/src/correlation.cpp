#include "qchsh/correlation.hpp"

#include <cmath>

namespace qchsh {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// phi_i^A - phi_j^A + phi_i^B - phi_j^B, 0-based mode indices.
double pair_angle(const PhaseTriple& a, const PhaseTriple& b, int i, int j) {
  return a[i] - a[j] + b[i] - b[j];
}

cx q_from_table(const JointTable& p) {
  cx q{};
  for (int l = 1; l <= 3; ++l)
    for (int m = 1; m <= 3; ++m) q += alpha_pow(l + m) * p[l - 1][m - 1];
  return q;
}

}  // namespace

cx correlation_q(const PureState& state, const MeasurementBasis& basis_a,
                 const MeasurementBasis& basis_b) {
  return q_from_table(joint_distribution(state, basis_a, basis_b));
}

cx correlation_q(const PureState& state, const PhaseTriple& phases_a,
                 const PhaseTriple& phases_b) {
  return correlation_q(state, tritter_basis(phases_a), tritter_basis(phases_b));
}

cx correlation_q_closed_form(const PureState& state, const PhaseTriple& phases_a,
                             const PhaseTriple& phases_b) {
  cx q{};
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 3; ++k) {
      const double phase = phases_a[k - 1] + phases_b[k - 1] - phases_a[n - 1] - phases_b[n - 1];
      const cx e = std::polar(state[n - 1] * state[k - 1], phase);
      for (int l = 1; l <= 3; ++l) {
        for (int m = 1; m <= 3; ++m) {
          const int shift = l + m - 2;
          // (alpha*)^((n-1)shift) alpha^((k-1)shift) = alpha^((k-n)shift)
          q += alpha_pow(l + m) * alpha_pow((k - n) * shift) * e;
        }
      }
    }
  }
  return q / 27.0;
}

CorrelationSet correlations(const PureState& state, const SettingsConfig& s) {
  const MeasurementBasis a1 = tritter_basis(s.a1);
  const MeasurementBasis a2 = tritter_basis(s.a2);
  const MeasurementBasis b1 = tritter_basis(s.b1);
  const MeasurementBasis b2 = tritter_basis(s.b2);
  return {correlation_q(state, a1, b1), correlation_q(state, a1, b2),
          correlation_q(state, a2, b1), correlation_q(state, a2, b2)};
}

CorrelationSet correlations(const PureState& state, const SettingsConfig& s,
                            const MeasurementBasis& modes) {
  const MeasurementBasis a1 = tritter_basis_over(modes, s.a1);
  const MeasurementBasis a2 = tritter_basis_over(modes, s.a2);
  const MeasurementBasis b1 = tritter_basis_over(modes, s.b1);
  const MeasurementBasis b2 = tritter_basis_over(modes, s.b2);
  return {correlation_q(state, a1, b1), correlation_q(state, a1, b2),
          correlation_q(state, a2, b1), correlation_q(state, a2, b2)};
}

double s_from_correlations(const CorrelationSet& q) {
  return (q.q11 + q.q12 - q.q21 + q.q22).real() + (q.q11 - q.q12 - q.q21 + q.q22).imag() / kSqrt3;
}

double s_value(const PureState& state, const SettingsConfig& settings) {
  return s_from_correlations(correlations(state, settings));
}

double s_value(const PureState& state, const SettingsConfig& settings,
               const MeasurementBasis& modes) {
  return s_from_correlations(correlations(state, settings, modes));
}

TCoefficients t_coefficients(const SettingsConfig& s) {
  using std::cos;
  using std::sin;
  const double r3 = kSqrt3;
  TCoefficients t;

  {
    const double a1b1 = pair_angle(s.a1, s.b1, 0, 1);
    const double a1b2 = pair_angle(s.a1, s.b2, 0, 1);
    const double a2b1 = pair_angle(s.a2, s.b1, 0, 1);
    const double a2b2 = pair_angle(s.a2, s.b2, 0, 1);
    t.t12 = (3 * cos(a2b1) - 3 * cos(a1b1) - 3 * cos(a2b2) - r3 * sin(a2b1) + r3 * sin(a1b1) +
             2 * r3 * sin(a1b2) + r3 * sin(a2b2)) /
            9.0;
  }
  {
    const double a1b1 = pair_angle(s.a1, s.b1, 0, 2);
    const double a1b2 = pair_angle(s.a1, s.b2, 0, 2);
    const double a2b1 = pair_angle(s.a2, s.b1, 0, 2);
    const double a2b2 = pair_angle(s.a2, s.b2, 0, 2);
    t.t13 = -(3 * cos(a1b1) - 3 * cos(a2b1) + 3 * cos(a2b2) + r3 * sin(a1b1) - r3 * sin(a2b1) +
              2 * r3 * sin(a1b2) + r3 * sin(a2b2)) /
            9.0;
  }
  {
    const double a1b1 = pair_angle(s.a1, s.b1, 1, 2);
    const double a1b2 = pair_angle(s.a1, s.b2, 1, 2);
    const double a2b1 = pair_angle(s.a2, s.b1, 1, 2);
    const double a2b2 = pair_angle(s.a2, s.b2, 1, 2);
    t.t23 = -(3 * cos(a1b1) - 3 * cos(a2b1) + 3 * cos(a2b2) - r3 * sin(a1b1) + r3 * sin(a2b1) -
              2 * r3 * sin(a1b2) - r3 * sin(a2b2)) /
            9.0;
  }
  return t;
}

double s_via_t(const PureState& state, const TCoefficients& t) {
  return state.a1() * state.a2() * t.t12 + state.a1() * state.a3() * t.t13 +
         state.a2() * state.a3() * t.t23;
}

double s_via_t(const PureState& state, const SettingsConfig& settings) {
  return s_via_t(state, t_coefficients(settings));
}

}  // namespace qchsh
