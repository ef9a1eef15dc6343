// Correlation functions Q_ij, the CHSH-type quantity S and its T-coefficient
// decomposition.
//
// Two independent routes are provided and must agree:
//   * the projector pipeline (joint probabilities from measurement bases), and
//   * closed forms in the phases (the quadruple sum for Q and the T-sums for S).
#pragma once

#include "qchsh/qstate.hpp"

namespace qchsh {

struct CorrelationSet {
  cx q11, q12, q21, q22;
};

struct TCoefficients {
  double t12 = 0.0;
  double t13 = 0.0;
  double t23 = 0.0;
};

/// Q = sum_{l,m} alpha^(l+m) P(a_l, b_m) with 1-based outcome labels.
cx correlation_q(const PureState& state, const MeasurementBasis& basis_a,
                 const MeasurementBasis& basis_b);

/// Pipeline route for tritter measurements.
cx correlation_q(const PureState& state, const PhaseTriple& phases_a,
                 const PhaseTriple& phases_b);

/// Quadruple sum over (n, k, l, m) in the phases, carrying the 1/27
/// probability normalization.
cx correlation_q_closed_form(const PureState& state, const PhaseTriple& phases_a,
                             const PhaseTriple& phases_b);

/// Q11 = Q(A1,B1), Q12 = Q(A1,B2), Q21 = Q(A2,B1), Q22 = Q(A2,B2).
CorrelationSet correlations(const PureState& state, const SettingsConfig& settings);

/// Same, with each setting's tritter acting on the given input modes
/// (see tritter_basis_over).
CorrelationSet correlations(const PureState& state, const SettingsConfig& settings,
                            const MeasurementBasis& modes);

/// S = Re[Q11 + Q12 - Q21 + Q22] + Im[Q11 - Q12 - Q21 + Q22] / sqrt3
double s_from_correlations(const CorrelationSet& q);

double s_value(const PureState& state, const SettingsConfig& settings);

/// S for tritter measurements over arbitrary input modes.
double s_value(const PureState& state, const SettingsConfig& settings,
               const MeasurementBasis& modes);

TCoefficients t_coefficients(const SettingsConfig& settings);

/// a1 a2 T12 + a1 a3 T13 + a2 a3 T23
double s_via_t(const PureState& state, const TCoefficients& t);
double s_via_t(const PureState& state, const SettingsConfig& settings);

}  // namespace qchsh
