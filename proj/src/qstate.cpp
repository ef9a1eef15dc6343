#include "qchsh/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qchsh {

namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

double inner_defect(const std::array<Vec3, 3>& v) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cx ip{};
      for (std::size_t k = 0; k < 3; ++k) ip += std::conj(v[i][k]) * v[j][k];
      worst = std::max(worst, std::abs(ip - cx(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

std::size_t outcome_index(int label) {
  if (label < 1 || label > 3) {
    throw std::out_of_range("outcome label must be 1, 2 or 3, got " + std::to_string(label));
  }
  return static_cast<std::size_t>(label - 1);
}

}  // namespace

cx alpha_pow(int k) {
  const int r = ((k % 3) + 3) % 3;
  switch (r) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {-0.5, std::sqrt(3.0) / 2.0};
    default:
      return {-0.5, -std::sqrt(3.0) / 2.0};
  }
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(double a1, double a2, double a3) : a_{a1, a2, a3} {
  for (double a : a_) {
    if (!std::isfinite(a)) throw std::invalid_argument("state coefficient is not finite");
  }
  const double norm = a1 * a1 + a2 * a2 + a3 * a3;
  if (std::abs(norm - 3.0) > kNormTol) {
    throw std::invalid_argument("state coefficients must satisfy a1^2+a2^2+a3^2 = 3, got " +
                                std::to_string(norm));
  }
}

PureState PureState::normalized_from(double a1, double a2, double a3) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3)) {
    throw std::invalid_argument("state coefficient is not finite");
  }
  const double norm = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
  if (norm == 0.0) throw std::invalid_argument("cannot normalize the zero triple");
  const double s = std::sqrt(3.0) / norm;
  return PureState(a1 * s, a2 * s, a3 * s);
}

PureState PureState::from_a1_epsilon(double a1, double epsilon) {
  if (!std::isfinite(a1) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("a1 and epsilon must be finite");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  const double rest = 3.0 - a1 * a1;
  if (rest < -kNormTol) throw std::invalid_argument("|a1| must not exceed sqrt(3)");
  // |a1| = sqrt(3) in floating point leaves a residue of a few ulps.
  const double r = rest <= 24.0 * std::numeric_limits<double>::epsilon() ? 0.0 : rest;
  const double a2 = std::sqrt(r * epsilon);
  const double a3 = std::sqrt(r * (1.0 - epsilon));
  return PureState(Unchecked{}, {a1, a2, a3});
}

// ---------------------------------------------------------------------------
// Phases

PhaseTriple PhaseTriple::wrapped() const {
  PhaseTriple out;
  for (std::size_t j = 0; j < 3; ++j) {
    double w = std::fmod(phi[j], kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    out.phi[j] = w;
  }
  return out;
}

PhaseTriple PhaseTriple::shifted(double offset) const {
  return PhaseTriple{{phi[0] + offset, phi[1] + offset, phi[2] + offset}};
}

std::array<double, SettingsConfig::kAngles> SettingsConfig::to_array() const {
  std::array<double, kAngles> x{};
  const PhaseTriple* t[4] = {&a1, &a2, &b1, &b2};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t j = 0; j < 3; ++j) x[3 * s + j] = t[s]->phi[j];
  return x;
}

SettingsConfig SettingsConfig::from_array(std::span<const double, kAngles> x) {
  SettingsConfig c;
  PhaseTriple* t[4] = {&c.a1, &c.a2, &c.b1, &c.b2};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t j = 0; j < 3; ++j) t[s]->phi[j] = x[3 * s + j];
  return c;
}

SettingsConfig SettingsConfig::wrapped() const {
  return SettingsConfig{a1.wrapped(), a2.wrapped(), b1.wrapped(), b2.wrapped()};
}

// ---------------------------------------------------------------------------
// Unitary3

Unitary3::Unitary3(const Entries& entries) : m_(entries) {
  if (defect(m_) > kAlgebraTol) throw std::invalid_argument("matrix is not unitary");
}

double Unitary3::defect(const Entries& e) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cx s{};
      for (std::size_t k = 0; k < 3; ++k) s += std::conj(e[k][i]) * e[k][j];
      worst = std::max(worst, std::abs(s - cx(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double Unitary3::unitarity_defect() const { return defect(m_); }

Unitary3 Unitary3::adjoint() const {
  Entries a{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a[i][j] = std::conj(m_[j][i]);
  return Unitary3(Unchecked{}, a);
}

// ---------------------------------------------------------------------------
// MeasurementBasis

MeasurementBasis::MeasurementBasis(const std::array<Vec3, 3>& vectors) : v_(vectors) {
  if (inner_defect(v_) > kAlgebraTol) {
    throw std::invalid_argument("measurement basis is not orthonormal");
  }
}

double MeasurementBasis::orthonormality_defect() const { return inner_defect(v_); }

double MeasurementBasis::completeness_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cx s{};
      for (const auto& v : v_) s += v[i] * std::conj(v[j]);
      worst = std::max(worst, std::abs(s - cx(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

Unitary3 build_tritter(const PhaseTriple& phases) {
  Unitary3::Entries u{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      u[i][j] = kInvSqrt3 * alpha_pow(i * j) * std::polar(1.0, phases[j]);
    }
  }
  return Unitary3(Unitary3::Unchecked{}, u);
}

MeasurementBasis tritter_basis(const PhaseTriple& phases) {
  const Unitary3 u = build_tritter(phases);
  std::array<Vec3, 3> v{};
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t n = 0; n < 3; ++n) v[l][n] = std::conj(u(l, n));
  return MeasurementBasis(v);
}

MeasurementBasis section4_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  return MeasurementBasis({Vec3{cx(r), cx(r), cx(0.0)}, Vec3{cx(r), cx(-r), cx(0.0)},
                           Vec3{cx(0.0), cx(0.0), cx(1.0)}});
}

MeasurementBasis computational_basis() {
  return MeasurementBasis({Vec3{cx(1.0), cx(0.0), cx(0.0)}, Vec3{cx(0.0), cx(1.0), cx(0.0)},
                           Vec3{cx(0.0), cx(0.0), cx(1.0)}});
}

MeasurementBasis tritter_basis_over(const MeasurementBasis& modes, const PhaseTriple& phases) {
  const Unitary3 u = build_tritter(phases);
  std::array<Vec3, 3> v{};
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t n = 0; n < 3; ++n) v[l][n] += std::conj(u(l, k)) * modes.vector(k)[n];
  return MeasurementBasis(v);
}

// ---------------------------------------------------------------------------
// Probabilities

cx joint_amplitude(const PureState& state, const MeasurementBasis& basis_a,
                   const MeasurementBasis& basis_b, std::size_t l, std::size_t m) {
  const Vec3& va = basis_a.vector(l);
  const Vec3& vb = basis_b.vector(m);
  cx amp{};
  for (std::size_t n = 0; n < 3; ++n) amp += state[n] * std::conj(va[n]) * std::conj(vb[n]);
  return kInvSqrt3 * amp;
}

double joint_probability(const PureState& state, const MeasurementBasis& basis_a,
                         const MeasurementBasis& basis_b, int l, int m) {
  return std::norm(joint_amplitude(state, basis_a, basis_b, outcome_index(l), outcome_index(m)));
}

JointTable joint_distribution(const PureState& state, const MeasurementBasis& basis_a,
                              const MeasurementBasis& basis_b) {
  JointTable p{};
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t m = 0; m < 3; ++m)
      p[l][m] = std::norm(joint_amplitude(state, basis_a, basis_b, l, m));
  return p;
}

}  // namespace qchsh
