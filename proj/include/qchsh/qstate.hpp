// Two-qutrit states, tritter unitaries and projective measurement bases.
//
// Conventions: outcome labels and mode indices are 1-based (1, 2, 3) wherever
// they cross the public API or get serialized; storage is 0-based and the
// (i-1)(j-1) tritter exponent is kept as written.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace qchsh {

using cx = std::complex<double>;
using Vec3 = std::array<cx, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Tolerance for algebraic identities (unitarity, orthonormality).
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for composed pipelines (probability sums, two-route checks).
inline constexpr double kPipelineTol = 1e-11;
/// Construction-time tolerance on a1^2 + a2^2 + a3^2 = 3.
inline constexpr double kNormTol = 1e-9;

/// alpha^k with alpha = exp(2 pi i / 3); k may be negative.
cx alpha_pow(int k);

/// |psi> = (1/sqrt3) sum_n a_n |n>|n> with real a_n and sum a_n^2 = 3.
class PureState {
 public:
  /// Throws std::invalid_argument when |sum a^2 - 3| > kNormTol or a
  /// coefficient is not finite. Never rescales.
  PureState(double a1, double a2, double a3);

  /// Rescales any nonzero finite triple onto sum a^2 = 3.
  static PureState normalized_from(double a1, double a2, double a3);

  /// a2 = sqrt((3 - a1^2) eps), a3 = sqrt((3 - a1^2)(1 - eps)).
  /// Requires |a1| <= sqrt3 (tiny overshoot is clamped) and eps in [0, 1].
  static PureState from_a1_epsilon(double a1, double epsilon);

  double a1() const { return a_[0]; }
  double a2() const { return a_[1]; }
  double a3() const { return a_[2]; }
  const std::array<double, 3>& coefficients() const { return a_; }
  double operator[](std::size_t i) const { return a_[i]; }

 private:
  struct Unchecked {};
  PureState(Unchecked, std::array<double, 3> a) : a_(a) {}
  std::array<double, 3> a_;
};

/// Three phase-shifter settings of one tritter, in radians.
struct PhaseTriple {
  std::array<double, 3> phi{};

  double operator[](std::size_t j) const { return phi[j]; }
  double& operator[](std::size_t j) { return phi[j]; }

  /// Each angle reduced to [0, 2 pi).
  PhaseTriple wrapped() const;
  /// Adds the same offset to all three phases (a global phase of U).
  PhaseTriple shifted(double offset) const;
};

/// Alice's two settings and Bob's two settings: 12 free angles.
struct SettingsConfig {
  PhaseTriple a1, a2, b1, b2;

  static constexpr std::size_t kAngles = 12;

  /// Flat order: A1(phi1..3), A2, B1, B2.
  std::array<double, kAngles> to_array() const;
  static SettingsConfig from_array(std::span<const double, kAngles> x);

  SettingsConfig wrapped() const;
};

/// 3x3 complex matrix, entries(i, j) 0-based.
class Unitary3 {
 public:
  using Entries = std::array<std::array<cx, 3>, 3>;

  /// Throws std::invalid_argument when ||U^dag U - I||_max > kAlgebraTol.
  explicit Unitary3(const Entries& entries);

  const cx& operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
  const Entries& entries() const { return m_; }

  Unitary3 adjoint() const;
  /// max_ij |(U^dag U - I)_ij|
  double unitarity_defect() const;

 private:
  struct Unchecked {};
  Unitary3(Unchecked, const Entries& e) : m_(e) {}
  static double defect(const Entries& e);
  Entries m_;
  friend Unitary3 build_tritter(const PhaseTriple&);
};

/// Orthonormal basis v_1, v_2, v_3 of C^3 defining rank-1 projectors |v_l><v_l|.
class MeasurementBasis {
 public:
  /// Throws std::invalid_argument unless <v_i|v_j> = delta_ij within kAlgebraTol.
  explicit MeasurementBasis(const std::array<Vec3, 3>& vectors);

  /// 0-based vector access.
  const Vec3& vector(std::size_t l) const { return v_[l]; }
  const std::array<Vec3, 3>& vectors() const { return v_; }

  /// max_ij |<v_i|v_j> - delta_ij|
  double orthonormality_defect() const;
  /// max_ij |(sum_l |v_l><v_l| - I)_ij|
  double completeness_defect() const;

 private:
  std::array<Vec3, 3> v_;
};

/// U_ij = (1/sqrt3) alpha^((i-1)(j-1)) exp(i phi_j); j is the input port.
Unitary3 build_tritter(const PhaseTriple& phases);

/// v_l = U^dag |l>: the projectors U^dag |l><l| U of a tritter measurement.
MeasurementBasis tritter_basis(const PhaseTriple& phases);

/// {(|1>+|2>)/sqrt2, (|1>-|2>)/sqrt2, |3>}
MeasurementBasis section4_basis();

/// Tritter measurement whose input modes are the vectors of `modes` instead
/// of the computational kets: v_l = sum_k conj(U_lk) |m_k>. With the
/// computational basis this is tritter_basis().
MeasurementBasis tritter_basis_over(const MeasurementBasis& modes, const PhaseTriple& phases);

/// The computational basis |1>, |2>, |3>.
MeasurementBasis computational_basis();

/// <v_l^A| (x) <v_m^B| psi>, 0-based outcome indices, no range check.
cx joint_amplitude(const PureState& state, const MeasurementBasis& basis_a,
                   const MeasurementBasis& basis_b, std::size_t l, std::size_t m);

/// P(a_l, b_m) = Tr(rho P_l (x) Q_m) by amplitude contraction. Outcome labels
/// are 1-based; anything outside {1,2,3} throws std::out_of_range.
double joint_probability(const PureState& state, const MeasurementBasis& basis_a,
                         const MeasurementBasis& basis_b, int l, int m);

/// Full 3x3 outcome distribution, table[l-1][m-1].
using JointTable = std::array<std::array<double, 3>, 3>;
JointTable joint_distribution(const PureState& state, const MeasurementBasis& basis_a,
                              const MeasurementBasis& basis_b);

}  // namespace qchsh
