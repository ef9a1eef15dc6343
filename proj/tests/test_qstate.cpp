#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qchsh/qstate.hpp"

using namespace qchsh;
using doctest::Approx;

namespace {

PhaseTriple to_triple(const std::array<double, 3>& p) { return PhaseTriple{p}; }

PureState random_state(std::mt19937_64& rng) {
  const auto a = oracle::random_coefficients(rng);
  return PureState(a[0], a[1], a[2]);
}

}  // namespace

TEST_CASE("PureState enforces a1^2 + a2^2 + a3^2 = 3") {
  CHECK_NOTHROW(PureState(1.0, 1.0, 1.0));
  CHECK_NOTHROW(PureState(std::sqrt(3.0), 0.0, 0.0));
  CHECK_THROWS_AS(PureState(2.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PureState(1.0, 1.0, 1.0 + 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(PureState(NAN, 1.0, 1.0), std::invalid_argument);

  const PureState s = PureState::normalized_from(2.0, 0.0, 0.0);
  CHECK(s.a1() == Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(PureState::normalized_from(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("from_a1_epsilon follows the sweep parameterization") {
  const PureState s = PureState::from_a1_epsilon(1.56, 0.5);
  CHECK(s.a2() == Approx(std::sqrt((3.0 - 1.56 * 1.56) / 2.0)));
  CHECK(s.a2() == s.a3());
  const PureState edge = PureState::from_a1_epsilon(-std::sqrt(3.0), 0.3);
  CHECK(edge.a2() == 0.0);
  CHECK(edge.a3() == 0.0);
  CHECK_THROWS_AS(PureState::from_a1_epsilon(0.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(PureState::from_a1_epsilon(1.8, 0.5), std::invalid_argument);
}

TEST_CASE("PhaseTriple wrapping lands in [0, 2pi)") {
  const PhaseTriple p{{-0.5, 7.0, 2.0 * kPi}};
  const PhaseTriple w = p.wrapped();
  CHECK(w[0] == Approx(2.0 * kPi - 0.5));
  CHECK(w[1] == Approx(7.0 - 2.0 * kPi));
  CHECK(w[2] == Approx(0.0));
  for (double x : w.phi) {
    CHECK(x >= 0.0);
    CHECK(x < 2.0 * kPi);
  }
}

TEST_CASE("SettingsConfig flat order is A1, A2, B1, B2") {
  std::array<double, 12> x{};
  for (int i = 0; i < 12; ++i) x[i] = i;
  const SettingsConfig s = SettingsConfig::from_array(x);
  CHECK(s.a1[0] == 0.0);
  CHECK(s.a2[0] == 3.0);
  CHECK(s.b1[2] == 8.0);
  CHECK(s.b2[2] == 11.0);
  CHECK(s.to_array() == x);
}

TEST_CASE("build_tritter") {
  SUBCASE("zero phases give the discrete Fourier matrix") {
    const Unitary3 u = build_tritter(PhaseTriple{});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const cx expect = std::polar(1.0 / std::sqrt(3.0), 2.0 * kPi * i * j / 3.0);
        CHECK(std::abs(u(i, j) - expect) < 1e-15);
      }
  }
  SUBCASE("phase pi on port 1 negates column 1") {
    const Unitary3 u0 = build_tritter(PhaseTriple{});
    const Unitary3 u = build_tritter(PhaseTriple{{kPi, 0.0, 0.0}});
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(u(i, 0) + u0(i, 0)) < 1e-15);
      CHECK(std::abs(u(i, 1) - u0(i, 1)) < 1e-15);
      CHECK(std::abs(u(i, 2) - u0(i, 2)) < 1e-15);
    }
  }
  SUBCASE("matches the independently written matrix") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
      const auto phi = oracle::random_phases(rng);
      const Unitary3 u = build_tritter(to_triple(phi));
      const auto ref = oracle::tritter(phi);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(u(i, j) - ref[i][j]) < 1e-14);
    }
  }
  SUBCASE("unitarity for 1000 random phase triples") {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      worst = std::max(worst, build_tritter(to_triple(oracle::random_phases(rng))).unitarity_defect());
    }
    CHECK(worst < kAlgebraTol);
  }
}

TEST_CASE("Unitary3 rejects non-unitary matrices") {
  Unitary3::Entries e{};
  e[0][0] = 1.0;
  e[1][1] = 1.0;
  e[2][2] = 2.0;
  CHECK_THROWS_AS(Unitary3{e}, std::invalid_argument);
  const Unitary3 u = build_tritter(PhaseTriple{{0.1, 0.2, 0.3}});
  const Unitary3 ud = u.adjoint();
  CHECK(std::abs(ud(0, 1) - std::conj(u(1, 0))) < 1e-16);
}

TEST_CASE("tritter bases") {
  SUBCASE("zero phases: every component has modulus 1/sqrt3") {
    const MeasurementBasis b = tritter_basis(PhaseTriple{});
    for (const auto& v : b.vectors())
      for (const auto& c : v) CHECK(std::abs(c) == Approx(1.0 / std::sqrt(3.0)));
  }
  SUBCASE("completeness and orthonormality for random phases") {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const MeasurementBasis b = tritter_basis(to_triple(oracle::random_phases(rng)));
      worst = std::max({worst, b.completeness_defect(), b.orthonormality_defect()});
    }
    CHECK(worst < kAlgebraTol);
  }
  SUBCASE("over the computational basis it is the plain tritter basis") {
    const PhaseTriple p{{0.3, -1.1, 2.4}};
    const MeasurementBasis a = tritter_basis(p);
    const MeasurementBasis b = tritter_basis_over(computational_basis(), p);
    for (int l = 0; l < 3; ++l)
      for (int n = 0; n < 3; ++n) CHECK(std::abs(a.vector(l)[n] - b.vector(l)[n]) < 1e-15);
  }
}

TEST_CASE("section4_basis") {
  const MeasurementBasis x = section4_basis();
  CHECK(x.orthonormality_defect() < kAlgebraTol);
  CHECK(x.completeness_defect() < kAlgebraTol);
  CHECK(x.vector(2)[0] == cx(0.0));
  CHECK(x.vector(2)[1] == cx(0.0));
  CHECK(x.vector(2)[2] == cx(1.0));
  cx ip{};
  for (int n = 0; n < 3; ++n) ip += std::conj(x.vector(0)[n]) * x.vector(1)[n];
  CHECK(std::abs(ip) < 1e-16);
  CHECK(tritter_basis_over(x, PhaseTriple{{0.7, 0.1, -2.0}}).orthonormality_defect() < kAlgebraTol);
}

TEST_CASE("MeasurementBasis rejects non-orthonormal vectors") {
  CHECK_THROWS_AS(MeasurementBasis({Vec3{cx(1), cx(0), cx(0)}, Vec3{cx(1), cx(0), cx(0)},
                                    Vec3{cx(0), cx(0), cx(1)}}),
                  std::invalid_argument);
}

TEST_CASE("joint_probability") {
  const PureState max_ent(1.0, 1.0, 1.0);

  SUBCASE("computational basis: P = delta_lm / 3") {
    const MeasurementBasis z = computational_basis();
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m)
        CHECK(joint_probability(max_ent, z, z, l, m) == Approx(l == m ? 1.0 / 3.0 : 0.0));
  }

  SUBCASE("zero-phase tritters on (1,1,1): 1/3 where l + m = 2 mod 3") {
    // Frozen from the dense Tr(rho P (x) Q) oracle: outcomes (1,1), (2,3), (3,2).
    const MeasurementBasis f = tritter_basis(PhaseTriple{});
    const auto rho = oracle::density_matrix(1, 1, 1);
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m) {
        const double expect = (l + m) % 3 == 2 ? 1.0 / 3.0 : 0.0;
        const double dense = oracle::trace_probability(rho, oracle::tritter_vector({0, 0, 0}, l - 1),
                                                       oracle::tritter_vector({0, 0, 0}, m - 1));
        CHECK(dense == Approx(expect).epsilon(1e-14));
        CHECK(std::abs(joint_probability(max_ent, f, f, l, m) - expect) < 1e-15);
      }
  }

  SUBCASE("outcome labels outside 1..3 are rejected") {
    const MeasurementBasis z = computational_basis();
    CHECK_THROWS_AS(joint_probability(max_ent, z, z, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(joint_probability(max_ent, z, z, 1, 4), std::out_of_range);
  }

  SUBCASE("normalization over 1000 random draws") {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const PureState s = random_state(rng);
      const auto p = joint_distribution(s, tritter_basis(to_triple(oracle::random_phases(rng))),
                                        tritter_basis(to_triple(oracle::random_phases(rng))));
      double sum = 0.0;
      for (const auto& row : p)
        for (double x : row) {
          CHECK(x >= 0.0);
          CHECK(x <= 1.0 + 1e-15);
          sum += x;
        }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst < kPipelineTol);
  }

  SUBCASE("amplitude contraction equals the dense density-matrix trace") {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const auto a = oracle::random_coefficients(rng);
      const auto pa = oracle::random_phases(rng);
      const auto pb = oracle::random_phases(rng);
      const PureState s(a[0], a[1], a[2]);
      const auto rho = oracle::density_matrix(a[0], a[1], a[2]);
      const MeasurementBasis ba = tritter_basis(to_triple(pa));
      const MeasurementBasis bb = tritter_basis(to_triple(pb));
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m) {
          const double dense = oracle::trace_probability(rho, oracle::tritter_vector(pa, l),
                                                         oracle::tritter_vector(pb, m));
          worst = std::max(worst, std::abs(dense - joint_probability(s, ba, bb, l + 1, m + 1)));
        }
    }
    CHECK(worst < kPipelineTol);
  }
}
