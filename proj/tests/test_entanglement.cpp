#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dephasim/entanglement.hpp"
#include "dephasim/qubit_boson.hpp"
#include "oracles.hpp"

using namespace dephasim;
using Catch::Matchers::WithinAbs;

namespace {

ComplexMatrix projector(Eigen::Index d, Eigen::Index k) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}

ComplexMatrix pauli(char which) {
  ComplexMatrix m(2, 2);
  if (which == 'x') m << 0, 1, 1, 0;
  if (which == 'y') m << 0, complex(0, -1), complex(0, 1), 0;
  if (which == 'z') m << 1, 0, 0, -1;
  return m;
}

ConditionalPropagatorSet qutrit_paulis() { return {0.0, {ComplexMatrix::Identity(2, 2), pauli('x'), pauli('z')}}; }

SegmentSchedule random_qubit_schedule(Eigen::Index d, std::mt19937& rng) {
  SegmentSchedule s{2, d, {}};
  for (int k = 0; k < 3; ++k) {
    s.segments.push_back({0.5, {oracle::random_hermitian(d, rng), oracle::random_hermitian(d, rng)}});
  }
  return s;
}

}  // namespace

TEST_CASE("qee_measure examples", "[entanglement]") {
  const auto half = PointerAmplitudes::equal_superposition(2);
  std::mt19937 rng(1);
  SECTION("equal conditional states") {
    const ComplexMatrix r = oracle::random_density(4, rng);
    CHECK(qee_measure(half, r, r) <= 1e-12);
  }
  SECTION("orthogonal conditional states") {
    CHECK_THAT(qee_measure(half, projector(2, 0), projector(2, 1)), WithinAbs(1.0, 1e-12));
  }
  SECTION("unequal amplitudes") {
    const PointerAmplitudes c({1.0 / std::sqrt(3.0), std::sqrt(2.0 / 3.0)});
    CHECK_THAT(qee_measure(c, projector(2, 0), projector(2, 1)), WithinAbs(8.0 / 9.0, 1e-12));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(qee_measure(PointerAmplitudes::equal_superposition(3), projector(2, 0), projector(2, 1)),
                    Error);
    try {
      qee_measure(half, projector(2, 0), projector(3, 1));
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }
}

TEST_CASE("qee_measure invariances", "[entanglement][property]") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const ComplexMatrix r0 = oracle::random_density(d, rng);
    const ComplexMatrix r1 = oracle::random_density(d, rng);
    const PointerAmplitudes c({std::polar(std::sqrt(0.3), 0.4), std::polar(std::sqrt(0.7), -1.1)});
    const double e = qee_measure(c, r0, r1);
    CHECK(e >= 0.0);
    CHECK(e <= 4 * 0.3 * 0.7 + 1e-12);

    const complex g = std::polar(1.0, 2.3);
    CHECK_THAT(qee_measure(PointerAmplitudes({g * c[0], g * c[1]}), r0, r1), WithinAbs(e, 1e-10));

    const ComplexMatrix u = oracle::random_unitary(d, rng);
    CHECK_THAT(qee_measure(c, u * r0 * u.adjoint(), u * r1 * u.adjoint()), WithinAbs(e, 1e-10));
  }
}

TEST_CASE("qee_measure prefactor law", "[entanglement][property]") {
  std::mt19937 rng(3);
  const ComplexMatrix r0 = oracle::random_density(3, rng);
  const ComplexMatrix r1 = oracle::random_density(3, rng);
  const double one_minus_f = 1.0 - fidelity(r0, r1);
  for (double p : {0.5, 0.2, 0.05}) {
    const PointerAmplitudes c({std::sqrt(p), std::sqrt(1 - p)});
    CHECK_THAT(qee_measure(c, r0, r1), WithinAbs(4 * p * (1 - p) * one_minus_f, 1e-12));
  }
}

TEST_CASE("factored and block-based measures agree", "[entanglement]") {
  std::mt19937 rng(4);
  const auto c = PointerAmplitudes::equal_superposition(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_qubit_schedule(6, rng);
    const auto env = trial % 2 == 0 ? density_from_matrix(oracle::random_density(6, rng))
                                    : thermal_state(0.8, FockSpace(6));
    const PropagatorEngine engine(s);
    for (double t : {0.0, 0.4, 1.5}) {
      const auto props = engine.at(t);
      const auto blocks = blocks_from_propagators(props, env, c);
      CHECK_THAT(qee_measure(c, env, props), WithinAbs(qee_measure(c, blocks.R(0, 0), blocks.R(1, 1)), 1e-10));
    }
  }
}

TEST_CASE("type1_residuals", "[entanglement]") {
  std::mt19937 rng(5);
  SECTION("equal blocks") {
    const ComplexMatrix r = oracle::random_density(3, rng);
    SegmentSchedule s{3, 3, {{1.0, {ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3)}}}};
    const auto b = blocks_at(s, density_from_matrix(r), PointerAmplitudes::equal_superposition(3), 0.7);
    const auto res = type1_residuals(b);
    REQUIRE(res.size() == 3);
    CHECK(res[0].independent);
    CHECK(res[1].independent);
    CHECK_FALSE(res[2].independent);
    for (const auto& x : res) CHECK(x.distance <= 1e-14);
    CHECK(type1_residuals(b, false).size() == 2);
  }
  SECTION("maximally mixed environment") {
    const ComplexMatrix mixed = ComplexMatrix::Identity(4, 4) / 4.0;
    SegmentSchedule s{3, 4, {}};
    for (int k = 0; k < 2; ++k) {
      s.segments.push_back({0.9, {oracle::random_hermitian(4, rng), oracle::random_hermitian(4, rng),
                                  oracle::random_hermitian(4, rng)}});
    }
    const auto b = blocks_at(s, density_from_matrix(mixed), PointerAmplitudes::equal_superposition(3), 1.5);
    for (const auto& x : type1_residuals(b)) CHECK(x.distance <= 1e-12);
  }
  SECTION("orthogonal pure conditional states") {
    // w_0 = I, w_1 = X on |0>: R_00 = |0><0|, R_11 = |1><1|
    const ConditionalPropagatorSet props{0.0, {ComplexMatrix::Identity(2, 2), pauli('x')}};
    const auto b = blocks_from_propagators(props, fock_state(0, FockSpace(2)), PointerAmplitudes::equal_superposition(2));
    const auto res = type1_residuals(b);
    REQUIRE(res.size() == 1);
    CHECK_THAT(res[0].distance, WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("type2_residuals", "[entanglement]") {
  SECTION("qubit has no type-2 criteria") {
    const ConditionalPropagatorSet props{0.0, {pauli('x'), pauli('z')}};
    CHECK(type2_residuals(props).empty());
  }
  SECTION("qutrit Pauli example") {
    const auto res = type2_residuals(qutrit_paulis());
    REQUIRE(res.size() == 1);
    CHECK(res[0].i == 1);
    CHECK(res[0].k == 2);
    CHECK_THAT(res[0].norm, WithinAbs(2.0 * std::sqrt(2.0), 1e-12));
  }
  SECTION("commuting propagators") {
    std::mt19937 rng(6);
    std::vector<ComplexMatrix> w;
    for (int i = 0; i < 4; ++i) {
      ComplexMatrix d = ComplexMatrix::Zero(5, 5);
      for (int k = 0; k < 5; ++k) d(k, k) = std::polar(1.0, std::uniform_real_distribution<double>(0, 6)(rng));
      w.push_back(d);
    }
    const ConditionalPropagatorSet props{0.0, w};
    const auto res = type2_residuals(props);
    CHECK(res.size() == 3);
    for (const auto& r : res) CHECK(r.norm <= 1e-14);
    for (const auto& r : type2_residuals_all(props)) CHECK(r.norm <= 1e-14);
  }
  SECTION("independent count (N-1)(N-2)/2") {
    std::mt19937 rng(7);
    for (std::size_t n = 2; n <= 6; ++n) {
      std::vector<ComplexMatrix> w;
      for (std::size_t i = 0; i < n; ++i) w.push_back(oracle::random_unitary(3, rng));
      CHECK(type2_residuals({0.0, w}).size() == (n - 1) * (n - 2) / 2);
    }
  }
}

TEST_CASE("separability_verdict", "[entanglement]") {
  std::mt19937 rng(8);
  SECTION("t = 0 is separable") {
    const auto s = random_qubit_schedule(4, rng);
    const auto env = density_from_matrix(oracle::random_density(4, rng));
    const auto props = propagators_at(s, 0.0);
    const auto v = separability_verdict(blocks_from_propagators(props, env, PointerAmplitudes::equal_superposition(2)), props);
    CHECK(v.separable());
    CHECK_FALSE(v.witness.has_value());
  }
  SECTION("driven phase of the thermal step model is entangled via type 1") {
    auto p = step_params(complex(0.5, 0.5), 2.0, 2.0, 2.0);
    const auto s = build_schedule(p);
    const auto env = thermal_state(2.0, FockSpace(64));
    const auto props = propagators_at(s, 3.0);
    const auto v = separability_verdict(blocks_from_propagators(props, env, PointerAmplitudes::equal_superposition(2)), props);
    REQUIRE(v.entangled);
    CHECK(v.witness->type == CriterionType::Type1);
  }
  SECTION("qutrit Pauli example is entangled via type 2 only") {
    const auto env = density_from_matrix(ComplexMatrix::Identity(2, 2) / 2.0);
    const auto props = qutrit_paulis();
    const auto c = PointerAmplitudes::equal_superposition(3);
    const auto b = blocks_from_propagators(props, env, c);
    for (const auto& r : type1_residuals(b)) CHECK(r.distance <= 1e-12);
    const auto v = separability_verdict(b, props);
    REQUIRE(v.entangled);
    CHECK(v.witness->type == CriterionType::Type2);
    CHECK_THAT(v.witness->residual, WithinAbs(2.0 * std::sqrt(2.0), 1e-10));
    CHECK(negativity(joint_state(b), 3, 2) > 1e-3);
    CHECK_FALSE(v.witness->describe().empty());
  }
  SECTION("tolerance threshold") {
    const std::vector<Type1Residual> t1{{0, 1, 5e-9, true}};
    CHECK(separability_verdict(t1, {}).separable());
    CHECK(separability_verdict(t1, {}, 1e-9).entangled);
  }
}

TEST_CASE("measure, criteria and negativity agree on random qubit sweeps", "[entanglement][property]") {
  std::mt19937 rng(9);
  ReportOptions opts;
  opts.negativity = true;
  int entangled_points = 0, separable_points = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const Eigen::Index d = 3 + trial % 3;
    SegmentSchedule s = random_qubit_schedule(d, rng);
    if (trial % 3 == 0) {
      // commuting diagonal generators on a diagonal state: separable throughout
      for (auto& seg : s.segments)
        for (auto& v : seg.generators) v = ComplexMatrix(v.diagonal().real().cast<complex>().asDiagonal());
    }
    const auto env = trial % 3 == 0 ? thermal_state(1.0, FockSpace(static_cast<int>(d)))
                                    : density_from_matrix(oracle::random_density(d, rng));
    const PropagatorEngine engine(s);
    const auto c = PointerAmplitudes::equal_superposition(2);
    for (int k = 0; k <= 30; ++k) {
      const auto rep = make_report(engine.at(s.total_duration() * k / 30.0), env, c, opts);
      const bool by_measure = *rep.E > 1e-6;
      const bool by_criterion = rep.max_type1() > 1e-8;
      CHECK(by_measure == by_criterion);
      if (*rep.negativity > 1e-8) CHECK(rep.verdict.entangled);
      (by_measure ? entangled_points : separable_points)++;
    }
  }
  CHECK(entangled_points > 0);
  CHECK(separable_points > 0);
}

TEST_CASE("make_report matches block-based quantities", "[entanglement]") {
  std::mt19937 rng(10);
  SegmentSchedule s{3, 4, {}};
  for (int k = 0; k < 2; ++k)
    s.segments.push_back({0.6, {oracle::random_hermitian(4, rng), oracle::random_hermitian(4, rng),
                                oracle::random_hermitian(4, rng)}});
  const auto env = density_from_matrix(oracle::random_density(4, rng));
  const PointerAmplitudes c({std::sqrt(0.5), complex(0.0, std::sqrt(0.3)), std::sqrt(0.2)});
  ReportOptions opts;
  opts.negativity = true;
  const auto props = propagators_at(s, 1.0);
  const auto rep = make_report(props, env, c, opts);
  const auto b = blocks_from_propagators(props, env, c);
  CHECK_FALSE(rep.E.has_value());
  const auto t1 = type1_residuals(b);
  REQUIRE(rep.type1.size() == t1.size());
  for (std::size_t k = 0; k < t1.size(); ++k) CHECK_THAT(rep.type1[k].distance, WithinAbs(t1[k].distance, 1e-12));
  CHECK_THAT(*rep.coherence_norm, WithinAbs(normalized_coherence(b, 0, 1), 1e-12));
  CHECK_THAT(*rep.negativity, WithinAbs(negativity(joint_state(b), 3, 4), 1e-12));
  CHECK(rep.type2.size() == 1);
}
