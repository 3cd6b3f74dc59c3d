/**
 * @file test_model.cpp
 * @brief Model construction, physical realizability, and transfer identities.
 */

#include "lqs/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lqs;

TEST_CASE("random builds are physically realizable in both representations", "[model]") {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 2);
    const SlhParams p = rand_slh(rng, n, m);
    REQUIRE(p.structure_residual() < 1e-12);
    const StateSpace c = build_complex_ss(p);
    const PrReport prc = check_physical_realizability(c);
    REQUIRE(prc.passed);
    const StateSpace q = to_quadrature(c);
    const PrReport prq = check_physical_realizability(q);
    REQUIRE(prq.passed);
    worst = std::max({worst, prc.residual_constraint1, prc.residual_constraint2,
                      prq.residual_constraint1, prq.residual_constraint2});
    // round trip back to the complex representation
    const StateSpace c2 = to_complex(q);
    REQUIRE(max_abs(CMat(c2.A - c.A)) < 1e-13);
    REQUIRE(max_abs(CMat(c2.B - c.B)) < 1e-13);
    REQUIRE(max_abs(CMat(c2.C - c.C)) < 1e-13);
    REQUIRE(max_abs(CMat(c2.D - c.D)) < 1e-13);
  }
  INFO("worst residual " << worst);
  REQUIRE(worst < 1e-9);
}

TEST_CASE("static identity system fails realizability with exact residuals", "[model]") {
  const ParsedSystem ps = make_fixture("static_identity");
  const PrReport pr = check_physical_realizability(ps.ss);
  REQUIRE_FALSE(pr.passed);
  REQUIRE(pr.residual_constraint1 == 3.0);  // ||3 JJ||
  REQUIRE(pr.residual_constraint2 == 2.0);  // ||2 I||
}

TEST_CASE("two-pole classical system fails realizability", "[model]") {
  const ParsedSystem ps = make_fixture("classical_two_pole");
  const PrReport pr = check_physical_realizability(ps.ss);
  REQUIRE_FALSE(pr.passed);
  REQUIRE(pr.residual_constraint1 == 3.0);
  REQUIRE(pr.residual_constraint2 == 1.0);
}

TEST_CASE("transfer evaluation matches a hand computation", "[model]") {
  // passive cavity: A = -I, B = -sqrt(2) I, C = sqrt(2) I, D = I (one mode)
  StateSpace q;
  q.rep = Rep::kQuadrature;
  q.n = 1;
  q.m = 1;
  q.A = CMat::Identity(2, 2) * Complex(-1.0, 0.0);
  q.B = CMat::Identity(2, 2) * Complex(-std::sqrt(2.0), 0.0);
  q.C = CMat::Identity(2, 2) * Complex(std::sqrt(2.0), 0.0);
  q.D = CMat::Identity(2, 2);
  const Complex s(0.5, 0.0);
  // G(s) = (s - 1)/(s + 1) I = -1/3 I at s = 1/2
  const CMat g = transfer_at(q, s);
  REQUIRE(max_abs(CMat(g - CMat::Identity(2, 2) * Complex(-1.0 / 3.0, 0.0))) < 1e-15);
}

TEST_CASE("symplectic and doubly-stochastic identities hold on random systems", "[model]") {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 3),
                                            1 + static_cast<Eigen::Index>(rng() % 2));
    for (int k = 0; k < 20; ++k) {
      const Complex s(u(rng), u(rng));
      worst = std::max(worst, check_symplectic_identity(q, s));
      worst = std::max(worst, check_doubly_stochastic(q, s));
    }
  }
  INFO("worst residual " << worst);
  REQUIRE(worst < 1e-9);
}

TEST_CASE("mirror-diagonal rational matrix is not a quantum transfer function", "[model]") {
  // [[(s-1)/(s+1), 1], [0, (s+1)/(s-1)]]: bounded, looks innocent, but the
  // symplectic identity fails by a wide margin.
  const Complex s(0.3, 0.7);
  const double res =
      symplectic_identity_residual(rational_mirror_control(s), rational_mirror_control(-std::conj(s)));
  INFO("residual " << res);
  REQUIRE(res > 0.1);
}

TEST_CASE("identity violations are detected for the static identity system", "[model]") {
  const ParsedSystem ps = make_fixture("static_identity");
  const Complex s(0.4, 1.1);
  REQUIRE(check_symplectic_identity(ps.ss, s) > 0.1);
}

TEST_CASE("realizable systems satisfy the identities on every fixture", "[model]") {
  for (const FixtureInfo& info : fixture_list()) {
    const ParsedSystem ps = make_fixture(info.name);
    const StateSpace q = ps.to_quadrature_ss();
    if (!check_physical_realizability(q).passed) continue;
    const Complex s(0.37, -0.82);
    INFO(info.name);
    REQUIRE(check_symplectic_identity(q, s) < 1e-9);
    REQUIRE(check_doubly_stochastic(q, s) < 1e-9);
  }
}

TEST_CASE("doubled-up structure of complex builds", "[model]") {
  std::mt19937_64 rng(103);
  const SlhParams p = rand_slh(rng, 2, 2);
  const StateSpace c = build_complex_ss(p);
  REQUIRE(doubled_up_residual(c.A) < 1e-13);
  REQUIRE(doubled_up_residual(c.B) < 1e-13);
  REQUIRE(doubled_up_residual(c.C) < 1e-13);
  REQUIRE(doubled_up_residual(c.D) == 0.0);
}

TEST_CASE("time reversal preserves realizability and negates the spectrum", "[model]") {
  std::mt19937_64 rng(104);
  for (int i = 0; i < 25; ++i) {
    const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 3),
                                            1 + static_cast<Eigen::Index>(rng() % 2));
    const StateSpace r = time_reverse(q);
    const PrReport pr = check_physical_realizability(r);
    REQUIRE(pr.passed);
    const std::vector<Complex> ev = eigenvalues_of(q.A.real());
    const std::vector<Complex> evr = eigenvalues_of(r.A.real());
    REQUIRE(match_multisets(evr, negated(ev)) < 1e-10);
  }
}
