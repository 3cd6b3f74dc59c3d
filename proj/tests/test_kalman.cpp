/**
 * @file test_kalman.cpp
 * @brief Canonical decomposition: block pattern, symplectic structure,
 *        transfer preservation, and subsystem extraction.
 */

#include "lqs/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lqs;

namespace {

double transfer_gap(const StateSpace& orig, const KalmanForm& kf, std::uint64_t seed) {
  StateSpace tf;
  tf.rep = Rep::kQuadrature;
  tf.n = kf.n;
  tf.m = kf.m;
  tf.A = kf.At.cast<Complex>();
  tf.B = kf.Bt.cast<Complex>();
  tf.C = kf.Ct.cast<Complex>();
  tf.D = kf.Dt.cast<Complex>();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Complex s(u(rng), u(rng));
    worst = std::max(worst, max_abs(CMat(transfer_at(orig, s) - transfer_at(tf, s))));
  }
  return worst;
}

StateSpace padded_rotated(std::mt19937_64& rng) {
  StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
  q = append_decoupled_modes(q, rng, 1 + static_cast<Eigen::Index>(rng() % 2));
  return conjugate_basis(q, rand_orth_sympl(rng, q.n));
}

}  // namespace

TEST_CASE("minimal systems decompose with the identity transform", "[kalman]") {
  const ParsedSystem ps = make_fixture("dpa_k2_e1");
  const KalmanForm kf = kalman_decompose(ps.ss);
  REQUIRE(kf.n1 == 1);
  REQUIRE(kf.n2 == 0);
  REQUIRE(kf.n3 == 0);
  REQUIRE(max_abs(RMat(kf.T - RMat::Identity(2, 2))) == 0.0);
  REQUIRE(max_abs(RMat(kf.At - ps.ss.A.real())) == 0.0);
  REQUIRE(kf.symplectic_ok);
}

TEST_CASE("pure h-mode system classifies as h only", "[kalman]") {
  const ParsedSystem ps = make_fixture("pure_h_mode");
  const KalmanForm kf = kalman_decompose(ps.ss);
  REQUIRE(kf.n1 == 0);
  REQUIRE(kf.n2 == 0);
  REQUIRE(kf.n3 == 1);
  REQUIRE(kf.pattern_residual < 1e-12);
  REQUIRE(kf.h_pairing_residual < 1e-12);
  // A_h11 = -1 (controllable, unobservable), A_h22 = +1 (its mirror)
  REQUIRE(max_abs(RMat(kf.a_h11() + RMat::Identity(1, 1))) < 1e-12);
  REQUIRE(max_abs(RMat(kf.a_h22() - RMat::Identity(1, 1))) < 1e-12);
  REQUIRE_THROWS_AS(co_subsystem(kf), std::invalid_argument);
}

TEST_CASE("direct sum with a decoupled oscillator separates co and cbar-obar", "[kalman]") {
  const ParsedSystem ps = make_fixture("dpa_plus_oscillator");
  const StateSpace q = ps.to_quadrature_ss();
  const KalmanForm kf = kalman_decompose(q);
  REQUIRE(kf.n1 == 1);
  REQUIRE(kf.n2 == 1);
  REQUIRE(kf.n3 == 0);
  REQUIRE(kf.symplectic_ok);
  REQUIRE(kf.pattern_residual < 1e-12);
  REQUIRE(kf.pr_residual1 < 1e-12);
  REQUIRE(kf.pr_residual2 < 1e-12);
  REQUIRE(transfer_gap(q, kf, 301) < 1e-12);
  // the co block carries the amplifier spectrum {-1/2, -3/2}
  const std::vector<Complex> ev = eigenvalues_of(kf.a_co());
  REQUIRE(match_multisets(ev, {Complex(-0.5, 0.0), Complex(-1.5, 0.0)}) < 1e-12);
  // and the co subsystem reproduces the amplifier transfer function
  const StateSpace co = co_subsystem(kf);
  const StateSpace dpa = dpa_state_space(2.0, 1.0);
  for (const Complex s : {Complex(0.3, 0.4), Complex(-0.2, 1.0)}) {
    REQUIRE(max_abs(CMat(transfer_at(co, s) - transfer_at(dpa, s))) < 1e-12);
  }
}

TEST_CASE("decomposition survives a random symplectic-orthogonal basis change", "[kalman]") {
  std::mt19937_64 rng(302);
  for (int i = 0; i < 20; ++i) {
    const StateSpace q = padded_rotated(rng);
    const KalmanForm kf = kalman_decompose(q);
    INFO("instance " << i << " dims (" << kf.n1 << ", " << kf.n2 << ", " << kf.n3 << ")");
    REQUIRE(kf.symplectic_ok);
    REQUIRE(kf.pattern_residual < 1e-8);
    REQUIRE(kf.pr_residual1 < 1e-8);
    REQUIRE(kf.pr_residual2 < 1e-8);
    REQUIRE(transfer_gap(q, kf, 400 + static_cast<std::uint64_t>(i)) < 1e-9);
    REQUIRE(kf.n2 >= 1);  // the appended modes are uncontrollable-unobservable
  }
}

TEST_CASE("h pairing dimensions agree with the two mixed stages", "[kalman]") {
  // dim(controllable-unobservable) equals dim(uncontrollable-observable):
  // both are n3, read off from rank computations on the stage spans.
  std::mt19937_64 rng(303);
  for (int i = 0; i < 10; ++i) {
    StateSpace base = rand_pr_quadrature(rng, 1, 1);
    StateSpace q = time_reverse(base);  // mix stable/unstable so h can appear
    const KalmanForm kf = kalman_decompose(q);
    // The mixed stages are carried by (q_h, p_h): their spans have equal size
    // by construction; verify the symplectic pairing residual instead of dims.
    if (kf.n3 > 0) {
      REQUIRE(kf.h_pairing_residual < 1e-8);
    }
    REQUIRE(2 * (kf.n1 + kf.n2 + kf.n3) == 2 * kf.n);
  }
}

TEST_CASE("lossless oscillator is minimal with imaginary poles", "[kalman]") {
  const ParsedSystem ps = make_fixture("lossless_oscillator");
  const KalmanForm kf = kalman_decompose(ps.ss);
  REQUIRE(kf.n1 == 1);
  REQUIRE(kf.n3 == 0);
  const std::vector<Complex> ev = eigenvalues_of(kf.a_co());
  REQUIRE(match_multisets(ev, {Complex(0.0, 1.7), Complex(0.0, -1.7)}) < 1e-10);
}

TEST_CASE("decoupled oscillator is entirely cbar-obar", "[kalman]") {
  const ParsedSystem ps = make_fixture("decoupled_oscillator");
  const KalmanForm kf = kalman_decompose(ps.ss);
  REQUIRE(kf.n1 == 0);
  REQUIRE(kf.n2 == 1);
  REQUIRE(kf.n3 == 0);
}

TEST_CASE("observability split collects the expected eigenvalues", "[kalman]") {
  const ParsedSystem ps = make_fixture("pure_h_mode");
  const KalmanForm kf = kalman_decompose(ps.ss);
  const ObservabilitySplit sp = observability_split(kf);
  REQUIRE(sp.observable_eigs.size() == 1);
  REQUIRE(sp.unobservable_eigs.size() == 1);
  REQUIRE(std::abs(sp.observable_eigs[0] - Complex(1.0, 0.0)) < 1e-12);
  REQUIRE(std::abs(sp.unobservable_eigs[0] - Complex(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("assumption on spectral disjointness fails for the h-mode example", "[kalman]") {
  const ParsedSystem ps = make_fixture("pure_h_mode");
  const KalmanForm kf = kalman_decompose(ps.ss);
  const AssumptionReport rep = check_assumption1(kf);
  REQUIRE_FALSE(rep.holds);
  REQUIRE(match_multisets(rep.offending, {Complex(-1.0, 0.0), Complex(1.0, 0.0)}) < 1e-12);
}

TEST_CASE("assumption holds for minimal stable systems", "[kalman]") {
  const ParsedSystem ps = make_fixture("dpa_k2_e1");
  const KalmanForm kf = kalman_decompose(ps.ss);
  REQUIRE(check_assumption1(kf).holds);
}

TEST_CASE("transfer preservation holds across all fixtures", "[kalman]") {
  for (const FixtureInfo& info : fixture_list()) {
    const ParsedSystem ps = make_fixture(info.name);
    const StateSpace q = ps.to_quadrature_ss();
    const KalmanForm kf = kalman_decompose(q);
    INFO(info.name);
    REQUIRE(transfer_gap(q, kf, 305) < 1e-9);
  }
}
