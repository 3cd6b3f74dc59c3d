/**
 * @file test_spectra.cpp
 * @brief Poles, invariant/transmission/decoupling zeros, and the structural
 *        correspondences between them.
 */

#include "lqs/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lqs;

TEST_CASE("invariant zeros mirror the eigenvalues for realizable systems", "[spectra]") {
  std::mt19937_64 rng(201);
  double worst = 0.0;
  for (int i = 0; i < 60; ++i) {
    const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 4),
                                            1 + static_cast<Eigen::Index>(rng() % 2));
    const ZeroPencilResult zp = invariant_zeros_pencil(q);
    REQUIRE(zp.zeros.size() == static_cast<std::size_t>(2 * q.n));
    REQUIRE(zp.n_infinite == 2 * q.m);
    worst = std::max(worst, match_multisets(zp.zeros, negated(poles(q))));
  }
  INFO("worst greedy-pairing residual " << worst);
  REQUIRE(worst < 1e-7);
}

TEST_CASE("pencil route and structural route agree on invariant zeros", "[spectra]") {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int i = 0; i < 60; ++i) {
    const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 4),
                                            1 + static_cast<Eigen::Index>(rng() % 2));
    worst = std::max(worst,
                     match_multisets(invariant_zeros_pencil(q).zeros, invariant_zeros_flat(q)));
  }
  INFO("worst cross-method residual " << worst);
  REQUIRE(worst < 1e-7);
}

TEST_CASE("output and input decoupling zeros mirror on non-minimal systems", "[spectra]") {
  std::mt19937_64 rng(203);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
    q = append_decoupled_modes(q, rng, 1 + static_cast<Eigen::Index>(rng() % 2));
    q = conjugate_basis(q, rand_orth_sympl(rng, q.n));
    const DecouplingZeros dz = decoupling_zeros(q);
    REQUIRE_FALSE(dz.output.empty());
    std::vector<Complex> odz, idz;
    for (const auto& d : dz.output) odz.push_back(d.value);
    for (const auto& d : dz.input) idz.push_back(d.value);
    worst = std::max(worst, match_multisets(odz, negated(idz)));
  }
  INFO("worst decoupling residual " << worst);
  REQUIRE(worst < 1e-7);
}

TEST_CASE("two-pole classical system breaks the mirror correspondence", "[spectra]") {
  const ParsedSystem ps = make_fixture("classical_two_pole");
  const ZeroPencilResult zp = invariant_zeros_pencil(ps.ss);
  REQUIRE(match_multisets(zp.zeros, {Complex(0.0, 0.0), Complex(2.0, 0.0)}) < 1e-10);
  REQUIRE(zp.n_infinite == 2);
  const std::vector<Complex> ev = poles(ps.ss);
  REQUIRE(match_multisets(ev, {Complex(1.0, 0.0), Complex(2.0, 0.0)}) < 1e-12);
  // zeros {0, 2} != -eigenvalues {-1, -2}: the quantum mirror fails here
  REQUIRE(match_multisets(zp.zeros, negated(ev)) > 0.9);
  // both decoupling sets hold the uncontrollable-unobservable eigenvalue 2
  const DecouplingZeros dz = decoupling_zeros(ps.ss);
  REQUIRE(dz.output.size() == 1);
  REQUIRE(dz.input.size() == 1);
  REQUIRE(std::abs(dz.output[0].value - Complex(2.0, 0.0)) < 1e-10);
  REQUIRE(std::abs(dz.input[0].value - Complex(2.0, 0.0)) < 1e-10);
}

TEST_CASE("scalar classical system with right-half-plane dynamics", "[spectra]") {
  const RawQuadruple sys = classical_scalar_rhp();
  const ZeroPencilResult zp = invariant_zeros_pencil_raw(sys.A, sys.B, sys.C, sys.D);
  REQUIRE(match_multisets(zp.zeros, {Complex(0.0, 0.0), Complex(2.0, 0.0)}) < 1e-10);
  const std::vector<Complex> ev = eigenvalues_of(sys.A);
  REQUIRE(match_multisets(ev, {Complex(0.0, 0.0), Complex(1.0, 0.0)}) < 1e-12);
  // the second state is decoupled: its eigenvalue 0 shows up in both sets
  const DecouplingZeros dz = decoupling_zeros_raw(sys.A, sys.B, sys.C);
  REQUIRE(dz.output.size() == 1);
  REQUIRE(std::abs(dz.output[0].value) < 1e-10);
}

TEST_CASE("pure h-mode system has symmetric invariant zeros", "[spectra]") {
  const ParsedSystem ps = make_fixture("pure_h_mode");
  const ZeroPencilResult zp = invariant_zeros_pencil(ps.ss);
  REQUIRE(match_multisets(zp.zeros, {Complex(-1.0, 0.0), Complex(1.0, 0.0)}) < 1e-10);
}

TEST_CASE("transmission zeros come from the minimal subsystem", "[spectra]") {
  const ParsedSystem ps = make_fixture("dpa_plus_oscillator");
  const StateSpace q = ps.to_quadrature_ss();
  const KalmanForm kf = kalman_decompose(q);
  const std::vector<Complex> tz = transmission_zeros(kf);
  // minimal part is the amplifier: zeros at {1/2, 3/2}
  REQUIRE(match_multisets(tz, {Complex(0.5, 0.0), Complex(1.5, 0.0)}) < 1e-10);
  // while raw invariant zeros also carry the decoupled oscillator pair
  const ZeroPencilResult zp = invariant_zeros_pencil(q);
  REQUIRE(zp.zeros.size() == 4);
}

TEST_CASE("imaginary-axis poles pair with reflected transmission zeros", "[spectra]") {
  const ParsedSystem ps = make_fixture("lossless_oscillator");
  const KalmanForm kf = kalman_decompose(ps.ss);
  const ImaginaryPairingReport rep = check_imaginary_axis_pairing(kf);
  REQUIRE(rep.ok);
  REQUIRE(rep.pairs.size() == 2);
  REQUIRE(rep.unmatched_poles.empty());
  const std::vector<Complex> tz = transmission_zeros(kf);
  REQUIRE(match_multisets(tz, {Complex(0.0, 1.7), Complex(0.0, -1.7)}) < 1e-10);
}

TEST_CASE("zero-drift system has a double pole and double zero at the origin", "[spectra]") {
  const ParsedSystem ps = make_fixture("zero_a_coupled");
  const StateSpace q = ps.to_quadrature_ss();
  REQUIRE(max_abs(CMat(q.A)) < 1e-14);
  const ZeroPencilResult zp = invariant_zeros_pencil(q);
  REQUIRE(match_multisets(zp.zeros, {Complex(0.0, 0.0), Complex(0.0, 0.0)}) < 1e-7);
}

TEST_CASE("full correspondence report on a realizable fixture", "[spectra]") {
  const ParsedSystem ps = make_fixture("dpa_plus_oscillator");
  const StateSpace q = ps.to_quadrature_ss();
  const KalmanForm kf = kalman_decompose(q);
  const SpectrumReport rep = verify_correspondences(q, kf, true);
  REQUIRE(rep.eig_zero_residual < 1e-9);
  REQUIRE(rep.method_residual < 1e-9);
  REQUIRE(rep.pole_tzero_residual < 1e-9);
  REQUIRE(rep.decoupling_residual < 1e-9);
  REQUIRE(rep.count_equality);
}

TEST_CASE("correspondence report flags the classical counterexample", "[spectra]") {
  const ParsedSystem ps = make_fixture("classical_two_pole");
  const KalmanForm kf = kalman_decompose(ps.ss);
  const SpectrumReport rep = verify_correspondences(ps.ss, kf, false);
  REQUIRE(rep.eig_zero_residual > 0.9);
}

TEST_CASE("greedy multiset matching penalizes size mismatch", "[spectra]") {
  REQUIRE(std::isinf(match_multisets({Complex(1.0, 0.0)}, {})));
  REQUIRE(match_multisets({Complex(1.0, 0.0), Complex(0.0, 1.0)},
                          {Complex(0.0, 1.0), Complex(1.0, 0.0)}) == 0.0);
}
