#pragma once

/**
 * @file fixtures.hpp
 * @brief Named example systems (the fixture corpus) and seeded random-system
 *        generators for property suites.
 *
 * Every fixture is deterministic and content-named. Classical controls are
 * systems that deliberately fail the quantum realizability constraints;
 * they exercise the negative branches of the structural theorems.
 */

#include "lqs/io.hpp"

#include <random>

namespace lqs {

namespace detail {

inline StateSpace quad_system(const RMat& a, const RMat& b, const RMat& c, const RMat& d) {
  StateSpace ss;
  ss.rep = Rep::kQuadrature;
  ss.n = a.rows() / 2;
  ss.m = b.cols() / 2;
  ss.A = a.cast<Complex>();
  ss.B = b.cast<Complex>();
  ss.C = c.cast<Complex>();
  ss.D = d.cast<Complex>();
  return ss;
}

}  // namespace detail

struct FixtureInfo {
  std::string name;
  std::string description;
};

inline std::vector<FixtureInfo> fixture_list() {
  return {
      {"static_identity",
       "classical control: A = B = C = D = I2; fails realizability with constraint-1 "
       "residual exactly 3"},
      {"classical_two_pole",
       "classical control: A = diag(1,2), rank-1 coupling; invariant zeros {0,2} do not "
       "mirror the eigenvalues {1,2}"},
      {"pure_h_mode",
       "single h pair: controllable-unobservable mode paired with an uncontrollable-"
       "observable partner; admits an exponentially growing output-cancelling input"},
      {"inverted_cavity",
       "single mode with anti-damping A = I2: all eigenvalues in the open right half "
       "plane, so both input observers are stable"},
      {"dpa_k2_e0", "degenerate parametric amplifier, kappa = 2, eps = 0 (passive cavity)"},
      {"dpa_k2_e1", "degenerate parametric amplifier, kappa = 2, eps = 1 (below threshold)"},
      {"dpa_k2_e2",
       "degenerate parametric amplifier, kappa = 2, eps = 2 (at threshold: pole and zero "
       "meet at the origin)"},
      {"dpa_k2_e3",
       "degenerate parametric amplifier, kappa = 2, eps = 3 (above threshold: unstable "
       "mode)"},
      {"dpa_slh", "the kappa = 2, eps = 1 amplifier specified by SLH parameters"},
      {"lossless_oscillator",
       "undamped oscillator coupled through one quadrature only: minimal, poles on the "
       "imaginary axis paired with mirrored transmission zeros"},
      {"decoupled_oscillator",
       "oscillator with no input/output coupling at all: no minimal part, purely "
       "imaginary hidden poles"},
      {"zero_a_coupled",
       "one mode, two channels, couplings tuned so the drift matrix vanishes exactly"},
      {"dpa_plus_oscillator",
       "two modes, one channel: an amplifier plus an uncoupled oscillator specified in "
       "SLH form; the minimal subsystem is the amplifier"},
  };
}

/// @brief Build a fixture by name; throws std::invalid_argument for unknown
/// names.
inline ParsedSystem make_fixture(const std::string& name) {
  const double r2 = std::sqrt(2.0);
  ParsedSystem out;
  if (name == "static_identity") {
    const RMat i2 = RMat::Identity(2, 2);
    out.ss = detail::quad_system(i2, i2, i2, i2);
    return out;
  }
  if (name == "classical_two_pole") {
    RMat a = RMat::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = 2;
    RMat b = RMat::Zero(2, 2);
    b(0, 0) = 1;
    out.ss = detail::quad_system(a, b, b, RMat::Identity(2, 2));
    return out;
  }
  if (name == "pure_h_mode") {
    RMat a = RMat::Zero(2, 2);
    a(0, 0) = -1;
    a(1, 1) = 1;
    RMat b = RMat::Zero(2, 2);
    b(0, 1) = 1;
    out.ss = detail::quad_system(a, b, b, RMat::Identity(2, 2));
    return out;
  }
  if (name == "inverted_cavity") {
    RMat bc = RMat::Zero(2, 2);
    bc(0, 0) = r2;
    bc(1, 1) = -r2;
    out.ss = detail::quad_system(RMat::Identity(2, 2), bc, bc, RMat::Identity(2, 2));
    return out;
  }
  if (name == "dpa_k2_e0") {
    out.ss = dpa_state_space(2.0, 0.0);
    return out;
  }
  if (name == "dpa_k2_e1") {
    out.ss = dpa_state_space(2.0, 1.0);
    return out;
  }
  if (name == "dpa_k2_e2") {
    out.ss = dpa_state_space(2.0, 2.0);
    return out;
  }
  if (name == "dpa_k2_e3") {
    out.ss = dpa_state_space(2.0, 3.0);
    return out;
  }
  if (name == "dpa_slh") {
    out.is_slh = true;
    out.slh.n = 1;
    out.slh.m = 1;
    out.slh.omega_minus = CMat::Zero(1, 1);
    out.slh.omega_plus = CMat::Constant(1, 1, Complex(0.0, 0.5));
    out.slh.c_minus = CMat::Constant(1, 1, Complex(r2, 0.0));
    out.slh.c_plus = CMat::Zero(1, 1);
    return out;
  }
  if (name == "lossless_oscillator") {
    const double w = 1.7, g = 0.4;
    RMat a = RMat::Zero(2, 2);
    a(0, 1) = w;
    a(1, 0) = -w;
    RMat b = RMat::Zero(2, 2);
    b(1, 1) = -std::sqrt(g);
    RMat c = RMat::Zero(2, 2);
    c(0, 0) = std::sqrt(g);
    out.ss = detail::quad_system(a, b, c, RMat::Identity(2, 2));
    return out;
  }
  if (name == "decoupled_oscillator") {
    const double w = 1.7;
    RMat a = RMat::Zero(2, 2);
    a(0, 1) = w;
    a(1, 0) = -w;
    out.ss = detail::quad_system(a, RMat::Zero(2, 2), RMat::Zero(2, 2), RMat::Identity(2, 2));
    return out;
  }
  if (name == "zero_a_coupled") {
    out.is_slh = true;
    out.slh.n = 1;
    out.slh.m = 2;
    out.slh.omega_minus = CMat::Zero(1, 1);
    out.slh.omega_plus = CMat::Zero(1, 1);
    out.slh.c_minus = CMat::Zero(2, 1);
    out.slh.c_minus(0, 0) = 1.0;
    out.slh.c_plus = CMat::Zero(2, 1);
    out.slh.c_plus(1, 0) = 1.0;
    return out;
  }
  if (name == "dpa_plus_oscillator") {
    out.is_slh = true;
    out.slh.n = 2;
    out.slh.m = 1;
    out.slh.omega_minus = CMat::Zero(2, 2);
    out.slh.omega_minus(1, 1) = 1.7;
    out.slh.omega_plus = CMat::Zero(2, 2);
    out.slh.omega_plus(0, 0) = Complex(0.0, 0.5);
    out.slh.c_minus = CMat::Zero(1, 2);
    out.slh.c_minus(0, 0) = r2;
    out.slh.c_plus = CMat::Zero(1, 2);
    return out;
  }
  throw std::invalid_argument("unknown fixture: " + name);
}

/// @brief The classical single-input single-output control with a decoupled
/// state: not expressible as a StateSpace (odd channel count), returned as a
/// raw quadruple. Invariant zeros {0, 2}, eigenvalues {1, 0}.
struct RawQuadruple {
  RMat A, B, C, D;
};

inline RawQuadruple classical_scalar_rhp() {
  RawQuadruple q;
  q.A = RMat::Zero(2, 2);
  q.A(0, 0) = 1;
  q.B = RMat::Zero(2, 1);
  q.B(0, 0) = -1;
  q.C = RMat::Zero(1, 2);
  q.C(0, 0) = 1;
  q.D = RMat::Constant(1, 1, 1.0);
  return q;
}

/// @brief The 2x2 rational matrix control: satisfies the pole/zero mirror yet
/// violates the symplectic transfer identity (a transfer function with the
/// right spectra need not come from a quantum system).
inline CMat rational_mirror_control(Complex s) {
  CMat g = CMat::Zero(2, 2);
  g(0, 0) = (s - 1.0) / (s + 1.0);
  g(0, 1) = 1.0;
  g(1, 1) = (s + 1.0) / (s - 1.0);
  return g;
}

// ---------------------------------------------------------------------------
// Seeded corpus generators for property suites.
// ---------------------------------------------------------------------------

/// @brief Random SLH parameter set: Hermitian omega_minus, symmetric
/// omega_plus, dense couplings. Every system built from it is physically
/// realizable by construction.
inline SlhParams rand_slh(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto cmat = [&](Eigen::Index r, Eigen::Index c) {
    CMat x(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) x(i, j) = Complex(u(rng), u(rng));
    }
    return x;
  };
  SlhParams p;
  p.n = n;
  p.m = m;
  const CMat h = cmat(n, n);
  p.omega_minus = 0.5 * (h + h.adjoint());
  const CMat g = cmat(n, n);
  p.omega_plus = 0.5 * (g + g.transpose());
  p.c_minus = cmat(m, n);
  p.c_plus = cmat(m, n);
  return p;
}

/// @brief Random physically realizable quadrature system.
inline StateSpace rand_pr_quadrature(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  return to_quadrature(build_complex_ss(rand_slh(rng, n, m)));
}

/// @brief Random Hamiltonian drift block J S (S symmetric): realizable with
/// zero coupling, eigenvalues symmetric under negation.
inline RMat rand_hamiltonian_drift(std::mt19937_64& rng, Eigen::Index pairs) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMat s(2 * pairs, 2 * pairs);
  for (Eigen::Index i = 0; i < 2 * pairs; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) s(i, j) = s(j, i) = u(rng);
  }
  return sym_j(pairs) * s;
}

/// @brief Direct sum with fully decoupled Hamiltonian modes (zero B rows and
/// C columns): preserves realizability and creates matched input/output
/// decoupling zeros.
inline StateSpace append_decoupled_modes(const StateSpace& ss, std::mt19937_64& rng,
                                         Eigen::Index extra_pairs) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("append_decoupled_modes: quadrature representation required");
  }
  // The quadrature layout is (q_1..q_N, p_1..p_N), so the direct sum must
  // interleave at the block level rather than append at the matrix corner.
  const Eigen::Index n = ss.n, e = extra_pairs, nn = n + e;
  const CMat drift = rand_hamiltonian_drift(rng, e).cast<Complex>();
  StateSpace out;
  out.rep = Rep::kQuadrature;
  out.n = nn;
  out.m = ss.m;
  out.A = CMat::Zero(2 * nn, 2 * nn);
  out.A.block(0, 0, n, n) = ss.A.block(0, 0, n, n);
  out.A.block(0, nn, n, n) = ss.A.block(0, n, n, n);
  out.A.block(nn, 0, n, n) = ss.A.block(n, 0, n, n);
  out.A.block(nn, nn, n, n) = ss.A.block(n, n, n, n);
  out.A.block(n, n, e, e) = drift.block(0, 0, e, e);
  out.A.block(n, nn + n, e, e) = drift.block(0, e, e, e);
  out.A.block(nn + n, n, e, e) = drift.block(e, 0, e, e);
  out.A.block(nn + n, nn + n, e, e) = drift.block(e, e, e, e);
  out.B = CMat::Zero(2 * nn, 2 * ss.m);
  out.B.topRows(n) = ss.B.topRows(n);
  out.B.middleRows(nn, n) = ss.B.bottomRows(n);
  out.C = CMat::Zero(2 * ss.m, 2 * nn);
  out.C.leftCols(n) = ss.C.leftCols(n);
  out.C.middleCols(nn, n) = ss.C.rightCols(n);
  out.D = ss.D;
  return out;
}

/// @brief Random orthogonal symplectic matrix: the quadrature realification of
/// a Haar-ish random unitary (QR of a complex Gaussian matrix).
inline RMat rand_orth_sympl(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  // normalize the phase of each column for determinism of the construction
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return quadrature_similarity(doubled_up(q, CMat::Zero(n, n))).real();
}

/// @brief Change of quadrature basis x -> T^T x with orthogonal symplectic T:
/// preserves realizability and all spectra.
inline StateSpace conjugate_basis(const StateSpace& ss, const RMat& t) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("conjugate_basis: quadrature representation required");
  }
  StateSpace out = ss;
  const CMat tc = t.cast<Complex>();
  out.A = tc.transpose() * ss.A * tc;
  out.B = tc.transpose() * ss.B;
  out.C = ss.C * tc;
  return out;
}

/// @brief Time-reversal image (A, B, C) -> (JJ A^T JJ, B F, -F C) with
/// F = diag(I_m, -I_m): preserves realizability and negates the spectrum
/// (used to manufacture systems with all eigenvalues in the right half plane).
inline StateSpace time_reverse(const StateSpace& ss) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("time_reverse: quadrature representation required");
  }
  const CMat jn = sym_j_c(ss.n);
  const CMat f = flat_j(ss.m);
  StateSpace out = ss;
  out.A = jn * ss.A.transpose() * jn;
  out.B = ss.B * f;
  out.C = -f * ss.C;
  return out;
}

}  // namespace lqs
