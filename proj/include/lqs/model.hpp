#pragma once

/**
 * @file model.hpp
 * @brief State-space models of linear quantum systems: construction from
 *        mode-coupling parameters, complex <-> quadrature conversion,
 *        transfer-function evaluation, and the structural identity checks
 *        (physical realizability, symplectic transfer identity,
 *        doubly-stochastic block identities).
 */

#include "lqs/matcore.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace lqs {

/// Representation tag for a state-space quadruple.
enum class Rep {
  kComplex,     ///< annihilation/creation (doubled-up) coordinates
  kQuadrature,  ///< real position/momentum coordinates
};

/**
 * @brief Physical parameters of an n-mode, m-channel linear quantum system
 *        with identity scattering: the Hamiltonian blocks Omega_- (Hermitian),
 *        Omega_+ (symmetric) and the coupling blocks C_-, C_+ (each m x n).
 */
struct SlhParams {
  Eigen::Index n = 0;  ///< mode count
  Eigen::Index m = 0;  ///< channel count
  CMat omega_minus;    ///< n x n, Hermitian
  CMat omega_plus;     ///< n x n, symmetric
  CMat c_minus;        ///< m x n
  CMat c_plus;         ///< m x n

  /// @brief Residual of the structural requirements (Hermitian/symmetric parts).
  double structure_residual() const {
    const double h = max_abs(CMat(omega_minus - omega_minus.adjoint()));
    const double s = max_abs(CMat(omega_plus - omega_plus.transpose()));
    return std::max(h, s);
  }
};

/// @brief State-space quadruple with a representation tag. For n modes and m
/// channels all four matrices are doubled in size: A is 2n x 2n, B is 2n x 2m,
/// C is 2m x 2n, D is 2m x 2m.
struct StateSpace {
  Rep rep = Rep::kComplex;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  CMat A, B, C, D;
};

/// @brief Report of the physical-realizability check. The two constraints are,
/// in quadrature coordinates,
///   (1)  A JJ_n + JJ_n A^T + B JJ_m B^T = 0
///   (2)  B = JJ_n C^T JJ_m
/// and in complex coordinates the equivalent pair
///   (1)  A + A^♭ + B B^♭ = 0
///   (2)  B = -C^♭ D.
struct PrReport {
  bool passed = false;
  double residual_constraint1 = 0.0;
  double residual_constraint2 = 0.0;
  double tol = kDefaultTol;
};

/// @brief Build the complex (annihilation/creation) state-space model from the
/// physical parameters: C = Delta(C_-, C_+), D = I, B = -C^♭ D and
/// A = -i J_n Delta(Omega_-, Omega_+) - (1/2) C^♭ C.
inline StateSpace build_complex_ss(const SlhParams& p, double tol = 1e-12) {
  if (p.omega_minus.rows() != p.n || p.omega_minus.cols() != p.n ||
      p.omega_plus.rows() != p.n || p.omega_plus.cols() != p.n ||
      p.c_minus.rows() != p.m || p.c_minus.cols() != p.n ||
      p.c_plus.rows() != p.m || p.c_plus.cols() != p.n) {
    throw std::invalid_argument("build_complex_ss: parameter shapes inconsistent with (n, m)");
  }
  const double sr = p.structure_residual();
  if (sr > tol) {
    throw std::invalid_argument("build_complex_ss: Hamiltonian structure residual " +
                                std::to_string(sr) + " exceeds tolerance");
  }
  StateSpace ss;
  ss.rep = Rep::kComplex;
  ss.n = p.n;
  ss.m = p.m;
  const CMat omega = doubled_up(p.omega_minus, p.omega_plus);
  ss.C = doubled_up(p.c_minus, p.c_plus);
  ss.D = CMat::Identity(2 * p.m, 2 * p.m);
  const CMat c_flat = flat_adjoint(ss.C);
  ss.B = -c_flat * ss.D;
  ss.A = -kI * flat_j(p.n) * omega - 0.5 * c_flat * ss.C;
  return ss;
}

/// @brief Convert a complex-representation model to real quadrature
/// coordinates via the unitary V: A -> V_n A V_n^dagger, B -> V_n B V_m^dagger,
/// C -> V_m C V_n^dagger, D -> V_m D V_m^dagger. Doubled-up inputs give real
/// outputs; the imaginary residue is checked against @p tol.
inline StateSpace to_quadrature(const StateSpace& ss, double tol = 1e-10) {
  if (ss.rep != Rep::kComplex) {
    throw std::invalid_argument("to_quadrature: input must be in the complex representation");
  }
  const double dres = std::max(std::max(doubled_up_residual(ss.A), doubled_up_residual(ss.B)),
                               doubled_up_residual(ss.C));
  if (dres > 1e-10) {
    throw std::invalid_argument("to_quadrature: input matrices are not doubled-up");
  }
  StateSpace q;
  q.rep = Rep::kQuadrature;
  q.n = ss.n;
  q.m = ss.m;
  q.A = quadrature_map(ss.A);
  q.B = quadrature_map(ss.B);
  q.C = quadrature_map(ss.C);
  q.D = quadrature_map(ss.D);
  const double ires = std::max(std::max(max_abs(RMat(q.A.imag())), max_abs(RMat(q.B.imag()))),
                               std::max(max_abs(RMat(q.C.imag())), max_abs(RMat(q.D.imag()))));
  if (ires > tol) {
    throw std::runtime_error("to_quadrature: imaginary residue exceeds tolerance");
  }
  q.A = q.A.real().cast<Complex>();
  q.B = q.B.real().cast<Complex>();
  q.C = q.C.real().cast<Complex>();
  q.D = q.D.real().cast<Complex>();
  return q;
}

/// @brief Inverse conversion: quadrature -> complex representation. The result
/// of converting a physically realizable quadrature model is doubled-up.
inline StateSpace to_complex(const StateSpace& ss) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("to_complex: input must be in the quadrature representation");
  }
  StateSpace c;
  c.rep = Rep::kComplex;
  c.n = ss.n;
  c.m = ss.m;
  c.A = quadrature_unmap(ss.A);
  c.B = quadrature_unmap(ss.B);
  c.C = quadrature_unmap(ss.C);
  c.D = quadrature_unmap(ss.D);
  return c;
}

/// @brief Evaluate both physical-realizability constraints; always returns a
/// report (never throws on failure — failing is a legitimate verdict).
inline PrReport check_physical_realizability(const StateSpace& ss, double tol = kDefaultTol) {
  PrReport r;
  r.tol = tol;
  if (ss.rep == Rep::kQuadrature) {
    const CMat jn = sym_j_c(ss.n);
    const CMat jm = sym_j_c(ss.m);
    r.residual_constraint1 =
        max_abs(CMat(ss.A * jn + jn * ss.A.transpose() + ss.B * jm * ss.B.transpose()));
    r.residual_constraint2 = max_abs(CMat(ss.B - jn * ss.C.transpose() * jm));
  } else {
    r.residual_constraint1 =
        max_abs(CMat(ss.A + flat_adjoint(ss.A) + ss.B * flat_adjoint(ss.B)));
    r.residual_constraint2 = max_abs(CMat(ss.B + flat_adjoint(ss.C) * ss.D));
  }
  r.passed = r.residual_constraint1 < tol && r.residual_constraint2 < tol;
  return r;
}

/// @brief Transfer function D + C (sI - A)^{-1} B evaluated by LU solve.
inline CMat transfer_at(const StateSpace& ss, Complex s) {
  const Eigen::Index dn = ss.A.rows();
  const CMat m = s * CMat::Identity(dn, dn) - ss.A;
  return ss.D + ss.C * m.partialPivLu().solve(ss.B);
}

/// @brief Residual of the symplectic transfer identity for a quadrature-side
/// transfer matrix: with G♯(s) := -JJ_m G(-conj(s))^dagger JJ_m, both
/// G♯(s) G(s) = I and G(s) G♯(s) = I must hold. Takes the two evaluated
/// matrices so rational matrices without a realization can be checked too.
inline double symplectic_identity_residual(const CMat& g_at_s, const CMat& g_at_reflected_s) {
  const Eigen::Index m = g_at_s.rows() / 2;
  const CMat id = CMat::Identity(2 * m, 2 * m);
  const CMat jm = sym_j_c(m);
  const CMat sharp = -jm * g_at_reflected_s.adjoint() * jm;
  return std::max(max_abs(CMat(sharp * g_at_s - id)), max_abs(CMat(g_at_s * sharp - id)));
}

/// @brief Symplectic transfer identity residual for a realized system at s.
/// Complex-representation systems are evaluated through their quadrature form.
inline double check_symplectic_identity(const StateSpace& ss, Complex s) {
  const StateSpace& q = ss;
  if (ss.rep == Rep::kComplex) {
    const StateSpace quad = to_quadrature(ss);
    return symplectic_identity_residual(transfer_at(quad, s),
                                        transfer_at(quad, -std::conj(s)));
  }
  return symplectic_identity_residual(transfer_at(q, s), transfer_at(q, -std::conj(s)));
}

/// @brief Doubly-stochastic block identities for a quadrature transfer matrix.
/// After interleaving to per-channel 2x2 blocks Gt_{kj}, each column satisfies
/// sum_k Gt_{kj}♯(s) Gt_{kj}(s) = I_2 and each row sum_j Gt_{kj}(s) Gt_{kj}♯(s) = I_2,
/// where ♯ acts blockwise with JJ_1. Returns the worst residual over all rows
/// and columns.
inline double doubly_stochastic_residual(const CMat& g_at_s, const CMat& g_at_reflected_s) {
  const Eigen::Index m = g_at_s.rows() / 2;
  const CMat t = interleave(m).cast<Complex>();
  const CMat gt = t.transpose() * g_at_s * t;
  const CMat gr = t.transpose() * g_at_reflected_s * t;
  const CMat j1 = sym_j_c(1);
  const CMat id2 = CMat::Identity(2, 2);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {  // column sums
    CMat acc = CMat::Zero(2, 2);
    for (Eigen::Index k = 0; k < m; ++k) {
      const CMat blk = gt.block(2 * k, 2 * j, 2, 2);
      const CMat blk_sharp = -j1 * gr.block(2 * k, 2 * j, 2, 2).adjoint() * j1;
      acc += blk_sharp * blk;
    }
    worst = std::max(worst, max_abs(CMat(acc - id2)));
  }
  for (Eigen::Index k = 0; k < m; ++k) {  // row sums
    CMat acc = CMat::Zero(2, 2);
    for (Eigen::Index j = 0; j < m; ++j) {
      const CMat blk = gt.block(2 * k, 2 * j, 2, 2);
      const CMat blk_sharp = -j1 * gr.block(2 * k, 2 * j, 2, 2).adjoint() * j1;
      acc += blk * blk_sharp;
    }
    worst = std::max(worst, max_abs(CMat(acc - id2)));
  }
  return worst;
}

/// @brief Doubly-stochastic residual for a realized system at s.
inline double check_doubly_stochastic(const StateSpace& ss, Complex s) {
  const StateSpace quad = ss.rep == Rep::kComplex ? to_quadrature(ss) : ss;
  return doubly_stochastic_residual(transfer_at(quad, s), transfer_at(quad, -std::conj(s)));
}

}  // namespace lqs
