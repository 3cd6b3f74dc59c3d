#pragma once

/**
 * @file matcore.hpp
 * @brief Structured complex matrix algebra for linear quantum systems:
 *        doubled-up matrices, the flat (♭) and sharp (♯) adjoints, the
 *        quadrature change of basis, and the channel interleaving permutation.
 *
 * Conventions used throughout the library:
 *  - A system with k modes (or channels) has doubled dimension 2k.
 *  - J_k   = diag(I_k, -I_k)             ("flat" signature matrix)
 *  - JJ_k  = [[0, I_k], [-I_k, 0]]       (symplectic form)
 *  - Jt_k  = [[0, I_k], [I_k, 0]]        (block swap)
 *  - V_k   = (1/sqrt 2) [[I, I], [-iI, iI]]  (annihilation/creation -> quadrature)
 * These satisfy V_k J_k V_k^dagger = i JJ_k and V_k Jt_k V_k^dagger = J_k.
 */

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace lqs {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Global default tolerance: absolute max-norm thresholds unless stated otherwise.
inline constexpr double kDefaultTol = 1e-9;

/// Imaginary unit as a double-precision complex scalar.
inline const Complex kI{0.0, 1.0};

/// @brief Max-norm (largest absolute entry) of a complex matrix; 0 for empty.
inline double max_abs(const CMat& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// @brief Max-norm of a real matrix; 0 for empty.
inline double max_abs(const RMat& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// @brief Signature matrix J_k = diag(I_k, -I_k) of size 2k x 2k.
inline CMat flat_j(Eigen::Index k) {
  CMat j = CMat::Zero(2 * k, 2 * k);
  j.topLeftCorner(k, k).setIdentity();
  j.bottomRightCorner(k, k) = -CMat::Identity(k, k);
  return j;
}

/// @brief Symplectic form JJ_k = [[0, I_k], [-I_k, 0]] of size 2k x 2k (real).
inline RMat sym_j(Eigen::Index k) {
  RMat j = RMat::Zero(2 * k, 2 * k);
  j.topRightCorner(k, k).setIdentity();
  j.bottomLeftCorner(k, k) = -RMat::Identity(k, k);
  return j;
}

/// @brief Symplectic form as a complex matrix (convenience overload).
inline CMat sym_j_c(Eigen::Index k) { return sym_j(k).cast<Complex>(); }

/// @brief Block swap Jt_k = [[0, I_k], [I_k, 0]] of size 2k x 2k.
inline CMat swap_j(Eigen::Index k) {
  CMat j = CMat::Zero(2 * k, 2 * k);
  j.topRightCorner(k, k).setIdentity();
  j.bottomLeftCorner(k, k).setIdentity();
  return j;
}

/// @brief Unitary quadrature map V_k = (1/sqrt 2) [[I, I], [-iI, iI]], 2k x 2k.
inline CMat quad_v(Eigen::Index k) {
  const double r = 1.0 / std::sqrt(2.0);
  CMat v = CMat::Zero(2 * k, 2 * k);
  v.topLeftCorner(k, k) = r * CMat::Identity(k, k);
  v.topRightCorner(k, k) = r * CMat::Identity(k, k);
  v.bottomLeftCorner(k, k) = -kI * r * CMat::Identity(k, k);
  v.bottomRightCorner(k, k) = kI * r * CMat::Identity(k, k);
  return v;
}

/// @brief Doubled-up matrix Delta(U, V) = [[U, V], [conj(V), conj(U)]].
/// U and V must have identical shapes.
inline CMat doubled_up(const CMat& u, const CMat& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("doubled_up: U and V shapes differ");
  }
  CMat d(2 * u.rows(), 2 * u.cols());
  d << u, v, v.conjugate(), u.conjugate();
  return d;
}

/// @brief Residual of the conjugate-block symmetry that defines doubled-up
/// matrices: for X = [[X11, X12], [X21, X22]] returns
/// max(‖X21 - conj(X12)‖, ‖X22 - conj(X11)‖). Zero iff X is doubled-up.
inline double doubled_up_residual(const CMat& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
    throw std::invalid_argument("doubled_up_residual: dimensions must be even");
  }
  const Eigen::Index r = x.rows() / 2, c = x.cols() / 2;
  const double d1 = max_abs(CMat(x.bottomLeftCorner(r, c) - x.topRightCorner(r, c).conjugate()));
  const double d2 = max_abs(CMat(x.bottomRightCorner(r, c) - x.topLeftCorner(r, c).conjugate()));
  return std::max(d1, d2);
}

/// @brief Flat adjoint X^♭ = J_r X^dagger J_k for X of size 2k x 2r.
inline CMat flat_adjoint(const CMat& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
    throw std::invalid_argument("flat_adjoint: dimensions must be even");
  }
  const Eigen::Index k = x.rows() / 2, r = x.cols() / 2;
  return flat_j(r) * x.adjoint() * flat_j(k);
}

/// @brief Sharp adjoint X^♯ = -JJ_n X^dagger JJ_m for X of size 2m x 2n.
inline CMat sharp_adjoint(const CMat& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
    throw std::invalid_argument("sharp_adjoint: dimensions must be even");
  }
  const Eigen::Index m = x.rows() / 2, n = x.cols() / 2;
  return -sym_j_c(n) * x.adjoint() * sym_j_c(m);
}

/// @brief Two-sided quadrature change of basis V_a X V_b^dagger for X of
/// size 2a x 2b. For doubled-up X the result is real up to roundoff.
inline CMat quadrature_map(const CMat& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
    throw std::invalid_argument("quadrature_map: dimensions must be even");
  }
  const Eigen::Index a = x.rows() / 2, b = x.cols() / 2;
  return quad_v(a) * x * quad_v(b).adjoint();
}

/// @brief Square-matrix similarity V_k X V_k^dagger (common special case).
inline CMat quadrature_similarity(const CMat& x) {
  if (x.rows() != x.cols()) {
    throw std::invalid_argument("quadrature_similarity: matrix must be square");
  }
  return quadrature_map(x);
}

/// @brief Inverse of quadrature_map: V_a^dagger Y V_b recovers the
/// annihilation/creation representation from a quadrature-side matrix.
inline CMat quadrature_unmap(const CMat& y) {
  if (y.rows() % 2 != 0 || y.cols() % 2 != 0) {
    throw std::invalid_argument("quadrature_unmap: dimensions must be even");
  }
  const Eigen::Index a = y.rows() / 2, b = y.cols() / 2;
  return quad_v(a).adjoint() * y * quad_v(b);
}

/// @brief Channel interleaving permutation T of size 2m x 2m whose columns are
/// e_1, e_{m+1}, e_2, e_{m+2}, ...: conjugation Gtilde = T^T G T regroups a
/// quadrature matrix from (all q, all p) ordering into per-channel (q_k, p_k)
/// pairs, and T^T JJ_m T = diag(JJ_1, ..., JJ_1).
inline RMat interleave(Eigen::Index m) {
  RMat t = RMat::Zero(2 * m, 2 * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    t(j, 2 * j) = 1.0;
    t(m + j, 2 * j + 1) = 1.0;
  }
  return t;
}

}  // namespace lqs
