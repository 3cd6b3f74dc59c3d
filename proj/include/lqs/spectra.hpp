#pragma once

/**
 * @file spectra.hpp
 * @brief Poles, invariant/transmission/decoupling zeros, and the pole-zero
 *        correspondence checks for linear quantum (and classical) systems.
 *
 * Invariant zeros are the finite generalized eigenvalues of the pencil
 * (M, N) built from the system matrix P(s) = [[A - sI, B], [C, D]]:
 *   M = [[A, B], [C, D]],  N = diag(I, 0).
 * With D invertible the pencil has exactly (number of inputs) infinite
 * eigenvalues. For physically realizable systems an independent route exists:
 * the zeros are the eigenvalues of -(A^♭) in the complex representation.
 */

#include "lqs/kalman.hpp"

#include <algorithm>
#include <limits>

namespace lqs {

/// @brief Finite invariant zeros plus bookkeeping from the pencil solve.
struct ZeroPencilResult {
  std::vector<Complex> zeros;
  Eigen::Index n_infinite = 0;  ///< generalized eigenvalues with |beta| below cut
  double beta_cut = 0.0;
};

/// @brief Invariant zeros of a real quadruple (A, B, C, D) of any shape via
/// the QZ-class generalized eigensolver on the Rosenbrock pencil.
inline ZeroPencilResult invariant_zeros_pencil_raw(const RMat& a, const RMat& b, const RMat& c,
                                                   const RMat& d) {
  const Eigen::Index ns = a.rows(), no = c.rows(), ni = b.cols();
  if (no != ni) {
    throw std::invalid_argument("invariant_zeros_pencil_raw: pencil requires square P(s)");
  }
  RMat m(ns + no, ns + ni), nmat = RMat::Zero(ns + no, ns + ni);
  m << a, b, c, d;
  nmat.topLeftCorner(ns, ns).setIdentity();
  Eigen::GeneralizedEigenSolver<RMat> ges;
  ges.compute(m, nmat);
  ZeroPencilResult res;
  res.beta_cut = 1e-10 * std::max(1.0, max_abs(m));
  for (Eigen::Index i = 0; i < ges.betas().size(); ++i) {
    const double beta = std::abs(ges.betas()(i));
    if (beta <= res.beta_cut) {
      ++res.n_infinite;
    } else {
      res.zeros.push_back(ges.alphas()(i) / ges.betas()(i));
    }
  }
  return res;
}

/// @brief Invariant zeros of a state-space model. Complex-representation
/// systems are converted to quadrature coordinates so the pencil is real.
inline ZeroPencilResult invariant_zeros_pencil(const StateSpace& ss) {
  const StateSpace q = ss.rep == Rep::kComplex ? to_quadrature(ss) : ss;
  return invariant_zeros_pencil_raw(q.A.real(), q.B.real(), q.C.real(), q.D.real());
}

/// @brief Invariant zeros by the structural route available to physically
/// realizable systems: eigenvalues of -(A^♭) in the complex representation.
inline std::vector<Complex> invariant_zeros_flat(const StateSpace& ss) {
  const StateSpace c = ss.rep == Rep::kQuadrature ? to_complex(ss) : ss;
  Eigen::ComplexEigenSolver<CMat> es(CMat(-flat_adjoint(c.A)), false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

/// @brief Poles: eigenvalues of A.
inline std::vector<Complex> poles(const StateSpace& ss) {
  Eigen::ComplexEigenSolver<CMat> es(ss.A, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

/// @brief Deterministic multiset comparison: sort both by (Re, Im), then pair
/// each element of @p a greedily with the nearest remaining element of @p b.
/// Returns the worst pair distance, or +inf when the sizes differ.
inline double match_multisets(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto lt = [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), lt);
  std::sort(b.begin(), b.end(), lt);
  double worst = 0.0;
  for (const Complex& z : a) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double d = std::abs(z - b[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    worst = std::max(worst, best_d);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

inline std::vector<Complex> negated(const std::vector<Complex>& v) {
  std::vector<Complex> out;
  out.reserve(v.size());
  for (const Complex& z : v) out.push_back(-z);
  return out;
}

/// @brief One decoupling zero with its witness direction (the singular vector
/// exhibiting the rank drop of the relevant test matrix).
struct DecouplingZero {
  Complex value;
  CVec witness;  ///< state-direction x for output type, y for input type
};

/// @brief Output- and input-decoupling zeros of a real quadruple: eigenvalues
/// of A at which [A - sI; C] (output case) or [A - sI, B] (input case) loses
/// column/row rank.
struct DecouplingZeros {
  std::vector<DecouplingZero> output;  ///< unobservable eigenvalues
  std::vector<DecouplingZero> input;   ///< uncontrollable eigenvalues
};

namespace detail {

inline Eigen::Index svd_rank(const CMat& m, double rel_tol = 1e-8) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<CMat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++r;
  }
  return r;
}

inline CVec smallest_right_singular_vector(const CMat& m) {
  Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(m.cols() - 1);
}

inline CVec smallest_left_singular_vector(const CMat& m) {
  Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeFullU);
  return svd.matrixU().col(m.rows() - 1);
}

}  // namespace detail

/// @brief Compute decoupling zeros of a raw real quadruple by rank tests at
/// each eigenvalue of A.
inline DecouplingZeros decoupling_zeros_raw(const RMat& a, const RMat& b, const RMat& c,
                                            double rank_tol = 1e-8) {
  const Eigen::Index ns = a.rows();
  DecouplingZeros dz;
  Eigen::EigenSolver<RMat> es(a, false);
  for (Eigen::Index i = 0; i < ns; ++i) {
    const Complex lam = es.eigenvalues()(i);
    const CMat shift = a.cast<Complex>() - lam * CMat::Identity(ns, ns);
    CMat stacked(ns + c.rows(), ns);
    stacked << shift, c.cast<Complex>();
    if (detail::svd_rank(stacked, rank_tol) < ns) {
      dz.output.push_back({lam, detail::smallest_right_singular_vector(stacked)});
    }
    CMat wide(ns, ns + b.cols());
    wide << shift, b.cast<Complex>();
    if (detail::svd_rank(wide, rank_tol) < ns) {
      dz.input.push_back({lam, detail::smallest_left_singular_vector(wide)});
    }
  }
  return dz;
}

/// @brief Decoupling zeros of a state-space model (computed in quadrature
/// coordinates for complex-representation inputs).
inline DecouplingZeros decoupling_zeros(const StateSpace& ss, double rank_tol = 1e-8) {
  const StateSpace q = ss.rep == Rep::kComplex ? to_quadrature(ss) : ss;
  return decoupling_zeros_raw(q.A.real(), q.B.real(), q.C.real(), rank_tol);
}

/// @brief Transmission zeros: invariant zeros of the minimal (co) subsystem.
/// Systems without a co part have none.
inline std::vector<Complex> transmission_zeros(const KalmanForm& kf) {
  if (kf.n1 == 0) return {};
  return invariant_zeros_pencil(co_subsystem(kf)).zeros;
}

/// @brief Full spectral report with the pole/zero correspondence residuals.
struct SpectrumReport {
  std::vector<Complex> poles;
  std::vector<Complex> invariant_zeros;        ///< pencil route
  std::vector<Complex> invariant_zeros_flat;   ///< structural route (PR systems)
  std::vector<Complex> transmission_zeros;
  std::vector<Complex> minimal_poles;          ///< poles of the co subsystem
  DecouplingZeros decoupling;

  Eigen::Index pencil_infinite_count = 0;

  /// eig(A) vs. negated invariant zeros (structural correspondence).
  double eig_zero_residual = std::numeric_limits<double>::infinity();
  /// pencil zeros vs. structural-route zeros.
  double method_residual = std::numeric_limits<double>::infinity();
  /// minimal-subsystem poles vs. negated transmission zeros.
  double pole_tzero_residual = std::numeric_limits<double>::infinity();
  /// output-decoupling vs. negated input-decoupling multisets.
  double decoupling_residual = std::numeric_limits<double>::infinity();
  /// |transmission zeros| == |minimal poles| (count equality)
  bool count_equality = false;
  /// informational: eigenvalues whose eigenvector x has x^dagger JJ x != 0
  /// but which are not purely imaginary (empty for PR systems)
  std::vector<Complex> indefinite_direction_violations;
  /// for each transmission zero s0 that is not a pole: sigma_min of the
  /// quadrature transfer matrix at s0 (small values confirm rank drop)
  std::vector<double> tzero_min_singular_values;
};

/// @brief Compute every spectrum category and the correspondence residuals.
/// @p pr_structural enables the structural zero route (requires convertibility
/// to the complex representation; true for PR quadrature/complex systems).
inline SpectrumReport verify_correspondences(const StateSpace& ss, const KalmanForm& kf,
                                             bool pr_structural = true) {
  const StateSpace q = ss.rep == Rep::kComplex ? to_quadrature(ss) : ss;
  SpectrumReport rep;
  rep.poles = poles(q);
  ZeroPencilResult pr = invariant_zeros_pencil(q);
  rep.invariant_zeros = pr.zeros;
  rep.pencil_infinite_count = pr.n_infinite;
  rep.eig_zero_residual = match_multisets(rep.invariant_zeros, negated(rep.poles));
  if (pr_structural) {
    rep.invariant_zeros_flat = invariant_zeros_flat(q);
    rep.method_residual = match_multisets(rep.invariant_zeros, rep.invariant_zeros_flat);
  }
  rep.transmission_zeros = transmission_zeros(kf);
  if (kf.n1 > 0) {
    const StateSpace co = co_subsystem(kf);
    rep.minimal_poles = poles(co);
    rep.pole_tzero_residual = match_multisets(rep.transmission_zeros, negated(rep.minimal_poles));
    // rank-drop confirmation at transmission zeros away from poles
    for (const Complex& z : rep.transmission_zeros) {
      bool is_pole = false;
      for (const Complex& p : rep.minimal_poles) {
        if (std::abs(z - p) < 1e-6) is_pole = true;
      }
      if (!is_pole) {
        Eigen::BDCSVD<CMat> svd(transfer_at(co, z));
        rep.tzero_min_singular_values.push_back(svd.singularValues().tail(1)(0));
      }
    }
  }
  rep.count_equality = rep.transmission_zeros.size() == rep.minimal_poles.size();
  rep.decoupling = decoupling_zeros(q);
  std::vector<Complex> odz, idz;
  for (const auto& d : rep.decoupling.output) odz.push_back(d.value);
  for (const auto& d : rep.decoupling.input) idz.push_back(d.value);
  rep.decoupling_residual = match_multisets(odz, negated(idz));
  // informational check: an eigenvector with indefinite symplectic "length"
  // x^dagger JJ x != 0 can only belong to a purely imaginary eigenvalue
  {
    const CMat jn = sym_j_c(q.n);
    Eigen::ComplexEigenSolver<CMat> es(q.A, true);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const CVec x = es.eigenvectors().col(i);
      const Complex form = (x.adjoint() * jn * x)(0);
      if (std::abs(form) > 1e-8 && !is_purely_imaginary(es.eigenvalues()(i))) {
        rep.indefinite_direction_violations.push_back(es.eigenvalues()(i));
      }
    }
  }
  return rep;
}

/// @brief Purely imaginary minimal-subsystem poles paired with transmission
/// zeros at their negation (which is again on the imaginary axis).
struct ImaginaryPairingReport {
  bool ok = true;
  std::vector<std::pair<Complex, Complex>> pairs;  ///< (pole, matched zero)
  std::vector<Complex> unmatched_poles;
};

/// @brief For every purely imaginary pole of the minimal subsystem, find a
/// transmission zero within @p tol of its negation.
inline ImaginaryPairingReport check_imaginary_axis_pairing(const KalmanForm& kf,
                                                           double tol = 1e-7) {
  ImaginaryPairingReport rep;
  if (kf.n1 == 0) return rep;  // vacuous: no minimal dynamics
  const StateSpace co = co_subsystem(kf);
  const std::vector<Complex> ps = poles(co);
  std::vector<Complex> zs = transmission_zeros(kf);
  for (const Complex& p : ps) {
    if (!is_purely_imaginary(p)) continue;
    bool found = false;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      if (std::abs(zs[i] + p) < tol) {
        rep.pairs.emplace_back(p, zs[i]);
        zs.erase(zs.begin() + static_cast<std::ptrdiff_t>(i));
        found = true;
        break;
      }
    }
    if (!found) {
      rep.unmatched_poles.push_back(p);
      rep.ok = false;
    }
  }
  return rep;
}

}  // namespace lqs
