#pragma once

/**
 * @file kalman.hpp
 * @brief Quantum Kalman canonical decomposition via an orthogonal staircase:
 *        controllable subspace from the controllability matrix, unobservable
 *        subspace from the observability kernel, intersected and complemented
 *        into the four canonical stages, with the mixed stages paired into the
 *        "h" subsystem. State order after the transform: (q_h, p_h, co, cbar-obar).
 */

#include "lqs/model.hpp"

#include <vector>

namespace lqs {

namespace detail {

/// Rank decision with an ambiguity flag: singular values within a factor of 10
/// of the threshold make the cut ill-determined.
struct RankDecision {
  Eigen::Index rank = 0;
  bool ambiguous = false;
};

inline RankDecision decide_rank(const Eigen::VectorXd& sv, double tol_rel) {
  RankDecision d;
  if (sv.size() == 0 || sv(0) <= 0.0) return d;
  const double cut = tol_rel * sv(0);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++d.rank;
    if (sv(i) > cut / 10.0 && sv(i) < cut * 10.0) d.ambiguous = true;
  }
  return d;
}

/// Orthonormal basis of the column space of M (SVD-based).
inline RMat orth_basis(const RMat& m, double tol_rel, bool* ambiguous = nullptr) {
  if (m.cols() == 0 || m.rows() == 0) return RMat::Zero(m.rows(), 0);
  Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeFullU);
  const RankDecision d = decide_rank(svd.singularValues(), tol_rel);
  if (ambiguous && d.ambiguous) *ambiguous = true;
  return svd.matrixU().leftCols(d.rank);
}

/// Orthonormal basis of the kernel of M.
inline RMat null_basis(const RMat& m, double tol_rel, bool* ambiguous = nullptr) {
  if (m.rows() == 0) return RMat::Identity(m.cols(), m.cols());
  Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeFullV);
  const RankDecision d = decide_rank(svd.singularValues(), tol_rel);
  if (ambiguous && d.ambiguous) *ambiguous = true;
  return svd.matrixV().rightCols(m.cols() - d.rank);
}

/// Basis of span(U1) ∩ span(U2) via canonical correlations (principal angles);
/// U1, U2 must have orthonormal columns.
inline RMat intersect_spans(const RMat& u1, const RMat& u2, double tol, bool* ambiguous = nullptr) {
  if (u1.cols() == 0 || u2.cols() == 0) return RMat::Zero(u1.rows(), 0);
  Eigen::BDCSVD<RMat> svd(RMat(u1.transpose() * u2), Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1.0 - tol) ++k;
    if (ambiguous && sv(i) > 1.0 - 10.0 * tol && sv(i) < 1.0 - tol / 10.0) *ambiguous = true;
  }
  if (k == 0) return RMat::Zero(u1.rows(), 0);
  return orth_basis(RMat(u1 * svd.matrixU().leftCols(k)), tol);
}

/// Orthonormal basis of span(U) ⊖ span(W), assuming span(W) ⊆ span(U).
inline RMat complement_within(const RMat& u, const RMat& w, double tol) {
  if (u.cols() == 0) return u;
  if (w.cols() == 0) return u;
  return orth_basis(RMat(u - w * (w.transpose() * u)), tol);
}

/// Rotate an orthonormal stage basis W so that W^T JJ_n W = JJ_k (canonical
/// (q, p) pair order). Possible iff the stage is symplectically nondegenerate,
/// i.e. S = W^T JJ W is orthogonal. Returns false (leaving W as-is) otherwise.
inline bool symplectic_canon(RMat& w, const RMat& jn) {
  const Eigen::Index mm = w.cols();
  if (mm == 0) return true;
  const RMat s = w.transpose() * jn * w;
  if (max_abs(RMat(s.transpose() * s - RMat::Identity(mm, mm))) > 1e-8) return false;
  const Eigen::Index k = mm / 2;
  RMat used = RMat::Zero(mm, 0);
  RMat qs(mm, k), ps(mm, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    // any unit vector orthogonal to the pairs already chosen
    RMat avail = RMat::Identity(mm, mm);
    if (used.cols() > 0) avail -= used * (used.transpose() * avail);
    const RMat q_basis = orth_basis(avail, 1e-8);
    const Eigen::VectorXd q = q_basis.col(0);
    const Eigen::VectorXd p = s.transpose() * q;
    qs.col(i) = q;
    ps.col(i) = p;
    RMat grown(mm, used.cols() + 2);
    grown << used, q, p;
    used = grown;
  }
  RMat rot(mm, mm);
  rot << qs, ps;
  w = w * rot;
  return true;
}

}  // namespace detail

/// @brief Result of the quantum Kalman decomposition. The transform T is
/// orthogonal with state order (q_h, p_h, co, cbar-obar); sizes are
/// (n3, n3, 2*n1, 2*n2). `symplectic_ok` records whether T additionally maps
/// the symplectic form to the canonical block form diag(JJ_n3, JJ_n1, JJ_n2)
/// (it does for physically realizable inputs); when false only the zero
/// pattern is guaranteed.
struct KalmanForm {
  Eigen::Index n = 0, m = 0;
  Eigen::Index n1 = 0;  ///< co (controllable and observable) mode pairs
  Eigen::Index n2 = 0;  ///< cbar-obar (uncontrollable, unobservable) mode pairs
  Eigen::Index n3 = 0;  ///< h mode pairs (controllable-unobservable q_h with
                        ///< uncontrollable-observable partner p_h)
  RMat T;               ///< orthogonal change of basis (columns = new states)
  RMat At, Bt, Ct, Dt;  ///< transformed quadruple
  double pattern_residual = 0.0;    ///< worst max-norm over required zero blocks
  double h_pairing_residual = 0.0;  ///< ‖A_h11 + A_h22^T‖
  double pr_residual1 = 0.0;        ///< realizability vs. block form, constraint 1
  double pr_residual2 = 0.0;        ///< realizability vs. block form, constraint 2
  bool symplectic_ok = false;
  bool rank_ambiguous = false;

  // Stage index helpers.
  Eigen::Index qh_begin() const { return 0; }
  Eigen::Index ph_begin() const { return n3; }
  Eigen::Index co_begin() const { return 2 * n3; }
  Eigen::Index cb_begin() const { return 2 * n3 + 2 * n1; }

  // Named blocks of the canonical pattern.
  RMat a_h11() const { return At.block(0, 0, n3, n3); }
  RMat a_h12() const { return At.block(0, n3, n3, n3); }
  RMat a_h22() const { return At.block(n3, n3, n3, n3); }
  RMat a_12() const { return At.block(0, co_begin(), n3, 2 * n1); }
  RMat a_13() const { return At.block(0, cb_begin(), n3, 2 * n2); }
  RMat a_21() const { return At.block(co_begin(), n3, 2 * n1, n3); }
  RMat a_31() const { return At.block(cb_begin(), n3, 2 * n2, n3); }
  RMat a_co() const { return At.block(co_begin(), co_begin(), 2 * n1, 2 * n1); }
  RMat a_cobar() const { return At.block(cb_begin(), cb_begin(), 2 * n2, 2 * n2); }
  RMat b_h() const { return Bt.topRows(n3); }
  RMat b_co() const { return Bt.middleRows(co_begin(), 2 * n1); }
  RMat c_h() const { return Ct.middleCols(n3, n3); }
  RMat c_co() const { return Ct.middleCols(co_begin(), 2 * n1); }
};

/// @brief Observability decomposition assembled from the Kalman blocks:
/// observable part (co stage + p_h), unobservable part (q_h + cbar-obar).
struct ObservabilitySplit {
  RMat a_o, b_o, c_o;  ///< observable subsystem (states: co then p_h)
  RMat a_obar;         ///< unobservable dynamics (states: q_h then cbar-obar)
  std::vector<Complex> observable_eigs;
  std::vector<Complex> unobservable_eigs;
};

/// @brief Assumption check: the h-subsystem poles and the cbar-obar poles must
/// all be purely imaginary (|Re| below a scale-aware threshold).
struct AssumptionReport {
  bool holds = true;
  std::vector<Complex> offending;
};

inline std::vector<Complex> eigenvalues_of(const RMat& a) {
  std::vector<Complex> out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<RMat> es(a, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

/// @brief Compute the Kalman canonical decomposition of a quadrature system.
/// @param ss   quadrature-representation state space
/// @param tol  relative rank tolerance for the subspace computations
inline KalmanForm kalman_decompose(const StateSpace& ss, double tol = 1e-8) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("kalman_decompose: quadrature representation required");
  }
  const Eigen::Index n = ss.n, m = ss.m, dn = 2 * n;
  const RMat a = ss.A.real(), b = ss.B.real(), c = ss.C.real();
  const RMat jn = sym_j(n);

  KalmanForm kf;
  kf.n = n;
  kf.m = m;

  // Controllability image and observability kernel from the stacked matrices.
  RMat ctrb(dn, dn * 2 * m), obs(dn * 2 * m, dn);
  {
    RMat blk = b;
    for (Eigen::Index i = 0; i < dn; ++i) {
      ctrb.middleCols(i * 2 * m, 2 * m) = blk;
      blk = a * blk;
    }
    RMat row = c;
    for (Eigen::Index i = 0; i < dn; ++i) {
      obs.middleRows(i * 2 * m, 2 * m) = row;
      row = row * a;
    }
  }
  const RMat r_space = detail::orth_basis(ctrb, tol, &kf.rank_ambiguous);
  const RMat n_space = detail::null_basis(obs, tol, &kf.rank_ambiguous);

  RMat w_qh, w_ph, w_co, w_cb;
  if (r_space.cols() == dn && n_space.cols() == 0) {
    // Minimal system: keep the original basis so the decomposition is the
    // identity and the co blocks coincide with the input matrices exactly.
    w_qh = RMat::Zero(dn, 0);
    w_ph = RMat::Zero(dn, 0);
    w_co = RMat::Identity(dn, dn);
    w_cb = RMat::Zero(dn, 0);
  } else {
    w_qh = detail::intersect_spans(r_space, n_space, tol, &kf.rank_ambiguous);
    w_ph = -jn * w_qh;  // pairing: the symplectic partner of the cō stage
    w_co = detail::complement_within(r_space, w_qh, tol);
    w_cb = detail::complement_within(n_space, w_qh, tol);
  }
  kf.n3 = w_qh.cols();
  kf.n1 = w_co.cols() / 2;
  kf.n2 = w_cb.cols() / 2;

  const bool ok_co = detail::symplectic_canon(w_co, jn);
  const bool ok_cb = detail::symplectic_canon(w_cb, jn);

  kf.T.resize(dn, dn);
  kf.T << w_qh, w_ph, w_co, w_cb;

  kf.At = kf.T.transpose() * a * kf.T;
  kf.Bt = kf.T.transpose() * b;
  kf.Ct = c * kf.T;
  kf.Dt = ss.D.real();

  // Residuals of the canonical zero pattern.
  const Eigen::Index n1 = kf.n1, n2 = kf.n2, n3 = kf.n3;
  const Eigen::Index iq = 0, ip = n3, ico = 2 * n3, icb = 2 * n3 + 2 * n1;
  auto upd = [&](const RMat& blk) {
    if (blk.size() > 0) kf.pattern_residual = std::max(kf.pattern_residual, max_abs(blk));
  };
  upd(kf.At.block(ip, iq, n3, n3));
  upd(kf.At.block(ip, ico, n3, 2 * n1));
  upd(kf.At.block(ip, icb, n3, 2 * n2));
  upd(kf.At.block(ico, iq, 2 * n1, n3));
  upd(kf.At.block(ico, icb, 2 * n1, 2 * n2));
  upd(kf.At.block(icb, iq, 2 * n2, n3));
  upd(kf.At.block(icb, ico, 2 * n2, 2 * n1));
  upd(kf.Bt.middleRows(ip, n3));
  upd(kf.Bt.middleRows(icb, 2 * n2));
  upd(kf.Ct.middleCols(iq, n3));
  upd(kf.Ct.middleCols(icb, 2 * n2));
  if (n3 > 0) {
    kf.h_pairing_residual = max_abs(RMat(kf.a_h11() + kf.a_h22().transpose()));
  }

  // The canonical symplectic form in the new coordinates: diag(JJ_n3, JJ_n1, JJ_n2).
  RMat jbar = RMat::Zero(dn, dn);
  jbar.block(0, 0, 2 * n3, 2 * n3) = sym_j(n3);
  jbar.block(2 * n3, 2 * n3, 2 * n1, 2 * n1) = sym_j(n1);
  jbar.block(icb, icb, 2 * n2, 2 * n2) = sym_j(n2);
  kf.symplectic_ok = ok_co && ok_cb &&
                     max_abs(RMat(kf.T.transpose() * jn * kf.T - jbar)) < 1e-8;
  const RMat jm = sym_j(m);
  kf.pr_residual1 =
      max_abs(RMat(kf.At * jbar + jbar * kf.At.transpose() + kf.Bt * jm * kf.Bt.transpose()));
  kf.pr_residual2 = max_abs(RMat(kf.Bt - jbar * kf.Ct.transpose() * jm));
  return kf;
}

/// @brief Extract the minimal (controllable and observable) subsystem
/// (A_co, B_co, C_co, I) in quadrature form. Throws when there is none.
inline StateSpace co_subsystem(const KalmanForm& kf) {
  if (kf.n1 == 0) {
    throw std::invalid_argument("co_subsystem: system has no controllable-and-observable part");
  }
  StateSpace ss;
  ss.rep = Rep::kQuadrature;
  ss.n = kf.n1;
  ss.m = kf.m;
  ss.A = kf.a_co().cast<Complex>();
  ss.B = kf.b_co().cast<Complex>();
  ss.C = kf.c_co().cast<Complex>();
  ss.D = CMat::Identity(2 * kf.m, 2 * kf.m);
  return ss;
}

/// @brief Assemble the observability decomposition from the Kalman blocks.
inline ObservabilitySplit observability_split(const KalmanForm& kf) {
  const Eigen::Index n1 = kf.n1, n2 = kf.n2, n3 = kf.n3, m2 = 2 * kf.m;
  ObservabilitySplit os;
  os.a_o.setZero(2 * n1 + n3, 2 * n1 + n3);
  os.a_o.topLeftCorner(2 * n1, 2 * n1) = kf.a_co();
  os.a_o.topRightCorner(2 * n1, n3) = kf.a_21();
  os.a_o.bottomRightCorner(n3, n3) = kf.a_h22();
  os.a_obar.setZero(n3 + 2 * n2, n3 + 2 * n2);
  os.a_obar.topLeftCorner(n3, n3) = kf.a_h11();
  os.a_obar.topRightCorner(n3, 2 * n2) = kf.a_13();
  os.a_obar.bottomRightCorner(2 * n2, 2 * n2) = kf.a_cobar();
  os.b_o.setZero(2 * n1 + n3, m2);
  os.b_o.topRows(2 * n1) = kf.b_co();
  os.c_o.resize(m2, 2 * n1 + n3);
  os.c_o << kf.c_co(), kf.c_h();
  os.observable_eigs = eigenvalues_of(os.a_o);
  os.unobservable_eigs = eigenvalues_of(os.a_obar);
  return os;
}

/// @brief Scale-aware "purely imaginary" test used across the library.
inline bool is_purely_imaginary(Complex z, double tol = 1e-8) {
  return std::abs(z.real()) < tol * (1.0 + std::abs(z));
}

/// @brief Check that every h-subsystem pole and every cbar-obar pole is purely
/// imaginary; anything with a nonzero real part is reported as offending.
inline AssumptionReport check_assumption1(const KalmanForm& kf, double tol = 1e-8) {
  AssumptionReport rep;
  auto scan = [&](const RMat& a) {
    for (const Complex& ev : eigenvalues_of(a)) {
      if (!is_purely_imaginary(ev, tol)) rep.offending.push_back(ev);
    }
  };
  scan(kf.a_h11());
  scan(kf.a_h22());
  scan(kf.a_cobar());
  rep.holds = rep.offending.empty();
  return rep;
}

}  // namespace lqs
