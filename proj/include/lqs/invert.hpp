#pragma once

/**
 * @file invert.hpp
 * @brief Left-invertibility classification for linear quantum systems, the two
 *        input observers (classical reduced-order and quantum inverse), and
 *        mean-dynamics simulation with input-reconstruction error tracking.
 *
 * Classification semantics (all-pass D = I throughout):
 *  - s_left:      no minimal subsystem at all and every non-minimal pole is
 *                 purely imaginary; the input appears statically in the output
 *                 and is recovered exactly.
 *  - as_left:     an observer reconstructs u(t) with asymptotically vanishing
 *                 error for every initial condition: no h modes, every
 *                 cbar-obar pole purely imaginary, and every invariant zero
 *                 attached to the minimal part lies in the open left half
 *                 plane.
 *  - left_only:   injective input-output map (left invertible) but at least
 *                 one relevant zero is not in the open left half plane, so no
 *                 stable inverse exists.
 *  - not_as_left: a growing input can be cancelled out of the output (h modes
 *                 with non-imaginary poles), defeating asymptotic recovery.
 *  - indeterminate: a rank or spectral decision fell inside its ambiguity
 *                 band; results would not be trustworthy.
 */

#include "lqs/spectra.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

namespace lqs {

enum class Verdict {
  kStronglyLeft,
  kAsymptoticallyLeft,
  kLeftOnly,
  kNotAsymptoticallyLeft,
  kIndeterminate,
};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kStronglyLeft: return "s_left";
    case Verdict::kAsymptoticallyLeft: return "as_left";
    case Verdict::kLeftOnly: return "left_only";
    case Verdict::kNotAsymptoticallyLeft: return "not_as_left";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

/// @brief Everything that went into the verdict, for reporting.
struct InvertibilityReport {
  Verdict verdict = Verdict::kIndeterminate;
  bool has_co = false;         ///< minimal subsystem present (n1 > 0)
  bool has_h = false;          ///< h modes present (n3 > 0)
  bool has_cbar_obar = false;  ///< fully decoupled modes present (n2 > 0)
  AssumptionReport assumption1;
  std::vector<Complex> invariant_zeros;   ///< full-system pencil zeros
  std::vector<Complex> unobservable_eigs;
  std::vector<Complex> criterion_zeros;   ///< invariant zeros minus unobservable eigenvalues
  bool criterion_in_open_lhp = false;
  bool ambiguous = false;
  std::string reason;
};

namespace detail {

/// Remove, for each element of @p drop, the nearest element of @p from
/// (multiset difference with a tolerance for eigenvalue matching noise).
inline std::vector<Complex> remove_matched(std::vector<Complex> from, const std::vector<Complex>& drop,
                                           double tol = 1e-6) {
  for (const Complex& d : drop) {
    std::size_t best = from.size();
    double best_dist = tol * (1.0 + std::abs(d));
    for (std::size_t i = 0; i < from.size(); ++i) {
      const double dist = std::abs(from[i] - d);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < from.size()) from.erase(from.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return from;
}

inline bool near_imaginary_band(Complex z, double tol) {
  const double re = std::abs(z.real()) / (1.0 + std::abs(z));
  return re > tol / 10.0 && re < tol * 10.0;
}

}  // namespace detail

/// @brief Classify left invertibility from a precomputed Kalman form.
inline InvertibilityReport classify_invertibility(const StateSpace& ss, const KalmanForm& kf,
                                                  double tol = 1e-8) {
  InvertibilityReport rep;
  rep.has_co = kf.n1 > 0;
  rep.has_h = kf.n3 > 0;
  rep.has_cbar_obar = kf.n2 > 0;
  rep.assumption1 = check_assumption1(kf, tol);
  rep.invariant_zeros = invariant_zeros_pencil(ss).zeros;
  rep.unobservable_eigs = observability_split(kf).unobservable_eigs;
  rep.criterion_zeros = detail::remove_matched(rep.invariant_zeros, rep.unobservable_eigs);

  rep.ambiguous = kf.rank_ambiguous;
  for (const Complex& z : rep.criterion_zeros) {
    if (detail::near_imaginary_band(z, tol)) rep.ambiguous = true;
  }
  if (rep.ambiguous) {
    rep.verdict = Verdict::kIndeterminate;
    rep.reason = "rank or half-plane decision fell inside its ambiguity band";
    return rep;
  }

  rep.criterion_in_open_lhp = true;
  for (const Complex& z : rep.criterion_zeros) {
    if (z.real() >= -tol * (1.0 + std::abs(z))) rep.criterion_in_open_lhp = false;
  }

  if (!rep.has_co) {
    if (rep.assumption1.holds) {
      rep.verdict = Verdict::kStronglyLeft;
      rep.reason = "no minimal subsystem and all non-minimal poles purely imaginary: "
                   "u is recovered from y exactly";
    } else {
      rep.verdict = Verdict::kNotAsymptoticallyLeft;
      rep.reason = "non-imaginary hidden poles admit a growing input that cancels in the output";
    }
    return rep;
  }

  if (!rep.has_h && rep.assumption1.holds && rep.criterion_in_open_lhp) {
    rep.verdict = Verdict::kAsymptoticallyLeft;
    rep.reason = "no h modes, decoupled poles imaginary, and all minimal-part zeros "
                 "in the open left half plane: a stable inverse exists";
  } else if (rep.assumption1.holds) {
    rep.verdict = Verdict::kLeftOnly;
    rep.reason = rep.has_h ? "h modes present: inputs are recoverable algebraically but "
                             "not asymptotically"
                           : "left invertible, but a zero outside the open left half plane "
                             "rules out a stable inverse";
  } else {
    rep.verdict = Verdict::kNotAsymptoticallyLeft;
    rep.reason = "non-imaginary hidden poles admit a growing input that cancels in the output";
  }
  return rep;
}

/// @brief Classify directly from a quadrature state space.
inline InvertibilityReport classify_invertibility(const StateSpace& ss, double tol = 1e-8) {
  const StateSpace q = ss.rep == Rep::kComplex ? to_quadrature(ss) : ss;
  return classify_invertibility(q, kalman_decompose(q), tol);
}

/// @brief Plain real quadruple used for observers and simulation:
/// state' = A state + B input, output = C state + D input.
struct LinearMap {
  RMat A, B, C, D;
};

/// @brief Reduced-order classical input observer built on the minimal
/// subsystem: xhat' = (A_co - B_co C_co) xhat + B_co y, uhat = -C_co xhat + y.
/// Its error dynamics have state matrix A_co - B_co C_co.
inline LinearMap build_classical_observer(const KalmanForm& kf) {
  const RMat a = kf.a_co(), b = kf.b_co(), c = kf.c_co();
  LinearMap obs;
  obs.A = a - b * c;
  obs.B = b;
  obs.C = -c;
  obs.D = RMat::Identity(2 * kf.m, 2 * kf.m);
  return obs;
}

/// @brief The quantum inverse observer and its certification data.
struct QuantumObserverReport {
  bool hamiltonian_zero = false;    ///< construction prerequisite (A = BC/2)
  double hamiltonian_residual = 0.0;
  StateSpace observer_c;            ///< complex representation
  StateSpace observer_q;            ///< quadrature representation
  double similarity_residual = 0.0; ///< quad(A_obs) vs -F A_co F with F = diag(I, -I)
  PrReport pr;                      ///< the observer is itself physically realizable
};

/// @brief Build the physically realizable inverse system of a zero-Hamiltonian
/// minimal subsystem: C_obs = C_co Jtilde, B_obs = -C_obs^flat, A_obs =
/// B_obs C_obs / 2, D_obs = I. Satisfies P(s) G(s) = I.
inline QuantumObserverReport build_quantum_inverse_observer(const KalmanForm& kf,
                                                            double tol = 1e-9) {
  const StateSpace co_q = co_subsystem(kf);
  const StateSpace co_c = to_complex(co_q);
  QuantumObserverReport rep;
  rep.hamiltonian_residual =
      max_abs(CMat(co_c.A - 0.5 * co_c.B * co_c.C));
  rep.hamiltonian_zero = rep.hamiltonian_residual <= tol * std::max(1.0, max_abs(co_c.A));
  if (!rep.hamiltonian_zero) {
    throw std::invalid_argument(
        "build_quantum_inverse_observer: minimal subsystem has a nonzero Hamiltonian "
        "(A != BC/2); the realizable inverse construction does not apply");
  }
  StateSpace obs;
  obs.rep = Rep::kComplex;
  obs.n = co_c.n;
  obs.m = co_c.m;
  obs.C = co_c.C * swap_j(kf.n1).cast<Complex>();
  obs.B = -flat_adjoint(obs.C);
  obs.A = 0.5 * obs.B * obs.C;
  obs.D = CMat::Identity(2 * kf.m, 2 * kf.m);
  rep.observer_c = obs;
  rep.observer_q = to_quadrature(obs);
  const RMat f = flat_j(kf.n1).real();
  rep.similarity_residual =
      max_abs(CMat(rep.observer_q.A - (-f * co_q.A.real() * f).cast<Complex>()));
  rep.pr = check_physical_realizability(obs);
  return rep;
}

/// @brief Worst deviation of P(s) G(s) from the identity over sample points
/// (points within 1e-6 of a pole of either factor are skipped).
inline double verify_inverse_identity(const StateSpace& inverse, const StateSpace& plant,
                                      std::vector<Complex> samples = {}) {
  if (samples.empty()) {
    samples = {Complex(0.3, 0.7), Complex(-1.1, 0.4), Complex(2.2, -0.5), Complex(0.0, 1.3),
               Complex(1.5, 0.0), Complex(-0.2, -2.1)};
  }
  std::vector<Complex> avoid = poles(plant);
  for (const Complex& p : poles(inverse)) avoid.push_back(p);
  double worst = 0.0;
  const Eigen::Index m2 = plant.D.rows();
  for (const Complex& s : samples) {
    bool near_pole = false;
    for (const Complex& p : avoid) {
      if (std::abs(s - p) < 1e-6) near_pole = true;
    }
    if (near_pole) continue;
    const CMat prod = transfer_at(inverse, s) * transfer_at(plant, s);
    worst = std::max(worst, max_abs(CMat(prod - CMat::Identity(m2, m2))));
  }
  return worst;
}

/// @brief Sampled trajectory of a mean-dynamics simulation.
struct SimResult {
  std::vector<double> t;
  RMat x;  ///< one row per sample
  RMat u;
  RMat y;
  bool step_warning = false;  ///< ||A|| * dt exceeded 0.1
};

/// @brief Fixed-step fourth-order Runge-Kutta integration of
/// x' = A x + B u(t) with y = C x + D u recorded at every step.
inline SimResult simulate_mean(const LinearMap& sys, const std::function<RVec(double)>& u_fn,
                               const RVec& x0, double t_end, double dt = 1e-3) {
  if (dt <= 0.0 || t_end < 0.0) {
    throw std::invalid_argument("simulate_mean: need dt > 0 and t_end >= 0");
  }
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(t_end / dt));
  SimResult res;
  res.step_warning = max_abs(sys.A) * dt > 0.1;
  res.t.resize(static_cast<std::size_t>(steps) + 1);
  res.x.resize(steps + 1, x0.size());
  res.u.resize(steps + 1, sys.B.cols());
  res.y.resize(steps + 1, sys.C.rows());
  RVec x = x0;
  auto deriv = [&](double t, const RVec& xx) -> RVec { return sys.A * xx + sys.B * u_fn(t); };
  for (Eigen::Index i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const RVec u = u_fn(t);
    res.t[static_cast<std::size_t>(i)] = t;
    res.x.row(i) = x.transpose();
    res.u.row(i) = u.transpose();
    res.y.row(i) = (sys.C * x + sys.D * u).transpose();
    if (i == steps) break;
    const RVec k1 = deriv(t, x);
    const RVec k2 = deriv(t + dt / 2, RVec(x + dt / 2 * k1));
    const RVec k3 = deriv(t + dt / 2, RVec(x + dt / 2 * k2));
    const RVec k4 = deriv(t + dt, RVec(x + dt * k3));
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return res;
}

struct ReconstructionOptions {
  double t_end = 20.0;
  double dt = 1e-3;
  /// Feed the observer y = 0 instead of the plant output (used to exhibit
  /// output-cancelling inputs on systems with hidden modes).
  bool force_zero_output = false;
};

/// @brief Joint plant + observer run with reconstruction-error statistics.
struct ReconstructionResult {
  SimResult plant;               ///< x, u, y of the plant
  RMat xhat;                     ///< observer state, one row per sample
  RMat uhat;                     ///< reconstructed input
  std::vector<double> err;       ///< ||uhat - u|| per sample
  double final_err = 0.0;
  double fitted_rate = 0.0;      ///< least-squares slope of log ||err|| on [t_end/2, t_end]
  double expected_rate = 0.0;    ///< max Re eigenvalue of the observer A
  bool rate_ok = false;          ///< fitted within 20% of expected
  bool fit_skipped = false;      ///< too few usable samples (error at rounding floor)
};

/// @brief Integrate plant and observer together (single RK4 loop on the
/// stacked state, so observer stage evaluations see stage-consistent outputs)
/// and fit the reconstruction-error decay (or growth) rate.
inline ReconstructionResult run_reconstruction(const LinearMap& plant, const LinearMap& observer,
                                               const std::function<RVec(double)>& u_fn,
                                               const RVec& x0, const RVec& xhat0,
                                               const ReconstructionOptions& opt = {}) {
  const Eigen::Index np = x0.size(), no = xhat0.size();
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(opt.t_end / opt.dt));
  ReconstructionResult res;
  res.plant.step_warning =
      std::max(max_abs(plant.A), max_abs(observer.A)) * opt.dt > 0.1;
  res.plant.t.resize(static_cast<std::size_t>(steps) + 1);
  res.plant.x.resize(steps + 1, np);
  res.plant.u.resize(steps + 1, plant.B.cols());
  res.plant.y.resize(steps + 1, plant.C.rows());
  res.xhat.resize(steps + 1, no);
  res.uhat.resize(steps + 1, observer.C.rows());
  res.err.resize(static_cast<std::size_t>(steps) + 1);

  RVec z(np + no);
  z << x0, xhat0;
  auto output_of = [&](double t, const RVec& zz) -> RVec {
    if (opt.force_zero_output) return RVec::Zero(plant.C.rows());
    return plant.C * zz.head(np) + plant.D * u_fn(t);
  };
  auto deriv = [&](double t, const RVec& zz) -> RVec {
    RVec dz(np + no);
    dz.head(np) = plant.A * zz.head(np) + plant.B * u_fn(t);
    dz.tail(no) = observer.A * zz.tail(no) + observer.B * output_of(t, zz);
    return dz;
  };
  const double dt = opt.dt;
  for (Eigen::Index i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const RVec u = u_fn(t);
    const RVec y = output_of(t, z);
    const RVec uhat = observer.C * z.tail(no) + observer.D * y;
    res.plant.t[static_cast<std::size_t>(i)] = t;
    res.plant.x.row(i) = z.head(np).transpose();
    res.plant.u.row(i) = u.transpose();
    res.plant.y.row(i) = y.transpose();
    res.xhat.row(i) = z.tail(no).transpose();
    res.uhat.row(i) = uhat.transpose();
    res.err[static_cast<std::size_t>(i)] = (uhat - u).norm();
    if (i == steps) break;
    const RVec k1 = deriv(t, z);
    const RVec k2 = deriv(t + dt / 2, RVec(z + dt / 2 * k1));
    const RVec k3 = deriv(t + dt / 2, RVec(z + dt / 2 * k2));
    const RVec k4 = deriv(t + dt, RVec(z + dt * k3));
    z += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  res.final_err = res.err.back();

  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& ev : eigenvalues_of(observer.A)) best = std::max(best, ev.real());
  res.expected_rate = best;

  // Least-squares line through (t, log err) over the second half of the run,
  // ignoring samples at the floating-point rounding floor. The floor scales
  // with the trajectory magnitude: uhat - u is a difference of quantities of
  // the size of the state, so its absolute error grows with ||x||.
  const double eps = std::numeric_limits<double>::epsilon();
  double sum_t = 0, sum_l = 0, sum_tt = 0, sum_tl = 0;
  Eigen::Index count = 0;
  for (std::size_t i = 0; i < res.err.size(); ++i) {
    if (res.plant.t[i] < opt.t_end / 2) continue;
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    const double scale = std::max({1.0, res.plant.x.row(row).cwiseAbs().maxCoeff(),
                                   res.xhat.row(row).cwiseAbs().maxCoeff()});
    if (res.err[i] < 100.0 * eps * scale) continue;
    const double l = std::log(res.err[i]);
    sum_t += res.plant.t[i];
    sum_l += l;
    sum_tt += res.plant.t[i] * res.plant.t[i];
    sum_tl += res.plant.t[i] * l;
    ++count;
  }
  const double denom = static_cast<double>(count) * sum_tt - sum_t * sum_t;
  if (count < 3 || std::abs(denom) < 1e-12) {
    res.fit_skipped = true;
  } else {
    res.fitted_rate = (static_cast<double>(count) * sum_tl - sum_t * sum_l) / denom;
    res.rate_ok = std::abs(res.fitted_rate - res.expected_rate) <=
                  0.2 * std::max(0.05, std::abs(res.expected_rate));
  }
  return res;
}

/// @brief LinearMap view of a quadrature state space.
inline LinearMap as_linear_map(const StateSpace& ss) {
  if (ss.rep != Rep::kQuadrature) {
    throw std::invalid_argument("as_linear_map: quadrature representation required");
  }
  return {ss.A.real(), ss.B.real(), ss.C.real(), ss.D.real()};
}

}  // namespace lqs
