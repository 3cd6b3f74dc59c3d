#pragma once

/**
 * @file network.hpp
 * @brief Coherent beamsplitter feedback network: diagonal plant/controller
 *        transfer functions, closed-loop and sensitivity functions, the S+T
 *        tradeoff, squeezing ratios, ideal-squeezing parameter solvers, DPA
 *        instances, and frequency sweeps.
 *
 * Conventions: a diagonal single-mode plant has quadrature transfer functions
 *   g_q(s) = (s + i w+ - c) / (s + i w+ + c),
 *   g_p(s) = (s - i w+ - c) / (s - i w+ + c),       c = cq cp / 2,
 * so g_q(s) g_p(-s) = 1. The loop closes through a beamsplitter with
 * transmissivity alpha in (-1, 1):
 *   T_j = (alpha + G_j K_j) / (1 + alpha G_j K_j),
 *   S_j = (1 - alpha^2) G_j K_j / [(1 + alpha G_j K_j)(alpha + G_j K_j)].
 * Ideal squeezing in quadrature j at frequency w means T_j(i w) = 0, which
 * forces |S_j(i w)| to diverge: divergences are first-class values here
 * (sentinel-flagged), never exceptions, because sweeps must traverse them.
 */

#include "lqs/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace lqs {

enum class Quadrature { kQ, kP };

/// @brief Single-mode plant whose transfer matrix is diagonal in the
/// quadratures: pump parameter omega_plus, couplings cq and cp.
struct DiagonalPlant {
  Complex omega_plus{0.0, 0.0};
  double cq = 0.0;
  double cp = 0.0;
  double c() const { return 0.5 * cq * cp; }
};

/// @brief Trivial plant: no coupling, transfer exactly 1 in both quadratures
/// (used as the identity controller K = 1).
inline DiagonalPlant identity_plant() { return DiagonalPlant{}; }

/// @brief Degenerate parametric amplifier as a diagonal plant: pump i eps / 2,
/// couplings sqrt(kappa).
inline DiagonalPlant dpa_plant(double kappa, double eps) {
  if (kappa <= 0.0) throw std::invalid_argument("dpa_plant: kappa must be positive");
  return DiagonalPlant{Complex(0.0, eps / 2.0), std::sqrt(kappa), std::sqrt(kappa)};
}

/// @brief DPA quadrature state space: A = -diag(kappa - eps, kappa + eps)/2,
/// B = -sqrt(kappa) I, C = sqrt(kappa) I, D = I. Physically realizable by
/// construction.
inline StateSpace dpa_state_space(double kappa, double eps) {
  if (kappa <= 0.0) throw std::invalid_argument("dpa_state_space: kappa must be positive");
  StateSpace ss;
  ss.rep = Rep::kQuadrature;
  ss.n = 1;
  ss.m = 1;
  ss.A = CMat::Zero(2, 2);
  ss.A(0, 0) = -0.5 * (kappa - eps);
  ss.A(1, 1) = -0.5 * (kappa + eps);
  ss.B = (-std::sqrt(kappa)) * CMat::Identity(2, 2);
  ss.C = std::sqrt(kappa) * CMat::Identity(2, 2);
  ss.D = CMat::Identity(2, 2);
  return ss;
}

/// @brief A transfer-function value with a divergence sentinel. Divergent
/// values carry the offending factor's name instead of a number.
struct TfValue {
  Complex value{0.0, 0.0};
  bool divergent = false;
  std::string reason;
};

struct TfPair {
  TfValue q, p;
};

namespace detail {

/// Guarded complex division: flags a sentinel instead of dividing by zero.
inline TfValue guarded_div(Complex num, Complex den, const char* what) {
  TfValue v;
  if (std::abs(den) == 0.0) {
    v.divergent = true;
    v.reason = what;
    return v;
  }
  v.value = num / den;
  if (!std::isfinite(v.value.real()) || !std::isfinite(v.value.imag())) {
    v.divergent = true;
    v.reason = what;
  }
  return v;
}

inline Complex i_times(Complex w) { return Complex(-w.imag(), w.real()); }

}  // namespace detail

/// @brief One quadrature of the plant transfer function. Uncoupled plants
/// (cq cp = 0) return exactly 1 for every s.
inline TfValue plant_tf(const DiagonalPlant& p, Complex s, Quadrature which) {
  if (p.c() == 0.0) return TfValue{Complex(1.0, 0.0), false, ""};
  const Complex iw = detail::i_times(p.omega_plus);
  const Complex shift = which == Quadrature::kQ ? s + iw : s - iw;
  return detail::guarded_div(shift - p.c(), shift + p.c(), "plant pole");
}

/// @brief Both quadratures of the plant transfer function.
inline TfPair plant_tf(const DiagonalPlant& p, Complex s) {
  return {plant_tf(p, s, Quadrature::kQ), plant_tf(p, s, Quadrature::kP)};
}

/// @brief Beamsplitter feedback network: the loop carries plant then
/// controller; alpha is the mirror transmissivity, beta = sqrt(1 - alpha^2).
struct Network {
  DiagonalPlant plant;
  DiagonalPlant controller;  ///< identity_plant() for the K = 1 configuration
  double alpha = 0.0;

  double beta() const { return std::sqrt(1.0 - alpha * alpha); }
};

inline void validate(const Network& net) {
  if (!(net.alpha > -1.0 && net.alpha < 1.0)) {
    throw std::invalid_argument("Network: alpha must lie in the open interval (-1, 1)");
  }
}

namespace detail {

/// Loop gain G_j(s) K_j(s) for one quadrature, propagating sentinels.
inline TfValue loop_gain(const Network& net, Complex s, Quadrature which) {
  const TfValue g = plant_tf(net.plant, s, which);
  const TfValue k = plant_tf(net.controller, s, which);
  if (g.divergent) return g;
  if (k.divergent) return k;
  return TfValue{g.value * k.value, false, ""};
}

inline TfValue closed_loop_one(const Network& net, Complex s, Quadrature which) {
  const TfValue gk = loop_gain(net, s, which);
  if (gk.divergent) return gk;
  return guarded_div(net.alpha + gk.value, 1.0 + net.alpha * gk.value, "1 + alpha G K = 0");
}

inline TfValue sensitivity_one(const Network& net, Complex s, Quadrature which) {
  const TfValue gk = loop_gain(net, s, which);
  if (gk.divergent) return gk;
  const Complex d1 = 1.0 + net.alpha * gk.value;
  const Complex d2 = net.alpha + gk.value;
  const double beta2 = 1.0 - net.alpha * net.alpha;
  if (std::abs(d1) == 0.0) return TfValue{Complex(), true, "1 + alpha G K = 0"};
  if (std::abs(d2) == 0.0) return TfValue{Complex(), true, "alpha + G K = 0 (ideal squeezing)"};
  return guarded_div(beta2 * gk.value, d1 * d2, "sensitivity denominator");
}

inline TfValue s_plus_t_one(const Network& net, Complex s, Quadrature which) {
  const TfValue gk = loop_gain(net, s, which);
  if (gk.divergent) return gk;
  const Complex g = gk.value;
  if (g == Complex(1.0, 0.0) || g == Complex(-1.0, 0.0)) {
    return TfValue{Complex(), true, "G K = +/-1 (tradeoff form undefined)"};
  }
  const double a = net.alpha;
  const Complex num = g * g + (1.0 + 2.0 * a - a * a) * g + a * a;
  const Complex den = (1.0 + a * g) * (a + g);
  return guarded_div(num, den, "tradeoff denominator");
}

}  // namespace detail

/// @brief Closed-loop transfer T_j(s) in both quadratures.
inline TfPair closed_loop_tf(const Network& net, Complex s) {
  validate(net);
  return {detail::closed_loop_one(net, s, Quadrature::kQ),
          detail::closed_loop_one(net, s, Quadrature::kP)};
}

/// @brief Sensitivity S_j(s) in both quadratures.
inline TfPair sensitivity(const Network& net, Complex s) {
  validate(net);
  return {detail::sensitivity_one(net, s, Quadrature::kQ),
          detail::sensitivity_one(net, s, Quadrature::kP)};
}

/// @brief The squeezing/sensitivity tradeoff S_j + T_j evaluated through its
/// closed rational form (agrees with sensitivity + closed_loop_tf pointwise).
inline TfPair s_plus_t(const Network& net, Complex s) {
  validate(net);
  return {detail::s_plus_t_one(net, s, Quadrature::kQ),
          detail::s_plus_t_one(net, s, Quadrature::kP)};
}

/// @brief Squeezing ratio |T_j(i omega)|^2 (output/input quadrature variance
/// ratio for vacuum inputs); 0 means ideal squeezing at that frequency.
inline TfValue squeezing_ratio(const Network& net, Quadrature which, double omega) {
  validate(net);
  const TfValue t = detail::closed_loop_one(net, Complex(0.0, omega), which);
  if (t.divergent) return t;
  return TfValue{Complex(std::norm(t.value), 0.0), false, ""};
}

/// @brief Result of solving for the beamsplitter transmissivity that yields
/// ideal squeezing at omega = 0 with K = 1.
struct AlphaSolution {
  bool feasible = false;
  double alpha = 0.0;
  Complex raw{0.0, 0.0};  ///< the unconstrained solution of T_j(0) = 0
  std::string why;        ///< reason when infeasible
};

/// @brief Solve alpha = -G_j(0) so that T_j(0) = 0 with K = 1. Infeasible when
/// the solution is not real or lies outside the open interval (-1, 1): the
/// beamsplitter alone cannot realize ideal squeezing for such a plant.
inline AlphaSolution solve_bs_alpha(const DiagonalPlant& p, Quadrature which) {
  AlphaSolution sol;
  const Complex iw = detail::i_times(p.omega_plus);
  const Complex num = which == Quadrature::kQ ? iw - p.c() : iw + p.c();
  const Complex den = which == Quadrature::kQ ? iw + p.c() : iw - p.c();
  if (std::abs(den) == 0.0) {
    sol.why = "denominator zero (plant has a pole at the origin)";
    return sol;
  }
  sol.raw = -num / den;
  if (std::abs(sol.raw.imag()) > 1e-12 * (1.0 + std::abs(sol.raw))) {
    sol.why = "solution is not real";
    return sol;
  }
  if (std::abs(sol.raw.real()) >= 1.0 - 1e-12) {
    sol.why = "solution on or outside the open interval (-1, 1)";
    return sol;
  }
  sol.feasible = true;
  sol.alpha = sol.raw.real();
  return sol;
}

/// @brief Result of solving for the controller pump that yields ideal
/// squeezing at omega = 0 for a given alpha.
struct PumpSolution {
  bool feasible = false;
  bool near_degenerate = false;  ///< denominator tiny: pump astronomically large
  Complex omega_plus_prime{0.0, 0.0};
  std::string why;
};

/// @brief Solve for the pump parameter of a controller sharing the plant's
/// couplings such that alpha + G_j(0) K_j(0) = 0. The exact-zero denominator
/// (plant already ideal on its own, forcing K(0) = 1) is infeasible; a merely
/// tiny denominator returns the (huge) pump with the near_degenerate flag set.
inline PumpSolution solve_pump(const DiagonalPlant& p, double alpha, Quadrature which) {
  PumpSolution sol;
  if (!(alpha > -1.0 && alpha < 1.0)) {
    sol.why = "alpha outside the open interval (-1, 1)";
    return sol;
  }
  const double cc = p.cq * p.cp;
  const double sg = which == Quadrature::kQ ? 1.0 : -1.0;
  const Complex iw = detail::i_times(p.omega_plus);
  const Complex num = (1.0 + alpha) * cc - sg * 2.0 * (1.0 - alpha) * iw;
  const Complex den = (1.0 - alpha) * cc - sg * 2.0 * (1.0 + alpha) * iw;
  if (den == Complex(0.0, 0.0)) {
    sol.why = "denominator exactly zero (plant already ideal at the origin)";
    return sol;
  }
  sol.omega_plus_prime = Complex(0.0, -sg * cc / 2.0) * num / den;
  sol.near_degenerate = std::abs(den) < 1e-8 * std::max(1.0, std::abs(num));
  sol.feasible = true;
  return sol;
}

/// @brief Pump magnitude of a solo DPA (K = 1) achieving ideal squeezing at
/// omega = 0 in the given quadrature for this alpha:
/// eps = -+ kappa (1 - alpha)/(1 + alpha) (minus for q, plus for p).
inline double solve_dpa_eps(double kappa, double alpha, Quadrature which) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw std::invalid_argument("solve_dpa_eps: alpha must lie in (-1, 1)");
  }
  const double mag = kappa * (1.0 - alpha) / (1.0 + alpha);
  return which == Quadrature::kQ ? -mag : mag;
}

/// @brief Solve G_j(s0) = f for s0 with K = 1 (Mobius inversion of the plant
/// transfer function); used to place a prescribed loop-gain value.
inline Complex solve_gk_point(const DiagonalPlant& p, Complex f, Quadrature which) {
  if (f == Complex(1.0, 0.0)) {
    throw std::invalid_argument("solve_gk_point: f = 1 is the value at infinity");
  }
  const Complex iw = detail::i_times(p.omega_plus);
  const Complex signed_iw = which == Quadrature::kQ ? iw : -iw;
  return (p.c() * (1.0 + f) - signed_iw * (1.0 - f)) / (1.0 - f);
}

/// @brief The two loop-gain values at which S + T vanishes for a given alpha:
/// roots of g^2 + (1 + 2 alpha - alpha^2) g + alpha^2 = 0.
inline std::pair<Complex, Complex> s_plus_t_zero_gk(double alpha) {
  const double a = alpha;
  const Complex disc =
      std::sqrt(Complex((1.0 + 4.0 * a - a * a) * (1.0 - a * a), 0.0));
  const Complex base = Complex(a * a - 2.0 * a - 1.0, 0.0);
  return {(base + disc) / 2.0, (base - disc) / 2.0};
}

/// @brief Two-DPA cascade closed-loop transfer in both quadratures via the
/// closed rational form: with s_i = s -+ eps_i/2 (minus for q) and
/// k_i = kappa_i/2,
///   T = [(1+a)(s1 s2 + k1 k2) - (1-a)(k1 s2 + k2 s1)]
///     / [(1+a)(s1 s2 + k1 k2) + (1-a)(k1 s2 + k2 s1)].
inline TfPair two_dpa_closed_loop(double k1, double e1, double k2, double e2, double alpha,
                                  Complex s) {
  auto one = [&](double sg) -> TfValue {
    const Complex s1 = s - sg * e1 / 2.0, s2 = s - sg * e2 / 2.0;
    const double h1 = k1 / 2.0, h2 = k2 / 2.0;
    const Complex sym = s1 * s2 + h1 * h2;
    const Complex mix = h1 * s2 + h2 * s1;
    return detail::guarded_div((1.0 + alpha) * sym - (1.0 - alpha) * mix,
                               (1.0 + alpha) * sym + (1.0 - alpha) * mix,
                               "two-DPA closed-loop denominator");
  };
  return {one(+1.0), one(-1.0)};
}

/// @brief Two-DPA cascade sensitivity in both quadratures via the closed
/// rational form S = (1 - a^2)(s1^2 - k1^2)(s2^2 - k2^2) / (den * num) with
/// num/den the closed-loop numerator and denominator above.
inline TfPair two_dpa_sensitivity(double k1, double e1, double k2, double e2, double alpha,
                                  Complex s) {
  auto one = [&](double sg) -> TfValue {
    const Complex s1 = s - sg * e1 / 2.0, s2 = s - sg * e2 / 2.0;
    const double h1 = k1 / 2.0, h2 = k2 / 2.0;
    const Complex sym = s1 * s2 + h1 * h2;
    const Complex mix = h1 * s2 + h2 * s1;
    const Complex num = (1.0 + alpha) * sym - (1.0 - alpha) * mix;
    const Complex den = (1.0 + alpha) * sym + (1.0 - alpha) * mix;
    if (std::abs(den) == 0.0) return TfValue{Complex(), true, "two-DPA loop denominator"};
    if (std::abs(num) == 0.0) {
      return TfValue{Complex(), true, "alpha + G K = 0 (ideal squeezing)"};
    }
    return detail::guarded_div(
        (1.0 - alpha * alpha) * (s1 * s1 - h1 * h1) * (s2 * s2 - h2 * h2), den * num,
        "two-DPA sensitivity denominator");
  };
  return {one(+1.0), one(-1.0)};
}

/// @brief Outcome of the two-DPA ideal-squeezing condition check.
struct TwoDpaCheck {
  bool satisfied = false;
  double condition_residual = 0.0;  ///< |k1 e2 + k2 e1 -+ (1+a)/(1-a)(k1 k2 + e1 e2)|
  double t0_abs = 0.0;              ///< |T_j(0)| from the closed form
  bool divergent = false;           ///< T_j(0) hit a sentinel
};

/// @brief Check the two-DPA ideal-squeezing parameter relation
/// k1 e2 + k2 e1 = -+ (1+a)/(1-a) (k1 k2 + e1 e2) (minus for q, plus for p)
/// and cross-validate by evaluating |T_j(0)| through the closed form.
inline TwoDpaCheck two_dpa_ideal_check(double k1, double e1, double k2, double e2, double alpha,
                                       Quadrature which, double tol = 1e-9) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw std::invalid_argument("two_dpa_ideal_check: alpha must lie in (-1, 1)");
  }
  TwoDpaCheck chk;
  const double g = (1.0 + alpha) / (1.0 - alpha);
  const double sg = which == Quadrature::kQ ? -1.0 : 1.0;
  chk.condition_residual = std::abs(k1 * e2 + k2 * e1 - sg * g * (k1 * k2 + e1 * e2));
  const TfPair t0 = two_dpa_closed_loop(k1, e1, k2, e2, alpha, Complex(0.0, 0.0));
  const TfValue& tv = which == Quadrature::kQ ? t0.q : t0.p;
  chk.divergent = tv.divergent;
  chk.t0_abs = tv.divergent ? std::numeric_limits<double>::infinity() : std::abs(tv.value);
  const double scale = std::max({1.0, std::abs(k1 * e2), std::abs(k2 * e1), k1 * k2});
  chk.satisfied = chk.condition_residual <= tol * scale && !chk.divergent && chk.t0_abs <= tol;
  return chk;
}

/// @brief Solve the two-DPA relation for the controller pump eps2 given the
/// other parameters (per quadrature). Returns feasible = false when the
/// relation degenerates (coefficient of eps2 vanishes).
struct Eps2Solution {
  bool feasible = false;
  double eps2 = 0.0;
  std::string why;
};

inline Eps2Solution two_dpa_solve_eps2(double k1, double e1, double k2, double alpha,
                                       Quadrature which) {
  Eps2Solution sol;
  if (!(alpha > -1.0 && alpha < 1.0)) {
    sol.why = "alpha outside the open interval (-1, 1)";
    return sol;
  }
  const double g = (1.0 + alpha) / (1.0 - alpha);
  const double sg = which == Quadrature::kQ ? -1.0 : 1.0;
  // k1 e2 + k2 e1 = sg * g * (k1 k2 + e1 e2)  =>  e2 (k1 - sg g e1) = sg g k1 k2 - k2 e1
  const double denom = k1 - sg * g * e1;
  if (std::abs(denom) < 1e-12 * std::max(1.0, std::abs(sg * g * e1))) {
    sol.why = "relation degenerates: coefficient of eps2 vanishes";
    return sol;
  }
  sol.eps2 = (sg * g * k1 * k2 - k2 * e1) / denom;
  sol.feasible = true;
  return sol;
}

enum class SweepScale { kLinear, kLog };

/// Flag bits for divergent values at a sweep point.
enum SweepFlag : unsigned {
  kFlagTq = 1u << 0,
  kFlagTp = 1u << 1,
  kFlagSq = 1u << 2,
  kFlagSp = 1u << 3,
  kFlagSpTq = 1u << 4,
  kFlagSpTp = 1u << 5,
};

struct SweepPoint {
  double omega = 0.0;
  Complex tq, tp, sq, sp, stq, stp;
  double ratio_q = 0.0, ratio_p = 0.0;
  unsigned flags = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

/// @brief Evaluate T, S, S+T and the squeezing ratios on a frequency grid.
/// Divergences are flagged per point and never abort the sweep.
inline SweepResult sweep(const Network& net, double omega_min, double omega_max,
                         Eigen::Index points, SweepScale scale = SweepScale::kLinear) {
  validate(net);
  if (points < 2) throw std::invalid_argument("sweep: need at least 2 grid points");
  if (scale == SweepScale::kLog && (omega_min <= 0.0 || omega_max <= 0.0)) {
    throw std::invalid_argument("sweep: log scale requires positive frequencies");
  }
  if (omega_max < omega_min) throw std::invalid_argument("sweep: omega_max < omega_min");
  const double inf = std::numeric_limits<double>::infinity();
  SweepResult res;
  res.points.reserve(static_cast<std::size_t>(points));
  for (Eigen::Index i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    SweepPoint pt;
    pt.omega = scale == SweepScale::kLinear
                   ? omega_min + f * (omega_max - omega_min)
                   : omega_min * std::pow(omega_max / omega_min, f);
    const Complex s(0.0, pt.omega);
    const TfPair t = closed_loop_tf(net, s);
    const TfPair sv = sensitivity(net, s);
    const TfPair st = s_plus_t(net, s);
    auto take = [&](const TfValue& v, Complex& out, unsigned flag) {
      if (v.divergent) {
        out = Complex(inf, inf);
        pt.flags |= flag;
      } else {
        out = v.value;
      }
    };
    take(t.q, pt.tq, kFlagTq);
    take(t.p, pt.tp, kFlagTp);
    take(sv.q, pt.sq, kFlagSq);
    take(sv.p, pt.sp, kFlagSp);
    take(st.q, pt.stq, kFlagSpTq);
    take(st.p, pt.stp, kFlagSpTp);
    pt.ratio_q = (pt.flags & kFlagTq) ? inf : std::norm(pt.tq);
    pt.ratio_p = (pt.flags & kFlagTp) ? inf : std::norm(pt.tp);
    res.points.push_back(pt);
  }
  return res;
}

}  // namespace lqs
