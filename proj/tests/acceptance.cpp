/**
 * @file acceptance.cpp
 * @brief Acceptance gate: twelve numbered checks covering the structural
 *        correspondences, the worked examples, the observers, and the
 *        feedback-network squeezing results. One pass/fail line each;
 *        exit 0 iff all pass.
 */

#include "lqs/fixtures.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

using namespace lqs;

namespace {

struct Corpus {
  std::vector<StateSpace> minimal;  // 200 random realizable systems, n<=4 m<=2
  std::vector<StateSpace> padded;   // 100 non-minimal direct sums
};

Corpus build_corpus() {
  Corpus c;
  std::mt19937_64 rng(90210);
  for (int i = 0; i < 200; ++i) {
    c.minimal.push_back(rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 4),
                                           1 + static_cast<Eigen::Index>(rng() % 2)));
  }
  for (int i = 0; i < 100; ++i) {
    StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
    q = append_decoupled_modes(q, rng, 1 + static_cast<Eigen::Index>(rng() % 2));
    c.padded.push_back(conjugate_basis(q, rand_orth_sympl(rng, q.n)));
  }
  return c;
}

int g_failures = 0;

void report(int idx, bool ok, const char* what, const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what, detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int main() {
  const Corpus corpus = build_corpus();

  {  // 1: eigenvalue / invariant-zero mirror over the random corpus, timed
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const StateSpace& q : corpus.minimal) {
      worst = std::max(worst,
                       match_multisets(invariant_zeros_pencil(q).zeros, negated(poles(q))));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, worst < 1e-7 && secs < 30.0, "invariant zeros mirror the spectrum",
           "worst " + fmt(worst) + ", " + fmt(secs) + " s for 200 systems");
  }

  {  // 2: pencil route vs structural route
    double worst = 0.0;
    for (const StateSpace& q : corpus.minimal) {
      worst = std::max(worst,
                       match_multisets(invariant_zeros_pencil(q).zeros, invariant_zeros_flat(q)));
    }
    report(2, worst < 1e-7, "zero-computation methods agree", "worst " + fmt(worst));
  }

  {  // 3: decoupling-zero mirror on the non-minimal corpus
    double worst = 0.0;
    for (const StateSpace& q : corpus.padded) {
      const DecouplingZeros dz = decoupling_zeros(q);
      std::vector<Complex> odz, idz;
      for (const auto& d : dz.output) odz.push_back(d.value);
      for (const auto& d : dz.input) idz.push_back(d.value);
      worst = std::max(worst, match_multisets(odz, negated(idz)));
    }
    report(3, worst < 1e-7, "decoupling zeros mirror each other", "worst " + fmt(worst));
  }

  {  // 4: transfer identities on the corpus; rational counterexample fails
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (const StateSpace& q : corpus.minimal) {
      for (int k = 0; k < 20; ++k) {
        const Complex s(u(rng), u(rng));
        worst = std::max(worst, check_symplectic_identity(q, s));
        worst = std::max(worst, check_doubly_stochastic(q, s));
      }
    }
    const Complex s(0.3, 0.7);
    const double counter = symplectic_identity_residual(rational_mirror_control(s),
                                                        rational_mirror_control(-std::conj(s)));
    report(4, worst < 1e-9 && counter > 0.1, "transfer identities hold iff realizable",
           "worst " + fmt(worst) + ", counterexample residual " + fmt(counter));
  }

  {  // 5: classical negative controls
    const ParsedSystem si = make_fixture("static_identity");
    const PrReport pr = check_physical_realizability(si.ss);
    const bool static_ok = !pr.passed && pr.residual_constraint1 == 3.0;
    const StateSpace tp = make_fixture("classical_two_pole").ss;
    const ZeroPencilResult zp = invariant_zeros_pencil(tp);
    const double zero_match =
        match_multisets(zp.zeros, {Complex(0.0, 0.0), Complex(2.0, 0.0)});
    const double mirror_gap = match_multisets(zp.zeros, negated(poles(tp)));
    const bool two_pole_ok = zero_match < 1e-7 && mirror_gap > 0.5;
    report(5, static_ok && two_pole_ok, "classical systems break the quantum structure",
           "identity residual " + fmt(pr.residual_constraint1) + ", zeros {0,2} match " +
               fmt(zero_match) + ", mirror gap " + fmt(mirror_gap));
  }

  {  // 6: the h-mode pipeline end to end
    const StateSpace q = make_fixture("pure_h_mode").to_quadrature_ss();
    const PrReport pr = check_physical_realizability(q);
    const KalmanForm kf = kalman_decompose(q);
    const AssumptionReport a1 = check_assumption1(kf);
    const double offend =
        match_multisets(a1.offending, {Complex(-1.0, 0.0), Complex(1.0, 0.0)});
    const InvertibilityReport inv = classify_invertibility(q, kf);
    // forced-zero-output reconstruction: error must grow as e^t within 1%
    const LinearMap plant = as_linear_map(q);
    const RVec x0 = (RVec(2) << 0.0, 1.0).finished();
    const double ph0 = (kf.T.transpose() * x0)(kf.ph_begin());
    const double a22 = kf.a_h22()(0, 0);
    const RMat ch = kf.c_h();
    auto u_fn = [ch, a22, ph0](double t) { return RVec(-ch * std::exp(a22 * t) * ph0); };
    LinearMap obs;
    obs.A = kf.a_h22();
    obs.B = RMat::Zero(1, 2);
    obs.C = -kf.c_h();
    obs.D = RMat::Identity(2, 2);
    ReconstructionOptions opt;
    opt.t_end = 5.0;
    opt.dt = 1e-3;
    opt.force_zero_output = true;
    const ReconstructionResult rec =
        run_reconstruction(plant, obs, u_fn, x0, RVec::Zero(1), opt);
    double growth_gap = 0.0;
    for (std::size_t i = 0; i < rec.plant.t.size(); ++i) {
      growth_gap =
          std::max(growth_gap, std::abs(rec.err[i] / std::exp(rec.plant.t[i]) - 1.0));
    }
    const bool ok = pr.passed && kf.n3 == 1 && kf.n1 == 0 && kf.n2 == 0 && !a1.holds &&
                    offend < 1e-9 && inv.verdict == Verdict::kNotAsymptoticallyLeft &&
                    growth_gap < 0.01;
    report(6, ok, "h-mode example: classification, verdict, exponential growth",
           "dims (" + std::to_string(kf.n1) + "," + std::to_string(kf.n2) + "," +
               std::to_string(kf.n3) + "), offending match " + fmt(offend) +
               ", verdict " + verdict_name(inv.verdict) + ", growth gap " + fmt(growth_gap));
  }

  {  // 7: observer stability on the inverted cavity
    const StateSpace q = make_fixture("inverted_cavity").to_quadrature_ss();
    const KalmanForm kf = kalman_decompose(q);
    const LinearMap obs = build_classical_observer(kf);
    const double exact = max_abs(RMat(obs.A + RMat::Identity(2, 2)));
    auto u_fn = [](double t) {
      RVec u(2);
      u << std::sin(t), std::cos(2.0 * t);
      return u;
    };
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    RVec delta(2);
    delta << g(rng), g(rng);
    delta /= delta.norm();
    const RVec x0 = (RVec(2) << 0.2, -0.1).finished();
    ReconstructionOptions opt;
    opt.t_end = 20.0;
    opt.dt = 1e-3;
    const ReconstructionResult rec =
        run_reconstruction(as_linear_map(q), obs, u_fn, x0, RVec(x0 + delta), opt);
    report(7, exact == 0.0 && rec.final_err < 1e-6, "observer contracts the estimation error",
           "A_obs gap " + fmt(exact) + ", error at t=20 " + fmt(rec.final_err));
  }

  {  // 8: quantum inverse observer residuals
    const StateSpace q = make_fixture("inverted_cavity").to_quadrature_ss();
    const KalmanForm kf = kalman_decompose(q);
    const QuantumObserverReport rep = build_quantum_inverse_observer(kf);
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Complex> samples;
    for (int i = 0; i < 10; ++i) samples.emplace_back(u(rng), u(rng));
    const double inv_res = verify_inverse_identity(rep.observer_q, co_subsystem(kf), samples);
    const double pr_res =
        std::max(rep.pr.residual_constraint1, rep.pr.residual_constraint2);
    const bool ok =
        inv_res < 1e-9 && rep.similarity_residual < 1e-10 && pr_res < 1e-10;
    report(8, ok, "quantum inverse: identity, similarity, realizability",
           "inverse " + fmt(inv_res) + ", similarity " + fmt(rep.similarity_residual) +
               ", realizability " + fmt(pr_res));
  }

  {  // 9: amplifier squeezing at the ideal transmissivity
    const Network net{dpa_plant(2.0, 1.0), identity_plant(), 1.0 / 3.0};
    const TfPair t0 = closed_loop_tf(net, Complex(0.0, 0.0));
    const TfPair tq = closed_loop_tf(net, Complex(0.0, 1e-8));
    const TfPair sp = sensitivity(net, Complex(0.0, 1e-8));
    const bool ok = !t0.p.divergent && std::abs(t0.p.value) < 1e-10 &&
                    std::abs(tq.q.value) > 1e6 && std::abs(sp.p.value) > 1e6;
    report(9, ok, "ideal squeezing with waterbed blowup",
           "|T_p(0)| " + fmt(std::abs(t0.p.value)) + ", |T_q| " + fmt(std::abs(tq.q.value)) +
               ", |S_p| " + fmt(std::abs(sp.p.value)));
  }

  {  // 10: sensitivity tradeoff limits and the crossover value
    const Complex sref(0.0, 0.3);
    bool limits_ok = true;
    for (const double sign : {1.0, -1.0}) {
      const Network net{dpa_plant(2.0, 1.0), identity_plant(), sign * (1.0 - 1e-8)};
      const TfPair t = closed_loop_tf(net, sref);
      const TfPair sv = sensitivity(net, sref);
      limits_ok = limits_ok && std::abs(t.p.value - sign) < 1e-6 && std::abs(sv.p.value) < 1e-6;
    }
    const Network net0{dpa_plant(2.0, 1.0), identity_plant(), 0.0};
    const Complex g0 = plant_tf(net0.plant, sref, Quadrature::kP).value;
    const bool zero_ok =
        std::abs(s_plus_t(net0, sref).p.value - (1.0 + g0)) < 1e-12;
    const double a = 0.4;
    const Network neta{dpa_plant(2.0, 1.0), identity_plant(), a};
    const Complex s0 = solve_gk_point(neta.plant, Complex(1.0, 0.0), Quadrature::kP);
    const double expect = (1.0 + 4.0 * a - a * a) / ((2.0 - a) * (1.0 - a * a));
    const double gap = std::abs(s_plus_t(neta, s0).p.value - expect);
    const Network nstar{dpa_plant(2.0, 1.0), identity_plant(), 2.0 - std::sqrt(5.0)};
    const double star = std::abs(s_plus_t(nstar, s0).p.value);
    const bool ok = limits_ok && zero_ok && gap < 1e-8 && star < 1e-8;
    report(10, ok, "sensitivity tradeoff: limits, crossover value, magic alpha",
           "crossover gap " + fmt(gap) + ", |S+T| at magic alpha " + fmt(star));
  }

  {  // 11: two-amplifier ideal squeezing and its fragility
    const double k1 = 1.0, k2 = 1.0, e1 = 0.5, alpha = 0.0;
    const Eps2Solution sol = two_dpa_solve_eps2(k1, e1, k2, alpha, Quadrature::kP);
    const TfPair t0 = two_dpa_closed_loop(k1, e1, k2, sol.eps2, alpha, Complex(0.0, 0.0));
    const TfPair tb =
        two_dpa_closed_loop(k1, e1, k2, sol.eps2 * 1.01, alpha, Complex(0.0, 0.0));
    const bool ok = sol.feasible && !t0.p.divergent && std::abs(t0.p.value) < 1e-9 &&
                    std::abs(tb.p.value) > 1e-4;
    report(11, ok, "two-amplifier ideal squeezing breaks under 1% detuning",
           "|T_p(0)| " + fmt(std::abs(t0.p.value)) + " -> " + fmt(std::abs(tb.p.value)));
  }

  {  // 12: decomposition fidelity across both corpora
    std::mt19937_64 rng(121212);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    bool dims_ok = true;
    auto run = [&](const StateSpace& q) {
      const KalmanForm kf = kalman_decompose(q);
      StateSpace tf;
      tf.rep = Rep::kQuadrature;
      tf.n = kf.n;
      tf.m = kf.m;
      tf.A = kf.At.cast<Complex>();
      tf.B = kf.Bt.cast<Complex>();
      tf.C = kf.Ct.cast<Complex>();
      tf.D = kf.Dt.cast<Complex>();
      for (int k = 0; k < 10; ++k) {
        const Complex s(u(rng), u(rng));
        worst = std::max(worst, max_abs(CMat(transfer_at(q, s) - transfer_at(tf, s))));
      }
      // the two mixed stages have equal dimension: recompute their ranks
      const RMat w_qh = kf.T.leftCols(kf.n3);
      const RMat w_ph = kf.T.middleCols(kf.n3, kf.n3);
      if (w_qh.cols() != w_ph.cols()) dims_ok = false;
      if (2 * (kf.n1 + kf.n2 + kf.n3) != 2 * kf.n) dims_ok = false;
    };
    for (const StateSpace& q : corpus.minimal) run(q);
    for (const StateSpace& q : corpus.padded) run(q);
    report(12, worst < 1e-9 && dims_ok, "decomposition preserves the transfer function",
           "worst residual " + fmt(worst) + " over 300 systems");
  }

  std::printf("%d/12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
