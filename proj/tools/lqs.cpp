/**
 * @file lqs.cpp
 * @brief Command-line front end for the linear quantum systems toolkit:
 *        realizability checks, spectral reports, Kalman decomposition,
 *        invertibility verdicts, input observers, mean-dynamics simulation,
 *        beamsplitter-network sweeps, and a seeded self test.
 *
 * Exit codes: 0 = success; 1 = analysis ran but a requested verdict failed
 * (e.g. --expect-pr on a non-realizable system); 2 = input or usage error.
 * All reports are JSON on stdout (or to --output); CSV artifacts go to
 * --output when given, else stdout. Identical inputs and seed produce
 * byte-identical outputs; wall-clock timing is reported on stderr only.
 */

#include "lqs/fixtures.hpp"

#include "CLI11.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace {

using namespace lqs;

constexpr std::uint64_t kDefaultSeed = 20250817ULL;

std::uint64_t resolve_seed(std::uint64_t flag_seed, bool flag_given) {
  if (flag_given) return flag_seed;
  if (const char* env = std::getenv("LQS_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw std::invalid_argument("LQS_SEED must be an unsigned integer");
    }
  }
  return kDefaultSeed;
}

/// Common input options: exactly one of --file / --fixture.
struct SystemInput {
  std::string file;
  std::string fixture;

  ParsedSystem load() const {
    if (!file.empty() && !fixture.empty()) {
      throw std::invalid_argument("give either --file or --fixture, not both");
    }
    if (!file.empty()) return parse_system_file(file);
    if (!fixture.empty()) return make_fixture(fixture);
    throw std::invalid_argument("one of --file or --fixture is required");
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--file", file, "system JSON file");
    cmd->add_option("--fixture", fixture, "named fixture (see `lqs fixtures`)");
  }
};

void emit_report(const Json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(output);
    if (!out) throw std::invalid_argument("cannot write: " + output);
    out << j.dump(2) << "\n";
  }
}

Json real_matrix_json(const RMat& m) { return matrix_to_json(m.cast<Complex>(), true); }

Json pr_json(const PrReport& pr) {
  Json j;
  j["passed"] = pr.passed;
  j["residual_constraint1"] = pr.residual_constraint1;
  j["residual_constraint2"] = pr.residual_constraint2;
  j["tolerance"] = pr.tol;
  return j;
}

std::vector<Complex> seeded_sample_points(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

double transfer_preservation_residual(const StateSpace& orig, const KalmanForm& kf,
                                      std::uint64_t seed) {
  StateSpace tf;
  tf.rep = Rep::kQuadrature;
  tf.n = kf.n;
  tf.m = kf.m;
  tf.A = kf.At.cast<Complex>();
  tf.B = kf.Bt.cast<Complex>();
  tf.C = kf.Ct.cast<Complex>();
  tf.D = kf.Dt.cast<Complex>();
  double worst = 0.0;
  for (const Complex& s : seeded_sample_points(seed, 10)) {
    worst = std::max(worst, max_abs(CMat(transfer_at(orig, s) - transfer_at(tf, s))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// check-pr
// ---------------------------------------------------------------------------

int run_check_pr(const SystemInput& in, double tol, bool expect_pr, std::uint64_t seed,
                 const std::string& output) {
  const ParsedSystem ps = in.load();
  const StateSpace native = ps.is_slh ? build_complex_ss(ps.slh) : ps.ss;
  const PrReport pr = check_physical_realizability(native, tol);
  Json j;
  j["command"] = "check-pr";
  j["seed"] = seed;
  j["system"] = {{"rep", native.rep == Rep::kComplex ? "complex" : "quadrature"},
                 {"n", native.n},
                 {"m", native.m},
                 {"source", ps.is_slh ? "slh" : "state-space"}};
  j["pr"] = pr_json(pr);
  emit_report(j, output);
  return expect_pr && !pr.passed ? 1 : 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int run_spectrum(const SystemInput& in, double tol, std::uint64_t seed,
                 const std::string& output) {
  const ParsedSystem ps = in.load();
  const StateSpace q = ps.to_quadrature_ss();
  const PrReport pr = check_physical_realizability(q);
  const KalmanForm kf = kalman_decompose(q, tol);
  const SpectrumReport rep = verify_correspondences(q, kf, pr.passed);
  const ImaginaryPairingReport pairing = check_imaginary_axis_pairing(kf);
  Json j;
  j["command"] = "spectrum";
  j["seed"] = seed;
  j["rank_tolerance"] = tol;
  j["correspondence_expected"] = pr.passed;
  j["pr"] = pr_json(pr);
  j["poles"] = complex_list_to_json(rep.poles);
  j["invariant_zeros"] = complex_list_to_json(rep.invariant_zeros);
  if (pr.passed) j["invariant_zeros_structural"] = complex_list_to_json(rep.invariant_zeros_flat);
  j["transmission_zeros"] = complex_list_to_json(rep.transmission_zeros);
  j["minimal_poles"] = complex_list_to_json(rep.minimal_poles);
  std::vector<Complex> odz, idz;
  for (const auto& d : rep.decoupling.output) odz.push_back(d.value);
  for (const auto& d : rep.decoupling.input) idz.push_back(d.value);
  j["output_decoupling_zeros"] = complex_list_to_json(odz);
  j["input_decoupling_zeros"] = complex_list_to_json(idz);
  j["pencil_infinite_count"] = rep.pencil_infinite_count;
  j["residuals"] = {{"eig_vs_negated_zeros", rep.eig_zero_residual},
                    {"pencil_vs_structural", pr.passed ? Json(rep.method_residual) : Json()},
                    {"minimal_poles_vs_negated_transmission_zeros",
                     kf.n1 > 0 ? Json(rep.pole_tzero_residual) : Json()},
                    {"decoupling_mirror", rep.decoupling_residual}};
  j["count_equality"] = rep.count_equality;
  Json pj;
  pj["ok"] = pairing.ok;
  Json pairs = Json::array();
  for (const auto& pp : pairing.pairs) {
    pairs.push_back({complex_to_json(pp.first), complex_to_json(pp.second)});
  }
  pj["pairs"] = pairs;
  pj["unmatched_poles"] = complex_list_to_json(pairing.unmatched_poles);
  j["imaginary_axis_pairing"] = pj;
  emit_report(j, output);
  return 0;
}

// ---------------------------------------------------------------------------
// kalman
// ---------------------------------------------------------------------------

int run_kalman(const SystemInput& in, double tol, std::uint64_t seed, const std::string& output) {
  const ParsedSystem ps = in.load();
  const StateSpace q = ps.to_quadrature_ss();
  const PrReport pr = check_physical_realizability(q);
  if (!pr.passed) {
    std::cerr << "lqs kalman: warning: system is not physically realizable; the symplectic "
                 "block structure is not guaranteed\n";
  }
  const KalmanForm kf = kalman_decompose(q, tol);
  Json j;
  j["command"] = "kalman";
  j["seed"] = seed;
  j["rank_tolerance"] = tol;
  j["pr_passed"] = pr.passed;
  j["dims"] = {{"n", kf.n}, {"m", kf.m}, {"n1_co", kf.n1}, {"n2_cbar_obar", kf.n2},
               {"n3_h", kf.n3}};
  j["residuals"] = {{"pattern", kf.pattern_residual},
                    {"h_pairing", kf.h_pairing_residual},
                    {"pr_constraint1", kf.pr_residual1},
                    {"pr_constraint2", kf.pr_residual2},
                    {"transfer_preservation", transfer_preservation_residual(q, kf, seed)}};
  j["symplectic_ok"] = kf.symplectic_ok;
  j["rank_ambiguous"] = kf.rank_ambiguous;
  j["transform"] = real_matrix_json(kf.T);
  j["A"] = real_matrix_json(kf.At);
  j["B"] = real_matrix_json(kf.Bt);
  j["C"] = real_matrix_json(kf.Ct);
  j["D"] = real_matrix_json(kf.Dt);
  j["blocks"] = {{"a_h11", real_matrix_json(kf.a_h11())}, {"a_h12", real_matrix_json(kf.a_h12())},
                 {"a_h22", real_matrix_json(kf.a_h22())}, {"a_co", real_matrix_json(kf.a_co())},
                 {"a_cbar_obar", real_matrix_json(kf.a_cobar())},
                 {"b_h", real_matrix_json(kf.b_h())},     {"b_co", real_matrix_json(kf.b_co())},
                 {"c_h", real_matrix_json(kf.c_h())},     {"c_co", real_matrix_json(kf.c_co())}};
  emit_report(j, output);
  return 0;
}

// ---------------------------------------------------------------------------
// invertibility
// ---------------------------------------------------------------------------

int run_invertibility(const SystemInput& in, double tol, const std::string& expect,
                      std::uint64_t seed, const std::string& output) {
  const ParsedSystem ps = in.load();
  const StateSpace q = ps.to_quadrature_ss();
  const InvertibilityReport rep = classify_invertibility(q, kalman_decompose(q), tol);
  Json j;
  j["command"] = "invertibility";
  j["seed"] = seed;
  j["tolerance"] = tol;
  j["verdict"] = verdict_name(rep.verdict);
  j["reason"] = rep.reason;
  j["flags"] = {{"has_co", rep.has_co},
                {"has_h", rep.has_h},
                {"has_cbar_obar", rep.has_cbar_obar},
                {"assumption1_holds", rep.assumption1.holds},
                {"criterion_in_open_lhp", rep.criterion_in_open_lhp},
                {"ambiguous", rep.ambiguous}};
  j["assumption1_offending"] = complex_list_to_json(rep.assumption1.offending);
  j["invariant_zeros"] = complex_list_to_json(rep.invariant_zeros);
  j["unobservable_eigenvalues"] = complex_list_to_json(rep.unobservable_eigs);
  j["criterion_zeros"] = complex_list_to_json(rep.criterion_zeros);
  emit_report(j, output);
  if (!expect.empty() && expect != verdict_name(rep.verdict)) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// observer
// ---------------------------------------------------------------------------

int run_observer(const SystemInput& in, const std::string& type, std::uint64_t seed,
                 const std::string& output) {
  const ParsedSystem ps = in.load();
  const StateSpace q = ps.to_quadrature_ss();
  const KalmanForm kf = kalman_decompose(q);
  if (kf.n1 == 0) {
    throw std::invalid_argument(
        "system has no controllable-and-observable subsystem: no input observer exists");
  }
  const StateSpace co = co_subsystem(kf);
  Json j;
  j["command"] = "observer";
  j["seed"] = seed;
  j["type"] = type;
  j["co_dims"] = {{"modes", kf.n1}, {"channels", kf.m}};
  auto stability_of = [](const RMat& a) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Complex& ev : eigenvalues_of(a)) worst = std::max(worst, ev.real());
    return worst;
  };
  const std::vector<Complex> samples = seeded_sample_points(seed, 10);
  if (type == "classical") {
    const LinearMap obs = build_classical_observer(kf);
    StateSpace obs_ss;
    obs_ss.rep = Rep::kQuadrature;
    obs_ss.n = kf.n1;
    obs_ss.m = kf.m;
    obs_ss.A = obs.A.cast<Complex>();
    obs_ss.B = obs.B.cast<Complex>();
    obs_ss.C = obs.C.cast<Complex>();
    obs_ss.D = obs.D.cast<Complex>();
    j["A_obs"] = real_matrix_json(obs.A);
    j["B_obs"] = real_matrix_json(obs.B);
    j["C_obs"] = real_matrix_json(obs.C);
    j["D_obs"] = real_matrix_json(obs.D);
    const double st = stability_of(obs.A);
    j["stability"] = st;
    j["hurwitz"] = st < 0.0;
    j["inverse_identity_residual"] = verify_inverse_identity(obs_ss, co, samples);
  } else if (type == "quantum") {
    const QuantumObserverReport rep = build_quantum_inverse_observer(kf);
    j["A_obs"] = real_matrix_json(rep.observer_q.A.real());
    j["B_obs"] = real_matrix_json(rep.observer_q.B.real());
    j["C_obs"] = real_matrix_json(rep.observer_q.C.real());
    j["D_obs"] = real_matrix_json(rep.observer_q.D.real());
    const double st = stability_of(rep.observer_q.A.real());
    j["stability"] = st;
    j["hurwitz"] = st < 0.0;
    j["hamiltonian_residual"] = rep.hamiltonian_residual;
    j["similarity_residual"] = rep.similarity_residual;
    j["observer_pr"] = pr_json(rep.pr);
    j["inverse_identity_residual"] = verify_inverse_identity(rep.observer_q, co, samples);
  } else {
    throw std::invalid_argument("--type must be classical or quantum");
  }
  emit_report(j, output);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  SystemInput in;
  std::string observer = "none";  // none | classical | quantum | naive-h
  std::string input = "sines";    // sines | zero | cancel-h
  std::vector<double> x0, xhat0;
  double t_end = 20.0;
  double dt = 1e-3;
  bool force_zero_output = false;
  std::string output;
};

int run_simulate(const SimulateOpts& opt, std::uint64_t seed) {
  const ParsedSystem ps = opt.in.load();
  const StateSpace q = ps.to_quadrature_ss();
  const LinearMap plant = as_linear_map(q);
  const Eigen::Index dn = 2 * q.n, dm = 2 * q.m;

  RVec x0 = RVec::Zero(dn);
  if (!opt.x0.empty()) {
    if (static_cast<Eigen::Index>(opt.x0.size()) != dn) {
      throw std::invalid_argument("--x0 needs " + std::to_string(dn) + " entries");
    }
    for (Eigen::Index i = 0; i < dn; ++i) x0(i) = opt.x0[static_cast<std::size_t>(i)];
  }

  const KalmanForm kf = kalman_decompose(q);

  // Input signal.
  std::function<RVec(double)> u_fn;
  if (opt.input == "zero") {
    u_fn = [dm](double) { return RVec::Zero(dm); };
  } else if (opt.input == "sines") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.3, 2.0), phase(0.0, 6.28318530717958648);
    std::vector<double> fs, phis;
    for (Eigen::Index i = 0; i < dm; ++i) {
      fs.push_back(freq(rng));
      phis.push_back(phase(rng));
    }
    u_fn = [fs, phis, dm](double t) {
      RVec u(dm);
      for (Eigen::Index i = 0; i < dm; ++i) {
        u(i) = std::sin(fs[static_cast<std::size_t>(i)] * t + phis[static_cast<std::size_t>(i)]);
      }
      return u;
    };
  } else if (opt.input == "cancel-h") {
    if (kf.n3 == 0) {
      throw std::invalid_argument("--input cancel-h requires a system with an h subsystem");
    }
    // The output-cancelling input u(t) = -C_h exp(A_h22 t) p_h(0), built from
    // the h-block initial condition in Kalman coordinates.
    const RVec z0 = kf.T.transpose() * x0;
    const RVec ph0 = z0.segment(kf.ph_begin(), kf.n3);
    const RMat a22 = kf.a_h22();
    const RMat ch = kf.c_h();
    u_fn = [a22, ch, ph0](double t) { return RVec(-ch * (a22 * t).exp() * ph0); };
  } else {
    throw std::invalid_argument("--input must be sines, zero or cancel-h");
  }

  // No observer: plain trajectory.
  if (opt.observer == "none") {
    const SimResult sim = simulate_mean(plant, u_fn, x0, opt.t_end, opt.dt);
    if (sim.step_warning) {
      std::cerr << "lqs simulate: warning: ||A|| * dt > 0.1; consider a smaller --dt\n";
    }
    if (opt.output.empty()) {
      write_trajectory_csv(std::cout, sim);
    } else {
      std::ofstream out(opt.output);
      if (!out) throw std::invalid_argument("cannot write: " + opt.output);
      write_trajectory_csv(out, sim);
      Json j;
      j["command"] = "simulate";
      j["seed"] = seed;
      j["observer"] = "none";
      j["input"] = opt.input;
      j["dt"] = opt.dt;
      j["t_end"] = opt.t_end;
      j["step_warning"] = sim.step_warning;
      j["csv"] = opt.output;
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  }

  // Observer selection.
  LinearMap obs;
  if (opt.observer == "classical" || opt.observer == "quantum") {
    if (kf.n1 == 0) {
      throw std::invalid_argument(
          "system has no controllable-and-observable subsystem: no input observer exists");
    }
    if (opt.observer == "classical") {
      obs = build_classical_observer(kf);
    } else {
      const QuantumObserverReport rep = build_quantum_inverse_observer(kf);
      obs = as_linear_map(rep.observer_q);
    }
  } else if (opt.observer == "naive-h") {
    if (kf.n3 == 0) {
      throw std::invalid_argument("--observer naive-h requires a system with an h subsystem");
    }
    obs.A = kf.a_h22();
    obs.B = RMat::Zero(kf.n3, dm);
    obs.C = -kf.c_h();
    obs.D = RMat::Identity(dm, dm);
  } else {
    throw std::invalid_argument("--observer must be none, classical, quantum or naive-h");
  }

  RVec xhat0 = RVec::Zero(obs.A.rows());
  if (!opt.xhat0.empty()) {
    if (static_cast<Eigen::Index>(opt.xhat0.size()) != obs.A.rows()) {
      throw std::invalid_argument("--xhat0 needs " + std::to_string(obs.A.rows()) + " entries");
    }
    for (Eigen::Index i = 0; i < obs.A.rows(); ++i) {
      xhat0(i) = opt.xhat0[static_cast<std::size_t>(i)];
    }
  }

  ReconstructionOptions ropt;
  ropt.t_end = opt.t_end;
  ropt.dt = opt.dt;
  ropt.force_zero_output = opt.force_zero_output;
  const ReconstructionResult rec = run_reconstruction(plant, obs, u_fn, x0, xhat0, ropt);
  if (rec.plant.step_warning) {
    std::cerr << "lqs simulate: warning: ||A|| * dt > 0.1; consider a smaller --dt\n";
  }
  Json j;
  j["command"] = "simulate";
  j["seed"] = seed;
  j["observer"] = opt.observer;
  j["input"] = opt.input;
  j["dt"] = opt.dt;
  j["t_end"] = opt.t_end;
  j["force_zero_output"] = opt.force_zero_output;
  j["final_err"] = rec.final_err;
  j["fitted_rate"] = rec.fit_skipped ? Json() : Json(rec.fitted_rate);
  j["expected_rate"] = rec.expected_rate;
  j["rate_ok"] = rec.rate_ok;
  j["fit_skipped"] = rec.fit_skipped;
  j["step_warning"] = rec.plant.step_warning;
  if (opt.output.empty()) {
    write_reconstruction_csv(std::cout, rec);
  } else {
    std::ofstream out(opt.output);
    if (!out) throw std::invalid_argument("cannot write: " + opt.output);
    write_reconstruction_csv(out, rec);
    j["csv"] = opt.output;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// network-sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
  double kappa = 0, epsilon = 0, alpha = 0;
  bool alpha_given = false;
  double kappa2 = 0, epsilon2 = 0;
  bool controller2 = false;
  std::string solve_pump_quad;   // "", "q", "p"
  std::string solve_alpha_quad;  // "", "q", "p"
  double wmin = 1e-4, wmax = 1e2;
  Eigen::Index points = 200;
  std::string scale = "log";
  std::string output;
};

int run_network_sweep(const SweepOpts& o, std::uint64_t seed) {
  Network net;
  net.plant = dpa_plant(o.kappa, o.epsilon);
  Json j;
  j["command"] = "network-sweep";
  j["seed"] = seed;
  j["plant"] = {{"kappa", o.kappa}, {"epsilon", o.epsilon}};
  if (o.controller2 && !o.solve_pump_quad.empty()) {
    throw std::invalid_argument("give either --kappa2/--epsilon2 or --solve-pump, not both");
  }
  if (!o.solve_alpha_quad.empty()) {
    const Quadrature qd = o.solve_alpha_quad == "q" ? Quadrature::kQ : Quadrature::kP;
    const AlphaSolution sol = solve_bs_alpha(net.plant, qd);
    if (!sol.feasible) {
      throw std::invalid_argument("solve-alpha infeasible: " + sol.why);
    }
    net.alpha = sol.alpha;
    j["solved_alpha"] = {{"quadrature", o.solve_alpha_quad}, {"alpha", sol.alpha}};
  } else if (o.alpha_given) {
    net.alpha = o.alpha;
  } else {
    throw std::invalid_argument("one of --alpha or --solve-alpha is required");
  }
  if (o.controller2) {
    net.controller = dpa_plant(o.kappa2, o.epsilon2);
    j["controller"] = {{"kappa", o.kappa2}, {"epsilon", o.epsilon2}};
  } else if (!o.solve_pump_quad.empty()) {
    const Quadrature qd = o.solve_pump_quad == "q" ? Quadrature::kQ : Quadrature::kP;
    const PumpSolution sol = solve_pump(net.plant, net.alpha, qd);
    if (!sol.feasible) {
      throw std::invalid_argument("solve-pump infeasible: " + sol.why);
    }
    net.controller = DiagonalPlant{sol.omega_plus_prime, net.plant.cq, net.plant.cp};
    j["controller"] = {{"solved_pump_re", sol.omega_plus_prime.real()},
                       {"solved_pump_im", sol.omega_plus_prime.imag()},
                       {"quadrature", o.solve_pump_quad},
                       {"near_degenerate", sol.near_degenerate}};
  } else {
    net.controller = identity_plant();
    j["controller"] = "identity";
  }
  j["alpha"] = net.alpha;
  const SweepScale sc = o.scale == "log" ? SweepScale::kLog : SweepScale::kLinear;
  if (o.scale != "log" && o.scale != "linear") {
    throw std::invalid_argument("--scale must be linear or log");
  }
  const SweepResult sw = sweep(net, o.wmin, o.wmax, o.points, sc);

  // Summary: minima of the squeezing ratios and divergence bookkeeping.
  double min_q = std::numeric_limits<double>::infinity(), min_p = min_q;
  double arg_q = 0, arg_p = 0;
  int divergences = 0;
  unsigned all_flags = 0;
  for (const SweepPoint& pt : sw.points) {
    if (pt.flags) ++divergences;
    all_flags |= pt.flags;
    if (!(pt.flags & kFlagTq) && pt.ratio_q < min_q) {
      min_q = pt.ratio_q;
      arg_q = pt.omega;
    }
    if (!(pt.flags & kFlagTp) && pt.ratio_p < min_p) {
      min_p = pt.ratio_p;
      arg_p = pt.omega;
    }
  }
  j["grid"] = {{"wmin", o.wmin}, {"wmax", o.wmax}, {"points", o.points}, {"scale", o.scale}};
  j["min_ratio_q"] = {{"omega", arg_q}, {"value", min_q}};
  j["min_ratio_p"] = {{"omega", arg_p}, {"value", min_p}};
  j["divergent_points"] = divergences;
  j["flags_union"] = all_flags;
  if (o.output.empty()) {
    write_sweep_csv(std::cout, sw);
  } else {
    std::ofstream out(o.output);
    if (!out) throw std::invalid_argument("cannot write: " + o.output);
    write_sweep_csv(out, sw);
    j["csv"] = o.output;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// dpa
// ---------------------------------------------------------------------------

int run_dpa(double kappa, double epsilon, const std::string& rep, std::uint64_t seed,
            const std::string& output, const std::string& system_out) {
  const StateSpace ss = dpa_state_space(kappa, epsilon);
  Json j;
  j["command"] = "dpa";
  j["seed"] = seed;
  j["kappa"] = kappa;
  j["epsilon"] = epsilon;
  j["A"] = real_matrix_json(ss.A.real());
  j["pr"] = pr_json(check_physical_realizability(ss));
  j["poles"] = complex_list_to_json(poles(ss));
  j["invariant_zeros"] = complex_list_to_json(invariant_zeros_pencil(ss).zeros);
  for (const char* quad : {"q", "p"}) {
    const Quadrature qd = quad[0] == 'q' ? Quadrature::kQ : Quadrature::kP;
    const AlphaSolution sol = solve_bs_alpha(dpa_plant(kappa, epsilon), qd);
    Json a;
    a["feasible"] = sol.feasible;
    if (sol.feasible) {
      a["alpha"] = sol.alpha;
    } else {
      a["why"] = sol.why;
      a["raw"] = complex_to_json(sol.raw);
    }
    j[std::string("ideal_alpha_") + quad] = a;
  }
  if (!system_out.empty()) {
    Json sys;
    if (rep == "slh") {
      SlhParams p;
      p.n = 1;
      p.m = 1;
      p.omega_minus = CMat::Zero(1, 1);
      p.omega_plus = CMat::Constant(1, 1, Complex(0.0, epsilon / 2.0));
      p.c_minus = CMat::Constant(1, 1, Complex(std::sqrt(kappa), 0.0));
      p.c_plus = CMat::Zero(1, 1);
      sys = system_to_json(p);
    } else if (rep == "quadrature") {
      sys = system_to_json(ss);
    } else {
      throw std::invalid_argument("--rep must be quadrature or slh");
    }
    std::ofstream out(system_out);
    if (!out) throw std::invalid_argument("cannot write: " + system_out);
    out << sys.dump(2) << "\n";
    j["system_file"] = system_out;
  }
  emit_report(j, output);
  return 0;
}

// ---------------------------------------------------------------------------
// fixtures listing
// ---------------------------------------------------------------------------

int run_fixtures(const std::string& output) {
  Json j;
  j["command"] = "fixtures";
  Json arr = Json::array();
  for (const FixtureInfo& info : fixture_list()) {
    arr.push_back({{"name", info.name}, {"description", info.description}});
  }
  j["fixtures"] = arr;
  emit_report(j, output);
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool passed;
  double worst;
};

int run_selftest(std::uint64_t seed) {
  std::vector<SuiteResult> suites;
  auto record = [&](const std::string& name, bool ok, double worst) {
    suites.push_back({name, ok, worst});
  };

  {  // realizability of randomly generated systems, both representations
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const SlhParams p = rand_slh(rng, 1 + static_cast<Eigen::Index>(rng() % 3),
                                   1 + static_cast<Eigen::Index>(rng() % 2));
      const StateSpace c = build_complex_ss(p);
      const PrReport prc = check_physical_realizability(c);
      const PrReport prq = check_physical_realizability(to_quadrature(c));
      worst = std::max({worst, prc.residual_constraint1, prc.residual_constraint2,
                        prq.residual_constraint1, prq.residual_constraint2});
    }
    record("realizability-random-builds", worst < 1e-9, worst);
  }
  {  // eigenvalue / invariant-zero mirror and the two zero routes
    std::mt19937_64 rng(seed + 1);
    double worst_mirror = 0.0, worst_methods = 0.0;
    for (int i = 0; i < 40; ++i) {
      const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 3),
                                              1 + static_cast<Eigen::Index>(rng() % 2));
      const ZeroPencilResult zp = invariant_zeros_pencil(q);
      worst_mirror = std::max(worst_mirror, match_multisets(zp.zeros, negated(poles(q))));
      worst_methods = std::max(worst_methods, match_multisets(zp.zeros, invariant_zeros_flat(q)));
    }
    record("pole-zero-mirror", worst_mirror < 1e-7, worst_mirror);
    record("zero-method-crosscheck", worst_methods < 1e-7, worst_methods);
  }
  {  // decoupling-zero mirror on padded systems
    std::mt19937_64 rng(seed + 2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
      q = append_decoupled_modes(q, rng, 1);
      q = conjugate_basis(q, rand_orth_sympl(rng, q.n));
      const DecouplingZeros dz = decoupling_zeros(q);
      std::vector<Complex> odz, idz;
      for (const auto& d : dz.output) odz.push_back(d.value);
      for (const auto& d : dz.input) idz.push_back(d.value);
      worst = std::max(worst, match_multisets(odz, negated(idz)));
    }
    record("decoupling-zero-mirror", worst < 1e-7, worst);
  }
  {  // transfer identities at random frequencies
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 15; ++i) {
      const StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2),
                                              1 + static_cast<Eigen::Index>(rng() % 2));
      for (int k = 0; k < 5; ++k) {
        const Complex s(u(rng), u(rng));
        worst = std::max(worst, check_symplectic_identity(q, s));
        worst = std::max(worst, check_doubly_stochastic(q, s));
      }
    }
    record("transfer-identities", worst < 1e-9, worst);
  }
  {  // Kalman decomposition fidelity on padded systems
    std::mt19937_64 rng(seed + 4);
    double worst = 0.0;
    bool dims_ok = true;
    for (int i = 0; i < 15; ++i) {
      StateSpace q = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
      q = append_decoupled_modes(q, rng, 1);
      q = conjugate_basis(q, rand_orth_sympl(rng, q.n));
      const KalmanForm kf = kalman_decompose(q);
      worst = std::max(worst, transfer_preservation_residual(q, kf, seed + 100 + i));
      worst = std::max(worst, kf.pattern_residual);
      if (!kf.symplectic_ok) dims_ok = false;
    }
    record("kalman-fidelity", worst < 1e-7 && dims_ok, worst);
  }
  {  // observers on right-half-plane systems generated by time reversal
    std::mt19937_64 rng(seed + 5);
    double worst = 0.0;
    bool ok = true;
    int used = 0;
    for (int i = 0; i < 60 && used < 20; ++i) {
      const StateSpace q0 = rand_pr_quadrature(rng, 1 + static_cast<Eigen::Index>(rng() % 2), 1);
      // keep instances whose reversal has every eigenvalue in the open RHP
      const StateSpace q = time_reverse(q0);
      bool rhp = true;
      for (const Complex& ev : poles(q)) {
        if (ev.real() < 1e-6) rhp = false;
      }
      if (!rhp) continue;
      ++used;
      const PrReport pr = check_physical_realizability(q);
      worst = std::max({worst, pr.residual_constraint1, pr.residual_constraint2});
      const KalmanForm kf = kalman_decompose(q);
      if (kf.n1 != q.n) continue;  // minimality is generic; skip degenerate draws
      const LinearMap obs = build_classical_observer(kf);
      double st = -std::numeric_limits<double>::infinity();
      for (const Complex& ev : eigenvalues_of(obs.A)) st = std::max(st, ev.real());
      if (st >= 0.0) ok = false;
    }
    record("observer-stability", ok && used > 0 && worst < 1e-9, worst);
  }
  {  // network identities
    std::mt19937_64 rng(seed + 6);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double kappa = 0.5 + std::abs(u(rng)), eps = u(rng), alpha = 0.6 * u(rng) / 1.5;
      Network net{dpa_plant(kappa, eps), identity_plant(), alpha};
      const Complex s(u(rng), u(rng));
      const TfPair t = closed_loop_tf(net, s);
      const TfPair tm = closed_loop_tf(net, -s);
      if (!t.q.divergent && !tm.p.divergent) {
        worst = std::max(worst, std::abs(t.q.value * tm.p.value - 1.0));
      }
      const TfPair sv = sensitivity(net, s);
      const TfPair st = s_plus_t(net, s);
      if (!t.q.divergent && !sv.q.divergent && !st.q.divergent) {
        worst = std::max(worst, std::abs(st.q.value - t.q.value - sv.q.value));
      }
      const AlphaSolution asol = solve_bs_alpha(net.plant, Quadrature::kP);
      if (asol.feasible) {
        Network tuned{net.plant, identity_plant(), asol.alpha};
        const TfPair t0 = closed_loop_tf(tuned, Complex(0.0, 0.0));
        if (!t0.p.divergent) worst = std::max(worst, std::abs(t0.p.value));
      }
    }
    record("network-identities", worst < 1e-9, worst);
  }

  int failed = 0;
  for (const SuiteResult& s : suites) {
    std::cout << (s.passed ? "pass" : "FAIL") << "  " << s.name
              << "  (worst residual " << format_double(s.worst) << ")\n";
    if (!s.passed) ++failed;
  }
  std::cout << suites.size() - static_cast<std::size_t>(failed) << "/" << suites.size()
            << " suites passed (seed " << seed << ")\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear quantum systems toolkit: realizability, spectra, Kalman structure, "
               "input observers, and beamsplitter-network squeezing analysis"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --seed after the subcommand name

  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  app.add_option("--seed", seed, "seed for sampled frequencies and generated systems")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  int rc = 0;

  // check-pr
  auto* c_pr = app.add_subcommand("check-pr", "verify physical realizability");
  SystemInput in_pr;
  in_pr.attach(c_pr);
  double tol_pr = kDefaultTol;
  bool expect_pr = false;
  std::string out_pr;
  c_pr->add_option("--tol", tol_pr, "residual tolerance");
  c_pr->add_flag("--expect-pr", expect_pr, "exit 1 when the check fails");
  c_pr->add_option("-o,--output", out_pr, "write the JSON report here");
  c_pr->callback([&] { rc = run_check_pr(in_pr, tol_pr, expect_pr,
                                         resolve_seed(seed, seed_given), out_pr); });

  // spectrum
  auto* c_sp = app.add_subcommand("spectrum", "poles, zeros and their correspondences");
  SystemInput in_sp;
  in_sp.attach(c_sp);
  double tol_sp = 1e-8;
  std::string out_sp;
  c_sp->add_option("--tol", tol_sp, "rank tolerance");
  c_sp->add_option("-o,--output", out_sp, "write the JSON report here");
  c_sp->callback([&] { rc = run_spectrum(in_sp, tol_sp, resolve_seed(seed, seed_given), out_sp); });

  // kalman
  auto* c_ka = app.add_subcommand("kalman", "quantum Kalman canonical decomposition");
  SystemInput in_ka;
  in_ka.attach(c_ka);
  double tol_ka = 1e-8;
  std::string out_ka;
  c_ka->add_option("--tol", tol_ka, "rank tolerance");
  c_ka->add_option("-o,--output", out_ka, "write the JSON report here");
  c_ka->callback([&] { rc = run_kalman(in_ka, tol_ka, resolve_seed(seed, seed_given), out_ka); });

  // invertibility
  auto* c_iv = app.add_subcommand("invertibility", "left-invertibility classification");
  SystemInput in_iv;
  in_iv.attach(c_iv);
  double tol_iv = 1e-8;
  std::string expect_verdict, out_iv;
  c_iv->add_option("--tol", tol_iv, "spectral tolerance");
  c_iv->add_option("--expect", expect_verdict,
                   "exit 1 unless the verdict matches (s_left, as_left, left_only, "
                   "not_as_left, indeterminate)");
  c_iv->add_option("-o,--output", out_iv, "write the JSON report here");
  c_iv->callback([&] {
    rc = run_invertibility(in_iv, tol_iv, expect_verdict, resolve_seed(seed, seed_given), out_iv);
  });

  // observer
  auto* c_ob = app.add_subcommand("observer", "build an input observer");
  SystemInput in_ob;
  in_ob.attach(c_ob);
  std::string obs_type = "classical", out_ob;
  c_ob->add_option("--type", obs_type, "classical or quantum")->required();
  c_ob->add_option("-o,--output", out_ob, "write the JSON report here");
  c_ob->callback(
      [&] { rc = run_observer(in_ob, obs_type, resolve_seed(seed, seed_given), out_ob); });

  // simulate
  auto* c_si = app.add_subcommand("simulate", "mean-dynamics simulation and reconstruction");
  SimulateOpts so;
  so.in.attach(c_si);
  c_si->add_option("--observer", so.observer, "none, classical, quantum or naive-h");
  c_si->add_option("--input", so.input, "sines, zero or cancel-h");
  c_si->add_option("--x0", so.x0, "initial plant state (comma separated)")->delimiter(',');
  c_si->add_option("--xhat0", so.xhat0, "initial observer state (comma separated)")
      ->delimiter(',');
  c_si->add_option("--t-end", so.t_end, "simulation horizon");
  c_si->add_option("--dt", so.dt, "integration step");
  c_si->add_flag("--force-zero-output", so.force_zero_output,
                 "feed the observer y = 0 instead of the plant output");
  c_si->add_option("-o,--output", so.output, "write the CSV here (JSON summary to stdout)");
  c_si->callback([&] { rc = run_simulate(so, resolve_seed(seed, seed_given)); });

  // network-sweep
  auto* c_ns = app.add_subcommand("network-sweep", "frequency sweep of the feedback network");
  SweepOpts no;
  c_ns->add_option("--kappa", no.kappa, "plant decay rate")->required();
  c_ns->add_option("--epsilon", no.epsilon, "plant pump strength")->required();
  c_ns->add_option("--alpha", no.alpha, "beamsplitter transmissivity in (-1, 1)")
      ->each([&no](const std::string&) { no.alpha_given = true; });
  c_ns->add_option("--kappa2", no.kappa2, "controller decay rate")
      ->each([&no](const std::string&) { no.controller2 = true; });
  c_ns->add_option("--epsilon2", no.epsilon2, "controller pump strength")
      ->each([&no](const std::string&) { no.controller2 = true; });
  c_ns->add_option("--solve-pump", no.solve_pump_quad,
                   "derive the controller pump for ideal squeezing in this quadrature (q or p)");
  c_ns->add_option("--solve-alpha", no.solve_alpha_quad,
                   "derive alpha for ideal squeezing in this quadrature (q or p)");
  c_ns->add_option("--wmin", no.wmin, "lowest frequency");
  c_ns->add_option("--wmax", no.wmax, "highest frequency");
  c_ns->add_option("--points", no.points, "grid points");
  c_ns->add_option("--scale", no.scale, "linear or log");
  c_ns->add_option("-o,--output", no.output, "write the CSV here (JSON summary to stdout)");
  c_ns->callback([&] { rc = run_network_sweep(no, resolve_seed(seed, seed_given)); });

  // dpa
  auto* c_dp = app.add_subcommand("dpa", "degenerate parametric amplifier instance");
  double dpa_kappa = 2.0, dpa_eps = 1.0;
  std::string dpa_rep = "quadrature", out_dp, sys_dp;
  c_dp->add_option("--kappa", dpa_kappa, "decay rate")->required();
  c_dp->add_option("--epsilon", dpa_eps, "pump strength")->required();
  c_dp->add_option("--rep", dpa_rep, "system-file representation: quadrature or slh");
  c_dp->add_option("--emit-system", sys_dp, "write a system JSON file here");
  c_dp->add_option("-o,--output", out_dp, "write the JSON report here");
  c_dp->callback([&] {
    rc = run_dpa(dpa_kappa, dpa_eps, dpa_rep, resolve_seed(seed, seed_given), out_dp, sys_dp);
  });

  // fixtures
  auto* c_fx = app.add_subcommand("fixtures", "list the named fixtures");
  std::string out_fx;
  c_fx->add_option("-o,--output", out_fx, "write the JSON report here");
  c_fx->callback([&] { rc = run_fixtures(out_fx); });

  // selftest
  auto* c_st = app.add_subcommand("selftest", "run the seeded property suites");
  c_st->callback([&] { rc = run_selftest(resolve_seed(seed, seed_given)); });

  const auto t0 = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "lqs: error: " << e.what() << "\n";
    return 2;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::cerr << "lqs: done in " << ms << " ms\n";
  return rc;
}
