#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "rclf/certify.hpp"
#include "rclf/chemostat.hpp"
#include "rclf/config.hpp"
#include "rclf/dynamics.hpp"
#include "rclf/error.hpp"
#include "rclf/feedback.hpp"
#include "rclf/harness.hpp"
#include "rclf/report.hpp"

namespace fs = std::filesystem;
using namespace rclf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitFailed = 4;

struct Context {
  ScenarioConfig cfg;
  fs::path out;
  bool quiet = false;

  void say(const std::string& msg) const {
    if (!quiet) std::cout << msg << '\n';
  }
  std::string path(const std::string& name) const { return (out / name).string(); }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  return os;
}

PlanarLaw chemostat_law(const ScenarioConfig& cfg, const ChemostatScenario& sc) {
  const auto psi = cfg.psi;
  const auto l = cfg.l;
  if (cfg.family == "relaxed") {
    psi.validate();
    l.validate();
    return [sc, psi, l](double x1, double x2) { return relaxed_feedback(sc, psi, l, x1, x2); };
  }
  if (cfg.family == "rclf") {
    const auto s2 = check_S2(sc);
    const auto k = synthesize_rclf_constants(sc, s2);
    RclfFeedbackParams params{k.x1_star, k.M, cfg.W_weight};
    params.validate();
    return [sc, params](double x1, double x2) { return rclf_feedback(sc, params, x1, x2); };
  }
  if (cfg.family == "mailleret") {
    ClassicalFeedback law(sc, mailleret_phi(sc));
    return [law](double x1, double x2) { return law(x1, x2); };
  }
  if (cfg.family == "classical") {
    ClassicalFeedback law(sc, mailleret_phi(sc),
                          [psi, l](double x1, double x2) { return l(x1, x2) * psi(x1); });
    return [law](double x1, double x2) { return law(x1, x2); };
  }
  throw ConfigError("[feedback] family: '" + cfg.family + "' does not act on the chemostat");
}

struct BacksteppingSetup {
  TriangularSystemSpec spec;
  SaturatedGains gains;
  GainCertificate certificate;
  double margin = 0.0;
};

BacksteppingSetup backstepping_setup(const BacksteppingConfig& b) {
  BacksteppingSetup s;
  s.spec = make_triangular_benchmark(b.n, b.q, b.L, b.r, b.R, b.disturbance_level);
  s.spec.validate();
  s.gains = compute_backstepping_gains(s.spec, b.design, &s.certificate);
  s.margin = gain_margin(s.certificate, b.q, b.L, b.r);
  return s;
}

StateVector initial_state(const ScenarioConfig& cfg, std::size_t dim, double radius) {
  if (cfg.initial) {
    if (cfg.initial->size() != dim) throw ConfigError("[integrator] initial: wrong dimension");
    return *cfg.initial;
  }
  std::mt19937_64 rng(mix_seed(cfg.master_seed, 0));
  return sample_ball(dim, radius, rng);
}

// Log-coordinate trajectory as (X, S, D); the law fills in unrecorded inputs.
void write_physical_csv(std::ostream& os, const ChemostatScenario& sc, const Trajectory& traj,
                        const PlanarLaw& law = {}) {
  os << "t,X,S,D\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto x = traj.state(i);
    const auto p = from_transformed(sc, x[0], x[1]);
    const double u = traj.has_inputs() ? traj.inputs[i] : law(x[0], x[1]);
    os << format_double(traj.times[i]) << ',' << format_double(p.X) << ',' << format_double(p.S)
       << ',' << format_double(sc.D_s + u) << '\n';
  }
}

int cmd_simulate_chemostat(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& sc = cfg.require_scenario();
  const auto law = chemostat_law(cfg, sc);
  const ClosedLoop loop = chemostat_closed_loop(sc, law);
  const StateVector x0 = initial_state(cfg, 2, cfg.urgas.init_radius);
  const auto d = sample_disturbance(loop.box, cfg.urgas.switch_dt, cfg.urgas.horizon,
                                    mix_seed(cfg.master_seed, 1));
  IntegrationOptions opts;
  opts.control = loop.control;
  const auto schedule = cfg.urgas.schedule();
  const Trajectory traj = integrate_rk4(loop.rhs, x0, d, schedule, opts);

  {
    auto os = open_output(ctx.path("simulate_transformed.csv"));
    write_trajectory_csv(os, traj);
  }
  {
    auto os = open_output(ctx.path("simulate_physical.csv"));
    write_physical_csv(os, sc, traj);
  }
  std::vector<double> S, X, D;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto x = traj.state(i);
    const auto p = from_transformed(sc, x[0], x[1]);
    S.push_back(p.S);
    X.push_back(p.X);
    D.push_back(sc.D_s + traj.inputs[i]);
  }
  {
    auto os = open_output(ctx.path("simulate.svg"));
    write_svg_plot(os, "closed loop (" + cfg.family + ")", traj.times,
                   {{"S", S}, {"X", X}, {"D", D}});
  }
  const auto xf = traj.final_state();
  const auto pf = from_transformed(sc, xf[0], xf[1]);
  Json summary{{"family", cfg.family},
               {"scenario", to_json(sc)},
               {"x0", x0},
               {"final_transformed", {xf[0], xf[1]}},
               {"final_physical", {{"X", pf.X}, {"S", pf.S}}},
               {"diverged", traj.diverged},
               {"samples", traj.size()}};
  write_json_file(ctx.path("simulate.json"), summary);
  ctx.say("final S = " + format_double(pf.S) + ", X = " + format_double(pf.X) +
          " (equilibrium S_s = " + format_double(sc.S_s) + ", X_s = " + format_double(sc.X_s) + ")");
  if (traj.diverged) {
    std::cerr << "trajectory diverged at t = " << format_double(traj.times.back()) << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_simulate_backstepping(const Context& ctx) {
  const auto& b = ctx.cfg.require_backstepping();
  const auto setup = backstepping_setup(b);
  const ClosedLoop loop = backstepping_closed_loop(setup.spec, setup.gains);
  StateVector x0;
  if (b.initial) {
    x0 = *b.initial;
  } else {
    std::mt19937_64 rng(mix_seed(ctx.cfg.master_seed, 0));
    x0 = sample_ball(b.n, b.urgas.init_radius, rng);
  }
  const auto d = sample_disturbance(loop.box, b.urgas.switch_dt, b.urgas.horizon,
                                    mix_seed(ctx.cfg.master_seed, 1));
  IntegrationOptions opts;
  opts.control = loop.control;
  const auto traj = integrate_rk4(loop.rhs, x0, d, b.urgas.schedule(), opts);
  {
    auto os = open_output(ctx.path("simulate_transformed.csv"));
    write_trajectory_csv(os, traj);
  }
  std::vector<PlotSeries> series;
  for (std::size_t j = 0; j < b.n; ++j) {
    PlotSeries s{"x" + std::to_string(j + 1), {}};
    for (std::size_t i = 0; i < traj.size(); ++i) s.values.push_back(traj.state(i)[j]);
    series.push_back(std::move(s));
  }
  series.push_back({"u", traj.inputs});
  {
    auto os = open_output(ctx.path("simulate.svg"));
    write_svg_plot(os, "saturated backstepping", traj.times, series);
  }
  const auto xf = traj.final_state();
  write_json_file(ctx.path("simulate.json"),
                  {{"family", "backstepping"},
                   {"x0", x0},
                   {"final", StateVector(xf.begin(), xf.end())},
                   {"diverged", traj.diverged}});
  ctx.say("final |x| = " + format_double(euclidean_norm(xf)));
  return traj.diverged ? kExitRuntime : kExitOk;
}

int cmd_simulate_constrained(const Context& ctx) {
  const auto sys = planar_constrained_system();
  const auto law = [](std::span<const double> x) { return -std::min(1.0, x[1]); };
  const VectorField rhs = [sys, law](double, std::span<const double> x, std::span<const double> d,
                                     std::span<double> dx) {
    double f[2], g[2];
    sys.f(d, x, f);
    sys.g(d, x, g);
    const double u = law(x);
    dx[0] = f[0] + g[0] * u;
    dx[1] = f[1] + g[1] * u;
  };
  const StateVector x0 = initial_state(ctx.cfg, 2, ctx.cfg.urgas.init_radius);
  IntegrationOptions opts;
  opts.control = law;
  const auto traj =
      integrate_rk4(rhs, x0, DisturbanceSignal::none(), ctx.cfg.urgas.schedule(), opts);
  {
    auto os = open_output(ctx.path("simulate_transformed.csv"));
    write_trajectory_csv(os, traj);
  }
  std::vector<double> x1, x2;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    x1.push_back(traj.state(i)[0]);
    x2.push_back(traj.state(i)[1]);
  }
  {
    auto os = open_output(ctx.path("simulate.svg"));
    write_svg_plot(os, "constrained planar loop", traj.times,
                   {{"x1", x1}, {"x2", x2}, {"u", traj.inputs}});
  }
  const auto xf = traj.final_state();
  write_json_file(ctx.path("simulate.json"), {{"family", "constrained"},
                                              {"x0", x0},
                                              {"final", StateVector(xf.begin(), xf.end())},
                                              {"min_input", *std::min_element(traj.inputs.begin(),
                                                                              traj.inputs.end())},
                                              {"diverged", traj.diverged}});
  ctx.say("final |x| = " + format_double(euclidean_norm(xf)));
  return traj.diverged ? kExitRuntime : kExitOk;
}

int cmd_simulate(const Context& ctx) {
  if (ctx.cfg.family == "backstepping") return cmd_simulate_backstepping(ctx);
  if (ctx.cfg.family == "constrained") return cmd_simulate_constrained(ctx);
  return cmd_simulate_chemostat(ctx);
}

int verify_backstepping(const Context& ctx) {
  const auto setup = backstepping_setup(ctx.cfg.require_backstepping());
  const bool passed = setup.margin >= 1.1;
  write_json_file(ctx.path("verify.json"), {{"gains", to_json(setup.gains, setup.certificate)},
                                            {"gain_margin", setup.margin},
                                            {"passed", passed}});
  ctx.say("gain margin " + format_double(setup.margin) + (passed ? " (pass)" : " (FAIL)"));
  return passed ? kExitOk : kExitFailed;
}

int verify_constrained(const Context& ctx) {
  const std::size_t pts = std::max<std::size_t>(ctx.cfg.grid.n1, 3);
  const auto relaxed = verify_relaxed_clf_conditions(planar_relaxed_problem(pts));
  const auto constrained = verify_constrained_input_conditions(planar_constrained_problem(pts));
  Json reports = Json::array();
  bool passed = true;
  for (const auto* set : {&relaxed, &constrained})
    for (const auto& r : *set) {
      reports.push_back(to_json(r));
      passed = passed && r.passed;
      ctx.say(r.region + "/" + r.check + ": worst margin " + format_double(r.worst_margin) +
              (r.passed ? " (pass)" : " (FAIL)"));
    }
  write_json_file(ctx.path("verify.json"), {{"reports", reports}, {"passed", passed}});
  return passed ? kExitOk : kExitFailed;
}

int cmd_verify(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.family == "backstepping") return verify_backstepping(ctx);
  if (cfg.family == "constrained") return verify_constrained(ctx);
  if (cfg.family != "relaxed" && cfg.family != "rclf")
    throw ConfigError("[feedback] family: verify supports relaxed, rclf, constrained and backstepping");
  const auto& sc = cfg.require_scenario();
  S2Certificate s2;
  try {
    s2 = check_S2(sc);
  } catch (const S2Infeasible& e) {
    write_json_file(ctx.path("verify.json"), {{"scenario", to_json(sc)},
                                              {"S2_failed", e.inequality()},
                                              {"witness_S", e.witness_S()},
                                              {"message", e.what()},
                                              {"passed", false}});
    std::cerr << "S2 hypothesis fails: " << e.what() << '\n';
    return kExitFailed;
  }
  const auto k = synthesize_rclf_constants(sc, s2);
  const auto checks = recheck_rclf_constants(sc, s2, k);
  bool passed = true;
  Json check_json = Json::array();
  for (const auto& c : checks) {
    check_json.push_back(to_json(c));
    passed = passed && c.passed;
    if (!c.passed) ctx.say("constant check " + c.name + " FAILED");
  }
  Json out{{"scenario", to_json(sc)},
           {"s2", to_json(s2)},
           {"constants", to_json(k)},
           {"constant_checks", check_json}};
  std::vector<CertificateReport> reports;
  if (cfg.family == "rclf") {
    const RclfFeedbackParams params{k.x1_star, k.M, cfg.W_weight};
    reports = verify_rclf_derivative(
        sc, k, [sc, params](double x1, double x2) { return rclf_feedback(sc, params, x1, x2); },
        cfg.grid);
  } else {
    const auto cert = verify_relaxed_conditions(sc, k, cfg.psi, cfg.l, cfg.grid);
    out["delta0"] = cert.delta0;
    out["eps_hat"] = cert.eps_hat;
    out["K_W"] = cert.K_W;
    reports = cert.reports;
  }
  Json report_json = Json::array();
  for (const auto& r : reports) {
    report_json.push_back(to_json(r));
    passed = passed && r.passed;
    ctx.say(r.region + "/" + r.check + ": worst margin " + format_double(r.worst_margin) +
            (r.passed ? " (pass)" : " (FAIL)"));
  }
  out["reports"] = report_json;
  out["passed"] = passed;
  write_json_file(ctx.path("verify.json"), out);
  return passed ? kExitOk : kExitFailed;
}

int suite_exit(const UrgasReport& r) {
  if (r.diverged_trials > 0) return kExitRuntime;
  return r.passed ? kExitOk : kExitFailed;
}

TrajectorySink trajectory_dumper(const Context& ctx) {
  if (!ctx.cfg.dump_trajectories) return {};
  const fs::path dir = ctx.out / "trajectories";
  fs::create_directories(dir);
  return [dir](std::size_t trial, const Trajectory& traj) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%04zu.csv", trial);
    auto os = open_output((dir / name).string());
    write_trajectory_csv(os, traj);
  };
}

void say_suite(const Context& ctx, const UrgasReport& r) {
  std::ostringstream msg;
  msg << "converged " << format_double(r.converged_fraction) << " of " << r.trials
      << " trials, Lagrange sup " << format_double(r.lagrange_sup) << ", diverged "
      << r.diverged_trials << (r.passed ? " (pass)" : " (FAIL)");
  ctx.say(msg.str());
}

int cmd_backstep(const Context& ctx);

int cmd_urgas(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.family == "backstepping") return cmd_backstep(ctx);
  const auto& sc = cfg.require_scenario();
  const ClosedLoop loop = chemostat_closed_loop(sc, chemostat_law(cfg, sc));
  const auto report = run_urgas_suite(loop, cfg.urgas, trajectory_dumper(ctx));
  write_json_file(ctx.path("urgas.json"), {{"family", cfg.family}, {"urgas", to_json(report)}});
  say_suite(ctx, report);
  int code = suite_exit(report);
  if (cfg.family == "relaxed" && cfg.entry.trials > 0) {
    const auto s2 = check_S2(sc);
    const auto k = synthesize_rclf_constants(sc, s2);
    const auto cert = verify_relaxed_conditions(sc, k, cfg.psi, cfg.l, cfg.grid);
    const auto entry = validate_chemostat_entry(sc, cert, k.x1_star, cfg.psi, cfg.l, cfg.entry,
                                                cfg.entry_h_max, cfg.entry_x2_range);
    write_json_file(ctx.path("entry.json"),
                    {{"certificate", to_json(cert)}, {"entry", to_json(entry)}});
    ctx.say("absorbing entry: " + std::to_string(entry.bound_violations) + " bound violations, " +
            std::to_string(entry.reexit_events) + " re-exits");
    if (code == kExitOk && !(entry.passed() && cert.passed())) code = kExitFailed;
  }
  return code;
}

int cmd_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.family != "relaxed") throw ConfigError("[feedback] family: sweep runs the relaxed law");
  const auto report = uncertainty_sweep(cfg.require_scenario(), cfg.psi, cfg.l, cfg.a_values,
                                        cfg.urgas);
  write_json_file(ctx.path("sweep.json"), to_json(report));
  bool diverged = false;
  for (const auto& e : report.entries) {
    ctx.say("a = " + format_double(e.a) + ":");
    say_suite(ctx, e.report);
    diverged = diverged || e.report.diverged_trials > 0;
  }
  ctx.say(std::string("feedback identical across a: ") + (report.law_identical ? "yes" : "no"));
  if (diverged) return kExitRuntime;
  return report.passed ? kExitOk : kExitFailed;
}

int cmd_counterexample(const Context& ctx) {
  const auto& sc = ctx.cfg.require_scenario();
  const auto result = washout_counterexample(sc, ctx.cfg.washout);
  write_json_file(ctx.path("counterexample.json"),
                  {{"scenario", to_json(sc)}, {"result", to_json(result)}});
  {
    auto os = open_output(ctx.path("washout.csv"));
    write_trajectory_csv(os, result.washout, {"X", "S"});
  }
  {
    auto os = open_output(ctx.path("recovery.csv"));
    write_trajectory_csv(os, result.recovery, {"X", "S"});
  }
  {
    auto os = open_output(ctx.path("repair.csv"));
    const auto psi = ctx.cfg.washout.psi;
    const auto l = ctx.cfg.washout.l;
    write_physical_csv(os, sc, result.repair, [&sc, psi, l](double x1, double x2) {
      return relaxed_feedback(sc, psi, l, x1, x2);
    });
  }
  {
    std::vector<double> S;
    for (std::size_t i = 0; i < result.washout.size(); ++i) S.push_back(result.washout.state(i)[1]);
    auto os = open_output(ctx.path("counterexample.svg"));
    write_svg_plot(os, "washout under D = mu(S) X / X_s", result.washout.times, {{"S", S}});
  }
  ctx.say("S1 = " + format_double(result.S1) + ", S2 = " + format_double(result.S2) +
          ", washout " + (result.washed_out ? "yes" : "no") + ", recovery " +
          (result.recovered ? "yes" : "no") + ", relaxed repair " +
          (result.repaired ? "yes" : "no"));
  return result.washed_out && result.recovered && result.repaired ? kExitOk : kExitFailed;
}

int cmd_backstep(const Context& ctx) {
  const auto& b = ctx.cfg.require_backstepping();
  const auto setup = backstepping_setup(b);
  const ClosedLoop loop = backstepping_closed_loop(setup.spec, setup.gains);
  const double a_n = setup.gains.a.back();
  double max_abs_u = 0.0;
  const auto dump = trajectory_dumper(ctx);
  const TrajectorySink sink = [&](std::size_t trial, const Trajectory& traj) {
    for (double u : traj.inputs) max_abs_u = std::max(max_abs_u, std::abs(u));
    if (dump) dump(trial, traj);
  };
  const auto report = run_urgas_suite(loop, b.urgas, sink);

  Json out{{"n", b.n},
           {"gains", to_json(setup.gains, setup.certificate)},
           {"gain_margin", setup.margin},
           {"urgas", to_json(report)},
           {"input_bound", a_n},
           {"max_abs_input", max_abs_u}};
  if (b.initial) {
    const auto d = sample_disturbance(loop.box, b.urgas.switch_dt, b.urgas.horizon,
                                      mix_seed(ctx.cfg.master_seed, 1));
    IntegrationOptions opts;
    opts.control = loop.control;
    const auto traj = integrate_rk4(loop.rhs, *b.initial, d, b.urgas.schedule(), opts);
    auto os = open_output(ctx.path("backstep.csv"));
    write_trajectory_csv(os, traj);
    double run_max = 0.0;
    for (double u : traj.inputs) run_max = std::max(run_max, std::abs(u));
    max_abs_u = std::max(max_abs_u, run_max);
    const auto xf = traj.final_state();
    out["run"] = {{"x0", *b.initial},
                  {"final", StateVector(xf.begin(), xf.end())},
                  {"max_abs_input", run_max},
                  {"diverged", traj.diverged}};
    out["max_abs_input"] = max_abs_u;
  }
  const bool bounded = max_abs_u <= a_n;
  const bool passed = report.passed && bounded && setup.margin >= 1.1;
  out["input_bounded"] = bounded;
  out["passed"] = passed;
  write_json_file(ctx.path("backstep.json"), out);
  say_suite(ctx, report);
  ctx.say("gain margin " + format_double(setup.margin) + ", max |u| " + format_double(max_abs_u) +
          " <= a_n = " + format_double(a_n) + (bounded ? " (pass)" : " (FAIL)"));
  if (report.diverged_trials > 0) return kExitRuntime;
  return passed ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed control Lyapunov function designs: simulation, certificates, Monte-Carlo"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> trials;
  bool quiet = false;
  app.add_option("--config", config_path, "scenario file")->required();
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--trials", trials, "Monte-Carlo trials (overrides the config)");
  app.add_flag("--quiet", quiet, "print nothing on success");

  using Command = int (*)(const Context&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"simulate", {"one closed-loop run with CSV and SVG output", cmd_simulate}},
      {"verify", {"grid certificates for the configured feedback", cmd_verify}},
      {"urgas", {"Monte-Carlo stability suite", cmd_urgas}},
      {"sweep", {"stability suite across uncertainty levels", cmd_sweep}},
      {"counterexample", {"washout of the classical law and its repair", cmd_counterexample}},
      {"backstep", {"saturated backstepping gains and trials", cmd_backstep}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx;
  ctx.quiet = quiet;
  try {
    ctx.cfg = load_config(config_path);
    if (seed) {
      ctx.cfg.master_seed = *seed;
      ctx.cfg.urgas.master_seed = *seed;
      ctx.cfg.entry.seed = *seed + 1;
      if (ctx.cfg.backstepping) ctx.cfg.backstepping->urgas.master_seed = *seed;
    }
    if (trials) {
      if (*trials < 1) throw ConfigError("--trials must be at least 1");
      ctx.cfg.urgas.trials = *trials;
      if (ctx.cfg.backstepping) ctx.cfg.backstepping->urgas.trials = *trials;
    }
    ctx.out = out_dir ? *out_dir : ctx.cfg.output_dir;
    fs::create_directories(ctx.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const Command command = [&] {
    for (const auto& [name, entry] : commands)
      if (app.got_subcommand(name)) return entry.second;
    return Command{nullptr};
  }();
  try {
    return command(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid setting: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitFailed;
  }
}
