#include "rclf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rclf/error.hpp"

namespace rclf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool divides(double big, double small) {
  const double ratio = big / small;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio);
}

}  // namespace

ClosedLoop chemostat_closed_loop(const ChemostatScenario& sc, PlanarLaw law) {
  ClosedLoop loop;
  loop.dim = 2;
  loop.box = CompactBox::cube(2, 0.0, sc.a);
  loop.rhs = [sc, law](double, std::span<const double> x, std::span<const double> d,
                       std::span<double> dx) {
    const auto r = transformed_rhs(sc, x[0], x[1], law(x[0], x[1]), d[0], d[1]);
    dx[0] = r.dx1;
    dx[1] = r.dx2;
  };
  loop.control = [law](std::span<const double> x) { return law(x[0], x[1]); };
  return loop;
}

ClosedLoop relaxed_closed_loop(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l) {
  psi.validate();
  l.validate();
  return chemostat_closed_loop(
      sc, [sc, psi, l](double x1, double x2) { return relaxed_feedback(sc, psi, l, x1, x2); });
}

ClosedLoop backstepping_closed_loop(const TriangularSystemSpec& spec, const SaturatedGains& gains) {
  ClosedLoop loop;
  loop.dim = spec.n;
  loop.box = spec.box;
  auto law = [gains](std::span<const double> x) { return saturated_backstepping(gains, x); };
  loop.rhs = spec.vector_field(law);
  loop.control = law;
  return loop;
}

void UrgasConfig::validate() const {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!(init_radius >= 0.0)) throw InvalidArgument("init_radius must be non-negative");
  if (!(horizon > 0.0) || !(step > 0.0) || !(switch_dt > 0.0))
    throw InvalidArgument("horizon, step and switch_dt must be positive");
  if (!divides(switch_dt, step)) throw InvalidArgument("step must divide switch_dt");
  if (eps_levels.empty()) throw InvalidArgument("need at least one eps level");
  for (double e : eps_levels)
    if (!(e > 0.0)) throw InvalidArgument("eps levels must be positive");
  if (!(terminal_tol > 0.0)) throw InvalidArgument("terminal tolerance must be positive");
  double prev = 0.0;
  for (const auto& seg : warmup) {
    if (!(seg.step > 0.0) || !(seg.until > prev) || !(seg.until < horizon))
      throw InvalidArgument("warm-up segments must be increasing and end before the horizon");
    prev = seg.until;
  }
}

std::vector<StepSegment> UrgasConfig::schedule() const {
  std::vector<StepSegment> s = warmup;
  s.push_back({horizon, step});
  return s;
}

StateVector sample_ball(std::size_t dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StateVector v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& c : v) {
      c = normal(rng);
      n2 += c * c;
    }
  } while (n2 == 0.0);
  const double scale = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(n2);
  for (auto& c : v) c *= scale;
  return v;
}

UrgasReport run_urgas_suite(const ClosedLoop& loop, const UrgasConfig& cfg,
                            const TrajectorySink& sink) {
  cfg.validate();
  std::vector<double> eps = cfg.eps_levels;
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  const auto schedule = cfg.schedule();

  UrgasReport rep;
  rep.trials = cfg.trials;
  std::vector<double> tau(eps.size(), 0.0);
  std::vector<StateVector> probe_dirs;
  std::vector<DisturbanceSignal> probe_signals;
  std::size_t converged = 0;

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    std::mt19937_64 rng(mix_seed(cfg.master_seed, 2 * t));
    const StateVector x0 = sample_ball(loop.dim, cfg.init_radius, rng);
    const auto signal =
        sample_disturbance(loop.box, cfg.switch_dt, cfg.horizon, mix_seed(cfg.master_seed, 2 * t + 1));
    if (probe_dirs.size() < cfg.delta_probes) {
      const double n = euclidean_norm(x0);
      StateVector dir = x0;
      for (auto& c : dir) c = n > 0.0 ? c / n : 0.0;
      if (n == 0.0 && !dir.empty()) dir[0] = 1.0;
      probe_dirs.push_back(dir);
      probe_signals.push_back(signal);
    }
    IntegrationOptions opts;
    opts.control = loop.control;
    const Trajectory traj = integrate_rk4(loop.rhs, x0, signal, schedule, opts);
    if (sink) sink(t, traj);

    if (traj.diverged) {
      ++rep.diverged_trials;
      rep.lagrange_sup = kInf;
      ++rep.entry_violations;
      continue;
    }
    double sup = 0.0;
    std::vector<double> last_out(eps.size(), 0.0);
    bool entered = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double nx = euclidean_norm(traj.state(k));
      sup = std::max(sup, nx);
      if (nx <= cfg.terminal_tol) entered = true;
      for (std::size_t e = 0; e < eps.size(); ++e)
        if (nx > eps[e]) last_out[e] = traj.times[k];
    }
    rep.lagrange_sup = std::max(rep.lagrange_sup, sup);
    for (std::size_t e = 0; e < eps.size(); ++e) tau[e] = std::max(tau[e], last_out[e]);
    const double terminal = euclidean_norm(traj.final_state());
    rep.max_terminal_norm = std::max(rep.max_terminal_norm, terminal);
    if (terminal <= cfg.terminal_tol) ++converged;
    if (!entered) ++rep.entry_violations;
  }
  rep.converged_fraction = static_cast<double>(converged) / static_cast<double>(cfg.trials);

  // empirical delta(eps): largest tested radius from which every probe stays inside eps
  double running = 0.0;
  for (double e : eps) {
    auto stays_inside = [&](double rho) {
      for (std::size_t j = 0; j < probe_dirs.size(); ++j) {
        StateVector x0 = probe_dirs[j];
        for (auto& c : x0) c *= rho;
        IntegrationOptions opts;
        opts.stop = [e](double, std::span<const double> x) { return euclidean_norm(x) > e; };
        const auto tr = integrate_rk4(loop.rhs, x0, probe_signals[j], schedule, opts);
        if (tr.diverged || euclidean_norm(tr.final_state()) > e) return false;
        if (tr.times.back() < cfg.horizon) return false;
      }
      return true;
    };
    double lo = 0.0, hi = std::min(cfg.init_radius > 0.0 ? cfg.init_radius : e, e);
    double found = 0.0;
    if (stays_inside(hi)) {
      found = hi;
    } else {
      for (int it = 0; it < cfg.delta_bisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stays_inside(mid))
          lo = mid;
        else
          hi = mid;
      }
      found = lo;
    }
    running = std::max(running, found);
    rep.lyapunov_delta.push_back({e, running});
  }
  for (std::size_t e = 0; e < eps.size(); ++e) rep.attractivity_tau.push_back({eps[e], tau[e]});

  bool tau_monotone = true;
  for (std::size_t e = 1; e < tau.size(); ++e)
    if (tau[e] > tau[e - 1]) tau_monotone = false;
  rep.passed = rep.diverged_trials == 0 && rep.converged_fraction == 1.0 &&
               std::isfinite(rep.lagrange_sup) && tau_monotone;
  return rep;
}

EntryReport validate_absorbing_entry(const ClosedLoop& loop, const AbsorbingSpec& spec,
                                     const EntryConfig& cfg, const InitialSampler& sampler) {
  if (!spec.h || !spec.W || !spec.level_radius) throw InvalidArgument("absorbing spec incomplete");
  std::vector<StepSegment> schedule = cfg.warmup;
  schedule.push_back({cfg.horizon, cfg.step});
  EntryReport rep;
  rep.trials = cfg.trials;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 2 * t));
    EntryTrial tr;
    tr.x0 = sampler(rng);
    tr.h0 = spec.h(tr.x0);
    const auto bound = reach_time_bound(tr.h0, spec.eps_hat, spec.delta0, spec.K_W, spec.W(tr.x0),
                                        spec.level_radius);
    tr.T = bound.T;
    tr.G_bound = bound.G_bound;
    const auto signal =
        sample_disturbance(loop.box, cfg.switch_dt, cfg.horizon, mix_seed(cfg.seed, 2 * t + 1));
    const auto traj = integrate_rk4(loop.rhs, tr.x0, signal, schedule);
    tr.entry_time = first_entry_time(traj, spec.h, spec.eps_hat);
    if (traj.diverged || !tr.entry_time || *tr.entry_time > tr.T) {
      ++rep.bound_violations;
    } else {
      if (tr.T > 0.0) rep.worst_entry_ratio = std::max(rep.worst_entry_ratio, *tr.entry_time / tr.T);
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double tk = traj.times[k];
      const auto x = traj.state(k);
      if (!tr.entry_time || tk <= *tr.entry_time) {
        tr.sup_before_entry = std::max(tr.sup_before_entry, euclidean_norm(x));
      } else if (spec.h(x) > spec.eps_hat + cfg.slack) {
        tr.reexit = true;
      }
    }
    if (tr.reexit) ++rep.reexit_events;
    if (tr.sup_before_entry > tr.G_bound) ++rep.excursion_violations;
    rep.samples.push_back(std::move(tr));
  }
  return rep;
}

EntryReport validate_chemostat_entry(const ChemostatScenario& sc, const RelaxedCertificate& cert,
                                     double x1_star, const PsiSpec& psi, const LSpec& l,
                                     const EntryConfig& cfg, double h_max, double x2_range) {
  AbsorbingSpec spec;
  spec.h = [x1_star](std::span<const double> x) { return 0.5 * x1_star - x[0]; };
  spec.eps_hat = cert.eps_hat;
  spec.delta0 = cert.delta0;
  spec.K_W = cert.K_W;
  spec.W = [sc](std::span<const double> x) { return absorbing_W(sc, x[0], x[1]); };
  spec.level_radius = absorbing_level_radius(sc.c);
  const InitialSampler sampler = [x1_star, h_max, x2_range](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // h in (0, h_max]: 1 - U lies in (0, 1]
    const double h = h_max * (1.0 - unit(rng));
    const double x2 = x2_range * (2.0 * unit(rng) - 1.0);
    return StateVector{0.5 * x1_star - h, x2};
  };
  return validate_absorbing_entry(relaxed_closed_loop(sc, psi, l), spec, cfg, sampler);
}

SweepReport uncertainty_sweep(const ChemostatScenario& base, const PsiSpec& psi, const LSpec& l,
                              const std::vector<double>& a_values, const UrgasConfig& cfg,
                              std::size_t probe_states) {
  if (a_values.empty()) throw InvalidArgument("sweep needs at least one uncertainty level");
  SweepReport rep;
  rep.probe_states = probe_states;
  std::mt19937_64 rng(mix_seed(cfg.master_seed, 0xA11CE));
  std::uniform_real_distribution<double> coord(-cfg.init_radius - 1.0, cfg.init_radius + 1.0);
  std::vector<std::pair<double, double>> probes(probe_states);
  for (auto& pr : probes) pr = {coord(rng), coord(rng)};

  std::vector<double> reference;
  rep.law_identical = true;
  bool all_passed = true;
  for (double a : a_values) {
    const ChemostatScenario sc = base.with_uncertainty(a);
    std::vector<double> outputs;
    outputs.reserve(probes.size());
    for (const auto& [x1, x2] : probes) outputs.push_back(relaxed_feedback(sc, psi, l, x1, x2));
    if (reference.empty()) {
      reference = outputs;
    } else if (std::memcmp(reference.data(), outputs.data(), outputs.size() * sizeof(double)) != 0) {
      rep.law_identical = false;
    }
    auto r = run_urgas_suite(relaxed_closed_loop(sc, psi, l), cfg);
    all_passed = all_passed && r.passed;
    rep.entries.push_back({a, std::move(r)});
  }
  rep.passed = all_passed && rep.law_identical;
  return rep;
}

std::vector<double> equilibrium_slice_roots(const ChemostatScenario& sc, std::size_t grid) {
  auto slice = [&sc](double S) {
    return growth_rate(sc.growth, S) * (sc.S_i - S - sc.K * sc.X_s) + sc.m * sc.X_s;
  };
  std::vector<double> roots;
  // mu(0) = 0, so the left end carries the limit m X_s and brackets roots below the first cell
  double prev_S = 0.0;
  double prev_v = slice(prev_S);
  for (std::size_t j = 1; j < grid; ++j) {
    const double S = sc.S_i * static_cast<double>(j) / static_cast<double>(grid);
    const double v = slice(S);
    if (v == 0.0) {
      roots.push_back(S);
    } else if ((v < 0.0) != (prev_v < 0.0) && prev_v != 0.0) {
      double lo = prev_S, hi = S;
      const bool lo_negative = prev_v < 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((slice(mid) < 0.0) == lo_negative)
          lo = mid;
        else
          hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_S = S;
    prev_v = v;
  }
  return roots;
}

namespace {

// Physical chemostat under D = mu(S) X / X_s, without domain checks so washout can be observed.
VectorField proportional_uptake_loop(const ChemostatScenario& sc) {
  return [sc](double, std::span<const double> x, std::span<const double> d, std::span<double> dx) {
    const double X = x[0], S = x[1];
    const double mu = growth_rate(sc.growth, S);
    const double D = mu * X / sc.X_s;
    const double delta = d.empty() ? 0.0 : uncertainty_term(sc, S, d[0], d[1]);
    dx[0] = (mu + delta - D - sc.b) * X;
    dx[1] = D * (sc.S_i - S) - sc.K * mu * X + sc.m * X;
  };
}

bool near(double v, double target, double tol) {
  return std::abs(v - target) <= tol * std::abs(target);
}

}  // namespace

WashoutResult washout_counterexample(const ChemostatScenario& sc, const WashoutConfig& cfg) {
  if (sc.growth.kind == GrowthKind::Monod)
    throw InvalidArgument("washout counterexample needs substrate-inhibited kinetics");
  const auto roots = equilibrium_slice_roots(sc);
  if (roots.size() != 2)
    throw Infeasible("expected two equilibria on the X = X_s slice, found " +
                     std::to_string(roots.size()));
  WashoutResult res;
  res.S1 = roots[0];
  res.S2 = roots[1];

  const auto rhs = proportional_uptake_loop(sc);
  const auto none = DisturbanceSignal::none();
  const double floor_S = 1e-6 * sc.S_i;
  {
    IntegrationOptions opts;
    opts.stop = [floor_S](double, std::span<const double> x) { return x[1] < floor_S; };
    const StateVector x0{sc.X_s, 0.5 * res.S1};
    res.washout = integrate_rk4(rhs, x0, none, cfg.washout_schedule, opts);
    res.washout_time = first_entry_time(
        res.washout, [](std::span<const double> x) { return x[1]; }, floor_S);
    res.washed_out = res.washout_time.has_value();
  }
  {
    const StateVector x0{sc.X_s, 0.5 * (res.S1 + res.S2)};
    res.recovery = integrate_rk4(rhs, x0, none, cfg.recovery_schedule);
    const auto xf = res.recovery.final_state();
    res.recovered = !res.recovery.diverged && near(xf[1], res.S2, cfg.tolerance) &&
                    near(xf[0], sc.X_s, cfg.tolerance);
  }
  {
    const auto start = to_transformed(sc, sc.X_s, 0.5 * res.S1);
    const StateVector x0{start.x1, start.x2};
    const auto loop = relaxed_closed_loop(sc, cfg.psi, cfg.l);
    const auto zero = DisturbanceSignal::constant({0.0, 0.0});
    res.repair = integrate_rk4(loop.rhs, x0, zero, cfg.repair_schedule);
    if (!res.repair.diverged) {
      const auto xf = res.repair.final_state();
      res.repair_final = from_transformed(sc, xf[0], xf[1]);
      res.repaired = near(res.repair_final.S, sc.S_s, cfg.tolerance) &&
                     near(res.repair_final.X, sc.X_s, cfg.tolerance);
    }
  }
  return res;
}

}  // namespace rclf
