#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "rclf/certify.hpp"
#include "rclf/chemostat.hpp"
#include "rclf/dynamics.hpp"
#include "rclf/feedback.hpp"

namespace rclf {

/// Autonomous closed loop driven only by the disturbance.
struct ClosedLoop {
  std::size_t dim = 0;
  CompactBox box;
  VectorField rhs;
  StateFunction control;  // optional, recorded along trajectories
};

/// Chemostat in log coordinates under a planar law; disturbance (d1, d2) in [0, a]^2.
ClosedLoop chemostat_closed_loop(const ChemostatScenario& sc, PlanarLaw law);
ClosedLoop relaxed_closed_loop(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l);
ClosedLoop backstepping_closed_loop(const TriangularSystemSpec& spec, const SaturatedGains& gains);

struct UrgasConfig {
  std::size_t trials = 200;
  double init_radius = 3.0;
  double horizon = 60.0;
  double step = 1e-3;
  double switch_dt = 0.1;
  std::uint64_t master_seed = 42;
  std::vector<double> eps_levels{1.0, 0.1, 0.01};
  std::vector<StepSegment> warmup;  // finer steps at the start of every run
  double terminal_tol = 1e-2;
  std::size_t delta_probes = 8;
  int delta_bisections = 8;

  void validate() const;
  std::vector<StepSegment> schedule() const;
};

struct EpsStatistic {
  double eps;
  double value;
};

struct UrgasReport {
  std::size_t trials = 0;
  double lagrange_sup = 0.0;
  std::vector<EpsStatistic> lyapunov_delta;  // empirical delta(eps), ascending eps
  std::vector<EpsStatistic> attractivity_tau;  // empirical tau(eps, s), ascending eps
  std::size_t entry_violations = 0;  // trials that never entered the terminal ball
  std::size_t diverged_trials = 0;
  double converged_fraction = 0.0;
  double max_terminal_norm = 0.0;
  bool passed = false;
};

using TrajectorySink = std::function<void(std::size_t trial, const Trajectory&)>;

UrgasReport run_urgas_suite(const ClosedLoop& loop, const UrgasConfig& cfg,
                            const TrajectorySink& sink = {});

/// Uniform sample in the closed ball of the given radius.
StateVector sample_ball(std::size_t dim, double radius, std::mt19937_64& rng);

struct AbsorbingSpec {
  StateFunction h;
  double eps_hat = 0.0;
  double delta0 = 0.0;
  double K_W = 0.0;
  StateFunction W;
  std::function<double(double)> level_radius;
};

struct EntryConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  double horizon = 20.0;
  double step = 1e-3;
  double switch_dt = 0.1;
  std::vector<StepSegment> warmup;
  double slack = 1e-6;
};

struct EntryTrial {
  StateVector x0;
  double h0 = 0.0;
  double T = 0.0;
  double G_bound = 0.0;
  std::optional<double> entry_time;
  double sup_before_entry = 0.0;
  bool reexit = false;
};

struct EntryReport {
  std::size_t trials = 0;
  std::size_t bound_violations = 0;
  std::size_t reexit_events = 0;
  std::size_t excursion_violations = 0;
  double worst_entry_ratio = 0.0;  // max entry_time / T over trials with T > 0
  std::vector<EntryTrial> samples;
  bool passed() const {
    return bound_violations == 0 && reexit_events == 0 && excursion_violations == 0;
  }
};

using InitialSampler = std::function<StateVector(std::mt19937_64&)>;

EntryReport validate_absorbing_entry(const ClosedLoop& loop, const AbsorbingSpec& spec,
                                     const EntryConfig& cfg, const InitialSampler& sampler);

/// Relaxed chemostat loop; x0 drawn with h(x0) in (0, h_max] and x2 in [-x2_range, x2_range].
EntryReport validate_chemostat_entry(const ChemostatScenario& sc, const RelaxedCertificate& cert,
                                     double x1_star, const PsiSpec& psi, const LSpec& l,
                                     const EntryConfig& cfg, double h_max = 5.0,
                                     double x2_range = 1.0);

struct SweepEntry {
  double a;
  UrgasReport report;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::size_t probe_states = 0;
  bool law_identical = false;
  bool passed = false;
};

SweepReport uncertainty_sweep(const ChemostatScenario& base, const PsiSpec& psi, const LSpec& l,
                              const std::vector<double>& a_values, const UrgasConfig& cfg,
                              std::size_t probe_states = 100);

/// Sign-change roots of mu(S)(S_i - S - K X_s) + m X_s on a uniform grid over (0, S_i).
std::vector<double> equilibrium_slice_roots(const ChemostatScenario& sc, std::size_t grid = 10000);

struct WashoutConfig {
  std::vector<StepSegment> washout_schedule{{0.1, 1e-6}};
  std::vector<StepSegment> recovery_schedule{{1e-2, 1e-5}, {1.0, 1e-4}, {30.0, 1e-3}};
  std::vector<StepSegment> repair_schedule{{1e-8, 1e-11}, {1e-6, 1e-9}, {1e-4, 1e-7},
                                           {1e-2, 1e-5},  {1.0, 1e-4},  {30.0, 1e-3}};
  double tolerance = 0.01;
  PsiSpec psi;
  LSpec l;
};

struct WashoutResult {
  double S1 = 0.0;
  double S2 = 0.0;
  Trajectory washout;  // physical (X, S) under D = mu(S) X / X_s from (X_s, S1/2)
  bool washed_out = false;
  std::optional<double> washout_time;
  Trajectory recovery;  // same law from (X_s, (S1 + S2)/2)
  bool recovered = false;
  Trajectory repair;  // relaxed law in log coordinates from (X_s, S1/2)
  bool repaired = false;
  PhysicalPoint repair_final{};
};

WashoutResult washout_counterexample(const ChemostatScenario& sc, const WashoutConfig& cfg = {});

}  // namespace rclf
