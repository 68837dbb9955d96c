#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rclf {

using StateVector = std::vector<double>;

/// Per-coordinate bounds of the disturbance set.
struct CompactBox {
  std::vector<double> lower;
  std::vector<double> upper;

  CompactBox() = default;
  CompactBox(std::vector<double> lo, std::vector<double> hi);

  static CompactBox cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> d) const;
  /// All 2^dim vertices, lowest coordinate varying fastest.
  std::vector<StateVector> corners() const;
  StateVector midpoint() const;
};

/// Piecewise-constant, right-continuous disturbance on [0, horizon].
class DisturbanceSignal {
 public:
  DisturbanceSignal() = default;
  DisturbanceSignal(std::vector<double> switch_times, std::vector<StateVector> values,
                    double horizon);

  static DisturbanceSignal constant(StateVector value,
                                    double horizon = std::numeric_limits<double>::infinity());
  static DisturbanceSignal none() { return constant({}); }

  std::span<const double> at(double t) const;
  std::size_t interval_index(double t) const;

  const std::vector<double>& switch_times() const { return switch_times_; }
  const std::vector<StateVector>& values() const { return values_; }
  double horizon() const { return horizon_; }
  std::size_t dim() const { return values_.empty() ? 0 : values_.front().size(); }

 private:
  std::vector<double> switch_times_{0.0};
  std::vector<StateVector> values_{StateVector{}};
  double horizon_ = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<double> states;  // row-major, dim entries per sample
  std::vector<double> inputs;  // one per sample when a control probe was given
  bool diverged = false;

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * dim, dim};
  }
  std::span<const double> final_state() const { return state(size() - 1); }
  bool has_inputs() const { return !inputs.empty(); }
};

/// dxdt = F(t, x, d).
using VectorField = std::function<void(double t, std::span<const double> x,
                                       std::span<const double> d, std::span<double> dxdt)>;
using StateFunction = std::function<double(std::span<const double> x)>;

/// Integrate with `step` until time `until` (segments are consecutive).
struct StepSegment {
  double until;
  double step;
};

struct IntegrationOptions {
  double blowup_bound = 1e12;
  StateFunction control;  // when set, the applied input is recorded per sample
  std::size_t record_every = 1;
  // integration stops after the first step at which this returns true
  std::function<bool(double t, std::span<const double> x)> stop;
};

Trajectory integrate_rk4(const VectorField& rhs, std::span<const double> x0,
                         const DisturbanceSignal& d, double t_end, double step,
                         const IntegrationOptions& opts = {});

/// Fixed-step RK4 over consecutive segments, each with its own step.
Trajectory integrate_rk4(const VectorField& rhs, std::span<const double> x0,
                         const DisturbanceSignal& d, std::span<const StepSegment> schedule,
                         const IntegrationOptions& opts = {});

DisturbanceSignal sample_disturbance(const CompactBox& box, double switch_dt, double horizon,
                                     std::uint64_t seed);

double sat(double x);

std::optional<double> first_entry_time(const Trajectory& traj, const StateFunction& indicator,
                                       double threshold);

double euclidean_norm(std::span<const double> x);

/// Stateless 64-bit mixer used to derive per-trial seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Header `t,x1,...,xn[,u]`; names override the x labels.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& names = {});

std::string format_double(double v);

}  // namespace rclf
