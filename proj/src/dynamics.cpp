#include "rclf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "rclf/error.hpp"

namespace rclf {

CompactBox::CompactBox(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in dimension");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw InvalidArgument("box bounds must be finite");
    if (lower[i] > upper[i])
      throw InvalidArgument("degenerate box: lower > upper in coordinate " + std::to_string(i));
  }
}

CompactBox CompactBox::cube(std::size_t dim, double lo, double hi) {
  return CompactBox(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool CompactBox::contains(std::span<const double> d) const {
  if (d.size() != dim()) return false;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] < lower[i] || d[i] > upper[i]) return false;
  return true;
}

std::vector<StateVector> CompactBox::corners() const {
  const std::size_t n = dim();
  std::vector<StateVector> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    StateVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i & 1U) ? upper[i] : lower[i];
    out.push_back(std::move(v));
  }
  return out;
}

StateVector CompactBox::midpoint() const {
  StateVector v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = 0.5 * (lower[i] + upper[i]);
  return v;
}

DisturbanceSignal::DisturbanceSignal(std::vector<double> switch_times,
                                     std::vector<StateVector> values, double horizon)
    : switch_times_(std::move(switch_times)), values_(std::move(values)), horizon_(horizon) {
  if (switch_times_.empty() || switch_times_.size() != values_.size())
    throw InvalidArgument("disturbance needs one value per interval");
  if (switch_times_.front() != 0.0) throw InvalidArgument("first switch time must be 0");
  for (std::size_t i = 1; i < switch_times_.size(); ++i)
    if (!(switch_times_[i] > switch_times_[i - 1]))
      throw InvalidArgument("switch times must be strictly ascending");
  if (!(switch_times_.back() < horizon_)) throw InvalidArgument("last switch must precede horizon");
  for (const auto& v : values_)
    if (v.size() != values_.front().size())
      throw InvalidArgument("disturbance values differ in dimension");
}

DisturbanceSignal DisturbanceSignal::constant(StateVector value, double horizon) {
  return DisturbanceSignal({0.0}, {std::move(value)}, horizon);
}

std::size_t DisturbanceSignal::interval_index(double t) const {
  auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
  if (it == switch_times_.begin()) return 0;
  return static_cast<std::size_t>(it - switch_times_.begin()) - 1;
}

std::span<const double> DisturbanceSignal::at(double t) const {
  return values_[interval_index(t)];
}

double sat(double x) { return std::clamp(x, -1.0, 1.0); }

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the combined word
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DisturbanceSignal sample_disturbance(const CompactBox& box, double switch_dt, double horizon,
                                     std::uint64_t seed) {
  if (!(switch_dt > 0.0) || !(horizon > 0.0))
    throw InvalidArgument("switch_dt and horizon must be positive");
  CompactBox checked(box.lower, box.upper);
  const auto count = static_cast<std::size_t>(std::ceil(horizon / switch_dt - 1e-12));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> times;
  std::vector<StateVector> values;
  times.reserve(count);
  values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    times.push_back(static_cast<double>(k) * switch_dt);
    StateVector v(checked.dim());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = unit(rng);
      v[i] = checked.lower[i] + w * (checked.upper[i] - checked.lower[i]);
    }
    values.push_back(std::move(v));
  }
  return DisturbanceSignal(std::move(times), std::move(values), horizon);
}

namespace {

struct Rk4Workspace {
  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
  StateVector k1, k2, k3, k4, tmp;
};

void rk4_step(const VectorField& rhs, double t, double h, std::span<const double> d,
              StateVector& x, Rk4Workspace& w) {
  const std::size_t n = x.size();
  rhs(t, x, d, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = x[i] + 0.5 * h * w.k1[i];
  rhs(t + 0.5 * h, w.tmp, d, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = x[i] + 0.5 * h * w.k2[i];
  rhs(t + 0.5 * h, w.tmp, d, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = x[i] + h * w.k3[i];
  rhs(t + h, w.tmp, d, w.k4);
  for (std::size_t i = 0; i < n; ++i)
    x[i] += h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

bool blown_up(const StateVector& x, double bound) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > bound) return true;
  return false;
}

void record(Trajectory& traj, double t, const StateVector& x, const IntegrationOptions& opts) {
  traj.times.push_back(t);
  traj.states.insert(traj.states.end(), x.begin(), x.end());
  if (opts.control) traj.inputs.push_back(opts.control(x));
}

}  // namespace

Trajectory integrate_rk4(const VectorField& rhs, std::span<const double> x0,
                         const DisturbanceSignal& d, std::span<const StepSegment> schedule,
                         const IntegrationOptions& opts) {
  if (schedule.empty()) throw InvalidArgument("empty step schedule");
  double prev = 0.0;
  for (const auto& seg : schedule) {
    if (!(seg.step > 0.0)) throw InvalidArgument("integration step must be positive");
    if (!(seg.until > prev)) throw InvalidArgument("schedule end times must increase from 0");
    prev = seg.until;
  }
  const double t_end = schedule.back().until;
  if (t_end > d.horizon() * (1.0 + 1e-12))
    throw InvalidArgument("integration end exceeds the disturbance horizon");
  if (opts.record_every == 0) throw InvalidArgument("record_every must be positive");

  Trajectory traj;
  traj.dim = x0.size();
  StateVector x(x0.begin(), x0.end());
  Rk4Workspace work(x.size());
  record(traj, 0.0, x, opts);

  const auto& switches = d.switch_times();
  double seg_start = 0.0;
  std::size_t step_count = 0;
  for (const auto& seg : schedule) {
    const double h = seg.step;
    const double tol = 1e-9 * h;
    const auto n_steps =
        static_cast<std::size_t>(std::ceil((seg.until - seg_start) / h - 1e-9));
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double t = seg_start + static_cast<double>(k) * h;
      const double t_next = (k + 1 == n_steps) ? seg.until : t + h;
      const std::size_t idx = d.interval_index(t + tol);
      if (idx + 1 < switches.size()) {
        const double s = switches[idx + 1];
        if (s > t + tol && s < t_next - tol)
          throw InvalidArgument("integration step does not divide the disturbance switch spacing");
      }
      rk4_step(rhs, t, t_next - t, d.at(0.5 * (t + t_next)), x, work);
      if (blown_up(x, opts.blowup_bound)) {
        traj.diverged = true;
        return traj;
      }
      ++step_count;
      const bool stop = opts.stop && opts.stop(t_next, x);
      const bool last = stop || ((k + 1 == n_steps) && (&seg == &schedule.back()));
      if (last || step_count % opts.record_every == 0) record(traj, t_next, x, opts);
      if (stop) return traj;
    }
    seg_start = seg.until;
  }
  return traj;
}

Trajectory integrate_rk4(const VectorField& rhs, std::span<const double> x0,
                         const DisturbanceSignal& d, double t_end, double step,
                         const IntegrationOptions& opts) {
  if (!(step > 0.0)) throw InvalidArgument("integration step must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("integration end time must be positive");
  const StepSegment seg{t_end, step};
  return integrate_rk4(rhs, x0, d, std::span<const StepSegment>(&seg, 1), opts);
}

std::optional<double> first_entry_time(const Trajectory& traj, const StateFunction& indicator,
                                       double threshold) {
  double prev_val = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double v = indicator(traj.state(i));
    if (v <= threshold) {
      if (i == 0) return traj.times[0];
      const double t0 = traj.times[i - 1];
      const double t1 = traj.times[i];
      const double frac = (prev_val - threshold) / (prev_val - v);
      return t0 + frac * (t1 - t0);
    }
    prev_val = v;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& names) {
  os << 't';
  for (std::size_t i = 0; i < traj.dim; ++i)
    os << ',' << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
  if (traj.has_inputs()) os << ",u";
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]);
    for (double v : traj.state(k)) os << ',' << format_double(v);
    if (traj.has_inputs()) os << ',' << format_double(traj.inputs[k]);
    os << '\n';
  }
}

}  // namespace rclf
