#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rclf/chemostat.hpp"
#include "rclf/dynamics.hpp"

namespace rclf {

/// psi(s) = slope * max(0, -s).
struct PsiSpec {
  double slope = 1.0;
  double operator()(double s) const { return slope * (s < 0.0 ? -s : 0.0); }
  void validate() const;
};

/// Constant gain l0 multiplying psi.
struct LSpec {
  double l0 = 1.0;
  double operator()(double, double) const { return l0; }
  void validate() const;
};

struct RclfFeedbackParams {
  double x1_star = -1.0;
  double M = 1.0;
  double W_weight = 1.0;
  void validate() const;
};

double relaxed_feedback(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l, double x1,
                        double x2);

/// The relaxed law written as a dilution rate in (X, S).
double relaxed_dilution_physical(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l,
                                 double X, double S);

/// Lower bound that q must dominate for x1 <= x1_star.
double rclf_q_lower_bound(const ChemostatScenario& sc, const RclfFeedbackParams& params, double x1,
                          double x2);
double rclf_q(const ChemostatScenario& sc, const RclfFeedbackParams& params, double x1, double x2);
double rclf_feedback(const ChemostatScenario& sc, const RclfFeedbackParams& params, double x1,
                     double x2);

using ScalarMap = std::function<double(double)>;
using PlanarMap = std::function<double(double, double)>;

/// -D_s + mu~(x1) e^{x2} phi(x1) + q(x1, x2), with phi and q checked at construction.
class ClassicalFeedback {
 public:
  ClassicalFeedback(const ChemostatScenario& sc, ScalarMap phi, PlanarMap q_extra = {});
  double operator()(double x1, double x2) const;

 private:
  ChemostatScenario sc_;
  ScalarMap phi_;
  PlanarMap q_;
};

double classical_feedback(const ChemostatScenario& sc, const ScalarMap& phi,
                          const PlanarMap& q_extra, double x1, double x2);

/// phi(x) = (c + 1)/(c + e^x); gives D = mu(S) X / X_s.
ScalarMap mailleret_phi(const ChemostatScenario& sc);

/// Disturbance-free control-affine system xdot = f(x) + g(x) u.
struct ControlAffineSystem {
  std::size_t dim = 0;
  CompactBox box;  // empty box for disturbance-free systems
  std::function<void(std::span<const double> d, std::span<const double> x, std::span<double> out)>
      f;
  std::function<void(std::span<const double> d, std::span<const double> x, std::span<double> out)>
      g;
};

/// Scalar function of the state together with its gradient.
struct GradientFunction {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

double constrained_quadratic_feedback(const ControlAffineSystem& sys, const GradientFunction& V,
                                      const StateFunction& gamma, double a_limit,
                                      std::span<const double> x);

/// Lower-triangular system with x_i' = f_i(d, x) + g_i(d, x) x_{i+1}, x_n' = f_n + g_n u.
struct TriangularSystemSpec {
  std::size_t n = 1;
  double q = 0.0;
  double L = 0.0;
  double r = 1.0;
  double R = 1.0;
  CompactBox box;
  // i is zero-based; x is the full state
  std::function<double(std::size_t i, std::span<const double> d, std::span<const double> x)> f;
  std::function<double(std::size_t i, std::span<const double> d, std::span<const double> x)> g;

  /// Samples |f_i| <= min(q, L|x|) and r <= g_i <= R.
  void validate(std::size_t samples = 2000, std::uint64_t seed = 1) const;
  VectorField vector_field(std::function<double(std::span<const double>)> law) const;
};

/// Benchmark family f_i = q d_i tanh(L s_i / q), g_i = (r+R)/2 + (R-r)/2 d_{n+i} sin(x_i),
/// with s_i = (x_1 + ... + x_i)/sqrt(i) and d in [-level, level]^{2n}.
TriangularSystemSpec make_triangular_benchmark(std::size_t n, double q, double L, double r,
                                               double R, double disturbance_level);

struct SaturatedGains {
  std::vector<double> a;
  std::vector<double> p;
};

struct StageDesign {
  double c_tilde = 0.0;
  std::optional<double> eta;  // upper end of the interval for a~
  double eta_factor = 2.0;    // used when eta is unset: eta = factor * lower end
};

struct BacksteppingDesign {
  double mu0 = 1.0;
  std::vector<StageDesign> stages;
};

/// Constants used at one stage, kept so the gain inequalities can be re-checked.
struct StageRecord {
  double a_lower = 0.0;  // c~ + (q + b)/r
  double eta = 0.0;
  double a_tilde = 0.0;
  double p = 0.0;
  double c_prev = 0.0;
  double c_tilde = 0.0;
  double C = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double k_norm = 0.0;
  double P_norm = 0.0;
  double P_min_eig = 0.0;
  double bound_inverse_c = 0.0;
  double bound_decay = 0.0;
};

struct GainCertificate {
  std::vector<StageRecord> stages;
};

SaturatedGains compute_backstepping_gains(const TriangularSystemSpec& spec,
                                          const BacksteppingDesign& design,
                                          GainCertificate* certificate = nullptr);

/// Smallest ratio p_i / max(lower bounds) over stages, recomputed from the record.
double gain_margin(const GainCertificate& certificate, double q, double L, double r);

double saturated_backstepping(const SaturatedGains& gains, std::span<const double> x);

using FeedbackMap = std::function<StateVector(std::span<const double>)>;

struct PatchInputs {
  FeedbackMap k1;       // valid where h > 0
  FeedbackMap k2;       // valid where h < eps, x != 0
  FeedbackMap k3;       // valid on 0 < h < eps
  FeedbackMap k_tilde;  // valid on |x| < 2r
  StateFunction h;
  double eps = 1.0;
  double r = 1.0;
  std::function<double(double)> bump;
};

/// C-infinity step: 0 on (-inf, 0], 1 on [1, inf).
double smooth_step(double s);

StateVector patch_feedbacks(const PatchInputs& in, std::span<const double> x);

}  // namespace rclf
