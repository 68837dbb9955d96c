#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rclf/chemostat.hpp"
#include "rclf/dynamics.hpp"
#include "rclf/feedback.hpp"

namespace rclf {

struct RclfConstants {
  double delta = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  double eps = 0.0;
  double r = 0.0;
  double L = 0.0;
  double B = 0.0;
  double M = 0.0;
  double A = 0.0;
  double x1_star = 0.0;
  double p = 0.0;
};

/// Grid check outcome. Strict checks pass when worst_margin < -strict_tolerance.
struct CertificateReport {
  std::string region;
  std::string check;
  std::vector<std::size_t> grid;
  std::vector<double> window;  // lower/upper per coordinate
  double worst_margin = -std::numeric_limits<double>::infinity();
  StateVector witness;
  StateVector witness_d;
  std::size_t points = 0;
  bool strict = true;
  bool passed = false;
};

inline constexpr double kStrictTolerance = 1e-6;
inline constexpr double kOriginExclusion = 1e-3;

RclfConstants synthesize_rclf_constants(const ChemostatScenario& sc, const S2Certificate& s2);

struct InequalityCheck {
  std::string name;
  double worst_slack;  // >= 0 means satisfied
  bool passed;
};

/// Re-substitutes the constants into every inequality they were built to satisfy.
std::vector<InequalityCheck> recheck_rclf_constants(const ChemostatScenario& sc,
                                                    const S2Certificate& s2,
                                                    const RclfConstants& k);

/// V = gamma(x1) + x2^2/2 and its gradient.
double lyapunov_value(const RclfConstants& k, double x1, double x2);
void lyapunov_gradient(const RclfConstants& k, double x1, double x2, double grad[2]);

struct GridSpec {
  std::size_t n1 = 400;
  std::size_t n2 = 400;
  double pad = 3.0;
  double origin_exclusion = kOriginExclusion;
};

using PlanarLaw = std::function<double(double, double)>;

std::vector<CertificateReport> verify_rclf_derivative(const ChemostatScenario& sc,
                                                      const RclfConstants& k,
                                                      const PlanarLaw& law,
                                                      const GridSpec& grid = {});

/// Lyapunov-like function used to bound excursions before reaching the target set.
double absorbing_W(const ChemostatScenario& sc, double x1, double x2);
void absorbing_W_gradient(const ChemostatScenario& sc, double x1, double x2, double grad[2]);

struct RelaxedCertificate {
  std::vector<CertificateReport> reports;
  double delta0 = 0.0;
  double eps_hat = 0.0;
  double K_W = 0.0;
  bool passed() const;
};

/// Decrement of h = x1_star/2 - x1 guaranteed by the psi term on {h >= 0}.
double relaxed_decrement(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l,
                         double x1_star);

RelaxedCertificate verify_relaxed_conditions(const ChemostatScenario& sc, const RclfConstants& k,
                                             const PsiSpec& psi, const LSpec& l,
                                             const GridSpec& grid = {});

struct RelaxedClfProblem {
  ControlAffineSystem system;
  GradientFunction V;
  GradientFunction h;
  GradientFunction W;
  std::function<double(double)> delta;  // must map into (0, inf)
  double K = 0.0;
  double eps = 0.0;
  std::function<double(std::span<const double>)> law;
  std::vector<double> lower;  // verification window
  std::vector<double> upper;
  std::vector<std::size_t> points;
  double origin_exclusion = kOriginExclusion;
};

/// Checks the decrease of h, the growth bound on W and the decrease of V on their regions.
std::vector<CertificateReport> verify_relaxed_clf_conditions(const RelaxedClfProblem& problem);

struct ConstrainedInputProblem {
  ControlAffineSystem system;
  GradientFunction V;
  GradientFunction W;
  std::function<double(std::span<const double>)> gamma;
  // gradient of h = gamma grad V . g - a + eps; central differences when unset
  std::function<void(std::span<const double>, std::span<double>)> h_gradient;
  double a = 1.0;
  double eps = 0.5;
  double K = 1.0;
  double delta = 0.5;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> points;
  double origin_exclusion = kOriginExclusion;
};

/// Scalar-input conditions guaranteeing that -min(a, gamma LgV) stabilizes.
std::vector<CertificateReport> verify_constrained_input_conditions(
    const ConstrainedInputProblem& problem);

/// Specialized problem builders for the planar system x1' = -x1 + x2, x2' = u, u >= -1.
ControlAffineSystem planar_constrained_system();
RelaxedClfProblem planar_relaxed_problem(std::size_t points_per_axis = 401);
ConstrainedInputProblem planar_constrained_problem(std::size_t points_per_axis = 401);

struct ReachBound {
  double T = 0.0;
  double B = 0.0;
  double G_bound = 0.0;
};

/// r(s) = max{|x| : W(x) <= s} for the absorbing_W of a scenario with constant c.
std::function<double(double)> absorbing_level_radius(double c);

ReachBound reach_time_bound(double h0, double eps_hat, double delta0, double K_W, double W0,
                            const std::function<double(double)>& level_radius);

}  // namespace rclf
