#pragma once

#include <optional>
#include <string>

#include "rclf/error.hpp"

namespace rclf {

enum class GrowthKind { Monod, Haldane, GeneralizedHaldane };

/// mu(S) = scale*S / (K1 + S + K2*S^exponent); Monod has K2 = 0, Haldane exponent 2.
struct GrowthModel {
  GrowthKind kind = GrowthKind::Monod;
  double mu_max_scale = 1.0;
  double K1 = 1.0;
  double K2 = 0.0;
  double exponent = 2.0;

  static GrowthModel monod(double scale, double K1);
  static GrowthModel haldane(double scale, double K1, double K2);
  static GrowthModel generalized_haldane(double scale, double K1, double K2, double exponent);

  void validate() const;
  /// Location of the global maximum; +inf when mu is increasing.
  double peak_location() const;
  /// Global supremum of mu over S > 0.
  double sup() const;
};

double growth_rate(const GrowthModel& model, double S);

enum class Branch { Ascending, Descending };

struct ChemostatScenario {
  double S_i = 0.0;
  double K = 1.0;
  double b = 0.0;
  double m = 0.0;
  double D_s = 0.0;
  double a = 0.0;
  double S_s = 0.0;
  double X_s = 0.0;
  double c = 0.0;
  double G = 0.0;
  GrowthModel growth;

  void validate() const;
  double mu_max() const { return growth.sup(); }
  /// Substrate level corresponding to x1.
  double substrate_of(double x1) const;
  double mu_tilde(double x1) const { return growth_rate(growth, substrate_of(x1)); }
  ChemostatScenario with_uncertainty(double a_new) const;
};

/// Builds the scenario whose equilibrium satisfies mu(S_s) = D_s + b.
ChemostatScenario solve_equilibrium(double S_i, double K, double b, double m, double D_s,
                                    const GrowthModel& growth,
                                    std::optional<Branch> branch_hint = std::nullopt,
                                    double a = 0.0);

/// Same scenario family, parameterized by the equilibrium substrate instead of D_s.
ChemostatScenario scenario_from_substrate(double S_i, double K, double b, double m, double S_s,
                                          const GrowthModel& growth, double a = 0.0);

struct S2Certificate {
  double S_plus = 0.0;
  double p = 0.0;
  double x1_plus = 0.0;
  double x1_star = 0.0;
};

class S2Infeasible : public Infeasible {
 public:
  S2Infeasible(std::string inequality, double witness_S);
  const std::string& inequality() const { return inequality_; }
  double witness_S() const { return witness_S_; }

 private:
  std::string inequality_;
  double witness_S_;
};

S2Certificate check_S2(const ChemostatScenario& sc);

/// The three inequalities that must hold for all x1 >= x1_star.
bool s2_conditions_hold(const ChemostatScenario& sc, double p, double x1);

/// Uncertain growth term d1|S - S_s| - d2 max(0, S_s - S).
double uncertainty_term(const ChemostatScenario& sc, double S, double d1, double d2);

struct PhysicalRates {
  double dX;
  double dS;
};

PhysicalRates physical_rhs(const ChemostatScenario& sc, double X, double S, double D, double d1,
                           double d2);

struct TransformedPoint {
  double x1;
  double x2;
};

struct PhysicalPoint {
  double X;
  double S;
};

TransformedPoint to_transformed(const ChemostatScenario& sc, double X, double S);
PhysicalPoint from_transformed(const ChemostatScenario& sc, double x1, double x2);

struct TransformedRates {
  double dx1;
  double dx2;
};

TransformedRates transformed_rhs(const ChemostatScenario& sc, double x1, double x2, double u,
                                 double d1, double d2);

}  // namespace rclf
