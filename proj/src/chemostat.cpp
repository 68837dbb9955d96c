#include "rclf/chemostat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rclf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kS2Grid = 2000;
constexpr int kS2Candidates = 20;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive");
}

double bisect(const GrowthModel& g, double target, double lo, double hi) {
  // mu(lo) - target and mu(hi) - target have opposite signs
  const double f_lo = growth_rate(g, lo) - target;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = growth_rate(g, mid) - target;
    if ((f_mid < 0.0) == (f_lo < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GrowthModel GrowthModel::monod(double scale, double K1) {
  GrowthModel g{GrowthKind::Monod, scale, K1, 0.0, 1.0};
  g.validate();
  return g;
}

GrowthModel GrowthModel::haldane(double scale, double K1, double K2) {
  GrowthModel g{GrowthKind::Haldane, scale, K1, K2, 2.0};
  g.validate();
  return g;
}

GrowthModel GrowthModel::generalized_haldane(double scale, double K1, double K2,
                                             double exponent) {
  GrowthModel g{GrowthKind::GeneralizedHaldane, scale, K1, K2, exponent};
  g.validate();
  return g;
}

void GrowthModel::validate() const {
  require_positive(mu_max_scale, "growth scale");
  require_positive(K1, "K1");
  if (kind == GrowthKind::Monod) return;
  if (!(K2 >= 0.0) || !std::isfinite(K2)) throw InvalidArgument("K2 must be non-negative");
  if (kind == GrowthKind::GeneralizedHaldane && !(exponent >= 1.0))
    throw InvalidArgument("growth exponent must be at least 1");
}

double GrowthModel::peak_location() const {
  if (kind == GrowthKind::Monod || K2 == 0.0) return kInf;
  const double e = kind == GrowthKind::Haldane ? 2.0 : exponent;
  if (e == 1.0) return kInf;
  return std::pow(K1 / (K2 * (e - 1.0)), 1.0 / e);
}

double GrowthModel::sup() const {
  if (kind == GrowthKind::Monod || K2 == 0.0) return mu_max_scale;
  const double e = kind == GrowthKind::Haldane ? 2.0 : exponent;
  if (e == 1.0) return mu_max_scale / (1.0 + K2);
  if (kind == GrowthKind::Haldane) return mu_max_scale / (1.0 + 2.0 * std::sqrt(K1 * K2));
  return growth_rate(*this, peak_location());
}

double growth_rate(const GrowthModel& g, double S) {
  if (!(S > 0.0)) return 0.0;
  switch (g.kind) {
    case GrowthKind::Monod:
      return g.mu_max_scale * S / (g.K1 + S);
    case GrowthKind::Haldane:
      return g.mu_max_scale * S / (g.K1 + S + g.K2 * S * S);
    case GrowthKind::GeneralizedHaldane:
      return g.mu_max_scale * S / (g.K1 + S + g.K2 * std::pow(S, g.exponent));
  }
  return 0.0;
}

void ChemostatScenario::validate() const {
  growth.validate();
  require_positive(S_i, "S_i");
  require_positive(K, "K");
  require_positive(D_s, "D_s");
  if (!(b >= 0.0)) throw InvalidArgument("mortality b must be non-negative");
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("uncertainty a must be non-negative");
  if (!std::isfinite(m)) throw InvalidArgument("maintenance m must be finite");
  if (!(S_s > 0.0 && S_s < S_i)) throw InvalidArgument("equilibrium substrate must lie in (0, S_i)");
  if (!(K * (D_s + b) - m > 0.0)) throw InvalidArgument("K(D_s + b) - m must be positive");
  if (std::abs(growth_rate(growth, S_s) - (D_s + b)) > 1e-10)
    throw InvalidArgument("mu(S_s) differs from D_s + b");
  const double X_expected = D_s * (S_i - S_s) / (K * (D_s + b) - m);
  if (!(X_s > 0.0) || std::abs(X_s - X_expected) > 1e-10 * std::max(1.0, X_expected))
    throw InvalidArgument("equilibrium biomass inconsistent");
  if (std::abs(c - (S_i / S_s - 1.0)) > 1e-12 * std::max(1.0, c) || !(c > 0.0))
    throw InvalidArgument("transform constant c inconsistent");
  if (std::abs(G - D_s / (K * (D_s + b) - m)) > 1e-12 * std::max(1.0, G) || !(G > 0.0))
    throw InvalidArgument("transform constant G inconsistent");
}

double ChemostatScenario::substrate_of(double x1) const {
  return S_i / (1.0 + c * std::exp(-x1));
}

ChemostatScenario ChemostatScenario::with_uncertainty(double a_new) const {
  ChemostatScenario out = *this;
  out.a = a_new;
  out.validate();
  return out;
}

namespace {

ChemostatScenario assemble(double S_i, double K, double b, double m, double D_s, double S_s,
                           const GrowthModel& growth, double a) {
  const double denom = K * (D_s + b) - m;
  if (!(denom > 0.0)) throw InvalidArgument("K(D_s + b) - m must be positive");
  ChemostatScenario sc;
  sc.S_i = S_i;
  sc.K = K;
  sc.b = b;
  sc.m = m;
  sc.D_s = D_s;
  sc.a = a;
  sc.S_s = S_s;
  sc.G = D_s / denom;
  sc.X_s = sc.G * (S_i - S_s);
  sc.c = S_i / S_s - 1.0;
  sc.growth = growth;
  if (!(sc.X_s > 0.0)) throw InvalidArgument("equilibrium biomass must be positive");
  sc.validate();
  return sc;
}

}  // namespace

ChemostatScenario solve_equilibrium(double S_i, double K, double b, double m, double D_s,
                                    const GrowthModel& growth, std::optional<Branch> branch_hint,
                                    double a) {
  growth.validate();
  require_positive(S_i, "S_i");
  require_positive(D_s, "D_s");
  if (!(K * (D_s + b) - m > 0.0)) throw InvalidArgument("K(D_s + b) - m must be positive");
  const double target = D_s + b;
  const double peak = std::min(growth.peak_location(), S_i);
  const bool has_ascending = growth_rate(growth, peak) > target;
  const bool has_descending = peak < S_i && growth_rate(growth, S_i) < target && has_ascending;
  Branch branch;
  if (branch_hint) {
    branch = *branch_hint;
  } else {
    branch = has_descending ? Branch::Descending : Branch::Ascending;
  }
  double S_s;
  if (branch == Branch::Ascending) {
    if (!has_ascending) throw Infeasible("no equilibrium root in (0, S_i): mu never reaches D_s + b");
    S_s = bisect(growth, target, 0.0, peak);
  } else {
    if (!has_descending) throw Infeasible("no equilibrium root on the descending branch in (0, S_i)");
    S_s = bisect(growth, target, peak, S_i);
  }
  // re-derive D_s so the equilibrium identity holds to rounding
  return assemble(S_i, K, b, m, growth_rate(growth, S_s) - b, S_s, growth, a);
}

ChemostatScenario scenario_from_substrate(double S_i, double K, double b, double m, double S_s,
                                          const GrowthModel& growth, double a) {
  growth.validate();
  require_positive(S_i, "S_i");
  if (!(S_s > 0.0 && S_s < S_i)) throw InvalidArgument("equilibrium substrate must lie in (0, S_i)");
  const double D_s = growth_rate(growth, S_s) - b;
  if (!(D_s > 0.0)) throw Infeasible("mu(S_s) <= b: no positive nominal dilution rate");
  return assemble(S_i, K, b, m, D_s, S_s, growth, a);
}

S2Infeasible::S2Infeasible(std::string inequality, double witness_S)
    : Infeasible("hypothesis S2 violated: " + inequality + " fails at S = " +
                 std::to_string(witness_S)),
      inequality_(std::move(inequality)),
      witness_S_(witness_S) {}

bool s2_conditions_hold(const ChemostatScenario& sc, double p, double x1) {
  const double e = std::exp(x1);
  const double mu = sc.mu_tilde(x1);
  const double unc = sc.a * sc.c * sc.S_s / (sc.c + e) * std::max(0.0, 1.0 - e);
  return unc <= p && sc.K * mu - sc.m >= p && mu - sc.b >= 2.0 * p;
}

S2Certificate check_S2(const ChemostatScenario& sc) {
  sc.validate();
  std::optional<S2Certificate> best;
  std::string worst_inequality;
  double worst_S = 0.0;
  double worst_value = kInf;

  for (int k = 1; k < kS2Candidates; ++k) {
    const double S_plus = sc.S_s * k / kS2Candidates;
    double min_val = kInf;
    double arg_S = S_plus;
    bool yield_side = false;
    for (int j = 0; j < kS2Grid; ++j) {
      const double S = S_plus + (sc.S_i - S_plus) * j / (kS2Grid - 1);
      const double mu = growth_rate(sc.growth, S);
      const double first = sc.K * mu - sc.m;
      const double second = 0.5 * (mu - sc.b);
      if (std::min(first, second) < min_val) {
        min_val = std::min(first, second);
        arg_S = S;
        yield_side = first < second;
      }
    }
    if (!(min_val > 0.0)) {
      if (min_val < worst_value || k == kS2Candidates - 1) {
        worst_value = min_val;
        worst_S = arg_S;
        worst_inequality = yield_side ? "K*mu(S) - m >= p" : "mu(S) - b >= 2p";
      }
      continue;
    }
    const double p = 0.5 * min_val;
    const double x1_plus = std::log(S_plus * sc.c / (sc.S_i - S_plus));
    const double cell = -x1_plus / kS2Grid;
    int lowest = kS2Grid;
    for (int j = kS2Grid - 1; j >= 0; --j) {
      if (!s2_conditions_hold(sc, p, x1_plus + cell * j)) break;
      lowest = j;
    }
    if (lowest >= kS2Grid - 1) continue;
    S2Certificate cert{S_plus, p, x1_plus, x1_plus + cell * (lowest + 1)};
    if (!best || cert.x1_star < best->x1_star ||
        (cert.x1_star == best->x1_star && cert.p > best->p))
      best = cert;
  }
  if (!best) {
    if (worst_inequality.empty())
      throw S2Infeasible("a*c*S_s*max(0, 1 - e^x1)/(c + e^x1) <= p", sc.S_s);
    throw S2Infeasible(worst_inequality, worst_S);
  }
  return *best;
}

double uncertainty_term(const ChemostatScenario& sc, double S, double d1, double d2) {
  return d1 * std::abs(S - sc.S_s) - d2 * std::max(0.0, sc.S_s - S);
}

PhysicalRates physical_rhs(const ChemostatScenario& sc, double X, double S, double D, double d1,
                           double d2) {
  if (!(X > 0.0) || !(S > 0.0 && S < sc.S_i))
    throw DomainError("physical state outside {X > 0, 0 < S < S_i}");
  const double mu = growth_rate(sc.growth, S);
  const double delta = uncertainty_term(sc, S, d1, d2);
  return {(mu + delta - D - sc.b) * X, D * (sc.S_i - S) - sc.K * mu * X + sc.m * X};
}

TransformedPoint to_transformed(const ChemostatScenario& sc, double X, double S) {
  if (!(X > 0.0) || !(S > 0.0 && S < sc.S_i))
    throw DomainError("physical state outside {X > 0, 0 < S < S_i}");
  return {std::log(sc.c * S / (sc.S_i - S)), std::log(X / (sc.G * (sc.S_i - S)))};
}

PhysicalPoint from_transformed(const ChemostatScenario& sc, double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw DomainError("transformed state not finite");
  const double S = sc.substrate_of(x1);
  const double X = sc.G * sc.S_i * sc.c / (sc.c + std::exp(x1)) * std::exp(x2);
  return {X, S};
}

TransformedRates transformed_rhs(const ChemostatScenario& sc, double x1, double x2, double u,
                                 double d1, double d2) {
  if (u < -sc.D_s) throw DomainError("input below -D_s (negative dilution)");
  const double e = std::exp(x1);
  const double mu = sc.mu_tilde(x1);
  const double uptake = (sc.K * mu - sc.m) * sc.G * std::exp(x2);
  const double f = sc.c * sc.S_s / (sc.c + e);
  const double dx1 = (sc.c * std::exp(-x1) + 1.0) * (sc.D_s + u - uptake);
  const double dx2 =
      mu + d1 * f * std::abs(e - 1.0) - d2 * f * std::max(0.0, 1.0 - e) - sc.b - uptake;
  return {dx1, dx2};
}

}  // namespace rclf
