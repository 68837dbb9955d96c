#include "rclf/certify.hpp"

#include <algorithm>
#include <cmath>

#include "rclf/error.hpp"

namespace rclf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double linspace(double lo, double hi, std::size_t n, std::size_t k) {
  if (n == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

// Fraction of the uptake term that the mortality/maintenance mismatch contributes.
double mismatch_ratio(const ChemostatScenario& sc, double L) {
  return L * std::abs(sc.K * sc.b - sc.m) / (sc.K * (sc.D_s + sc.b) - sc.m);
}

std::vector<StateVector> chemostat_corners(const ChemostatScenario& sc) {
  return {{0.0, 0.0}, {sc.a, 0.0}, {0.0, sc.a}, {sc.a, sc.a}};
}

CertificateReport new_report(std::string region, std::string check, std::size_t n1,
                             std::size_t n2, std::vector<double> window, bool strict) {
  CertificateReport rep;
  rep.region = std::move(region);
  rep.check = std::move(check);
  rep.grid = {n1, n2};
  rep.window = std::move(window);
  rep.strict = strict;
  return rep;
}

void consider(CertificateReport& rep, double margin, double x1, double x2, const StateVector& d) {
  ++rep.points;
  if (margin > rep.worst_margin || rep.witness.empty()) {
    rep.worst_margin = std::max(margin, rep.worst_margin);
    rep.witness = {x1, x2};
    rep.witness_d = d;
  }
}

void finalize(CertificateReport& rep) {
  if (rep.points == 0) {
    rep.passed = false;
    return;
  }
  rep.passed = rep.strict ? rep.worst_margin < -kStrictTolerance : rep.worst_margin <= 0.0;
}

// Sweeps the rectangle, skipping the origin ball, and records margin(x1, x2, d).
template <class MarginFn>
void sweep(CertificateReport& rep, double x1_lo, double x1_hi, std::size_t n1, double x2_lo,
           double x2_hi, std::size_t n2, double exclusion, const std::vector<StateVector>& corners,
           MarginFn&& margin) {
  for (std::size_t i = 0; i < n1; ++i) {
    const double x1 = linspace(x1_lo, x1_hi, n1, i);
    for (std::size_t j = 0; j < n2; ++j) {
      const double x2 = linspace(x2_lo, x2_hi, n2, j);
      if (std::hypot(x1, x2) <= exclusion) continue;
      for (const auto& d : corners) consider(rep, margin(x1, x2, d), x1, x2, d);
    }
  }
}

}  // namespace

RclfConstants synthesize_rclf_constants(const ChemostatScenario& sc, const S2Certificate& s2) {
  sc.validate();
  if (!(s2.p > 0.0) || !(s2.x1_star < 0.0)) throw InvalidArgument("invalid S2 certificate");
  RclfConstants k;
  k.p = s2.p;
  k.x1_star = s2.x1_star;
  const double p = s2.p;
  const double mu_max = sc.mu_max();
  const double uptake_max = (sc.K * mu_max - sc.m) * sc.G;
  if (!(uptake_max > 0.0)) throw Infeasible("K mu_max - m must be positive");
  const double top = mu_max + sc.a * (sc.c + 1.0) * sc.S_s - sc.b;
  const double delta_lo = std::max({0.0, p - uptake_max, p * sc.G - top});
  if (!(delta_lo < p)) throw Infeasible("no delta in (0, p) gives beta_min < 0 < beta_max");
  k.delta = 0.5 * (delta_lo + p);
  k.beta_min = std::log((p - k.delta) / uptake_max);
  k.beta_max = std::log((top + k.delta) / (p * sc.G));
  if (!(k.beta_min < 0.0 && k.beta_max > 0.0))
    throw Infeasible("no delta in (0, p) gives beta_min < 0 < beta_max");

  const double xs = k.x1_star;
  k.eps = 0.99 * std::min((1.0 - std::exp(xs)) / (-xs), std::expm1(k.beta_min) / k.beta_min);

  double r = 1.0 / (sc.c + 1.0);
  constexpr int kRatioGrid = 4001;
  for (int j = 0; j < kRatioGrid; ++j) {
    const double x = linspace(xs, -xs, kRatioGrid, j);
    if (x == 0.0) continue;
    r = std::max(r, std::abs(std::expm1(x)) / ((sc.c + std::exp(x)) * std::abs(x)));
  }
  k.r = 1.05 * r;

  const double mu_s = growth_rate(sc.growth, sc.S_s);
  const double hstep = 1e-6 * sc.S_s;
  double lip = std::abs(growth_rate(sc.growth, sc.S_s + hstep) -
                        growth_rate(sc.growth, sc.S_s - hstep)) / (2.0 * hstep);
  constexpr int kLipGrid = 20000;
  for (int j = 1; j < kLipGrid; ++j) {
    const double S = sc.S_i * j / kLipGrid;
    if (S == sc.S_s) continue;
    lip = std::max(lip, std::abs(growth_rate(sc.growth, S) - mu_s) / std::abs(S - sc.S_s));
  }
  k.L = 1.05 * lip;
  k.B = std::max(std::abs(k.beta_min), std::abs(k.beta_max));

  const double kappa = mismatch_ratio(sc, k.L);
  const double need = k.B * sc.S_s * (kappa + sc.a) + 1.0;
  k.A = 1.1 * need / (2.0 * sc.c * p * sc.G * std::exp(k.beta_min) * std::exp(2.0 * xs));
  const double lift = std::exp(-k.beta_min - xs);
  const double ratio = sc.S_s * k.r / (k.eps * p * sc.G);
  const double square = lift / (2.0 * sc.c) +
                        0.5 * sc.c * lift * ratio * ratio * (kappa + 2.0 * sc.a) * (kappa + 2.0 * sc.a);
  k.M = 1.1 * std::max(2.0 * k.A / (-xs), square);
  return k;
}

std::vector<InequalityCheck> recheck_rclf_constants(const ChemostatScenario& sc,
                                                    const S2Certificate& s2,
                                                    const RclfConstants& k) {
  std::vector<InequalityCheck> out;
  auto add = [&out](std::string name, double slack, bool strict = false) {
    out.push_back({std::move(name), slack, strict ? slack > 0.0 : slack >= 0.0});
  };
  const double p = s2.p;
  const double xs = k.x1_star;
  const double uptake_max = (sc.K * sc.mu_max() - sc.m) * sc.G;
  add("delta_inside_(0,p)", std::min(k.delta, p - k.delta), true);
  add("beta_min_formula",
      -std::abs(k.beta_min - std::log((p - k.delta) / uptake_max)) + 1e-12);
  add("beta_max_formula",
      -std::abs(k.beta_max -
                std::log((sc.mu_max() + sc.a * (sc.c + 1.0) * sc.S_s - sc.b + k.delta) /
                         (p * sc.G))) + 1e-12);
  add("beta_min_negative", -k.beta_min, true);
  add("beta_max_positive", k.beta_max, true);
  add("B_is_max_abs_beta",
      -std::abs(k.B - std::max(std::abs(k.beta_min), std::abs(k.beta_max))) + 1e-15);

  const double kappa = mismatch_ratio(sc, k.L);
  add("A_dominates_cross_terms", 2.0 * k.A * sc.c * p * sc.G * std::exp(k.beta_min) *
                                         std::exp(2.0 * xs) -
                                     (k.B * sc.S_s * (kappa + sc.a) + 1.0));
  add("M_dominates_A", k.M - 2.0 * k.A / (-xs));
  const double lift = std::exp(-k.beta_min - xs);
  const double ratio = sc.S_s * k.r / (k.eps * p * sc.G);
  add("M_completes_square",
      k.M - (lift / (2.0 * sc.c) + 0.5 * sc.c * lift * ratio * ratio * (kappa + 2.0 * sc.a) *
                                       (kappa + 2.0 * sc.a)));

  double worst_a = kInf, worst_b = kInf, worst_r = kInf;
  constexpr int kGrid = 4001;
  for (int j = 0; j < kGrid; ++j) {
    const double x1 = linspace(xs, -xs, kGrid, j);
    worst_a = std::min(worst_a, -k.eps * x1 * x1 - x1 * std::expm1(-x1));
    worst_r = std::min(worst_r, k.r * std::abs(x1) - std::abs(std::expm1(x1)) / (sc.c + std::exp(x1)));
    const double x2 = linspace(k.beta_min, k.beta_max, kGrid, j);
    worst_b = std::min(worst_b, -k.eps * x2 * x2 + x2 * std::expm1(x2));
  }
  add("eps_bound_x1_window", worst_a);
  add("eps_bound_x2_window", worst_b);
  add("r_bounds_log_ratio", worst_r);

  double worst_L = kInf;
  const double mu_s = growth_rate(sc.growth, sc.S_s);
  for (int j = 1; j < 20000; ++j) {
    const double S = sc.S_i * (j + 0.5) / 20000.0;
    if (S >= sc.S_i) break;
    worst_L = std::min(worst_L, k.L * std::abs(S - sc.S_s) - std::abs(growth_rate(sc.growth, S) - mu_s));
  }
  add("L_bounds_growth_deviation", worst_L);

  double worst_s2 = kInf;
  for (int j = 0; j < 2000; ++j) {
    const double x1 = xs + (-xs) * j / 1999.0;
    worst_s2 = std::min(worst_s2, s2_conditions_hold(sc, p, x1) ? 0.0 : -1.0);
  }
  add("S2_inequalities_above_x1_star", worst_s2);
  return out;
}

double lyapunov_value(const RclfConstants& k, double x1, double x2) {
  const double xs = k.x1_star;
  double g = 0.5 * k.M * x1 * x1;
  if (x1 >= -xs) {
    const double s = x1 + xs;
    g += k.A * (std::exp(2.0 * s) - 1.0 - 2.0 * s);
  }
  return g + 0.5 * x2 * x2;
}

void lyapunov_gradient(const RclfConstants& k, double x1, double x2, double grad[2]) {
  const double xs = k.x1_star;
  double g1 = k.M * x1;
  if (x1 >= -xs) g1 += 2.0 * k.A * std::expm1(2.0 * (x1 + xs));
  grad[0] = g1;
  grad[1] = x2;
}

namespace {

double lyapunov_rate(const ChemostatScenario& sc, const RclfConstants& k, double x1, double x2,
                     double u, const StateVector& d) {
  const auto rates = transformed_rhs(sc, x1, x2, u, d[0], d[1]);
  double grad[2];
  lyapunov_gradient(k, x1, x2, grad);
  return grad[0] * rates.dx1 + grad[1] * rates.dx2;
}

std::vector<CertificateReport> omega_cases(const ChemostatScenario& sc, const RclfConstants& k,
                                           const PlanarLaw& law, const GridSpec& grid,
                                           const std::string& prefix) {
  const double xs = k.x1_star;
  const double pad = grid.pad;
  const auto corners = chemostat_corners(sc);
  auto margin = [&](double x1, double x2, const StateVector& d) {
    return lyapunov_rate(sc, k, x1, x2, law(x1, x2), d);
  };
  std::vector<CertificateReport> out;

  const std::size_t half = std::max<std::size_t>(grid.n2 / 2, 2);
  auto c1 = new_report(prefix + "case1", "V_decrease", grid.n1, 2 * half,
                       {xs, -xs + pad, k.beta_min - pad, k.beta_max + pad}, true);
  sweep(c1, xs, -xs + pad, grid.n1, k.beta_min - pad, k.beta_min, half, grid.origin_exclusion,
        corners, margin);
  sweep(c1, xs, -xs + pad, grid.n1, k.beta_max, k.beta_max + pad, half, grid.origin_exclusion,
        corners, margin);
  finalize(c1);
  out.push_back(std::move(c1));

  auto c2 = new_report(prefix + "case2", "V_decrease", grid.n1, grid.n2,
                       {xs, -xs, k.beta_min, k.beta_max}, true);
  sweep(c2, xs, -xs, grid.n1, k.beta_min, k.beta_max, grid.n2, grid.origin_exclusion, corners,
        margin);
  finalize(c2);
  out.push_back(std::move(c2));

  auto c3 = new_report(prefix + "case3", "V_decrease", grid.n1, grid.n2,
                       {-xs, -xs + pad, k.beta_min, k.beta_max}, true);
  sweep(c3, -xs, -xs + pad, grid.n1, k.beta_min, k.beta_max, grid.n2, grid.origin_exclusion,
        corners, margin);
  finalize(c3);
  out.push_back(std::move(c3));
  return out;
}

}  // namespace

std::vector<CertificateReport> verify_rclf_derivative(const ChemostatScenario& sc,
                                                      const RclfConstants& k,
                                                      const PlanarLaw& law, const GridSpec& grid) {
  auto out = omega_cases(sc, k, law, grid, "");
  const double xs = k.x1_star;
  auto c4 = new_report("case4", "V_decrease", grid.n1, grid.n2,
                       {xs - grid.pad, xs, k.beta_min - grid.pad, k.beta_max + grid.pad}, true);
  sweep(c4, xs - grid.pad, xs, grid.n1, k.beta_min - grid.pad, k.beta_max + grid.pad, grid.n2,
        grid.origin_exclusion, chemostat_corners(sc), [&](double x1, double x2, const StateVector& d) {
          return lyapunov_rate(sc, k, x1, x2, law(x1, x2), d);
        });
  finalize(c4);
  out.push_back(std::move(c4));
  return out;
}

double absorbing_W(const ChemostatScenario& sc, double x1, double x2) {
  const double lo = std::min(0.0, x2);
  const double hi = std::max(0.0, x2 - std::log(sc.c + std::exp(x1)));
  return 0.5 * x1 * x1 + 0.5 * lo * lo + 0.5 * hi * hi + 1.0;
}

void absorbing_W_gradient(const ChemostatScenario& sc, double x1, double x2, double grad[2]) {
  const double e = std::exp(x1);
  const double hi = std::max(0.0, x2 - std::log(sc.c + e));
  grad[0] = x1 - hi * e / (sc.c + e);
  grad[1] = std::min(0.0, x2) + hi;
}

bool RelaxedCertificate::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

double relaxed_decrement(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l,
                         double x1_star) {
  const double half = 0.5 * x1_star;
  return l.l0 * (sc.c * std::exp(-half) + 1.0) * psi(half);
}

RelaxedCertificate verify_relaxed_conditions(const ChemostatScenario& sc, const RclfConstants& k,
                                             const PsiSpec& psi, const LSpec& l,
                                             const GridSpec& grid) {
  psi.validate();
  l.validate();
  RelaxedCertificate cert;
  const PlanarLaw law = [&](double x1, double x2) { return relaxed_feedback(sc, psi, l, x1, x2); };
  cert.reports = omega_cases(sc, k, law, grid, "omega_");
  const double xs = k.x1_star;
  cert.eps_hat = -0.5 * xs;
  cert.delta0 = relaxed_decrement(sc, psi, l, xs);
  const auto corners = chemostat_corners(sc);

  const double x1_lo = xs - grid.pad, x1_hi = 0.5 * xs;
  const double x2_lo = k.beta_min - grid.pad, x2_hi = k.beta_max + grid.pad;
  const std::vector<double> window{x1_lo, x1_hi, x2_lo, x2_hi};

  auto h_rep = new_report("reach", "h_decrease", grid.n1, grid.n2, window, false);
  sweep(h_rep, x1_lo, x1_hi, grid.n1, x2_lo, x2_hi, grid.n2, 0.0, corners,
        [&](double x1, double x2, const StateVector& d) {
          const auto rates = transformed_rhs(sc, x1, x2, law(x1, x2), d[0], d[1]);
          return -rates.dx1 + cert.delta0;
        });
  finalize(h_rep);

  // smallest K with Wdot <= K W over the window, then a 5% safety factor
  struct WSample {
    double x1, x2, Wdot, W;
    std::size_t corner;
  };
  std::vector<WSample> samples;
  samples.reserve(grid.n1 * grid.n2 * corners.size());
  double ratio = -kInf;
  for (std::size_t i = 0; i < grid.n1; ++i) {
    const double x1 = linspace(x1_lo, x1_hi, grid.n1, i);
    for (std::size_t j = 0; j < grid.n2; ++j) {
      const double x2 = linspace(x2_lo, x2_hi, grid.n2, j);
      const double u = law(x1, x2);
      const double W = absorbing_W(sc, x1, x2);
      double g[2];
      absorbing_W_gradient(sc, x1, x2, g);
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const auto rates = transformed_rhs(sc, x1, x2, u, corners[c][0], corners[c][1]);
        const double Wdot = g[0] * rates.dx1 + g[1] * rates.dx2;
        ratio = std::max(ratio, Wdot / W);
        samples.push_back({x1, x2, Wdot, W, c});
      }
    }
  }
  cert.K_W = std::isfinite(ratio) ? std::max(0.0, 1.05 * ratio) : kInf;
  auto w_rep = new_report("reach", "W_growth", grid.n1, grid.n2, window, false);
  for (const auto& smp : samples)
    consider(w_rep, smp.Wdot - cert.K_W * smp.W, smp.x1, smp.x2, corners[smp.corner]);
  finalize(w_rep);
  if (!std::isfinite(cert.K_W)) w_rep.passed = false;

  cert.reports.push_back(std::move(h_rep));
  cert.reports.push_back(std::move(w_rep));
  return cert;
}

namespace {

struct NdGrid {
  std::vector<double> lower, upper;
  std::vector<std::size_t> points;
  std::size_t total() const {
    std::size_t t = 1;
    for (auto p : points) t *= p;
    return t;
  }
  void point(std::size_t flat, StateVector& x) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t k = flat % points[i];
      flat /= points[i];
      x[i] = linspace(lower[i], upper[i], points[i], k);
    }
  }
};

NdGrid make_grid(std::size_t dim, const std::vector<double>& lower, const std::vector<double>& upper,
                 const std::vector<std::size_t>& points) {
  if (lower.size() != dim || upper.size() != dim || points.size() != dim)
    throw InvalidArgument("verification window does not match the state dimension");
  for (std::size_t i = 0; i < dim; ++i)
    if (!(lower[i] < upper[i]) || points[i] < 2)
      throw InvalidArgument("verification window needs lower < upper and at least 2 points");
  return {lower, upper, points};
}

std::vector<StateVector> box_corners(const CompactBox& box) {
  if (box.dim() == 0) return {StateVector{}};
  return box.corners();
}

CertificateReport nd_report(std::string region, std::string check, const NdGrid& g, bool strict) {
  CertificateReport rep;
  rep.region = std::move(region);
  rep.check = std::move(check);
  rep.grid = g.points;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    rep.window.push_back(g.lower[i]);
    rep.window.push_back(g.upper[i]);
  }
  rep.strict = strict;
  return rep;
}

void consider_nd(CertificateReport& rep, double margin, const StateVector& x, const StateVector& d) {
  ++rep.points;
  if (margin > rep.worst_margin || rep.witness.empty()) {
    rep.worst_margin = std::max(margin, rep.worst_margin);
    rep.witness = x;
    rep.witness_d = d;
  }
}

double dot(const StateVector& a, const StateVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<CertificateReport> verify_relaxed_clf_conditions(const RelaxedClfProblem& pb) {
  const std::size_t n = pb.system.dim;
  if (!pb.delta) throw InvalidArgument("decrement function must be supplied");
  for (int j = 0; j <= 1000; ++j) {
    const double s = 0.1 * j;
    if (!(pb.delta(s) > 0.0))
      throw InvalidArgument("decrement function must map into (0, inf); fails at s = " +
                            std::to_string(s));
  }
  if (!(pb.eps > 0.0) || !(pb.K >= 0.0)) throw InvalidArgument("need eps > 0 and K >= 0");
  const NdGrid grid = make_grid(n, pb.lower, pb.upper, pb.points);
  const auto corners = box_corners(pb.system.box);

  auto h_rep = nd_report("h_nonneg", "h_decrease", grid, false);
  auto w_rep = nd_report("h_nonneg", "W_growth", grid, false);
  auto v_rep = nd_report("h_below_eps", "V_decrease", grid, true);
  auto band = nd_report("band", "all_three", grid, false);

  StateVector x(n), f(n), g(n), gv(n), gh(n), gw(n), xdot(n);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    grid.point(flat, x);
    const double h = pb.h.value(x);
    const bool upper_set = h >= 0.0;
    const bool lower_set = h <= pb.eps && euclidean_norm(x) > pb.origin_exclusion;
    if (!upper_set && !lower_set) continue;
    const double u = pb.law(x);
    pb.V.gradient(x, gv);
    pb.h.gradient(x, gh);
    pb.W.gradient(x, gw);
    const double W = pb.W.value(x);
    const double dec = upper_set ? pb.delta(h) : 0.0;
    for (const auto& d : corners) {
      pb.system.f(d, x, f);
      pb.system.g(d, x, g);
      for (std::size_t i = 0; i < n; ++i) xdot[i] = f[i] + g[i] * u;
      const double mh = dot(gh, xdot) + dec;
      const double mw = dot(gw, xdot) - pb.K * W;
      const double mv = dot(gv, xdot);
      if (upper_set) {
        consider_nd(h_rep, mh, x, d);
        consider_nd(w_rep, mw, x, d);
      }
      if (lower_set) consider_nd(v_rep, mv, x, d);
      if (upper_set && lower_set)
        consider_nd(band, std::max({mh, mw, mv + kStrictTolerance}), x, d);
    }
  }
  std::vector<CertificateReport> out{h_rep, w_rep, v_rep, band};
  for (auto& r : out) finalize(r);
  return out;
}

std::vector<CertificateReport> verify_constrained_input_conditions(
    const ConstrainedInputProblem& pb) {
  const std::size_t n = pb.system.dim;
  if (!(pb.a > 0.0) || !(pb.eps > 0.0 && pb.eps < pb.a) || !(pb.delta > 0.0) || !(pb.K >= 0.0))
    throw InvalidArgument("need a > 0, eps in (0, a), delta > 0, K >= 0");
  const NdGrid grid = make_grid(n, pb.lower, pb.upper, pb.points);
  const auto corners = box_corners(pb.system.box);
  const double a = pb.a, e = pb.eps;

  auto unconstrained = nd_report("constrained_input", "V_decrease_unsaturated", grid, true);
  auto w_band = nd_report("constrained_input", "W_growth_band", grid, false);
  auto w_sat = nd_report("constrained_input", "W_growth_saturated", grid, false);
  auto h_sat = nd_report("constrained_input", "h_decrease_saturated", grid, false);
  auto h_band = nd_report("constrained_input", "h_decrease_band", grid, false);

  StateVector x(n), f(n), g(n), gv(n), gw(n);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    grid.point(flat, x);
    pb.V.gradient(x, gv);
    pb.W.gradient(x, gw);
    const double W = pb.W.value(x);
    const double gam = pb.gamma(x);
    for (const auto& d : corners) {
      pb.system.f(d, x, f);
      pb.system.g(d, x, g);
      const double LfV = dot(gv, f), LgV = dot(gv, g);
      const double LfW = dot(gw, f), LgW = dot(gw, g);
      const double s = gam * LgV;  // h = s - a + eps
      StateVector gh(n);
      if (pb.h_gradient) pb.h_gradient(x, gh);
      for (std::size_t i = 0; i < n && !pb.h_gradient; ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[i]));
        StateVector xp = x, xm = x, gp(n), gm(n), gpv(n), gmv(n);
        xp[i] += step;
        xm[i] -= step;
        pb.V.gradient(xp, gpv);
        pb.V.gradient(xm, gmv);
        pb.system.g(d, xp, gp);
        pb.system.g(d, xm, gm);
        gh[i] = (pb.gamma(xp) * dot(gpv, gp) - pb.gamma(xm) * dot(gmv, gm)) / (2.0 * step);
      }
      const double Lfh = dot(gh, f), Lgh = dot(gh, g);
      if (euclidean_norm(x) > pb.origin_exclusion)
        consider_nd(unconstrained, LfV - gam * LgV * LgV, x, d);
      if (s >= a - e && s <= a) {
        // affine in u: the endpoints u = -a and u = -a + eps bound the interval
        consider_nd(w_band, std::max(LfW - a * LgW, LfW + (-a + e) * LgW) - pb.K * W, x, d);
        consider_nd(h_band, std::max(Lfh - a * Lgh, Lfh + (-a + e) * Lgh) + pb.delta, x, d);
      }
      if (s >= a) {
        consider_nd(w_sat, LfW - a * LgW - pb.K * W, x, d);
        consider_nd(h_sat, Lfh - a * Lgh + pb.delta, x, d);
      }
    }
  }
  std::vector<CertificateReport> out{unconstrained, w_band, w_sat, h_sat, h_band};
  for (auto& r : out) finalize(r);
  return out;
}

ControlAffineSystem planar_constrained_system() {
  ControlAffineSystem sys;
  sys.dim = 2;
  sys.f = [](std::span<const double>, std::span<const double> x, std::span<double> out) {
    out[0] = -x[0] + x[1];
    out[1] = 0.0;
  };
  sys.g = [](std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
    out[1] = 1.0;
  };
  return sys;
}

namespace {

GradientFunction half_square_norm() {
  return {[](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
          [](std::span<const double> x, std::span<double> g) {
            g[0] = x[0];
            g[1] = x[1];
          }};
}

}  // namespace

RelaxedClfProblem planar_relaxed_problem(std::size_t points_per_axis) {
  RelaxedClfProblem pb;
  pb.system = planar_constrained_system();
  pb.V = half_square_norm();
  pb.W = half_square_norm();
  pb.eps = 0.5;
  pb.K = 1.0;
  const double eps = pb.eps;
  pb.h = {[eps](std::span<const double> x) { return x[1] - 1.0 + eps; },
          [](std::span<const double>, std::span<double> g) {
            g[0] = 0.0;
            g[1] = 1.0;
          }};
  pb.delta = [](double) { return 0.5; };
  const auto sys = pb.system;
  const auto V = pb.V;
  pb.law = [sys, V](std::span<const double> x) {
    return constrained_quadratic_feedback(sys, V, [](std::span<const double>) { return 1.0; }, 1.0,
                                          x);
  };
  pb.lower = {-5.0, -5.0};
  pb.upper = {5.0, 5.0};
  pb.points = {points_per_axis, points_per_axis};
  return pb;
}

ConstrainedInputProblem planar_constrained_problem(std::size_t points_per_axis) {
  ConstrainedInputProblem pb;
  pb.system = planar_constrained_system();
  pb.V = half_square_norm();
  pb.W = half_square_norm();
  pb.gamma = [](std::span<const double>) { return 1.0; };
  // h = x2 - a + eps
  pb.h_gradient = [](std::span<const double>, std::span<double> g) {
    g[0] = 0.0;
    g[1] = 1.0;
  };
  pb.a = 1.0;
  pb.eps = 0.5;
  pb.K = 1.0;
  pb.delta = 0.5;
  pb.lower = {-5.0, -5.0};
  pb.upper = {5.0, 5.0};
  pb.points = {points_per_axis, points_per_axis};
  return pb;
}

std::function<double(double)> absorbing_level_radius(double c) {
  if (!(c > 0.0)) throw InvalidArgument("transform constant c must be positive");
  return [c](double s) {
    if (!(s > 1.0)) return 0.0;
    if (!std::isfinite(s)) return kInf;
    const double rho = std::sqrt(2.0 * (s - 1.0));
    constexpr int kGrid = 2001;
    double best = rho;
    for (int j = 0; j < kGrid; ++j) {
      const double x1 = linspace(-rho, rho, kGrid, j);
      const double rem = std::sqrt(std::max(0.0, rho * rho - x1 * x1));
      const double top = std::max(0.0, std::log(c + std::exp(x1))) + rem;
      best = std::max(best, std::hypot(x1, top));
    }
    return best;
  };
}

ReachBound reach_time_bound(double h0, double eps_hat, double delta0, double K_W, double W0,
                            const std::function<double(double)>& level_radius) {
  if (!(delta0 > 0.0)) throw InvalidArgument("decrement delta0 must be positive");
  if (!(eps_hat > 0.0)) throw InvalidArgument("eps_hat must be positive");
  if (!(K_W >= 0.0)) throw InvalidArgument("K_W must be non-negative");
  if (!(W0 >= 1.0)) throw InvalidArgument("W(x0) below the minimum of W");
  ReachBound out;
  out.T = std::max(0.0, h0 - eps_hat) / delta0;
  out.B = std::exp(K_W * out.T) * W0;
  if (!std::isfinite(out.B)) {
    out.G_bound = kInf;
    return out;
  }
  constexpr int kPanels = 64;
  double sum = 0.0;
  for (int j = 0; j <= kPanels; ++j) {
    const double w = out.B + static_cast<double>(j) / kPanels;
    sum += (j == 0 || j == kPanels ? 0.5 : 1.0) * level_radius(w);
  }
  out.G_bound = sum / kPanels;
  return out;
}

}  // namespace rclf
