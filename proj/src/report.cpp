#include "rclf/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "rclf/error.hpp"

namespace rclf {

namespace {

// JSON has no literal for non-finite numbers.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

Json eps_map(const std::vector<EpsStatistic>& stats) {
  Json out = Json::array();
  for (const auto& s : stats) out.push_back({{"eps", num(s.eps)}, {"value", num(s.value)}});
  return out;
}

const char* growth_kind(GrowthKind k) {
  switch (k) {
    case GrowthKind::Monod: return "monod";
    case GrowthKind::Haldane: return "haldane";
    case GrowthKind::GeneralizedHaldane: return "generalized_haldane";
  }
  return "unknown";
}

}  // namespace

Json to_json(const ChemostatScenario& sc) {
  return {{"S_i", num(sc.S_i)},
          {"K", num(sc.K)},
          {"b", num(sc.b)},
          {"m", num(sc.m)},
          {"D_s", num(sc.D_s)},
          {"a", num(sc.a)},
          {"S_s", num(sc.S_s)},
          {"X_s", num(sc.X_s)},
          {"c", num(sc.c)},
          {"G", num(sc.G)},
          {"growth",
           {{"kind", growth_kind(sc.growth.kind)},
            {"mu_max", num(sc.growth.mu_max_scale)},
            {"K1", num(sc.growth.K1)},
            {"K2", num(sc.growth.K2)},
            {"exponent", num(sc.growth.exponent)}}}};
}

Json to_json(const S2Certificate& s2) {
  return {{"S_plus", num(s2.S_plus)},
          {"p", num(s2.p)},
          {"x1_plus", num(s2.x1_plus)},
          {"x1_star", num(s2.x1_star)}};
}

Json to_json(const RclfConstants& k) {
  return {{"delta", num(k.delta)}, {"beta_min", num(k.beta_min)}, {"beta_max", num(k.beta_max)},
          {"eps", num(k.eps)},     {"r", num(k.r)},               {"L", num(k.L)},
          {"B", num(k.B)},         {"M", num(k.M)},               {"A", num(k.A)},
          {"x1_star", num(k.x1_star)}, {"p", num(k.p)}};
}

Json to_json(const InequalityCheck& check) {
  return {{"name", check.name}, {"worst_slack", num(check.worst_slack)}, {"passed", check.passed}};
}

Json to_json(const CertificateReport& r) {
  return {{"region", r.region},
          {"check", r.check},
          {"grid", r.grid},
          {"window", nums(r.window)},
          {"worst_margin", num(r.worst_margin)},
          {"witness", nums(r.witness)},
          {"witness_d", nums(r.witness_d)},
          {"points", r.points},
          {"strict", r.strict},
          {"passed", r.passed}};
}

Json to_json(const RelaxedCertificate& cert) {
  Json reports = Json::array();
  for (const auto& r : cert.reports) reports.push_back(to_json(r));
  return {{"delta0", num(cert.delta0)},
          {"eps_hat", num(cert.eps_hat)},
          {"K_W", num(cert.K_W)},
          {"reports", reports},
          {"passed", cert.passed()}};
}

Json to_json(const UrgasReport& r) {
  return {{"trials", r.trials},
          {"lagrange_sup", num(r.lagrange_sup)},
          {"empirical_lyapunov_delta", eps_map(r.lyapunov_delta)},
          {"empirical_attractivity_tau", eps_map(r.attractivity_tau)},
          {"entry_violations", r.entry_violations},
          {"diverged_trials", r.diverged_trials},
          {"converged_fraction", num(r.converged_fraction)},
          {"max_terminal_norm", num(r.max_terminal_norm)},
          {"passed", r.passed}};
}

Json to_json(const EntryReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"x0", nums(s.x0)},
                       {"h0", num(s.h0)},
                       {"T", num(s.T)},
                       {"G_bound", num(s.G_bound)},
                       {"entry_time", s.entry_time ? num(*s.entry_time) : Json(nullptr)},
                       {"sup_before_entry", num(s.sup_before_entry)},
                       {"reexit", s.reexit}});
  return {{"trials", r.trials},
          {"bound_violations", r.bound_violations},
          {"reexit_events", r.reexit_events},
          {"excursion_violations", r.excursion_violations},
          {"worst_entry_ratio", num(r.worst_entry_ratio)},
          {"passed", r.passed()},
          {"samples", samples}};
}

Json to_json(const SweepReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back({{"a", num(e.a)}, {"report", to_json(e.report)}});
  return {{"entries", entries},
          {"probe_states", r.probe_states},
          {"law_identical", r.law_identical},
          {"passed", r.passed}};
}

Json to_json(const WashoutResult& w) {
  Json out{{"S1", num(w.S1)},
           {"S2", num(w.S2)},
           {"washout", w.washed_out},
           {"washout_time", w.washout_time ? num(*w.washout_time) : Json(nullptr)},
           {"recovered", w.recovered},
           {"repaired", w.repaired},
           {"repair_final", {{"X", num(w.repair_final.X)}, {"S", num(w.repair_final.S)}}}};
  if (w.recovery.size() > 0) {
    const auto f = w.recovery.final_state();
    out["recovery_final"] = {{"X", num(f[0])}, {"S", num(f[1])}};
  }
  return out;
}

Json to_json(const SaturatedGains& gains, const GainCertificate& certificate) {
  Json stages = Json::array();
  for (std::size_t i = 0; i < gains.a.size(); ++i) {
    Json s{{"a", num(gains.a[i])}, {"p", num(gains.p[i])}};
    if (i < certificate.stages.size()) {
      const auto& st = certificate.stages[i];
      s["a_lower"] = num(st.a_lower);
      s["eta"] = num(st.eta);
      s["c_tilde"] = num(st.c_tilde);
      s["bound_inverse_c"] = num(st.bound_inverse_c);
      s["bound_decay"] = num(st.bound_decay);
      s["C"] = num(st.C);
      s["b"] = num(st.b);
      s["mu"] = num(st.mu);
    }
    stages.push_back(s);
  }
  return {{"stages", stages}};
}

void write_json_file(const std::string& path, const Json& value) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + path);
  out << value.dump(2) << '\n';
}

void write_svg_plot(std::ostream& os, const std::string& title, const std::vector<double>& t,
                    const std::vector<PlotSeries>& series) {
  constexpr double width = 720.0, panel = 180.0, margin = 50.0;
  const double height = margin + series.size() * (panel + margin);
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const double t0 = t.empty() ? 0.0 : t.front();
  const double t1 = t.empty() ? 1.0 : t.back();
  const double tspan = t1 > t0 ? t1 - t0 : 1.0;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double top = margin + k * (panel + margin);
    const double left = margin + 30.0, plot_w = width - left - 20.0;
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
       << panel << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << left << "\" y=\"" << top - 6 << "\">" << s.name << "  ["
       << format_double(lo) << ", " << format_double(hi) << "]</text>\n";
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 4] << "\" stroke-width=\"1.2\" points=\"";
    // thin to at most ~2000 vertices
    const std::size_t n = std::min(t.size(), s.values.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
      const double v = s.values[i];
      if (!std::isfinite(v)) continue;
      const double x = left + plot_w * (t[i] - t0) / tspan;
      const double y = top + panel * (1.0 - (v - lo) / (hi - lo));
      os << x << ',' << y << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + plot_w - 40 << "\" y=\"" << top + panel + 16 << "\">t = "
       << format_double(t1) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace rclf
