#include "rclf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rclf/error.hpp"

namespace rclf {

namespace {

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  TomlValue parse_all() {
    TomlValue v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  TomlValue parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  TomlValue parse_string() {
    TomlValue v;
    v.kind = TomlValue::Kind::String;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  TomlValue parse_array() {
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    ++pos_;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      v.items.push_back(parse_value());
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
      } else if (pos_ < s_.size() && s_[pos_] != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  TomlValue parse_scalar() {
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[end])))
      ++end;
    std::string tok(s_.substr(pos_, end - pos_));
    pos_ = end;
    TomlValue v;
    if (tok == "true" || tok == "false") {
      v.kind = TomlValue::Kind::Boolean;
      v.boolean = tok == "true";
      return v;
    }
    std::string digits;
    for (char c : tok)
      if (c != '_') digits.push_back(c);
    if (digits.empty()) fail("empty value");
    char* stop = nullptr;
    v.number = std::strtod(digits.c_str(), &stop);
    if (stop != digits.c_str() + digits.size()) fail("cannot parse value '" + tok + "'");
    v.integer = digits.find_first_of(".eEin") == std::string::npos;
    return v;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
  }
  return depth;
}

}  // namespace

TomlDocument parse_toml(std::string_view text) {
  TomlDocument doc;
  doc[""];
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() < 3 || line.back() != ']' || line[1] == '[')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (doc.count(section) && section != "")
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty() || key.find_first_not_of(
                           "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                           std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    std::string value = line.substr(eq + 1);
    const std::size_t start_line = line_no;
    while (bracket_balance(value) > 0 && std::getline(in, raw)) {
      ++line_no;
      value += "\n" + strip_comment(raw);
    }
    auto& table = doc[section];
    if (table.count(key))
      throw ConfigError("line " + std::to_string(start_line) + ": duplicate key '" + key + "'");
    table[key] = ValueParser(value, start_line).parse_all();
  }
  return doc;
}

namespace {

class Section {
 public:
  Section(const TomlDocument& doc, std::string name) : name_(std::move(name)) {
    auto it = doc.find(name_);
    if (it != doc.end()) table_ = &it->second;
  }

  bool present() const { return table_ != nullptr; }
  bool has(const std::string& key) const { return table_ && table_->count(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError("[" + (name_.empty() ? std::string("top level") : name_) + "] " + key + ": " + msg);
  }

  const TomlValue* get(const std::string& key) {
    used_.insert(key);
    if (!table_) return nullptr;
    auto it = table_->find(key);
    return it == table_->end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const auto* v = get(key);
    return v ? as_number(key, *v) : fallback;
  }

  double required_number(const std::string& key) {
    const auto* v = get(key);
    if (!v) fail(key, "required key missing");
    return as_number(key, *v);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    const double d = as_number(key, *v);
    if (!v->integer || d < 0) fail(key, "expected a non-negative integer");
    return static_cast<std::size_t>(d);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    const double d = as_number(key, *v);
    if (!v->integer || d < 0 || d > 9.007199254740992e15) fail(key, "expected a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::Boolean) fail(key, "expected true or false");
    return v->boolean;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::String) fail(key, "expected a string");
    return v->text;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Array) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : v->items) out.push_back(as_number(key, item));
    return out;
  }

  std::optional<std::vector<StepSegment>> schedule(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Array) fail(key, "expected an array of [until, step] pairs");
    std::vector<StepSegment> out;
    for (const auto& item : v->items) {
      if (item.kind != TomlValue::Kind::Array || item.items.size() != 2)
        fail(key, "expected an array of [until, step] pairs");
      out.push_back({as_number(key, item.items[0]), as_number(key, item.items[1])});
    }
    return out;
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : *table_)
      if (!used_.count(key)) fail(key, "unknown key");
  }

 private:
  double as_number(const std::string& key, const TomlValue& v) const {
    if (v.kind != TomlValue::Kind::Number) fail(key, "expected a number");
    return v.number;
  }

  std::string name_;
  const std::map<std::string, TomlValue>* table_ = nullptr;
  std::set<std::string> used_;
};

GrowthModel read_growth(Section& s) {
  const std::string kind = s.text("kind", "haldane");
  const double scale = s.required_number("mu_max");
  const double K1 = s.required_number("K1");
  try {
    if (kind == "monod") return GrowthModel::monod(scale, K1);
    const double K2 = s.required_number("K2");
    if (kind == "haldane") return GrowthModel::haldane(scale, K1, K2);
    if (kind == "generalized_haldane")
      return GrowthModel::generalized_haldane(scale, K1, K2, s.required_number("exponent"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    s.fail("kind", e.what());
  }
  s.fail("kind", "expected monod, haldane or generalized_haldane");
}

}  // namespace

const ChemostatScenario& ScenarioConfig::require_scenario() const {
  if (!growth) throw ConfigError("missing [growth] section in " + origin);
  if (!scenario) throw ConfigError("missing [chemostat] section in " + origin);
  return *scenario;
}

const BacksteppingConfig& ScenarioConfig::require_backstepping() const {
  if (!backstepping) throw ConfigError("missing [backstepping] section in " + origin);
  return *backstepping;
}

ScenarioConfig parse_config(std::string_view text, const std::string& origin) {
  const TomlDocument doc = parse_toml(text);
  static const std::set<std::string> known{"",        "growth",  "chemostat",    "uncertainty",
                                           "feedback", "integrator", "harness", "backstepping",
                                           "washout"};
  for (const auto& [name, table] : doc)
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");

  ScenarioConfig cfg;
  cfg.origin = origin;

  Section top(doc, "");
  cfg.master_seed = top.seed("master_seed", 42);
  cfg.output_dir = top.text("output_dir", "out");
  top.finish();

  Section unc(doc, "uncertainty");
  const double a = unc.number("a", 0.0);
  const double switch_dt = unc.number("switch_dt", 0.1);
  unc.finish();

  Section fb(doc, "feedback");
  cfg.family = fb.text("family", "relaxed");
  static const std::set<std::string> families{"relaxed",   "rclf",         "classical",
                                              "mailleret", "backstepping", "constrained"};
  if (!families.count(cfg.family))
    fb.fail("family", "expected one of relaxed, rclf, classical, mailleret, backstepping, constrained");
  cfg.psi.slope = fb.number("psi_slope", 5.0);
  cfg.l.l0 = fb.number("l0", 1.0);
  cfg.W_weight = fb.number("W_weight", 1.0);
  try {
    cfg.psi.validate();
  } catch (const Error& e) {
    fb.fail("psi_slope", e.what());
  }
  try {
    cfg.l.validate();
  } catch (const Error& e) {
    fb.fail("l0", e.what());
  }
  if (!(cfg.W_weight > 0.0)) fb.fail("W_weight", "must be positive");
  fb.finish();

  Section gr(doc, "growth");
  Section ch(doc, "chemostat");
  if (gr.present()) cfg.growth = read_growth(gr);
  gr.finish();
  if (ch.present()) {
    if (!cfg.growth) throw ConfigError("missing [growth] section in " + origin);
    const double S_i = ch.required_number("S_i");
    const double K = ch.number("K", 1.0);
    const double b = ch.number("b", 0.0);
    const bool has_Ss = ch.has("S_s"), has_Ds = ch.has("D_s");
    if (has_Ss == has_Ds) ch.fail("S_s", "give exactly one of S_s and D_s");
    if (ch.has("m") && ch.has("m_factor")) ch.fail("m", "give at most one of m and m_factor");
    const double m_direct = ch.number("m", 0.0);
    const double m_factor = ch.number("m_factor", 0.0);
    const std::string branch = ch.text("branch", "");
    if (!branch.empty() && branch != "ascending" && branch != "descending")
      ch.fail("branch", "expected ascending or descending");
    try {
      if (has_Ss) {
        const double S_s = ch.required_number("S_s");
        const double D_s = growth_rate(*cfg.growth, S_s) - b;
        if (!(D_s > 0.0))
          ch.fail("b", "mu(S_s) - b <= 0: growth cannot exceed mortality, so S2 also fails");
        const double m = ch.has("m_factor") ? m_factor * K * D_s : m_direct;
        cfg.scenario = scenario_from_substrate(S_i, K, b, m, S_s, *cfg.growth, a);
      } else {
        const double D_s = ch.required_number("D_s");
        const double m = ch.has("m_factor") ? m_factor * K * D_s : m_direct;
        std::optional<Branch> hint;
        if (branch == "ascending") hint = Branch::Ascending;
        if (branch == "descending") hint = Branch::Descending;
        cfg.scenario = solve_equilibrium(S_i, K, b, m, D_s, *cfg.growth, hint, a);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      ch.fail(has_Ss ? "S_s" : "D_s", e.what());
    }
  }
  ch.finish();

  Section in(doc, "integrator");
  cfg.urgas.step = in.number("step", 1e-3);
  cfg.urgas.horizon = in.number("horizon", 60.0);
  if (auto w = in.schedule("warmup")) cfg.urgas.warmup = *w;
  cfg.urgas.switch_dt = switch_dt;
  auto initial = in.numbers("initial");
  auto initial_phys = in.numbers("initial_physical");
  if (initial && initial_phys) in.fail("initial", "give at most one of initial and initial_physical");
  if (initial) {
    if (initial->size() != 2) in.fail("initial", "expected [x1, x2]");
    cfg.initial = *initial;
  }
  if (initial_phys) {
    if (initial_phys->size() != 2) in.fail("initial_physical", "expected [X, S]");
    if (!cfg.scenario) in.fail("initial_physical", "needs a [chemostat] section");
    try {
      const auto t = to_transformed(*cfg.scenario, (*initial_phys)[0], (*initial_phys)[1]);
      cfg.initial = StateVector{t.x1, t.x2};
    } catch (const Error& e) {
      in.fail("initial_physical", e.what());
    }
  }
  in.finish();

  Section hs(doc, "harness");
  cfg.urgas.trials = hs.count("trials", 200);
  cfg.urgas.init_radius = hs.number("init_radius", 3.0);
  if (auto e = hs.numbers("eps_levels")) cfg.urgas.eps_levels = *e;
  cfg.urgas.terminal_tol = hs.number("terminal_tol", 1e-2);
  cfg.urgas.delta_probes = hs.count("delta_probes", 8);
  cfg.urgas.delta_bisections = static_cast<int>(hs.count("delta_bisections", 8));
  cfg.urgas.master_seed = cfg.master_seed;
  if (auto av = hs.numbers("a_values")) cfg.a_values = *av;
  const std::size_t gp = hs.count("grid_points", 400);
  cfg.grid.n1 = cfg.grid.n2 = gp;
  cfg.grid.pad = hs.number("grid_pad", 3.0);
  cfg.entry.trials = hs.count("entry_trials", 100);
  cfg.entry.horizon = hs.number("entry_horizon", 20.0);
  cfg.entry_h_max = hs.number("entry_h_max", 5.0);
  cfg.entry_x2_range = hs.number("entry_x2_range", 1.0);
  cfg.dump_trajectories = hs.boolean("dump_trajectories", false);
  hs.finish();
  cfg.entry.seed = cfg.master_seed + 1;
  cfg.entry.step = cfg.urgas.step;
  cfg.entry.switch_dt = cfg.urgas.switch_dt;
  cfg.entry.warmup = cfg.urgas.warmup;
  try {
    cfg.urgas.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("[integrator]/[harness] ") + e.what());
  }

  Section wo(doc, "washout");
  cfg.washout.tolerance = wo.number("tolerance", 0.01);
  if (auto s = wo.schedule("washout_schedule")) cfg.washout.washout_schedule = *s;
  if (auto s = wo.schedule("recovery_schedule")) cfg.washout.recovery_schedule = *s;
  if (auto s = wo.schedule("repair_schedule")) cfg.washout.repair_schedule = *s;
  cfg.washout.psi = cfg.psi;
  cfg.washout.l = cfg.l;
  wo.finish();

  Section bs(doc, "backstepping");
  if (bs.present()) {
    BacksteppingConfig b;
    b.n = bs.count("n", 2);
    if (b.n < 1) bs.fail("n", "must be at least 1");
    b.q = bs.number("q", b.q);
    b.L = bs.number("L", b.L);
    b.r = bs.number("r", b.r);
    b.R = bs.number("R", b.R);
    b.disturbance_level = bs.number("disturbance_level", b.disturbance_level);
    b.design.mu0 = bs.number("mu0", 1.0);
    const auto c_tilde = bs.numbers("c_tilde");
    const auto eta_factor = bs.numbers("eta_factor");
    const auto eta = bs.numbers("eta");
    if (!c_tilde || c_tilde->size() != b.n) bs.fail("c_tilde", "expected one value per stage");
    if (eta_factor && eta_factor->size() != b.n) bs.fail("eta_factor", "expected one value per stage");
    if (eta && eta->size() != b.n) bs.fail("eta", "expected one value per stage");
    for (std::size_t i = 0; i < b.n; ++i) {
      StageDesign st;
      st.c_tilde = (*c_tilde)[i];
      if (eta_factor) st.eta_factor = (*eta_factor)[i];
      if (eta) st.eta = (*eta)[i];
      b.design.stages.push_back(st);
    }
    b.urgas.trials = bs.count("trials", 50);
    b.urgas.init_radius = bs.number("init_radius", 0.5);
    b.urgas.horizon = bs.number("horizon", 60.0);
    b.urgas.step = bs.number("step", 1e-4);
    b.urgas.switch_dt = bs.number("switch_dt", 0.1);
    b.urgas.terminal_tol = bs.number("terminal_tol", 1e-2);
    if (auto e = bs.numbers("eps_levels")) b.urgas.eps_levels = *e;
    b.urgas.delta_probes = bs.count("delta_probes", 2);
    b.urgas.delta_bisections = static_cast<int>(bs.count("delta_bisections", 4));
    b.urgas.master_seed = cfg.master_seed;
    if (auto x0 = bs.numbers("initial")) {
      if (x0->size() != b.n) bs.fail("initial", "expected n values");
      b.initial = *x0;
    }
    try {
      b.urgas.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("[backstepping] ") + e.what());
    }
    cfg.backstepping = b;
  }
  bs.finish();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace rclf
