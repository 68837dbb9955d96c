#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rclf/chemostat.hpp"
#include "rclf/dynamics.hpp"
#include "rclf/feedback.hpp"
#include "rclf/harness.hpp"

namespace rclf {

/// Value of the small TOML subset used by scenario files.
struct TomlValue {
  enum class Kind { Number, Boolean, String, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool integer = false;
  bool boolean = false;
  std::string text;
  std::vector<TomlValue> items;
};

/// section name ("" for top-level keys) -> key -> value
using TomlDocument = std::map<std::string, std::map<std::string, TomlValue>>;

/// Parses comments, [section] headers, key = value pairs with numbers, booleans,
/// basic strings and (nested, possibly multi-line) arrays.
TomlDocument parse_toml(std::string_view text);

struct BacksteppingConfig {
  std::size_t n = 2;
  double q = 0.005;
  double L = 0.005;
  double r = 1.0;
  double R = 1.1;
  double disturbance_level = 1.0;
  BacksteppingDesign design;
  UrgasConfig urgas;
  std::optional<StateVector> initial;  // single reported run
};

struct ScenarioConfig {
  std::string origin;
  std::uint64_t master_seed = 42;
  std::string output_dir = "out";

  std::optional<GrowthModel> growth;
  std::optional<ChemostatScenario> scenario;
  std::string family = "relaxed";
  PsiSpec psi;
  LSpec l;
  double W_weight = 1.0;

  UrgasConfig urgas;  // integrator + harness settings
  std::optional<StateVector> initial;  // log coordinates
  std::vector<double> a_values{0.0, 0.05, 0.5, 5.0};
  GridSpec grid;
  EntryConfig entry;
  double entry_h_max = 5.0;
  double entry_x2_range = 1.0;
  bool dump_trajectories = false;
  WashoutConfig washout;

  std::optional<BacksteppingConfig> backstepping;

  /// Throws ConfigError naming the missing section when no chemostat is defined.
  const ChemostatScenario& require_scenario() const;
  const BacksteppingConfig& require_backstepping() const;
};

ScenarioConfig parse_config(std::string_view text, const std::string& origin = "<string>");
ScenarioConfig load_config(const std::string& path);

}  // namespace rclf
