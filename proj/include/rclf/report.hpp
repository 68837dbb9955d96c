#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rclf/certify.hpp"
#include "rclf/chemostat.hpp"
#include "rclf/feedback.hpp"
#include "rclf/harness.hpp"

namespace rclf {

using Json = nlohmann::ordered_json;

Json to_json(const ChemostatScenario& sc);
Json to_json(const S2Certificate& s2);
Json to_json(const RclfConstants& k);
Json to_json(const InequalityCheck& check);
Json to_json(const CertificateReport& report);
Json to_json(const RelaxedCertificate& cert);
Json to_json(const UrgasReport& report);
Json to_json(const EntryReport& report);
Json to_json(const SweepReport& report);
Json to_json(const WashoutResult& result);
Json to_json(const SaturatedGains& gains, const GainCertificate& certificate);

/// Pretty-printed JSON followed by a newline; creates parent directories.
void write_json_file(const std::string& path, const Json& value);

struct PlotSeries {
  std::string name;
  std::vector<double> values;
};

/// Stacked line panels sharing the time axis, one per series.
void write_svg_plot(std::ostream& os, const std::string& title, const std::vector<double>& t,
                    const std::vector<PlotSeries>& series);

}  // namespace rclf
