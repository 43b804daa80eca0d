#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dasee/model.hpp"
#include "dasee/report.hpp"

namespace dasee {

using nlohmann::json;

json to_json(const Scenario& sc);
Scenario scenario_from_json(const json& j);

json to_json(const ScenarioParams& p);
// Unknown keys are rejected with InvalidConfig.
ScenarioParams params_from_json(const json& j);

json to_json(const Channel& ch);
Channel channel_from_json(const json& j, const Scenario& sc);

json to_json(const SolveReport& r);

json read_json_file(const std::string& path);

// Shortest text that round-trips the double exactly.
std::string format_double(double v);

}  // namespace dasee
