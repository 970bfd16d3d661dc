#pragma once

// Internal JSON plumbing; json.hpp stays out of the installed headers.

#include <string>

#include <json.hpp>

#include "cvsel/criterion.hpp"
#include "cvsel/diagnostics.hpp"
#include "cvsel/simulate.hpp"

namespace cvsel {

using Json = nlohmann::ordered_json;

Json tool_json();

Json selection_report_json(const SelectionReport& report);
Json condition_report_json(const ConditionReport& report);
Json experiment_config_json(const ExperimentConfig& config);
Json experiment_report_json_obj(const ExperimentReport& report);

// Strict: unknown fields, wrong types, and malformed values throw ConfigError
// naming the offending field path.
ExperimentConfig experiment_config_from_json(const Json& j);

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name, const std::string& path);

std::string dump_json(const Json& j);

}  // namespace cvsel
