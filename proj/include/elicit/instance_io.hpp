#pragma once

#include <string>

#include <json.hpp>

#include "elicit/instance.hpp"

namespace elicit {

/// {"points": [{"id", "coord"}], "weights": [...], "utility": [[u0, u1], ...]}.
/// Doubles are written in shortest round-trip form.
nlohmann::json instance_to_json(const TabularInstance<double>& inst);

/// Rational instances are written through their nearest doubles.
nlohmann::json instance_to_json(const TabularInstance<Rational>& inst);

/// Throws ConfigError on malformed input and std::invalid_argument when the
/// values fail instance validation.
TabularInstance<double> instance_from_json(const nlohmann::json& j);

TabularInstance<double> load_instance(const std::string& path);
void save_instance(const std::string& path, const TabularInstance<double>& inst);

/// Reads a JSON document from disk; ConfigError when unreadable or malformed.
nlohmann::json read_json_file(const std::string& path);

}  // namespace elicit
