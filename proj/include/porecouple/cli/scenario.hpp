#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "porecouple/component/registry.hpp"
#include "porecouple/coupling/simulation.hpp"

namespace porecouple::cli {

using Json = nlohmann::json;

/// A problem found in a scenario, located by its dotted config path.
struct Diagnostic {
  std::string path;
  std::string message;
};

std::string to_string(const Diagnostic& d);

/// Parses scenario text. Throws ParseError with line and column.
Json parse_scenario_text(const std::string& text);

/// Reads and parses a scenario file. Throws ParseError (also when unreadable).
Json load_scenario(const std::filesystem::path& path);

/// Applies "a.b[2].c=value". The value is read as JSON when it parses, otherwise as a
/// string. Missing object keys are created; array indices must exist.
void apply_override(Json& doc, const std::string& assignment);

/// Every problem that would stop the scenario from running; empty when runnable.
std::vector<Diagnostic> validate_scenario(const Json& doc,
                                          const component::Registry& registry = component::builtin_registry());

/// Loads and validates a file.
std::vector<Diagnostic> validate(const std::filesystem::path& path);

/// Converts a validated scenario into driver input. Chemistry regions become per-cell
/// initial rows; the last region containing a cell centroid wins.
coupling::SimulationSetup setup_from_scenario(const Json& doc);

}  // namespace porecouple::cli
