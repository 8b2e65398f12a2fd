#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qlitho/report.hpp"

namespace qlitho {

enum class ScenarioKind {
  noon_compare,
  gaussian_tradeoff,
  gaussian_pattern,
  dangelo_angular,
  dangelo_alpha_scan,
  bound_audit,
  rotation_audit,
  absorber_convergence,
};

std::string to_string(ScenarioKind kind);
/// Throws ArgumentError for unknown names.
ScenarioKind scenario_kind_from_string(const std::string& name);
const std::vector<ScenarioKind>& all_scenario_kinds();

/// A parsed (not yet validated) scenario.
struct Scenario {
  ScenarioKind kind = ScenarioKind::noon_compare;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<std::filesystem::path> output_dir;
  std::string source = "<inline>";
};

/// Parses scenario text. `json_encoding` selects JSON; otherwise the YAML
/// subset documented in docs/scenario_format.md. Throws ParseError with the
/// 1-based line and column of the offending token, or ValidationError when
/// the top-level layout is wrong.
Scenario parse_scenario(const std::string& text, bool json_encoding,
                        const std::string& source = "<inline>");

/// Reads a file; ".json" selects the JSON encoding. Throws IoError if the
/// file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  ///< overrides the scenario's
  std::optional<std::uint64_t> seed_override;
  double tolerance_scale = 1.0;                     ///< multiplies every check tolerance
  std::size_t workers = 0;                          ///< 0 = hardware concurrency
  bool write_files = true;
  std::vector<ReportFormat> formats{ReportFormat::csv, ReportFormat::plotdata, ReportFormat::json};
};

/// Fills defaults and checks every parameter; throws ValidationError listing
/// all violations. Returns the effective parameters.
nlohmann::json validate_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Validates, computes and (unless options.write_files is false) emits all
/// outputs. Errors raised during computation are rethrown with the scenario
/// kind and source prefixed to the message, keeping their kind.
ReportBundle run_scenario(const Scenario& scenario, const RunOptions& options = {});
ReportBundle run_scenario_file(const std::filesystem::path& path, const RunOptions& options = {});

/// Output directory used when neither the scenario nor the options name one.
std::filesystem::path default_output_dir(const Scenario& scenario);

}  // namespace qlitho
