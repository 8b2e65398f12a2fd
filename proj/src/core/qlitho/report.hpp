#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qlitho/absorption.hpp"

namespace qlitho {

/// How a check compares `measured` against `expected`:
///   abs  |measured - expected| <= tolerance
///   rel  |measured - expected| <= tolerance * |expected|
///   max  measured <= expected + tolerance
///   min  measured >= expected - tolerance
enum class CheckMode { abs, rel, max, min };

std::string to_string(CheckMode mode);

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  CheckMode mode = CheckMode::abs;
  bool pass = false;
  std::string note;
};

/// Builds a check and evaluates it. NaN measurements never pass.
Check make_check(std::string name, double measured, double expected, double tolerance,
                 CheckMode mode, std::string note = {});

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// One curve of a figure; emitted as a two-column whitespace-separated file.
struct Curve {
  std::string name;  ///< file stem
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

struct NamedPattern {
  std::string name;  ///< file stem
  PatternScan scan;
};

struct ReportBundle {
  std::string kind;
  std::string source;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json options = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<Curve> curves;
  std::vector<NamedPattern> patterns;
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> files;  ///< relative names of files written
  std::filesystem::path output_dir;  ///< where files went; not part of the summary

  bool all_passed() const;
  const Check* find_check(const std::string& name) const;
};

enum class ReportFormat { csv, json, plotdata };

/// Machine-readable summary (schema "qlitho.summary/1").
nlohmann::json summary_json(const ReportBundle& bundle);

/// Writes the requested formats into `dir` (created if missing):
///   csv       <table>.csv and <pattern>.csv (+ <pattern>.json sidecar)
///   plotdata  <curve>.dat
///   json      summary.json
/// File names are appended to bundle.files. Output is byte-identical for
/// identical bundles. Throws IoError when the directory is not writable.
void emit_report(ReportBundle& bundle, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats = {ReportFormat::csv,
                                                            ReportFormat::plotdata,
                                                            ReportFormat::json});

}  // namespace qlitho
