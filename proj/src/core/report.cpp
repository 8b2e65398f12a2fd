#include "qlitho/report.hpp"

#include <cmath>
#include <fstream>

#include "qlitho/errors.hpp"

namespace qlitho {

namespace {

std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw IoError("error while writing " + p.string());
}

}  // namespace

std::string to_string(CheckMode mode) {
  switch (mode) {
    case CheckMode::abs: return "abs";
    case CheckMode::rel: return "rel";
    case CheckMode::max: return "max";
    case CheckMode::min: return "min";
  }
  return "abs";
}

Check make_check(std::string name, double measured, double expected, double tolerance,
                 CheckMode mode, std::string note) {
  Check c{std::move(name), measured, expected, tolerance, mode, false, std::move(note)};
  if (std::isnan(measured)) return c;
  switch (mode) {
    case CheckMode::abs: c.pass = std::abs(measured - expected) <= tolerance; break;
    case CheckMode::rel: c.pass = std::abs(measured - expected) <= tolerance * std::abs(expected); break;
    case CheckMode::max: c.pass = measured <= expected + tolerance; break;
    case CheckMode::min: c.pass = measured >= expected - tolerance; break;
  }
  return c;
}

bool ReportBundle::all_passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* ReportBundle::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json summary_json(const ReportBundle& bundle) {
  nlohmann::json j;
  j["schema"] = "qlitho.summary/1";
  j["kind"] = bundle.kind;
  j["source"] = bundle.source;
  j["parameters"] = bundle.parameters;
  j["options"] = bundle.options;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : bundle.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["measured"] = c.measured;
    cj["expected"] = c.expected;
    cj["tolerance"] = c.tolerance;
    cj["mode"] = to_string(c.mode);
    cj["pass"] = c.pass;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["results"] = bundle.results;
  j["warnings"] = bundle.warnings;
  j["files"] = bundle.files;
  j["all_passed"] = bundle.all_passed();
  return j;
}

void emit_report(ReportBundle& bundle, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
  auto wants = [&](ReportFormat f) {
    for (auto g : formats)
      if (g == f) return true;
    return false;
  };

  if (wants(ReportFormat::csv)) {
    for (const auto& t : bundle.tables) {
      const auto p = dir / (t.name + ".csv");
      auto out = open_for_write(p);
      for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
      out << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << "\n";
      }
      finish(out, p);
      bundle.files.push_back(t.name + ".csv");
    }
    for (const auto& pat : bundle.patterns) {
      write_pattern(pat.scan, dir / (pat.name + ".csv"));
      bundle.files.push_back(pat.name + ".csv");
      bundle.files.push_back(pat.name + ".json");
    }
  }
  if (wants(ReportFormat::plotdata)) {
    for (const auto& c : bundle.curves) {
      const auto p = dir / (c.name + ".dat");
      auto out = open_for_write(p);
      out << "# " << c.x_label << " " << c.y_label << "\n";
      for (std::size_t i = 0; i < c.x.size(); ++i)
        out << format_number(c.x[i]) << " " << format_number(c.y[i]) << "\n";
      finish(out, p);
      bundle.files.push_back(c.name + ".dat");
    }
  }
  if (wants(ReportFormat::json)) {
    bundle.files.push_back("summary.json");
    const auto p = dir / "summary.json";
    auto out = open_for_write(p);
    out << summary_json(bundle).dump(2) << "\n";
    finish(out, p);
  }
}

}  // namespace qlitho
