// qlitho command-line front end.
//
//   qlitho run <scenario-file> [options]
//   qlitho validate <scenario-file> [--set key=value ...]
//   qlitho <kind> [options]          run a scenario kind with --set parameters
//   qlitho kinds
//
// Exit status: 0 all checks passed, 1 at least one check failed, 2 error.

#include <CLI11.hpp>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qlitho/qlitho.h"

namespace {

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed_override;
  double tolerance_scale = 1.0;
  std::size_t workers = 0;
  std::vector<std::string> sets;
  std::string formats;
  bool print_json = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool run_options) {
  cmd->add_option("--set", c.sets, "Override a parameter: key=value (dotted keys for nesting)");
  if (!run_options) return;
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed-override", c.seed_override, "Replace the scenario's seed");
  cmd->add_option("--tolerance-scale", c.tolerance_scale, "Multiply every check tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
  cmd->add_option("--formats", c.formats, "Comma list of csv,json,plotdata (default all)");
  cmd->add_flag("--json", c.print_json, "Print the summary JSON instead of the check table");
  cmd->add_flag("-q,--quiet", c.quiet, "Only print the final line");
}

// "grid.points=1024" -> {"grid": {"points": 1024}}. Values are read as JSON
// when they parse, otherwise as strings.
nlohmann::json overrides_from(const std::vector<std::string>& sets) {
  nlohmann::json patch = nlohmann::json::object();
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const std::string text = s.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    nlohmann::json* node = &patch;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = nlohmann::json::object();
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return patch;
}

int report_error(qlitho_status st) {
  std::fprintf(stderr, "qlitho: %s: %s\n", qlitho_status_string(st), qlitho_last_error());
  return 2;
}

int print_report(qlitho_report* report, const Common& c) {
  const std::size_t n = qlitho_report_check_count(report);
  std::size_t failed = 0;
  if (c.print_json) std::printf("%s\n", qlitho_report_summary_json(report));
  for (std::size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    double measured = 0.0, expected = 0.0, tolerance = 0.0;
    int pass = 0;
    qlitho_report_check(report, i, &name, &measured, &expected, &tolerance, &pass);
    if (!pass) ++failed;
    if (!c.quiet && !c.print_json)
      std::printf("%s  %-44s measured %-22.15g expected %-22.15g tol %.3g\n", pass ? "PASS" : "FAIL",
                  name, measured, expected, tolerance);
  }
  const char* dir = qlitho_report_output_dir(report);
  if (!c.print_json) {
    if (failed == 0)
      std::printf("all %zu checks passed", n);
    else
      std::printf("%zu of %zu checks failed", failed, n);
    if (dir && *dir) std::printf("; outputs in %s", dir);
    std::printf("\n");
  }
  const int code = qlitho_report_all_passed(report) ? 0 : 1;
  qlitho_report_destroy(report);
  return code;
}

qlitho_run_options options_from(const Common& c, std::string& patch_text) {
  qlitho_run_options o;
  qlitho_run_options_init(&o);
  if (!c.out.empty()) o.output_dir = c.out.c_str();
  if (c.seed_override) {
    o.has_seed_override = 1;
    o.seed_override = *c.seed_override;
  }
  o.tolerance_scale = c.tolerance_scale;
  o.workers = c.workers;
  if (!c.formats.empty()) o.formats = c.formats.c_str();
  if (!c.sets.empty()) {
    patch_text = overrides_from(c.sets).dump();
    o.parameter_overrides = patch_text.c_str();
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlitho: multiphoton absorption patterns, scenario runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qlitho_version()));

  Common run_opts;
  std::string run_file;
  auto* run = app.add_subcommand("run", "Run a scenario file (.yaml, .yml or .json)");
  run->add_option("file", run_file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(run, run_opts, true);

  Common val_opts;
  std::string val_file;
  auto* validate = app.add_subcommand("validate", "Validate a scenario and print effective parameters");
  validate->add_option("file", val_file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(validate, val_opts, false);

  auto* kinds = app.add_subcommand("kinds", "List scenario kinds");

  std::vector<Common> kind_opts(qlitho_scenario_kind_count());
  std::vector<CLI::App*> kind_cmds;
  for (std::size_t i = 0; i < kind_opts.size(); ++i) {
    auto* cmd = app.add_subcommand(qlitho_scenario_kind_name(i),
                                   std::string("Run a ") + qlitho_scenario_kind_name(i) +
                                       " scenario from defaults and --set overrides");
    add_common(cmd, kind_opts[i], true);
    kind_cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*kinds) {
      for (std::size_t i = 0; i < qlitho_scenario_kind_count(); ++i)
        std::printf("%s\n", qlitho_scenario_kind_name(i));
      return 0;
    }
    if (*run) {
      std::string patch;
      const auto o = options_from(run_opts, patch);
      qlitho_report* report = nullptr;
      const auto st = qlitho_run_scenario_file(run_file.c_str(), &o, &report);
      if (st != QLITHO_OK) return report_error(st);
      return print_report(report, run_opts);
    }
    if (*validate) {
      std::string patch;
      const auto o = options_from(val_opts, patch);
      char* effective = nullptr;
      const auto st = qlitho_validate_scenario_file(val_file.c_str(), &o, &effective);
      if (st != QLITHO_OK) return report_error(st);
      std::printf("%s\n", effective);
      qlitho_string_free(effective);
      return 0;
    }
    for (std::size_t i = 0; i < kind_cmds.size(); ++i) {
      if (!*kind_cmds[i]) continue;
      std::string patch;
      const auto o = options_from(kind_opts[i], patch);
      qlitho_report* report = nullptr;
      const auto st =
          qlitho_run_scenario_kind(qlitho_scenario_kind_name(i), nullptr, &o, &report);
      if (st != QLITHO_OK) return report_error(st);
      return print_report(report, kind_opts[i]);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return 2;
}
