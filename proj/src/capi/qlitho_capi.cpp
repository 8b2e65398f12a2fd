#include "qlitho/qlitho.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "qlitho/absorption.hpp"
#include "qlitho/amplitude.hpp"
#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/scenario.hpp"

struct qlitho_context {
  qlitho::OpticalContext ctx;
};

struct qlitho_amplitude {
  qlitho::MomentumAmplitude amp;
};

struct qlitho_scan {
  qlitho::PatternScan scan;
};

struct qlitho_report {
  qlitho::ReportBundle bundle;
  std::string summary;
  std::string output_dir;
};

namespace {

thread_local std::string g_last_error;

qlitho_status status_of(qlitho::ErrorKind kind) {
  using qlitho::ErrorKind;
  switch (kind) {
    case ErrorKind::argument: return QLITHO_ERR_ARGUMENT;
    case ErrorKind::domain: return QLITHO_ERR_DOMAIN;
    case ErrorKind::capability: return QLITHO_ERR_CAPABILITY;
    case ErrorKind::resolution: return QLITHO_ERR_RESOLUTION;
    case ErrorKind::convergence: return QLITHO_ERR_CONVERGENCE;
    case ErrorKind::construction: return QLITHO_ERR_CONSTRUCTION;
    case ErrorKind::parse: return QLITHO_ERR_PARSE;
    case ErrorKind::validation: return QLITHO_ERR_VALIDATION;
    case ErrorKind::io: return QLITHO_ERR_IO;
  }
  return QLITHO_ERR_INTERNAL;
}

qlitho_status fail(qlitho_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
qlitho_status guarded(Body&& body) {
  try {
    body();
    return QLITHO_OK;
  } catch (const qlitho::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(QLITHO_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QLITHO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QLITHO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QLITHO_ERR_INTERNAL, "unknown error");
  }
}

qlitho::ModeSpectrum mode_of(double kappa0, double delta_kappa, qlitho_envelope envelope) {
  if (envelope == QLITHO_ENVELOPE_RECT) return qlitho::ModeSpectrum::rect(kappa0, delta_kappa);
  if (envelope != QLITHO_ENVELOPE_GAUSSIAN) throw qlitho::ArgumentError("unknown envelope");
  return qlitho::ModeSpectrum::gaussian(kappa0, delta_kappa);
}

qlitho::RunOptions convert(const qlitho_run_options* o) {
  qlitho::RunOptions r;
  if (!o) return r;
  if (o->output_dir) r.output_dir = std::filesystem::path(o->output_dir);
  if (o->has_seed_override) r.seed_override = o->seed_override;
  r.tolerance_scale = o->tolerance_scale;
  r.workers = o->workers;
  r.write_files = o->write_files != 0;
  if (o->formats) {
    r.formats.clear();
    std::stringstream ss(o->formats);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "csv") r.formats.push_back(qlitho::ReportFormat::csv);
      else if (item == "json") r.formats.push_back(qlitho::ReportFormat::json);
      else if (item == "plotdata") r.formats.push_back(qlitho::ReportFormat::plotdata);
      else throw qlitho::ArgumentError("unknown output format '" + item + "'");
    }
  }
  return r;
}

void apply_overrides(qlitho::Scenario& s, const qlitho_run_options* o) {
  if (!o || !o->parameter_overrides) return;
  const auto patch = nlohmann::json::parse(o->parameter_overrides);
  if (!patch.is_object()) throw qlitho::ArgumentError("parameter overrides must be a JSON object");
  s.parameters.merge_patch(patch);
}

qlitho_status run_into(qlitho::Scenario scenario, const qlitho_run_options* options,
                       qlitho_report** out) {
  return guarded([&] {
    apply_overrides(scenario, options);
    auto bundle = qlitho::run_scenario(scenario, convert(options));
    auto* report = new qlitho_report{std::move(bundle), {}, {}};
    report->summary = qlitho::summary_json(report->bundle).dump(2);
    report->output_dir = report->bundle.output_dir.string();
    *out = report;
  });
}

}  // namespace

extern "C" {

const char* qlitho_version(void) { return "0.1.0"; }

const char* qlitho_status_string(qlitho_status status) {
  switch (status) {
    case QLITHO_OK: return "ok";
    case QLITHO_ERR_ARGUMENT: return "argument error";
    case QLITHO_ERR_DOMAIN: return "domain error";
    case QLITHO_ERR_CAPABILITY: return "capability error";
    case QLITHO_ERR_RESOLUTION: return "resolution error";
    case QLITHO_ERR_CONVERGENCE: return "convergence error";
    case QLITHO_ERR_CONSTRUCTION: return "construction error";
    case QLITHO_ERR_PARSE: return "parse error";
    case QLITHO_ERR_VALIDATION: return "validation error";
    case QLITHO_ERR_IO: return "i/o error";
    case QLITHO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qlitho_last_error(void) { return g_last_error.c_str(); }

qlitho_status qlitho_context_create(double wavelength, double eta, int si_units,
                                    qlitho_context** out) {
  if (!out) return fail(QLITHO_ERR_ARGUMENT, "null output pointer");
  return guarded([&] {
    if (!(wavelength > 0.0)) throw qlitho::ArgumentError("wavelength must be positive");
    if (!(eta > 0.0)) throw qlitho::ArgumentError("eta must be positive");
    if (!si_units && wavelength != 1.0)
      throw qlitho::ArgumentError("dimensionless units fix the wavelength to 1");
    const double c = si_units ? qlitho::kSpeedOfLightSI : 1.0;
    *out = new qlitho_context{qlitho::OpticalContext::from_wavelength(wavelength, eta, c)};
  });
}

void qlitho_context_destroy(qlitho_context* ctx) { delete ctx; }

double qlitho_context_kappa_max(const qlitho_context* ctx) {
  return ctx ? ctx->ctx.kappa_max() : 0.0;
}

qlitho_status qlitho_geometric_factor(const qlitho_context* ctx, double kappa, double* out) {
  if (!ctx || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = qlitho::geometric_factor(kappa, ctx->ctx); });
}

qlitho_status qlitho_schwarz_bound(const qlitho_context* ctx, size_t n_photons, double* out) {
  if (!ctx || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = qlitho::schwarz_bound_density(ctx->ctx, n_photons); });
}

qlitho_status qlitho_amplitude_noon(size_t n_photons, double kappa0, double delta_kappa,
                                    qlitho_envelope envelope, qlitho_amplitude** out) {
  if (!out) return fail(QLITHO_ERR_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = new qlitho_amplitude{qlitho::make_noon(mode_of(kappa0, delta_kappa, envelope), n_photons)};
  });
}

qlitho_status qlitho_amplitude_classical(size_t n_photons, double kappa0, double delta_kappa,
                                         qlitho_envelope envelope, qlitho_amplitude** out) {
  if (!out) return fail(QLITHO_ERR_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = new qlitho_amplitude{
        qlitho::make_classical(mode_of(kappa0, delta_kappa, envelope), n_photons)};
  });
}

qlitho_status qlitho_amplitude_jointly_gaussian(size_t n_photons, double b_param,
                                                double beta_param, qlitho_amplitude** out) {
  if (!out) return fail(QLITHO_ERR_ARGUMENT, "null output pointer");
  return guarded([&] {
    qlitho::GaussianParams p{n_photons, b_param, beta_param, std::nullopt};
    *out = new qlitho_amplitude{qlitho::make_jointly_gaussian(p)};
  });
}

qlitho_status qlitho_amplitude_biphoton_slit(const qlitho_context* ctx, double a, double b,
                                             double alpha, double epsilon, int rect_correlation,
                                             qlitho_amplitude** out) {
  if (!ctx || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    qlitho::SlitExperiment e;
    e.slit_width = a;
    e.slit_spacing = b;
    e.coherence_length = alpha;
    e.epsilon = epsilon;
    e.corr_shape = rect_correlation ? qlitho::CorrelationShape::rect
                                    : qlitho::CorrelationShape::gaussian;
    e.ctx = ctx->ctx;
    *out = new qlitho_amplitude{qlitho::make_biphoton_slit(e)};
  });
}

qlitho_status qlitho_amplitude_custom_grid(const char* path, qlitho_amplitude** out) {
  if (!path || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new qlitho_amplitude{qlitho::make_custom_grid(qlitho::load_custom_grid(path))};
  });
}

void qlitho_amplitude_destroy(qlitho_amplitude* amp) { delete amp; }

size_t qlitho_amplitude_n_photons(const qlitho_amplitude* amp) {
  return amp ? amp->amp.n_photons() : 0;
}

size_t qlitho_amplitude_warning_count(const qlitho_amplitude* amp) {
  return amp ? amp->amp.warnings().size() : 0;
}

const char* qlitho_amplitude_warning(const qlitho_amplitude* amp, size_t i) {
  if (!amp || i >= amp->amp.warnings().size()) return nullptr;
  return amp->amp.warnings()[i].c_str();
}

qlitho_status qlitho_amplitude_evaluate(const qlitho_amplitude* amp, const double* kappas,
                                        size_t n, double* re, double* im) {
  if (!amp || (!kappas && n > 0) || !re || !im) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto v = amp->amp.evaluate(std::span<const double>(kappas, n));
    *re = v.real();
    *im = v.imag();
  });
}

qlitho_status qlitho_amplitude_normalization(const qlitho_amplitude* amp, uint64_t seed,
                                             double* value, double* error) {
  if (!amp || !value) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto nc = qlitho::verify_normalization(amp->amp, {}, seed);
    *value = nc.value;
    if (error) *error = nc.error;
  });
}

qlitho_status qlitho_absorption_pattern(const qlitho_amplitude* amp, const qlitho_context* ctx,
                                        qlitho_regime regime, double x_min, double x_max,
                                        size_t points, size_t workers, qlitho_scan** out) {
  if (!amp || !ctx || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (regime != QLITHO_PARAXIAL && regime != QLITHO_NONPARAXIAL)
      throw qlitho::ArgumentError("unknown regime");
    const auto r = regime == QLITHO_PARAXIAL ? qlitho::Regime::paraxial : qlitho::Regime::nonparaxial;
    const auto grid = qlitho::uniform_grid(x_min, x_max, points);
    *out = new qlitho_scan{qlitho::absorption_pattern(amp->amp, grid, r, ctx->ctx, {}, workers)};
  });
}

size_t qlitho_scan_size(const qlitho_scan* scan) { return scan ? scan->scan.grid.size() : 0; }

const double* qlitho_scan_grid(const qlitho_scan* scan) {
  return scan ? scan->scan.grid.data() : nullptr;
}

const double* qlitho_scan_values(const qlitho_scan* scan) {
  return scan ? scan->scan.values.data() : nullptr;
}

qlitho_status qlitho_scan_write(const qlitho_scan* scan, const char* csv_path) {
  if (!scan || !csv_path) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] { qlitho::write_pattern(scan->scan, csv_path); });
}

void qlitho_scan_destroy(qlitho_scan* scan) { delete scan; }

void qlitho_run_options_init(qlitho_run_options* options) {
  if (!options) return;
  options->output_dir = nullptr;
  options->has_seed_override = 0;
  options->seed_override = 0;
  options->tolerance_scale = 1.0;
  options->workers = 0;
  options->write_files = 1;
  options->formats = nullptr;
  options->parameter_overrides = nullptr;
}

qlitho_status qlitho_run_scenario_file(const char* path, const qlitho_run_options* options,
                                       qlitho_report** out) {
  if (!path || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  qlitho::Scenario scenario;
  const auto st = guarded([&] { scenario = qlitho::load_scenario(path); });
  if (st != QLITHO_OK) return st;
  return run_into(std::move(scenario), options, out);
}

qlitho_status qlitho_run_scenario_kind(const char* kind, const char* parameters_json,
                                       const qlitho_run_options* options, qlitho_report** out) {
  if (!kind || !out) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  qlitho::Scenario scenario;
  const auto st = guarded([&] {
    scenario.kind = qlitho::scenario_kind_from_string(kind);
    scenario.source = std::string("<") + kind + ">";
    if (parameters_json) {
      scenario.parameters = nlohmann::json::parse(parameters_json);
      if (!scenario.parameters.is_object())
        throw qlitho::ValidationError({"parameters must be a JSON object"});
    }
  });
  if (st != QLITHO_OK) return st;
  return run_into(std::move(scenario), options, out);
}

qlitho_status qlitho_validate_scenario_file(const char* path, const qlitho_run_options* options,
                                            char** effective_json) {
  if (!path || !effective_json) return fail(QLITHO_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto scenario = qlitho::load_scenario(path);
    apply_overrides(scenario, options);
    const std::string text = qlitho::validate_scenario(scenario, convert(options)).dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *effective_json = buf;
  });
}

size_t qlitho_scenario_kind_count(void) { return qlitho::all_scenario_kinds().size(); }

const char* qlitho_scenario_kind_name(size_t i) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto k : qlitho::all_scenario_kinds()) v.push_back(qlitho::to_string(k));
    return v;
  }();
  return i < names.size() ? names[i].c_str() : nullptr;
}

int qlitho_report_all_passed(const qlitho_report* report) {
  return report && report->bundle.all_passed() ? 1 : 0;
}

size_t qlitho_report_check_count(const qlitho_report* report) {
  return report ? report->bundle.checks.size() : 0;
}

qlitho_status qlitho_report_check(const qlitho_report* report, size_t i, const char** name,
                                  double* measured, double* expected, double* tolerance,
                                  int* pass) {
  if (!report) return fail(QLITHO_ERR_ARGUMENT, "null report");
  if (i >= report->bundle.checks.size()) return fail(QLITHO_ERR_ARGUMENT, "check index out of range");
  const auto& c = report->bundle.checks[i];
  if (name) *name = c.name.c_str();
  if (measured) *measured = c.measured;
  if (expected) *expected = c.expected;
  if (tolerance) *tolerance = c.tolerance;
  if (pass) *pass = c.pass ? 1 : 0;
  return QLITHO_OK;
}

const char* qlitho_report_summary_json(const qlitho_report* report) {
  return report ? report->summary.c_str() : nullptr;
}

const char* qlitho_report_output_dir(const qlitho_report* report) {
  return report ? report->output_dir.c_str() : nullptr;
}

void qlitho_report_destroy(qlitho_report* report) { delete report; }

void qlitho_string_free(char* s) { std::free(s); }

}  // extern "C"
