/* qlitho C interface.
 *
 * Every function that can fail returns a qlitho_status. On failure the
 * message is available from qlitho_last_error() on the same thread until the
 * next failing call on that thread. Handles are opaque; each *_create or
 * producing call is paired with a *_destroy. Handles are immutable after
 * creation and may be shared between threads.
 */
#ifndef QLITHO_QLITHO_H
#define QLITHO_QLITHO_H

#include <stddef.h>
#include <stdint.h>

#if defined(QLITHO_BUILDING_LIBRARY)
#define QLITHO_API __attribute__((visibility("default")))
#else
#define QLITHO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlitho_status {
  QLITHO_OK = 0,
  QLITHO_ERR_ARGUMENT = 1,     /* invalid argument or null pointer */
  QLITHO_ERR_DOMAIN = 2,       /* momentum outside the light cone, bad rotation */
  QLITHO_ERR_CAPABILITY = 3,   /* computation path unavailable for this input */
  QLITHO_ERR_RESOLUTION = 4,   /* grid too coarse for the requested pattern */
  QLITHO_ERR_CONVERGENCE = 5,  /* quadrature did not reach its tolerance */
  QLITHO_ERR_CONSTRUCTION = 6, /* state invariants violated */
  QLITHO_ERR_PARSE = 7,        /* scenario or grid file syntax; message has line:column */
  QLITHO_ERR_VALIDATION = 8,   /* scenario parameters; message lists every violation */
  QLITHO_ERR_IO = 9,
  QLITHO_ERR_INTERNAL = 10
} qlitho_status;

QLITHO_API const char* qlitho_version(void);
QLITHO_API const char* qlitho_status_string(qlitho_status status);
/* Message of the last failing call on this thread ("" if none). */
QLITHO_API const char* qlitho_last_error(void);

/* ---- optical context ---------------------------------------------------- */

typedef struct qlitho_context qlitho_context;

/* si_units = 0: lengths in wavelengths, wavelength must be 1.
 * si_units = 1: wavelength in metres, c = 299792458 m/s. */
QLITHO_API qlitho_status qlitho_context_create(double wavelength, double eta, int si_units,
                                               qlitho_context** out);
QLITHO_API void qlitho_context_destroy(qlitho_context* ctx);
QLITHO_API double qlitho_context_kappa_max(const qlitho_context* ctx);

/* gamma(kappa) = (1 - c^2 kappa^2 / omega^2)^(-1/4). */
QLITHO_API qlitho_status qlitho_geometric_factor(const qlitho_context* ctx, double kappa,
                                                 double* out);
/* N! (pi eta / lambda)^N. */
QLITHO_API qlitho_status qlitho_schwarz_bound(const qlitho_context* ctx, size_t n_photons,
                                              double* out);

/* ---- momentum amplitudes ------------------------------------------------ */

typedef struct qlitho_amplitude qlitho_amplitude;

typedef enum qlitho_envelope { QLITHO_ENVELOPE_GAUSSIAN = 0, QLITHO_ENVELOPE_RECT = 1 } qlitho_envelope;

QLITHO_API qlitho_status qlitho_amplitude_noon(size_t n_photons, double kappa0, double delta_kappa,
                                               qlitho_envelope envelope, qlitho_amplitude** out);
QLITHO_API qlitho_status qlitho_amplitude_classical(size_t n_photons, double kappa0,
                                                    double delta_kappa, qlitho_envelope envelope,
                                                    qlitho_amplitude** out);
QLITHO_API qlitho_status qlitho_amplitude_jointly_gaussian(size_t n_photons, double b_param,
                                                           double beta_param,
                                                           qlitho_amplitude** out);
/* rect_correlation = 0 selects a Gaussian correlation function g. */
QLITHO_API qlitho_status qlitho_amplitude_biphoton_slit(const qlitho_context* ctx, double a,
                                                        double b, double alpha, double epsilon,
                                                        int rect_correlation,
                                                        qlitho_amplitude** out);
/* Loads a "qlitho-grid 1" file. */
QLITHO_API qlitho_status qlitho_amplitude_custom_grid(const char* path, qlitho_amplitude** out);
QLITHO_API void qlitho_amplitude_destroy(qlitho_amplitude* amp);

QLITHO_API size_t qlitho_amplitude_n_photons(const qlitho_amplitude* amp);
/* Number of construction warnings; qlitho_amplitude_warning returns the i-th
 * (owned by the handle) or NULL when out of range. */
QLITHO_API size_t qlitho_amplitude_warning_count(const qlitho_amplitude* amp);
QLITHO_API const char* qlitho_amplitude_warning(const qlitho_amplitude* amp, size_t i);
/* phi at n momenta; n must equal the photon number. */
QLITHO_API qlitho_status qlitho_amplitude_evaluate(const qlitho_amplitude* amp,
                                                   const double* kappas, size_t n, double* re,
                                                   double* im);
/* integral |phi|^2; *error is a quadrature estimate or a Monte Carlo
 * standard error. */
QLITHO_API qlitho_status qlitho_amplitude_normalization(const qlitho_amplitude* amp, uint64_t seed,
                                                        double* value, double* error);

/* ---- absorption patterns ------------------------------------------------ */

typedef enum qlitho_regime { QLITHO_PARAXIAL = 0, QLITHO_NONPARAXIAL = 1 } qlitho_regime;

typedef struct qlitho_scan qlitho_scan;

/* N! eta^N |psi(x..x)|^2 on a uniform grid of `points` from x_min to x_max.
 * workers = 0 uses every hardware thread; results do not depend on it. */
QLITHO_API qlitho_status qlitho_absorption_pattern(const qlitho_amplitude* amp,
                                                   const qlitho_context* ctx,
                                                   qlitho_regime regime, double x_min,
                                                   double x_max, size_t points, size_t workers,
                                                   qlitho_scan** out);
QLITHO_API size_t qlitho_scan_size(const qlitho_scan* scan);
QLITHO_API const double* qlitho_scan_grid(const qlitho_scan* scan);
QLITHO_API const double* qlitho_scan_values(const qlitho_scan* scan);
/* Writes "x,rate" CSV plus a ".json" metadata sidecar. */
QLITHO_API qlitho_status qlitho_scan_write(const qlitho_scan* scan, const char* csv_path);
QLITHO_API void qlitho_scan_destroy(qlitho_scan* scan);

/* ---- scenarios ---------------------------------------------------------- */

typedef struct qlitho_report qlitho_report;

typedef struct qlitho_run_options {
  const char* output_dir;          /* NULL: scenario's output_dir or qlitho_out/<name> */
  int has_seed_override;
  uint64_t seed_override;
  double tolerance_scale;          /* multiplies every check tolerance; default 1 */
  size_t workers;                  /* 0: hardware concurrency */
  int write_files;                 /* default 1 */
  const char* formats;             /* comma list of csv,json,plotdata; NULL: all */
  const char* parameter_overrides; /* JSON object merged into the parameters; may be NULL */
} qlitho_run_options;

QLITHO_API void qlitho_run_options_init(qlitho_run_options* options);

/* options may be NULL for defaults. */
QLITHO_API qlitho_status qlitho_run_scenario_file(const char* path,
                                                  const qlitho_run_options* options,
                                                  qlitho_report** out);
/* kind: one of qlitho_scenario_kind_name(i); parameters_json may be NULL. */
QLITHO_API qlitho_status qlitho_run_scenario_kind(const char* kind, const char* parameters_json,
                                                  const qlitho_run_options* options,
                                                  qlitho_report** out);
/* Validation only. On success *effective_json holds the effective parameters;
 * release it with qlitho_string_free. */
QLITHO_API qlitho_status qlitho_validate_scenario_file(const char* path,
                                                       const qlitho_run_options* options,
                                                       char** effective_json);

QLITHO_API size_t qlitho_scenario_kind_count(void);
QLITHO_API const char* qlitho_scenario_kind_name(size_t i);

QLITHO_API int qlitho_report_all_passed(const qlitho_report* report);
QLITHO_API size_t qlitho_report_check_count(const qlitho_report* report);
/* Any output pointer may be NULL. *name stays owned by the report. */
QLITHO_API qlitho_status qlitho_report_check(const qlitho_report* report, size_t i,
                                             const char** name, double* measured,
                                             double* expected, double* tolerance, int* pass);
/* Summary JSON (schema "qlitho.summary/1"), owned by the report. */
QLITHO_API const char* qlitho_report_summary_json(const qlitho_report* report);
/* Directory the files were written to ("" when nothing was written). */
QLITHO_API const char* qlitho_report_output_dir(const qlitho_report* report);
QLITHO_API void qlitho_report_destroy(qlitho_report* report);

QLITHO_API void qlitho_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QLITHO_QLITHO_H */
