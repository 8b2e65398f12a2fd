/* Exercises the C interface from a C translation unit. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qlitho/qlitho.h"

static const double QL_PI = 3.14159265358979323846;
static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

#define CHECK_OK(expr) CHECK((expr) == QLITHO_OK)

static void test_context(void) {
  qlitho_context* ctx = NULL;
  double g = 0.0, bound = 0.0;
  CHECK_OK(qlitho_context_create(1.0, 1.0, 0, &ctx));
  CHECK(fabs(qlitho_context_kappa_max(ctx) - 2.0 * QL_PI) < 1e-14);
  CHECK_OK(qlitho_geometric_factor(ctx, 0.8 * qlitho_context_kappa_max(ctx), &g));
  CHECK(fabs(g - 1.0 / sqrt(0.6)) < 1e-13);
  CHECK(qlitho_geometric_factor(ctx, 10.0, &g) == QLITHO_ERR_DOMAIN);
  CHECK(strlen(qlitho_last_error()) > 0);
  CHECK_OK(qlitho_schwarz_bound(ctx, 2, &bound));
  CHECK(fabs(bound - 2.0 * QL_PI * QL_PI) < 1e-12);
  CHECK(qlitho_context_create(-1.0, 1.0, 0, &ctx) == QLITHO_ERR_ARGUMENT);
  qlitho_context_destroy(ctx);
}

static void test_pattern(void) {
  qlitho_context* ctx = NULL;
  qlitho_amplitude* noon = NULL;
  qlitho_amplitude* cl = NULL;
  qlitho_scan* a = NULL;
  qlitho_scan* b = NULL;
  double value = 0.0, err = 0.0;
  CHECK_OK(qlitho_context_create(1.0, 1.0, 0, &ctx));
  CHECK_OK(qlitho_amplitude_noon(3, 1.0, 0.05, QLITHO_ENVELOPE_GAUSSIAN, &noon));
  CHECK_OK(qlitho_amplitude_classical(3, 1.0, 0.05, QLITHO_ENVELOPE_GAUSSIAN, &cl));
  CHECK(qlitho_amplitude_n_photons(noon) == 3);
  CHECK(qlitho_amplitude_warning_count(noon) == 0);
  CHECK(qlitho_amplitude_warning(noon, 0) == NULL);
  CHECK_OK(qlitho_amplitude_normalization(noon, 1, &value, &err));
  CHECK(fabs(value - 1.0) < 1e-6);
  CHECK_OK(qlitho_absorption_pattern(noon, ctx, QLITHO_PARAXIAL, -1.0, 1.0, 201, 1, &a));
  CHECK_OK(qlitho_absorption_pattern(cl, ctx, QLITHO_PARAXIAL, -1.0, 1.0, 201, 2, &b));
  CHECK(qlitho_scan_size(a) == 201);
  CHECK(fabs(qlitho_scan_grid(a)[100]) < 1e-15);
  /* Peaks at x = 0 differ by 2^(N-1). */
  CHECK(fabs(qlitho_scan_values(b)[100] / qlitho_scan_values(a)[100] - 4.0) < 1e-9);
  {
    double k[3] = {-1.0, -1.0, -1.0};
    double re = 0.0, im = 0.0;
    CHECK_OK(qlitho_amplitude_evaluate(noon, k, 3, &re, &im));
    CHECK(re > 0.0);
    CHECK(qlitho_amplitude_evaluate(noon, k, 2, &re, &im) == QLITHO_ERR_ARGUMENT);
  }
  CHECK(qlitho_absorption_pattern(noon, ctx, QLITHO_PARAXIAL, -100.0, 100.0, 11, 1, &a) ==
        QLITHO_ERR_RESOLUTION);
  CHECK(qlitho_amplitude_noon(2, 1.0, 0.5, QLITHO_ENVELOPE_GAUSSIAN, &noon) ==
        QLITHO_ERR_CONSTRUCTION);
  qlitho_scan_destroy(a);
  qlitho_scan_destroy(b);
  qlitho_amplitude_destroy(noon);
  qlitho_amplitude_destroy(cl);
  qlitho_context_destroy(ctx);
}

static void test_other_states(void) {
  qlitho_context* ctx = NULL;
  qlitho_amplitude* g = NULL;
  qlitho_amplitude* slit = NULL;
  qlitho_amplitude* grid = NULL;
  double value = 0.0, err = 0.0;
  CHECK_OK(qlitho_context_create(1.0, 1.0, 0, &ctx));
  CHECK_OK(qlitho_amplitude_jointly_gaussian(2, 0.5, 1.0, &g));
  CHECK_OK(qlitho_amplitude_normalization(g, 1, &value, &err));
  CHECK(fabs(value - 1.0) < 1e-6);
  CHECK(qlitho_amplitude_jointly_gaussian(2, -0.5, 1.0, &g) == QLITHO_ERR_CONSTRUCTION);
  CHECK_OK(qlitho_amplitude_biphoton_slit(ctx, 20.0, 40.0, 1.0, 0.1, 0, &slit));
  CHECK(qlitho_amplitude_n_photons(slit) == 2);
  CHECK(qlitho_amplitude_custom_grid("/nonexistent/grid.txt", &grid) == QLITHO_ERR_IO);
  qlitho_amplitude_destroy(g);
  qlitho_amplitude_destroy(slit);
  qlitho_context_destroy(ctx);
}

static void test_scenarios(void) {
  qlitho_run_options opts;
  qlitho_report* report = NULL;
  const char* name = NULL;
  double measured = 0.0, expected = 0.0, tol = 0.0;
  int pass = 0;
  size_t i, n;
  int found = 0;
  qlitho_run_options_init(&opts);
  CHECK(opts.tolerance_scale == 1.0);
  CHECK(opts.write_files == 1);
  opts.write_files = 0;
  opts.parameter_overrides = "{\"r_points\": 20}";
  CHECK(qlitho_scenario_kind_count() == 8);
  CHECK(strcmp(qlitho_scenario_kind_name(0), "noon_compare") == 0);
  CHECK(qlitho_scenario_kind_name(8) == NULL);
  CHECK_OK(qlitho_run_scenario_kind("gaussian_tradeoff", "{\"n_values\": [2, 3]}", &opts, &report));
  CHECK(qlitho_report_all_passed(report) == 1);
  n = qlitho_report_check_count(report);
  CHECK(n > 0);
  for (i = 0; i < n; ++i) {
    CHECK_OK(qlitho_report_check(report, i, &name, &measured, &expected, &tol, &pass));
    if (strcmp(name, "R_at_r1_N3") == 0) {
      found = 1;
      CHECK(fabs(measured - 1.0) < 1e-12);
    }
  }
  CHECK(found);
  CHECK(qlitho_report_check(report, n, &name, NULL, NULL, NULL, NULL) == QLITHO_ERR_ARGUMENT);
  CHECK(strstr(qlitho_report_summary_json(report), "\"schema\": \"qlitho.summary/1\"") != NULL);
  CHECK(strstr(qlitho_report_summary_json(report), "\"r_points\": 20") != NULL);
  CHECK(strcmp(qlitho_report_output_dir(report), "") == 0);
  qlitho_report_destroy(report);

  CHECK(qlitho_run_scenario_kind("no_such_kind", NULL, &opts, &report) == QLITHO_ERR_ARGUMENT);
  CHECK(qlitho_run_scenario_kind("noon_compare", "{\"kappa0\": -1}", &opts, &report) ==
        QLITHO_ERR_VALIDATION);
  CHECK(strstr(qlitho_last_error(), "kappa0") != NULL);
  CHECK(qlitho_run_scenario_kind("noon_compare", "{oops", &opts, &report) == QLITHO_ERR_PARSE);
  CHECK(qlitho_run_scenario_file("/nonexistent.yaml", &opts, &report) == QLITHO_ERR_IO);
  CHECK(strcmp(qlitho_status_string(QLITHO_ERR_VALIDATION), "validation error") == 0);
}

int main(void) {
  CHECK(strlen(qlitho_version()) > 0);
  test_context();
  test_pattern();
  test_other_states();
  test_scenarios();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return EXIT_FAILURE;
  }
  printf("C API tests passed\n");
  return EXIT_SUCCESS;
}
