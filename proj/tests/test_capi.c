/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "fdecon/fdecon.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "[FAIL] %s:%d %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define CHECK_OK(call)                                                                         \
  do {                                                                                         \
    fdecon_status st_ = (call);                                                                \
    if (st_ != FDECON_OK) {                                                                    \
      fprintf(stderr, "[FAIL] %s:%d %s -> %s: %s\n", __FILE__, __LINE__, #call,                \
              fdecon_status_name(st_), fdecon_last_error());                                   \
      ++failures;                                                                              \
    }                                                                                          \
  } while (0)

static void test_grids(void) {
  double samples[16];
  for (int i = 0; i < 16; ++i) samples[i] = i * 0.5;
  fdecon_grid* g = NULL;
  CHECK_OK(fdecon_grid_create(2, 8, 0.25, samples, &g));
  CHECK(fdecon_grid_profiles(g) == 2);
  CHECK(fdecon_grid_length(g) == 8);
  CHECK(fdecon_grid_sigma(g) == 0.25);
  CHECK(fdecon_grid_rank(g) == 1);
  CHECK(fdecon_grid_dim(g, 0) == 2);
  CHECK(fdecon_grid_data(g)[5] == 2.5);
  CHECK_OK(fdecon_grid_set_sigma(g, 1.5));
  CHECK(fdecon_grid_sigma(g) == 1.5);
  CHECK(fdecon_grid_set_sigma(g, -1.0) == FDECON_E_CONFIG);

  const char* path = "capi_grid_test.fdg";
  CHECK_OK(fdecon_grid_write(g, path));
  fdecon_grid* back = NULL;
  CHECK_OK(fdecon_grid_read(path, &back));
  CHECK(back != NULL && memcmp(fdecon_grid_data(back), samples, sizeof samples) == 0);
  CHECK(back != NULL && fdecon_grid_sigma(back) == 1.5);
  fdecon_grid_free(back);
  remove(path);

  fdecon_grid* bad = NULL;
  CHECK(fdecon_grid_create(2, 6, 0.0, samples, &bad) == FDECON_E_CONFIG);
  CHECK(bad == NULL);
  CHECK(strstr(fdecon_last_error(), "power of two") != NULL);
  CHECK(fdecon_grid_create(2, 8, 0.0, NULL, &bad) == FDECON_E_ARGUMENT);
  CHECK(fdecon_grid_read("/nonexistent/file.fdg", &bad) == FDECON_E_IO);

  size_t dims[2] = {2, 4};
  double nd[64] = {0};
  fdecon_grid* g2 = NULL;
  CHECK_OK(fdecon_grid_create_nd(dims, 2, 8, 0.0, nd, &g2));
  CHECK(fdecon_grid_rank(g2) == 2);
  CHECK(fdecon_grid_profiles(g2) == 8);
  CHECK(fdecon_grid_dim(g2, 1) == 4);
  fdecon_grid_free(g2);
  fdecon_grid_free(g);
  fdecon_grid_free(NULL);
}

static void test_deconvolution(void) {
  fdecon_sim_options sim;
  fdecon_sim_options_default(&sim);
  CHECK(sim.m == 256 && sim.n == 512 && sim.runs == 100 && sim.f1 == FDECON_QUADRATIC && sim.f2 == FDECON_BLIP);
  sim.m = 32;
  sim.n = 128;
  sim.runs = 3;
  sim.seed = 5;

  fdecon_grid *data = NULL, *truth = NULL, *ksamples = NULL;
  CHECK_OK(fdecon_simulate(&sim, 0, &data, &truth));
  CHECK_OK(fdecon_paper_kernel_grid(32, 128, &ksamples));
  fdecon_kernel* kernel = NULL;
  CHECK_OK(fdecon_kernel_from_grid(ksamples, &kernel));

  double nu = 0, c1 = 0;
  CHECK_OK(fdecon_kernel_estimate_nu(kernel, 0, 0, &nu, &c1, NULL));
  CHECK(nu > 1.5 && nu < 2.5 && c1 > 0);
  CHECK(fdecon_kernel_estimate_nu(kernel, 4, 8, &nu, NULL, NULL) == FDECON_E_INSUFFICIENT_RANGE);

  fdecon_options opts;
  fdecon_options_default(&opts);
  CHECK(opts.mode == FDECON_FUNCTIONAL && isnan(opts.c_beta) && isnan(opts.nu) && opts.finest == -1);
  fdecon_result* res = NULL;
  CHECK_OK(fdecon_deconvolve(data, kernel, &opts, &res));
  const fdecon_grid* est = fdecon_result_estimate(res);
  CHECK(fdecon_grid_profiles(est) == 32 && fdecon_grid_length(est) == 128);

  fdecon_resolved info;
  CHECK_OK(fdecon_result_info(res, &info));
  CHECK(info.finest >= 3 && info.finest_prime <= 5);
  CHECK(fabs(info.epsilon - 0.5 / sqrt(32.0 * 128.0)) < 1e-15);
  CHECK(info.kept <= info.coefficients && info.kept > 0);
  CHECK(info.c_beta > 0 && info.c_beta_theory > info.c_beta);

  double err = 0;
  for (size_t i = 0; i < 32 * 128; ++i) {
    const double d = fdecon_grid_data(est)[i] - fdecon_grid_data(truth)[i];
    err += d * d;
  }
  CHECK(isfinite(err));

  double s2 = 1.0, norm = -1;
  CHECK_OK(fdecon_result_besov_norm(res, 2.0, &s2, 1, 2.0, INFINITY, &norm));
  CHECK(norm > 0);
  CHECK(fdecon_result_besov_norm(res, 2.0, &s2, 2, 2.0, 2.0, &norm) == FDECON_E_ARGUMENT ||
        fdecon_result_besov_norm(res, 2.0, &s2, 2, 2.0, 2.0, &norm) == FDECON_E_CONFIG);
  CHECK_OK(fdecon_result_write_coeffs(res, "capi_coeffs_test.csv"));
  remove("capi_coeffs_test.csv");
  fdecon_result_free(res);

  opts.mode = 7;
  CHECK(fdecon_deconvolve(data, kernel, &opts, &res) == FDECON_E_ARGUMENT);
  sim.f1 = 9;
  fdecon_grid* unused = NULL;
  CHECK(fdecon_simulate(&sim, 0, &unused, NULL) == FDECON_E_ARGUMENT);
  sim.f1 = FDECON_QUADRATIC;
  fdecon_options_default(&opts);
  opts.finest = 2;
  CHECK(fdecon_deconvolve(data, kernel, &opts, &res) == FDECON_E_LEVEL_TOO_COARSE);
  opts.finest = 9;
  CHECK(fdecon_deconvolve(data, kernel, &opts, &res) == FDECON_E_LEVEL_TOO_FINE);

  /* Paired MISE evaluation of both modes. */
  fdecon_options both[2];
  fdecon_options_default(&both[0]);
  fdecon_options_default(&both[1]);
  both[1].mode = FDECON_SEPARATE;
  fdecon_mise out[2];
  double per_run[6];
  CHECK_OK(fdecon_run_mise(&sim, both, 2, out, per_run));
  CHECK(out[0].mode == FDECON_FUNCTIONAL && out[1].mode == FDECON_SEPARATE);
  CHECK(out[0].runs == 3 && out[0].sd_mise >= 0);
  CHECK(fabs((per_run[0] + per_run[1] + per_run[2]) / 3 - out[0].mean_mise) < 1e-12);

  fdecon_grid_free(data);
  fdecon_grid_free(truth);
  fdecon_grid_free(ksamples);
  fdecon_kernel_free(kernel);

  /* A zero-mean kernel loses the DC term. */
  fdecon_grid* flat = NULL;
  double tone[64];
  for (int i = 0; i < 64; ++i) tone[i] = cos(2 * 3.141592653589793 * i / 64.0);
  CHECK_OK(fdecon_grid_create(1, 64, 0.0, tone, &flat));
  CHECK(fdecon_kernel_from_grid(flat, &kernel) == FDECON_E_ILL_POSED_KERNEL);
  fdecon_grid_free(flat);
}

static void test_rates(void) {
  fdecon_rate r;
  double s2 = 1.0;
  CHECK_OK(fdecon_rate_exponent(2.0, &s2, 1, 2.0, 1.0, &r));
  CHECK(fabs(r.d - 4.0 / 7.0) < 1e-15 && r.regime == FDECON_DENSE_TIME && !r.exact);

  const char* s2s[3] = {"1", "1", "2"};
  CHECK_OK(fdecon_rate_exponent_exact("4", s2s, 3, "2", "1", &r));
  CHECK(r.exact && r.d_num == 2 && r.d_den == 3 && r.d1 == 1);
  CHECK_OK(fdecon_rate_exponent_exact("1.2", s2s, 1, "1", "2", &r));
  CHECK(r.d_num == 7 && r.d_den == 27 && r.regime == FDECON_SPARSE);
  CHECK_OK(fdecon_rate_exponent_exact("3", s2s, 1, "inf", "1", &r));
  CHECK(r.dense_boundary && r.d1 == 1);
  CHECK(fdecon_rate_exponent_exact("x", s2s, 1, "2", "1", &r) == FDECON_E_CONFIG);
  CHECK(fdecon_rate_exponent(2.0, &s2, 1, 0.5, 1.0, &r) == FDECON_E_CONFIG);

  fdecon_comparison c;
  CHECK_OK(fdecon_compare(10.0, 0.6, 0.0, 4.0, 65536.0, &c));
  CHECK(c.verdict == FDECON_SEPARATE_BETTER && c.surrogate < 1);
  CHECK_OK(fdecon_compare(2.0, 1.0, 1.0, 4.0, 65536.0, &c));
  CHECK(c.verdict == FDECON_FUNCTIONAL_BETTER && isnan(c.surrogate));
  CHECK(strcmp(fdecon_regime_name(FDECON_DENSE_SPATIAL), "DenseSpatial") == 0);
  CHECK(strcmp(fdecon_verdict_name(FDECON_BOUNDARY), "Boundary") == 0);
}

static void test_misc(void) {
  int f = -1;
  CHECK_OK(fdecon_function_parse("Bumps", &f));
  CHECK(f == FDECON_BUMPS);
  CHECK(fdecon_function_parse("doppler", &f) == FDECON_E_CONFIG);
  CHECK(strcmp(fdecon_function_name(FDECON_QUADRATIC), "quadratic") == 0);
  CHECK(strcmp(fdecon_status_name(FDECON_E_LEVEL_TOO_FINE), "LevelTooFine") == 0);
  CHECK(fdecon_version() != NULL && strlen(fdecon_version()) > 0);
}

int main(void) {
  test_grids();
  test_deconvolution();
  test_rates();
  test_misc();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
