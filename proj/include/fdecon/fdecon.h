/* C interface to the fdecon functional-deconvolution library.
 *
 * Objects are opaque handles released with the matching *_free call. Every
 * fallible function returns an fdecon_status; on failure the thread-local
 * message from fdecon_last_error() names the module and parameter at fault.
 * Returned `const` pointers are borrowed and live as long as their owner.
 */
#ifndef FDECON_H
#define FDECON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdecon_status {
  FDECON_OK = 0,
  FDECON_E_CONFIG = 1,
  FDECON_E_ILL_POSED_KERNEL = 2,
  FDECON_E_INSUFFICIENT_RANGE = 3,
  FDECON_E_LEVEL_TOO_COARSE = 4,
  FDECON_E_LEVEL_TOO_FINE = 5,
  FDECON_E_INDEX = 6,
  FDECON_E_NUMERICAL = 7,
  FDECON_E_IO = 8,
  FDECON_E_ARGUMENT = 9, /* null pointer or bad enum value */
  FDECON_E_INTERNAL = 10
} fdecon_status;

typedef enum fdecon_mode { FDECON_FUNCTIONAL = 0, FDECON_SEPARATE = 1 } fdecon_mode;
typedef enum fdecon_exemption { FDECON_EXEMPT_JOINT = 0, FDECON_EXEMPT_TIME = 1 } fdecon_exemption;
typedef enum fdecon_function { FDECON_BLIP = 0, FDECON_BUMPS = 1, FDECON_QUADRATIC = 2 } fdecon_function;
typedef enum fdecon_regime { FDECON_DENSE_SPATIAL = 0, FDECON_DENSE_TIME = 1, FDECON_SPARSE = 2 } fdecon_regime;
typedef enum fdecon_verdict {
  FDECON_FUNCTIONAL_BETTER = 0,
  FDECON_SEPARATE_BETTER = 1,
  FDECON_BOUNDARY = 2
} fdecon_verdict;

typedef struct fdecon_grid fdecon_grid;
typedef struct fdecon_kernel fdecon_kernel;
typedef struct fdecon_result fdecon_result;
typedef struct fdecon_table fdecon_table;

const char* fdecon_version(void);
const char* fdecon_last_error(void);
const char* fdecon_status_name(int status);

/* ---- observation grids -------------------------------------------------- */

fdecon_status fdecon_grid_create(size_t m, size_t n, double sigma, const double* samples, fdecon_grid** out);
/* r spatial axes; samples are row-major over (dims[0], ..., dims[rank-1], N). */
fdecon_status fdecon_grid_create_nd(const size_t* dims, size_t rank, size_t n, double sigma, const double* samples,
                                    fdecon_grid** out);
/* FDG1 binary or CSV, chosen by content (read) or by a ".csv" suffix (write). */
fdecon_status fdecon_grid_read(const char* path, fdecon_grid** out);
fdecon_status fdecon_grid_write(const fdecon_grid* grid, const char* path);
void fdecon_grid_free(fdecon_grid* grid);

size_t fdecon_grid_profiles(const fdecon_grid* grid);
size_t fdecon_grid_length(const fdecon_grid* grid);
double fdecon_grid_sigma(const fdecon_grid* grid);
const double* fdecon_grid_data(const fdecon_grid* grid);
size_t fdecon_grid_rank(const fdecon_grid* grid);
size_t fdecon_grid_dim(const fdecon_grid* grid, size_t axis);
/* Replaces sigma, e.g. after reading a file that was written with sigma = 0. */
fdecon_status fdecon_grid_set_sigma(fdecon_grid* grid, double sigma);

/* ---- kernels ------------------------------------------------------------ */

/* Fourier coefficients g_m(u_l) of kernel samples laid out like the data. */
fdecon_status fdecon_kernel_from_grid(const fdecon_grid* samples, fdecon_kernel** out);
/* Built-in 0.5 exp(-|t| (1 + (u - 0.5)^2)) sampled on an M x N grid. */
fdecon_status fdecon_paper_kernel_grid(size_t m, size_t n, fdecon_grid** out);
/* Log-log fit over [lo, hi]; lo = hi = 0 selects [N/16, N/4]. Any output
 * pointer may be NULL. */
fdecon_status fdecon_kernel_estimate_nu(const fdecon_kernel* kernel, int lo, int hi, double* nu, double* c1,
                                        double* c2);
void fdecon_kernel_free(fdecon_kernel* kernel);

/* ---- estimator ---------------------------------------------------------- */

/* NaN / negative sentinels mean "resolve from the data". */
typedef struct fdecon_options {
  int mode;         /* fdecon_mode */
  int exemption;    /* fdecon_exemption */
  double c_beta;    /* NaN: 4 (2 pi / 3)^nu / sqrt(c1) */
  double nu;        /* NaN: estimate from the kernel */
  int nu_lo, nu_hi; /* 0, 0: default regression range */
  int m0, m0_prime;
  int finest;       /* J, -1: from the noise level */
  int finest_prime; /* J', -1: from the noise level */
} fdecon_options;

void fdecon_options_default(fdecon_options* opts);

typedef struct fdecon_resolved {
  double nu, c1, c2;
  double c_beta, c_beta_theory;
  double epsilon, noise_scale;
  int finest, raw_finest;
  int finest_prime, raw_finest_prime; /* first spatial axis */
  int degenerate;
  size_t coefficients, kept;
} fdecon_resolved;

fdecon_status fdecon_deconvolve(const fdecon_grid* data, const fdecon_kernel* kernel, const fdecon_options* opts,
                                fdecon_result** out);
const fdecon_grid* fdecon_result_estimate(const fdecon_result* result);
fdecon_status fdecon_result_info(const fdecon_result* result, fdecon_resolved* info);
/* "j,k,jprime,kprime,re,im,kept" rows. */
fdecon_status fdecon_result_write_coeffs(const fdecon_result* result, const char* path);
/* Mixed Besov sequence norm of the thresholded coefficients (Functional mode);
 * p or q may be INFINITY. */
fdecon_status fdecon_result_besov_norm(const fdecon_result* result, double s1, const double* s2, size_t rank,
                                       double p, double q, double* out);
void fdecon_result_free(fdecon_result* result);

/* ---- simulation --------------------------------------------------------- */

typedef struct fdecon_sim_options {
  size_t m, n;
  double sigma;
  int f1, f2; /* fdecon_function along u and along t */
  size_t runs;
  uint64_t seed;
  unsigned threads;           /* 0: hardware concurrency */
  const fdecon_grid* kernel;  /* NULL: built-in kernel */
} fdecon_sim_options;

void fdecon_sim_options_default(fdecon_sim_options* opts);
fdecon_status fdecon_function_parse(const char* name, int* out);
const char* fdecon_function_name(int f);

/* One replicate. `truth` may be NULL. */
fdecon_status fdecon_simulate(const fdecon_sim_options* opts, size_t replicate, fdecon_grid** data,
                              fdecon_grid** truth);

typedef struct fdecon_mise {
  int mode;
  double mean_mise, sd_mise;
  size_t runs;
} fdecon_mise;

/* Evaluates `count` estimator settings on shared replicates. `per_run`, when
 * not NULL, receives count x runs values. */
fdecon_status fdecon_run_mise(const fdecon_sim_options* sim, const fdecon_options* est, size_t count,
                              fdecon_mise* out, double* per_run);

typedef struct fdecon_table_row {
  int f1, f2;
  size_t m;
  double sigma;
  fdecon_mise mise;
} fdecon_table_row;

/* Six function pairs x M in {128, 256} x sigma in {0.5, 1} x both modes at
 * N = 512. */
fdecon_status fdecon_table1(size_t runs, uint64_t seed, unsigned threads, const fdecon_options* functional,
                            const fdecon_options* separate, fdecon_table** out);
size_t fdecon_table_size(const fdecon_table* table);
fdecon_status fdecon_table_row_at(const fdecon_table* table, size_t i, fdecon_table_row* row);
fdecon_status fdecon_table_write_csv(const fdecon_table* table, uint64_t seed, const char* path);
void fdecon_table_free(fdecon_table* table);

/* ---- rates -------------------------------------------------------------- */

typedef struct fdecon_rate {
  double d;
  int d1;
  int regime; /* fdecon_regime */
  int dense_boundary, sparse_boundary, regime_warning;
  int exact; /* 1 when d_num / d_den hold the exact exponent */
  int64_t d_num, d_den;
} fdecon_rate;

/* rank = 1 is the two-dimensional case; p may be INFINITY. */
fdecon_status fdecon_rate_exponent(double s1, const double* s2, size_t rank, double p, double nu, fdecon_rate* out);
/* Decimal or "a/b" strings evaluated in exact rational arithmetic; p may be "inf". */
fdecon_status fdecon_rate_exponent_exact(const char* s1, const char* const* s2, size_t rank, const char* p,
                                         const char* nu, fdecon_rate* out);

typedef struct fdecon_comparison {
  int verdict; /* fdecon_verdict */
  double exponent, surrogate;
} fdecon_comparison;

fdecon_status fdecon_compare(double s1, double s2, double nu, double m, double n, fdecon_comparison* out);
const char* fdecon_regime_name(int regime);
const char* fdecon_verdict_name(int verdict);

#ifdef __cplusplus
}
#endif

#endif /* FDECON_H */
