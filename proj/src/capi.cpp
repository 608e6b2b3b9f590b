#include "fdecon/fdecon.h"

#include <cmath>
#include <new>
#include <stdexcept>
#include <string>

#include "fdecon/error.hpp"
#include "fdecon/estimator.hpp"
#include "fdecon/grid_io.hpp"
#include "fdecon/rates.hpp"
#include "fdecon/simlab.hpp"

struct fdecon_grid {
  fdecon::ObservationGrid grid;
};

struct fdecon_kernel {
  fdecon::KernelSpectrum spectrum;
};

struct fdecon_result {
  fdecon::Reconstruction rec;
  fdecon_grid estimate;
};

struct fdecon_table {
  std::vector<fdecon::Table1Cell> cells;
};

namespace {

thread_local std::string g_last_error;

// Bad enum values in option structs; reported as FDECON_E_ARGUMENT.
struct BadArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

fdecon_status fail(fdecon_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
fdecon_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return FDECON_OK;
  } catch (const BadArgument& e) {
    return fail(FDECON_E_ARGUMENT, std::string("capi: ") + e.what());
  } catch (const fdecon::Error& e) {
    return fail(static_cast<fdecon_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDECON_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDECON_E_INTERNAL, e.what());
  }
}

#define FDECON_REQUIRE(ptr)                                                       \
  do {                                                                            \
    if ((ptr) == nullptr) return fail(FDECON_E_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

fdecon::EstimatorConfig to_config(const fdecon_options* o) {
  fdecon::EstimatorConfig cfg;
  if (o == nullptr) return cfg;
  if (o->mode != FDECON_FUNCTIONAL && o->mode != FDECON_SEPARATE)
    throw BadArgument("mode must be FDECON_FUNCTIONAL or FDECON_SEPARATE");
  if (o->exemption != FDECON_EXEMPT_JOINT && o->exemption != FDECON_EXEMPT_TIME)
    throw BadArgument("unknown scaling exemption rule");
  cfg.mode = o->mode == FDECON_SEPARATE ? fdecon::Mode::Separate : fdecon::Mode::Functional;
  cfg.exemption = o->exemption == FDECON_EXEMPT_TIME ? fdecon::ScalingExemption::Time : fdecon::ScalingExemption::Joint;
  if (!std::isnan(o->c_beta)) cfg.c_beta = o->c_beta;
  if (!std::isnan(o->nu)) cfg.nu = o->nu;
  if (o->nu_lo != 0 || o->nu_hi != 0) cfg.nu_range = fdecon::FrequencyRange{o->nu_lo, o->nu_hi};
  cfg.m0 = o->m0;
  cfg.m0_prime = o->m0_prime;
  if (o->finest >= 0) cfg.finest = o->finest;
  if (o->finest_prime >= 0) cfg.finest_prime = o->finest_prime;
  return cfg;
}

fdecon::SimConfig to_sim(const fdecon_sim_options* o) {
  fdecon::SimConfig cfg;
  auto fn = [](int f) {
    if (f < FDECON_BLIP || f > FDECON_QUADRATIC)
      throw BadArgument("unknown test function id " + std::to_string(f));
    return static_cast<fdecon::TestFunction>(f);
  };
  cfg.m = o->m;
  cfg.n = o->n;
  cfg.sigma = o->sigma;
  cfg.f1 = fn(o->f1);
  cfg.f2 = fn(o->f2);
  cfg.runs = o->runs;
  cfg.seed = o->seed;
  cfg.threads = o->threads;
  if (o->kernel) {
    auto s = o->kernel->grid.samples();
    cfg.kernel = std::vector<double>(s.begin(), s.end());
  }
  return cfg;
}

fdecon_mise to_mise(const fdecon::MiseResult& r) {
  return {r.mode == fdecon::Mode::Separate ? FDECON_SEPARATE : FDECON_FUNCTIONAL, r.mean_mise, r.sd_mise,
          r.per_run.size()};
}

void fill_rate(const fdecon::RateReport& r, fdecon_rate* out) {
  out->d = r.d;
  out->d1 = r.d1;
  out->regime = static_cast<int>(r.regime);
  out->dense_boundary = r.dense_boundary;
  out->sparse_boundary = r.sparse_boundary;
  out->regime_warning = r.regime_warning;
  out->exact = r.d_exact.has_value();
  out->d_num = r.d_exact ? r.d_exact->num() : 0;
  out->d_den = r.d_exact ? r.d_exact->den() : 1;
}

fdecon::Rational parse_rational(const char* text, const char* what) {
  if (text == nullptr) throw fdecon::Error(fdecon::ErrorCode::Config, "rates", std::string(what) + " is NULL");
  auto r = fdecon::Rational::parse(text);
  if (!r) throw fdecon::Error(fdecon::ErrorCode::Config, "rates", std::string(what) + "='" + text + "' is not a rational");
  return *r;
}

}  // namespace

extern "C" {

const char* fdecon_version(void) { return "0.1.0"; }
const char* fdecon_last_error(void) { return g_last_error.c_str(); }

const char* fdecon_status_name(int status) {
  switch (status) {
    case FDECON_OK: return "ok";
    case FDECON_E_ARGUMENT: return "ArgumentError";
    case FDECON_E_INTERNAL: return "InternalError";
    default:
      if (status >= 1 && status <= 8) return fdecon::error_code_name(static_cast<fdecon::ErrorCode>(status));
      return "unknown";
  }
}

fdecon_status fdecon_grid_create(size_t m, size_t n, double sigma, const double* samples, fdecon_grid** out) {
  return fdecon_grid_create_nd(&m, 1, n, sigma, samples, out);
}

fdecon_status fdecon_grid_create_nd(const size_t* dims, size_t rank, size_t n, double sigma, const double* samples,
                                    fdecon_grid** out) {
  FDECON_REQUIRE(dims);
  FDECON_REQUIRE(samples);
  FDECON_REQUIRE(out);
  return guarded([&] {
    std::vector<std::size_t> d(dims, dims + rank);
    std::size_t total = n;
    for (auto x : d) total *= x;
    *out = new fdecon_grid{fdecon::ObservationGrid(d, n, sigma, std::vector<double>(samples, samples + total))};
  });
}

fdecon_status fdecon_grid_read(const char* path, fdecon_grid** out) {
  FDECON_REQUIRE(path);
  FDECON_REQUIRE(out);
  return guarded([&] { *out = new fdecon_grid{fdecon::read_grid(path)}; });
}

fdecon_status fdecon_grid_write(const fdecon_grid* grid, const char* path) {
  FDECON_REQUIRE(grid);
  FDECON_REQUIRE(path);
  return guarded([&] { fdecon::write_grid(grid->grid, path); });
}

void fdecon_grid_free(fdecon_grid* grid) { delete grid; }

size_t fdecon_grid_profiles(const fdecon_grid* grid) { return grid ? grid->grid.m() : 0; }
size_t fdecon_grid_length(const fdecon_grid* grid) { return grid ? grid->grid.n() : 0; }
double fdecon_grid_sigma(const fdecon_grid* grid) { return grid ? grid->grid.sigma() : NAN; }
const double* fdecon_grid_data(const fdecon_grid* grid) { return grid ? grid->grid.samples().data() : nullptr; }
size_t fdecon_grid_rank(const fdecon_grid* grid) { return grid ? grid->grid.spatial_dims().size() : 0; }
size_t fdecon_grid_dim(const fdecon_grid* grid, size_t axis) {
  if (!grid || axis >= grid->grid.spatial_dims().size()) return 0;
  return grid->grid.spatial_dims()[axis];
}

fdecon_status fdecon_grid_set_sigma(fdecon_grid* grid, double sigma) {
  FDECON_REQUIRE(grid);
  return guarded([&] {
    const auto& g = grid->grid;
    auto s = g.samples();
    grid->grid = fdecon::ObservationGrid(g.spatial_dims(), g.n(), sigma, std::vector<double>(s.begin(), s.end()));
  });
}

fdecon_status fdecon_kernel_from_grid(const fdecon_grid* samples, fdecon_kernel** out) {
  FDECON_REQUIRE(samples);
  FDECON_REQUIRE(out);
  return guarded([&] {
    const auto& g = samples->grid;
    *out = new fdecon_kernel{fdecon::kernel_spectrum(g.samples(), g.m(), g.n(), 0)};
  });
}

fdecon_status fdecon_paper_kernel_grid(size_t m, size_t n, fdecon_grid** out) {
  FDECON_REQUIRE(out);
  return guarded([&] { *out = new fdecon_grid{fdecon::ObservationGrid(m, n, 0.0, fdecon::paper_kernel_grid(m, n))}; });
}

fdecon_status fdecon_kernel_estimate_nu(const fdecon_kernel* kernel, int lo, int hi, double* nu, double* c1,
                                        double* c2) {
  FDECON_REQUIRE(kernel);
  return guarded([&] {
    fdecon::KernelSpectrum ks = kernel->spectrum;
    const auto range = (lo == 0 && hi == 0) ? fdecon::default_nu_range(ks.g.n()) : fdecon::FrequencyRange{lo, hi};
    const double v = fdecon::estimate_nu(ks, range);
    if (nu) *nu = v;
    if (c1) *c1 = ks.c1;
    if (c2) *c2 = ks.c2;
  });
}

void fdecon_kernel_free(fdecon_kernel* kernel) { delete kernel; }

void fdecon_options_default(fdecon_options* opts) {
  if (!opts) return;
  *opts = fdecon_options{FDECON_FUNCTIONAL, FDECON_EXEMPT_JOINT, NAN, NAN, 0, 0, 3, 3, -1, -1};
}

fdecon_status fdecon_deconvolve(const fdecon_grid* data, const fdecon_kernel* kernel, const fdecon_options* opts,
                                fdecon_result** out) {
  FDECON_REQUIRE(data);
  FDECON_REQUIRE(kernel);
  FDECON_REQUIRE(out);
  return guarded([&] {
    auto rec = fdecon::deconvolve(data->grid, kernel->spectrum, to_config(opts));
    auto* r = new fdecon_result{std::move(rec), {}};
    r->estimate.grid = r->rec.estimate;
    *out = r;
  });
}

const fdecon_grid* fdecon_result_estimate(const fdecon_result* result) { return result ? &result->estimate : nullptr; }

fdecon_status fdecon_result_info(const fdecon_result* result, fdecon_resolved* info) {
  FDECON_REQUIRE(result);
  FDECON_REQUIRE(info);
  const auto& c = result->rec.config;
  const auto& co = result->rec.coeffs;
  std::size_t kept = 0;
  for (std::size_t s = 0; s < co.spatial_size(); ++s)
    for (std::size_t t = 0; t < co.time_size(); ++t) kept += co.kept(s, t);
  *info = fdecon_resolved{c.nu,
                          c.c1,
                          c.c2,
                          c.c_beta,
                          c.c_beta_theory,
                          c.epsilon,
                          c.noise_scale,
                          c.limits.finest,
                          c.limits.raw_finest,
                          c.limits.finest_prime.empty() ? -1 : c.limits.finest_prime.front(),
                          c.limits.raw_finest_prime,
                          c.limits.degenerate ? 1 : 0,
                          co.size(),
                          kept};
  return FDECON_OK;
}

fdecon_status fdecon_result_write_coeffs(const fdecon_result* result, const char* path) {
  FDECON_REQUIRE(result);
  FDECON_REQUIRE(path);
  return guarded([&] { fdecon::write_coeffs_csv(result->rec.coeffs, path); });
}

fdecon_status fdecon_result_besov_norm(const fdecon_result* result, double s1, const double* s2, size_t rank, double p,
                                       double q, double* out) {
  FDECON_REQUIRE(result);
  FDECON_REQUIRE(s2);
  FDECON_REQUIRE(out);
  return guarded([&] { *out = fdecon::besov_norm(result->rec.coeffs, s1, std::vector<double>(s2, s2 + rank), p, q); });
}

void fdecon_result_free(fdecon_result* result) { delete result; }

void fdecon_sim_options_default(fdecon_sim_options* opts) {
  if (!opts) return;
  *opts = fdecon_sim_options{256, 512, 0.5, FDECON_QUADRATIC, FDECON_BLIP, 100, 1, 0, nullptr};
}

fdecon_status fdecon_function_parse(const char* name, int* out) {
  FDECON_REQUIRE(name);
  FDECON_REQUIRE(out);
  return guarded([&] { *out = static_cast<int>(fdecon::parse_test_function(name)); });
}

const char* fdecon_function_name(int f) {
  if (f < FDECON_BLIP || f > FDECON_QUADRATIC) return "unknown";
  return fdecon::to_string(static_cast<fdecon::TestFunction>(f));
}

fdecon_status fdecon_simulate(const fdecon_sim_options* opts, size_t replicate, fdecon_grid** data,
                              fdecon_grid** truth) {
  FDECON_REQUIRE(opts);
  FDECON_REQUIRE(data);
  return guarded([&] {
    const auto cfg = to_sim(opts);
    auto syn = fdecon::synthesize_data(cfg, replicate);
    auto* d = new fdecon_grid{std::move(syn.grid)};
    if (truth) {
      try {
        *truth = new fdecon_grid{fdecon::ObservationGrid(cfg.m, cfg.n, 0.0, std::move(syn.truth))};
      } catch (...) {
        delete d;
        throw;
      }
    }
    *data = d;
  });
}

fdecon_status fdecon_run_mise(const fdecon_sim_options* sim, const fdecon_options* est, size_t count,
                              fdecon_mise* out, double* per_run) {
  FDECON_REQUIRE(sim);
  FDECON_REQUIRE(est);
  FDECON_REQUIRE(out);
  return guarded([&] {
    std::vector<fdecon::EstimatorConfig> cfgs;
    for (size_t i = 0; i < count; ++i) cfgs.push_back(to_config(est + i));
    const auto res = fdecon::run_mise(to_sim(sim), cfgs);
    for (size_t i = 0; i < count; ++i) {
      out[i] = to_mise(res[i]);
      if (per_run) std::copy(res[i].per_run.begin(), res[i].per_run.end(), per_run + i * sim->runs);
    }
  });
}

fdecon_status fdecon_table1(size_t runs, uint64_t seed, unsigned threads, const fdecon_options* functional,
                            const fdecon_options* separate, fdecon_table** out) {
  FDECON_REQUIRE(out);
  return guarded([&] {
    fdecon::Table1Options o;
    o.runs = runs;
    o.seed = seed;
    o.threads = threads;
    if (functional) o.functional = to_config(functional);
    if (separate) o.separate = to_config(separate);
    o.separate.mode = fdecon::Mode::Separate;
    o.functional.mode = fdecon::Mode::Functional;
    *out = new fdecon_table{fdecon::table1(o)};
  });
}

size_t fdecon_table_size(const fdecon_table* table) { return table ? table->cells.size() : 0; }

fdecon_status fdecon_table_row_at(const fdecon_table* table, size_t i, fdecon_table_row* row) {
  FDECON_REQUIRE(table);
  FDECON_REQUIRE(row);
  if (i >= table->cells.size()) return fail(FDECON_E_INDEX, "capi: table row " + std::to_string(i) + " out of range");
  const auto& c = table->cells[i];
  *row = fdecon_table_row{static_cast<int>(c.f1), static_cast<int>(c.f2), c.m, c.sigma, to_mise(c.result)};
  return FDECON_OK;
}

fdecon_status fdecon_table_write_csv(const fdecon_table* table, uint64_t seed, const char* path) {
  FDECON_REQUIRE(table);
  FDECON_REQUIRE(path);
  return guarded([&] { fdecon::write_table1_csv(table->cells, seed, path); });
}

void fdecon_table_free(fdecon_table* table) { delete table; }

fdecon_status fdecon_rate_exponent(double s1, const double* s2, size_t rank, double p, double nu, fdecon_rate* out) {
  FDECON_REQUIRE(s2);
  FDECON_REQUIRE(out);
  return guarded([&] {
    fdecon::BesovBall ball;
    ball.s1 = s1;
    ball.s2.assign(s2, s2 + rank);
    ball.p = p;
    fill_rate(fdecon::exponent_multi(ball, nu), out);
  });
}

fdecon_status fdecon_rate_exponent_exact(const char* s1, const char* const* s2, size_t rank, const char* p,
                                         const char* nu, fdecon_rate* out) {
  FDECON_REQUIRE(s2);
  FDECON_REQUIRE(p);
  FDECON_REQUIRE(out);
  return guarded([&] {
    fdecon::ExactBall ball;
    ball.s1 = parse_rational(s1, "s1");
    ball.s2.clear();
    for (size_t i = 0; i < rank; ++i) ball.s2.push_back(parse_rational(s2[i], "s2"));
    const std::string ps = p;
    ball.inv_p = (ps == "inf" || ps == "Inf" || ps == "infinity") ? fdecon::Rational{0}
                                                                   : fdecon::Rational{1} / parse_rational(p, "p");
    fill_rate(fdecon::exponent_multi(ball, parse_rational(nu, "nu")), out);
  });
}

fdecon_status fdecon_compare(double s1, double s2, double nu, double m, double n, fdecon_comparison* out) {
  FDECON_REQUIRE(out);
  return guarded([&] {
    const auto c = fdecon::compare_strategies(s1, s2, nu, m, n);
    *out = fdecon_comparison{static_cast<int>(c.verdict), c.exponent, c.surrogate};
  });
}

const char* fdecon_regime_name(int regime) {
  if (regime < 0 || regime > 2) return "unknown";
  return fdecon::to_string(static_cast<fdecon::Regime>(regime));
}

const char* fdecon_verdict_name(int verdict) {
  if (verdict < 0 || verdict > 2) return "unknown";
  return fdecon::to_string(static_cast<fdecon::Verdict>(verdict));
}

}  // extern "C"
