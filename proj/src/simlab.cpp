#include "fdecon/simlab.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <thread>

#include "fdecon/error.hpp"
#include "fft.hpp"

namespace fdecon {
namespace {

constexpr std::array<double, 11> kBumpPos = {.1, .13, .15, .23, .25, .40, .44, .65, .76, .78, .81};
constexpr std::array<double, 11> kBumpHeight = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidth = {.005, .005, .006, .01, .01, .03, .01, .01, .005, .008, .005};

double raw_value(TestFunction f, double t) {
  switch (f) {
    case TestFunction::Blip:
      if (t <= 0.8) return 0.32 + 0.6 * t + 0.3 * std::exp(-100.0 * (t - 0.3) * (t - 0.3));
      return -0.28 + 0.6 * t + 0.3 * std::exp(-100.0 * (t - 1.3) * (t - 1.3));
    case TestFunction::Bumps: {
      double s = 0.0;
      for (std::size_t i = 0; i < kBumpPos.size(); ++i)
        s += kBumpHeight[i] * std::pow(1.0 + std::abs(t - kBumpPos[i]) / kBumpWidth[i], -4.0);
      return s;
    }
    case TestFunction::Quadratic:
      return (t - 0.5) * (t - 0.5);
  }
  return 0.0;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

const char* to_string(TestFunction f) noexcept {
  switch (f) {
    case TestFunction::Blip: return "blip";
    case TestFunction::Bumps: return "bumps";
    case TestFunction::Quadratic: return "quadratic";
  }
  return "?";
}

TestFunction parse_test_function(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "blip") return TestFunction::Blip;
  if (s == "bumps") return TestFunction::Bumps;
  if (s == "quadratic") return TestFunction::Quadratic;
  throw Error(ErrorCode::Config, "simlab", "unknown test function '" + name + "' (blip, bumps, quadratic)");
}

double paper_kernel(double u, double t) noexcept {
  const double frac = t - std::floor(t);
  const double d = std::min(frac, 1.0 - frac);
  return 0.5 * std::exp(-d * (1.0 + (u - 0.5) * (u - 0.5)));
}

std::vector<double> test_function(TestFunction f, std::size_t n) {
  if (!is_power_of_two(n)) throw Error(ErrorCode::Config, "simlab", "grid size must be a power of two");
  std::vector<double> v(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = raw_value(f, static_cast<double>(i) / static_cast<double>(n));
    energy += v[i] * v[i];
  }
  const double scale = 1.0 / std::sqrt(energy / static_cast<double>(n));
  for (auto& x : v) x *= scale;
  return v;
}

std::vector<double> test_function(const std::string& name, std::size_t n) {
  return test_function(parse_test_function(name), n);
}

std::vector<double> paper_kernel_grid(std::size_t m, std::size_t n) {
  std::vector<double> g(m * n);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < n; ++i)
      g[l * n + i] = paper_kernel(static_cast<double>(l) / static_cast<double>(m),
                                  static_cast<double>(i) / static_cast<double>(n));
  return g;
}

void SimConfig::validate() const {
  if (!is_power_of_two(m) || !is_power_of_two(n) || n < 2)
    throw Error(ErrorCode::Config, "simlab", "M and N must be powers of two");
  if (runs < 1) throw Error(ErrorCode::Config, "simlab", "runs must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::Config, "simlab", "sigma must be >= 0");
  if (kernel && kernel->size() != m * n)
    throw Error(ErrorCode::Config, "simlab",
                "kernel grid has " + std::to_string(kernel->size()) + " samples, expected M*N=" +
                    std::to_string(m * n));
}

std::vector<double> kernel_samples(const SimConfig& cfg) {
  return cfg.kernel ? *cfg.kernel : paper_kernel_grid(cfg.m, cfg.n);
}

std::vector<double> product_truth(const SimConfig& cfg) {
  const auto a = test_function(cfg.f1, cfg.m);
  const auto b = test_function(cfg.f2, cfg.n);
  std::vector<double> f(cfg.m * cfg.n);
  for (std::size_t l = 0; l < cfg.m; ++l)
    for (std::size_t i = 0; i < cfg.n; ++i) f[l * cfg.n + i] = a[l] * b[i];
  return f;
}

std::vector<double> convolve_rows(std::span<const double> truth, const KernelSpectrum& ks) {
  const std::size_t n = ks.g.n(), m = ks.g.profiles();
  if (truth.size() != m * n) throw Error(ErrorCode::Index, "simlab", "truth and kernel grids differ in shape");
  const auto spec = fourier_coeffs(ObservationGrid(m, n, 0.0, std::vector<double>(truth.begin(), truth.end())));
  ProfileSpectrum prod(m, n);
  for (std::size_t l = 0; l < m; ++l) {
    auto out = prod.row(l);
    auto a = spec.row(l), g = ks.g.row(l);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * g[i];
  }
  return inverse_fourier(prod);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) noexcept {
  // splitmix64 over a mix of both inputs
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(replicate) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

ObservationGrid add_noise(const std::vector<double>& clean, const SimConfig& cfg, std::size_t replicate) {
  std::vector<double> y = clean;
  if (cfg.sigma > 0.0) {
    std::mt19937_64 rng(replicate_seed(cfg.seed, replicate));
    std::normal_distribution<double> z(0.0, 1.0);
    for (auto& v : y) v += cfg.sigma * z(rng);
  }
  return {cfg.m, cfg.n, cfg.sigma, std::move(y)};
}

}  // namespace

SyntheticData synthesize_data(const SimConfig& cfg, std::size_t replicate) {
  cfg.validate();
  const auto ks = kernel_spectrum(kernel_samples(cfg), cfg.m, cfg.n, 0);
  auto truth = product_truth(cfg);
  return {add_noise(convolve_rows(truth, ks), cfg, replicate), std::move(truth)};
}

double mise(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size() || truth.empty())
    throw Error(ErrorCode::Index, "simlab", "estimate and truth differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
  return s / static_cast<double>(truth.size());
}

std::vector<MiseResult> run_mise(const SimConfig& cfg, const std::vector<EstimatorConfig>& estimators) {
  cfg.validate();
  // Only the DC term has to be nonzero to synthesize data; the estimator
  // checks its own band.
  const auto ks = kernel_spectrum(kernel_samples(cfg), cfg.m, cfg.n, 0);
  const auto truth = product_truth(cfg);
  const auto clean = convolve_rows(truth, ks);

  std::vector<ResolvedConfig> resolved;
  for (const auto& e : estimators) resolved.push_back(resolve_config(e, ks, cfg.n, {cfg.m}, cfg.sigma));

  std::vector<std::vector<double>> per(estimators.size(), std::vector<double>(cfg.runs));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<Error> failure;
  std::size_t failed_at = 0;

  auto work = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < cfg.runs;) {
      try {
        const auto grid = add_noise(clean, cfg, r);
        const auto spec = fourier_coeffs(grid);
        for (std::size_t e = 0; e < estimators.size(); ++e) {
          auto coeffs = hard_threshold(estimate_coeffs(spec, ks, resolved[e]), resolved[e]);
          per[e][r] = mise(reconstruct(coeffs, resolved[e]).estimate.samples(), truth);
        }
      } catch (const Error& ex) {
        std::lock_guard lock(err_mu);
        if (!failure || r < failed_at) failure = ex, failed_at = r;
        next = cfg.runs;
      }
    }
  };
  const unsigned nthreads = worker_count(cfg.threads, cfg.runs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure)
    throw Error(failure->code(), "simlab", "replicate " + std::to_string(failed_at) + ": " + failure->what());

  std::vector<MiseResult> out;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    MiseResult res;
    res.mode = estimators[e].mode;
    res.per_run = std::move(per[e]);
    double mean = 0.0;
    for (double v : res.per_run) mean += v;
    mean /= static_cast<double>(cfg.runs);
    double ss = 0.0;
    for (double v : res.per_run) ss += (v - mean) * (v - mean);
    res.mean_mise = mean;
    res.sd_mise = cfg.runs > 1 ? std::sqrt(ss / static_cast<double>(cfg.runs - 1)) : 0.0;
    out.push_back(std::move(res));
  }
  return out;
}

MiseResult run_mise(const SimConfig& cfg, const EstimatorConfig& estimator) {
  return std::move(run_mise(cfg, std::vector<EstimatorConfig>{estimator}).front());
}

std::vector<std::pair<TestFunction, TestFunction>> table1_pairs() {
  using F = TestFunction;
  return {{F::Quadratic, F::Blip}, {F::Quadratic, F::Bumps}, {F::Blip, F::Blip},
          {F::Blip, F::Bumps},     {F::Bumps, F::Blip},      {F::Bumps, F::Bumps}};
}

std::vector<Table1Cell> table1(const Table1Options& opts) {
  std::vector<Table1Cell> cells;
  for (const auto& [f1, f2] : table1_pairs())
    for (std::size_t m : opts.ms)
      for (double sigma : opts.sigmas) {
        SimConfig cfg;
        cfg.m = m;
        cfg.n = opts.n;
        cfg.sigma = sigma;
        cfg.f1 = f1;
        cfg.f2 = f2;
        cfg.runs = opts.runs;
        cfg.seed = opts.seed;
        cfg.threads = opts.threads;
        auto res = run_mise(cfg, {opts.functional, opts.separate});
        for (auto& r : res) cells.push_back({f1, f2, m, sigma, std::move(r)});
      }
  return cells;
}

void write_table1_csv(const std::vector<Table1Cell>& cells, std::uint64_t seed, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "simlab", "cannot open " + path);
  os << "f1,f2,M,sigma,mode,mean_mise,sd_mise,runs,seed\n" << std::setprecision(10);
  for (const auto& c : cells)
    os << to_string(c.f1) << ',' << to_string(c.f2) << ',' << c.m << ',' << c.sigma << ',' << to_string(c.result.mode)
       << ',' << c.result.mean_mise << ',' << c.result.sd_mise << ',' << c.result.per_run.size() << ',' << seed << '\n';
  if (!os) throw Error(ErrorCode::Io, "simlab", "write failed: " + path);
}

}  // namespace fdecon
