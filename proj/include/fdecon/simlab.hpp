#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdecon/estimator.hpp"
#include "fdecon/spectra.hpp"

namespace fdecon {

enum class TestFunction { Blip, Bumps, Quadratic };

const char* to_string(TestFunction f) noexcept;
/// Case-insensitive "blip" / "bumps" / "quadratic"; anything else is a ConfigError.
TestFunction parse_test_function(const std::string& name);

/// 0.5 exp(-d(t) (1 + (u - 0.5)^2)) with d(t) = min({t}, 1 - {t}), the
/// distance to 0 on the unit circle.
double paper_kernel(double u, double t) noexcept;

/// Samples f(i / n), i = 0..n-1, scaled to unit discrete L2 norm
/// ((1/n) sum f^2 = 1).
std::vector<double> test_function(TestFunction f, std::size_t n);
std::vector<double> test_function(const std::string& name, std::size_t n);

/// Profiles x N samples of paper_kernel(l/M, i/N).
std::vector<double> paper_kernel_grid(std::size_t m, std::size_t n);

struct SimConfig {
  std::size_t m = 256;
  std::size_t n = 512;
  double sigma = 0.5;
  TestFunction f1 = TestFunction::Quadratic;  ///< along u
  TestFunction f2 = TestFunction::Blip;       ///< along t
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> kernel;  ///< M x N samples; paper_kernel when unset
  unsigned threads = 0;                       ///< 0 = hardware concurrency

  void validate() const;
};

struct SyntheticData {
  ObservationGrid grid;
  std::vector<double> truth;  ///< f(u_l, t_i), same layout as the grid
};

/// Kernel samples for the configuration (user grid or the built-in kernel).
std::vector<double> kernel_samples(const SimConfig& cfg);

/// f1(u_l) f2(t_i) on the M x N grid.
std::vector<double> product_truth(const SimConfig& cfg);

/// Circular convolution of each truth row with the kernel row (weight 1/N),
/// computed spectrally. Noise-free.
std::vector<double> convolve_rows(std::span<const double> truth, const KernelSpectrum& ks);

/// One replicate: blurred truth plus sigma z with z drawn from a stream that
/// depends only on (cfg.seed, replicate).
SyntheticData synthesize_data(const SimConfig& cfg, std::size_t replicate = 0);

/// 64-bit stream seed for a replicate.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) noexcept;

struct MiseResult {
  Mode mode = Mode::Functional;
  double mean_mise = 0.0;
  double sd_mise = 0.0;
  std::vector<double> per_run;
};

/// (1/(MN)) sum (fhat - f)^2.
double mise(std::span<const double> estimate, std::span<const double> truth);

/// Runs every estimator configuration on the same replicates (paired
/// comparison). Replicates run in parallel; results do not depend on the
/// thread count.
std::vector<MiseResult> run_mise(const SimConfig& cfg, const std::vector<EstimatorConfig>& estimators);
MiseResult run_mise(const SimConfig& cfg, const EstimatorConfig& estimator);

struct Table1Cell {
  TestFunction f1;
  TestFunction f2;
  std::size_t m;
  double sigma;
  MiseResult result;
};

struct Table1Options {
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::size_t n = 512;
  std::vector<std::size_t> ms{128, 256};
  std::vector<double> sigmas{0.5, 1.0};
  unsigned threads = 0;
  EstimatorConfig functional{};
  EstimatorConfig separate = [] {
    EstimatorConfig c;
    c.mode = Mode::Separate;
    return c;
  }();
};

/// The six (f1, f2) pairs of the reference table, in table order.
std::vector<std::pair<TestFunction, TestFunction>> table1_pairs();

/// Every pair x M x sigma x {Functional, Separate}: 48 cells by default.
std::vector<Table1Cell> table1(const Table1Options& opts);

/// "f1,f2,M,sigma,mode,mean_mise,sd_mise,runs,seed" rows.
void write_table1_csv(const std::vector<Table1Cell>& cells, std::uint64_t seed, const std::string& path);

}  // namespace fdecon
