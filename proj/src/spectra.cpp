#include "fdecon/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "fdecon/error.hpp"
#include "fft.hpp"

namespace fdecon {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

ObservationGrid::ObservationGrid(std::size_t m, std::size_t n, double sigma, std::vector<double> samples)
    : ObservationGrid(std::vector<std::size_t>{m}, n, sigma, std::move(samples)) {}

ObservationGrid::ObservationGrid(std::vector<std::size_t> spatial_dims, std::size_t n, double sigma,
                                 std::vector<double> samples)
    : dims_(std::move(spatial_dims)), n_(n), sigma_(sigma), samples_(std::move(samples)) {
  if (dims_.empty()) throw Error(ErrorCode::Config, "spectra", "grid needs at least one spatial dimension");
  profiles_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  if (profiles_ == 0) throw Error(ErrorCode::Config, "spectra", "M must be >= 1");
  if (n_ < 2 || !is_power_of_two(n_))
    throw Error(ErrorCode::Config, "spectra", "N = " + std::to_string(n_) + " is not a power of two >= 2");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_))
    throw Error(ErrorCode::Config, "spectra", "sigma must be finite and >= 0");
  if (samples_.size() != profiles_ * n_)
    throw Error(ErrorCode::Index, "spectra",
                "expected " + std::to_string(profiles_ * n_) + " samples, got " + std::to_string(samples_.size()));
  for (double v : samples_)
    if (!std::isfinite(v)) throw Error(ErrorCode::Config, "spectra", "samples contain non-finite values");
}

ProfileSpectrum::ProfileSpectrum(std::size_t profiles, std::size_t n)
    : profiles_(profiles), n_(n), coeffs_(profiles * n) {}

ProfileSpectrum::ProfileSpectrum(std::size_t profiles, std::size_t n, std::vector<cplx> coeffs)
    : profiles_(profiles), n_(n), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != profiles_ * n_) throw Error(ErrorCode::Index, "spectra", "coefficient count mismatch");
}

std::size_t ProfileSpectrum::slot(int freq) const {
  const auto half = static_cast<int>(n_ / 2);
  if (freq < -half || freq >= half)
    throw Error(ErrorCode::Index, "spectra", "frequency " + std::to_string(freq) + " outside [-N/2, N/2)");
  return static_cast<std::size_t>(freq < 0 ? freq + static_cast<int>(n_) : freq);
}

namespace {

ProfileSpectrum rows_to_spectrum(std::span<const double> samples, std::size_t profiles, std::size_t n) {
  if (n < 2 || !is_power_of_two(n))
    throw Error(ErrorCode::Config, "spectra", "N = " + std::to_string(n) + " is not a power of two >= 2");
  if (samples.size() != profiles * n) throw Error(ErrorCode::Index, "spectra", "sample count mismatch");
  ProfileSpectrum out(profiles, n);
  std::vector<cplx> buf(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t l = 0; l < profiles; ++l) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = samples[l * n + i];
    auto row = out.row(l);
    detail::dft_forward(buf, row);
    for (auto& c : row) c *= scale;
  }
  return out;
}

}  // namespace

ProfileSpectrum fourier_coeffs(const ObservationGrid& grid) {
  return rows_to_spectrum(grid.samples(), grid.m(), grid.n());
}

std::vector<double> inverse_fourier(const ProfileSpectrum& spectrum, double* max_imag) {
  const std::size_t n = spectrum.n();
  std::vector<double> out(spectrum.profiles() * n);
  std::vector<cplx> buf(n);
  double worst = 0.0;
  for (std::size_t l = 0; l < spectrum.profiles(); ++l) {
    detail::dft_backward(spectrum.row(l), buf);
    for (std::size_t i = 0; i < n; ++i) {
      out[l * n + i] = buf[i].real();
      worst = std::max(worst, std::abs(buf[i].imag()));
    }
  }
  if (max_imag != nullptr) *max_imag = worst;
  return out;
}

void require_nonvanishing(const KernelSpectrum& ks, int max_freq) {
  const auto& g = ks.g;
  max_freq = std::min(max_freq, g.max_freq());
  double peak = 0.0;
  for (const auto& c : g.data()) peak = std::max(peak, std::abs(c));
  // Relative floor: FFT round-off turns exact zeros into ~1e-17 * peak.
  const double floor = 1e-13 * peak;
  for (std::size_t l = 0; l < g.profiles(); ++l)
    for (int m = -max_freq; m <= max_freq; ++m)
      if (!(std::abs(g.at(l, m)) > floor))
        throw Error(ErrorCode::IllPosedKernel, "spectra",
                    "kernel coefficient g_m(u_l) vanishes at (l=" + std::to_string(l) +
                        ", m=" + std::to_string(m) + ")");
}

KernelSpectrum kernel_spectrum(std::span<const double> kernel_samples, std::size_t profiles, std::size_t n,
                               std::optional<int> check_up_to) {
  for (double v : kernel_samples)
    if (!std::isfinite(v)) throw Error(ErrorCode::Config, "spectra", "kernel samples contain non-finite values");
  KernelSpectrum ks{rows_to_spectrum(kernel_samples, profiles, n)};
  require_nonvanishing(ks, check_up_to.value_or(static_cast<int>(n / 2) - 1));
  return ks;
}

FrequencyRange default_nu_range(std::size_t n) noexcept {
  return {static_cast<int>(n / 16), static_cast<int>(n / 4)};
}

std::pair<double, double> regularity_bounds(const KernelSpectrum& ks, double nu, int max_freq) {
  max_freq = std::min(max_freq, ks.g.max_freq());
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t l = 0; l < ks.g.profiles(); ++l)
    for (int m = 1; m <= max_freq; ++m)
      for (int s : {m, -m}) {
        const double v = std::norm(ks.g.at(l, s)) * std::pow(static_cast<double>(m), 2.0 * nu);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (hi == 0.0) lo = 0.0;
  return {lo, hi};
}

double estimate_nu(KernelSpectrum& ks, FrequencyRange range) {
  const auto& g = ks.g;
  if (range.lo > range.hi) std::swap(range.lo, range.hi);
  if (range.lo < g.min_freq() || range.hi > g.max_freq())
    throw Error(ErrorCode::InsufficientRange, "spectra", "frequency range outside representable band");

  // Fold to |m|; both signs carry the same magnitude for real kernels.
  std::vector<int> freqs;
  for (int m = range.lo; m <= range.hi; ++m)
    if (m != 0) freqs.push_back(std::abs(m));
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
  if (freqs.size() < 8)
    throw Error(ErrorCode::InsufficientRange, "spectra",
                "need at least 8 nonzero frequencies, got " + std::to_string(freqs.size()));

  std::vector<double> xs, ys;
  for (int m : freqs) {
    double mean = 0.0;
    const int probe = m <= g.max_freq() ? m : -m;
    for (std::size_t l = 0; l < g.profiles(); ++l) mean += std::abs(g.at(l, probe));
    mean /= static_cast<double>(g.profiles());
    if (!(mean > 0.0))
      throw Error(ErrorCode::InsufficientRange, "spectra", "zero kernel coefficient at m=" + std::to_string(m));
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(mean));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double nu = -sxy / sxx;

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int m : freqs)
    for (std::size_t l = 0; l < g.profiles(); ++l)
      for (int s : {m, -m}) {
        if (s < g.min_freq() || s > g.max_freq()) continue;
        const double v = std::norm(g.at(l, s)) * std::pow(static_cast<double>(m), 2.0 * nu);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  ks.nu = nu;
  ks.c1 = lo;
  ks.c2 = hi;
  return nu;
}

}  // namespace fdecon
