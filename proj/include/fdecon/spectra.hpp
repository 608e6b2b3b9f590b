#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fdecon {

using cplx = std::complex<double>;

/// Noisy convolved samples y(u_l, t_i) on the grid u_l = l/M, t_i = i/N.
///
/// Samples are stored profile-major: row l holds the N time samples of profile
/// l. For r >= 2 spatial dimensions the profile index is the row-major flattening
/// of (l_1, ..., l_r) over `spatial_dims`.
class ObservationGrid {
 public:
  ObservationGrid() = default;
  ObservationGrid(std::size_t m, std::size_t n, double sigma, std::vector<double> samples);
  ObservationGrid(std::vector<std::size_t> spatial_dims, std::size_t n, double sigma,
                  std::vector<double> samples);

  std::size_t m() const noexcept { return profiles_; }  ///< total number of profiles
  std::size_t n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<std::size_t>& spatial_dims() const noexcept { return dims_; }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> row(std::size_t l) const { return {samples_.data() + l * n_, n_}; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t profiles_ = 0;
  std::size_t n_ = 0;
  double sigma_ = 0.0;
  std::vector<double> samples_;
};

/// Per-profile Fourier coefficients <e_m, row>, e_m(t) = exp(i 2 pi m t),
/// approximated by (1/N) sum_i row(t_i) conj(e_m(t_i)).
///
/// Storage is in FFT order (index m mod N); `at` takes a signed frequency in
/// [-N/2, N/2).
class ProfileSpectrum {
 public:
  ProfileSpectrum() = default;
  ProfileSpectrum(std::size_t profiles, std::size_t n);
  ProfileSpectrum(std::size_t profiles, std::size_t n, std::vector<cplx> coeffs);

  std::size_t profiles() const noexcept { return profiles_; }
  std::size_t n() const noexcept { return n_; }

  cplx at(std::size_t l, int freq) const { return coeffs_[l * n_ + slot(freq)]; }
  cplx& at(std::size_t l, int freq) { return coeffs_[l * n_ + slot(freq)]; }

  std::span<const cplx> row(std::size_t l) const { return {coeffs_.data() + l * n_, n_}; }
  std::span<cplx> row(std::size_t l) { return {coeffs_.data() + l * n_, n_}; }
  std::span<const cplx> data() const noexcept { return coeffs_; }

  int min_freq() const noexcept { return -static_cast<int>(n_ / 2); }
  int max_freq() const noexcept { return static_cast<int>(n_ / 2) - 1; }

 private:
  std::size_t slot(int freq) const;

  std::size_t profiles_ = 0;
  std::size_t n_ = 0;
  std::vector<cplx> coeffs_;
};

struct FrequencyRange {
  int lo = 0;
  int hi = 0;
};

/// Fourier coefficients g_m(u_l) of the known kernel plus its degree of
/// ill-posedness. c1/c2 bound |g_m|^2 |m|^(2 nu) over the last range examined.
struct KernelSpectrum {
  ProfileSpectrum g;
  double nu = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

bool is_power_of_two(std::size_t n) noexcept;

ProfileSpectrum fourier_coeffs(const ObservationGrid& grid);

/// Inverse of fourier_coeffs: samples_i = sum_m coeffs(m) exp(i 2 pi m t_i).
/// Returns the real parts; `max_imag`, when given, receives the largest
/// discarded imaginary magnitude.
std::vector<double> inverse_fourier(const ProfileSpectrum& spectrum, double* max_imag = nullptr);

/// Kernel samples (profiles x N, row-major) -> g_m(u_l). Every coefficient with
/// |m| <= check_up_to must be nonzero, otherwise IllPosedKernel names (l, m).
/// Without `check_up_to` the full representable band (|m| < N/2) is checked.
KernelSpectrum kernel_spectrum(std::span<const double> kernel_samples, std::size_t profiles,
                               std::size_t n, std::optional<int> check_up_to = std::nullopt);

/// Throws IllPosedKernel if any |g_m(u_l)| vanishes for |m| <= max_freq.
void require_nonvanishing(const KernelSpectrum& ks, int max_freq);

/// Least-squares slope of log mean_l |g_m(u_l)| against log m over the
/// positive frequencies in `range`; returns -slope and stores it in ks.nu
/// together with the empirical (c1, c2).
double estimate_nu(KernelSpectrum& ks, FrequencyRange range);

/// Default regression range [N/16, N/4].
FrequencyRange default_nu_range(std::size_t n) noexcept;

/// min/max of |g_m(u_l)|^2 |m|^(2 nu) over 1 <= |m| <= max_freq and all profiles.
std::pair<double, double> regularity_bounds(const KernelSpectrum& ks, double nu, int max_freq);

}  // namespace fdecon
