#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fdecon/layout.hpp"

namespace fdecon {

using cplx = std::complex<double>;

/// Periodized band-limited Meyer wavelets on [0, 1], handled entirely through
/// their Fourier coefficients
///
///   psi_{j,k,m} = <e_m, psi_{j,k}> = 2^(-j/2) psihat(2 pi m / 2^j) exp(-i 2 pi m k / 2^j).
///
/// The auxiliary polynomial is the degree-3 one,
/// theta(x) = x^4 (35 - 84x + 70x^2 - 20x^3). Coefficient vectors produced by
/// `analyze` follow `WaveletLayout` with coarsest = coarsest_level().
class MeyerBasis {
 public:
  static constexpr int kAuxDegree = 3;
  static constexpr double kSupportTolerance = 1e-14;

  explicit MeyerBasis(int coarsest_level = 3, int cached_up_to = 14);

  int coarsest_level() const noexcept { return m0_; }

  static double aux_polynomial(double x) noexcept;
  /// |phihat(w)| and |psihat(w)| for angular frequency w.
  static double scaling_window(double w) noexcept;
  static double wavelet_window(double w) noexcept;

  /// Wavelet coefficient psi_{j,k,m}; j >= m0, 0 <= k < 2^j.
  cplx psi(int j, long long k, int m) const;
  /// Scaling coefficient phi_{m0,k,m}; 0 <= k < 2^m0.
  cplx phi(long long k, int m) const;

  /// W_j: ordered frequencies with psi_{j,0,m} != 0.
  std::vector<int> support_set(int j) const;

  /// Largest |m| touched by a coefficient vector whose finest level is J-1
  /// (or by the scaling block alone when J == m0).
  static int band_top(int finest) noexcept;

  /// b_{j,k} = sum_m row(m) conj(psi_{j,k,m}) for all blocks of
  /// WaveletLayout{m0, finest}. `row` is a spectrum of length N in FFT order.
  std::vector<cplx> analyze(std::span<const cplx> row, int finest) const;

  /// Adjoint of analyze: spectrum (length n, FFT order) of sum b_{j,k} psi_{j,k}.
  std::vector<cplx> synthesize(std::span<const cplx> coeffs, std::size_t n) const;

  WaveletLayout layout(int finest) const noexcept { return {m0_, finest}; }

 private:
  using Table = std::vector<std::pair<int, cplx>>;  // (m, value at k = 0)

  Table make_wavelet_table(int j) const;
  Table make_scaling_table() const;
  const Table& table_for(int level, Table& scratch) const;
  void check_finest(int finest, std::size_t n) const;

  int m0_;
  int cached_up_to_;
  Table scaling_;
  std::vector<Table> wavelets_;  // index j - m0
};

}  // namespace fdecon
