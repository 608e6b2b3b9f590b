#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fdecon/layout.hpp"

namespace fdecon {

/// Periodized orthonormal Daubechies transform (6 vanishing moments, 12 taps,
/// extremal phase) along the spatial direction(s).
///
/// Transforms run in place and leave the coefficients in WaveletLayout order
/// with coarsest = min(coarsest_level(), log2(length)). Instantiated for
/// double and std::complex<double>.
class SpatialBasis {
 public:
  static constexpr int kVanishingMoments = 6;
  static constexpr std::size_t kTaps = 2 * kVanishingMoments;

  explicit SpatialBasis(int coarsest_level = 3);

  int coarsest_level() const noexcept { return m0_; }
  std::span<const double> lowpass() const noexcept { return low_; }
  std::span<const double> highpass() const noexcept { return high_; }

  /// Layout of a transformed vector of the given (dyadic) length.
  WaveletLayout layout(std::size_t length) const;

  template <class T>
  void forward(std::span<T> v) const;
  template <class T>
  void inverse(std::span<T> v) const;

  /// Separable transform of a row-major array with the given extents: the full
  /// 1-D transform runs along every axis, so each axis keeps its own level
  /// (hyperbolic tensor structure).
  template <class T>
  void tensor_forward(std::span<T> a, std::span<const std::size_t> dims) const;
  template <class T>
  void tensor_inverse(std::span<T> a, std::span<const std::size_t> dims) const;

 private:
  template <class T>
  void step_forward(std::span<T> v, std::size_t len, std::vector<T>& work) const;
  template <class T>
  void step_inverse(std::span<T> v, std::size_t len, std::vector<T>& work) const;
  template <class T, bool Forward>
  void tensor_apply(std::span<T> a, std::span<const std::size_t> dims) const;

  int m0_;
  std::array<double, kTaps> low_;
  std::array<double, kTaps> high_;
};

}  // namespace fdecon
