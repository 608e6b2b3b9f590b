#pragma once

#include <cstddef>

namespace fdecon {

/// Position bookkeeping for wavelet coefficient vectors of length 2^finest in
/// Mallat order:
///
///   [0, 2^coarsest)      scaling functions at resolution `coarsest`,
///                        reported under the level label coarsest-1
///   [2^j, 2^(j+1))       wavelets at level j, coarsest <= j < finest
///
/// The scaling block therefore holds 2^coarsest entries, which keeps the basis
/// complete: V_coarsest + W_coarsest + ... + W_(finest-1) = V_finest.
struct WaveletLayout {
  int coarsest = 3;
  int finest = 3;

  std::size_t size() const noexcept { return std::size_t{1} << finest; }
  int scaling_label() const noexcept { return coarsest - 1; }

  bool is_scaling(std::size_t pos) const noexcept { return pos < (std::size_t{1} << coarsest); }

  int level_of(std::size_t pos) const noexcept {
    if (is_scaling(pos)) return scaling_label();
    int j = 0;
    while ((pos >> (j + 1)) != 0) ++j;
    return j;
  }

  std::size_t shift_of(std::size_t pos) const noexcept {
    if (is_scaling(pos)) return pos;
    return pos - (std::size_t{1} << level_of(pos));
  }

  /// Inverse of (level_of, shift_of). `level` may be the scaling label.
  std::size_t position(int level, std::size_t k) const noexcept {
    if (level == scaling_label()) return k;
    return (std::size_t{1} << level) + k;
  }

  /// Number of shifts at a level (2^coarsest for the scaling block).
  std::size_t count(int level) const noexcept {
    return std::size_t{1} << (level == scaling_label() ? coarsest : level);
  }
};

}  // namespace fdecon
