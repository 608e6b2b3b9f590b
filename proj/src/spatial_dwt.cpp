#include "fdecon/spatial_dwt.hpp"

#include <functional>
#include <numeric>
#include <string>

#include "fdecon/error.hpp"

namespace fdecon {
namespace {

// Daubechies extremal-phase lowpass, 6 vanishing moments, unit energy.
constexpr std::array<double, SpatialBasis::kTaps> kDaub12 = {
    0.11154074335010946362,  0.49462389039845308568,  0.75113390802109535068,  0.31525035170919762909,
    -0.22626469396543982008, -0.12976686756726193556, 0.097501605587323049102, 0.027522865530305728626,
    -0.031582039317486029565, 0.00055384220116149613925, 0.0047772575109455106396, -0.0010773010853084795649,
};

int log2_exact(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::Config, "spatial_dwt", "length " + std::to_string(n) + " is not a power of two");
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

}  // namespace

SpatialBasis::SpatialBasis(int coarsest_level) : m0_(coarsest_level), low_(kDaub12) {
  if (m0_ < 0 || m0_ > 30) throw Error(ErrorCode::Config, "spatial_dwt", "coarsest level must lie in [0, 30]");
  for (std::size_t i = 0; i < kTaps; ++i) high_[i] = ((i % 2 == 0) ? 1.0 : -1.0) * low_[kTaps - 1 - i];
}

WaveletLayout SpatialBasis::layout(std::size_t length) const {
  const int levels = log2_exact(length);
  return {std::min(m0_, levels), levels};
}

// One analysis step on v[0, len): approximation into [0, len/2), detail into
// [len/2, len), with circular indexing.
template <class T>
void SpatialBasis::step_forward(std::span<T> v, std::size_t len, std::vector<T>& work) const {
  const std::size_t half = len / 2;
  work.assign(len, T{});
  for (std::size_t k = 0; k < half; ++k) {
    T a{}, d{};
    for (std::size_t i = 0; i < kTaps; ++i) {
      const T& x = v[(2 * k + i) % len];
      a += low_[i] * x;
      d += high_[i] * x;
    }
    work[k] = a;
    work[half + k] = d;
  }
  std::copy(work.begin(), work.end(), v.begin());
}

template <class T>
void SpatialBasis::step_inverse(std::span<T> v, std::size_t len, std::vector<T>& work) const {
  const std::size_t half = len / 2;
  work.assign(len, T{});
  for (std::size_t k = 0; k < half; ++k) {
    const T a = v[k];
    const T d = v[half + k];
    for (std::size_t i = 0; i < kTaps; ++i) work[(2 * k + i) % len] += low_[i] * a + high_[i] * d;
  }
  std::copy(work.begin(), work.end(), v.begin());
}

template <class T>
void SpatialBasis::forward(std::span<T> v) const {
  const WaveletLayout lay = layout(v.size());
  std::vector<T> work;
  for (int level = lay.finest; level > lay.coarsest; --level) step_forward(v, std::size_t{1} << level, work);
}

template <class T>
void SpatialBasis::inverse(std::span<T> v) const {
  const WaveletLayout lay = layout(v.size());
  std::vector<T> work;
  for (int level = lay.coarsest + 1; level <= lay.finest; ++level) step_inverse(v, std::size_t{1} << level, work);
}

template <class T, bool Forward>
void SpatialBasis::tensor_apply(std::span<T> a, std::span<const std::size_t> dims) const {
  const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (dims.empty() || total != a.size())
    throw Error(ErrorCode::Index, "spatial_dwt", "array extent does not match the declared dimensions");
  std::size_t stride = total;
  std::vector<T> fiber;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const std::size_t len = dims[axis];
    log2_exact(len);
    stride /= len;
    const std::size_t outer = total / (len * stride);
    fiber.resize(len);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t s = 0; s < stride; ++s) {
        const std::size_t base = o * len * stride + s;
        for (std::size_t i = 0; i < len; ++i) fiber[i] = a[base + i * stride];
        if constexpr (Forward)
          forward<T>(fiber);
        else
          inverse<T>(fiber);
        for (std::size_t i = 0; i < len; ++i) a[base + i * stride] = fiber[i];
      }
  }
}

template <class T>
void SpatialBasis::tensor_forward(std::span<T> a, std::span<const std::size_t> dims) const {
  tensor_apply<T, true>(a, dims);
}

template <class T>
void SpatialBasis::tensor_inverse(std::span<T> a, std::span<const std::size_t> dims) const {
  tensor_apply<T, false>(a, dims);
}

template void SpatialBasis::forward<double>(std::span<double>) const;
template void SpatialBasis::inverse<double>(std::span<double>) const;
template void SpatialBasis::forward<std::complex<double>>(std::span<std::complex<double>>) const;
template void SpatialBasis::inverse<std::complex<double>>(std::span<std::complex<double>>) const;
template void SpatialBasis::tensor_forward<double>(std::span<double>, std::span<const std::size_t>) const;
template void SpatialBasis::tensor_inverse<double>(std::span<double>, std::span<const std::size_t>) const;
template void SpatialBasis::tensor_forward<std::complex<double>>(std::span<std::complex<double>>,
                                                                 std::span<const std::size_t>) const;
template void SpatialBasis::tensor_inverse<std::complex<double>>(std::span<std::complex<double>>,
                                                                 std::span<const std::size_t>) const;

}  // namespace fdecon
