#pragma once

#include <complex>
#include <span>

namespace fdecon::detail {

using cplx = std::complex<double>;

// Unnormalized DFTs backed by FFTW. Forward: X[r] = sum_k x[k] exp(-i2pi rk/n),
// backward uses exp(+i2pi rk/n). `in` and `out` may alias.
// Safe to call from several threads; plans are shared and created under a lock.
void dft_forward(std::span<const cplx> in, std::span<cplx> out);
void dft_backward(std::span<const cplx> in, std::span<cplx> out);

}  // namespace fdecon::detail
