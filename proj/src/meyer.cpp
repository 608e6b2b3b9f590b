#include "fdecon/meyer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fdecon/error.hpp"
#include "fft.hpp"

namespace fdecon {
namespace {

constexpr double kPi = std::numbers::pi;

std::size_t wrap(long long m, std::size_t period) {
  const auto p = static_cast<long long>(period);
  long long r = m % p;
  return static_cast<std::size_t>(r < 0 ? r + p : r);
}

}  // namespace

double MeyerBasis::aux_polynomial(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x4 = x * x * x * x;
  return x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

double MeyerBasis::scaling_window(double w) noexcept {
  const double a = std::abs(w);
  if (a <= 2.0 * kPi / 3.0) return 1.0;
  if (a >= 4.0 * kPi / 3.0) return 0.0;
  return std::cos(0.5 * kPi * aux_polynomial(3.0 * a / (2.0 * kPi) - 1.0));
}

double MeyerBasis::wavelet_window(double w) noexcept {
  const double a = std::abs(w);
  if (a <= 2.0 * kPi / 3.0 || a >= 8.0 * kPi / 3.0) return 0.0;
  if (a <= 4.0 * kPi / 3.0) return std::sin(0.5 * kPi * aux_polynomial(3.0 * a / (2.0 * kPi) - 1.0));
  return std::cos(0.5 * kPi * aux_polynomial(3.0 * a / (4.0 * kPi) - 1.0));
}

MeyerBasis::MeyerBasis(int coarsest_level, int cached_up_to)
    : m0_(coarsest_level), cached_up_to_(cached_up_to) {
  if (m0_ < 1 || m0_ > 28) throw Error(ErrorCode::Config, "meyer", "coarsest level must lie in [1, 28]");
  scaling_ = make_scaling_table();
  for (int j = m0_; j <= cached_up_to_; ++j) wavelets_.push_back(make_wavelet_table(j));
}

MeyerBasis::Table MeyerBasis::make_wavelet_table(int j) const {
  Table t;
  const double period = std::ldexp(1.0, j);
  const double scale = std::pow(2.0, -0.5 * j);
  const int top = static_cast<int>(std::floor(4.0 * period / 3.0));
  for (int m = -top; m <= top; ++m) {
    const double w = 2.0 * kPi * m / period;
    const double mag = wavelet_window(w);
    if (mag <= kSupportTolerance) continue;
    // psihat(w) = exp(-i w / 2) |psihat(w)|: the mother wavelet is real and
    // symmetric about 1/2.
    t.emplace_back(m, scale * mag * std::polar(1.0, -0.5 * w));
  }
  return t;
}

MeyerBasis::Table MeyerBasis::make_scaling_table() const {
  Table t;
  const double period = std::ldexp(1.0, m0_);
  const double scale = std::pow(2.0, -0.5 * m0_);
  const int top = static_cast<int>(std::floor(2.0 * period / 3.0));
  for (int m = -top; m <= top; ++m) {
    const double mag = scaling_window(2.0 * kPi * m / period);
    if (mag <= kSupportTolerance) continue;
    t.emplace_back(m, cplx(scale * mag, 0.0));
  }
  return t;
}

const MeyerBasis::Table& MeyerBasis::table_for(int level, Table& scratch) const {
  if (level == m0_ - 1) return scaling_;
  if (level <= cached_up_to_) return wavelets_[static_cast<std::size_t>(level - m0_)];
  scratch = make_wavelet_table(level);
  return scratch;
}

cplx MeyerBasis::psi(int j, long long k, int m) const {
  if (j < m0_)
    throw Error(ErrorCode::LevelTooCoarse, "meyer",
                "level " + std::to_string(j) + " is below the coarsest level " + std::to_string(m0_));
  if (j > 40) throw Error(ErrorCode::LevelTooFine, "meyer", "level " + std::to_string(j) + " too fine");
  const long long period = 1LL << j;
  if (k < 0 || k >= period)
    throw Error(ErrorCode::Index, "meyer", "shift k=" + std::to_string(k) + " outside [0, 2^" + std::to_string(j) + ")");
  const double w = 2.0 * kPi * m / static_cast<double>(period);
  const double mag = wavelet_window(w);
  if (mag <= kSupportTolerance) return {0.0, 0.0};
  const double phase = -0.5 * w - 2.0 * kPi * static_cast<double>(wrap(static_cast<long long>(m) * k, period)) /
                                      static_cast<double>(period);
  return std::pow(2.0, -0.5 * j) * mag * std::polar(1.0, phase);
}

cplx MeyerBasis::phi(long long k, int m) const {
  const long long period = 1LL << m0_;
  if (k < 0 || k >= period)
    throw Error(ErrorCode::Index, "meyer", "scaling shift k=" + std::to_string(k) + " out of range");
  const double mag = scaling_window(2.0 * kPi * m / static_cast<double>(period));
  if (mag <= kSupportTolerance) return {0.0, 0.0};
  const double phase =
      -2.0 * kPi * static_cast<double>(wrap(static_cast<long long>(m) * k, period)) / static_cast<double>(period);
  return std::pow(2.0, -0.5 * m0_) * mag * std::polar(1.0, phase);
}

std::vector<int> MeyerBasis::support_set(int j) const {
  if (j < m0_)
    throw Error(ErrorCode::LevelTooCoarse, "meyer",
                "level " + std::to_string(j) + " is below the coarsest level " + std::to_string(m0_));
  Table scratch;
  const Table& t = table_for(j, scratch);
  std::vector<int> out;
  out.reserve(t.size());
  for (const auto& [m, v] : t) out.push_back(m);
  return out;
}

int MeyerBasis::band_top(int finest) noexcept {
  // Top edge of the finest block is 2^(finest+1)/3, never an integer.
  return static_cast<int>(std::floor(std::ldexp(1.0, finest + 1) / 3.0));
}

void MeyerBasis::check_finest(int finest, std::size_t n) const {
  if (finest < m0_)
    throw Error(ErrorCode::LevelTooCoarse, "meyer",
                "finest level J=" + std::to_string(finest) + " is below m0=" + std::to_string(m0_));
  if (static_cast<std::size_t>(band_top(finest)) >= n / 2)
    throw Error(ErrorCode::LevelTooFine, "meyer",
                "band of level j=" + std::to_string(finest == m0_ ? m0_ - 1 : finest - 1) + " reaches |m|=" +
                    std::to_string(band_top(finest)) + ", beyond Nyquist for N=" + std::to_string(n));
}

std::vector<cplx> MeyerBasis::analyze(std::span<const cplx> row, int finest) const {
  check_finest(finest, row.size());
  const WaveletLayout lay = layout(finest);
  std::vector<cplx> out(lay.size());
  std::vector<cplx> folded;
  Table scratch;
  for (int level = m0_ - 1; level < finest; ++level) {
    const std::size_t period = lay.count(level);
    folded.assign(period, cplx{});
    for (const auto& [m, v] : table_for(level, scratch)) folded[wrap(m, period)] += row[wrap(m, row.size())] * std::conj(v);
    std::span<cplx> block(out.data() + lay.position(level, 0), period);
    detail::dft_backward(folded, block);
  }
  return out;
}

std::vector<cplx> MeyerBasis::synthesize(std::span<const cplx> coeffs, std::size_t n) const {
  if (coeffs.empty() || (coeffs.size() & (coeffs.size() - 1)) != 0)
    throw Error(ErrorCode::Index, "meyer", "coefficient vector length must be a power of two");
  int finest = 0;
  while ((std::size_t{1} << finest) < coeffs.size()) ++finest;
  if (finest < m0_)
    throw Error(ErrorCode::Index, "meyer",
                "coefficient vector of length " + std::to_string(coeffs.size()) + " is shorter than the scaling block");
  check_finest(finest, n);
  const WaveletLayout lay = layout(finest);
  std::vector<cplx> out(n);
  std::vector<cplx> spectrum;
  Table scratch;
  for (int level = m0_ - 1; level < finest; ++level) {
    const std::size_t period = lay.count(level);
    spectrum.resize(period);
    detail::dft_forward(coeffs.subspan(lay.position(level, 0), period), spectrum);
    for (const auto& [m, v] : table_for(level, scratch)) out[wrap(m, n)] += v * spectrum[wrap(m, period)];
  }
  return out;
}

}  // namespace fdecon
