#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "fdecon/error.hpp"
#include "fdecon/grid_io.hpp"
#include "fdecon/simlab.hpp"
#include "fdecon/spectra.hpp"

using namespace fdecon;
using std::numbers::pi;

namespace {

std::vector<double> noise(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(count);
  for (auto& x : v) x = z(rng);
  return v;
}

// <e_m, 0.5 exp(-a d(t))> on the circle.
double continuous_kernel_coeff(double u, long m) {
  const double a = 1.0 + (u - 0.5) * (u - 0.5);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return a * (1.0 - sign * std::exp(-a / 2.0)) / (a * a + 4.0 * pi * pi * double(m) * double(m));
}

// The N-point Riemann sum aliases the continuous coefficients (Poisson summation).
double discrete_kernel_coeff(double u, long m, long n) {
  const long terms = 200000;
  double s = 0.0;
  for (long k = terms; k >= 1; --k) s += continuous_kernel_coeff(u, m + k * n) + continuous_kernel_coeff(u, m - k * n);
  // Remaining alias terms behave like c / k^2; sum_{k > K} 1/k^2 ~ 1/(K + 1/2).
  const double a = 1.0 + (u - 0.5) * (u - 0.5);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  const double c = a * (1.0 - sign * std::exp(-a / 2.0)) / (4.0 * pi * pi * double(n) * double(n));
  return s + 2.0 * c / (double(terms) + 0.5) + continuous_kernel_coeff(u, m);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

KernelSpectrum power_law(double nu, std::size_t profiles, std::size_t n) {
  ProfileSpectrum g(profiles, n);
  for (std::size_t l = 0; l < profiles; ++l)
    for (int m = g.min_freq(); m <= g.max_freq(); ++m)
      g.at(l, m) = m == 0 ? 1.0 : std::pow(std::abs(double(m)), -nu) * (1.0 + 0.25 * double(l));
  return KernelSpectrum{g};
}

}  // namespace

TEST_CASE("constant row has only a DC coefficient") {
  ObservationGrid grid(1, 8, 0.0, std::vector<double>(8, 1.0));
  auto s = fourier_coeffs(grid);
  CHECK(std::abs(s.at(0, 0) - cplx(1.0)) < 1e-15);
  for (int m = -4; m < 4; ++m)
    if (m != 0) CHECK(std::abs(s.at(0, m)) < 1e-15);
}

TEST_CASE("cosine row splits into two half-amplitude tones") {
  std::vector<double> v(8);
  for (int i = 0; i < 8; ++i) v[i] = std::cos(2 * pi * i / 8.0);
  auto s = fourier_coeffs(ObservationGrid(1, 8, 0.0, v));
  CHECK(std::abs(s.at(0, 1) - cplx(0.5)) < 1e-15);
  CHECK(std::abs(s.at(0, -1) - cplx(0.5)) < 1e-15);
  for (int m : {-4, -3, -2, 0, 2, 3}) CHECK(std::abs(s.at(0, m)) < 1e-15);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(ObservationGrid(1, 12, 0.0, std::vector<double>(12)), Error);
  try {
    ObservationGrid(2, 6, 0.0, std::vector<double>(12));
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
  CHECK_THROWS_AS(ObservationGrid(1, 8, -1.0, std::vector<double>(8)), Error);
  CHECK_THROWS_AS(ObservationGrid(1, 8, 0.0, std::vector<double>(7)), Error);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(ObservationGrid(1, 8, 0.0, bad), Error);
  CHECK_THROWS_AS(ProfileSpectrum(1, 8).at(0, 4), Error);
}

TEST_CASE("linearity, Parseval, conjugate symmetry and round trip") {
  const std::size_t m = 5, n = 64;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto a = noise(m * n, seed), b = noise(m * n, seed + 100);
    const double alpha = 0.3 * double(seed), beta = -1.7;
    std::vector<double> mix(m * n);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
    auto sa = fourier_coeffs(ObservationGrid(m, n, 0.0, a));
    auto sb = fourier_coeffs(ObservationGrid(m, n, 0.0, b));
    auto sm = fourier_coeffs(ObservationGrid(m, n, 0.0, mix));
    for (std::size_t i = 0; i < sm.data().size(); ++i) {
      const cplx expect = alpha * sa.data()[i] + beta * sb.data()[i];
      CHECK(std::abs(sm.data()[i] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
    for (std::size_t l = 0; l < m; ++l) {
      double time_energy = 0, freq_energy = 0;
      for (std::size_t i = 0; i < n; ++i) time_energy += a[l * n + i] * a[l * n + i];
      time_energy /= double(n);
      for (int f = sa.min_freq(); f <= sa.max_freq(); ++f) freq_energy += std::norm(sa.at(l, f));
      CHECK(std::abs(time_energy - freq_energy) <= 1e-10 * time_energy);
      for (int f = 1; f < int(n / 2); ++f) CHECK(std::abs(sa.at(l, -f) - std::conj(sa.at(l, f))) < 1e-14);
    }
    auto back = inverse_fourier(sa);
    auto again = fourier_coeffs(ObservationGrid(m, n, 0.0, back));
    for (std::size_t i = 0; i < again.data().size(); ++i)
      CHECK(std::abs(again.data()[i] - sa.data()[i]) <= 1e-10 * std::max(1.0, std::abs(sa.data()[i])));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(back[i] - a[i]) < 1e-12);
  }
}

TEST_CASE("closed-form coefficient agrees with brute-force quadrature") {
  // Composite Simpson on 2^20 panels of the raw kernel.
  const std::size_t panels = 1 << 20;
  for (double u : {0.0, 0.5, 0.9})
    for (long m : {0L, 1L, 2L, 7L, 40L}) {
      double sum = 0.0;
      for (std::size_t i = 0; i <= panels; ++i) {
        const double t = double(i) / double(panels);
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * paper_kernel(u, t) * std::cos(2 * pi * double(m) * t);
      }
      sum /= 3.0 * double(panels);
      CHECK(std::abs(sum - continuous_kernel_coeff(u, m)) < 1e-11);
    }
}

TEST_CASE("sampled kernel spectrum matches the aliased closed form") {
  const std::size_t n = 512;
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) row[i] = paper_kernel(0.5, double(i) / double(n));
  auto ks = kernel_spectrum(row, 1, n);
  for (int m = 0; m <= 255; ++m) {
    const double oracle = discrete_kernel_coeff(0.5, m, long(n));
    CHECK(std::abs(ks.g.at(0, m).real() - oracle) < 1e-12);
    CHECK(std::abs(ks.g.at(0, m).imag()) < 1e-14);
  }

  // Odd and even frequencies decay separately; on each parity the magnitude is
  // strictly decreasing and the log-log slope over [1, 64] is close to -2.
  for (int parity : {0, 1}) {
    double prev = INFINITY;
    for (int m = 2 - parity; m <= 64; m += 2) {
      const double mag = std::abs(ks.g.at(0, m));
      CHECK(mag < prev);
      prev = mag;
    }
  }
  std::vector<double> lx, ly, ox;
  for (int m = 1; m <= 64; ++m) {
    lx.push_back(std::log(double(m)));
    ly.push_back(std::log(std::abs(ks.g.at(0, m))));
    ox.push_back(std::log(std::abs(discrete_kernel_coeff(0.5, m, long(n)))));
  }
  const double s = slope(lx, ly);
  CHECK(std::abs(s - slope(lx, ox)) < 1e-9);
  CHECK(s < -1.8);
  CHECK(s > -2.2);
}

TEST_CASE("built-in kernel never vanishes on the M=128, N=512 grid") {
  const std::size_t m = 128, n = 512;
  auto ks = kernel_spectrum(paper_kernel_grid(m, n), m, n);
  for (std::size_t l = 0; l < m; l += 9)
    for (int f = -170; f <= 170; ++f) {
      CHECK(std::abs(ks.g.at(l, f)) > 0.0);
      CHECK(std::abs(std::abs(ks.g.at(l, f)) - std::abs(discrete_kernel_coeff(double(l) / m, f, long(n)))) < 1e-12);
    }
}

TEST_CASE("degenerate kernels are rejected") {
  try {
    kernel_spectrum(std::vector<double>(16, 1.0), 1, 16);
    FAIL("constant kernel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllPosedKernel);
    CHECK(std::string(e.what()).find("l=0") != std::string::npos);
  }
  std::vector<double> tone(16);
  for (int i = 0; i < 16; ++i) tone[i] = std::cos(2 * pi * i / 16.0);
  auto s = fourier_coeffs(ObservationGrid(1, 16, 0.0, tone));
  for (int m = -8; m < 8; ++m) CHECK((std::abs(s.at(0, m)) > 1e-12) == (m == 1 || m == -1));
  try {
    kernel_spectrum(tone, 1, 16);
    FAIL("single-tone kernel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllPosedKernel);
    CHECK(std::string(e.what()).find("m=-7") != std::string::npos);
  }
}

TEST_CASE("estimate_nu is exact on power laws") {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.3, 5.0}) {
    auto ks = power_law(nu, 3, 256);
    CHECK(std::abs(estimate_nu(ks, {8, 64}) - nu) < 1e-12);
    CHECK(ks.nu == doctest::Approx(nu).epsilon(1e-12));
    CHECK(ks.c1 > 0.0);
    CHECK(ks.c1 <= ks.c2);
  }
  auto ks = power_law(1.0, 1, 64);
  CHECK(std::abs(estimate_nu(ks, {1, 31}) - 1.0) < 1e-12);
  ks = power_law(2.0, 1, 64);
  CHECK(std::abs(estimate_nu(ks, {1, 31}) - 2.0) < 1e-12);
}

TEST_CASE("estimate_nu range checks") {
  auto ks = power_law(1.0, 1, 64);
  try {
    estimate_nu(ks, {4, 10});
    FAIL("seven frequencies accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientRange);
  }
  CHECK_THROWS_AS(estimate_nu(ks, {8, 40}), Error);
  CHECK_NOTHROW(estimate_nu(ks, {4, 11}));
}

TEST_CASE("built-in kernel has degree of ill-posedness near two") {
  auto ks = kernel_spectrum(paper_kernel_grid(16, 512), 16, 512);
  const double nu = estimate_nu(ks, {8, 128});
  CHECK(nu >= 1.85);
  CHECK(nu <= 2.15);
}

TEST_CASE("grid files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "fdecon_test_spectra";
  std::filesystem::create_directories(dir);
  ObservationGrid grid(3, 8, 0.25, noise(24, 7));
  const auto bin = (dir / "g.fdg").string(), csv = (dir / "g.csv").string();
  write_grid(grid, bin);
  write_grid(grid, csv);

  auto a = read_grid(bin);
  CHECK(a.m() == 3);
  CHECK(a.n() == 8);
  CHECK(a.sigma() == 0.25);
  for (std::size_t i = 0; i < 24; ++i) CHECK(a.samples()[i] == grid.samples()[i]);
  auto b = read_grid(csv);
  CHECK(b.sigma() == 0.25);
  for (std::size_t i = 0; i < 24; ++i) CHECK(b.samples()[i] == grid.samples()[i]);

  std::ifstream is(bin, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), {});
  REQUIRE(bytes.size() == 4 + 8 + 8 + 8 + 24 * 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FDG1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 3);
  CHECK(static_cast<unsigned char>(bytes[12]) == 8);

  std::ofstream(dir / "bad.csv") << "2,8,0\n1,2,3\n";
  try {
    read_grid((dir / "bad.csv").string());
    FAIL("short CSV accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  CHECK_THROWS_AS(read_grid((dir / "missing.fdg").string()), Error);
  std::filesystem::remove_all(dir);
}
