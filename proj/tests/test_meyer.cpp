#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "fdecon/error.hpp"
#include "fdecon/estimator.hpp"
#include "fdecon/meyer.hpp"
#include "fdecon/simlab.hpp"
#include "fdecon/spectra.hpp"

using namespace fdecon;
using std::numbers::pi;

namespace {

// theta(x) = 140 * integral_0^x s^3 (1 - s)^3 ds, by Simpson quadrature.
double theta_by_quadrature(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const int panels = 2000;
  double sum = 0;
  for (int i = 0; i <= panels; ++i) {
    const double s = x * i / panels;
    const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    sum += w * std::pow(s * (1 - s), 3);
  }
  return 140 * sum * x / (3.0 * panels);
}

// |psihat(w)| written from the textbook Meyer construction.
double meyer_psi_magnitude(double w) {
  const double a = std::abs(w);
  if (a >= 2 * pi / 3 && a <= 4 * pi / 3) return std::sin(pi / 2 * theta_by_quadrature(3 * a / (2 * pi) - 1));
  if (a >= 4 * pi / 3 && a <= 8 * pi / 3) return std::cos(pi / 2 * theta_by_quadrature(3 * a / (4 * pi) - 1));
  return 0;
}

int ceil_div3(long v) { return int((v + 2) / 3); }

std::size_t slot(int m, std::size_t n) { return std::size_t((m % long(n) + long(n)) % long(n)); }

std::vector<cplx> spectrum_of(const std::vector<double>& row) {
  auto s = fourier_coeffs(ObservationGrid(1, row.size(), 0.0, row));
  return {s.data().begin(), s.data().end()};
}

std::vector<cplx> band_limit(std::vector<cplx> row, int top) {
  const std::size_t n = row.size();
  for (int m = -int(n / 2); m < int(n / 2); ++m)
    if (std::abs(m) > top) row[slot(m, n)] = 0;
  return row;
}

double energy(const std::vector<cplx>& v) {
  double e = 0;
  for (auto c : v) e += std::norm(c);
  return e;
}

}  // namespace

TEST_CASE("auxiliary polynomial") {
  for (double x = 0; x <= 1.0; x += 1.0 / 64) {
    CHECK(std::abs(MeyerBasis::aux_polynomial(x) - theta_by_quadrature(x)) < 1e-12);
    CHECK(std::abs(MeyerBasis::aux_polynomial(x) + MeyerBasis::aux_polynomial(1 - x) - 1) < 1e-13);
  }
  CHECK(MeyerBasis::aux_polynomial(-0.5) == 0);
  CHECK(MeyerBasis::aux_polynomial(1.5) == 1);
}

TEST_CASE("windows match the textbook construction and have unit energy") {
  for (double w = -9.0; w <= 9.0; w += 0.013) CHECK(std::abs(MeyerBasis::wavelet_window(w) - meyer_psi_magnitude(w)) < 1e-12);
  // (1 / 2 pi) integral |psihat|^2 dw = 1 and the same for the scaling window.
  const int panels = 200000;
  double psi_energy = 0, phi_energy = 0;
  const double lo = -3 * pi, hi = 3 * pi, h = (hi - lo) / panels;
  for (int i = 0; i <= panels; ++i) {
    const double w = lo + i * h, c = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    psi_energy += c * std::pow(meyer_psi_magnitude(w), 2);
    phi_energy += c * std::pow(MeyerBasis::scaling_window(w), 2);
  }
  CHECK(std::abs(psi_energy * h / 3 / (2 * pi) - 1) < 1e-9);
  CHECK(std::abs(phi_energy * h / 3 / (2 * pi) - 1) < 1e-9);
}

TEST_CASE("basis invariants for j in [3, 8]") {
  MeyerBasis basis;
  for (int j = 3; j <= 8; ++j) {
    const long period = 1L << j;
    const int lo = ceil_div3(period), hi = int((4 * period) / 3);
    const double bound = std::pow(2.0, -0.5 * j);
    for (long k : {0L, 1L, period / 2 + 1, period - 1}) {
      double total = 0;
      for (int m = -2 * int(period); m <= 2 * int(period); ++m) {
        const cplx v = basis.psi(j, k, m);
        const cplx base = basis.psi(j, 0, m);
        total += std::norm(v);
        CHECK(std::abs(v) <= bound * (1 + 1e-15));
        CHECK(std::abs(v - base * std::polar(1.0, -2 * pi * double(m) * double(k) / double(period))) < 1e-13);
        if (std::abs(m) < lo || std::abs(m) > hi) CHECK(v == cplx(0.0));
        CHECK(std::abs(std::abs(v) - bound * meyer_psi_magnitude(2 * pi * m / double(period))) < 1e-12);
      }
      CHECK(std::abs(total - 1) < 1e-10);
    }
  }
}

TEST_CASE("psi at level 5 has unit energy and a spectral hole") {
  MeyerBasis basis;
  double total = 0;
  for (int m = -64; m <= 64; ++m) total += std::norm(basis.psi(5, 0, m));
  CHECK(std::abs(total - 1) < 1e-10);
  for (int j = 3; j <= 8; ++j) {
    CHECK(basis.psi(j, 0, (1 << j) / 4) == cplx(0.0));
    CHECK(basis.psi(j, 0, -(1 << j) / 4) == cplx(0.0));
  }
  CHECK_THROWS_AS(basis.psi(5, 32, 3), Error);
  CHECK_THROWS_AS(basis.psi(5, -1, 3), Error);
  try {
    basis.psi(2, 0, 1);
    FAIL("level below m0 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooCoarse);
  }
}

TEST_CASE("support sets") {
  MeyerBasis basis;
  auto w3 = basis.support_set(3);
  CHECK(!w3.empty());
  for (int m : w3) {
    CHECK(std::abs(m) >= 3);
    CHECK(std::abs(m) <= 10);
  }
  for (int j = 3; j <= 11; ++j) {
    auto w = basis.support_set(j);
    const long period = 1L << j;
    CHECK(w.size() <= std::size_t(2 * (2 * period + 1)));
    std::set<int> expected;
    for (int m = -2 * int(period); m <= 2 * int(period); ++m)
      if (meyer_psi_magnitude(2 * pi * m / double(period)) > 1e-14) expected.insert(m);
    CHECK(std::set<int>(w.begin(), w.end()) == expected);
    for (int m : w) {
      CHECK(m != 0);
      CHECK(std::abs(m) >= ceil_div3(period));
      CHECK(std::abs(m) <= (4 * period) / 3);
    }
    // Levels two apart meet at most on the band edge 2^(j+2)/3, which is not an integer.
    auto w2 = basis.support_set(j + 2);
    std::set<int> next(w2.begin(), w2.end());
    for (int m : w) CHECK(next.count(m) == 0);
  }
  CHECK_THROWS_AS(basis.support_set(2), Error);
}

TEST_CASE("analysis of a single atom") {
  MeyerBasis basis;
  const std::size_t n = 256;
  const int finest = 7;
  for (auto [j0, k0] : {std::pair{3, 5}, std::pair{5, 17}, std::pair{6, 0}}) {
    std::vector<cplx> row(n);
    for (int m = -128; m < 128; ++m) row[slot(m, n)] = basis.psi(j0, k0, m);
    auto b = basis.analyze(row, finest);
    const auto lay = basis.layout(finest);
    for (std::size_t p = 0; p < b.size(); ++p) {
      const bool target = lay.level_of(p) == j0 && lay.shift_of(p) == std::size_t(k0);
      CHECK(std::abs(b[p] - cplx(target ? 1.0 : 0.0)) < 1e-10);
    }
    // Synthesis of the unit coefficient returns the same spectrum.
    std::vector<cplx> unit(b.size());
    unit[lay.position(j0, std::size_t(k0))] = 1.0;
    auto back = basis.synthesize(unit, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - row[i]) < 1e-13);
  }
  std::vector<cplx> zeros(n);
  for (auto c : basis.analyze(zeros, finest)) CHECK(c == cplx(0.0));
}

TEST_CASE("Parseval on the blip spectrum") {
  MeyerBasis basis;
  const std::size_t n = 512;
  const int finest = 8;
  // The levels below J tile |m| <= 2^J / 3 with unit total weight.
  auto row = band_limit(spectrum_of(test_function(TestFunction::Blip, n)), (1 << finest) / 3);
  auto b = basis.analyze(row, finest);
  CHECK(std::abs(energy(b) - energy(row)) < 1e-8);
  auto full = spectrum_of(test_function(TestFunction::Blip, n));
  CHECK(energy(basis.analyze(full, finest)) <= energy(full) + 1e-12);
}

TEST_CASE("round trips") {
  MeyerBasis basis;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  for (std::size_t n : {64, 256, 1024}) {
    const int finest = time_capacity(n);
    std::vector<double> x(n);
    for (auto& v : x) v = z(rng);
    auto covered = band_limit(spectrum_of(x), (1 << finest) / 3);
    auto back = basis.synthesize(basis.analyze(covered, finest), n);
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - covered[i]));
    CHECK(worst < 1e-10);

    // Arbitrary coefficients survive synthesis followed by analysis (isometry).
    std::vector<cplx> c(std::size_t{1} << finest);
    for (auto& v : c) v = cplx(z(rng), z(rng));
    auto spec = basis.synthesize(c, n);
    CHECK(std::abs(energy(spec) - energy(c)) < 1e-9 * energy(c));
    auto again = basis.analyze(spec, finest);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(again[i] - c[i]) < 1e-10);
  }
}

TEST_CASE("white noise at N = 256") {
  MeyerBasis basis;
  const std::size_t n = 256;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  const int finest = 7;
  auto spec = spectrum_of(x);
  auto back = basis.synthesize(basis.analyze(spec, finest), n);
  const int covered = (1 << finest) / 3;
  for (int m = -covered; m <= covered; ++m) CHECK(std::abs(back[slot(m, n)] - spec[slot(m, n)]) < 1e-9);
}

TEST_CASE("level and shape errors") {
  MeyerBasis basis;
  std::vector<cplx> row(64);
  try {
    basis.analyze(row, 6);
    FAIL("band beyond Nyquist accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooFine);
    CHECK(std::string(e.what()).find("j=5") != std::string::npos);
  }
  CHECK_NOTHROW(basis.analyze(row, 5));
  CHECK_THROWS_AS(basis.analyze(row, 2), Error);
  CHECK_THROWS_AS(basis.synthesize(std::vector<cplx>(12), 64), Error);
  CHECK_THROWS_AS(basis.synthesize(std::vector<cplx>(4), 64), Error);
  CHECK(MeyerBasis::band_top(8) == 170);
  CHECK(time_capacity(512) == 8);
  CHECK(time_capacity(256) == 7);
}
