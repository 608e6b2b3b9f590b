#include "fdecon/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fdecon/error.hpp"

namespace fdecon {
namespace {

constexpr double kTieTolerance = 1e-12;

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::Numerical, "rates", "rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

bool near(double a, double b) { return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

template <class T>
struct Exactness;

template <>
struct Exactness<double> {
  static bool eq(double a, double b) { return near(a, b); }
};

template <>
struct Exactness<Rational> {
  static bool eq(Rational a, Rational b) { return a == b; }
};

template <class T>
T maximum(T a, T b) {
  return a < b ? b : a;
}

template <class T>
struct Rate {
  T d;
  RateReport report;
};

template <class T>
Rate<T> rate_core(T s1, const std::vector<T>& s2, T inv_p, T nu, bool count_ties) {
  using E = Exactness<T>;
  if (s2.empty()) throw Error(ErrorCode::Config, "rates", "s2 needs at least one axis");
  if (nu < T{0}) throw Error(ErrorCode::Config, "rates", "nu must be >= 0");
  const T one{1}, two{2}, half = T{1} / T{2};
  const std::size_t l0 = static_cast<std::size_t>(std::min_element(s2.begin(), s2.end()) - s2.begin());
  const T s20 = s2[l0];
  const T width = two * nu + one;
  const T dense = s20 * width;
  const T sparse = width * (inv_p - half);
  const T s1_prime = s1 + half - maximum(inv_p, half);

  RateReport rep;
  rep.dense_boundary = E::eq(s1, dense);
  rep.sparse_boundary = E::eq(s1, sparse);
  rep.regime_warning = (s1 < s20 ? s1 : s20) < maximum(inv_p, half);
  rep.d1 = (rep.dense_boundary ? 1 : 0) + (rep.sparse_boundary ? 1 : 0);
  if (count_ties)
    for (std::size_t l = 0; l < s2.size(); ++l)
      if (l != l0 && E::eq(s2[l], s20)) ++rep.d1;

  T d;
  if (s1 > dense && !rep.dense_boundary) {
    rep.regime = Regime::DenseSpatial;
    d = two * s20 / (two * s20 + one);
  } else if (s1 < sparse && !rep.sparse_boundary) {
    rep.regime = Regime::Sparse;
    d = two * s1_prime / (two * s1_prime + two * nu);
  } else {
    rep.regime = Regime::DenseTime;
    d = two * s1 / (two * s1 + width);
  }
  return {d, rep};
}

double inverse(double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::Config, "rates", "p and q must lie in [1, inf]");
  return std::isinf(p) ? 0.0 : 1.0 / p;
}

RateReport finish(Rate<double> r) {
  r.report.d = r.d;
  return r.report;
}

RateReport finish(Rate<Rational> r) {
  r.report.d = r.d.to_double();
  r.report.d_exact = r.d;
  return r.report;
}

void require_single_axis(std::size_t axes) {
  if (axes != 1) throw Error(ErrorCode::Config, "rates", "exponent_2d takes exactly one spatial smoothness");
}

}  // namespace

Rational Rational::reduced(__int128 num, __int128 den) {
  if (den == 0) throw Error(ErrorCode::Numerical, "rates", "rational division by zero");
  if (den < 0) num = -num, den = -den;
  __int128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) num /= a, den /= a;
  Rational r;
  r.num_ = narrow(num);
  r.den_ = narrow(den);
  return r;
}

Rational::Rational(std::int64_t num, std::int64_t den) { *this = reduced(num, den); }

std::string Rational::str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

std::optional<Rational> Rational::parse(const std::string& text) {
  try {
    if (text.empty()) return std::nullopt;
    if (auto slash = text.find('/'); slash != std::string::npos) {
      auto a = parse(text.substr(0, slash)), b = parse(text.substr(slash + 1));
      if (!a || !b || b->num() == 0) return std::nullopt;
      return *a / *b;
    }
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
    __int128 num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'); ++i) {
      if (text[i] == '.') {
        if (dot) return std::nullopt;
        dot = true;
        continue;
      }
      digits = true;
      num = num * 10 + (text[i] - '0');
      if (dot) den *= 10;
      if (num > (__int128{1} << 62) || den > (__int128{1} << 62)) return std::nullopt;
    }
    if (!digits) return std::nullopt;
    if (i < text.size()) {
      if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
      const std::string rest = text.substr(i + 1);
      if (rest.empty()) return std::nullopt;
      std::size_t used = 0;
      const int e = std::stoi(rest, &used);
      if (used != rest.size() || std::abs(e) > 18) return std::nullopt;
      for (int k = 0; k < std::abs(e); ++k) (e > 0 ? num : den) *= 10;
    }
    return reduced(neg ? -num : num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Rational operator+(Rational a, Rational b) {
  return Rational::reduced(__int128{a.num_} * b.den_ + __int128{b.num_} * a.den_, __int128{a.den_} * b.den_);
}
Rational operator-(Rational a, Rational b) {
  return Rational::reduced(__int128{a.num_} * b.den_ - __int128{b.num_} * a.den_, __int128{a.den_} * b.den_);
}
Rational operator*(Rational a, Rational b) { return Rational::reduced(__int128{a.num_} * b.num_, __int128{a.den_} * b.den_); }
Rational operator/(Rational a, Rational b) { return Rational::reduced(__int128{a.num_} * b.den_, __int128{a.den_} * b.num_); }
bool operator<(Rational a, Rational b) { return __int128{a.num_} * b.den_ < __int128{b.num_} * a.den_; }

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::DenseSpatial: return "DenseSpatial";
    case Regime::DenseTime: return "DenseTime";
    case Regime::Sparse: return "Sparse";
  }
  return "?";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::FunctionalBetter: return "FunctionalBetter";
    case Verdict::SeparateBetter: return "SeparateBetter";
    case Verdict::Boundary: return "Boundary";
  }
  return "?";
}

double BesovBall::p_prime() const noexcept { return std::min(p, 2.0); }
double BesovBall::s1_prime() const noexcept { return s1 + 0.5 - 1.0 / p_prime(); }
double BesovBall::s1_star() const noexcept { return s1 + 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p); }
double BesovBall::s2_star(std::size_t axis) const { return s2.at(axis) + 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p); }
double BesovBall::s2_min() const { return s2.at(s2_argmin()); }
std::size_t BesovBall::s2_argmin() const {
  if (s2.empty()) throw Error(ErrorCode::Config, "rates", "s2 needs at least one axis");
  return static_cast<std::size_t>(std::min_element(s2.begin(), s2.end()) - s2.begin());
}

RateReport exponent_2d(const BesovBall& ball, double nu) {
  require_single_axis(ball.s2.size());
  return exponent_multi(ball, nu);
}

RateReport exponent_2d(const ExactBall& ball, Rational nu) {
  require_single_axis(ball.s2.size());
  return exponent_multi(ball, nu);
}

RateReport exponent_multi(const BesovBall& ball, double nu) {
  return finish(rate_core<double>(ball.s1, ball.s2, inverse(ball.p), nu, true));
}

RateReport exponent_multi(const ExactBall& ball, Rational nu) {
  if (ball.inv_p < Rational{0} || Rational{1} < ball.inv_p)
    throw Error(ErrorCode::Config, "rates", "1/p must lie in [0, 1]");
  return finish(rate_core<Rational>(ball.s1, ball.s2, ball.inv_p, nu, true));
}

double besov_norm(const HyperCoeffs& coeffs, double s1, const std::vector<double>& s2, double p, double q) {
  if (coeffs.mode() != Mode::Functional)
    throw Error(ErrorCode::Config, "rates", "Besov norms need hyperbolic (Functional) coefficients");
  if (s2.size() != coeffs.space_layouts().size())
    throw Error(ErrorCode::Config, "rates", "s2 must have one entry per spatial axis");
  const double inv_p = inverse(p), inv_q = inverse(q);
  const double s1_star = s1 + 0.5 - inv_p;

  std::map<std::vector<int>, double> blocks;  // (j, j'...) -> sum |beta|^p or sup |beta|
  for (std::size_t s = 0; s < coeffs.spatial_size(); ++s)
    for (std::size_t t = 0; t < coeffs.time_size(); ++t) {
      const auto idx = coeffs.index_of(s, t);
      std::vector<int> key{idx.j};
      key.insert(key.end(), idx.j_prime.begin(), idx.j_prime.end());
      const double mag = std::abs(coeffs.at(s, t));
      double& acc = blocks[key];
      acc = inv_p == 0.0 ? std::max(acc, mag) : acc + std::pow(mag, p);
    }

  double total = 0.0;
  for (const auto& [key, acc] : blocks) {
    double exponent = key[0] * s1_star;
    for (std::size_t a = 0; a < s2.size(); ++a) exponent += key[a + 1] * (s2[a] + 0.5 - inv_p);
    const double inner = inv_p == 0.0 ? acc : std::pow(acc, inv_p);
    const double term = std::exp2(exponent) * inner;
    total = inv_q == 0.0 ? std::max(total, term) : total + std::pow(term, q);
  }
  return inv_q == 0.0 ? total : std::pow(total, inv_q);
}

Comparison compare_strategies(double s1, double s2, double nu, double m, double n) {
  if (!(s2 > 0.0) || !(nu >= 0.0) || !(m >= 1.0) || !(n >= 1.0))
    throw Error(ErrorCode::Config, "rates", "compare needs s2 > 0, nu >= 0, M >= 1, N >= 1");
  Comparison out;
  const double dense = s2 * (2.0 * nu + 1.0);
  if (s1 <= dense) {
    out.exponent = std::numeric_limits<double>::quiet_NaN();
    out.surrogate = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.exponent = (s1 - dense) / (s2 * (2.0 * s1 + 2.0 * nu + 1.0));
  out.surrogate = m * std::pow(n, -out.exponent);
  if (std::abs(out.surrogate - 1.0) <= 1e-9)
    out.verdict = Verdict::Boundary;
  else
    out.verdict = out.surrogate < 1.0 ? Verdict::SeparateBetter : Verdict::FunctionalBetter;
  return out;
}

}  // namespace fdecon
