#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdecon/estimator.hpp"

namespace fdecon {

/// Exact fraction over 64-bit integers, always reduced with a positive
/// denominator. Arithmetic throws Numerical on overflow.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(google-explicit-constructor)

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// Accepts "3", "-4/7", "1.25" and "1e-3"; nullopt for anything else.
  static std::optional<Rational> parse(const std::string& text);

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(Rational a, Rational b) noexcept { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(Rational a, Rational b);
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend bool operator>(Rational a, Rational b) { return b < a; }

 private:
  static Rational reduced(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class Regime { DenseSpatial, DenseTime, Sparse };
enum class Verdict { FunctionalBetter, SeparateBetter, Boundary };

const char* to_string(Regime r) noexcept;
const char* to_string(Verdict v) noexcept;

/// Mixed-smoothness Besov ball B^{s1, s2}_{p,q}(A). `s2` has one entry per
/// spatial axis. p and q may be +infinity.
struct BesovBall {
  double s1 = 1.0;
  std::vector<double> s2{1.0};
  double p = 2.0;
  double q = 2.0;
  double a_radius = 1.0;

  double p_prime() const noexcept;
  double s1_prime() const noexcept;
  double s1_star() const noexcept;
  double s2_star(std::size_t axis) const;
  double s2_min() const;
  std::size_t s2_argmin() const;
};

/// The same ball with exact entries. p enters only through 1/p, so p = inf is
/// inv_p = 0.
struct ExactBall {
  Rational s1{1};
  std::vector<Rational> s2{Rational{1}};
  Rational inv_p{1, 2};
};

struct RateReport {
  double d = 0.0;
  std::optional<Rational> d_exact;
  int d1 = 0;  ///< power of the extra log factor
  Regime regime = Regime::DenseTime;
  bool dense_boundary = false;   ///< s1 == s2_0 (2 nu + 1)
  bool sparse_boundary = false;  ///< s1 == (2 nu + 1)(1/p - 1/2)
  bool regime_warning = false;   ///< min(s1, s2_0) < max(1/p, 1/2)
};

/// Three-case exponent for one spatial axis; throws Config when s2 has more
/// than one entry.
RateReport exponent_2d(const BesovBall& ball, double nu);
RateReport exponent_2d(const ExactBall& ball, Rational nu);

/// r spatial axes: the rate depends on min_l s2_l and D1 counts the ties.
RateReport exponent_multi(const BesovBall& ball, double nu);
RateReport exponent_multi(const ExactBall& ball, Rational nu);

/// (sum_{j,j'} 2^{(j s1* + j'.s2*) q} (sum_{k,k'} |beta|^p)^{q/p})^{1/q}, with
/// sup in place of the sums when p or q is infinite. Scaling blocks enter with
/// their level label m0 - 1. Separate-mode coefficients have no spatial
/// levels and are rejected with Config.
double besov_norm(const HyperCoeffs& coeffs, double s1, const std::vector<double>& s2, double p, double q);

struct Comparison {
  Verdict verdict = Verdict::FunctionalBetter;
  double exponent = 0.0;   ///< (s1 - s2(2nu+1)) / (s2 (2 s1 + 2 nu + 1)), NaN when not applicable
  double surrogate = 0.0;  ///< M N^-exponent, NaN when not applicable
};

/// Asymptotic surrogate M N^(-exponent) evaluated at finite M, N.
Comparison compare_strategies(double s1, double s2, double nu, double m, double n);

}  // namespace fdecon
