#pragma once

#include "cmfact/arith.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cmfact {

// A p-adic number known modulo p^precision (absolute precision). Nonzero values are stored
// as p^valuation * unit with the unit reduced mod p^(precision - valuation).
class PAdic {
 public:
  PAdic() = default;

  static PAdic zero(std::uint64_t p, int precision);
  static PAdic from_integer(const Integer& n, std::uint64_t p, int precision);
  static PAdic from_rational(const Rational& r, std::uint64_t p, int precision);
  // p^valuation * unit, with unit coprime to p, known to `relative_precision` digits.
  static PAdic from_unit(std::uint64_t p, int valuation, const Integer& unit, int relative_precision);

  std::uint64_t prime() const { return p_; }
  bool is_zero() const { return zero_; }
  // For a zero value this is the precision (the value is only known to vanish to that depth).
  int valuation() const { return zero_ ? precision_ : valuation_; }
  const Integer& unit() const { return unit_; }
  int precision() const { return precision_; }
  int relative_precision() const { return zero_ ? 0 : precision_ - valuation_; }

  // Representative in [0, p^precision) of a value with nonnegative valuation.
  Integer residue() const;
  // Largest k <= min precision with this = other mod p^k.
  int agreement(const PAdic& other) const;
  bool congruent(const PAdic& other, int k) const { return agreement(other) >= k; }

  PAdic with_precision(int precision) const;  // never increases precision
  PAdic operator-() const;
  PAdic operator+(const PAdic& o) const;
  PAdic operator-(const PAdic& o) const;
  PAdic operator*(const PAdic& o) const;
  PAdic operator/(const PAdic& o) const;
  PAdic operator*(const Integer& k) const;
  PAdic pow(int e) const;

  std::vector<int> unit_digits() const;  // base-p digits of the unit, least significant first
  std::string to_string() const;         // "(v, [d0 d1 ...], K)"

 private:
  std::uint64_t p_ = 2;
  bool zero_ = true;
  int valuation_ = 0;
  Integer unit_ = 0;
  int precision_ = 0;

  void check_prime(const PAdic& o) const;
};

// a + b*eps with eps^2 = 0.
struct DualPAdic {
  PAdic std;
  PAdic eps;

  DualPAdic operator+(const DualPAdic& o) const { return {std + o.std, eps + o.eps}; }
  DualPAdic operator-(const DualPAdic& o) const { return {std - o.std, eps - o.eps}; }
  DualPAdic operator*(const DualPAdic& o) const { return {std * o.std, std * o.eps + eps * o.std}; }
  DualPAdic operator-() const { return {-std, -eps}; }
  int agreement(const DualPAdic& o) const;
  std::string to_string() const;
};

// (u + v sqrt D)/2 with rational u, v.
struct FElement {
  Rational u = 0;
  Rational v = 0;
  std::int64_t d = 0;

  static FElement from_xt(std::int64_t d, std::int64_t x, std::int64_t t) { return {Rational(x), Rational(t), d}; }
  Rational trace() const { return u; }
  Rational norm() const { return (u * u - Rational(d) * v * v) / 4; }
  FElement conjugate() const { return {u, -v, d}; }
  FElement operator*(const FElement& o) const;
  FElement operator/(const Rational& r) const { return {u / r, v / r, d}; }
  bool is_zero() const { return u == 0 && v == 0; }
  friend bool operator==(const FElement&, const FElement&) = default;
};

// Canonical square root: r = smallest positive valid residue mod p (mod 4 for p = 2).
PAdic hensel_sqrt(const Integer& a, std::uint64_t p, int precision);

// Iwasawa branch: log_p(p) = 0. The result is known to the unit's relative precision.
PAdic iwasawa_log(const PAdic& x);

// Number of series terms needed so that every omitted z^n/n has valuation >= target when
// v(z) >= vz, from v(z^n/n) >= n*vz - floor(log_p n).
int log_series_terms(std::uint64_t p, int vz, int target);

enum class PrimeAboveP { P1, P2 };

// The completions of F at the two primes above a split p. P1 is the prime labelled `label`,
// which contains (label + sqrt D)/2, so there sqrt D maps to -r with r = label mod p (mod 4).
class LocalEmbedding {
 public:
  LocalEmbedding(std::int64_t d, std::uint64_t p, std::int64_t label, int precision, int guard = 64);

  std::uint64_t prime() const { return p_; }
  int precision() const { return precision_; }
  const Integer& root() const { return root_; }  // r mod p^(precision + guard)

  // Image with relative precision min(precision, what the guard digits certify).
  PAdic embed(const FElement& xi, PrimeAboveP which) const;
  int valuation(const FElement& xi, PrimeAboveP which) const { return embed(xi, which).valuation(); }

 private:
  std::int64_t d_;
  std::uint64_t p_;
  int precision_;
  int work_;
  Integer modulus_;
  Integer root_;
};

}  // namespace cmfact
