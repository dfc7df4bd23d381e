#pragma once

#include "cmfact/arith.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cmfact {

struct PrimePower {
  std::uint64_t prime;
  int exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class FactoredInteger {
 public:
  FactoredInteger() = default;
  // Factors must be certified primes in strictly increasing order with positive exponents.
  FactoredInteger(int sign, std::vector<PrimePower> factors);

  int sign() const { return sign_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  int exponent_of(std::uint64_t prime) const;
  bool is_one() const { return sign_ == 1 && factors_.empty(); }

  Integer value() const;
  std::string to_string() const;  // "2^19 * 3^6 * 5^3", "1", "-1 * 2^2"

  FactoredInteger operator*(const FactoredInteger& other) const;
  FactoredInteger pow(unsigned e) const;

  friend bool operator==(const FactoredInteger&, const FactoredInteger&) = default;

 private:
  int sign_ = 1;
  std::vector<PrimePower> factors_;
};

// Exact prime factorization for 0 < |n| < 2^63.
FactoredInteger factorize(std::int64_t n);

class FactoredRational {
 public:
  FactoredRational() = default;
  FactoredRational(const FactoredInteger& numerator, const FactoredInteger& denominator);

  static FactoredRational from_exponents(int sign, const std::map<std::uint64_t, int>& exponents);

  const FactoredInteger& numerator() const { return num_; }
  const FactoredInteger& denominator() const { return den_; }
  int sign() const { return num_.sign(); }
  // Signed exponent of prime (positive in the numerator, negative in the denominator).
  int exponent_of(std::uint64_t prime) const;
  std::map<std::uint64_t, int> exponents() const;

  Rational value() const;
  std::string to_string() const;  // "2 * 29 / 73 * 137"

  FactoredRational operator*(const FactoredRational& other) const;
  FactoredRational inverse() const;
  FactoredRational pow(int e) const;

  friend bool operator==(const FactoredRational&, const FactoredRational&) = default;

 private:
  FactoredInteger num_;
  FactoredInteger den_;
};

}  // namespace cmfact
