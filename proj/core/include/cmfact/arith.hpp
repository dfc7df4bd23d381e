#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>

namespace cmfact {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Raised when an operation is asked to produce digits it cannot certify.
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

// Deterministic for every 64-bit input (Miller-Rabin with the first twelve prime bases).
bool is_prime(std::uint64_t n);

// Kronecker symbol (a|n); n == 0 is rejected.
int kronecker(std::int64_t a, std::int64_t n);

// Exponent of p in n (n != 0).
int valuation(std::int64_t n, std::uint64_t p);
int valuation(const Integer& n, std::uint64_t p);

Integer ipow(const Integer& base, unsigned exponent);
std::uint64_t ipow_u64(std::uint64_t base, unsigned exponent);

std::int64_t isqrt(std::int64_t n);
bool is_square(std::int64_t n);
bool is_squarefree(std::int64_t n);

// Mathematical (non-negative) remainder.
inline std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}
Integer mod(const Integer& a, const Integer& m);

// Square root of a modulo ell^k lifted from the residue class `hint`
// (hint is read mod ell for odd ell, mod 4 for ell = 2). Requires ell not dividing a
// and, for ell = 2, a = 1 mod 8. The result is reduced mod ell^k.
Integer sqrt_mod_prime_power(const Integer& a, std::uint64_t ell, int k, std::int64_t hint);

// Inverse of a modulo m; throws std::domain_error if gcd(a, m) != 1.
Integer inverse_mod(const Integer& a, const Integer& m);
std::uint64_t inverse_mod_u64(std::uint64_t a, std::uint64_t m);

// The smaller square root of a modulo an odd prime p (Tonelli-Shanks).
// Throws std::domain_error when a is not a square mod p.
std::uint64_t sqrt_mod_prime(std::int64_t a, std::uint64_t p);

// Word-sized variant of sqrt_mod_prime_power; requires ell^k < 2^62.
std::uint64_t sqrt_mod_prime_power_u64(std::int64_t a, std::uint64_t ell, int k, std::int64_t hint);

}  // namespace cmfact
