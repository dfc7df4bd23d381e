#pragma once

#include "cmfact/factored.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmfact {

struct SetupError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class PrimeKind { Split, Ramified, Inert };

// A prime of F = Q(sqrt D). Split primes carry a residue label c; the prime labelled c
// contains (c + sqrt D)/2. Labels are residues mod ell, or mod 4 when ell = 2.
struct FPrime {
  std::uint64_t ell = 0;
  PrimeKind kind = PrimeKind::Split;
  std::int64_t label = 0;
  int chi = 1;

  int degree() const { return kind == PrimeKind::Inert ? 2 : 1; }
  std::string to_string() const;

  friend bool operator==(const FPrime& a, const FPrime& b) { return a.ell == b.ell && a.label == b.label; }
  friend auto operator<=>(const FPrime& a, const FPrime& b) {
    if (auto c = a.ell <=> b.ell; c != 0) return c;
    return a.label <=> b.label;
  }
};

class FIdeal {
 public:
  using Entry = std::pair<FPrime, int>;

  FIdeal() = default;
  explicit FIdeal(std::vector<Entry> entries);  // merges repeated primes, drops zero exponents
  static FIdeal of(const FPrime& prime, int exponent = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  int exponent_of(const FPrime& prime) const;
  bool is_unit() const { return entries_.empty(); }
  Integer norm() const;

  FIdeal operator*(const FIdeal& other) const;
  bool divides(const FIdeal& other) const;
  // this / d; throws std::domain_error when d does not divide this.
  FIdeal quotient(const FIdeal& d) const;
  FIdeal without_primes_above(std::uint64_t ell) const;

  std::string to_string() const;
  friend bool operator==(const FIdeal&, const FIdeal&) = default;

 private:
  std::vector<Entry> entries_;
};

struct Setup {
  std::int64_t d1 = 0, d2 = 0, d = 0;
  std::int64_t p = 0, q = 0, n = 0;
  int w1 = 2, w2 = 2;
  std::int64_t root_p = 0;  // label of p1
  std::int64_t root_q = 0;  // label of q1

  // The prime of F above ell with the given label (label ignored unless ell splits).
  FPrime prime(std::uint64_t ell, std::int64_t label = 0) const;
  std::int64_t canonical_label(std::uint64_t ell) const;
  std::int64_t conjugate_label(std::uint64_t ell, std::int64_t label) const;
  int chi_rational(std::uint64_t ell) const;  // chi of any prime of F above ell

  FPrime p1() const { return prime(p, root_p); }
  FPrime p2() const { return prime(p, conjugate_label(p, root_p)); }
  FPrime q1() const { return prime(q, root_q); }
  FPrime q2() const { return prime(q, conjugate_label(q, root_q)); }
  FIdeal different() const;  // (sqrt D), the product of the ramified primes

  Setup with_root_q(std::int64_t label) const;
};

// Validates every hypothesis; the message of the thrown SetupError names the one that failed.
Setup make_setup(std::int64_t d1, std::int64_t d2, std::int64_t p, std::int64_t q);

bool is_fundamental_discriminant(std::int64_t d);
int unit_count(std::int64_t d);

// Elements (x + t sqrt D)/2 of O_F with x = tD mod 2; these are nu*sqrt(D) for
// nu = (x + t sqrt D)/(2 sqrt D), so Tr(nu) = t and the ideal below is nu*D_F.
void check_element(const Setup& s, std::int64_t x, std::int64_t t);
std::int64_t element_norm(const Setup& s, std::int64_t x, std::int64_t t);  // (D t^2 - x^2)/4
int element_valuation(const Setup& s, std::int64_t x, std::int64_t t, const FPrime& prime);
FIdeal element_ideal(const Setup& s, std::int64_t x, std::int64_t t);

int chi_ideal(const FIdeal& ideal);
std::uint64_t rho(const FIdeal& ideal);

// base^(twice_exponent/2); the value 1 is always base 1, exponent 0.
struct PrimePowerValue {
  std::uint64_t base = 1;
  std::int64_t twice_exponent = 0;

  static PrimePowerValue make(std::uint64_t base, std::int64_t twice_exponent);
  bool is_one() const { return twice_exponent == 0; }
  std::string to_string() const;
  friend bool operator==(const PrimePowerValue&, const PrimePowerValue&) = default;
};

PrimePowerValue f_value(const Setup& s, const Rational& m);

// One of the four ideals p_i q_j of norm N.
struct NormNIdeal {
  int p_index = 1;
  int q_index = 1;

  int delta() const { return p_index == q_index ? 1 : -1; }
  NormNIdeal conjugate() const { return {3 - p_index, 3 - q_index}; }
  FIdeal ideal(const Setup& s) const;
  std::string to_string() const;
  friend bool operator==(const NormNIdeal&, const NormNIdeal&) = default;
};

inline constexpr NormNIdeal kAllNormN[4] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};

struct XClassification {
  std::optional<NormNIdeal> ideal;
  std::optional<int> delta;
};

XClassification classify_x(const Setup& s, std::int64_t x, std::int64_t t);

// The ideal of (x + t sqrt D)/2 divided by q_{qIndex}; p-deprivation removes p1 and p2.
FIdeal j_ideal(const Setup& s, std::int64_t x, std::int64_t t, int q_index, bool deprive_p);

PrimePowerValue arakelov_x(const Setup& s, const NormNIdeal& a, std::int64_t x, std::int64_t t);

enum class RhsMode { Modular4, Shimura4N };

struct RhsTerm {
  std::int64_t x = 0;
  std::int64_t m_numerator = 0;  // D - x^2
  PrimePowerValue value;
  int delta = 1;
};

std::vector<RhsTerm> rhs_terms(const Setup& s, RhsMode mode);
FactoredRational rhs_product(const Setup& s, RhsMode mode, unsigned workers = 1);

}  // namespace cmfact
