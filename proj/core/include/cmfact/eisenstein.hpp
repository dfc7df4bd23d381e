#pragma once

#include "cmfact/padic.hpp"
#include "cmfact/quadratic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cmfact {

// nu = (x + t sqrt D)/(2 sqrt D), totally positive of trace t.
struct NuElement {
  std::int64_t x = 0;
  std::int64_t t = 0;
  std::optional<NormNIdeal> a_label;  // set by the per-ideal enumeration
  std::int64_t norm = 0;              // norm of nu*sqrt(D), i.e. (D t^2 - x^2)/4
  int v_p1 = 0;
  int v_p2 = 0;

  FElement as_f_element(std::int64_t d) const { return {Rational(t), Rational(x, d), d}; }
};

enum class ClassSpec {
  Q1Only,  // nu in (D_F^-1 q1)^+
  PerA,    // nu in (D_F^-1 a)^+ for the unique a of norm N dividing nu sqrt(D)
};

std::vector<NuElement> enumerate_nu(const Setup& s, std::int64_t t, ClassSpec spec, unsigned workers = 1);

// rho(nu D_F).
std::uint64_t eisenstein_coeff(const Setup& s, const NuElement& nu);

struct HeckeOp {
  enum class Kind { T, U };
  Kind kind = Kind::T;
  FPrime prime;                 // for T: a prime of F not above p
  int power = 1;                // n >= 0
  int p_index = 1;              // for U: which prime above p
  std::optional<FElement> uniformiser;  // for U; defaults to an element of valuation one found by search
};

DualPAdic hecke_image(const Setup& s, const LocalEmbedding& local, const HeckeOp& op);

// An element of O_F with valuation exactly one at p_i and zero at the conjugate prime.
FElement local_uniformiser(const Setup& s, int p_index);

// The prime power F(J) defined through the special primes of J; J must be prime to p.
PrimePowerValue curly_f(const Setup& s, const FIdeal& j);

PAdic log_prime_power(const PrimePowerValue& v, std::uint64_t p, int precision);
// log_p(nu / nu') with nu read at p1.
PAdic log_nu_ratio(const LocalEmbedding& local, const NuElement& nu, std::int64_t d);

DualPAdic a_nu(const Setup& s, const LocalEmbedding& local, const NuElement& nu);

// Coefficient of q^n in the weight derivative of the diagonal restriction.
PAdic derivative_coeff(const Setup& s, const LocalEmbedding& local, std::int64_t n, unsigned workers = 1);

// The four V-shifted rho values combined as (1 - V_p1)(1 + V_p2).
std::int64_t stabilized_rho(const Setup& s, const NuElement& nu);

// Everything the sums need from one trace, accumulated in a single pass over nu.
struct TraceSums {
  std::int64_t t = 0;
  std::int64_t nus = 0;
  PAdic theta;            // sum rho(J) log(nu/nu')
  PAdic a_direct;         // sum (-1)^v_p1 rho(J~) log(nu/nu')
  PAdic b;                // sum (-1)^v_p1 log F(J~)
  std::int64_t rho_valuation = 0;  // sum rho(J) (v_p1 - v_p2)
  PAdic derivative() const { return b - a_direct; }
};

TraceSums trace_sums(const Setup& s, const LocalEmbedding& local, std::int64_t t, unsigned workers = 1);

// Sum of (-1)^v_p1 log F(J~) over trace-one nu of the q1 class with v_p(Nm nu) odd.
PAdic b_trace_one(const Setup& s, int precision, unsigned workers = 1);

struct SumReport {
  std::vector<PAdic> partial_values;
  int stabilized_precision = 0;
  PAdic final_value;
  std::string to_string() const;
};

// Largest K' such that the last three partials (or all, if fewer) agree mod p^K'; a single
// partial reports 0.
SumReport make_sum_report(std::vector<PAdic> partials);

struct ThetaSums {
  SumReport theta;     // (2/w1w2) log Theta: traces p^(2n), n = 0..nMax
  SumReport theta_p;   // (2/w1w2) log Theta_p: traces p^(2n+1), n = 0..nMax-1
  std::vector<TraceSums> even, odd;
};

ThetaSums theta_lhs(const Setup& s, const LocalEmbedding& local, int n_max, unsigned workers = 1);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct IdentityReport {
  SumReport a;             // S_even(n) - S_odd(n-1), n = 1..nMax
  std::vector<PAdic> a_direct;  // direct (-1)^v sums per level n = 1..nMax
  bool a_direct_agrees = false;
  PAdic b_direct;          // trace-one sum with v_p(Nm) odd
  std::vector<PAdic> b_levels;  // B-sum at traces p^(2n), n = 0..nMax
  bool b_stable = false;
  PAdic b_rhs;             // sum delta log F((D - x^2)/4N)
  int b_sign = 0;          // b_direct = b_sign * b_rhs
  PAdic a_plus_b;
  int congruence_precision = 0;
  Verdict congruence = Verdict::Fail;
  std::int64_t valuation_lhs = 0;  // (2/w1w2) v_p1(Theta/Theta_p)
  std::int64_t valuation_rhs = 0;  // sum delta v_p F
  int valuation_sign = 0;
  Verdict valuation = Verdict::Fail;
  std::vector<PAdic> derivative;  // derivative_coeff(p^k), k = 0..2nMax
  int alternating_precision = 0;  // agreement of d(p^(2n+1)) with -d(p^(2n)) at the top level
  Verdict overall = Verdict::Fail;
};

IdentityReport identity_check(const Setup& s, int n_max, int precision, unsigned workers = 1);

}  // namespace cmfact
