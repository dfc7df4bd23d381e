#pragma once

#include "cmfact/padic.hpp"
#include "cmfact/quadratic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cmfact::harness {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::int64_t cases = 0;
  std::string detail;  // first counterexample, or a short summary
};

SuiteResult suite_factorize(std::uint64_t seed, std::int64_t exhaustive_limit, int random_cases);
SuiteResult suite_kronecker(std::uint64_t seed, int random_cases);
SuiteResult suite_genus(const Setup& s);
SuiteResult suite_prop1(const Setup& s);
SuiteResult suite_galois(const Setup& s);
SuiteResult suite_padic_random(std::uint64_t seed, int cases_per_prime);
SuiteResult suite_embedding(const Setup& s, int precision);
SuiteResult suite_hecke_recursion(const Setup& s, int precision, std::uint64_t ell_bound, int n_max);
SuiteResult suite_curly_f(const Setup& s, std::int64_t max_trace);
SuiteResult suite_divisibility(const Setup& s, int max_exponent);
SuiteResult suite_p_stabilization(const Setup& s, int precision, std::int64_t max_trace);
SuiteResult suite_b_exact(const Setup& s, int precision);
// Needs a quaternion table entry for q and class number one on both sides.
SuiteResult suite_quaternion(const Setup& s, std::int64_t max_norm);
SuiteResult suite_theta_cross(const Setup& s, int precision, int n_max, unsigned workers);

// Every suite at desk scale; s must already carry the census orientation.
std::vector<SuiteResult> run_selftest(const Setup& s, std::uint64_t seed, int precision, unsigned workers);

}  // namespace cmfact::harness
