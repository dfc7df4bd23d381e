// One line per acceptance criterion on the reference setup (-43, -163, p = 2, q = 3).
// Exit status is the number of failed criteria.

#include "harness.hpp"
#include "selftest.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>

using namespace cmfact;
using namespace cmfact::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = secs < limit_seconds;
  if (!in_time) o.detail += " [over the " + std::to_string(static_cast<int>(limit_seconds)) + " s budget]";
  bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s  %d  %-34s %8.3f s  %s\n", ok ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

Outcome from_suites(const std::vector<SuiteResult>& suites) {
  Outcome o{true, ""};
  for (const auto& r : suites) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += r.name + " " + std::to_string(r.cases);
    if (!r.passed) {
      o.pass = false;
      o.detail += " FAILED: " + r.detail;
    }
  }
  return o;
}

}  // namespace

int main() {
  RunConfig cfg;
  cfg.workers = 1;
  const Setup s = orient(cfg).setup;
  const int K = 12;

  criterion(1, "classical Gross-Zagier product", 1, [&] {
    FactoredInteger gz(1, {{2, 19}, {3, 6}, {5, 3}, {7, 3}, {37, 1}, {433, 1}});
    FactoredRational expected(gz.pow(2), FactoredInteger());
    FactoredRational got = rhs_product(make_setup(-43, -163, 2, 3), RhsMode::Modular4);
    return Outcome{got == expected, got.to_string()};
  });

  criterion(2, "Shimura right-hand side support", 1, [&] {
    FactoredRational value = rhs_product(s, RhsMode::Shimura4N);
    std::set<std::uint64_t> pos, neg;
    for (const auto& [ell, e] : value.exponents()) (e > 0 ? pos : neg).insert(ell);
    const std::set<std::uint64_t> up{2, 29, 257, 277}, down{73, 137, 241};
    bool ok = (pos == up && neg == down) || (pos == down && neg == up);
    auto ratio = FactoredRational::from_exponents(1, {{2, 1}, {29, 1}, {257, 1}, {277, 1}, {73, -1}, {137, -1}, {241, -1}});
    std::string e = "none";
    for (int k : {1, 2, -1, -2})
      if (value == ratio.pow(k)) e = std::to_string(k);
    return Outcome{ok, value.to_string() + ", e = " + e};
  });

  criterion(3, "p-adic identity A + B = 0", 300, [&] {
    IdentityReport r = identity_check(s, 5, K, 1);
    bool ok = r.congruence == Verdict::Pass && r.a.stabilized_precision >= 4 && r.congruence_precision >= 4;
    return Outcome{ok, "A = " + r.a.final_value.to_string() + ", B = " + r.b_direct.to_string() + ", stabilized " +
                           std::to_string(r.a.stabilized_precision) + ", A + B = 0 mod 2^" +
                           std::to_string(r.congruence_precision)};
  });

  criterion(4, "valuation bookkeeping", 1, [&] {
    LocalEmbedding local(s.d, static_cast<std::uint64_t>(s.p), s.root_p, K);
    std::int64_t lhs = trace_sums(s, local, 1, 1).rho_valuation - trace_sums(s, local, s.p, 1).rho_valuation;
    std::int64_t rhs = rhs_product(s, RhsMode::Shimura4N).exponent_of(static_cast<std::uint64_t>(s.p));
    bool ok = lhs == rhs || lhs == -rhs;
    return Outcome{ok, "lhs " + std::to_string(lhs) + ", rhs " + std::to_string(rhs)};
  });

  auto [alg, order] = build_algebra_and_order(s.q);
  auto emb = find_embedding_pair(order, s.d1, s.d2);

  criterion(5, "bijection for traces <= 64", 30, [&] {
    BijectionReport b = check_bijection(order, emb, s, 64, 1);
    return Outcome{b.ok(), std::to_string(b.nus_checked) + " nu, " + std::to_string(b.elements_counted) +
                               " elements, " + std::to_string(b.mismatch_count) + " mismatches"};
  });

  criterion(6, "theta cross-check n <= 4", 60, [&] { return from_suites({suite_theta_cross(s, K, 4, 1)}); });

  criterion(7, "F against Arakelov degrees", 10, [&] { return from_suites({suite_prop1(s), suite_galois(s)}); });

  criterion(8, "property suites", 120, [&] {
    return from_suites({
        suite_hecke_recursion(s, K, 100, 10),
        suite_curly_f(s, 64),
        suite_divisibility(s, 8),
        suite_padic_random(cfg.seed, 250),
        suite_p_stabilization(s, K, 64),
    });
  });

  return failures;
}
