#include "doctest.h"

#include "cmfact/eisenstein.hpp"
#include "cmfact/quaternion.hpp"

#include <numeric>
#include <set>

using namespace cmfact;

namespace {

struct Reference {
  Setup s;
  QuaternionAlgebra alg;
  MaximalOrder order;
  CMEmbeddingPair emb;
};

const Reference& reference() {
  static const Reference r = [] {
    auto [alg, order] = build_algebra_and_order(3);
    Setup s = make_setup(-43, -163, 2, 3);
    auto emb = find_embedding_pair(order, -43, -163);
    s = s.with_root_q(reflex_ideal(order, emb, s).q1_label);
    return Reference{s, alg, order, emb};
  }();
  return r;
}

// Counts by brute force over a box of basis coordinates, in integers scaled by the common
// denominator of the basis.
std::vector<std::int64_t> norm_counts_oracle(const QuaternionAlgebra& alg, const std::array<StdCoords, 4>& basis,
                                             std::int64_t max_norm, std::int64_t box) {
  std::int64_t den = 1;
  for (const auto& v : basis)
    for (const auto& x : v) den = std::lcm(den, static_cast<std::int64_t>(denominator(x)));
  std::int64_t m[4][4];
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) m[i][k] = static_cast<std::int64_t>(numerator(Rational(basis[i][k] * den)));
  const std::int64_t scale = den * den;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_norm + 1), 0);
  std::int64_t c[4];
  for (c[0] = -box; c[0] <= box; ++c[0])
    for (c[1] = -box; c[1] <= box; ++c[1])
      for (c[2] = -box; c[2] <= box; ++c[2])
        for (c[3] = -box; c[3] <= box; ++c[3]) {
          std::int64_t x[4] = {0, 0, 0, 0};
          for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) x[k] += c[i] * m[i][k];
          std::int64_t n = x[0] * x[0] - alg.a * x[1] * x[1] - alg.b * x[2] * x[2] + alg.a * alg.b * x[3] * x[3];
          if (n % scale == 0 && n / scale <= max_norm) ++counts[static_cast<std::size_t>(n / scale)];
        }
  return counts;
}

// Representations by the Hurwitz order: 24 times the divisor sum of the odd part.
std::int64_t hurwitz_count(std::int64_t n) {
  while (n % 2 == 0) n /= 2;
  std::int64_t sigma = 0;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) sigma += d;
  return 24 * sigma;
}

int class_number_oracle(std::int64_t d) {
  int h = 0;
  for (std::int64_t a = 1; 3 * a * a <= -d; ++a)
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      if ((b * b - d) % (4 * a)) continue;
      std::int64_t c = (b * b - d) / (4 * a);
      if (c < a || (c == a && b < 0)) continue;
      if (std::gcd(std::gcd(a, std::abs(b)), c) == 1) ++h;
    }
  return h;
}

}  // namespace

TEST_CASE("Hilbert symbols and ramification") {
  CHECK(hilbert_symbol(-1, -1, 0) == -1);
  CHECK(hilbert_symbol(-1, -1, 2) == -1);
  CHECK(hilbert_symbol(-1, -1, 3) == 1);
  CHECK(hilbert_symbol(-1, -3, 3) == -1);
  CHECK(hilbert_symbol(-1, -3, 2) == 1);
  CHECK(hilbert_symbol(5, 7, 11) == 1);
  for (std::int64_t q : {2, 3, 5, 11}) {
    auto [alg, order] = build_algebra_and_order(q);
    CHECK(ramified_primes(alg) == std::vector<std::uint64_t>{static_cast<std::uint64_t>(q)});
    CHECK(abs(order.trace_form_determinant()) == Integer(q * q));
  }
  CHECK_THROWS_AS(build_algebra_and_order(7), std::invalid_argument);
}

TEST_CASE("norm-one elements") {
  auto [alg2, order2] = build_algebra_and_order(2);
  CHECK(enumerate_norm(order2, 1).size() == 24);
  CHECK(norm_counts_oracle(alg2, order2.basis(), 1, 3)[1] == 24);

  auto [alg3, order3] = build_algebra_and_order(3);
  CHECK(enumerate_norm(order3, 1).size() == 12);
  CHECK(enumerate_norm(order3, 0).size() == 1);
  CHECK_THROWS(enumerate_norm(order3, -1));
}

TEST_CASE("norm counts match a brute-force lattice census") {
  for (auto [q, box] : {std::pair{2, 10}, std::pair{3, 10}, std::pair{5, 14}}) {
    auto [alg, order] = build_algebra_and_order(q);
    const std::int64_t max_norm = 10;
    auto oracle = norm_counts_oracle(alg, order.basis(), max_norm, box);
    for (std::int64_t n = 1; n <= max_norm; ++n)
      CHECK_MESSAGE(static_cast<std::int64_t>(enumerate_norm(order, n, 2).size()) == oracle[static_cast<std::size_t>(n)],
                    "q = ", q, ", n = ", n);
  }
  auto [alg2, order2] = build_algebra_and_order(2);
  for (std::int64_t n = 1; n <= 40; ++n)
    CHECK(static_cast<std::int64_t>(enumerate_norm(order2, n).size()) == hurwitz_count(n));
  const std::vector<std::size_t> frozen = {12, 36, 12, 84, 72, 36, 96, 180, 12, 216, 144, 84, 168, 288, 72, 372};
  const auto& r = reference();
  for (std::int64_t n = 1; n <= 16; ++n) CHECK(enumerate_norm(r.order, n).size() == frozen[static_cast<std::size_t>(n - 1)]);
}

TEST_CASE("order arithmetic") {
  const auto& r = reference();
  const auto& o = r.order;
  for (const auto& g : enumerate_norm(o, 6)) {
    CHECK(o.norm(g) == 6);
    CHECK(o.mul(g, o.conj(g)) == o.scale(o.one(), 6));
    CHECK(o.add(g, o.conj(g)) == o.scale(o.one(), static_cast<std::int64_t>(numerator(o.trace(g)))));
    CHECK(o.from_std(o.to_std(g)) == g);
    CHECK(std_norm(o.algebra(), o.to_std(g)) == 6);
    CHECK(o.norm_int(g.numerators()) == 6);
  }
}

TEST_CASE("CM embeddings") {
  const auto& r = reference();
  Quaternion w1 = find_cm_embedding(r.order, -43), w2 = find_cm_embedding(r.order, -163);
  CHECK(r.order.norm(w1) == 11);
  CHECK(r.order.norm(w2) == 41);
  CHECK(r.order.trace(w1) == 1);
  CHECK(embedding_conductor(r.order, w1, -43) == 1);
  CHECK(kronecker(-11, 3) == 1);
  CHECK_THROWS_AS(find_cm_embedding(r.order, -11), std::domain_error);
  CHECK(w1 == Quaternion({-1, -2, 3, 0}));
  CHECK(w2 == Quaternion({-3, -2, 7, 0}));
}

TEST_CASE("det_F") {
  const auto& r = reference();
  auto [det1, det1c] = det_f_pair(r.order, r.emb, r.order.one());
  CHECK(det1.trace() == 1);
  CHECK(det1c == det1.conjugate());
  for (std::int64_t n = 1; n <= 12; ++n)
    for (const auto& g : enumerate_norm(r.order, n)) {
      auto [det, detc] = det_f_pair(r.order, r.emb, g);
      CHECK(det.trace() == n);
      auto [x, t] = det_f_xt(r.order, r.emb, g.numerators());
      CHECK(t == n);
      CHECK(element_valuation(r.s, x, t, r.s.q1()) >= 1);
    }
}

TEST_CASE("reflex label") {
  const auto& r = reference();
  Setup canonical = make_setup(-43, -163, 2, 3);
  ReflexLabels lab = reflex_ideal(r.order, r.emb, canonical, 16);
  CHECK(lab.q1_label == 2);
  CHECK(lab.q2_label == canonical.conjugate_label(3, 2));
  CHECK(lab.votes > 0);
}

TEST_CASE("class numbers") {
  CHECK(class_number(-43) == 1);
  CHECK(class_number(-163) == 1);
  CHECK(class_number(-23) == 3);
  for (std::int64_t d = -3; d >= -500; --d)
    if (is_fundamental_discriminant(d)) CHECK_MESSAGE(class_number(d) == class_number_oracle(d), "d = ", d);
}

TEST_CASE("theta at level zero is the trace-one sum") {
  const auto& r = reference();
  LocalEmbedding local(r.s.d, 2, r.s.root_p, 12);
  auto lv = theta_truncated(r.order, r.emb, r.s, local, 0, Parity::Even);
  REQUIRE(lv.size() == 1);
  CHECK(lv[0].elements == 12);
  PAdic nu_sum = trace_sums(r.s, local, 1).theta * Integer(r.s.w1 * r.s.w2 / 2);
  CHECK(lv[0].log.congruent(nu_sum, 12));
}

TEST_CASE("bijection on small traces") {
  const auto& r = reference();
  auto rep = check_bijection(r.order, r.emb, r.s, 16, 2);
  CHECK(rep.ok());
  CHECK(rep.nus_checked > 0);
  std::int64_t total = 0;
  for (std::int64_t n = 1; n <= 16; ++n) total += static_cast<std::int64_t>(enumerate_norm(r.order, n).size());
  CHECK(rep.elements_counted == total);

  Setup flipped = r.s.with_root_q(r.s.conjugate_label(3, r.s.root_q));
  CHECK_FALSE(check_bijection(r.order, r.emb, flipped, 4).ok());
}
