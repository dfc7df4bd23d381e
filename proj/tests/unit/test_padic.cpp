#include "doctest.h"

#include "cmfact/padic.hpp"
#include "cmfact/quadratic.hpp"

#include <random>

using namespace cmfact;

namespace {

// log(1 + z) summed in exact rationals over `terms` terms, then reduced mod p^k.
Integer log_series_oracle(const Integer& z, std::uint64_t p, int k, int terms) {
  Rational sum = 0;
  Rational zn = 1;
  for (int n = 1; n <= terms; ++n) {
    zn *= Rational(z);
    Rational term = zn / n;
    sum += n % 2 ? term : -term;
  }
  Integer pk = ipow(Integer(p), static_cast<unsigned>(k));
  Integer num = numerator(sum), den = denominator(sum);
  return mod(Integer(num * inverse_mod(den, pk)), pk);
}

}  // namespace

TEST_CASE("hensel_sqrt") {
  const int K = 40;
  PAdic r = hensel_sqrt(7009, 2, K);
  Integer pk = Integer(1) << K;
  CHECK(mod(r.residue(), Integer(4)) == 1);
  CHECK(mod(Integer(r.residue() * r.residue() - 7009), pk >> 1) == 0);

  PAdic one = hensel_sqrt(1, 5, 10);
  CHECK(one.residue() == 1);

  CHECK(kronecker(2, 5) == -1);
  CHECK_THROWS_AS(hensel_sqrt(2, 5, 10), std::domain_error);
  CHECK_THROWS_AS(hensel_sqrt(5, 2, 10), std::domain_error);

  // Newton iteration oracle for an odd prime.
  Integer a = 7009, p = 277, pk277 = ipow(p, 6);
  Integer x = 19;
  for (int i = 0; i < 6; ++i) x = mod(Integer(x - (x * x - a) * inverse_mod(Integer(2 * x), pk277)), pk277);
  PAdic r277 = hensel_sqrt(a, 277, 6);
  CHECK((r277.residue() == x || r277.residue() == pk277 - x));
}

TEST_CASE("iwasawa_log: fixed values") {
  CHECK(iwasawa_log(PAdic::from_integer(1, 3, 10)).is_zero());
  CHECK(iwasawa_log(PAdic::from_integer(3, 3, 10)).is_zero());  // log_p(p) = 0 on this branch

  // log_3(4) = log(16)/2 = log(1 + 15)/2.
  const Integer mod36 = 729;
  Integer series = log_series_oracle(15, 3, 6, 40);
  Integer expected = mod(Integer(series * inverse_mod(Integer(2), mod36)), mod36);
  PAdic lg = iwasawa_log(PAdic::from_integer(4, 3, 6));
  CHECK(mod(lg.residue(), mod36) == expected);

  // log_2(5) directly from the series in z = 4.
  Integer l5 = log_series_oracle(4, 2, 10, 40);
  CHECK(mod(iwasawa_log(PAdic::from_integer(5, 2, 10)).residue(), Integer(1024)) == l5);
}

TEST_CASE("iwasawa_log: additivity on random units") {
  std::mt19937_64 rng(11);
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 277u}) {
    const int K = 16;
    Integer pk = ipow(Integer(p), K);
    for (int i = 0; i < 100; ++i) {
      Integer a = Integer(rng()) % pk, b = Integer(rng()) % pk;
      if (a % p == 0 || b % p == 0) continue;
      PAdic x = PAdic::from_integer(a, p, K), y = PAdic::from_integer(b, p, K);
      PAdic lhs = iwasawa_log(x * y), rhs = iwasawa_log(x) + iwasawa_log(y);
      CHECK(lhs.congruent(rhs, K));
      CHECK(iwasawa_log(x / y).congruent(iwasawa_log(x) - iwasawa_log(y), K));
    }
  }
}

TEST_CASE("PAdic arithmetic and printing") {
  PAdic x = PAdic::from_integer(20160, 2, 12);
  CHECK(x.valuation() == 6);
  CHECK(x.unit_digits() == std::vector<int>{1, 1, 0, 1, 1, 1});
  CHECK(x.to_string() == "(6, [1 1 0 1 1 1], 12)");
  CHECK((x + (-x)).is_zero());
  PAdic third = PAdic::from_rational(Rational(1, 3), 2, 12);
  CHECK((third * Integer(3)).congruent(PAdic::from_integer(1, 2, 12), 12));
  CHECK(PAdic::from_rational(Rational(5, 4), 2, 10).valuation() == -2);
  CHECK(PAdic::from_integer(81, 3, 10).with_precision(3).is_zero());
  CHECK(x.agreement(PAdic::from_integer(20160 + 4096, 2, 20)) == 12);
  CHECK(log_series_terms(2, 2, 12) >= 6);
}

TEST_CASE("dual numbers") {
  const std::uint64_t p = 3;
  auto c = [&](std::int64_t v) { return PAdic::from_integer(v, p, 10); };
  DualPAdic a{c(2), c(5)}, b{c(7), c(1)};
  DualPAdic prod = a * b;
  CHECK(prod.std.congruent(c(14), 10));
  CHECK(prod.eps.congruent(c(2 + 35), 10));
  CHECK((a - a).std.is_zero());
  CHECK(a.agreement(a) == 10);
}

TEST_CASE("local embeddings") {
  const Setup s = make_setup(-43, -163, 2, 3);
  const int K = 16;
  LocalEmbedding local(s.d, 2, s.root_p, K);
  FElement sqrt_d{0, 2, s.d};
  Integer modulus = Integer(1) << K;
  Integer r = mod(local.root(), modulus);
  PAdic at1 = local.embed(sqrt_d, PrimeAboveP::P1), at2 = local.embed(sqrt_d, PrimeAboveP::P2);
  CHECK(at1.valuation() == 0);
  CHECK(mod(at2.residue(), modulus) == r);
  CHECK(mod(Integer(at1.residue() + r), modulus) == 0);
  CHECK(mod(Integer(r * r - s.d), modulus) == 0);

  // (root_p + sqrt D)/2 lies in p1 by construction of the label.
  FElement gen = FElement::from_xt(s.d, s.root_p, 1);
  CHECK(local.valuation(gen, PrimeAboveP::P1) >= 1);
  CHECK(local.valuation(gen, PrimeAboveP::P1) + local.valuation(gen, PrimeAboveP::P2) == valuation(Integer(1752), 2));

  for (std::int64_t x = -83; x <= 83; x += 2) {
    FElement f = FElement::from_xt(s.d, x, 1);
    PAdic n = local.embed(f, PrimeAboveP::P1) * local.embed(f, PrimeAboveP::P2);
    CHECK(n.congruent(PAdic::from_rational(f.norm(), 2, K), K - 4));
    CHECK(local.embed(f.conjugate(), PrimeAboveP::P1).congruent(local.embed(f, PrimeAboveP::P2), K - 4));
  }
  CHECK(kronecker(s.d, 11) == -1);
  CHECK_THROWS_AS(LocalEmbedding(s.d, 11, 0, K), std::invalid_argument);
}
