#include "doctest.h"

#include "cmfact/eisenstein.hpp"

#include <set>

using namespace cmfact;

namespace {

const Setup& reference() {
  static const Setup s = [] {
    Setup base = make_setup(-43, -163, 2, 3);
    return base.with_root_q(2);  // reflex label found by the quaternion census
  }();
  return s;
}

const LocalEmbedding& local12() {
  static const LocalEmbedding l(reference().d, 2, reference().root_p, 12);
  return l;
}

PAdic padic(std::int64_t v) { return PAdic::from_integer(v, 2, 12); }

FPrime first_split_prime(const Setup& s, int chi) {
  for (std::uint64_t ell = 5;; ell += 2)
    if (is_prime(ell) && static_cast<std::int64_t>(ell) != s.q && kronecker(s.d, static_cast<std::int64_t>(ell)) == 1 &&
        s.chi_rational(ell) == chi)
      return s.prime(ell, s.canonical_label(ell));
}

}  // namespace

TEST_CASE("trace-one nu: congruence oracle") {
  const Setup& s = reference();
  std::set<std::int64_t> oracle;
  for (std::int64_t x = -83; x <= 83; ++x)
    if (x % 2 != 0 && (7009 - x * x) % 24 == 0) oracle.insert(x);
  CHECK(oracle.count(19) == 1);
  for (std::int64_t x : oracle) CHECK(x % 3 != 0);

  std::set<std::int64_t> got;
  for (const auto& nu : enumerate_nu(s, 1, ClassSpec::PerA, 3)) {
    CHECK(nu.a_label.has_value());
    got.insert(nu.x);
  }
  CHECK(got == oracle);

  for (const auto& nu : enumerate_nu(s, 1, ClassSpec::Q1Only)) {
    CHECK(element_valuation(s, nu.x, 1, s.q1()) >= 1);
    CHECK(nu.v_p1 == element_valuation(s, nu.x, 1, s.p1()));
  }
  CHECK_THROWS(enumerate_nu(s, 0, ClassSpec::Q1Only));
}

TEST_CASE("Eisenstein coefficients vanish on obstructed ideals") {
  const Setup& s = reference();
  for (const auto& nu : enumerate_nu(s, 1, ClassSpec::PerA)) {
    FIdeal I = element_ideal(s, nu.x, nu.t);
    if (chi_ideal(I) == -1) CHECK(eisenstein_coeff(s, nu) == 0);
    else CHECK(eisenstein_coeff(s, nu) == rho(I));
  }
}

TEST_CASE("Hecke eigenvalues") {
  const Setup& s = reference();
  const auto& local = local12();
  FPrime plus = first_split_prime(s, 1), minus = first_split_prime(s, -1);

  DualPAdic t_plus = hecke_image(s, local, {HeckeOp::Kind::T, plus, 1, 1, std::nullopt});
  CHECK(t_plus.std.congruent(padic(2), 12));
  CHECK(t_plus.eps.is_zero());

  DualPAdic t_minus2 = hecke_image(s, local, {HeckeOp::Kind::T, minus, 2, 1, std::nullopt});
  CHECK(t_minus2.std.congruent(padic(1), 12));
  CHECK(t_minus2.eps.is_zero());

  DualPAdic t_minus1 = hecke_image(s, local, {HeckeOp::Kind::T, minus, 1, 1, std::nullopt});
  CHECK(t_minus1.std.is_zero());
  CHECK(t_minus1.eps.congruent(iwasawa_log(padic(static_cast<std::int64_t>(minus.ell))) * Integer(2), 11));

  FElement pi1 = local_uniformiser(s, 1);
  PAdic log_pi1 = iwasawa_log(local.embed(pi1, PrimeAboveP::P1));
  DualPAdic u2 = hecke_image(s, local, {HeckeOp::Kind::U, FPrime{}, 2, 1, pi1});
  CHECK(u2.std.congruent(padic(1), 12));
  CHECK(u2.eps.congruent(-(log_pi1 * Integer(2)), 11));

  DualPAdic u1 = hecke_image(s, local, {HeckeOp::Kind::U, FPrime{}, 1, 1, pi1});
  CHECK(u1.std.congruent(padic(-1), 12));

  CHECK_THROWS(hecke_image(s, local, {HeckeOp::Kind::T, s.p1(), 1, 1, std::nullopt}));
  CHECK_THROWS(hecke_image(s, local, {HeckeOp::Kind::U, FPrime{}, 1, 1, FElement{2, 0, s.d}}));
}

TEST_CASE("curly F") {
  const Setup& s = reference();
  FPrime plus = first_split_prime(s, 1), minus = first_split_prime(s, -1);
  CHECK(curly_f(s, FIdeal()).is_one());
  CHECK(curly_f(s, FIdeal::of(plus, 3)).is_one());

  FIdeal special = FIdeal::of(minus) * FIdeal::of(plus, 2);
  // Nm(l)^((1 + 1) * rho(plus^2)) = ell^6.
  CHECK(curly_f(s, special) == PrimePowerValue::make(minus.ell, 12));

  FPrime other = s.prime(minus.ell, s.conjugate_label(minus.ell, minus.label));
  CHECK(curly_f(s, FIdeal::of(minus) * FIdeal::of(other)).is_one());

  CHECK_THROWS_AS(curly_f(s, FIdeal::of(s.p1())), std::invalid_argument);

  // Primitive: F(J) = F(Nm J)^2.
  FIdeal prim = FIdeal::of(minus) * FIdeal::of(plus, 2);
  PrimePowerValue f = f_value(s, Rational(prim.norm()));
  CHECK(curly_f(s, prim) == PrimePowerValue::make(f.base, 2 * f.twice_exponent));
}

TEST_CASE("a_nu and p-stabilization") {
  const Setup& s = reference();
  const auto& local = local12();
  for (std::int64_t t : {1, 2, 4, 5}) {
    for (const auto& nu : enumerate_nu(s, t, ClassSpec::Q1Only)) {
      DualPAdic a = a_nu(s, local, nu);
      CHECK(a.std.congruent(padic(stabilized_rho(s, nu)), 12));
      FIdeal Jt = j_ideal(s, nu.x, nu.t, 1, true);
      if (rho(Jt) == 0 && curly_f(s, Jt).is_one()) {
        CHECK(a.std.is_zero());
        CHECK(a.eps.is_zero());
      }
    }
  }
}

TEST_CASE("derivative coefficients") {
  const Setup& s = reference();
  const auto& local = local12();
  TraceSums ts = trace_sums(s, local, 1);
  CHECK(derivative_coeff(s, local, 1).congruent(ts.b - ts.a_direct, 12));
  CHECK(ts.b.congruent(b_trace_one(s, 12), 12));

  // Frozen from the reference run: d(1) and the alternation between p^(2n) and p^(2n+1).
  CHECK(derivative_coeff(s, local, 1).to_string() == "(7, [1 0 1 1 1], 12)");
  for (int n = 1; n <= 2; ++n) {
    PAdic even = derivative_coeff(s, local, std::int64_t{1} << (2 * n));
    PAdic odd = derivative_coeff(s, local, std::int64_t{1} << (2 * n + 1));
    CHECK(odd.congruent(-even, 12));
  }
  CHECK_THROWS(derivative_coeff(s, local, 0));
}

TEST_CASE("theta sums") {
  const Setup& s = reference();
  const auto& local = local12();
  ThetaSums th = theta_lhs(s, local, 3);
  REQUIRE(th.even.size() == 4);
  REQUIRE(th.odd.size() == 3);
  CHECK(th.theta.partial_values[0].congruent(trace_sums(s, local, 1).theta, 12));
  int prev = 0;
  for (int n = 1; n <= 5; ++n) {
    int stab = theta_lhs(s, local, n).theta.stabilized_precision;
    CHECK(stab >= prev);
    prev = stab;
  }
}

TEST_CASE("sum reports") {
  auto r = make_sum_report({padic(1), padic(5), padic(5 + 64), padic(5 + 64 + 1024)});
  CHECK(r.stabilized_precision == 6);
  CHECK(r.final_value.congruent(padic(5 + 64 + 1024), 12));
  // A lone partial carries no evidence of stabilization.
  auto single = make_sum_report({padic(3)});
  CHECK(single.stabilized_precision == 0);
}

TEST_CASE("identity check: reference values") {
  const Setup& s = reference();
  IdentityReport rep = identity_check(s, 5, 12, 4);
  // A frozen from the reference run: 2^6 * 315 to 12 digits.
  CHECK(rep.a.final_value.congruent(padic(20160), 12));
  CHECK(rep.a.stabilized_precision >= 4);
  CHECK(rep.a_direct_agrees);

  // B from the product of F-values, recomputed here from the factored ratio.
  FactoredRational ratio = rhs_product(s, RhsMode::Shimura4N);
  PAdic b_oracle = padic(0);
  for (const auto& [ell, e] : ratio.exponents()) b_oracle = b_oracle + iwasawa_log(padic(static_cast<std::int64_t>(ell))) * Integer(e);
  CHECK(rep.b_rhs.congruent(b_oracle, 11));
  CHECK(rep.b_direct.congruent(-rep.b_rhs, 12));
  CHECK(rep.b_sign == -1);
  CHECK(rep.b_stable);

  CHECK(rep.congruence == Verdict::Pass);
  CHECK(rep.a_plus_b.is_zero());
  CHECK(rep.valuation_lhs == 2);
  CHECK(rep.valuation_rhs == ratio.exponent_of(2));
  CHECK(rep.valuation == Verdict::Pass);
  CHECK(rep.overall == Verdict::Pass);
}
