#include "selftest.hpp"

#include "cmfact/eisenstein.hpp"
#include "cmfact/factored.hpp"
#include "cmfact/quaternion.hpp"

#include <random>
#include <sstream>

namespace cmfact::harness {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) { r_.name = std::move(name); }

  // Records one case; keeps the first failure message.
  void check(bool ok, const std::string& what) {
    ++r_.cases;
    if (!ok && failures_++ == 0) r_.detail = what;
  }
  template <class F>
  void check_lazy(bool ok, F&& describe) {
    ++r_.cases;
    if (!ok && failures_++ == 0) r_.detail = describe();
  }
  SuiteResult done() {
    r_.passed = failures_ == 0;
    if (failures_ > 1) r_.detail += " (+" + std::to_string(failures_ - 1) + " more)";
    return r_;
  }

 private:
  SuiteResult r_;
  std::int64_t failures_ = 0;
};

std::string xt(std::int64_t x, std::int64_t t) { return "(x, t) = (" + std::to_string(x) + ", " + std::to_string(t) + ")"; }

bool primitive(const FIdeal& j) {
  std::map<std::uint64_t, int> split_count;
  for (const auto& [pr, e] : j.entries()) {
    switch (pr.kind) {
      case PrimeKind::Inert:
        return false;
      case PrimeKind::Ramified:
        if (e >= 2) return false;
        break;
      case PrimeKind::Split:
        if (++split_count[pr.ell] == 2) return false;
        break;
    }
  }
  return true;
}

// p^n | (x + t sqrt D)/2 in O_F.
bool divisible_by_power(std::int64_t x, std::int64_t t, std::int64_t pn, std::int64_t d) {
  if (x % pn || t % pn) return false;
  return mod(x / pn - (t / pn) * d, 2) == 0;
}

std::vector<FPrime> primes_above(const Setup& s, std::uint64_t ell) {
  FPrime a = s.prime(ell, s.canonical_label(ell));
  if (a.kind != PrimeKind::Split) return {a};
  return {a, s.prime(ell, s.conjugate_label(ell, a.label))};
}

}  // namespace

SuiteResult suite_factorize(std::uint64_t seed, std::int64_t exhaustive_limit, int random_cases) {
  Suite suite("factorize round trip");
  for (std::int64_t n = 1; n <= exhaustive_limit; ++n) {
    auto f = factorize(n);
    if (f.value() != n) suite.check(false, "n = " + std::to_string(n));
    auto g = factorize(-n);
    suite.check(g.value() == -n && g.sign() == -1, "n = " + std::to_string(-n));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(1, (std::int64_t{1} << 62));
  for (int i = 0; i < random_cases; ++i) {
    std::int64_t n = dist(rng);
    auto f = factorize(n);
    bool ok = f.value() == n;
    for (const auto& pp : f.factors()) ok = ok && is_prime(pp.prime);
    suite.check(ok, "n = " + std::to_string(n));
  }
  return suite.done();
}

SuiteResult suite_kronecker(std::uint64_t seed, int random_cases) {
  Suite suite("kronecker symbol");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> small(-100000, 100000);
  auto nonzero = [&] {
    std::int64_t v;
    do v = small(rng);
    while (v == 0);
    return v;
  };
  for (int i = 0; i < random_cases; ++i) {
    std::int64_t a = small(rng), b = small(rng), m = nonzero(), n = nonzero();
    suite.check(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n),
                "multiplicative in a: " + std::to_string(a) + ", " + std::to_string(b) + " | " + std::to_string(n));
    suite.check(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n),
                "multiplicative in n: " + std::to_string(a) + " | " + std::to_string(m) + ", " + std::to_string(n));
  }
  for (std::uint64_t ell = 3; ell < 1000; ell += 2) {
    if (!is_prime(ell)) continue;
    for (int k = 0; k < 5; ++k) {
      std::int64_t a = small(rng);
      std::uint64_t r = powmod(static_cast<std::uint64_t>(mod(a, static_cast<std::int64_t>(ell))), (ell - 1) / 2, ell);
      int euler = r == 0 ? 0 : (r == 1 ? 1 : -1);
      suite.check(kronecker(a, static_cast<std::int64_t>(ell)) == euler,
                  "Euler criterion: " + std::to_string(a) + " mod " + std::to_string(ell));
    }
  }
  return suite.done();
}

SuiteResult suite_genus(const Setup& s) {
  Suite suite("genus character and rho");
  for (std::int64_t t = 1; t <= 16; ++t) {
    for (const auto& nu : enumerate_nu(s, t, ClassSpec::Q1Only)) {
      FIdeal I = element_ideal(s, nu.x, nu.t);
      FIdeal J = I.quotient(FIdeal::of(s.q1()));
      suite.check(chi_ideal(J) == 1, "chi(J_nu) = -1 at " + xt(nu.x, nu.t));
      suite.check(chi_ideal(I) == 1 || rho(I) == 0, "rho nonzero on a chi = -1 ideal at " + xt(nu.x, nu.t));
      suite.check(I.norm() == Integer(nu.norm), "ideal norm at " + xt(nu.x, nu.t));
    }
  }
  std::int64_t found = 0;
  for (std::uint64_t ell = 3; ell < 200 && found < 10; ++ell) {
    if (!is_prime(ell) || kronecker(s.d, static_cast<std::int64_t>(ell)) != -1) continue;
    ++found;
    for (std::int64_t k : {1, 2, 7, 277}) {
      suite.check(f_value(s, Rational(static_cast<std::int64_t>(ell) * k)).is_one(),
                  "F nontrivial on an inert multiple " + std::to_string(ell) + " * " + std::to_string(k));
    }
  }
  return suite.done();
}

SuiteResult suite_prop1(const Setup& s) {
  Suite suite("F against Arakelov degrees");
  for (const auto& term : rhs_terms(s, RhsMode::Shimura4N)) {
    std::map<std::uint64_t, std::int64_t> prod;
    int dividing = 0;
    for (const auto& a : kAllNormN) {
      if (a.ideal(s).divides(element_ideal(s, term.x, 1))) ++dividing;
      auto v = arakelov_x(s, a, term.x, 1);
      if (!v.is_one()) prod[v.base] += a.delta() * v.twice_exponent;
    }
    std::erase_if(prod, [](const auto& kv) { return kv.second == 0; });
    std::map<std::uint64_t, std::int64_t> lhs;
    if (!term.value.is_one()) lhs[term.value.base] = term.delta * term.value.twice_exponent;
    suite.check(dividing == 1, "not exactly one ideal of norm N divides x = " + std::to_string(term.x));
    suite.check(lhs == prod, "mismatch at x = " + std::to_string(term.x) + ": F = " + term.value.to_string());
  }
  return suite.done();
}

SuiteResult suite_galois(const Setup& s) {
  Suite suite("Galois symmetry");
  for (const auto& term : rhs_terms(s, RhsMode::Shimura4N)) {
    auto c1 = classify_x(s, term.x, 1), c2 = classify_x(s, -term.x, 1);
    suite.check(c1.ideal && c2.ideal && *c2.ideal == c1.ideal->conjugate() && c1.delta == c2.delta,
                "classification of -x at x = " + std::to_string(term.x));
    for (const auto& a : kAllNormN) {
      suite.check(arakelov_x(s, a, term.x, 1) == arakelov_x(s, a.conjugate(), -term.x, 1),
                  "degree not Galois stable at x = " + std::to_string(term.x));
    }
  }
  return suite.done();
}

SuiteResult suite_padic_random(std::uint64_t seed, int cases_per_prime) {
  Suite suite("p-adic log and square roots");
  std::mt19937_64 rng(seed);
  const int K = 20;
  for (std::uint64_t p : {2u, 3u, 5u, 7u}) {
    Integer pk = ipow(Integer(p), K);
    std::uniform_int_distribution<std::uint64_t> dist(1, std::numeric_limits<std::uint64_t>::max());
    auto random_unit = [&] {
      Integer u;
      do u = Integer(dist(rng)) % pk;
      while (u % p == 0);
      return u;
    };
    for (int i = 0; i < cases_per_prime; ++i) {
      Integer a = random_unit(), b = random_unit();
      int va = static_cast<int>(dist(rng) % 4), vb = static_cast<int>(dist(rng) % 4);
      PAdic x = PAdic::from_unit(p, va, a, K), y = PAdic::from_unit(p, vb, b, K);
      PAdic lhs = iwasawa_log(x * y), rhs = iwasawa_log(x) + iwasawa_log(y);
      suite.check_lazy(lhs.congruent(rhs, std::min(lhs.precision(), rhs.precision())), [&] {
        return "log additivity, p = " + std::to_string(p) + ", units " + a.str() + ", " + b.str();
      });

      Integer sq = p == 2 ? Integer(8 * (dist(rng) % (1u << 20)) + 1) : Integer(a * a % pk);
      PAdic r = hensel_sqrt(sq, p, K);
      PAdic target = PAdic::from_integer(sq, p, K);
      suite.check_lazy((r * r).congruent(target, r.precision()),
                       [&] { return "Hensel root, p = " + std::to_string(p) + ", a = " + sq.str(); });
    }
    // Teichmueller lifts are roots of unity, so their logarithm vanishes.
    for (std::uint64_t a = 2; a < std::min<std::uint64_t>(p, 6); ++a) {
      Integer w = powm(Integer(a), pk, pk);
      suite.check(iwasawa_log(PAdic::from_integer(w, p, K)).is_zero(), "Teichmueller lift of " + std::to_string(a));
    }
    suite.check(iwasawa_log(PAdic::from_integer(Integer(pk - 1), p, K)).is_zero(), "log(-1)");
  }
  return suite.done();
}

SuiteResult suite_embedding(const Setup& s, int precision) {
  Suite suite("local embeddings of F");
  const auto p = static_cast<std::uint64_t>(s.p);
  LocalEmbedding local(s.d, p, s.root_p, precision);
  for (std::int64_t t = 1; t <= 8; ++t) {
    std::int64_t xmax = isqrt(s.d * t * t - 1);
    for (std::int64_t x = -xmax; x <= xmax; x += 7) {
      if (mod(x - t * s.d, 2) != 0) continue;
      FElement f = FElement::from_xt(s.d, x, t);
      PAdic e1 = local.embed(f, PrimeAboveP::P1), e2 = local.embed(f, PrimeAboveP::P2);
      PAdic nm = PAdic::from_rational(f.norm(), p, precision);
      suite.check((e1 * e2).congruent(nm, std::min(nm.precision(), (e1 * e2).precision())),
                  "norm compatibility at " + xt(x, t));
      int vn = valuation(element_norm(s, x, t), p);
      suite.check(e1.valuation() + e2.valuation() == vn, "valuations at " + xt(x, t));
      suite.check(e1.valuation() == element_valuation(s, x, t, s.p1()), "v_p1 by congruences at " + xt(x, t));
    }
  }
  return suite.done();
}

SuiteResult suite_hecke_recursion(const Setup& s, int precision, std::uint64_t ell_bound, int n_max) {
  Suite suite("Hecke recursion in dual numbers");
  LocalEmbedding local(s.d, static_cast<std::uint64_t>(s.p), s.root_p, precision);
  for (std::uint64_t ell = 2; ell < ell_bound; ++ell) {
    if (!is_prime(ell) || static_cast<std::int64_t>(ell) == s.p) continue;
    for (const auto& pr : primes_above(s, ell)) {
      auto T = [&](int n) { return hecke_image(s, local, {HeckeOp::Kind::T, pr, n, 1, std::nullopt}); };
      DualPAdic chi{PAdic::from_integer(pr.chi, local.prime(), precision), PAdic::zero(local.prime(), precision)};
      for (int n = 1; n < n_max; ++n) {
        DualPAdic lhs = T(n + 1), rhs = T(n) * T(1) - chi * T(n - 1);
        suite.check(lhs.agreement(rhs) >= precision - 1, "T recursion at " + pr.to_string() + ", n = " + std::to_string(n));
      }
    }
  }
  for (int idx : {1, 2}) {
    HeckeOp u{HeckeOp::Kind::U, FPrime{}, 1, idx, std::nullopt};
    DualPAdic u1 = hecke_image(s, local, u), acc = u1;
    for (int n = 2; n <= n_max; ++n) {
      acc = acc * u1;
      u.power = n;
      suite.check(hecke_image(s, local, u).agreement(acc) >= precision - 1,
                  "U power law at p" + std::to_string(idx) + ", n = " + std::to_string(n));
    }
  }
  return suite.done();
}

SuiteResult suite_curly_f(const Setup& s, std::int64_t max_trace) {
  Suite suite("curly F against F squared");
  const auto p = static_cast<std::uint64_t>(s.p);
  for (std::int64_t t = 1; t <= max_trace; ++t) {
    for (const auto& nu : enumerate_nu(s, t, ClassSpec::Q1Only)) {
      FIdeal J = j_ideal(s, nu.x, nu.t, 1, true);
      if (!primitive(J)) continue;
      PrimePowerValue cf = curly_f(s, J);
      PrimePowerValue f = f_value(s, Rational(J.norm()));
      PrimePowerValue f2 = PrimePowerValue::make(f.base, 2 * f.twice_exponent);
      suite.check_lazy(cf == f2, [&] {
        return "J = " + J.to_string() + " at " + xt(nu.x, nu.t) + ": " + cf.to_string() + " vs " + f2.to_string();
      });
    }
  }
  (void)p;
  return suite.done();
}

SuiteResult suite_divisibility(const Setup& s, int max_exponent) {
  Suite suite("divisibility lemma");
  const auto p = static_cast<std::uint64_t>(s.p);
  for (int n = 0; n <= max_exponent; ++n) {
    auto pn = static_cast<std::int64_t>(ipow_u64(p, static_cast<unsigned>(n)));
    for (const auto& nu : enumerate_nu(s, pn, ClassSpec::Q1Only)) {
      bool odd_norm = valuation(nu.norm, p) % 2 == 1;
      if (!odd_norm && nu.v_p1 == nu.v_p2) continue;
      suite.check(divisible_by_power(nu.x, nu.t, pn, s.d), "p^n does not divide nu at " + xt(nu.x, nu.t));
    }
  }
  return suite.done();
}

SuiteResult suite_p_stabilization(const Setup& s, int precision, std::int64_t max_trace) {
  Suite suite("p-stabilized coefficients");
  LocalEmbedding local(s.d, static_cast<std::uint64_t>(s.p), s.root_p, precision);
  for (std::int64_t t = 1; t <= max_trace; ++t) {
    for (const auto& nu : enumerate_nu(s, t, ClassSpec::Q1Only)) {
      DualPAdic a = a_nu(s, local, nu);
      std::int64_t four_term = stabilized_rho(s, nu);
      PAdic expected = PAdic::from_integer(four_term, local.prime(), precision);
      suite.check(a.std.congruent(expected, precision), "a_nu at " + xt(nu.x, nu.t));
    }
  }
  return suite.done();
}

SuiteResult suite_b_exact(const Setup& s, int precision) {
  Suite suite("B is a finite exact sum");
  PAdic b1 = b_trace_one(s, precision), b2 = b_trace_one(s, 2 * precision);
  suite.check(b1.congruent(b2, precision), "B changes with doubled precision: " + b1.to_string() + " vs " + b2.to_string());
  return suite.done();
}

SuiteResult suite_quaternion(const Setup& s, std::int64_t max_norm) {
  Suite suite("quaternion order and det_F");
  auto [alg, order] = build_algebra_and_order(s.q);
  suite.check(abs(order.trace_form_determinant()) == Integer(s.q) * s.q, "trace form determinant");
  suite.check(ramified_primes(alg) == std::vector<std::uint64_t>{static_cast<std::uint64_t>(s.q)}, "ramification");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      std::array<std::int64_t, 4> ei{}, ej{};
      ei[static_cast<std::size_t>(i)] = 1;
      ej[static_cast<std::size_t>(j)] = 1;
      suite.check(order.mul(Quaternion(ei), Quaternion(ej)).is_integral(), "closure");
    }
  auto emb = find_embedding_pair(order, s.d1, s.d2);
  const Rational D = s.d;
  for (std::int64_t n = 1; n <= max_norm; ++n) {
    for (const auto& g : enumerate_norm(order, n)) {
      auto [det, det_c] = det_f_pair(order, emb, g);
      suite.check(det.trace() == order.norm(g), "Tr det_F != Nm at " + g.to_string());
      // Nm((1 + sqrt D) * g) = Tr((1 + sqrt D)^2 det_F(g)).
      Quaternion moved = order.add(g, sqrt_d_action(order, emb, g));
      FElement x{Rational(2), Rational(2), s.d};
      suite.check((x * x * det).trace() == order.norm(moved), "polarization at " + g.to_string());
      auto [det_s, det_s_c] = det_f_pair(order, emb, sqrt_d_action(order, emb, g));
      suite.check(det_s.u == D * det.u && det_s.v == D * det.v, "F-quadraticity at " + g.to_string());
      auto [xx, tt] = det_f_xt(order, emb, g.numerators());
      suite.check(element_valuation(s, xx, tt, s.q1()) >= 1, "det_F(b) q1^-1 D_F not integral at " + g.to_string());
    }
  }
  auto p = static_cast<std::uint64_t>(s.p);
  std::vector<std::int64_t> primitive_counts;
  for (unsigned n = 0; n <= 3; ++n) {
    auto level = enumerate_norm(order, static_cast<std::int64_t>(ipow_u64(p, 2 * n)));
    std::int64_t prim = 0;
    for (const auto& g : level) {
      bool divisible = true;
      for (auto c : g.numerators()) divisible = divisible && c % static_cast<std::int64_t>(p) == 0;
      if (!divisible) ++prim;
    }
    primitive_counts.push_back(prim);
    std::int64_t total = 0;
    for (auto c : primitive_counts) total += c;
    suite.check(static_cast<std::int64_t>(level.size()) == total, "p-primitive counts at level " + std::to_string(n));
  }
  auto lab = reflex_ideal(order, emb, s, 16);
  suite.check(reflex_ideal(order, emb, s, 32).q1_label == lab.q1_label, "reflex label changes with the census bound");
  auto flipped = make_embedding_pair(order, emb.omega1, s.d1, order.add(order.one(), order.scale(emb.omega2, -1)), s.d2);
  suite.check(reflex_ideal(order, flipped, s, 16).q1_label == lab.q2_label, "conjugate embedding keeps the label");
  suite.check(lab.q1_label == s.root_q, "setup is not oriented by the census");
  return suite.done();
}

SuiteResult suite_theta_cross(const Setup& s, int precision, int n_max, unsigned workers) {
  Suite suite("quaternionic theta against nu-sums");
  auto [alg, order] = build_algebra_and_order(s.q);
  auto emb = find_embedding_pair(order, s.d1, s.d2);
  LocalEmbedding local(s.d, static_cast<std::uint64_t>(s.p), s.root_p, precision);
  for (auto parity : {Parity::Even, Parity::Odd}) {
    for (const auto& lvl : theta_truncated(order, emb, s, local, n_max, parity, workers)) {
      PAdic nu_sum = trace_sums(s, local, lvl.norm, workers).theta * Integer(s.w1 * s.w2 / 2);
      int full = std::min(lvl.log.precision(), nu_sum.precision());
      suite.check(lvl.log.congruent(nu_sum, full), "level " + std::to_string(lvl.level) + " (norm " +
                                                       std::to_string(lvl.norm) + "): " + lvl.log.to_string() +
                                                       " vs " + nu_sum.to_string());
      if (parity == Parity::Odd) {
        suite.check(lvl.value.valuation() == 0, "v_p1 of an odd partial product at norm " + std::to_string(lvl.norm));
      }
    }
  }
  return suite.done();
}

std::vector<SuiteResult> run_selftest(const Setup& s, std::uint64_t seed, int precision, unsigned workers) {
  std::vector<SuiteResult> out;
  out.push_back(suite_factorize(seed, 100000, 2000));
  out.push_back(suite_kronecker(seed, 2000));
  out.push_back(suite_genus(s));
  out.push_back(suite_prop1(s));
  out.push_back(suite_galois(s));
  out.push_back(suite_padic_random(seed, 250));
  out.push_back(suite_embedding(s, precision));
  out.push_back(suite_hecke_recursion(s, precision, 100, 10));
  out.push_back(suite_curly_f(s, 64));
  out.push_back(suite_divisibility(s, 8));
  out.push_back(suite_p_stabilization(s, precision, 64));
  out.push_back(suite_b_exact(s, precision));
  bool quaternion = (s.q == 2 || s.q == 3 || s.q == 5 || s.q == 11) && class_number(s.d1) == 1 && class_number(s.d2) == 1;
  if (quaternion) {
    out.push_back(suite_quaternion(s, 64));
    out.push_back(suite_theta_cross(s, precision, s.p == 2 ? 4 : 2, workers));
  }
  return out;
}

}  // namespace cmfact::harness
