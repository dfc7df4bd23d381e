#include "cmfact/quadratic.hpp"

#include "cmfact/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cmfact {

namespace {

std::int64_t label_modulus(std::uint64_t ell) { return ell == 2 ? 4 : static_cast<std::int64_t>(ell); }

int valuation128(__int128 n, std::uint64_t ell) {
  if (n < 0) n = -n;
  int v = 0;
  while (n % ell == 0) {
    n /= ell;
    ++v;
  }
  return v;
}

// v_ell(x - t r) for the ell-adic root r of D with r = label (mod ell, or mod 4 for ell = 2).
// Only congruences are needed: after removing the common power of ell from x and t, at most
// one of x - t r and x + t r can be divisible by ell beyond the forced factor 2 at ell = 2,
// and their valuations add up to v(x^2 - D t^2).
int root_offset_valuation(std::int64_t D, std::int64_t x, std::int64_t t, std::uint64_t ell, std::int64_t label) {
  auto L = static_cast<std::int64_t>(ell);
  int g = 0;
  while (x % L == 0 && t % L == 0) {
    x /= L;
    t /= L;
    ++g;
  }
  if (t % L == 0) return g;  // ell divides t but not x
  __int128 total = static_cast<__int128>(x) * x - static_cast<__int128>(t) * t * D;
  int E = valuation128(total, ell);
  if (ell != 2) return g + (mod(x - label * t, L) == 0 ? E : 0);
  if (x % 2 == 0) return g;
  return g + (mod(x - label * t, 4) == 0 ? E - 1 : 1);
}

}  // namespace

std::string FPrime::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case PrimeKind::Split:
      os << "l" << ell << "[" << label << "]";
      break;
    case PrimeKind::Ramified:
      os << "r" << ell;
      break;
    case PrimeKind::Inert:
      os << "(" << ell << ")";
      break;
  }
  return os.str();
}

FIdeal::FIdeal(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (auto& e : entries) {
    if (e.second < 0) throw std::invalid_argument("FIdeal: negative exponent");
    if (!entries_.empty() && entries_.back().first == e.first) {
      entries_.back().second += e.second;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0; });
}

FIdeal FIdeal::of(const FPrime& prime, int exponent) { return FIdeal({{prime, exponent}}); }

int FIdeal::exponent_of(const FPrime& prime) const {
  for (const auto& [pr, e] : entries_) {
    if (pr == prime) return e;
  }
  return 0;
}

Integer FIdeal::norm() const {
  Integer n = 1;
  for (const auto& [pr, e] : entries_) n *= ipow(Integer(pr.ell), static_cast<unsigned>(e * pr.degree()));
  return n;
}

FIdeal FIdeal::operator*(const FIdeal& other) const {
  auto all = entries_;
  all.insert(all.end(), other.entries_.begin(), other.entries_.end());
  return FIdeal(std::move(all));
}

bool FIdeal::divides(const FIdeal& other) const {
  for (const auto& [pr, e] : entries_) {
    if (other.exponent_of(pr) < e) return false;
  }
  return true;
}

FIdeal FIdeal::quotient(const FIdeal& d) const {
  if (!d.divides(*this)) throw std::domain_error("FIdeal: " + d.to_string() + " does not divide " + to_string());
  auto out = entries_;
  for (auto& [pr, e] : out) e -= d.exponent_of(pr);
  return FIdeal(std::move(out));
}

FIdeal FIdeal::without_primes_above(std::uint64_t ell) const {
  auto out = entries_;
  std::erase_if(out, [ell](const Entry& e) { return e.first.ell == ell; });
  return FIdeal(std::move(out));
}

std::string FIdeal::to_string() const {
  if (entries_.empty()) return "(1)";
  std::ostringstream os;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << " * ";
    os << entries_[i].first.to_string();
    if (entries_[i].second != 1) os << "^" << entries_[i].second;
  }
  return os.str();
}

bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 0 || d == 1) return false;
  if (mod(d, 4) == 1) return is_squarefree(d);
  if (mod(d, 4) != 0) return false;
  std::int64_t m = d / 4;
  std::int64_t m4 = mod(m, 4);
  return (m4 == 2 || m4 == 3) && is_squarefree(m);
}

int unit_count(std::int64_t d) {
  if (d == -3) return 6;
  if (d == -4) return 4;
  return 2;
}

int Setup::chi_rational(std::uint64_t ell) const {
  auto L = static_cast<std::int64_t>(ell);
  // An inert prime is generated by the totally positive integer ell, so it is trivial in the
  // narrow class group.
  if (kronecker(d, L) == -1) return 1;
  return (d1 % L != 0) ? kronecker(d1, L) : kronecker(d2, L);
}

std::int64_t Setup::canonical_label(std::uint64_t ell) const {
  if (kronecker(d, static_cast<std::int64_t>(ell)) != 1) return 0;
  if (ell == 2) return 1;
  return static_cast<std::int64_t>(sqrt_mod_prime(d, ell));
}

std::int64_t Setup::conjugate_label(std::uint64_t ell, std::int64_t label) const {
  if (kronecker(d, static_cast<std::int64_t>(ell)) != 1) return 0;
  return mod(-label, label_modulus(ell));
}

FPrime Setup::prime(std::uint64_t ell, std::int64_t label) const {
  auto L = static_cast<std::int64_t>(ell);
  FPrime pr;
  pr.ell = ell;
  int k = kronecker(d, L);
  if (k == 0) {
    pr.kind = PrimeKind::Ramified;
  } else if (k == -1) {
    pr.kind = PrimeKind::Inert;
  } else {
    pr.kind = PrimeKind::Split;
    std::int64_t M = label_modulus(ell);
    pr.label = mod(label, M);
    bool ok = ell == 2 ? (pr.label % 2 == 1) : mod(pr.label * pr.label - d, L) == 0;
    if (!ok) throw std::invalid_argument("no prime above " + std::to_string(ell) + " has label " + std::to_string(label));
  }
  pr.chi = chi_rational(ell);
  return pr;
}

FIdeal Setup::different() const {
  std::vector<FIdeal::Entry> e;
  auto fd = factorize(d);
  for (const auto& f : fd.factors()) e.push_back({prime(f.prime), 1});
  return FIdeal(std::move(e));
}

Setup Setup::with_root_q(std::int64_t label) const {
  Setup s = *this;
  s.root_q = prime(static_cast<std::uint64_t>(q), label).label;
  return s;
}

Setup make_setup(std::int64_t d1, std::int64_t d2, std::int64_t p, std::int64_t q) {
  auto fail = [](const std::string& what) { throw SetupError(what); };
  if (d1 >= 0) fail("D1 must be negative");
  if (d2 >= 0) fail("D2 must be negative");
  if (!is_fundamental_discriminant(d1)) fail("D1 is not a fundamental discriminant");
  if (!is_fundamental_discriminant(d2)) fail("D2 is not a fundamental discriminant");
  if (d1 % 2 == 0) fail("D1 must be odd");
  if (d2 % 2 == 0) fail("D2 must be odd");
  if (std::gcd(d1, d2) != 1) fail("gcd(D1, D2) must be 1");
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) fail("p must be prime");
  if (q < 2 || !is_prime(static_cast<std::uint64_t>(q))) fail("q must be prime");
  if (p == q) fail("p and q must be distinct");
  for (auto [ell, name] : {std::pair{p, "p"}, std::pair{q, "q"}}) {
    if (kronecker(d1, ell) != -1) fail(std::string(name) + " must be inert in K1 (kronecker(D1, " + name + ") != -1)");
    if (kronecker(d2, ell) != -1) fail(std::string(name) + " must be inert in K2 (kronecker(D2, " + name + ") != -1)");
  }
  Setup s;
  s.d1 = d1;
  s.d2 = d2;
  s.d = d1 * d2;
  s.p = p;
  s.q = q;
  s.n = p * q;
  s.w1 = unit_count(d1);
  s.w2 = unit_count(d2);
  s.root_p = s.canonical_label(static_cast<std::uint64_t>(p));
  s.root_q = s.canonical_label(static_cast<std::uint64_t>(q));
  return s;
}

void check_element(const Setup& s, std::int64_t x, std::int64_t t) {
  if (t <= 0) throw std::invalid_argument("trace must be positive");
  if (mod(x - t * s.d, 2) != 0) throw std::invalid_argument("parity violation: x must be congruent to t*D mod 2");
  if (static_cast<__int128>(x) * x >= static_cast<__int128>(s.d) * t * t)
    throw std::invalid_argument("x^2 < D t^2 is required for total positivity");
}

std::int64_t element_norm(const Setup& s, std::int64_t x, std::int64_t t) {
  __int128 n = (static_cast<__int128>(s.d) * t * t - static_cast<__int128>(x) * x) / 4;
  if (n > (static_cast<__int128>(1) << 62)) throw std::overflow_error("element norm exceeds desk scale");
  return static_cast<std::int64_t>(n);
}

int element_valuation(const Setup& s, std::int64_t x, std::int64_t t, const FPrime& pr) {
  std::int64_t nm = element_norm(s, x, t);
  if (nm == 0) throw std::domain_error("element_valuation: zero element");
  auto L = static_cast<std::int64_t>(pr.ell);
  if (nm % L != 0) return 0;
  switch (pr.kind) {
    case PrimeKind::Ramified:
      return valuation(nm, pr.ell);
    case PrimeKind::Inert:
      return valuation(nm, pr.ell) / 2;
    case PrimeKind::Split:
      break;
  }
  return root_offset_valuation(s.d, x, t, pr.ell, pr.label) - (pr.ell == 2 ? 1 : 0);
}

FIdeal element_ideal(const Setup& s, std::int64_t x, std::int64_t t) {
  std::int64_t nm = element_norm(s, x, t);
  std::vector<FIdeal::Entry> out;
  auto fn = factorize(nm);
  for (const auto& f : fn.factors()) {
    FPrime pr = s.prime(f.prime, s.canonical_label(f.prime));
    switch (pr.kind) {
      case PrimeKind::Ramified:
        out.push_back({pr, f.exponent});
        break;
      case PrimeKind::Inert:
        if (f.exponent % 2) throw std::logic_error("element_ideal: odd exponent at an inert prime");
        out.push_back({pr, f.exponent / 2});
        break;
      case PrimeKind::Split: {
        int v1 = element_valuation(s, x, t, pr);
        if (v1 < 0 || v1 > f.exponent) throw std::logic_error("element_ideal: inconsistent residue assignment");
        FPrime conj = s.prime(f.prime, s.conjugate_label(f.prime, pr.label));
        out.push_back({pr, v1});
        out.push_back({conj, f.exponent - v1});
        break;
      }
    }
  }
  return FIdeal(std::move(out));
}

int chi_ideal(const FIdeal& ideal) {
  int c = 1;
  for (const auto& [pr, e] : ideal.entries()) {
    if (pr.chi == -1 && (e % 2)) c = -c;
  }
  return c;
}

std::uint64_t rho(const FIdeal& ideal) {
  std::uint64_t r = 1;
  for (const auto& [pr, e] : ideal.entries()) {
    if (pr.chi == 1) {
      r *= static_cast<std::uint64_t>(e + 1);
    } else if (e % 2) {
      return 0;
    }
  }
  return r;
}

PrimePowerValue PrimePowerValue::make(std::uint64_t base, std::int64_t twice_exponent) {
  if (twice_exponent == 0 || base == 1) return {};
  if (twice_exponent < 0) throw std::invalid_argument("PrimePowerValue: exponent must be nonnegative");
  return {base, twice_exponent};
}

std::string PrimePowerValue::to_string() const {
  if (is_one()) return "1";
  std::ostringstream os;
  os << base;
  if (twice_exponent % 2) {
    os << "^(" << twice_exponent << "/2)";
  } else if (twice_exponent != 2) {
    os << "^" << twice_exponent / 2;
  }
  return os.str();
}

PrimePowerValue f_value(const Setup& s, const Rational& m) {
  if (m <= 0 || denominator(m) != 1) return {};
  Integer num = numerator(m);
  if (num >= (Integer(1) << 63)) throw std::overflow_error("f_value: argument beyond desk scale");
  auto fm = factorize(static_cast<std::int64_t>(num));
  std::uint64_t special = 0;
  int special_exp = 0;
  std::int64_t X = 1;
  for (const auto& f : fm.factors()) {
    FPrime pr = s.prime(f.prime, s.canonical_label(f.prime));
    if (pr.kind == PrimeKind::Inert) return {};
    if (pr.chi == -1) {
      if (f.exponent % 2 == 0) continue;
      if (special) return {};
      special = f.prime;
      special_exp = f.exponent;
    } else {
      // Every chi = +1 prime (split or ramified in F) counts, matching rho.
      X *= f.exponent + 1;
    }
  }
  if (!special) return {};
  X *= (special_exp - 1) / 2 + 1;
  return PrimePowerValue::make(special, 2 * X);
}

FIdeal NormNIdeal::ideal(const Setup& s) const {
  FPrime pp = p_index == 1 ? s.p1() : s.p2();
  FPrime qq = q_index == 1 ? s.q1() : s.q2();
  return FIdeal({{pp, 1}, {qq, 1}});
}

std::string NormNIdeal::to_string() const {
  return "p" + std::to_string(p_index) + "q" + std::to_string(q_index);
}

XClassification classify_x(const Setup& s, std::int64_t x, std::int64_t t) {
  check_element(s, x, t);
  std::int64_t nm = element_norm(s, x, t);
  if (nm % s.n != 0) return {};
  bool in_p1 = element_valuation(s, x, t, s.p1()) > 0;
  bool in_p2 = element_valuation(s, x, t, s.p2()) > 0;
  bool in_q1 = element_valuation(s, x, t, s.q1()) > 0;
  bool in_q2 = element_valuation(s, x, t, s.q2()) > 0;
  if ((in_p1 && in_p2) || (in_q1 && in_q2))
    throw std::domain_error("classify_x: more than one ideal of norm N divides the element");
  NormNIdeal a{in_p1 ? 1 : 2, in_q1 ? 1 : 2};
  return {a, a.delta()};
}

FIdeal j_ideal(const Setup& s, std::int64_t x, std::int64_t t, int q_index, bool deprive_p) {
  FIdeal J = element_ideal(s, x, t).quotient(FIdeal::of(q_index == 1 ? s.q1() : s.q2()));
  return deprive_p ? J.without_primes_above(static_cast<std::uint64_t>(s.p)) : J;
}

PrimePowerValue arakelov_x(const Setup& s, const NormNIdeal& a, std::int64_t x, std::int64_t t) {
  FIdeal I = element_ideal(s, x, t);
  FIdeal A = a.ideal(s);
  if (!A.divides(I)) return {};
  FIdeal J = I.quotient(A);
  std::vector<FPrime> diff;
  for (const auto& [pr, e] : J.entries()) {
    if (pr.chi == -1 && (e % 2)) diff.push_back(pr);
  }
  if (diff.size() != 1) return {};
  const FPrime& r = diff.front();
  int ord_I = I.exponent_of(r);
  int ord;
  if (static_cast<std::int64_t>(r.ell) != s.p && static_cast<std::int64_t>(r.ell) != s.q) {
    ord = ord_I + 1;  // ord_r(nu r D_F)
  } else if (A.exponent_of(r) > 0) {
    ord = ord_I;  // ord_r(nu); r is prime to D_F
  } else {
    ord = ord_I + 1;  // ord_r(nu r)
  }
  std::uint64_t weight = rho(J.quotient(FIdeal::of(r)));
  return PrimePowerValue::make(r.ell, static_cast<std::int64_t>(ord) * static_cast<std::int64_t>(weight));
}

std::vector<RhsTerm> rhs_terms(const Setup& s, RhsMode mode) {
  std::int64_t modulus = mode == RhsMode::Modular4 ? 4 : 4 * s.n;
  std::int64_t bound = isqrt(s.d);
  std::vector<RhsTerm> terms;
  for (std::int64_t x = -bound; x <= bound; ++x) {
    if (x * x >= s.d || mod(s.d - x * x, modulus) != 0) continue;
    RhsTerm term;
    term.x = x;
    term.m_numerator = s.d - x * x;
    term.value = f_value(s, Rational(term.m_numerator, modulus));
    if (mode == RhsMode::Shimura4N) term.delta = *classify_x(s, x, 1).delta;
    terms.push_back(term);
  }
  return terms;
}

FactoredRational rhs_product(const Setup& s, RhsMode mode, unsigned workers) {
  auto terms = rhs_terms(s, mode);
  using Map = std::map<std::uint64_t, int>;
  Map exps = parallel_reduce(
      0, static_cast<std::int64_t>(terms.size()), workers, Map{},
      [&](std::int64_t lo, std::int64_t hi) {
        Map m;
        for (auto i = lo; i < hi; ++i) {
          const auto& term = terms[static_cast<std::size_t>(i)];
          if (term.value.is_one()) continue;
          if (term.value.twice_exponent % 2) throw std::logic_error("rhs_product: half-integral F exponent");
          m[term.value.base] += term.delta * static_cast<int>(term.value.twice_exponent / 2);
        }
        return m;
      },
      [](Map acc, Map part) {
        for (auto& [p, e] : part) acc[p] += e;
        return acc;
      });
  return FactoredRational::from_exponents(1, exps);
}

}  // namespace cmfact
