#include "cmfact/padic.hpp"

#include <sstream>

namespace cmfact {

namespace {

Integer ppow(std::uint64_t p, int k) { return k <= 0 ? Integer(1) : ipow(Integer(p), static_cast<unsigned>(k)); }

// Removes the p-part of a nonzero integer and returns its exponent.
int strip_p(Integer& n, std::uint64_t p) {
  int v = 0;
  Integer q, r;
  const Integer P(p);
  for (;;) {
    divide_qr(n, P, q, r);
    if (r != 0) return v;
    n = q;
    ++v;
  }
}

int floor_log(std::uint64_t p, std::uint64_t n) {
  int k = 0;
  while (n >= p) {
    n /= p;
    ++k;
  }
  return k;
}

}  // namespace

PAdic PAdic::zero(std::uint64_t p, int precision) {
  PAdic z;
  z.p_ = p;
  z.zero_ = true;
  z.precision_ = precision;
  return z;
}

PAdic PAdic::from_unit(std::uint64_t p, int valuation, const Integer& unit, int relative_precision) {
  if (relative_precision <= 0) return zero(p, valuation);
  Integer m = ppow(p, relative_precision);
  Integer u = mod(unit, m);
  if (u % p == 0) throw std::invalid_argument("PAdic::from_unit: unit divisible by p");
  PAdic x;
  x.p_ = p;
  x.zero_ = false;
  x.valuation_ = valuation;
  x.unit_ = std::move(u);
  x.precision_ = valuation + relative_precision;
  return x;
}

PAdic PAdic::from_integer(const Integer& n, std::uint64_t p, int precision) {
  return from_rational(Rational(n), p, precision);
}

PAdic PAdic::from_rational(const Rational& r, std::uint64_t p, int precision) {
  if (r == 0) return zero(p, precision);
  Integer num = numerator(r), den = denominator(r);
  int v = strip_p(num, p) - strip_p(den, p);
  if (v >= precision) return zero(p, precision);
  int rel = precision - v;
  Integer m = ppow(p, rel);
  return from_unit(p, v, mod(num * inverse_mod(den, m), m), rel);
}

void PAdic::check_prime(const PAdic& o) const {
  if (p_ != o.p_) throw std::invalid_argument("PAdic: mismatched primes");
}

Integer PAdic::residue() const {
  if (zero_) return 0;
  if (valuation_ < 0) throw std::domain_error("PAdic::residue: negative valuation");
  return mod(unit_ * ppow(p_, valuation_), ppow(p_, precision_));
}

int PAdic::agreement(const PAdic& other) const {
  PAdic d = *this - other;
  return d.is_zero() ? d.precision() : std::min(d.valuation(), d.precision());
}

PAdic PAdic::with_precision(int precision) const {
  if (precision >= precision_) return *this;
  if (zero_ || precision <= valuation_) return zero(p_, precision);
  return from_unit(p_, valuation_, unit_, precision - valuation_);
}

PAdic PAdic::operator-() const {
  if (zero_) return *this;
  return from_unit(p_, valuation_, -unit_, relative_precision());
}

PAdic PAdic::operator+(const PAdic& o) const {
  check_prime(o);
  int prec = std::min(precision_, o.precision_);
  if (zero_) return o.with_precision(prec);
  if (o.zero_) return with_precision(prec);
  int m = std::min(valuation_, o.valuation_);
  if (prec <= m) return zero(p_, prec);
  Integer modulus = ppow(p_, prec - m);
  Integer s = mod(unit_ * ppow(p_, valuation_ - m) + o.unit_ * ppow(p_, o.valuation_ - m), modulus);
  if (s == 0) return zero(p_, prec);
  int k = strip_p(s, p_);
  return from_unit(p_, m + k, s, prec - m - k);
}

PAdic PAdic::operator-(const PAdic& o) const { return *this + (-o); }

PAdic PAdic::operator*(const PAdic& o) const {
  check_prime(o);
  if (zero_ && o.zero_) return zero(p_, precision_ + o.precision_);
  if (zero_) return zero(p_, precision_ + o.valuation_);
  if (o.zero_) return zero(p_, o.precision_ + valuation_);
  int rel = std::min(relative_precision(), o.relative_precision());
  return from_unit(p_, valuation_ + o.valuation_, unit_ * o.unit_, rel);
}

PAdic PAdic::operator/(const PAdic& o) const {
  check_prime(o);
  if (o.zero_) throw std::domain_error("PAdic: division by zero");
  if (zero_) return zero(p_, precision_ - o.valuation_);
  int rel = std::min(relative_precision(), o.relative_precision());
  Integer m = ppow(p_, rel);
  return from_unit(p_, valuation_ - o.valuation_, unit_ * inverse_mod(o.unit_, m), rel);
}

PAdic PAdic::operator*(const Integer& k) const {
  if (k == 0) return zero(p_, precision_);
  Integer u = k;
  int vk = strip_p(u, p_);
  if (zero_) return zero(p_, precision_ + vk);
  return from_unit(p_, valuation_ + vk, unit_ * u, relative_precision());
}

PAdic PAdic::pow(int e) const {
  if (e < 0) return from_unit(p_, 0, 1, relative_precision()) / pow(-e);
  if (zero_) return e == 0 ? from_unit(p_, 0, 1, precision_) : zero(p_, precision_ * e);
  Integer m = ppow(p_, relative_precision());
  return from_unit(p_, valuation_ * e, powm(unit_, Integer(e), m), relative_precision());
}

std::vector<int> PAdic::unit_digits() const {
  std::vector<int> d;
  if (zero_) return d;
  Integer u = unit_;
  for (int i = 0; i < relative_precision(); ++i) {
    d.push_back(static_cast<int>(u % p_));
    u /= p_;
  }
  return d;
}

std::string PAdic::to_string() const {
  std::ostringstream os;
  os << "(";
  if (zero_) {
    os << "inf";
  } else {
    os << valuation_;
  }
  os << ", [";
  auto digits = unit_digits();
  for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? " " : "") << digits[i];
  os << "], " << precision_ << ")";
  return os.str();
}

int DualPAdic::agreement(const DualPAdic& o) const { return std::min(std.agreement(o.std), eps.agreement(o.eps)); }

std::string DualPAdic::to_string() const { return std.to_string() + " + " + eps.to_string() + " eps"; }

FElement FElement::operator*(const FElement& o) const {
  if (d != o.d) throw std::invalid_argument("FElement: mismatched fields");
  Rational D(d);
  return {(u * o.u + D * v * o.v) / 2, (u * o.v + o.u * v) / 2, d};
}

PAdic hensel_sqrt(const Integer& a, std::uint64_t p, int precision) {
  if (mod(a, Integer(p)) == 0) throw std::domain_error("hensel_sqrt: p divides a");
  std::int64_t hint = 1;
  if (p == 2) {
    if (mod(a, 8) != 1) throw std::domain_error("hensel_sqrt: a must be 1 mod 8 for p = 2");
  } else {
    auto a_mod = static_cast<std::int64_t>(mod(a, Integer(p)));
    if (kronecker(a_mod, static_cast<std::int64_t>(p)) != 1)
      throw std::domain_error("hensel_sqrt: a is not a square mod p");
    hint = static_cast<std::int64_t>(sqrt_mod_prime(a_mod, p));
  }
  Integer r = sqrt_mod_prime_power(a, p, precision, hint);
  return PAdic::from_integer(r, p, precision);
}

int log_series_terms(std::uint64_t p, int vz, int target) {
  if (vz < 1) throw std::invalid_argument("log_series_terms: v(z) must be positive");
  // f(n) = n*vz - floor(log_p n) is nondecreasing, so the tail starts at the first n with f(n) >= target.
  std::uint64_t n = 1;
  while (static_cast<std::int64_t>(n) * vz - floor_log(p, n) < target) ++n;
  return static_cast<int>(n - 1);
}

PAdic iwasawa_log(const PAdic& x) {
  if (x.is_zero()) throw std::domain_error("iwasawa_log: log of zero");
  const std::uint64_t p = x.prime();
  const int m = x.relative_precision();
  // Work with w = u^(p-1) in 1 + pZ_p (odd p) or w = u^2 in 1 + 8Z_2; for p = 2 one digit is
  // spent on the final halving, so w is used to m + 1 digits (u^2 is known that far).
  const int target = p == 2 ? m + 1 : m;
  const int vz_floor = p == 2 ? 3 : 1;
  int terms = log_series_terms(p, vz_floor, target);
  int guard = floor_log(p, static_cast<std::uint64_t>(std::max(terms, 1))) + 1;
  Integer work = ppow(p, target + guard);
  Integer w = powm(x.unit(), Integer(p == 2 ? 2 : p - 1), work);
  Integer z = mod(w - 1, work);
  Integer sum = 0;
  Integer zn = z;
  for (int n = 1; n <= terms && zn != 0; ++n) {
    Integer nn(n);
    int vn = strip_p(nn, p);
    Integer term = (zn / ppow(p, vn)) * inverse_mod(nn, work);
    sum += (n % 2 == 1) ? term : Integer(-term);
    zn = mod(zn * z, work);
  }
  sum = mod(sum, ppow(p, target));
  if (p == 2) {
    if (sum % 2 != 0) throw std::logic_error("iwasawa_log: odd 2-adic logarithm");
    sum /= 2;
  } else {
    sum = mod(sum * inverse_mod(Integer(p - 1), ppow(p, target)), ppow(p, target));
  }
  return PAdic::from_integer(sum, p, m);
}

LocalEmbedding::LocalEmbedding(std::int64_t d, std::uint64_t p, std::int64_t label, int precision, int guard)
    : d_(d), p_(p), precision_(precision), work_(precision + guard) {
  if (kronecker(d, static_cast<std::int64_t>(p)) != 1) throw std::invalid_argument("LocalEmbedding: p must split in F");
  modulus_ = ppow(p, work_);
  root_ = sqrt_mod_prime_power(Integer(d), p, work_, label);
}

PAdic LocalEmbedding::embed(const FElement& xi, PrimeAboveP which) const {
  if (xi.is_zero()) throw std::domain_error("embed_F: zero element");
  Integer c = boost::multiprecision::lcm(denominator(xi.u), denominator(xi.v));
  Integer U = numerator(xi.u) * (c / denominator(xi.u));
  Integer V = numerator(xi.v) * (c / denominator(xi.v));
  // At P1 sqrt D goes to -r, at P2 to +r.
  Integer z = which == PrimeAboveP::P1 ? Integer(U - V * root_) : Integer(U + V * root_);
  z = mod(z, modulus_);
  if (z == 0) throw PrecisionError("embed_F: valuation exceeds the working precision of the embedding");
  int vz = strip_p(z, p_);
  Integer den = 2 * c;
  int vden = strip_p(den, p_);
  int rel = std::min(precision_, work_ - vz);
  Integer m = ppow(p_, rel);
  return PAdic::from_unit(p_, vz - vden, z * inverse_mod(den, m), rel);
}

}  // namespace cmfact
