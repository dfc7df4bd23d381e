#include "cmfact/factored.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

namespace cmfact {

namespace {

// Offsets of the residues coprime to 30, used as a mod-30 wheel.
constexpr std::array<std::uint64_t, 8> kWheel{1, 7, 11, 13, 17, 19, 23, 29};

constexpr std::uint64_t kTrialLimit = 1u << 16;

// A nontrivial factor of a composite n with no prime factor below the trial limit.
std::uint64_t pollard_brent(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t x) {
      std::uint64_t y = mulmod(x, x, n) + c;
      return y >= n ? y - n : y;
    };
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t batch = 128;
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += batch) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(batch, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      // The batch overshot; step back one value at a time.
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void strip(std::uint64_t& n, std::uint64_t d, std::vector<PrimePower>& out) {
  int e = 0;
  while (n % d == 0) {
    n /= d;
    ++e;
  }
  if (e) out.push_back({d, e});
}

}  // namespace

FactoredInteger::FactoredInteger(int sign, std::vector<PrimePower> factors)
    : sign_(sign), factors_(std::move(factors)) {
  if (sign_ != 1 && sign_ != -1) throw std::invalid_argument("FactoredInteger: sign must be +1 or -1");
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    if (f.exponent <= 0) throw std::invalid_argument("FactoredInteger: exponents must be positive");
    if (!is_prime(f.prime)) throw std::invalid_argument("FactoredInteger: " + std::to_string(f.prime) + " is not prime");
    if (i && factors_[i - 1].prime >= f.prime) throw std::invalid_argument("FactoredInteger: primes must increase");
  }
}

int FactoredInteger::exponent_of(std::uint64_t prime) const {
  for (const auto& f : factors_) {
    if (f.prime == prime) return f.exponent;
  }
  return 0;
}

Integer FactoredInteger::value() const {
  Integer v = sign_;
  for (const auto& f : factors_) v *= ipow(Integer(f.prime), static_cast<unsigned>(f.exponent));
  return v;
}

std::string FactoredInteger::to_string() const {
  std::ostringstream os;
  if (factors_.empty()) return sign_ < 0 ? "-1" : "1";
  if (sign_ < 0) os << "-1 * ";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << " * ";
    os << factors_[i].prime;
    if (factors_[i].exponent != 1) os << '^' << factors_[i].exponent;
  }
  return os.str();
}

FactoredInteger FactoredInteger::operator*(const FactoredInteger& other) const {
  std::vector<PrimePower> out;
  std::size_t i = 0, j = 0;
  const auto& a = factors_;
  const auto& b = other.factors_;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].prime, a[i].exponent + b[j].exponent});
      ++i;
      ++j;
    }
  }
  FactoredInteger r;
  r.sign_ = sign_ * other.sign_;
  r.factors_ = std::move(out);
  return r;
}

FactoredInteger FactoredInteger::pow(unsigned e) const {
  FactoredInteger r;
  r.sign_ = (e % 2 == 1) ? sign_ : 1;
  if (e == 0) return r;
  for (const auto& f : factors_) r.factors_.push_back({f.prime, f.exponent * static_cast<int>(e)});
  return r;
}

FactoredInteger factorize(std::int64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: zero has no prime factorization");
  if (n == INT64_MIN) throw std::invalid_argument("factorize: |n| must be below 2^63");
  int sign = n < 0 ? -1 : 1;
  std::uint64_t m = static_cast<std::uint64_t>(n < 0 ? -n : n);
  std::vector<PrimePower> factors;
  for (std::uint64_t d : {2u, 3u, 5u}) strip(m, d, factors);
  if (m > kTrialLimit * kTrialLimit && is_prime(m)) {
    factors.push_back({m, 1});
    m = 1;
  }
  for (std::uint64_t base = 0; m > 1 && base < kTrialLimit; base += 30) {
    for (auto off : kWheel) {
      std::uint64_t d = base + off;
      if (d == 1 || m % d) continue;
      strip(m, d, factors);
    }
    if (m > 1 && (base + 30) * (base + 30) > m) {
      factors.push_back({m, 1});
      m = 1;
    }
  }
  if (m > 1) {
    // Every remaining prime factor exceeds the trial limit.
    std::map<std::uint64_t, int> big;
    std::vector<std::uint64_t> stack{m};
    while (!stack.empty()) {
      std::uint64_t c = stack.back();
      stack.pop_back();
      if (is_prime(c)) {
        ++big[c];
        continue;
      }
      std::uint64_t f = pollard_brent(c);
      stack.push_back(f);
      stack.push_back(c / f);
    }
    for (const auto& [pr, e] : big) factors.push_back({pr, e});
  }
  return FactoredInteger(sign, std::move(factors));
}

FactoredRational::FactoredRational(const FactoredInteger& numerator, const FactoredInteger& denominator) {
  if (denominator.sign() < 0) throw std::invalid_argument("FactoredRational: denominator must be positive");
  std::map<std::uint64_t, int> e;
  for (const auto& f : numerator.factors()) e[f.prime] += f.exponent;
  for (const auto& f : denominator.factors()) e[f.prime] -= f.exponent;
  *this = from_exponents(numerator.sign(), e);
}

FactoredRational FactoredRational::from_exponents(int sign, const std::map<std::uint64_t, int>& exponents) {
  std::vector<PrimePower> num, den;
  for (const auto& [p, e] : exponents) {
    if (e > 0) num.push_back({p, e});
    if (e < 0) den.push_back({p, -e});
  }
  FactoredRational r;
  r.num_ = FactoredInteger(sign, std::move(num));
  r.den_ = FactoredInteger(1, std::move(den));
  return r;
}

int FactoredRational::exponent_of(std::uint64_t prime) const {
  return num_.exponent_of(prime) - den_.exponent_of(prime);
}

std::map<std::uint64_t, int> FactoredRational::exponents() const {
  std::map<std::uint64_t, int> e;
  for (const auto& f : num_.factors()) e[f.prime] += f.exponent;
  for (const auto& f : den_.factors()) e[f.prime] -= f.exponent;
  return e;
}

Rational FactoredRational::value() const { return Rational(num_.value(), den_.value()); }

std::string FactoredRational::to_string() const {
  if (den_.is_one()) return num_.to_string();
  return num_.to_string() + " / " + den_.to_string();
}

FactoredRational FactoredRational::operator*(const FactoredRational& other) const {
  auto e = exponents();
  for (const auto& [p, x] : other.exponents()) e[p] += x;
  return from_exponents(sign() * other.sign(), e);
}

FactoredRational FactoredRational::inverse() const { return pow(-1); }

FactoredRational FactoredRational::pow(int k) const {
  auto e = exponents();
  for (auto& [p, x] : e) x *= k;
  int s = (k % 2 != 0) ? sign() : 1;
  return from_exponents(s, e);
}

}  // namespace cmfact
