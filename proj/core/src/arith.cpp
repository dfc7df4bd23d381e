#include "cmfact/arith.hpp"

#include <array>
#include <cmath>

namespace cmfact {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) result = mulmod(result, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto b : bases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (auto b : bases) {
    std::uint64_t x = powmod(b, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) throw std::invalid_argument("kronecker: n must be nonzero");
  int result = 1;
  if (n < 0) {
    if (n == INT64_MIN) throw std::invalid_argument("kronecker: n out of range");
    n = -n;
    if (a < 0) result = -result;
  }
  // a is only needed mod 8n from here on, which keeps everything non-negative.
  std::uint64_t un = static_cast<std::uint64_t>(n);
  int twos = 0;
  while ((un & 1) == 0) {
    un >>= 1;
    ++twos;
  }
  if (twos) {
    if ((a & 1) == 0) return 0;
    std::int64_t a8 = mod(a, 8);
    if ((twos & 1) && (a8 == 3 || a8 == 5)) result = -result;
  }
  if (un == 1) return result;
  // Jacobi symbol (a | un) for odd un.
  std::uint64_t ua;
  if (a >= 0) {
    ua = static_cast<std::uint64_t>(a) % un;
  } else {
    std::uint64_t neg = static_cast<std::uint64_t>(-(a + 1)) + 1;  // |a| without overflow
    ua = (un - neg % un) % un;
  }
  std::uint64_t m = un;
  while (ua != 0) {
    while ((ua & 1) == 0) {
      ua >>= 1;
      std::uint64_t m8 = m & 7;
      if (m8 == 3 || m8 == 5) result = -result;
    }
    std::swap(ua, m);
    if ((ua & 3) == 3 && (m & 3) == 3) result = -result;
    ua %= m;
  }
  return m == 1 ? result : 0;
}

int valuation(std::int64_t n, std::uint64_t p) {
  if (n == 0) throw std::domain_error("valuation of zero");
  int v = 0;
  unsigned __int128 m = n < 0 ? static_cast<unsigned __int128>(-static_cast<__int128>(n))
                              : static_cast<unsigned __int128>(n);
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

int valuation(const Integer& n, std::uint64_t p) {
  if (n == 0) throw std::domain_error("valuation of zero");
  Integer m = abs(n);
  int v = 0;
  Integer q, r;
  for (;;) {
    divide_qr(m, Integer(p), q, r);
    if (r != 0) return v;
    m = q;
    ++v;
  }
}

Integer ipow(const Integer& base, unsigned exponent) { return boost::multiprecision::pow(base, exponent); }

std::uint64_t ipow_u64(std::uint64_t base, unsigned exponent) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (r > UINT64_MAX / base) throw std::overflow_error("ipow_u64 overflow");
    r *= base;
  }
  return r;
}

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<__int128>(r) * r > n) --r;
  while (static_cast<__int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  auto r = isqrt(n);
  return r * r == n;
}

bool is_squarefree(std::int64_t n) {
  if (n == 0) return false;
  std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      m /= d;
      if (m % d == 0) return false;
    }
  }
  return true;
}

Integer mod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

Integer inverse_mod(const Integer& a, const Integer& m) {
  Integer old_r = mod(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw std::domain_error("inverse_mod: not invertible");
  return mod(old_s, m);
}

Integer sqrt_mod_prime_power(const Integer& a, std::uint64_t ell, int k, std::int64_t hint) {
  if (k <= 0) return 0;
  const Integer L(ell);
  if (mod(a, L) == 0) throw std::domain_error("sqrt_mod_prime_power: ell divides a");
  Integer target = ipow(L, static_cast<unsigned>(k));
  if (ell == 2) {
    if (mod(a, 8) != 1) throw std::domain_error("sqrt_mod_prime_power: a is not 1 mod 8");
    // Roots mod 2^j (j >= 3) come in classes r, -r, r + 2^(j-1), -r + 2^(j-1);
    // r is determined mod 2^(j-1) by r^2 mod 2^j, so lift one bit at a time.
    Integer r = mod(Integer(hint), 4);
    if (r % 2 == 0) throw std::invalid_argument("sqrt_mod_prime_power: 2-adic hint must be odd");
    // r^2 = a (mod 8) for both odd classes mod 4; grow precision of r.
    int known = 2;  // r is correct mod 2^known and r^2 = a mod 2^(known+1)
    while (known < k) {
      Integer m = ipow(Integer(2), static_cast<unsigned>(known + 2));
      if (mod(r * r - a, m) != 0) r += ipow(Integer(2), static_cast<unsigned>(known));
      ++known;
    }
    return mod(r, target);
  }
  Integer r = mod(Integer(hint), L);
  if (mod(r * r - a, L) != 0) throw std::domain_error("sqrt_mod_prime_power: hint is not a root");
  Integer modulus = L;
  while (modulus < target) {
    modulus *= modulus;
    if (modulus > target) modulus = target;
    Integer inv = inverse_mod(2 * r, modulus);
    r = mod(r - (r * r - a) * inv, modulus);
  }
  return mod(r, target);
}

std::uint64_t inverse_mod_u64(std::uint64_t a, std::uint64_t m) {
  __int128 old_r = a % m, r = m, old_s = 1, s = 0;
  while (r != 0) {
    __int128 q = old_r / r;
    __int128 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw std::domain_error("inverse_mod: not invertible");
  old_s %= m;
  if (old_s < 0) old_s += m;
  return static_cast<std::uint64_t>(old_s);
}

std::uint64_t sqrt_mod_prime(std::int64_t a_signed, std::uint64_t p) {
  std::uint64_t a = static_cast<std::uint64_t>(mod(a_signed, static_cast<std::int64_t>(p)));
  if (a == 0) return 0;
  if (powmod(a, (p - 1) / 2, p) != 1) throw std::domain_error("sqrt_mod_prime: not a quadratic residue");
  std::uint64_t r;
  if (p % 4 == 3) {
    r = powmod(a, (p + 1) / 4, p);
  } else {
    std::uint64_t q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
      q >>= 1;
      ++s;
    }
    std::uint64_t z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    std::uint64_t c = powmod(z, q, p);
    std::uint64_t t = powmod(a, q, p);
    r = powmod(a, (q + 1) / 2, p);
    int m = s;
    while (t != 1) {
      int i = 0;
      std::uint64_t tt = t;
      while (tt != 1) {
        tt = mulmod(tt, tt, p);
        ++i;
      }
      std::uint64_t b = c;
      for (int j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
      m = i;
      c = mulmod(b, b, p);
      t = mulmod(t, c, p);
      r = mulmod(r, b, p);
    }
  }
  return std::min(r, p - r);
}

std::uint64_t sqrt_mod_prime_power_u64(std::int64_t a, std::uint64_t ell, int k, std::int64_t hint) {
  if (k <= 0) return 0;
  std::uint64_t target = 1;
  for (int i = 0; i < k; ++i) {
    if (target > (UINT64_C(1) << 62) / ell) throw std::overflow_error("sqrt_mod_prime_power_u64: modulus too large");
    target *= ell;
  }
  if (ell == 2) {
    if (mod(a, 8) != 1) throw std::domain_error("sqrt_mod_prime_power: a is not 1 mod 8");
    if ((hint & 1) == 0) throw std::invalid_argument("sqrt_mod_prime_power: 2-adic hint must be odd");
    // One bit per step: if r^2 = a mod 2^(j+1) fails mod 2^(j+2), r + 2^j repairs it.
    // Unsigned wraparound is harmless because every modulus divides 2^64.
    const std::uint64_t am = static_cast<std::uint64_t>(a);
    std::uint64_t r = static_cast<std::uint64_t>(mod(hint, 4));
    for (int known = 2; known < k; ++known) {
      std::uint64_t mask = (UINT64_C(1) << (known + 2)) - 1;
      if (((r * r - am) & mask) != 0) r += UINT64_C(1) << known;
    }
    return r % target;
  }
  std::int64_t L = static_cast<std::int64_t>(ell);
  std::uint64_t r = static_cast<std::uint64_t>(mod(hint, L));
  std::uint64_t am = static_cast<std::uint64_t>(mod(a, static_cast<std::int64_t>(target)));
  if (mulmod(r, r, ell) != am % ell) throw std::domain_error("sqrt_mod_prime_power: hint is not a root");
  std::uint64_t modulus = ell;
  while (modulus < target) {
    modulus = (modulus > target / modulus) ? target : modulus * modulus;
    std::uint64_t rr = mulmod(r, r, modulus);
    std::uint64_t diff = (rr + modulus - am % modulus) % modulus;
    std::uint64_t inv = inverse_mod_u64(mulmod(2, r, modulus), modulus);
    r = (r + modulus - mulmod(diff, inv, modulus)) % modulus;
  }
  return r % target;
}

}  // namespace cmfact
