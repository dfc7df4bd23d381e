#include "cmfact/quaternion.hpp"

#include "cmfact/factored.hpp"
#include "cmfact/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmfact {

namespace {

using Mat4 = std::array<std::array<Rational, 4>, 4>;
using IMat4 = std::array<std::array<std::int64_t, 4>, 4>;
using IVec4 = std::array<std::int64_t, 4>;

std::int64_t to_int64(const Integer& v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error(std::string(what) + ": value exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t integral(const Rational& r, const char* what) {
  if (denominator(r) != 1) throw std::domain_error(std::string(what) + ": expected an integer");
  return to_int64(numerator(r), what);
}

Mat4 invert(Mat4 m) {
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    while (pivot < 4 && m[pivot][col] == 0) ++pivot;
    if (pivot == 4) throw std::domain_error("singular basis");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    Rational f = m[col][col];
    for (int j = 0; j < 4; ++j) {
      m[col][j] /= f;
      inv[col][j] /= f;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational g = m[r][col];
      for (int j = 0; j < 4; ++j) {
        m[r][j] -= g * m[col][j];
        inv[r][j] -= g * inv[col][j];
      }
    }
  }
  return inv;
}

Integer det4(const IMat4& t) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = t[i][j];
  Rational det = 1;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    while (pivot < 4 && m[pivot][col] == 0) ++pivot;
    if (pivot == 4) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < 4; ++r) {
      Rational g = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= g * m[col][j];
    }
  }
  return numerator(det);
}

IMat4 imul(const IMat4& a, const IMat4& b) {
  IMat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      std::int64_t s = 0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

__int128 quad_form(const IMat4& m, const IVec4& c) {
  __int128 s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += static_cast<__int128>(c[i]) * m[i][j] * c[j];
  return s;
}

Quaternion reduce(const std::array<Integer, 4>& num, Integer den) {
  if (den == 0) throw std::domain_error("quaternion: zero denominator");
  Integer g = den;
  for (const auto& n : num) g = gcd(g, n);
  if (den < 0) g = -g;
  IVec4 out{};
  for (int i = 0; i < 4; ++i) out[i] = to_int64(num[i] / g, "quaternion");
  return Quaternion(out, to_int64(den / g, "quaternion"));
}

// (-1)^e for the parity of an Integer-valued exponent.
int sign_of(std::int64_t e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

int hilbert_symbol(std::int64_t a, std::int64_t b, std::uint64_t ell) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: zero argument");
  if (ell == 0) return (a < 0 && b < 0) ? -1 : 1;
  if (!is_prime(ell)) throw std::invalid_argument("hilbert_symbol: ell must be prime or 0");
  auto L = static_cast<std::int64_t>(ell);
  int alpha = valuation(a, ell), beta = valuation(b, ell);
  std::int64_t u = a, v = b;
  for (int i = 0; i < alpha; ++i) u /= L;
  for (int i = 0; i < beta; ++i) v /= L;
  if (ell == 2) {
    auto eps = [](std::int64_t w) { return mod(w, 4) == 1 ? 0 : 1; };
    auto omega = [](std::int64_t w) {
      std::int64_t r = mod(w, 8);
      return (r == 1 || r == 7) ? 0 : 1;
    };
    return sign_of(eps(u) * eps(v) + alpha * omega(v) + beta * omega(u));
  }
  int s = sign_of(static_cast<std::int64_t>(alpha) * beta * ((L - 1) / 2));
  if (beta % 2) s *= kronecker(u, L);
  if (alpha % 2) s *= kronecker(v, L);
  return s;
}

std::vector<std::uint64_t> ramified_primes(const QuaternionAlgebra& alg) {
  std::vector<std::uint64_t> candidates{2};
  for (std::int64_t w : {alg.a, alg.b}) {
    auto f = factorize(w);
    for (const auto& pp : f.factors()) candidates.push_back(pp.prime);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<std::uint64_t> out;
  for (auto ell : candidates) {
    if (hilbert_symbol(alg.a, alg.b, ell) == -1) out.push_back(ell);
  }
  return out;
}

Quaternion::Quaternion(const std::array<std::int64_t, 4>& coords, std::int64_t den) : num_(coords), den_(den) {
  if (den == 0) throw std::domain_error("quaternion: zero denominator");
  std::int64_t g = den;
  for (auto c : num_) g = std::gcd(g, c);
  if (den < 0) g = -g;
  for (auto& c : num_) c /= g;
  den_ /= g;
}

std::string Quaternion::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < 4; ++i) {
    if (i) os << ", ";
    os << coord(i);
  }
  os << "]";
  return os.str();
}

StdCoords std_mul(const QuaternionAlgebra& alg, const StdCoords& x, const StdCoords& y) {
  Rational a = alg.a, b = alg.b;
  return {x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - a * b * x[3] * y[3],
          x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
          x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
          x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1]};
}

Rational std_norm(const QuaternionAlgebra& alg, const StdCoords& x) {
  Rational a = alg.a, b = alg.b;
  return x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3];
}

MaximalOrder::MaximalOrder(QuaternionAlgebra alg, const std::array<StdCoords, 4>& basis) : alg_(alg), basis_(basis) {
  Mat4 bm;
  for (int i = 0; i < 4; ++i) bm[i] = basis[i];
  to_order_ = invert(bm);

  auto coords_of = [&](const StdCoords& s) {
    std::array<Rational, 4> c{};
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) c[j] += s[i] * to_order_[i][j];
    return c;
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto c = coords_of(std_mul(alg_, basis[i], basis[j]));
      for (int k = 0; k < 4; ++k) mult_[i][j][k] = integral(c[k], "order is not closed under multiplication");
    }
  auto one = coords_of({Rational(1), Rational(0), Rational(0), Rational(0)});
  IVec4 one_c{};
  for (int k = 0; k < 4; ++k) one_c[k] = integral(one[k], "order does not contain 1");
  one_ = Quaternion(one_c);
  for (int i = 0; i < 4; ++i) {
    trd_[i] = integral(2 * basis[i][0], "basis element with non-integral trace");
    for (int j = 0; j < 4; ++j) {
      StdCoords cj{basis[j][0], -basis[j][1], -basis[j][2], -basis[j][3]};
      tform_[i][j] = integral(2 * std_mul(alg_, basis[i], cj)[0], "non-integral trace form");
    }
    if (tform_[i][i] % 2) throw std::domain_error("basis element with non-integral norm");
  }
}

std::array<std::array<Rational, 4>, 4> MaximalOrder::gram() const {
  Mat4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = Rational(tform_[i][j], 2);
  return g;
}

Integer MaximalOrder::trace_form_determinant() const { return det4(tform_); }

Quaternion MaximalOrder::mul(const Quaternion& x, const Quaternion& y) const {
  std::array<Integer, 4> out{};
  const auto& a = x.numerators();
  const auto& b = y.numerators();
  for (int i = 0; i < 4; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < 4; ++j) {
      if (b[j] == 0) continue;
      Integer ab = Integer(a[i]) * b[j];
      for (int k = 0; k < 4; ++k) {
        if (mult_[i][j][k]) out[k] += ab * mult_[i][j][k];
      }
    }
  }
  return reduce(out, Integer(x.denominator()) * y.denominator());
}

Quaternion MaximalOrder::add(const Quaternion& x, const Quaternion& y) const {
  std::array<Integer, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = Integer(x.numerators()[i]) * y.denominator() + Integer(y.numerators()[i]) * x.denominator();
  }
  return reduce(out, Integer(x.denominator()) * y.denominator());
}

Quaternion MaximalOrder::scale(const Quaternion& x, std::int64_t k) const {
  std::array<Integer, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = Integer(x.numerators()[i]) * k;
  return reduce(out, x.denominator());
}

Quaternion MaximalOrder::conj(const Quaternion& x) const {
  // conj(x) = trd(x) - x
  Integer tr = 0;
  for (int i = 0; i < 4; ++i) tr += Integer(x.numerators()[i]) * trd_[i];
  std::array<Integer, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = tr * one_.numerators()[i] - x.numerators()[i];
  return reduce(out, x.denominator());
}

Rational MaximalOrder::norm(const Quaternion& x) const {
  Integer s = 0;
  const auto& c = x.numerators();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += Integer(c[i]) * c[j] * tform_[i][j];
  return Rational(s, 2 * Integer(x.denominator()) * x.denominator());
}

Rational MaximalOrder::trace(const Quaternion& x) const {
  Integer s = 0;
  for (int i = 0; i < 4; ++i) s += Integer(x.numerators()[i]) * trd_[i];
  return Rational(s, x.denominator());
}

StdCoords MaximalOrder::to_std(const Quaternion& x) const {
  StdCoords s{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s[j] += x.coord(i) * basis_[i][j];
  return s;
}

Quaternion MaximalOrder::from_std(const StdCoords& c) const {
  std::array<Rational, 4> r{};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) r[j] += c[i] * to_order_[i][j];
  Integer den = 1;
  for (const auto& v : r) den = lcm(den, denominator(v));
  std::array<Integer, 4> num{};
  for (int i = 0; i < 4; ++i) num[i] = numerator(r[i]) * (den / denominator(r[i]));
  return reduce(num, den);
}

std::int64_t MaximalOrder::norm_int(const std::array<std::int64_t, 4>& c) const {
  return static_cast<std::int64_t>(quad_form(tform_, c) / 2);
}

std::int64_t MaximalOrder::trace_int(const std::array<std::int64_t, 4>& c) const {
  std::int64_t s = 0;
  for (int i = 0; i < 4; ++i) s += c[i] * trd_[i];
  return s;
}

std::pair<QuaternionAlgebra, MaximalOrder> build_algebra_and_order(std::int64_t q) {
  auto R = [](std::int64_t n, std::int64_t d = 1) { return Rational(n, d); };
  QuaternionAlgebra alg;
  std::array<StdCoords, 4> basis;
  switch (q) {
    case 2:
      alg = {-1, -1, 2};
      basis = {{{R(1, 2), R(1, 2), R(1, 2), R(1, 2)}, {R(0), R(1), R(0), R(0)}, {R(0), R(0), R(1), R(0)},
                {R(0), R(0), R(0), R(1)}}};
      break;
    case 3:
    case 11:
      alg = {-1, -q, q};
      basis = {{{R(1), R(0), R(0), R(0)}, {R(0), R(1), R(0), R(0)}, {R(1, 2), R(0), R(1, 2), R(0)},
                {R(0), R(1, 2), R(0), R(1, 2)}}};
      break;
    case 5:
      alg = {-2, -5, 5};
      basis = {{{R(1, 2), R(0), R(1, 2), R(1, 2)}, {R(0), R(1, 4), R(1, 2), R(1, 4)}, {R(0), R(0), R(1), R(0)},
                {R(0), R(0), R(0), R(1)}}};
      break;
    default:
      throw std::invalid_argument("no maximal order table entry for q = " + std::to_string(q) +
                                  " (supported: 2, 3, 5, 11)");
  }
  auto ram = ramified_primes(alg);
  if (ram != std::vector<std::uint64_t>{static_cast<std::uint64_t>(q)} || hilbert_symbol(alg.a, alg.b, 0) != -1) {
    throw std::logic_error("quaternion algebra table entry is not ramified exactly at q and infinity");
  }
  MaximalOrder order(alg, basis);
  Integer det = order.trace_form_determinant();
  if (abs(det) != Integer(q) * q) throw std::logic_error("quaternion order table entry is not maximal");
  return {alg, order};
}

std::vector<Quaternion> enumerate_norm(const MaximalOrder& order, std::int64_t n, unsigned workers) {
  if (n < 0) throw std::invalid_argument("enumerate_norm: negative norm");
  if (n == 0) return {Quaternion()};
  const auto& T = order.trace_form();
  if (T[0][0] <= 0) throw std::logic_error("enumerate_norm: trace form is not positive definite");
  Mat4 tm;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) tm[i][j] = T[i][j];
  Mat4 tinv = invert(tm);
  // On c^T (T/2) c = n the extreme value of c_i^2 is 2 n (T^-1)_ii.
  IVec4 bound{};
  for (int i = 1; i < 4; ++i) {
    Rational lim = Rational(2 * n) * tinv[i][i];
    bound[i] = isqrt(to_int64(numerator(lim) / denominator(lim), "enumerate_norm"));
  }
  using Batch = std::vector<IVec4>;
  auto chunk = [&](std::int64_t lo, std::int64_t hi) {
    Batch found;
    for (std::int64_t c1 = lo; c1 < hi; ++c1)
      for (std::int64_t c2 = -bound[2]; c2 <= bound[2]; ++c2)
        for (std::int64_t c3 = -bound[3]; c3 <= bound[3]; ++c3) {
          const std::int64_t rest[4] = {0, c1, c2, c3};
          std::int64_t B = 0, C = 0;
          for (int j = 1; j < 4; ++j) {
            B += T[0][j] * rest[j];
            for (int k = 1; k < 4; ++k) C += T[j][k] * rest[j] * rest[k];
          }
          // T00 c0^2 + 2 B c0 + (C - 2n) = 0
          __int128 disc = static_cast<__int128>(B) * B - static_cast<__int128>(T[0][0]) * (C - 2 * n);
          if (disc < 0) continue;
          auto s = isqrt(static_cast<std::int64_t>(disc));
          if (static_cast<__int128>(s) * s != disc) continue;
          for (std::int64_t root : {-B - s, -B + s}) {
            if (root % T[0][0]) continue;
            found.push_back({root / T[0][0], c1, c2, c3});
            if (s == 0) break;
          }
        }
    return found;
  };
  auto merge = [](Batch acc, Batch part) {
    acc.insert(acc.end(), part.begin(), part.end());
    return acc;
  };
  Batch all = parallel_reduce<Batch>(-bound[1], bound[1] + 1, workers, Batch{}, chunk, merge);
  std::sort(all.begin(), all.end());
  std::vector<Quaternion> out;
  out.reserve(all.size());
  for (const auto& c : all) out.emplace_back(c);
  return out;
}

std::int64_t embedding_conductor(const MaximalOrder& order, const Quaternion& omega, std::int64_t disc) {
  Rational tr = order.trace(omega), nm = order.norm(omega);
  if (tr * tr - 4 * nm != disc) throw std::invalid_argument("embedding_conductor: omega does not have this discriminant");
  std::int64_t best = 1;
  for (std::int64_t f = 2; f * f <= std::abs(disc); ++f) {
    if (disc % (f * f)) continue;
    std::int64_t d0 = disc / (f * f);
    if (mod(d0, 4) != 0 && mod(d0, 4) != 1) continue;
    for (std::int64_t a = 0; a < f; ++a) {
      Quaternion cand = order.add(order.scale(order.one(), a), omega);
      const auto& c = cand.numerators();
      bool in_order = true;
      for (int i = 0; i < 4; ++i) {
        if ((c[i] % f) != 0 || cand.denominator() != 1) in_order = false;
      }
      if (in_order) {
        best = f;
        break;
      }
    }
  }
  return best;
}

Quaternion find_cm_embedding(const MaximalOrder& order, std::int64_t disc) {
  if (disc >= 0 || mod(disc, 4) != 1) throw std::invalid_argument("find_cm_embedding: need a negative odd discriminant");
  std::int64_t q = order.algebra().discriminant;
  if (kronecker(disc, q) == 1) {
    throw std::domain_error("find_cm_embedding: q splits in Q(sqrt " + std::to_string(disc) + "), no embedding exists");
  }
  for (const auto& g : enumerate_norm(order, (1 - disc) / 4)) {
    if (order.trace(g) == 1 && embedding_conductor(order, g, disc) == 1) return g;
  }
  throw std::logic_error("find_cm_embedding: no optimal embedding found");
}

CMEmbeddingPair make_embedding_pair(const MaximalOrder& order, const Quaternion& omega1, std::int64_t d1,
                                    const Quaternion& omega2, std::int64_t d2) {
  for (const auto* w : {&omega1, &omega2}) {
    if (!w->is_integral()) throw std::invalid_argument("make_embedding_pair: omega must lie in the order");
  }
  if (embedding_conductor(order, omega1, d1) != 1 || embedding_conductor(order, omega2, d2) != 1 ||
      order.trace(omega1) != 1 || order.trace(omega2) != 1) {
    throw std::invalid_argument("make_embedding_pair: embeddings must be optimal with omega of trace 1");
  }
  CMEmbeddingPair e;
  e.omega1 = omega1;
  e.omega2 = omega2;
  e.d1 = d1;
  e.d2 = d2;
  for (int j = 0; j < 4; ++j) {
    IVec4 unit{};
    unit[j] = 1;
    Quaternion ej(unit);
    auto l = order.mul(omega1, ej).numerators();
    auto r = order.mul(ej, omega2).numerators();
    for (int i = 0; i < 4; ++i) {
      e.left[i][j] = l[i];
      e.right[i][j] = r[i];
    }
  }
  IMat4 a{}, b{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[i][j] = 2 * e.left[i][j] - (i == j);
      b[i][j] = 2 * e.right[i][j] - (i == j);
    }
  e.sqrt_d = imul(a, b);
  IMat4 sq = imul(e.sqrt_d, e.sqrt_d);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (sq[i][j] != (i == j ? d1 * d2 : 0)) throw std::logic_error("make_embedding_pair: sqrt(D) action is inconsistent");
    }
  e.xform = imul(order.trace_form(), e.sqrt_d);
  return e;
}

CMEmbeddingPair find_embedding_pair(const MaximalOrder& order, std::int64_t d1, std::int64_t d2) {
  return make_embedding_pair(order, find_cm_embedding(order, d1), d1, find_cm_embedding(order, d2), d2);
}

Quaternion sqrt_d_action(const MaximalOrder& order, const CMEmbeddingPair& emb, const Quaternion& g) {
  Quaternion two_w1 = order.add(order.scale(emb.omega1, 2), order.scale(order.one(), -1));
  Quaternion two_w2 = order.add(order.scale(emb.omega2, 2), order.scale(order.one(), -1));
  return order.mul(order.mul(two_w1, g), two_w2);
}

std::pair<std::int64_t, std::int64_t> det_f_xt(const MaximalOrder& order, const CMEmbeddingPair& emb,
                                               const std::array<std::int64_t, 4>& gamma) {
  __int128 twice_x = quad_form(emb.xform, gamma);
  if (twice_x % 2) throw std::logic_error("det_f_xt: odd pairing");
  return {static_cast<std::int64_t>(twice_x / 2), order.norm_int(gamma)};
}

std::pair<FElement, FElement> det_f_pair(const MaximalOrder& order, const CMEmbeddingPair& emb, const Quaternion& g) {
  if (!g.is_integral()) throw std::invalid_argument("det_f_pair: element must lie in the order");
  auto [x, t] = det_f_xt(order, emb, g.numerators());
  std::int64_t d = emb.d1 * emb.d2;
  FElement v{Rational(t), Rational(x, d), d};
  return {v, v.conjugate()};
}

ReflexLabels reflex_ideal(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s, std::int64_t bound) {
  auto q = static_cast<std::uint64_t>(s.q);
  std::int64_t la = s.canonical_label(q), lb = s.conjugate_label(q, la);
  FPrime pa = s.prime(q, la), pb = s.prime(q, lb);
  std::int64_t votes_a = 0, votes_b = 0;
  for (std::int64_t n = 1; n <= bound; ++n) {
    for (const auto& g : enumerate_norm(order, n)) {
      auto [x, t] = det_f_xt(order, emb, g.numerators());
      bool in_a = element_valuation(s, x, t, pa) > 0;
      bool in_b = element_valuation(s, x, t, pb) > 0;
      if (!in_a && !in_b) throw std::logic_error("reflex_ideal: det_F value outside both primes above q");
      if (in_a != in_b) (in_a ? votes_a : votes_b) += 1;
    }
  }
  if (votes_a && votes_b) throw std::logic_error("reflex_ideal: census is not unanimous");
  if (!votes_a && !votes_b) throw std::logic_error("reflex_ideal: census is empty, raise the bound");
  ReflexLabels out;
  out.q1_label = votes_a ? la : lb;
  out.q2_label = votes_a ? lb : la;
  out.votes = votes_a + votes_b;
  return out;
}

int class_number(std::int64_t disc) {
  if (disc >= 0 || (mod(disc, 4) != 0 && mod(disc, 4) != 1)) throw std::invalid_argument("class_number: bad discriminant");
  int h = 0;
  for (std::int64_t b = mod(disc, 2); b * b <= -disc / 3; b += 2) {
    std::int64_t ac = (b * b - disc) / 4;
    for (std::int64_t a = std::max<std::int64_t>(b, 1); a * a <= ac; ++a) {
      if (ac % a) continue;
      std::int64_t c = ac / a;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      h += (b == 0 || a == b || a == c) ? 1 : 2;
    }
  }
  return h;
}

std::vector<ThetaLevel> theta_truncated(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s,
                                        const LocalEmbedding& local, int n_max, Parity parity, unsigned workers) {
  if (class_number(s.d1) != 1 || class_number(s.d2) != 1) {
    throw std::domain_error("theta_truncated: the unfolded product needs class number one on both sides");
  }
  if (n_max < 0) throw std::invalid_argument("theta_truncated: negative level");
  auto p = static_cast<std::uint64_t>(s.p);
  std::vector<ThetaLevel> out;
  for (int n = 0; n <= n_max; ++n) {
    unsigned e = static_cast<unsigned>(2 * n + (parity == Parity::Odd ? 1 : 0));
    auto norm = static_cast<std::int64_t>(ipow_u64(p, e));
    auto elems = enumerate_norm(order, norm, workers);
    auto chunk = [&](std::int64_t lo, std::int64_t hi) {
      PAdic acc = PAdic::from_integer(1, p, local.precision());
      for (auto i = lo; i < hi; ++i) {
        auto [v, vc] = det_f_pair(order, emb, elems[static_cast<std::size_t>(i)]);
        acc = acc * (local.embed(v, PrimeAboveP::P1) / local.embed(v, PrimeAboveP::P2));
      }
      return acc;
    };
    auto merge = [](PAdic a, PAdic b) { return a * b; };
    PAdic one = PAdic::from_integer(1, p, local.precision());
    PAdic value = parallel_reduce<PAdic>(0, static_cast<std::int64_t>(elems.size()), workers, one, chunk, merge);
    ThetaLevel lvl;
    lvl.level = n;
    lvl.norm = norm;
    lvl.elements = elems.size();
    lvl.value = value;
    lvl.log = iwasawa_log(value);
    out.push_back(lvl);
  }
  return out;
}

std::map<std::int64_t, std::int64_t> det_f_census(const MaximalOrder& order, const CMEmbeddingPair& emb,
                                                  std::int64_t t, unsigned workers) {
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& g : enumerate_norm(order, t, workers)) ++out[det_f_xt(order, emb, g.numerators()).first];
  return out;
}

BijectionReport check_bijection(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s,
                                std::int64_t max_trace, unsigned workers) {
  BijectionReport rep;
  const std::int64_t weight = s.w1 * s.w2 / 2;
  const FIdeal q1 = FIdeal::of(s.q1());
  auto note = [&](std::int64_t x, std::int64_t t, std::int64_t count, std::int64_t expected) {
    ++rep.mismatch_count;
    if (rep.mismatches.size() < 8) rep.mismatches.push_back({x, t, count, expected});
  };
  for (std::int64_t t = 1; t <= max_trace; ++t) {
    auto census = det_f_census(order, emb, t, workers);
    std::int64_t xmax = isqrt(s.d * t * t);
    if (xmax * xmax == s.d * t * t) --xmax;
    for (std::int64_t x = -xmax; x <= xmax; ++x) {
      if (mod(x - t * s.d, 2) != 0) continue;
      FIdeal I = element_ideal(s, x, t);
      std::int64_t expected = q1.divides(I) ? weight * static_cast<std::int64_t>(rho(I.quotient(q1))) : 0;
      auto it = census.find(x);
      std::int64_t count = it == census.end() ? 0 : it->second;
      if (it != census.end()) census.erase(it);
      if (expected || count) ++rep.nus_checked;
      rep.elements_counted += count;
      if (count != expected) note(x, t, count, expected);
    }
    for (const auto& [x, count] : census) {
      rep.elements_counted += count;
      note(x, t, count, 0);
    }
  }
  return rep;
}

}  // namespace cmfact
