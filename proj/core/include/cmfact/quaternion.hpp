#pragma once

#include "cmfact/padic.hpp"
#include "cmfact/quadratic.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cmfact {

// i^2 = a, j^2 = b, ij = -ji = k.
struct QuaternionAlgebra {
  std::int64_t a = -1;
  std::int64_t b = -1;
  std::int64_t discriminant = 0;
};

// Hilbert symbol (a, b)_ell; ell = 0 stands for the real place.
int hilbert_symbol(std::int64_t a, std::int64_t b, std::uint64_t ell);
// Finite primes where the algebra ramifies, found by testing every prime dividing 2ab.
std::vector<std::uint64_t> ramified_primes(const QuaternionAlgebra& alg);

using StdCoords = std::array<Rational, 4>;  // coordinates on 1, i, j, k

// Rational coordinates in the basis of a fixed maximal order, stored over a common denominator.
class Quaternion {
 public:
  Quaternion() = default;
  explicit Quaternion(const std::array<std::int64_t, 4>& coords, std::int64_t den = 1);

  const std::array<std::int64_t, 4>& numerators() const { return num_; }
  std::int64_t denominator() const { return den_; }
  Rational coord(int i) const { return Rational(num_[static_cast<std::size_t>(i)], den_); }
  bool is_integral() const { return den_ == 1; }
  bool is_zero() const { return num_ == std::array<std::int64_t, 4>{}; }
  std::string to_string() const;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
  // Lexicographic on the rational coordinates.
  friend bool operator<(const Quaternion& a, const Quaternion& b) {
    for (int i = 0; i < 4; ++i) {
      Rational x = a.coord(i), y = b.coord(i);
      if (x != y) return x < y;
    }
    return false;
  }

 private:
  std::array<std::int64_t, 4> num_{};
  std::int64_t den_ = 1;
};

class MaximalOrder {
 public:
  MaximalOrder(QuaternionAlgebra alg, const std::array<StdCoords, 4>& basis);

  const QuaternionAlgebra& algebra() const { return alg_; }
  const std::array<StdCoords, 4>& basis() const { return basis_; }
  // Gram matrix of the reduced norm: Nm(c) = c^T gram c.
  std::array<std::array<Rational, 4>, 4> gram() const;
  // trd(e_i * conj(e_j)); integral and equal to twice the Gram matrix.
  const std::array<std::array<std::int64_t, 4>, 4>& trace_form() const { return tform_; }
  Integer trace_form_determinant() const;

  Quaternion one() const { return one_; }
  Quaternion mul(const Quaternion& x, const Quaternion& y) const;
  Quaternion add(const Quaternion& x, const Quaternion& y) const;
  Quaternion scale(const Quaternion& x, std::int64_t k) const;
  Quaternion conj(const Quaternion& x) const;
  Rational norm(const Quaternion& x) const;
  Rational trace(const Quaternion& x) const;
  StdCoords to_std(const Quaternion& x) const;
  Quaternion from_std(const StdCoords& c) const;

  // Integer fast paths for order elements.
  std::int64_t norm_int(const std::array<std::int64_t, 4>& c) const;
  std::int64_t trace_int(const std::array<std::int64_t, 4>& c) const;
  // Structure constants: e_i e_j = sum_k m(i, j, k) e_k.
  std::int64_t structure(int i, int j, int k) const { return mult_[i][j][k]; }

 private:
  QuaternionAlgebra alg_;
  std::array<StdCoords, 4> basis_;
  std::array<std::array<Rational, 4>, 4> to_order_;  // inverse of the basis matrix
  std::array<std::array<std::array<std::int64_t, 4>, 4>, 4> mult_{};
  std::array<std::array<std::int64_t, 4>, 4> tform_{};
  std::array<std::int64_t, 4> trd_{};
  Quaternion one_;
};

StdCoords std_mul(const QuaternionAlgebra& alg, const StdCoords& x, const StdCoords& y);
Rational std_norm(const QuaternionAlgebra& alg, const StdCoords& x);

// Table-driven presentations for q in {2, 3, 5, 11}, certified on construction.
std::pair<QuaternionAlgebra, MaximalOrder> build_algebra_and_order(std::int64_t q);

// Elements of the order with reduced norm n, sorted lexicographically.
std::vector<Quaternion> enumerate_norm(const MaximalOrder& order, std::int64_t n, unsigned workers = 1);

// Index of Z[omega] inside order intersected with Q(omega); 1 means the embedding is optimal.
std::int64_t embedding_conductor(const MaximalOrder& order, const Quaternion& omega, std::int64_t disc);
Quaternion find_cm_embedding(const MaximalOrder& order, std::int64_t disc);

struct CMEmbeddingPair {
  Quaternion omega1, omega2;
  std::int64_t d1 = 0, d2 = 0;
  // Matrices (order basis) of left multiplication by omega1 and right multiplication by omega2.
  std::array<std::array<std::int64_t, 4>, 4> left{}, right{};
  // sqrt(D) acting as (2 omega1 - 1) gamma (2 omega2 - 1), and the integer matrix
  // trace_form * sqrt_d so that x(gamma) = gamma^T xform gamma / 2.
  std::array<std::array<std::int64_t, 4>, 4> sqrt_d{}, xform{};
};

CMEmbeddingPair make_embedding_pair(const MaximalOrder& order, const Quaternion& omega1, std::int64_t d1,
                                    const Quaternion& omega2, std::int64_t d2);
CMEmbeddingPair find_embedding_pair(const MaximalOrder& order, std::int64_t d1, std::int64_t d2);
Quaternion sqrt_d_action(const MaximalOrder& order, const CMEmbeddingPair& emb, const Quaternion& g);

// det_F(gamma) = (Nm gamma + (x/D) sqrt D)/2 for an order element, returned as (x, Nm gamma):
// the same (x, t) pair that encodes nu = (x + t sqrt D)/(2 sqrt D).
std::pair<std::int64_t, std::int64_t> det_f_xt(const MaximalOrder& order, const CMEmbeddingPair& emb,
                                               const std::array<std::int64_t, 4>& gamma);
// det_F and its conjugate det_F'.
std::pair<FElement, FElement> det_f_pair(const MaximalOrder& order, const CMEmbeddingPair& emb, const Quaternion& g);

struct ReflexLabels {
  std::int64_t q1_label = 0;
  std::int64_t q2_label = 0;
  std::int64_t votes = 0;
};

// Support census of det_F values over all elements of norm <= bound.
ReflexLabels reflex_ideal(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s, std::int64_t bound = 16);

int class_number(std::int64_t disc);

struct ThetaLevel {
  int level = 0;
  std::int64_t norm = 0;
  std::size_t elements = 0;
  PAdic value;  // product of det_F(b)/det_F'(b) at p1 over elements of this norm
  PAdic log;
};

enum class Parity { Even, Odd };

// Levels n = 0..n_max over norms p^(2n) (even) or p^(2n+1) (odd).
std::vector<ThetaLevel> theta_truncated(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s,
                                        const LocalEmbedding& local, int n_max, Parity parity, unsigned workers = 1);

// #{b : Nm b = t, det_F(b) = nu} keyed by the x-coordinate of nu.
std::map<std::int64_t, std::int64_t> det_f_census(const MaximalOrder& order, const CMEmbeddingPair& emb,
                                                  std::int64_t t, unsigned workers = 1);

struct BijectionMismatch {
  std::int64_t x = 0, t = 0, count = 0, expected = 0;
};

struct BijectionReport {
  std::int64_t nus_checked = 0;
  std::int64_t elements_counted = 0;
  std::vector<BijectionMismatch> mismatches;  // first few only
  std::int64_t mismatch_count = 0;
  bool ok() const { return mismatch_count == 0; }
};

// Compares representation counts with (w1 w2 / 2) rho(nu q1^-1 D_F) for every nu of trace <= max_trace.
BijectionReport check_bijection(const MaximalOrder& order, const CMEmbeddingPair& emb, const Setup& s,
                                std::int64_t max_trace, unsigned workers = 1);

}  // namespace cmfact
