#include "cmfact/eisenstein.hpp"

#include "cmfact/parallel.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cmfact {

namespace {

PAdic padic_zero(const LocalEmbedding& local) { return PAdic::zero(local.prime(), local.precision()); }

bool same_value(const PAdic& a, const PAdic& b) {
  return a.agreement(b) >= std::min(a.precision(), b.precision());
}

FIdeal j_full(const Setup& s, const NuElement& nu) {
  FIdeal I = element_ideal(s, nu.x, nu.t);
  FIdeal q1 = FIdeal::of(s.q1());
  if (!q1.divides(I)) throw std::invalid_argument("nu does not lie in the q1 class");
  return I.quotient(q1);
}

std::uint64_t rho_after(const FIdeal& j, const FIdeal& d) { return d.divides(j) ? rho(j.quotient(d)) : 0; }

}  // namespace

std::vector<NuElement> enumerate_nu(const Setup& s, std::int64_t t, ClassSpec spec, unsigned workers) {
  if (t < 1) throw std::invalid_argument("enumerate_nu: trace must be positive");
  __int128 dt2 = static_cast<__int128>(s.d) * t * t;
  if (dt2 > (static_cast<__int128>(1) << 62)) throw std::overflow_error("enumerate_nu: trace beyond desk scale");
  std::int64_t xmax = isqrt(static_cast<std::int64_t>(dt2));
  if (static_cast<__int128>(xmax) * xmax == dt2) --xmax;
  const FPrime p1 = s.p1(), p2 = s.p2(), q1 = s.q1();
  using Batch = std::vector<NuElement>;
  auto chunk = [&](std::int64_t lo, std::int64_t hi) {
    Batch out;
    for (std::int64_t x = lo; x < hi; ++x) {
      if (mod(x - t * s.d, 2) != 0) continue;
      NuElement nu;
      nu.x = x;
      nu.t = t;
      nu.norm = element_norm(s, x, t);
      if (spec == ClassSpec::Q1Only) {
        if (nu.norm % s.q != 0 || element_valuation(s, x, t, q1) == 0) continue;
      } else {
        auto cls = classify_x(s, x, t);
        if (!cls.ideal) continue;
        nu.a_label = cls.ideal;
      }
      nu.v_p1 = element_valuation(s, x, t, p1);
      nu.v_p2 = element_valuation(s, x, t, p2);
      out.push_back(nu);
    }
    return out;
  };
  auto merge = [](Batch a, Batch b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  return parallel_reduce<Batch>(-xmax, xmax + 1, workers, Batch{}, chunk, merge);
}

std::uint64_t eisenstein_coeff(const Setup& s, const NuElement& nu) { return rho(element_ideal(s, nu.x, nu.t)); }

FElement local_uniformiser(const Setup& s, int p_index) {
  if (p_index != 1 && p_index != 2) throw std::invalid_argument("local_uniformiser: p_index must be 1 or 2");
  const FPrime target = p_index == 1 ? s.p1() : s.p2();
  const FPrime other = p_index == 1 ? s.p2() : s.p1();
  for (std::int64_t t = 1; t < 64; ++t) {
    std::int64_t xmax = isqrt(s.d * t * t - 1);
    for (std::int64_t x = -xmax; x <= xmax; ++x) {
      if (mod(x - t * s.d, 2) != 0) continue;
      if (element_valuation(s, x, t, target) == 1 && element_valuation(s, x, t, other) == 0) {
        return FElement::from_xt(s.d, x, t);
      }
    }
  }
  throw std::logic_error("local_uniformiser: search exhausted");
}

DualPAdic hecke_image(const Setup& s, const LocalEmbedding& local, const HeckeOp& op) {
  const auto p = local.prime();
  const int K = local.precision();
  if (op.power < 0) throw std::invalid_argument("hecke_image: negative power");
  const PAdic one = PAdic::from_integer(1, p, K);
  const PAdic zero = PAdic::zero(p, K);
  const Integer n = op.power;
  if (op.kind == HeckeOp::Kind::T) {
    if (op.prime.ell == p) throw std::invalid_argument("hecke_image: T is only defined away from p; use U");
    if (op.prime.chi == 1) return {one * Integer(n + 1), zero};
    if (op.power % 2 == 0) return {one, zero};
    Integer nm = ipow(Integer(op.prime.ell), static_cast<unsigned>(op.prime.degree()));
    return {zero, iwasawa_log(PAdic::from_integer(nm, p, K)) * Integer(n + 1)};
  }
  if (op.p_index != 1 && op.p_index != 2) throw std::invalid_argument("hecke_image: U needs p_index 1 or 2");
  FElement pi = op.uniformiser ? *op.uniformiser : local_uniformiser(s, op.p_index);
  auto which = op.p_index == 1 ? PrimeAboveP::P1 : PrimeAboveP::P2;
  PAdic image = local.embed(pi, which);
  if (image.valuation() != 1) throw std::invalid_argument("hecke_image: U needs a uniformiser (valuation one)");
  PAdic lg = iwasawa_log(image);
  if (op.p_index == 1) {
    int sign = op.power % 2 ? -1 : 1;
    return {one * Integer(sign), lg * Integer(-sign * n)};
  }
  return {one, lg * n};
}

PrimePowerValue curly_f(const Setup& s, const FIdeal& j) {
  if (j.without_primes_above(static_cast<std::uint64_t>(s.p)) != j) {
    throw std::invalid_argument("curly_f: the ideal must be prime to p");
  }
  const FIdeal::Entry* special = nullptr;
  for (const auto& e : j.entries()) {
    if (e.first.chi == -1 && e.second % 2) {
      if (special) return {};
      special = &e;
    }
  }
  if (!special) return {};
  const auto& [pr, n] = *special;
  std::uint64_t weight = rho(j.quotient(FIdeal::of(pr, n)));
  // Nm(l)^((n+1) rho(J/l^n)) with Nm(l) = ell^degree.
  return PrimePowerValue::make(pr.ell, 2 * pr.degree() * (n + 1) * static_cast<std::int64_t>(weight));
}

PAdic log_prime_power(const PrimePowerValue& v, std::uint64_t p, int precision) {
  if (v.is_one()) return PAdic::zero(p, precision);
  PAdic lg = iwasawa_log(PAdic::from_integer(v.base, p, precision + 1)) * Integer(v.twice_exponent);
  return (lg / PAdic::from_integer(2, p, precision + 1)).with_precision(precision);
}

PAdic log_nu_ratio(const LocalEmbedding& local, const NuElement& nu, std::int64_t d) {
  FElement f = nu.as_f_element(d);
  return iwasawa_log(local.embed(f, PrimeAboveP::P1)) - iwasawa_log(local.embed(f, PrimeAboveP::P2));
}

DualPAdic a_nu(const Setup& s, const LocalEmbedding& local, const NuElement& nu) {
  FIdeal J = j_full(s, nu);
  FIdeal Jt = J.without_primes_above(static_cast<std::uint64_t>(s.p));
  Integer r = rho(Jt);
  Integer sign = nu.v_p1 % 2 ? -1 : 1;
  PAdic eps = log_prime_power(curly_f(s, Jt), local.prime(), local.precision());
  if (r != 0) eps = eps - log_nu_ratio(local, nu, s.d) * r;
  return {PAdic::from_integer(sign * r, local.prime(), local.precision()), eps * sign};
}

PAdic derivative_coeff(const Setup& s, const LocalEmbedding& local, std::int64_t n, unsigned workers) {
  return trace_sums(s, local, n, workers).derivative();
}

std::int64_t stabilized_rho(const Setup& s, const NuElement& nu) {
  FIdeal J = j_full(s, nu);
  FIdeal P1 = FIdeal::of(s.p1()), P2 = FIdeal::of(s.p2());
  auto r = [&](const FIdeal& d) { return static_cast<std::int64_t>(rho_after(J, d)); };
  return r(FIdeal()) - r(P1) + r(P2) - r(P1 * P2);
}

TraceSums trace_sums(const Setup& s, const LocalEmbedding& local, std::int64_t t, unsigned workers) {
  auto nus = enumerate_nu(s, t, ClassSpec::Q1Only, workers);
  const auto p = static_cast<std::uint64_t>(s.p);
  TraceSums init;
  init.t = t;
  init.theta = init.a_direct = init.b = padic_zero(local);
  auto chunk = [&](std::int64_t lo, std::int64_t hi) {
    TraceSums acc;
    acc.t = t;
    acc.theta = acc.a_direct = acc.b = padic_zero(local);
    for (auto i = lo; i < hi; ++i) {
      const auto& nu = nus[static_cast<std::size_t>(i)];
      ++acc.nus;
      FIdeal J = j_full(s, nu);
      FIdeal Jt = J.without_primes_above(p);
      Integer rj = rho(J), rt = rho(Jt);
      Integer sign = nu.v_p1 % 2 ? -1 : 1;
      if (rj != 0 || rt != 0) {
        PAdic lr = log_nu_ratio(local, nu, s.d);
        if (rj != 0) acc.theta = acc.theta + lr * rj;
        if (rt != 0) acc.a_direct = acc.a_direct + lr * (sign * rt);
      }
      auto f = curly_f(s, Jt);
      if (!f.is_one()) acc.b = acc.b + log_prime_power(f, p, local.precision()) * sign;
      acc.rho_valuation += static_cast<std::int64_t>(rj) * (nu.v_p1 - nu.v_p2);
    }
    return acc;
  };
  auto merge = [](TraceSums a, const TraceSums& b) {
    a.nus += b.nus;
    a.theta = a.theta + b.theta;
    a.a_direct = a.a_direct + b.a_direct;
    a.b = a.b + b.b;
    a.rho_valuation += b.rho_valuation;
    return a;
  };
  return parallel_reduce<TraceSums>(0, static_cast<std::int64_t>(nus.size()), workers, init, chunk, merge);
}

PAdic b_trace_one(const Setup& s, int precision, unsigned workers) {
  const auto p = static_cast<std::uint64_t>(s.p);
  PAdic b = PAdic::zero(p, precision);
  for (const auto& nu : enumerate_nu(s, 1, ClassSpec::Q1Only, workers)) {
    if (valuation(nu.norm, p) % 2 == 0) continue;
    FIdeal Jt = j_full(s, nu).without_primes_above(p);
    PAdic lf = log_prime_power(curly_f(s, Jt), p, precision);
    b = nu.v_p1 % 2 ? b - lf : b + lf;
  }
  return b;
}

std::string SumReport::to_string() const {
  std::ostringstream os;
  os << "partials:";
  for (const auto& v : partial_values) os << " " << v.to_string();
  os << "; stabilized " << stabilized_precision << "; final " << final_value.to_string();
  return os.str();
}

SumReport make_sum_report(std::vector<PAdic> partials) {
  SumReport r;
  r.partial_values = std::move(partials);
  if (r.partial_values.empty()) return r;
  r.final_value = r.partial_values.back();
  if (r.partial_values.size() < 2) return r;
  std::size_t first = r.partial_values.size() >= 3 ? r.partial_values.size() - 3 : 0;
  int k = r.final_value.precision();
  for (std::size_t i = first; i + 1 < r.partial_values.size(); ++i) {
    k = std::min(k, r.partial_values[i].agreement(r.final_value));
  }
  r.stabilized_precision = k;
  return r;
}

ThetaSums theta_lhs(const Setup& s, const LocalEmbedding& local, int n_max, unsigned workers) {
  if (n_max < 1) throw std::invalid_argument("theta_lhs: nMax must be at least 1");
  auto p = static_cast<std::uint64_t>(s.p);
  ThetaSums out;
  std::vector<PAdic> even, odd;
  for (int n = 0; n <= n_max; ++n) {
    out.even.push_back(trace_sums(s, local, static_cast<std::int64_t>(ipow_u64(p, 2 * n)), workers));
    even.push_back(out.even.back().theta);
    if (n < n_max) {
      out.odd.push_back(trace_sums(s, local, static_cast<std::int64_t>(ipow_u64(p, 2 * n + 1)), workers));
      odd.push_back(out.odd.back().theta);
    }
  }
  out.theta = make_sum_report(std::move(even));
  out.theta_p = make_sum_report(std::move(odd));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "fail";
}

IdentityReport identity_check(const Setup& s, int n_max, int precision, unsigned workers) {
  const auto p = static_cast<std::uint64_t>(s.p);
  LocalEmbedding local(s.d, p, s.root_p, precision);
  IdentityReport rep;
  ThetaSums th = theta_lhs(s, local, n_max, workers);

  std::vector<PAdic> a_parts;
  rep.a_direct_agrees = true;
  for (int n = 1; n <= n_max; ++n) {
    a_parts.push_back(th.even[static_cast<std::size_t>(n)].theta - th.odd[static_cast<std::size_t>(n - 1)].theta);
    rep.a_direct.push_back(th.even[static_cast<std::size_t>(n)].a_direct);
    if (!same_value(a_parts.back(), rep.a_direct.back())) rep.a_direct_agrees = false;
  }
  rep.a = make_sum_report(std::move(a_parts));

  rep.b_direct = b_trace_one(s, precision, workers);
  rep.b_stable = true;
  for (const auto& lvl : th.even) {
    rep.b_levels.push_back(lvl.b);
    if (!same_value(lvl.b, rep.b_direct)) rep.b_stable = false;
  }

  rep.b_rhs = padic_zero(local);
  for (const auto& nu : enumerate_nu(s, 1, ClassSpec::PerA, workers)) {
    PAdic lf = log_prime_power(f_value(s, Rational(s.d - nu.x * nu.x, 4 * s.n)), p, precision);
    rep.b_rhs = nu.a_label->delta() > 0 ? rep.b_rhs + lf : rep.b_rhs - lf;
  }
  if (same_value(rep.b_direct, rep.b_rhs)) {
    rep.b_sign = 1;
  } else if (same_value(rep.b_direct, -rep.b_rhs)) {
    rep.b_sign = -1;
  }

  rep.a_plus_b = rep.a.final_value + rep.b_direct;
  int target = std::min(precision, rep.a.stabilized_precision);
  rep.congruence_precision = std::min(target, rep.a_plus_b.valuation());
  if (target < 4) {
    rep.congruence = Verdict::Inconclusive;
  } else {
    rep.congruence = rep.a_plus_b.valuation() >= target ? Verdict::Pass : Verdict::Fail;
  }

  rep.valuation_lhs = th.even[0].rho_valuation - th.odd[0].rho_valuation;
  rep.valuation_rhs = rhs_product(s, RhsMode::Shimura4N, workers).exponent_of(p);
  if (rep.valuation_lhs == rep.valuation_rhs) {
    rep.valuation_sign = 1;
  } else if (rep.valuation_lhs == -rep.valuation_rhs) {
    rep.valuation_sign = -1;
  }
  rep.valuation = rep.valuation_sign != 0 ? Verdict::Pass : Verdict::Fail;

  for (int k = 0; k <= 2 * n_max; ++k) {
    const auto& src = k % 2 ? th.odd[static_cast<std::size_t>(k / 2)] : th.even[static_cast<std::size_t>(k / 2)];
    rep.derivative.push_back(src.derivative());
  }
  const auto& d_odd = rep.derivative[static_cast<std::size_t>(2 * n_max - 1)];
  const auto& d_even = rep.derivative[static_cast<std::size_t>(2 * n_max - 2)];
  rep.alternating_precision = d_odd.agreement(-d_even);

  if (rep.congruence == Verdict::Fail || rep.valuation == Verdict::Fail || rep.b_sign == 0) {
    rep.overall = Verdict::Fail;
  } else if (rep.congruence == Verdict::Inconclusive) {
    rep.overall = Verdict::Inconclusive;
  } else {
    rep.overall = Verdict::Pass;
  }
  return rep;
}

}  // namespace cmfact
