#pragma once

// Asymptotic drain distribution gamma(d,T,t): closed alternating sum,
// census-based enclosure, mean deviation and the lower-bound check.

#include <cstdint>
#include <map>
#include <vector>

#include "bdm/errors.hpp"
#include "bdm/mass.hpp"
#include "bdm/partitions.hpp"
#include "bdm/rational.hpp"
#include "bdm/state.hpp"

namespace bdm {

struct GammaQuery {
  std::int64_t q = 2;
  std::int64_t M = 1;
  std::int64_t T = 0;
  std::int64_t t = 1;
  std::int64_t d = 0;

  std::int64_t delta() const noexcept { return t - T; }

  void validate() const {
    if (q < 2) throw ParameterError("q must be at least 2");
    if (M < 1) throw ParameterError("M must be at least 1");
    if (T < 0 || T > M) throw ParameterError("T must lie in [0, M]");
    if (t < 1 || t > M + 1) throw ParameterError("t must lie in [1, M+1]");
  }
};

enum class DrainSign { Negative, Zero, Positive };

inline DrainSign sign_of(std::int64_t d) {
  return d < 0 ? DrainSign::Negative : d > 0 ? DrainSign::Positive : DrainSign::Zero;
}

inline std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

/// Exponent of q in the h-th term. Fitted to exact census sums; see the
/// README for why these differ from the commonly quoted form.
inline std::int64_t epsilon(DrainSign sign, std::int64_t delta, std::int64_t h, std::int64_t M) {
  if (h < 1 || h > M) throw ParameterError("h must lie in [1, M]");
  const std::int64_t plus = h * delta + choose2(h) + choose2(M) - 1;
  const std::int64_t minus = -h * delta + h * (M + 2) + choose2(h) + choose2(M) - 1;
  switch (sign) {
    case DrainSign::Negative: return minus;
    case DrainSign::Positive: return plus;
    case DrainSign::Zero: return std::min(plus, minus);
  }
  return 0;
}

namespace detail {

inline Integer prod_qk_minus_one(std::int64_t q, std::int64_t lo, std::int64_t hi) {
  Integer r = 1;
  for (std::int64_t k = lo; k <= hi; ++k) r *= ipow(q, k) - 1;
  return r;
}

inline Integer geometric_block(std::int64_t q, std::int64_t M, std::int64_t h) {
  Integer s = 0;
  for (std::int64_t k = 0; k < h; ++k) s += ipow(q, (M + 1) * k);
  return s;
}

// Coefficient of the h-th term without the drain-dependent factors
// q^(eps) q^(-h(M+1)|d|), including the 1/P normalisation.
inline Rational gamma_coefficient(std::int64_t q, std::int64_t M, std::int64_t h) {
  Rational c(geometric_block(q, M, h),
             ipow(q, (M + 1) * (h - 1)) * prod_qk_minus_one(q, 1, M - h) * prod_qk_minus_one(q, M + 2, M + h));
  if ((h + 1) % 2) c = -c;
  c /= partition_gf(M, q);
  c.canonicalize();
  return c;
}

}  // namespace detail

/// gamma(d,T,t) as an alternating sum over h = 1..M normalised by 1/P(M,q).
inline Rational gamma_closed(const GammaQuery& g) {
  g.validate();
  const std::int64_t ad = g.d < 0 ? -g.d : g.d;
  Rational sum(0);
  for (std::int64_t h = 1; h <= g.M; ++h)
    sum += detail::gamma_coefficient(g.q, g.M, h) * qpow(g.q, epsilon(sign_of(g.d), g.delta(), h, g.M)) *
           qpow(g.q, -h * (g.M + 1) * ad);
  sum.canonicalize();
  return sum;
}

/// The same value with 1/P(M,q) folded into each term: the factor
/// prod (q^k-1) over k = M-h+1..M moves into the numerator and a single
/// q^(M(M+1)/2) joins the denominator. M(M+1)/2 is always an integer.
inline Rational gamma_closed_rearranged(const GammaQuery& g) {
  g.validate();
  const std::int64_t M = g.M, q = g.q;
  const std::int64_t ad = g.d < 0 ? -g.d : g.d;
  Rational sum(0);
  for (std::int64_t h = 1; h <= M; ++h) {
    Rational term(detail::geometric_block(q, M, h) * detail::prod_qk_minus_one(q, M - h + 1, M),
                  ipow(q, (M + 1) * (h - 1)) * detail::prod_qk_minus_one(q, M + 2, M + h));
    term *= qpow(q, epsilon(sign_of(g.d), g.delta(), h, M) - h * (M + 1) * ad);
    sum += (h % 2) ? term : Rational(-term);
  }
  sum /= ipow(q, M * (M + 1) / 2);
  sum.canonicalize();
  return sum;
}

/// Exact sum of gamma_closed over all integers d, using
/// sum_{|d|>=1} x^|d| per sign with x = q^(-h(M+1)).
inline Rational gamma_normalization(std::int64_t q, std::int64_t M, std::int64_t T, std::int64_t t) {
  GammaQuery{q, M, T, t, 0}.validate();
  const std::int64_t delta = t - T;
  Rational total(0);
  for (std::int64_t h = 1; h <= M; ++h) {
    const Rational geo(Integer(1), ipow(q, h * (M + 1)) - 1);
    const Rational inner = qpow(q, epsilon(DrainSign::Zero, delta, h, M)) +
                           (qpow(q, epsilon(DrainSign::Positive, delta, h, M)) +
                            qpow(q, epsilon(DrainSign::Negative, delta, h, M))) *
                               geo;
    total += detail::gamma_coefficient(q, M, h) * inner;
  }
  total.canonicalize();
  return total;
}

struct Enclosure {
  Rational lower;       ///< exact sum over the census
  Rational tail_bound;  ///< the true value is at most lower + tail_bound
};

/// Stationary mass of the census states of slot (T,t) with drain d, and the
/// truncation bound shared by all queries at this cutoff.
inline Enclosure gamma_enumerated(const GammaQuery& g, const StateCensus& sc) {
  g.validate();
  if (sc.T != g.T || sc.t != g.t || static_cast<std::int64_t>(sc.M) != g.M)
    throw ParameterError("census slot does not match the query");
  const Rational P = partition_gf(g.M, g.q);
  Rational lower(0);
  for (std::size_t K = 0; K < sc.by_class.size(); ++K) {
    std::int64_t hits = 0;
    for (const auto& s : sc.by_class[K])
      if (s.d == g.d) ++hits;
    if (hits) lower += Rational(Integer(static_cast<long>(hits)), ipow(g.q, static_cast<std::int64_t>(K)));
  }
  lower /= P;
  lower.canonicalize();
  Rational tail = partition_gf_truncated(g.M, g.q, sc.K_max).tail_bound / P;
  tail.canonicalize();
  return {lower, tail};
}

inline Enclosure gamma_enumerated(const GammaQuery& g, std::int64_t K_max) {
  Census census(static_cast<std::size_t>(g.M), K_max);
  return gamma_enumerated(g, census.slot(g.T, g.t));
}

struct MeanDeviation {
  Rational value;        ///< truncated sum of mu_inf(s) d(s) over slot (T, M+1)
  Rational error_bound;  ///< bound on the omitted part
};

/// Drain mean at slot (T, M+1). On the omitted states |d| <= (K+2M+1)/(M+1),
/// since every class-K state satisfies K >= |d|(M+1) - (2M+1).
inline MeanDeviation mean_deviation(std::int64_t q, const Census& census, std::int64_t T) {
  const auto M = static_cast<std::int64_t>(census.M());
  GammaQuery{q, M, T, M + 1, 0}.validate();
  const StateCensus& sc = census.slot(T, M + 1);
  const Rational P = partition_gf(M, q);
  Rational sum(0);
  for (std::size_t K = 0; K < sc.by_class.size(); ++K) {
    std::int64_t dsum = 0;
    for (const auto& s : sc.by_class[K]) dsum += s.d;
    if (dsum) sum += Rational(Integer(static_cast<long>(dsum)), ipow(q, static_cast<std::int64_t>(K)));
  }
  sum /= P;
  sum.canonicalize();
  Rational err = weighted_tail_bound(M, q, census.K_max()) / P;
  err.canonicalize();
  return {sum, err};
}

inline MeanDeviation mean_deviation(std::int64_t q, std::int64_t M, std::int64_t T, std::int64_t K_max) {
  return mean_deviation(q, Census(static_cast<std::size_t>(M), K_max), T);
}

struct ThetaCheck {
  bool lower_bound_holds = false;  ///< enumerated lower sum >= q^(-|d|(M+1)) / P
  bool witness_class_matches = false;
  bool witness_within_bound = false;  ///< class_of(witness) <= |d|(M+1)
  Rational lower;
  Rational bound;
  BdmState witness;
  std::int64_t witness_claimed = 0;
  std::int64_t witness_actual = 0;

  bool ok() const noexcept { return lower_bound_holds && witness_class_matches && witness_within_bound; }
};

inline ThetaCheck theta_lower_check(const GammaQuery& g, const StateCensus& sc) {
  ThetaCheck c;
  const Enclosure e = gamma_enumerated(g, sc);
  const std::int64_t ad = g.d < 0 ? -g.d : g.d;
  c.lower = e.lower;
  c.bound = qpow(g.q, -ad * (g.M + 1)) / partition_gf(g.M, g.q);
  c.bound.canonicalize();
  c.lower_bound_holds = e.lower >= c.bound;
  const Witness w = witness_state(static_cast<std::size_t>(g.M), g.T, g.t, g.d);
  c.witness = w.state;
  c.witness_claimed = w.claimed_class;
  c.witness_actual = class_of(w.state);
  c.witness_class_matches = c.witness_claimed == c.witness_actual;
  c.witness_within_bound = c.witness_actual <= ad * (g.M + 1);
  return c;
}

}  // namespace bdm
