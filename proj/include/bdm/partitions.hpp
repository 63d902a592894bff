#pragma once

// Partitions into at most M parts and their generating function at 1/q.

#include <cstdint>
#include <limits>
#include <vector>

#include "bdm/errors.hpp"
#include "bdm/rational.hpp"

namespace bdm {

/// P_m(K) for 1 <= m <= M and 0 <= K <= horizon.
class PartitionTable {
 public:
  PartitionTable(std::int64_t M, std::int64_t horizon) : M_(M), horizon_(horizon) {
    if (M < 1) throw ParameterError("M must be at least 1");
    if (horizon < 0) throw ParameterError("horizon must be nonnegative");
    const auto W = static_cast<std::size_t>(horizon + 1);
    rows_.assign(static_cast<std::size_t>(M + 1), std::vector<std::uint64_t>(W, 0));
    rows_[0][0] = 1;  // only the empty partition has no parts
    for (std::int64_t m = 1; m <= M; ++m) {
      auto& row = rows_[static_cast<std::size_t>(m)];
      const auto& prev = rows_[static_cast<std::size_t>(m - 1)];
      for (std::int64_t K = 0; K <= horizon; ++K) {
        std::uint64_t v = prev[static_cast<std::size_t>(K)];
        if (K >= m) {
          const std::uint64_t add = row[static_cast<std::size_t>(K - m)];
          if (v > std::numeric_limits<std::uint64_t>::max() - add) throw ParameterError("partition count overflow");
          v += add;
        }
        row[static_cast<std::size_t>(K)] = v;
      }
    }
  }

  std::int64_t M() const noexcept { return M_; }
  std::int64_t horizon() const noexcept { return horizon_; }

  std::uint64_t operator()(std::int64_t K) const { return at(M_, K); }

  std::uint64_t at(std::int64_t m, std::int64_t K) const {
    if (K < 0) return 0;
    if (m < 0 || m > M_ || K > horizon_) throw ParameterError("partition table lookup outside its range");
    return rows_[static_cast<std::size_t>(m)][static_cast<std::size_t>(K)];
  }

 private:
  std::int64_t M_;
  std::int64_t horizon_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

/// Partitions of K into at most M parts; P_M(0) = 1.
inline std::uint64_t partition_count(std::int64_t M, std::int64_t K) {
  if (K < 0) return 0;
  return PartitionTable(M, K)(K);
}

/// prod_{m=1..M} q^m / (q^m - 1).
inline Rational partition_gf(std::int64_t M, std::int64_t q) {
  if (M < 1) throw ParameterError("M must be at least 1");
  if (q < 2) throw ParameterError("q must be at least 2");
  Rational r(1);
  for (std::int64_t m = 1; m <= M; ++m) {
    const Integer qm = ipow(q, m);
    r *= Rational(qm, qm - 1);
  }
  r.canonicalize();
  return r;
}

struct TruncatedSum {
  Rational partial;     ///< sum over K <= K_max
  Rational tail_bound;  ///< certified upper bound on the rest
};

namespace detail {

inline Integer binomial(std::int64_t n, std::int64_t k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Ratio bound for consecutive terms C(K+M-1,M-1) q^-K beyond K = N, i.e.
// ((N+M)/N)^(M-1) / q. Throws when it does not certify convergence.
inline Rational ratio_bound(std::int64_t M, std::int64_t q, std::int64_t N) {
  if (M >= 2 && N == 0) throw ParameterError("K_max = 0 gives no tail ratio bound; use K_max >= 1");
  Rational base = M >= 2 ? Rational(Integer(N + M), Integer(N)) : Rational(1);
  Rational r(1);
  for (std::int64_t i = 0; i < M - 1; ++i) r *= base;
  r /= q;
  r.canonicalize();
  if (r >= 1) throw ParameterError("tail ratio bound r >= 1; increase K_max");
  return r;
}

}  // namespace detail

/// Partial sum of P_M(K) q^-K up to K_max, with a tail bound made of the
/// exact terms up to 4 K_max plus a geometric majorant for the rest.
inline TruncatedSum partition_gf_truncated(std::int64_t M, std::int64_t q, std::int64_t K_max) {
  if (M < 1) throw ParameterError("M must be at least 1");
  if (q < 2) throw ParameterError("q must be at least 2");
  if (K_max < 0) throw ParameterError("K_max must be nonnegative");
  const std::int64_t N = 4 * K_max;
  const Rational r = detail::ratio_bound(M, q, N);
  const PartitionTable P(M, N);

  TruncatedSum out{Rational(0), Rational(0)};
  for (std::int64_t K = 0; K <= N; ++K) {
    Rational term(Integer(static_cast<unsigned long>(P(K))), ipow(q, K));
    (K <= K_max ? out.partial : out.tail_bound) += term;
  }
  // P_M(K) <= C(K+M-1, M-1); the first omitted majorant term is K = N+1.
  Rational first(detail::binomial(N + M, M - 1), ipow(q, N + 1));
  out.tail_bound += first / (1 - r);
  out.partial.canonicalize();
  out.tail_bound.canonicalize();
  return out;
}

/// Upper bound on sum_{K > K_max} P_M(K) q^-K (K + 2M + 1) / (M + 1), the
/// tail weight needed to bound drain moments when |d| <= (K+2M+1)/(M+1).
inline Rational weighted_tail_bound(std::int64_t M, std::int64_t q, std::int64_t K_max) {
  if (K_max < 0) throw ParameterError("K_max must be nonnegative");
  const std::int64_t N = 4 * K_max;
  const std::int64_t c = 2 * M + 1;
  Rational r = detail::ratio_bound(M, q, N) * Rational(Integer(N + c + 2), Integer(N + c + 1));
  r.canonicalize();
  if (r >= 1) throw ParameterError("weighted tail ratio bound r >= 1; increase K_max");
  const PartitionTable P(M, N);
  Rational sum(0);
  for (std::int64_t K = K_max + 1; K <= N; ++K)
    sum += Rational(Integer(static_cast<unsigned long>(P(K))) * (K + c), ipow(q, K));
  sum += Rational(detail::binomial(N + M, M - 1) * (N + 1 + c), ipow(q, N + 1)) / (1 - r);
  sum /= (M + 1);
  sum.canonicalize();
  return sum;
}

/// K^(M-1) / (M! (M-1)!), the leading-order growth of P_M(K).
inline Rational partition_asymptotic(std::int64_t M, std::int64_t K) {
  if (M < 1 || K < 1) throw ParameterError("partition_asymptotic needs M >= 1 and K >= 1");
  Integer num = 1, den = 1;
  for (std::int64_t i = 0; i < M - 1; ++i) num *= K;
  for (std::int64_t i = 2; i <= M; ++i) den *= i;
  for (std::int64_t i = 2; i <= M - 1; ++i) den *= i;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace bdm
