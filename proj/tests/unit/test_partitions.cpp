#include <gtest/gtest.h>

#include "bdm/partitions.hpp"
#include "oracles.hpp"

using namespace bdm;

TEST(Partitions, SmallValues) {
  for (std::int64_t K = 0; K < 20; ++K) EXPECT_EQ(partition_count(1, K), 1u);
  EXPECT_EQ(partition_count(2, 4), 3u);
  for (std::int64_t M = 1; M < 6; ++M) {
    EXPECT_EQ(partition_count(M, 0), 1u);
    EXPECT_EQ(partition_count(M, 1), 1u);
  }
  EXPECT_EQ(partition_count(3, -1), 0u);
}

TEST(Partitions, RecursionMatchesBruteForce) {
  for (std::int64_t M = 1; M <= 4; ++M) {
    const PartitionTable P(M, 30);
    for (std::int64_t K = 0; K <= (M <= 2 ? 30 : 18); ++K)
      EXPECT_EQ(P(K), oracle::brute_partitions(K, M).size()) << "M=" << M << " K=" << K;
  }
}

TEST(Partitions, TableRecursion) {
  const PartitionTable P(5, 40);
  for (std::int64_t m = 2; m <= 5; ++m)
    for (std::int64_t K = 0; K <= 40; ++K) EXPECT_EQ(P.at(m, K), P.at(m, K - m) + P.at(m - 1, K));
}

TEST(GeneratingFunction, Values) {
  EXPECT_EQ(partition_gf(1, 2), 2);
  EXPECT_EQ(partition_gf(2, 2), Rational(8, 3));
  for (std::int64_t M = 1; M <= 5; ++M)
    for (std::int64_t q : {2, 3, 5}) EXPECT_GT(partition_gf(M, q), 1);
}

TEST(GeneratingFunction, TruncationEnclosesTheProduct) {
  const auto t = partition_gf_truncated(1, 2, 10);
  EXPECT_EQ(t.partial, Rational(2) - qpow(2, -10));
  for (std::int64_t M = 1; M <= 4; ++M)
    for (std::int64_t q : {2, 3})
      for (std::int64_t K : {5, 12, 25}) {
        const auto tr = partition_gf_truncated(M, q, K);
        const Rational full = partition_gf(M, q);
        EXPECT_LE(tr.partial, full);
        EXPECT_GE(tr.tail_bound, full - tr.partial) << "M=" << M << " q=" << q << " K=" << K;
      }
}

TEST(GeneratingFunction, PartialSumsIncrease) {
  Rational prev(0);
  for (std::int64_t K = 4; K <= 20; ++K) {
    const auto tr = partition_gf_truncated(3, 2, K);
    EXPECT_GT(tr.partial, prev);
    prev = tr.partial;
  }
}

TEST(GeneratingFunction, RatioBoundFailureIsReported) {
  EXPECT_THROW(partition_gf_truncated(2, 2, 0), ParameterError);
  EXPECT_THROW(partition_gf_truncated(3, 2, 1), ParameterError);
  EXPECT_NO_THROW(partition_gf_truncated(1, 2, 0));
}

TEST(GeneratingFunction, WeightedTailBound) {
  // Direct partial sums far past the cutoff never exceed the bound.
  for (std::int64_t M = 1; M <= 3; ++M) {
    const std::int64_t K_max = 8;
    const Rational bound = weighted_tail_bound(M, 2, K_max);
    const PartitionTable P(M, 200);
    Rational direct(0);
    for (std::int64_t K = K_max + 1; K <= 200; ++K)
      direct += Rational(Integer(static_cast<unsigned long>(P(K))) * (K + 2 * M + 1), ipow(2, K) * (M + 1));
    EXPECT_GE(bound, direct);
  }
}

TEST(Asymptotic, Values) {
  EXPECT_EQ(partition_asymptotic(1, 7), 1);
  EXPECT_EQ(partition_asymptotic(2, 100), 50);
  const double ratio = static_cast<double>(partition_count(3, 200)) / to_double(partition_asymptotic(3, 200));
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 2.0);
}
