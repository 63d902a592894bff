#include <gtest/gtest.h>

#include "bdm/gamma.hpp"
#include "oracles.hpp"

using namespace bdm;

TEST(Epsilon, Values) {
  EXPECT_EQ(epsilon(DrainSign::Negative, 1, 1, 1), 1);
  EXPECT_EQ(epsilon(DrainSign::Positive, 1, 1, 1), 0);
  for (std::int64_t M = 1; M <= 5; ++M)
    for (std::int64_t h = 1; h <= M; ++h)
      for (std::int64_t delta = -M; delta <= M + 1; ++delta)
        EXPECT_EQ(epsilon(DrainSign::Zero, delta, h, M),
                  std::min(epsilon(DrainSign::Positive, delta, h, M), epsilon(DrainSign::Negative, delta, h, M)));
  EXPECT_THROW(epsilon(DrainSign::Zero, 0, 0, 2), ParameterError);
}

TEST(GammaClosed, WorkedValues) {
  EXPECT_EQ(gamma_closed({2, 1, 1, 2, 0}), Rational(1, 2));
  EXPECT_EQ(gamma_closed({2, 1, 1, 2, -1}), Rational(1, 4));
  EXPECT_EQ(gamma_closed({2, 1, 1, 2, 1}), Rational(1, 8));
}

TEST(GammaClosed, MatchesIndependentStationarySums) {
  // Stationary drain masses from a separate search, compared within the
  // geometric remainder of a one-stream cutoff of 30.
  for (std::int64_t M = 1; M <= 2; ++M)
    for (std::int64_t T = 0; T <= M; ++T)
      for (std::int64_t t = 1; t <= M + 1; ++t)
        for (std::int64_t d = -2; d <= 2; ++d) {
          const Rational ref = oracle::stationary_drain_mass(M, 2, T, t, d, 26);
          const Rational closed = gamma_closed({2, M, T, t, d});
          EXPECT_GE(closed, ref);
          EXPECT_LT(to_double(closed - ref), 1e-5) << "M=" << M << " T=" << T << " t=" << t << " d=" << d;
        }
}

TEST(GammaClosed, RearrangedFormIsIdentical) {
  for (std::int64_t M = 1; M <= 5; ++M)
    for (std::int64_t q : {2, 3, 5})
      for (std::int64_t T = 0; T <= M; ++T)
        for (std::int64_t t = 1; t <= M + 1; ++t)
          for (std::int64_t d = -3; d <= 3; ++d) {
            const GammaQuery g{q, M, T, t, d};
            EXPECT_EQ(gamma_closed(g), gamma_closed_rearranged(g));
          }
}

TEST(GammaClosed, NormalizationAndAntisymmetry) {
  for (std::int64_t M = 1; M <= 4; ++M)
    for (std::int64_t q : {2, 3, 5})
      for (std::int64_t T = 0; T <= M; ++T) {
        for (std::int64_t t = 1; t <= M + 1; ++t) EXPECT_EQ(gamma_normalization(q, M, T, t), 1);
        for (std::int64_t d = -4; d <= 4; ++d)
          EXPECT_EQ(gamma_closed({q, M, T, M + 1, d}), gamma_closed({q, M, M - T, M + 1, -d}));
      }
}

TEST(GammaClosed, DependsOnDrainThroughSizeAndSign) {
  // Ratio between consecutive |d| of one sign is a fixed mixture of
  // q^(-h(M+1)), so with one stream it is exactly q^-2.
  for (std::int64_t d = 1; d < 6; ++d) {
    EXPECT_EQ(gamma_closed({3, 1, 0, 2, d + 1}) / gamma_closed({3, 1, 0, 2, d}), Rational(1, 9));
    EXPECT_EQ(gamma_closed({3, 1, 0, 2, -d - 1}) / gamma_closed({3, 1, 0, 2, -d}), Rational(1, 9));
  }
}

TEST(GammaEnumerated, EnclosesClosedForm) {
  const Census c(2, 24);
  for (std::int64_t T = 0; T <= 2; ++T)
    for (std::int64_t t = 1; t <= 3; ++t) {
      Rational total(0);
      for (std::int64_t d = -3; d <= 3; ++d) {
        const GammaQuery g{2, 2, T, t, d};
        const auto e = gamma_enumerated(g, c.slot(T, t));
        const Rational closed = gamma_closed(g);
        EXPECT_LE(e.lower, closed);
        EXPECT_LE(closed, e.lower + e.tail_bound);
        total += e.lower;
      }
      EXPECT_LE(total, 1);
    }
  const auto one = gamma_enumerated({2, 1, 1, 2, 0}, 5);
  EXPECT_EQ(one.lower, Rational(1, 2));
  EXPECT_THROW(gamma_enumerated({2, 2, 0, 1, 0}, c.slot(1, 1)), ParameterError);
}

TEST(MeanDeviation, Antisymmetric) {
  for (std::int64_t M = 1; M <= 3; ++M) {
    const Census c(static_cast<std::size_t>(M), 16);
    Rational avg(0);
    for (std::int64_t T = 0; T <= M; ++T) {
      const auto a = mean_deviation(2, c, T), b = mean_deviation(2, c, M - T);
      EXPECT_EQ(a.value + b.value, 0);
      avg += a.value;
    }
    EXPECT_EQ(avg, 0);
  }
  const auto mid = mean_deviation(2, 2, 1, 20);
  EXPECT_LE(abs(mid.value), mid.error_bound);
}

TEST(Theta, WorkedQueries) {
  const Census c(1, 20);
  auto r = theta_lower_check({2, 1, 1, 2, -1}, c.slot(1, 2));
  EXPECT_TRUE(r.lower_bound_holds);
  EXPECT_EQ(r.lower, Rational(1, 4));
  EXPECT_EQ(r.bound, Rational(1, 8));
  EXPECT_TRUE(r.witness_class_matches);
  r = theta_lower_check({2, 1, 1, 2, 0}, c.slot(1, 2));
  EXPECT_TRUE(r.ok());
}
