#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bdm/field_oracle.hpp"
#include "oracles.hpp"

using namespace bdm;

namespace {

std::vector<oracle::Row> rows_of(const Multisequence& s, std::size_t n) {
  std::vector<oracle::Row> out;
  for (std::size_t m = 0; m < s.streams(); ++m) {
    auto st = s.stream(m);
    out.emplace_back(st.begin(), st.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

Multisequence random_seq(std::mt19937_64& gen, std::uint64_t q, std::size_t M, std::size_t n) {
  Multisequence s(FieldSpec(q), M, n);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t j = 0; j < n; ++j) s.set(m, j, static_cast<Symbol>(gen() % q));
  return s;
}

}  // namespace

TEST(FieldSpec, RejectsCompositeAndPrimePowers) {
  EXPECT_NO_THROW(FieldSpec(2));
  EXPECT_NO_THROW(FieldSpec(7));
  EXPECT_THROW(FieldSpec(4), NonPrimeFieldError);
  EXPECT_THROW(FieldSpec(9), NonPrimeFieldError);
  EXPECT_THROW(FieldSpec(6), ParameterError);
  EXPECT_THROW(FieldSpec(1), ParameterError);
}

TEST(FieldSpec, Inverse) {
  const FieldSpec F(7);
  for (std::uint64_t a = 1; a < 7; ++a) EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
}

TEST(Recurrence, FibonacciModTwo) {
  // 1,1,0,1,1,0 satisfies a_j = a_{j-1} + a_{j-2}.
  const Multisequence s(FieldSpec(2), {{1, 1, 0, 1, 1, 0}});
  auto alpha = find_recurrence(s, 2);
  ASSERT_TRUE(alpha);
  EXPECT_EQ(*alpha, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_FALSE(solve_recurrence(s, 1));
  EXPECT_EQ(joint_lc(s), 2u);
}

TEST(Recurrence, EmptyAndZeroPrefixes) {
  EXPECT_EQ(joint_lc(Multisequence(FieldSpec(3), 2, 0)), 0u);
  EXPECT_EQ(joint_lc(Multisequence(FieldSpec(3), 2, 5)), 0u);
  // A single nonzero symbol at the end forces L = n.
  EXPECT_EQ(joint_lc(Multisequence(FieldSpec(2), {{0, 0, 0, 1}})), 4u);
}

TEST(Recurrence, MatchesExhaustiveCoefficientSearch) {
  std::mt19937_64 gen(11);
  for (std::uint64_t q : {2u, 3u, 5u})
    for (std::size_t M : {1u, 2u, 3u})
      for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 1 + gen() % (q == 2 ? 7 : 5);
        const auto s = random_seq(gen, q, M, n);
        EXPECT_EQ(joint_lc(s), oracle::brute_force_lc(rows_of(s, n), static_cast<std::uint32_t>(q)))
            << "q=" << q << " M=" << M << " n=" << n;
      }
}

TEST(Profile, SymbolLevelAgreesWithOracleOnPartialColumns) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t M = 1 + gen() % 3, n = 1 + gen() % 4;
    const auto s = random_seq(gen, 2, M, n);
    const auto p = profile(s);
    ASSERT_EQ(p.symbol_lc.size(), 1 + M * n);
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t m = 1; m <= M; ++m) {
        auto rows = rows_of(s, k);
        for (std::size_t r = m; r < M; ++r) rows[r].pop_back();
        EXPECT_EQ(p.at(k, m), oracle::brute_force_lc(rows, 2));
      }
  }
}

TEST(Profile, DeviationDefinition) {
  const Multisequence s(FieldSpec(2), 2, 3);
  const auto p = profile(s);
  EXPECT_EQ(p.column_lc, (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_EQ(p.deviation, (std::vector<std::int64_t>{0, -1, -2, -2}));

  const auto one = profile(Multisequence(FieldSpec(2), {{1}}));
  EXPECT_EQ(one.column_lc.back(), 1u);
  EXPECT_EQ(one.deviation.back(), 0);
}

TEST(Histogram, SmallCases) {
  const auto h = exhaustive_histogram(2, 1, 1);
  EXPECT_EQ(h, (std::map<std::int64_t, std::uint64_t>{{-1, 1}, {0, 1}}));
  std::uint64_t total = 0;
  for (const auto& [d, c] : exhaustive_histogram(3, 2, 2)) total += c;
  EXPECT_EQ(total, 81u);
}

TEST(Histogram, ThreadCountDoesNotMatter) {
  EXPECT_EQ(exhaustive_histogram(2, 2, 5, kDefaultEnumerationBudget, 1),
            exhaustive_histogram(2, 2, 5, kDefaultEnumerationBudget, 4));
}

TEST(Histogram, BudgetIsEnforced) {
  EXPECT_THROW(exhaustive_histogram(2, 2, 20, 1 << 10), BudgetExceeded);
}

TEST(Parse, RoundTrip) {
  std::istringstream in("3 2 4\n0 1 2 0\n2 2 1 0\n");
  const auto s = parse_multisequence(in);
  EXPECT_EQ(s.q(), 3u);
  EXPECT_EQ(s.streams(), 2u);
  EXPECT_EQ(s.at(1, 2), 1u);
  std::ostringstream out;
  write_multisequence(out, s);
  EXPECT_EQ(out.str(), "3 2 4\n0 1 2 0\n2 2 1 0\n");
}

TEST(Parse, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_multisequence(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("2 1 2\n1 7\n"), 2u);
  EXPECT_EQ(line_of("2 2 2\n1 0\n1\n"), 3u);
  EXPECT_EQ(line_of("2 1 x\n"), 1u);
  EXPECT_EQ(line_of("2 1 1\n1\n0\n"), 3u);
  EXPECT_EQ(line_of("4 1 1\n1\n"), 1u);
}
