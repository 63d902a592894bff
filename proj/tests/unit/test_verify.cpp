#include <gtest/gtest.h>

#include "bdm/simulate.hpp"
#include "bdm/verify.hpp"

using namespace bdm;

TEST(Campaigns, TheoremSuitesPassAtSmallScale) {
  EXPECT_TRUE(verify_class_counts(2, 15).pass);
  EXPECT_TRUE(verify_partition_bijection(3, 8).pass);
  EXPECT_TRUE(verify_stationarity(2, 3, 12).pass);
  EXPECT_TRUE(verify_gamma(2, 2, 3, 16).pass);
  EXPECT_TRUE(verify_bruteforce(3, 1, 4).pass);
  EXPECT_TRUE(verify_mean_deviation(2, 3, 16).pass);
}

TEST(Campaigns, ConjectureSuitesReport) {
  const auto f = verify_finite_n(1, 2, 16);
  EXPECT_EQ(f.status, Status::Conjecture);
  EXPECT_TRUE(f.pass);
  EXPECT_GT(f.residuals["generation_reading"]["mismatches"].get<std::uint64_t>(), 0u);

  const auto g = verify_generations(1, 8);
  EXPECT_TRUE(g.pass);
  EXPECT_EQ(g.residuals["cumulative_per_slot"]["2"]["(0,1)"].get<std::uint64_t>(), 3u);
  EXPECT_TRUE(verify_generations(2, 6).pass);
}

TEST(Campaigns, PartitionsOfListing) {
  EXPECT_EQ(partitions_of(2, 2), (std::vector<std::vector<std::int64_t>>{{2, 0}, {1, 1}}));
  EXPECT_EQ(partitions_of(3, 3).size(), 3u);
  EXPECT_EQ(partitions_of(0, 2), (std::vector<std::vector<std::int64_t>>{{0, 0}}));
}

TEST(Campaigns, ArrivalFactor) {
  EXPECT_EQ(arrival_factor(BdmState{{0}, -1, 1, 2}, 2), 2);
  EXPECT_EQ(arrival_factor(initial_state(2), 2), partition_gf(2, 2));
  EXPECT_EQ(arrival_factor(BdmState{{-1, -1}, 2, 0, 3}, 2), 1);
}

TEST(Campaigns, FailuresAreRecordedVerbatim) {
  VerificationReport r;
  r.check(true, [] { return std::string("unused"); });
  r.check(false, [] { return std::string("broken thing"); });
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.checks, 2u);
  EXPECT_EQ(r.failure_samples, (std::vector<std::string>{"broken thing"}));
}

TEST(Campaigns, JsonIsDeterministic) {
  const auto a = verify_stationarity(1, 2, 10).to_json().dump();
  const auto b = verify_stationarity(1, 2, 10).to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("runtime"), std::string::npos);
  EXPECT_NE(verify_stationarity(1, 2, 10).to_json(true).dump().find("runtime"), std::string::npos);
}

TEST(Simulation, OneColumn) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto st = simulate(2, 1, 1, 1, seed);
    EXPECT_TRUE(st.final_d[0] == -1 || st.final_d[0] == 0);
  }
}

TEST(Simulation, DeterministicAndThreadIndependent) {
  const auto a = simulate(2, 2, 200, 64, 99, 1);
  const auto b = simulate(2, 2, 200, 64, 99, 4);
  EXPECT_EQ(a.final_d, b.final_d);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  std::uint64_t total = 0;
  for (const auto& [d, c] : a.histogram) total += c;
  EXPECT_EQ(total, 64u);
}

TEST(Simulation, MatchesExactDistributionAtSmallHorizon) {
  // Mean of d over many runs against the exact column-6 mass.
  const auto st = simulate(2, 1, 6, 20000, 5);
  const auto mu = run_to_column(1, 2, 6, 12);
  double exact = 0;
  for (const auto& [d, m] : mass_by_drain(mu)) exact += static_cast<double>(d) * to_double(m);
  double emp = 0;
  for (auto d : st.final_d) emp += static_cast<double>(d);
  emp /= 20000.0;
  EXPECT_NEAR(emp, exact, 0.03);
}

TEST(Simulation, UniformBelowStaysInRange) {
  auto gen = run_generator(1, 2);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(gen, 3), 3u);
}
