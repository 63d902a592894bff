#pragma once

// Monte Carlo trajectories of the battery-discharge chain.
//
// Seeding: run r draws from std::mt19937_64 seeded with
// std::seed_seq{lo32(seed), hi32(seed), lo32(r), hi32(r)}, so every run is
// reproducible on its own and independent of the worker count.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdm/errors.hpp"
#include "bdm/gamma.hpp"
#include "bdm/parallel.hpp"
#include "bdm/rational.hpp"
#include "bdm/state.hpp"

namespace bdm {

inline constexpr const char* kGeneratorName = "mt19937_64/seed_seq{lo(seed),hi(seed),lo(run),hi(run)}";

inline std::mt19937_64 run_generator(std::uint64_t seed, std::uint64_t run) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(run), hi(run)};
  return std::mt19937_64(seq);
}

/// Uniform integer in [0, bound) by rejection; no library distribution, so
/// the stream is identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = gen();
  while (x >= limit);
  return x % bound;
}

struct SimulationStats {
  std::int64_t q = 2;
  std::int64_t M = 1;
  std::int64_t n = 0;
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  std::map<std::int64_t, std::uint64_t> histogram;  ///< final d
  std::vector<std::int64_t> final_d;
  std::vector<double> max_ratio;  ///< per run, max over 2 <= k <= n of d(k)/ln k
  std::vector<double> min_ratio;

  std::pair<std::int64_t, std::int64_t> final_slot() const {
    return slot_of((M + 1) * n, static_cast<std::size_t>(M));
  }
};

/// One trajectory over n columns. Records d after each column.
template <class OnColumn>
void simulate_run(std::int64_t q, std::int64_t M, std::int64_t n, std::mt19937_64& gen, OnColumn&& on_column) {
  std::vector<std::int64_t> b(static_cast<std::size_t>(M), 0);
  std::int64_t d = 0, T = 0;
  const auto uq = static_cast<std::uint64_t>(q);
  for (std::int64_t k = 1; k <= n; ++k) {
    // Leaving t = M+1 starts the column.
    if (T < M) {
      --d;
      ++T;
    } else {
      for (auto& v : b) ++v;
      T = 0;
    }
    for (std::int64_t t = 1; t <= M; ++t) {
      auto& v = b[static_cast<std::size_t>(t - 1)];
      if (v > d && uniform_below(gen, uq) != 0) std::swap(v, d);
    }
    on_column(k, d);
  }
}

inline SimulationStats simulate(std::int64_t q, std::int64_t M, std::int64_t n, std::uint64_t runs, std::uint64_t seed,
                                unsigned threads = 1) {
  if (q < 2) throw ParameterError("q must be at least 2");
  if (M < 1) throw ParameterError("M must be at least 1");
  if (n < 0) throw ParameterError("n must be nonnegative");
  if (runs < 1) throw ParameterError("runs must be at least 1");
  SimulationStats st;
  st.q = q;
  st.M = M;
  st.n = n;
  st.runs = runs;
  st.seed = seed;
  st.final_d.assign(runs, 0);
  st.max_ratio.assign(runs, 0.0);
  st.min_ratio.assign(runs, 0.0);

  std::vector<double> inv_log(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t k = 2; k <= n; ++k) inv_log[static_cast<std::size_t>(k)] = 1.0 / std::log(static_cast<double>(k));

  const std::size_t shards = std::min<std::uint64_t>(runs, std::max(1u, threads) * 8);
  run_shards(shards, threads, [&](std::size_t sh) {
    const std::uint64_t lo = runs * sh / shards, hi = runs * (sh + 1) / shards;
    for (std::uint64_t r = lo; r < hi; ++r) {
      auto gen = run_generator(seed, r);
      double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity();
      std::int64_t last = 0;
      simulate_run(q, M, n, gen, [&](std::int64_t k, std::int64_t d) {
        last = d;
        if (k >= 2) {
          const double x = static_cast<double>(d) * inv_log[static_cast<std::size_t>(k)];
          mx = std::max(mx, x);
          mn = std::min(mn, x);
        }
      });
      st.final_d[r] = last;
      st.max_ratio[r] = n >= 2 ? mx : 0.0;
      st.min_ratio[r] = n >= 2 ? mn : 0.0;
    }
  });
  for (auto d : st.final_d) ++st.histogram[d];
  return st;
}

/// Largest gap between the empirical CDF of the final drain and the CDF
/// built from gamma_closed at the final slot.
inline double ks_statistic(const SimulationStats& st) {
  const auto [T, t] = st.final_slot();
  if (st.histogram.empty()) return 0.0;
  const std::int64_t lo = st.histogram.begin()->first - 1, hi = st.histogram.rbegin()->first;
  // Mass of gamma below lo, via normalisation minus the window and the part above.
  double below = 1.0;
  const std::int64_t reach = std::max<std::int64_t>(40, hi - lo + 40);
  for (std::int64_t d = lo + 1; d <= hi + reach; ++d) below -= to_double(gamma_closed({st.q, st.M, T, t, d}));
  double theory = below, emp = 0.0, worst = 0.0;
  for (std::int64_t d = lo + 1; d <= hi; ++d) {
    theory += to_double(gamma_closed({st.q, st.M, T, t, d}));
    auto it = st.histogram.find(d);
    if (it != st.histogram.end()) emp += static_cast<double>(it->second) / static_cast<double>(st.runs);
    worst = std::max(worst, std::abs(theory - emp));
  }
  return worst;
}

inline nlohmann::json to_json(const SimulationStats& st, bool include_runs = false) {
  nlohmann::json j;
  const auto [T, t] = st.final_slot();
  j["generator"] = kGeneratorName;
  j["parameters"] = {{"q", st.q}, {"M", st.M}, {"n", st.n}, {"runs", st.runs}, {"seed", st.seed}};
  j["final_slot"] = {{"T", T}, {"t", t}};
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [d, c] : st.histogram) {
    hist[std::to_string(d)] = {{"count", c}, {"gamma", to_string(gamma_closed({st.q, st.M, T, t, d}))}};
  }
  j["histogram"] = hist;
  if (st.n >= 2 && !st.max_ratio.empty()) {
    double mx_sum = 0, mn_sum = 0, mx = -1e300, mn = 1e300;
    for (std::size_t r = 0; r < st.max_ratio.size(); ++r) {
      mx_sum += st.max_ratio[r];
      mn_sum += st.min_ratio[r];
      mx = std::max(mx, st.max_ratio[r]);
      mn = std::min(mn, st.min_ratio[r]);
    }
    const double runs = static_cast<double>(st.max_ratio.size());
    j["log_ratio"] = {{"mean_max", mx_sum / runs},
                      {"mean_min", mn_sum / runs},
                      {"max", mx},
                      {"min", mn},
                      {"theory", 1.0 / (static_cast<double>(st.M + 1) * std::log(static_cast<double>(st.q)))}};
  }
  j["ks_statistic"] = ks_statistic(st);
  if (include_runs) j["final_d"] = st.final_d;
  return j;
}

}  // namespace bdm
