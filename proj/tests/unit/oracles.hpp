#pragma once

// Slow, independent reference implementations used only by the tests.
// They share no code with the library beyond the exact number types.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using Row = std::vector<std::uint32_t>;

// Shortest shared recurrence found by trying every coefficient vector.
inline std::size_t brute_force_lc(const std::vector<Row>& streams, std::uint32_t q) {
  std::size_t n = 0;
  for (const auto& s : streams) n = std::max(n, s.size());
  for (std::size_t L = 0; L <= n; ++L) {
    std::vector<std::uint32_t> alpha(L, 0);
    while (true) {
      bool ok = true;
      for (const auto& s : streams) {
        for (std::size_t j = L; j < s.size() && ok; ++j) {
          std::uint64_t acc = 0;
          for (std::size_t i = 1; i <= L; ++i) acc += static_cast<std::uint64_t>(alpha[i - 1]) * s[j - i];
          ok = acc % q == s[j];
        }
        if (!ok) break;
      }
      if (ok) return L;
      std::size_t k = 0;
      while (k < L && ++alpha[k] == q) alpha[k++] = 0;
      if (k == L) break;
    }
  }
  return n;
}

// Swaps neighbours until nonincreasing, counting swaps.
inline std::int64_t bubble_sort_inversions(std::vector<std::int64_t> v) {
  std::int64_t swaps = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] < v[i + 1]) {
        std::swap(v[i], v[i + 1]);
        ++swaps;
        changed = true;
      }
  }
  return swaps;
}

// Nonincreasing M-tuples with entries in [0,K] summing to K, by odometer.
inline std::set<std::vector<std::int64_t>> brute_partitions(std::int64_t K, std::int64_t M) {
  std::set<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> v(static_cast<std::size_t>(M), 0);
  while (true) {
    std::int64_t sum = 0;
    for (auto x : v) sum += x;
    if (sum == K && std::is_sorted(v.begin(), v.end(), std::greater<>())) out.insert(v);
    std::size_t k = 0;
    while (k < v.size() && ++v[k] > K) v[k++] = 0;
    if (k == v.size()) break;
  }
  return out;
}

// State as a plain tuple: (b, d, T, t).
using State = std::tuple<std::vector<std::int64_t>, std::int64_t, std::int64_t, std::int64_t>;

inline std::int64_t klass(const State& s) {
  const auto& [b, d, T, t] = s;
  const auto M = static_cast<std::int64_t>(b.size());
  std::vector<std::int64_t> seq(b.begin(), b.begin() + (t - 1));
  seq.push_back(d);
  seq.insert(seq.end(), b.begin() + (t - 1), b.end());
  const std::int64_t pi = bubble_sort_inversions(seq);
  std::sort(seq.begin(), seq.end(), std::greater<>());
  std::int64_t w = 0;
  for (std::int64_t m = 1; m <= M + 1; ++m) w += seq[static_cast<std::size_t>(m - 1)] * (M + 1 - m);
  return -pi + M * T + 2 * w;
}

// (probability numerator over q, next state); numerator q means probability 1.
inline std::vector<std::pair<std::int64_t, State>> moves(const State& s, std::int64_t q) {
  const auto& [b, d, T, t] = s;
  const auto M = static_cast<std::int64_t>(b.size());
  std::vector<std::pair<std::int64_t, State>> out;
  if (t == M + 1) {
    if (T < M) {
      out.push_back({q, State{b, d - 1, T + 1, 1}});
    } else {
      auto nb = b;
      for (auto& x : nb) x += 1;
      out.push_back({q, State{nb, d, 0, 1}});
    }
    return out;
  }
  const auto v = b[static_cast<std::size_t>(t - 1)];
  if (v > d) {
    auto nb = b;
    nb[static_cast<std::size_t>(t - 1)] = d;
    out.push_back({q - 1, State{nb, v, T, t + 1}});
    out.push_back({1, State{b, d, T, t + 1}});
  } else {
    out.push_back({q, State{b, d, T, t + 1}});
  }
  return out;
}

// Exact distribution after `steps` ministeps, with no truncation.
inline std::map<State, mpq_class> propagate(std::int64_t M, std::int64_t q, std::int64_t steps) {
  std::map<State, mpq_class> mu{{State{std::vector<std::int64_t>(static_cast<std::size_t>(M), 0), 0, 0, M + 1}, 1}};
  for (std::int64_t i = 0; i < steps; ++i) {
    std::map<State, mpq_class> next;
    for (const auto& [s, m] : mu)
      for (const auto& [p, ns] : moves(s, q)) next[ns] += m * mpq_class(p, q);
    mu = std::move(next);
  }
  for (auto& [s, m] : mu) m.canonicalize();
  return mu;
}

// All states of class <= K_max, by depth-first search.
inline std::set<State> reachable(std::int64_t M, std::int64_t K_max) {
  const State s0{std::vector<std::int64_t>(static_cast<std::size_t>(M), 0), 0, 0, M + 1};
  std::set<State> seen{s0};
  std::vector<State> stack{s0};
  while (!stack.empty()) {
    State s = stack.back();
    stack.pop_back();
    for (const auto& [p, ns] : moves(s, 2))
      if (klass(ns) <= K_max && seen.insert(ns).second) stack.push_back(ns);
  }
  return seen;
}

// Stationary drain mass at slot (T,t): sum of q^-K over states with drain d,
// divided by prod q^m/(q^m-1). Returns the partial sum up to K_max.
inline mpq_class stationary_drain_mass(std::int64_t M, std::int64_t q, std::int64_t T, std::int64_t t,
                                       std::int64_t d, std::int64_t K_max) {
  mpq_class sum = 0;
  for (const auto& s : reachable(M, K_max)) {
    if (std::get<1>(s) != d || std::get<2>(s) != T || std::get<3>(s) != t) continue;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(klass(s)));
    sum += mpq_class(1, den);
  }
  mpq_class P = 1;
  for (std::int64_t m = 1; m <= M; ++m) {
    mpz_class qm;
    mpz_ui_pow_ui(qm.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(m));
    P *= mpq_class(qm, qm - 1);
  }
  mpq_class r = sum / P;
  r.canonicalize();
  return r;
}

}  // namespace oracle
