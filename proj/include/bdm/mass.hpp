#pragma once

// Class-bounded state census and exact propagation of the mass vector.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdm/errors.hpp"
#include "bdm/parallel.hpp"
#include "bdm/partitions.hpp"
#include "bdm/rational.hpp"
#include "bdm/state.hpp"

namespace bdm {

inline bool text_less(const BdmState& a, const BdmState& b) { return to_string(a) < to_string(b); }

/// States of one slot (T,t), grouped by class.
struct StateCensus {
  std::size_t M = 1;
  std::int64_t T = 0;
  std::int64_t t = 1;
  std::int64_t K_max = 0;
  std::vector<std::vector<BdmState>> by_class;  ///< index K, each list in text order

  std::vector<std::uint64_t> counts() const {
    std::vector<std::uint64_t> c;
    for (const auto& v : by_class) c.push_back(v.size());
    return c;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& v : by_class) n += v.size();
    return n;
  }
};

inline constexpr std::size_t kDefaultStateBudget = 20'000'000;

/// Every state of S with class <= K_max, across all (M+1)^2 slots.
///
/// Built by search from s_0 that discards successors above K_max. Nothing is
/// lost: each state has an N<-free path from s_0, and class never decreases
/// along such a path, so every state on it is itself within the cutoff.
class Census {
 public:
  Census(std::size_t M, std::int64_t K_max, std::size_t max_states = kDefaultStateBudget) : M_(M), K_max_(K_max) {
    if (M < 1) throw ParameterError("M must be at least 1");
    if (K_max < 0) throw ParameterError("K_max must be nonnegative");
    const BdmState s0 = initial_state(M);
    classes_.emplace(s0, 0);
    std::deque<BdmState> frontier{s0};
    while (!frontier.empty()) {
      BdmState s = std::move(frontier.front());
      frontier.pop_front();
      const std::int64_t K = classes_.at(s);
      for (auto& tr : feasible_actions(s)) {
        const std::int64_t K2 = K + class_delta(tr.kind);
        if (K2 > K_max || classes_.count(tr.next)) continue;
        if (classes_.size() >= max_states)
          throw BudgetExceeded("census of M=" + std::to_string(M) + ", K_max=" + std::to_string(K_max) +
                               " exceeds " + std::to_string(max_states) + " states; lower K_max or raise --budget");
        classes_.emplace(tr.next, K2);
        frontier.push_back(std::move(tr.next));
      }
    }

    const auto M1 = static_cast<std::int64_t>(M) + 1;
    for (std::int64_t T = 0; T < M1; ++T)
      for (std::int64_t t = 1; t <= M1; ++t) {
        StateCensus sc;
        sc.M = M;
        sc.T = T;
        sc.t = t;
        sc.K_max = K_max;
        sc.by_class.resize(static_cast<std::size_t>(K_max + 1));
        slots_.emplace(std::pair{T, t}, std::move(sc));
      }
    for (const auto& [s, K] : classes_) slots_.at({s.T, s.t}).by_class[static_cast<std::size_t>(K)].push_back(s);
    for (auto& [key, sc] : slots_)
      for (auto& v : sc.by_class) std::sort(v.begin(), v.end(), text_less);
  }

  std::size_t M() const noexcept { return M_; }
  std::int64_t K_max() const noexcept { return K_max_; }
  std::size_t size() const noexcept { return classes_.size(); }

  const StateCensus& slot(std::int64_t T, std::int64_t t) const {
    auto it = slots_.find({T, t});
    if (it == slots_.end()) throw ParameterError("slot (T,t) out of range");
    return it->second;
  }
  bool contains(const BdmState& s) const { return classes_.count(s) != 0; }
  std::int64_t class_at(const BdmState& s) const {
    auto it = classes_.find(s);
    if (it == classes_.end()) throw IncompleteCensus("state " + to_string(s) + " is not in the census");
    return it->second;
  }
  const std::unordered_map<BdmState, std::int64_t, BdmStateHash>& classes() const noexcept { return classes_; }

 private:
  std::size_t M_;
  std::int64_t K_max_;
  std::unordered_map<BdmState, std::int64_t, BdmStateHash> classes_;
  std::map<std::pair<std::int64_t, std::int64_t>, StateCensus> slots_;
};

inline StateCensus enumerate_states(std::size_t M, std::int64_t T, std::int64_t t, std::int64_t K_max,
                                    std::size_t max_states = kDefaultStateBudget) {
  return Census(M, K_max, max_states).slot(T, t);
}

/// mu_tau over the states of class <= K_max, plus the mass that left the window.
struct MassDistribution {
  std::size_t M = 1;
  std::int64_t q = 2;
  std::int64_t tau = 0;
  std::int64_t K_max = 0;
  std::map<BdmState, Rational> entries;
  Rational tail = 0;

  Rational total() const {
    Rational s = tail;
    for (const auto& [st, m] : entries) s += m;
    return s;
  }
  Rational at(const BdmState& s) const {
    auto it = entries.find(s);
    return it == entries.end() ? Rational(0) : it->second;
  }
  /// Entries in text order, the order of every report.
  std::vector<std::pair<BdmState, Rational>> sorted() const {
    std::vector<std::pair<BdmState, Rational>> v(entries.begin(), entries.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return text_less(a.first, b.first); });
    return v;
  }
};

inline MassDistribution initial_distribution(std::size_t M, std::int64_t q, std::int64_t K_max) {
  if (q < 2) throw ParameterError("q must be at least 2");
  if (K_max < 0) throw ParameterError("K_max must be nonnegative");
  MassDistribution mu;
  mu.M = M;
  mu.q = q;
  mu.K_max = K_max;
  mu.entries.emplace(initial_state(M), Rational(1));
  return mu;
}

/// One ministep of the chain. Sources are split into shards whose results
/// are summed exactly, so the output does not depend on `threads`.
inline MassDistribution step(const MassDistribution& mu, unsigned threads = 1) {
  std::vector<const std::pair<const BdmState, Rational>*> sources;
  sources.reserve(mu.entries.size());
  for (const auto& e : mu.entries) sources.push_back(&e);

  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(threads, sources.size()));
  std::vector<std::map<BdmState, Rational>> out(shards);
  std::vector<Rational> lost(shards, Rational(0));
  const Rational pD = action_probability(ActionKind::D, mu.q), pI = action_probability(ActionKind::I, mu.q);

  run_shards(shards, threads, [&](std::size_t sh) {
    const std::size_t lo = sources.size() * sh / shards, hi = sources.size() * (sh + 1) / shards;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& [s, m] = *sources[i];
      const std::int64_t K = class_of(s);
      for (auto& tr : feasible_actions(s)) {
        const Rational share = tr.kind == ActionKind::D ? m * pD : tr.kind == ActionKind::I ? m * pI : m;
        if (K + class_delta(tr.kind) > mu.K_max)
          lost[sh] += share;
        else
          out[sh][std::move(tr.next)] += share;
      }
    }
  });

  MassDistribution next;
  next.M = mu.M;
  next.q = mu.q;
  next.tau = mu.tau + 1;
  next.K_max = mu.K_max;
  next.tail = mu.tail;
  for (std::size_t sh = 0; sh < shards; ++sh) {
    next.tail += lost[sh];
    for (auto& [s, m] : out[sh]) next.entries[s] += m;
  }
  const auto slot = slot_of(next.tau, next.M);
  for (const auto& [s, m] : next.entries)
    if (s.T != slot.first || s.t != slot.second)
      throw std::logic_error("mass left the active slot at tau=" + std::to_string(next.tau) + ": " + to_string(s));
  return next;
}

inline MassDistribution run_to_tau(std::size_t M, std::int64_t q, std::int64_t tau, std::int64_t K_max,
                                   unsigned threads = 1) {
  if (tau < 0) throw ParameterError("tau must be nonnegative");
  MassDistribution mu = initial_distribution(M, q, K_max);
  for (std::int64_t i = 0; i < tau; ++i) mu = step(mu, threads);
  return mu;
}

/// mu after all M symbols of column n, i.e. at tau = (M+1) n.
inline MassDistribution run_to_column(std::size_t M, std::int64_t q, std::int64_t n, std::int64_t K_max,
                                      unsigned threads = 1) {
  if (n < 0) throw ParameterError("n must be nonnegative");
  return run_to_tau(M, q, (static_cast<std::int64_t>(M) + 1) * n, K_max, threads);
}

/// Mass per drain value d.
inline std::map<std::int64_t, Rational> mass_by_drain(const MassDistribution& mu) {
  std::map<std::int64_t, Rational> out;
  for (const auto& [s, m] : mu.entries) out[s.d] += m;
  return out;
}

/// q^-K(s) / P(M,q).
inline Rational stationary_mass(const BdmState& s, std::int64_t q) {
  Rational r = qpow(q, -class_of(s)) / partition_gf(static_cast<std::int64_t>(s.M()), q);
  r.canonicalize();
  return r;
}

/// Incoming minus own weight under q^-K; zero where the stationary equation holds.
inline Rational balance_residual(const BdmState& s, const Census& census, std::int64_t q) {
  const std::int64_t K = census.class_at(s);
  if (K > census.K_max() - 1)
    throw IncompleteCensus("class " + std::to_string(K) + " of " + to_string(s) +
                           " is too close to K_max=" + std::to_string(census.K_max()) + " to certify its predecessors");
  Rational in(0);
  for (const auto& p : predecessors(s)) {
    if (!census.contains(p.source))
      throw IncompleteCensus("predecessor " + to_string(p.source) + " of " + to_string(s) + " is missing");
    in += action_probability(p.kind, q) * qpow(q, -census.class_at(p.source));
  }
  Rational r = in - qpow(q, -K);
  r.canonicalize();
  return r;
}

/// Total probability of the transitions entering s.
inline Rational incoming_probability(const BdmState& s, std::int64_t q) {
  Rational sum(0);
  for (const auto& p : predecessors(s)) sum += action_probability(p.kind, q);
  return sum;
}

/// The value incoming_probability must take: (q-1)/q + 1, 1/q or 1 by how
/// the battery just read compares with d.
inline Rational expected_incoming_probability(const BdmState& s, std::int64_t q) {
  if (s.t == 1) return Rational(1);
  const auto v = s.b.at(static_cast<std::size_t>(s.t - 2));
  if (v < s.d) return action_probability(ActionKind::D, q) + 1;
  if (v > s.d) return action_probability(ActionKind::I, q);
  return Rational(1);
}

inline void write_census_csv(std::ostream& out, const StateCensus& sc) {
  out << "# M=" << sc.M << "\n# T=" << sc.T << "\n# t=" << sc.t << "\n# K_max=" << sc.K_max << '\n';
  out << "state,class\n";
  for (std::size_t K = 0; K < sc.by_class.size(); ++K)
    for (const auto& s : sc.by_class[K]) out << to_string(s) << ',' << K << '\n';
}

inline void write_distribution_csv(std::ostream& out, const MassDistribution& mu) {
  out << "# M=" << mu.M << "\n# q=" << mu.q << "\n# tau=" << mu.tau << "\n# K_max=" << mu.K_max
      << "\n# tail=" << to_string(mu.tail) << '\n';
  out << "state,class,num,den\n";
  for (const auto& [s, m] : mu.sorted())
    out << to_string(s) << ',' << class_of(s) << ',' << m.get_num().get_str() << ',' << m.get_den().get_str() << '\n';
}

}  // namespace bdm
