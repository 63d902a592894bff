#pragma once

// States, transitions and the class function of the battery-discharge model.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bdm/errors.hpp"
#include "bdm/rational.hpp"

namespace bdm {

/// (b_1..b_M, d; T, t). The invariant d + T + sum(b) = 0 is checked by
/// validate(), not by construction, so augmented states can be built freely.
struct BdmState {
  std::vector<std::int64_t> b;
  std::int64_t d = 0;
  std::int64_t T = 0;
  std::int64_t t = 1;

  std::size_t M() const noexcept { return b.size(); }
  std::int64_t battery(std::size_t m) const { return b.at(m - 1); }  // 1-based

  auto operator<=>(const BdmState&) const = default;
  bool operator==(const BdmState&) const = default;
};

inline std::string to_string(const BdmState& s) {
  std::string out;
  for (std::size_t m = 0; m < s.b.size(); ++m) {
    if (m) out += ',';
    out += std::to_string(s.b[m]);
  }
  out += ';' + std::to_string(s.d) + ';' + std::to_string(s.T) + ';' + std::to_string(s.t);
  return out;
}

inline bool invariant_holds(const BdmState& s) {
  std::int64_t sum = s.d + s.T;
  for (auto v : s.b) sum += v;
  return sum == 0;
}

/// Throws MalformedState unless s is in S (or in the augmented set when
/// `augmented`, which leaves T unrestricted).
inline void validate(const BdmState& s, bool augmented = false) {
  const auto M = static_cast<std::int64_t>(s.M());
  if (M < 1) throw MalformedState("state has no batteries: " + to_string(s));
  if (!invariant_holds(s)) throw MalformedState("d + T + sum(b) != 0 in " + to_string(s));
  if (s.t < 1 || s.t > M + 1) throw MalformedState("ministep t outside [1, M+1] in " + to_string(s));
  if (!augmented && (s.T < 0 || s.T > M)) throw MalformedState("T outside [0, M] in " + to_string(s));
}

/// Parses `b1,...,bM;d;T;t`. Only the syntax is checked.
inline BdmState parse_state(const std::string& text) {
  BdmState s;
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ';')) parts.push_back(part);
  if (parts.size() != 4) throw ParseError("state must look like b1,...,bM;d;T;t: " + text, 1);

  auto to_int = [&](const std::string& tok) -> std::int64_t {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("not an integer: '" + tok + "' in " + text, 1);
    }
    if (used != tok.size()) throw ParseError("not an integer: '" + tok + "' in " + text, 1);
    return v;
  };

  std::istringstream bs(parts[0]);
  while (std::getline(bs, part, ',')) s.b.push_back(to_int(part));
  if (s.b.empty()) throw ParseError("state has no batteries: " + text, 1);
  s.d = to_int(parts[1]);
  s.T = to_int(parts[2]);
  s.t = to_int(parts[3]);
  return s;
}

struct BdmStateHash {
  std::size_t operator()(const BdmState& s) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    auto mix = [&](std::int64_t v) {
      h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (auto v : s.b) mix(v);
    mix(s.d);
    mix(s.T);
    mix(s.t);
    return h;
  }
};

inline BdmState initial_state(std::size_t M) {
  if (M < 1) throw ParameterError("M must be at least 1");
  return BdmState{std::vector<std::int64_t>(M, 0), 0, 0, static_cast<std::int64_t>(M) + 1};
}

enum class ActionKind { D, I, NEq, NLess, DrainDec, BatteryInc };

inline const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::D: return "D";
    case ActionKind::I: return "I";
    case ActionKind::NEq: return "N=";
    case ActionKind::NLess: return "N<";
    case ActionKind::DrainDec: return "d-";
    case ActionKind::BatteryInc: return "b+";
  }
  return "?";
}

inline Rational action_probability(ActionKind k, std::int64_t q) {
  if (q < 2) throw ParameterError("q must be at least 2");
  switch (k) {
    case ActionKind::D: {
      Rational p(q - 1, q);
      p.canonicalize();
      return p;
    }
    case ActionKind::I: {
      Rational p(1, q);
      p.canonicalize();
      return p;
    }
    default: return Rational(1);
  }
}

/// Change in class along an action: I raises it, N< lowers it.
inline int class_delta(ActionKind k) {
  switch (k) {
    case ActionKind::I: return 1;
    case ActionKind::NLess: return -1;
    default: return 0;
  }
}

struct Transition {
  ActionKind kind;
  BdmState next;
};

inline std::vector<Transition> feasible_actions(const BdmState& s) {
  validate(s);
  const auto M = static_cast<std::int64_t>(s.M());
  std::vector<Transition> out;
  if (s.t <= M) {
    const std::size_t i = static_cast<std::size_t>(s.t - 1);
    BdmState same = s;
    same.t += 1;
    if (s.b[i] > s.d) {
      BdmState swapped = same;
      std::swap(swapped.b[i], swapped.d);
      out.push_back({ActionKind::D, std::move(swapped)});
      out.push_back({ActionKind::I, std::move(same)});
    } else if (s.b[i] == s.d) {
      out.push_back({ActionKind::NEq, std::move(same)});
    } else {
      out.push_back({ActionKind::NLess, std::move(same)});
    }
  } else if (s.T < M) {
    out.push_back({ActionKind::DrainDec, BdmState{s.b, s.d - 1, s.T + 1, 1}});
  } else {
    BdmState up{s.b, s.d, 0, 1};
    for (auto& v : up.b) ++v;
    out.push_back({ActionKind::BatteryInc, std::move(up)});
  }
  return out;
}

struct Predecessor {
  ActionKind kind;
  BdmState source;
};

/// Every (source, action) pair with a transition into s. Sources are in S.
inline std::vector<Predecessor> predecessors(const BdmState& s) {
  validate(s);
  const auto M = static_cast<std::int64_t>(s.M());
  std::vector<Predecessor> out;
  if (s.t == 1) {
    if (s.T >= 1) out.push_back({ActionKind::DrainDec, BdmState{s.b, s.d + 1, s.T - 1, M + 1}});
    if (s.T == 0) {
      BdmState down{s.b, s.d, M, M + 1};
      for (auto& v : down.b) --v;
      out.push_back({ActionKind::BatteryInc, std::move(down)});
    }
    return out;
  }
  const std::size_t i = static_cast<std::size_t>(s.t - 2);
  BdmState same = s;
  same.t -= 1;
  if (s.b[i] > s.d) {
    out.push_back({ActionKind::I, std::move(same)});
  } else if (s.b[i] == s.d) {
    out.push_back({ActionKind::NEq, std::move(same)});
  } else {
    BdmState swapped = same;
    std::swap(swapped.b[i], swapped.d);
    out.push_back({ActionKind::D, std::move(swapped)});
    out.push_back({ActionKind::NLess, std::move(same)});
  }
  return out;
}

/// The M+1 values in reading order: b_1..b_{t-1}, d, b_t..b_M.
inline std::vector<std::int64_t> reading_sequence(const BdmState& s) {
  std::vector<std::int64_t> v;
  v.reserve(s.M() + 1);
  const auto cut = static_cast<std::size_t>(std::clamp<std::int64_t>(s.t - 1, 0, static_cast<std::int64_t>(s.M())));
  v.insert(v.end(), s.b.begin(), s.b.begin() + static_cast<std::ptrdiff_t>(cut));
  v.push_back(s.d);
  v.insert(v.end(), s.b.begin() + static_cast<std::ptrdiff_t>(cut), s.b.end());
  return v;
}

/// Adjacent transpositions needed to sort v into nonincreasing order.
/// Equal neighbours are never swapped, so only strict pairs count.
inline std::int64_t inversion_count(const std::vector<std::int64_t>& v) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] < v[j]) ++n;
  return n;
}

/// K(s). Accepts augmented states; nothing is validated.
inline std::int64_t class_of(const BdmState& s) {
  auto v = reading_sequence(s);
  const std::int64_t pi = inversion_count(v);
  std::sort(v.begin(), v.end(), std::greater<>());
  const auto M = static_cast<std::int64_t>(s.M());
  std::int64_t weighted = 0;
  for (std::int64_t m = 1; m <= M + 1; ++m) weighted += v[static_cast<std::size_t>(m - 1)] * (M + 1 - m);
  return -pi + M * s.T + 2 * weighted;
}

/// Replays `actions` from s, taking the branch named by each action.
inline BdmState replay(BdmState s, const std::vector<ActionKind>& actions) {
  for (ActionKind k : actions) {
    bool moved = false;
    for (auto& tr : feasible_actions(s)) {
      if (tr.kind == k) {
        s = std::move(tr.next);
        moved = true;
        break;
      }
    }
    if (!moved)
      throw ParameterError(std::string("action ") + action_name(k) + " not feasible at " + to_string(s));
  }
  return s;
}

struct CanonicalPath {
  std::vector<ActionKind> actions;   ///< forward order, starting at s_0
  std::vector<std::int64_t> inhibitions;  ///< I actions taken at ministep m, m = 1..M
};

/// Rebuilds the unique N<-free path from s_0 to s by walking backwards.
inline CanonicalPath canonical_reconstruction(const BdmState& target) {
  validate(target);
  const auto M = static_cast<std::int64_t>(target.M());
  const BdmState s0 = initial_state(target.M());
  const std::int64_t K = class_of(target);
  const std::int64_t slots = (M + 1) * (M + 1);
  const std::int64_t cap = std::max<std::int64_t>(0, (K + 1) * slots + slots);

  CanonicalPath path;
  path.inhibitions.assign(target.M(), 0);
  BdmState s = target;
  std::int64_t steps = 0;
  while (s != s0) {
    if (++steps > cap)
      throw Unreachable("no N<-free path from s_0 to " + to_string(target) + " within " + std::to_string(cap) +
                        " steps");
    if (s.t == 1) {
      if (s.T >= 1) {
        s = BdmState{s.b, s.d + 1, s.T - 1, M + 1};
        path.actions.push_back(ActionKind::DrainDec);
      } else {
        for (auto& v : s.b) --v;
        s.T = M;
        s.t = M + 1;
        path.actions.push_back(ActionKind::BatteryInc);
      }
      continue;
    }
    const std::size_t i = static_cast<std::size_t>(s.t - 2);
    s.t -= 1;
    if (s.b[i] < s.d) {
      std::swap(s.b[i], s.d);
      path.actions.push_back(ActionKind::D);
    } else if (s.b[i] == s.d) {
      path.actions.push_back(ActionKind::NEq);
    } else {
      path.actions.push_back(ActionKind::I);
      ++path.inhibitions[i];
    }
  }
  std::reverse(path.actions.begin(), path.actions.end());
  return path;
}

inline std::vector<ActionKind> canonical_path(const BdmState& s) { return canonical_reconstruction(s).actions; }

struct IVector {
  std::vector<std::int64_t> I;       ///< per battery
  std::vector<std::int64_t> sorted;  ///< nonincreasing

  std::int64_t total() const {
    std::int64_t n = 0;
    for (auto v : I) n += v;
    return n;
  }
};

inline IVector i_vector(const BdmState& s) {
  IVector out;
  out.I = canonical_reconstruction(s).inhibitions;
  out.sorted = out.I;
  std::sort(out.sorted.begin(), out.sorted.end(), std::greater<>());
  return out;
}

/// ceil(max I_m / (M+1)) * (M+1).
inline std::int64_t generation_from(const IVector& iv) {
  const auto M1 = static_cast<std::int64_t>(iv.I.size()) + 1;
  const std::int64_t top = iv.sorted.empty() ? 0 : iv.sorted.front();
  return (top + M1 - 1) / M1 * M1;
}

inline std::int64_t generation(const BdmState& s) { return generation_from(i_vector(s)); }

/// Reflection (b, d; T, M+1) -> (-b_M-1, ..., -b_1-1, -d; M-T, M+1).
inline BdmState mirror_state(const BdmState& s) {
  validate(s);
  const auto M = static_cast<std::int64_t>(s.M());
  if (s.t != M + 1) throw ParameterError("mirror_state needs t = M+1, got " + to_string(s));
  BdmState out;
  out.b.reserve(s.M());
  for (auto it = s.b.rbegin(); it != s.b.rend(); ++it) out.b.push_back(-*it - 1);
  out.d = -s.d;
  out.T = M - s.T;
  out.t = M + 1;
  return out;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Witness {
  BdmState state;
  std::int64_t claimed_class;  ///< the closed form the lower-bound argument asserts
};

/// The near-balanced state of slot (T,t) with drain d, together with the
/// class the lower-bound argument assigns to it. The claim is not checked
/// here; compare it with class_of(state).
inline Witness witness_state(std::size_t M_, std::int64_t T, std::int64_t t, std::int64_t d) {
  const auto M = static_cast<std::int64_t>(M_);
  if (M < 1) throw ParameterError("M must be at least 1");
  if (T < 0 || T > M || t < 1 || t > M + 1) throw ParameterError("slot (T,t) out of range");
  const std::int64_t base = floor_div(-d - T, M);
  const std::int64_t a = -d - T - M * base;
  BdmState s;
  s.b.assign(M_, base);
  for (std::int64_t m = M - a; m < M; ++m) s.b[static_cast<std::size_t>(m)] = base + 1;
  s.d = d;
  s.T = T;
  s.t = t;

  const std::int64_t ad = d < 0 ? -d : d;
  std::int64_t claim = 0;
  if (d < 0) claim = ad * (M + 1) - ((M - t) + 1 + T);
  if (d > 0) claim = ad * (M + 1) - (M - T) - (M - a);
  return {std::move(s), claim};
}

/// Slot (T,t) occupied at ministep tau: (T-1)(M+1)+t = tau mod (M+1)^2.
inline std::pair<std::int64_t, std::int64_t> slot_of(std::int64_t tau, std::size_t M_) {
  const auto M = static_cast<std::int64_t>(M_);
  const std::int64_t mod = (M + 1) * (M + 1);
  const std::int64_t r = ((tau % mod) + mod) % mod;
  for (std::int64_t T = 0; T <= M; ++T)
    for (std::int64_t t = 1; t <= M + 1; ++t)
      if ((((T - 1) * (M + 1) + t) % mod + mod) % mod == r) return {T, t};
  throw ParameterError("unreachable slot computation");
}

inline bool slot_matches(std::int64_t T, std::int64_t t, std::int64_t tau, std::size_t M) {
  return slot_of(tau, M) == std::pair{T, t};
}

/// Smallest tau >= 0 at which slot (T,t) is active.
inline std::int64_t first_tau_of_slot(std::int64_t T, std::int64_t t, std::size_t M_) {
  const auto M = static_cast<std::int64_t>(M_);
  const std::int64_t mod = (M + 1) * (M + 1);
  return (((T - 1) * (M + 1) + t) % mod + mod) % mod;
}

}  // namespace bdm
