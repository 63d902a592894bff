#pragma once

// Joint linear complexity of multisequences over a prime field, computed
// directly from the recurrence characterisation by Gaussian elimination.
// Nothing in here knows about the battery-discharge chain, which is what
// makes it usable as an oracle for it.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bdm/errors.hpp"

namespace bdm {

using Symbol = std::uint32_t;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

/// Field size of F_q with q prime.
class FieldSpec {
 public:
  explicit FieldSpec(std::uint64_t q) : q_(q) {
    if (q < 2) throw ParameterError("field size must be at least 2, got " + std::to_string(q));
    if (q > (std::uint64_t{1} << 31)) throw ParameterError("field size too large: " + std::to_string(q));
    if (!is_prime(q)) {
      std::uint64_t p = 2;
      while (q % p != 0) ++p;
      std::uint64_t r = q;
      while (r % p == 0) r /= p;
      if (r == 1)
        throw NonPrimeFieldError("q = " + std::to_string(q) + " is a prime power p^k with k > 1; only prime fields are supported");
      throw ParameterError("q = " + std::to_string(q) + " is not a field size");
    }
  }

  std::uint64_t q() const noexcept { return q_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept { return (a + b) % q_; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept { return (a + q_ - b) % q_; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept { return (a * b) % q_; }
  std::uint64_t inv(std::uint64_t a) const {
    if (a % q_ == 0) throw ParameterError("inverse of zero");
    // a^(q-2) by square-and-multiply
    std::uint64_t r = 1, base = a % q_, e = q_ - 2;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

 private:
  std::uint64_t q_;
};

/// M parallel streams of n symbols each, stored stream-major.
class Multisequence {
 public:
  Multisequence(FieldSpec field, std::size_t M, std::size_t n)
      : field_(field), M_(M), n_(n), symbols_(M * n, 0) {
    if (M < 1) throw ParameterError("stream count M must be at least 1");
  }

  Multisequence(FieldSpec field, std::vector<std::vector<Symbol>> rows)
      : field_(field), M_(rows.size()), n_(rows.empty() ? 0 : rows.front().size()) {
    if (M_ < 1) throw ParameterError("stream count M must be at least 1");
    symbols_.reserve(M_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw ParameterError("ragged multisequence rows");
      for (Symbol s : row) {
        check_symbol(s);
        symbols_.push_back(s);
      }
    }
  }

  const FieldSpec& field() const noexcept { return field_; }
  std::uint64_t q() const noexcept { return field_.q(); }
  std::size_t streams() const noexcept { return M_; }
  std::size_t columns() const noexcept { return n_; }

  /// Symbol of stream m at position j, both 0-based.
  Symbol at(std::size_t m, std::size_t j) const { return symbols_[m * n_ + j]; }
  void set(std::size_t m, std::size_t j, Symbol s) {
    check_symbol(s);
    symbols_[m * n_ + j] = s;
  }
  std::span<const Symbol> stream(std::size_t m) const {
    return {symbols_.data() + m * n_, n_};
  }

  /// The first `n` columns.
  Multisequence prefix(std::size_t n) const {
    Multisequence out(field_, M_, n);
    for (std::size_t m = 0; m < M_; ++m)
      for (std::size_t j = 0; j < n; ++j) out.symbols_[m * n + j] = at(m, j);
    return out;
  }

 private:
  void check_symbol(Symbol s) const {
    if (s >= field_.q())
      throw ParameterError("symbol " + std::to_string(s) + " outside [0," + std::to_string(field_.q()) + ")");
  }

  FieldSpec field_;
  std::size_t M_;
  std::size_t n_;
  std::vector<Symbol> symbols_;
};

/// ceil(n*M/(M+1)), the typical joint linear complexity after n columns.
inline std::int64_t typical_complexity(std::size_t n, std::size_t M) {
  return static_cast<std::int64_t>((n * M + M) / (M + 1));
}

/// L(n) - ceil(n*M/(M+1)).
inline std::int64_t deviation(std::size_t L, std::size_t n, std::size_t M) {
  return static_cast<std::int64_t>(L) - typical_complexity(n, M);
}

namespace detail {

// Solves sum_i alpha_i * a[j-i] = a[j] for every stream and every L <= j < len
// (0-based j), one set of alphas shared by all streams. Streams may have
// different lengths, which is how partial columns are represented.
inline std::optional<std::vector<std::uint64_t>> solve_jagged(
    const FieldSpec& F, std::span<const std::span<const Symbol>> streams, std::size_t L) {
  const std::size_t width = L + 1;  // L coefficients plus right-hand side
  std::vector<std::uint64_t> rows;
  std::size_t nrows = 0;
  for (const auto& s : streams) {
    for (std::size_t j = L; j < s.size(); ++j) {
      for (std::size_t i = 1; i <= L; ++i) rows.push_back(s[j - i]);
      rows.push_back(s[j]);
      ++nrows;
    }
  }
  auto cell = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return rows[r * width + c]; };

  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < L && rank < nrows; ++c) {
    std::size_t p = rank;
    while (p < nrows && cell(p, c) == 0) ++p;
    if (p == nrows) continue;
    if (p != rank)
      for (std::size_t k = 0; k < width; ++k) std::swap(cell(p, k), cell(rank, k));
    const std::uint64_t inv = F.inv(cell(rank, c));
    for (std::size_t k = c; k < width; ++k) cell(rank, k) = F.mul(cell(rank, k), inv);
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == rank || cell(r, c) == 0) continue;
      const std::uint64_t f = cell(r, c);
      for (std::size_t k = c; k < width; ++k) cell(r, k) = F.sub(cell(r, k), F.mul(f, cell(rank, k)));
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < nrows; ++r)
    if (cell(r, L) != 0) return std::nullopt;

  std::vector<std::uint64_t> alpha(L, 0);  // free variables set to zero
  for (std::size_t r = 0; r < rank; ++r) alpha[pivot_col[r]] = cell(r, L);
  return alpha;
}

inline std::size_t joint_lc_jagged(const FieldSpec& F, std::span<const std::span<const Symbol>> streams,
                                   std::size_t start = 0) {
  std::size_t longest = 0;
  for (const auto& s : streams) longest = std::max(longest, s.size());
  // A recurrence of length L extends to length L+1 with alpha_{L+1} = 0, so
  // the smallest feasible L can be found by a forward scan.
  for (std::size_t L = start; L < longest; ++L)
    if (solve_jagged(F, streams, L)) return L;
  return longest;
}

inline std::vector<std::span<const Symbol>> full_streams(const Multisequence& s) {
  std::vector<std::span<const Symbol>> out;
  for (std::size_t m = 0; m < s.streams(); ++m) out.push_back(s.stream(m));
  return out;
}

}  // namespace detail

/// Coefficients alpha_1..alpha_L of a shared length-L recurrence generating
/// every stream of `prefix`, if one exists.
inline std::optional<std::vector<std::uint64_t>> find_recurrence(const Multisequence& prefix, std::size_t L) {
  if (L > prefix.columns()) throw ParameterError("recurrence length exceeds prefix length");
  auto streams = detail::full_streams(prefix);
  return detail::solve_jagged(prefix.field(), streams, L);
}

inline bool solve_recurrence(const Multisequence& prefix, std::size_t L) {
  return find_recurrence(prefix, L).has_value();
}

/// Joint linear complexity: the least L admitting a shared recurrence.
inline std::size_t joint_lc(const Multisequence& prefix) {
  auto streams = detail::full_streams(prefix);
  return detail::joint_lc_jagged(prefix.field(), streams);
}

/// Linear complexity profile, symbol by symbol in the order
/// (0,M),(1,1),...,(1,M),(2,1),... and at full columns.
struct Profile {
  std::size_t M = 1;
  std::size_t n = 0;
  /// symbol_lc[0] is the empty prefix; symbol_lc[(k-1)*M + m] is the prefix
  /// through symbol m (1-based) of column k.
  std::vector<std::size_t> symbol_lc;
  std::vector<std::size_t> column_lc;   ///< L(k), k = 0..n
  std::vector<std::int64_t> deviation;  ///< d(k), k = 0..n

  std::size_t at(std::size_t column, std::size_t m) const {
    if (column == 0) return symbol_lc.front();
    return symbol_lc.at((column - 1) * M + m);
  }
};

inline Profile profile(const Multisequence& seq) {
  const std::size_t M = seq.streams(), n = seq.columns();
  Profile p;
  p.M = M;
  p.n = n;
  p.symbol_lc.reserve(1 + M * n);
  p.symbol_lc.push_back(0);
  p.column_lc.push_back(0);
  p.deviation.push_back(0);

  std::vector<std::span<const Symbol>> streams(M);
  std::size_t L = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t m = 1; m <= M; ++m) {
      // Streams 1..m hold k symbols, the rest k-1.
      for (std::size_t r = 0; r < M; ++r) streams[r] = seq.stream(r).first(r < m ? k : k - 1);
      L = detail::joint_lc_jagged(seq.field(), streams, L);
      p.symbol_lc.push_back(L);
    }
    p.column_lc.push_back(L);
    p.deviation.push_back(deviation(L, k, M));
  }
  return p;
}

/// Default cap on q^(M*n) for exhaustive enumeration.
inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 26;

/// N(n,d;q): how many of the q^(M*n) prefixes have deviation d.
inline std::map<std::int64_t, std::uint64_t> exhaustive_histogram(
    std::uint64_t q, std::size_t M, std::size_t n,
    std::uint64_t budget = kDefaultEnumerationBudget, unsigned threads = 1) {
  const FieldSpec F(q);
  if (M < 1) throw ParameterError("stream count M must be at least 1");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < M * n; ++i) {
    if (total > budget / q) {
      throw BudgetExceeded("q^(M*n) = " + std::to_string(q) + "^" + std::to_string(M * n) +
                           " prefixes exceeds the enumeration budget of " + std::to_string(budget) +
                           "; reduce n or raise --budget");
    }
    total *= q;
  }

  threads = std::max(1u, threads);
  const std::uint64_t shards = std::min<std::uint64_t>(threads, total);
  std::vector<std::map<std::int64_t, std::uint64_t>> partial(shards);

  auto work = [&](std::uint64_t shard) {
    const std::uint64_t lo = total * shard / shards, hi = total * (shard + 1) / shards;
    std::vector<Symbol> buf(M * n);
    std::vector<std::span<const Symbol>> streams(M);
    for (std::size_t m = 0; m < M; ++m) streams[m] = std::span<const Symbol>(buf.data() + m * n, n);
    auto& hist = partial[shard];
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      std::uint64_t x = idx;
      for (std::size_t k = 0; k < M * n; ++k) {
        buf[k] = static_cast<Symbol>(x % q);
        x /= q;
      }
      ++hist[deviation(detail::joint_lc_jagged(F, streams), n, M)];
    }
  };

  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }

  std::map<std::int64_t, std::uint64_t> out;
  for (const auto& h : partial)
    for (const auto& [d, c] : h) out[d] += c;
  return out;
}

/// Reads the text form: a header line `q M n`, then M lines of n symbols.
inline Multisequence parse_multisequence(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError("missing header `q M n`", lineno + 1);
  std::istringstream hdr(line);
  long long q = 0, M = 0, n = 0;
  if (!(hdr >> q >> M >> n)) throw ParseError("header must be `q M n`", lineno);
  std::string extra;
  if (hdr >> extra) throw ParseError("trailing text in header: " + extra, lineno);
  if (q < 2) throw ParseError("q must be at least 2", lineno);
  if (M < 1) throw ParseError("M must be at least 1", lineno);
  if (n < 0) throw ParseError("n must be nonnegative", lineno);
  const std::size_t header_line = lineno;
  std::optional<FieldSpec> field;
  try {
    field.emplace(static_cast<std::uint64_t>(q));
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), header_line);
  }

  std::vector<std::vector<Symbol>> rows;
  for (long long m = 0; m < M; ++m) {
    std::vector<Symbol> row;
    if (n > 0) {
      if (!next_line()) throw ParseError("expected " + std::to_string(M) + " stream lines", lineno + 1);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        std::size_t used = 0;
        long long v = -1;
        try {
          v = std::stoll(tok, &used);
        } catch (const std::exception&) {
          throw ParseError("not an integer: " + tok, lineno);
        }
        if (used != tok.size()) throw ParseError("not an integer: " + tok, lineno);
        if (v < 0 || v >= q)
          throw ParseError("symbol " + tok + " outside [0," + std::to_string(q) + ")", lineno);
        row.push_back(static_cast<Symbol>(v));
      }
      if (static_cast<long long>(row.size()) != n)
        throw ParseError("expected " + std::to_string(n) + " symbols, found " + std::to_string(row.size()), lineno);
    }
    rows.push_back(std::move(row));
  }
  if (next_line()) throw ParseError("unexpected extra line", lineno);
  if (n == 0) {
    Multisequence empty(*field, static_cast<std::size_t>(M), 0);
    return empty;
  }
  return Multisequence(*field, std::move(rows));
}

inline void write_multisequence(std::ostream& out, const Multisequence& s) {
  out << s.q() << ' ' << s.streams() << ' ' << s.columns() << '\n';
  for (std::size_t m = 0; m < s.streams(); ++m) {
    for (std::size_t j = 0; j < s.columns(); ++j) out << (j ? " " : "") << s.at(m, j);
    out << '\n';
  }
}

}  // namespace bdm
