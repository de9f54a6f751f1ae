#pragma once

// Assignments, truth-table juntas and the function-level utilities shared by
// every learner. Variable indices are 0-based in memory; the text formats
// (see io.hpp) use 1-based indices.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace junta {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a design construction cannot reach its target property.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* what) {
  if (!cond) throw ContractViolation(what);
}

// ---------------------------------------------------------------------------
// Random numbers. All randomized paths take an explicit engine; seeds for
// sub-procedures are derived with splitmix so replays are exact.

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, bound). Multiply-shift, platform independent.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const unsigned __int128 prod = static_cast<unsigned __int128>(rng()) * bound;
  return static_cast<std::uint64_t>(prod >> 64);
}

inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------

/// A point of {0,1}^n, packed little-endian into 64-bit words.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Assignment random(std::size_t n, Rng& rng) {
    Assignment a(n);
    for (auto& w : a.words_) w = rng();
    a.trim();
    return a;
  }

  /// Parses a string of '0'/'1'; character k is variable k.
  static Assignment from_string(const std::string& s) {
    Assignment a(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        a.set(i, true);
      else if (s[i] != '0')
        throw ContractViolation("assignment: characters must be 0 or 1");
    }
    return a;
  }

  std::size_t size() const { return n_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  bool bit(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  Assignment flipped(std::size_t i) const {
    Assignment a = *this;
    a.flip(i);
    return a;
  }

  Assignment& operator^=(const Assignment& o) {
    require(o.n_ == n_, "assignment xor: length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }
  friend Assignment operator^(Assignment a, const Assignment& b) { return a ^= b; }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
      if (bit(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

  /// Lexicographic order of the bit strings x_1 x_2 ... x_n with 0 < 1.
  friend bool lex_less(const Assignment& a, const Assignment& b) {
    for (std::size_t w = 0; w < a.words_.size(); ++w) {
      const std::uint64_t diff = a.words_[w] ^ b.words_[w];
      if (diff != 0) {
        const int low = std::countr_zero(diff);
        return ((b.words_[w] >> low) & 1U) != 0;
      }
    }
    return false;
  }

 private:
  void trim() {
    if (n_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// An ordered list of assignments over the same n, stored row-major.
class AssignmentSet {
 public:
  AssignmentSet() = default;
  explicit AssignmentSet(std::size_t n) : n_(n), stride_((n + 63) / 64) {}

  std::size_t n() const { return n_; }
  std::size_t size() const { return stride_ == 0 ? rows_ : data_.size() / stride_; }
  bool empty() const { return size() == 0; }

  void push_back(const Assignment& a) {
    require(a.size() == n_, "assignment set: row length differs from n");
    if (stride_ == 0) {
      ++rows_;
      return;
    }
    data_.insert(data_.end(), a.words().begin(), a.words().end());
  }

  void reserve(std::size_t rows) { data_.reserve(rows * stride_); }

  bool bit(std::size_t row, std::size_t var) const {
    return (data_[row * stride_ + (var >> 6)] >> (var & 63)) & 1U;
  }

  std::span<const std::uint64_t> row_words(std::size_t row) const {
    return {data_.data() + row * stride_, stride_};
  }

  Assignment row(std::size_t r) const {
    Assignment a(n_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_, a.words().begin());
    return a;
  }

  std::vector<Assignment> rows() const {
    std::vector<Assignment> out;
    out.reserve(size());
    for (std::size_t r = 0; r < size(); ++r) out.push_back(row(r));
    return out;
  }

  AssignmentSet without_row(std::size_t skip) const {
    AssignmentSet out(n_);
    for (std::size_t r = 0; r < size(); ++r)
      if (r != skip) out.push_back(row(r));
    return out;
  }

  friend bool operator==(const AssignmentSet&, const AssignmentSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::size_t rows_ = 0;  // only used when n == 0
  std::vector<std::uint64_t> data_;
};

// ---------------------------------------------------------------------------

/// A boolean function on n variables given by its relevant variables and a
/// truth table over them. Table index: first relevant variable is the most
/// significant bit.
struct Junta {
  std::size_t n = 0;
  std::vector<std::size_t> relevant;
  std::vector<std::uint8_t> table{0};

  std::size_t arity() const { return relevant.size(); }

  static Junta constant(std::size_t n, bool value) { return Junta{n, {}, {static_cast<std::uint8_t>(value)}}; }

  /// Builds a junta from any variable list (any order, possibly containing
  /// irrelevant variables). Sorts the variables, permutes the table to match
  /// and drops variables the table does not depend on.
  static Junta make(std::size_t n, std::vector<std::size_t> vars, std::vector<std::uint8_t> table);

  /// Table index of the pattern of `bits` read at the relevant variables.
  template <class BitFn>
  std::size_t index_of(BitFn&& bits) const {
    std::size_t idx = 0;
    for (auto v : relevant) idx = (idx << 1) | static_cast<std::size_t>(bits(v));
    return idx;
  }

  bool relevant_at(std::size_t pos) const {
    const std::size_t k = arity();
    const std::size_t mask = std::size_t{1} << (k - 1 - pos);
    for (std::size_t i = 0; i < table.size(); ++i)
      if ((i & mask) == 0 && table[i] != table[i | mask]) return true;
    return false;
  }

  /// Junta invariants: sorted distinct in-range indices, table length 2^d',
  /// every listed variable actually relevant.
  bool valid() const {
    if (table.size() != (std::size_t{1} << arity())) return false;
    for (std::size_t p = 0; p < arity(); ++p) {
      if (relevant[p] >= n) return false;
      if (p > 0 && relevant[p] <= relevant[p - 1]) return false;
      if (!relevant_at(p)) return false;
    }
    for (auto b : table)
      if (b > 1) return false;
    return true;
  }

  friend bool operator==(const Junta&, const Junta&) = default;
};

inline Junta Junta::make(std::size_t n, std::vector<std::size_t> vars, std::vector<std::uint8_t> table) {
  const std::size_t k = vars.size();
  require(table.size() == (std::size_t{1} << k), "junta: table length must be 2^|vars|");
  for (auto v : vars) require(v < n, "junta: variable index out of range");

  // Sort variables, permuting table bits accordingly.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
  for (std::size_t p = 1; p < k; ++p)
    require(vars[order[p]] != vars[order[p - 1]], "junta: duplicate variable");
  std::vector<std::uint8_t> sorted(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    // In the new table, position p holds old variable order[p].
    std::size_t old = 0;
    for (std::size_t p = 0; p < k; ++p) {
      const bool b = (i >> (k - 1 - p)) & 1U;
      if (b) old |= std::size_t{1} << (k - 1 - order[p]);
    }
    sorted[i] = table[old] ? 1 : 0;
  }
  Junta j{n, {}, std::move(sorted)};
  for (std::size_t p = 0; p < k; ++p) j.relevant.push_back(vars[order[p]]);

  // Drop variables the table ignores, last to first so positions stay valid.
  for (std::size_t p = k; p-- > 0;) {
    if (j.relevant_at(p)) continue;
    const std::size_t kk = j.arity();
    const std::size_t shift = kk - 1 - p;
    std::vector<std::uint8_t> reduced(j.table.size() / 2);
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      const std::size_t high = i >> shift;
      const std::size_t low = i & ((std::size_t{1} << shift) - 1);
      reduced[i] = j.table[(high << (shift + 1)) | low];
    }
    j.table = std::move(reduced);
    j.relevant.erase(j.relevant.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return j;
}

/// Value of the junta at `a`.
inline bool eval_junta(const Junta& j, const Assignment& a) {
  require(a.size() == j.n, "eval_junta: assignment length differs from n");
  return j.table[j.index_of([&](std::size_t v) { return a.bit(v); })] != 0;
}

/// True iff flipping variable i changes the value at a.
inline bool sensitive_wrt(const Junta& j, const Assignment& a, std::size_t i) {
  require(i < j.n, "sensitive_wrt: index out of range");
  return eval_junta(j, a) != eval_junta(j, a.flipped(i));
}

using Evaluator = std::function<bool(const Assignment&)>;

/// Exact relevant set of a black-box function by scanning all of {0,1}^n.
inline std::vector<std::size_t> relevant_variables_bruteforce(const Evaluator& f, std::size_t n) {
  require(n <= 24, "relevant_variables_bruteforce: n too large for exhaustive scan");
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<std::uint8_t> values(total);
  for (std::uint64_t x = 0; x < total; ++x) {
    Assignment a(n);
    a.words()[0] = x;
    values[x] = f(a) ? 1 : 0;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t m = std::uint64_t{1} << i;
    for (std::uint64_t x = 0; x < total; ++x) {
      if ((x & m) == 0 && values[x] != values[x | m]) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

/// Functional equality, checked over all patterns of the union of the two
/// relevant sets (all other variables are irrelevant to both).
inline bool juntas_equivalent(const Junta& a, const Junta& b) {
  require(a.n == b.n, "juntas_equivalent: different variable counts");
  std::vector<std::size_t> all;
  std::set_union(a.relevant.begin(), a.relevant.end(), b.relevant.begin(), b.relevant.end(), std::back_inserter(all));
  require(all.size() <= 30, "juntas_equivalent: union of relevant sets too large");
  Assignment x(a.n);
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << all.size()); ++p) {
    for (std::size_t k = 0; k < all.size(); ++k) x.set(all[k], (p >> k) & 1U);
    if (eval_junta(a, x) != eval_junta(b, x)) return false;
  }
  return true;
}

/// A member of the largest equivalence class; ties go to the class whose
/// first member appears earliest.
inline Junta plurality(std::span<const Junta> candidates) {
  require(!candidates.empty(), "plurality: no candidates");
  std::vector<std::size_t> reps;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (juntas_equivalent(candidates[reps[c]], candidates[i])) {
        ++counts[c];
        placed = true;
        break;
      }
    }
    if (!placed) {
      reps.push_back(i);
      counts.push_back(1);
    }
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < reps.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return candidates[reps[best]];
}

/// Picks d distinct variables and a uniform table over them, then prunes.
inline Junta random_junta(std::size_t n, std::size_t d, Rng& rng) {
  require(d <= n, "random_junta: d must not exceed n");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < d; ++i) std::swap(perm[i], perm[i + uniform_below(rng, n - i)]);
  std::vector<std::size_t> vars(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(d));
  std::vector<std::uint8_t> table(std::size_t{1} << d);
  for (auto& t : table) t = static_cast<std::uint8_t>(rng() & 1U);
  return Junta::make(n, std::move(vars), std::move(table));
}

/// Term x_{i_1}^{s_1} ... x_{i_k}^{s_k}: 1 exactly on the given pattern.
inline Junta term_junta(std::size_t n, std::span<const std::size_t> vars, std::span<const std::uint8_t> pattern) {
  require(vars.size() == pattern.size(), "term_junta: pattern length mismatch");
  std::vector<std::uint8_t> table(std::size_t{1} << vars.size(), 0);
  std::size_t idx = 0;
  for (auto b : pattern) idx = (idx << 1) | (b ? 1U : 0U);
  table[idx] = 1;
  return Junta::make(n, {vars.begin(), vars.end()}, std::move(table));
}

// Small combinatorial helpers used across modules.

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint64_t>(r);
}

/// Advances `c` (sorted, values < n) to the next k-subset in lexicographic
/// order; returns false after the last one.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::size_t ceil_log2(std::size_t x) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

}  // namespace junta
