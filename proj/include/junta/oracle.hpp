#pragma once

// Membership oracle with query/round accounting. A round is one submitted
// batch; batches are built from lazily evaluated query views so that large
// composite rounds (projections, perturbation blocks) never need to be
// materialized as n-bit rows. Views expose packed columns; a junta target is
// evaluated 64 rows at a time from the columns of its relevant variables.

#include <memory>
#include <optional>
#include <utility>

#include "junta/core.hpp"

namespace junta {

inline std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

/// Mask of the valid bits of the last word of a `bits`-long packed vector.
inline std::uint64_t tail_mask(std::size_t bits) {
  return bits % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (bits % 64)) - 1;
}

/// Column-major packed bit matrix: cols() columns of rows() bits each.
class PackedColumns {
 public:
  PackedColumns() = default;
  PackedColumns(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(word_count(rows)), data_(stride_ * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const std::uint64_t> col(std::size_t c) const { return {data_.data() + c * stride_, stride_}; }
  std::span<std::uint64_t> col(std::size_t c) { return {data_.data() + c * stride_, stride_}; }
  bool bit(std::size_t r, std::size_t c) const { return (data_[c * stride_ + r / 64] >> (r % 64)) & 1U; }
  void set(std::size_t r, std::size_t c) { data_[c * stride_ + r / 64] |= std::uint64_t{1} << (r % 64); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Rows whose bits are i.i.d. with probability 1/den of being 1.
inline PackedColumns bernoulli_columns(std::size_t rows, std::size_t cols, std::uint64_t den, Rng& rng) {
  PackedColumns m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      if (uniform_below(rng, den) == 0) m.set(r, c);
  return m;
}

/// Read-only table of queries: `size()` rows over `num_vars()` variables.
class QueryView {
 public:
  virtual ~QueryView() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t num_vars() const = 0;
  virtual bool bit(std::size_t row, std::size_t var) const = 0;

  /// Packed column of `var`; out has word_count(size()) words, tail bits 0.
  virtual void column(std::size_t var, std::span<std::uint64_t> out) const {
    std::fill(out.begin(), out.end(), 0);
    for (std::size_t r = 0; r < size(); ++r)
      if (bit(r, var)) out[r / 64] |= std::uint64_t{1} << (r % 64);
  }

  Assignment row(std::size_t r) const {
    Assignment a(num_vars());
    for (std::size_t v = 0; v < num_vars(); ++v) a.set(v, bit(r, v));
    return a;
  }
};

using ViewPtr = std::shared_ptr<const QueryView>;

class SetView final : public QueryView {
 public:
  explicit SetView(AssignmentSet set) : set_(std::move(set)) {}
  std::size_t size() const override { return set_.size(); }
  std::size_t num_vars() const override { return set_.n(); }
  bool bit(std::size_t row, std::size_t var) const override { return set_.bit(row, var); }
  const AssignmentSet& set() const { return set_; }

 private:
  AssignmentSet set_;
};

inline ViewPtr view_of(AssignmentSet set) { return std::make_shared<SetView>(std::move(set)); }

inline ViewPtr view_of(const Assignment& a) {
  AssignmentSet s(a.size());
  s.push_back(a);
  return view_of(std::move(s));
}

/// Queries over q bins expanded to n variables: x_i := v_{map[i]}.
class ProjectedView final : public QueryView {
 public:
  ProjectedView(ViewPtr inner, std::shared_ptr<const std::vector<std::uint32_t>> map)
      : inner_(std::move(inner)), map_(std::move(map)) {}
  std::size_t size() const override { return inner_->size(); }
  std::size_t num_vars() const override { return map_->size(); }
  bool bit(std::size_t row, std::size_t var) const override { return inner_->bit(row, (*map_)[var]); }
  void column(std::size_t var, std::span<std::uint64_t> out) const override {
    inner_->column((*map_)[var], out);
  }

 private:
  ViewPtr inner_;
  std::shared_ptr<const std::vector<std::uint32_t>> map_;
};

/// Rows a + b for every row b of a packed perturbation matrix.
class XorView final : public QueryView {
 public:
  XorView(Assignment a, std::shared_ptr<const PackedColumns> b) : a_(std::move(a)), b_(std::move(b)) {
    require(a_.size() == b_->cols(), "xor view: widths differ");
  }
  std::size_t size() const override { return b_->rows(); }
  std::size_t num_vars() const override { return a_.size(); }
  bool bit(std::size_t row, std::size_t var) const override { return a_.bit(var) != b_->bit(row, var); }
  void column(std::size_t var, std::span<std::uint64_t> out) const override {
    const auto c = b_->col(var);
    if (!a_.bit(var)) {
      std::copy(c.begin(), c.end(), out.begin());
      return;
    }
    for (std::size_t w = 0; w < c.size(); ++w) out[w] = ~c[w];
    if (!out.empty()) out.back() &= tail_mask(size());
  }

 private:
  Assignment a_;
  std::shared_ptr<const PackedColumns> b_;
};

/// Each row u of U followed by the n rows u with one coordinate flipped.
class BlockView final : public QueryView {
 public:
  explicit BlockView(AssignmentSet u) : u_(std::move(u)) {}
  std::size_t size() const override { return u_.size() * (u_.n() + 1); }
  std::size_t num_vars() const override { return u_.n(); }
  bool bit(std::size_t row, std::size_t var) const override {
    const std::size_t k = row % (u_.n() + 1);
    return u_.bit(row / (u_.n() + 1), var) != (k == var + 1);
  }

 private:
  AssignmentSet u_;
};

/// Expands one bin-space assignment to the n variables through `map`.
inline Assignment expand(const Assignment& bins, std::span<const std::uint32_t> map) {
  Assignment a(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) a.set(i, bins.bit(map[i]));
  return a;
}

struct QueryStats {
  std::uint64_t queries = 0;
  std::uint64_t rounds = 0;

  friend QueryStats operator-(QueryStats a, const QueryStats& b) {
    return {a.queries - b.queries, a.rounds - b.rounds};
  }
  friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

/// One batch of queries assembled from several segments.
class Round {
 public:
  /// Appends a segment; returns its index.
  std::size_t add(ViewPtr view) {
    require(view != nullptr, "round: null segment");
    total_ += view->size();
    segments_.push_back(std::move(view));
    return segments_.size() - 1;
  }
  std::size_t add(const Assignment& a) { return add(view_of(a)); }

  std::size_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::size_t segment_count() const { return segments_.size(); }
  const QueryView& segment(std::size_t s) const { return *segments_[s]; }

 private:
  std::vector<ViewPtr> segments_;
  std::size_t total_ = 0;
};

/// Packed answers of one segment.
class BitsRef {
 public:
  BitsRef(std::span<const std::uint64_t> words, std::size_t size) : words_(words), size_(size) {}
  std::size_t size() const { return size_; }
  std::uint8_t operator[](std::size_t r) const { return static_cast<std::uint8_t>((words_[r / 64] >> (r % 64)) & 1U); }
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  std::span<const std::uint64_t> words_;
  std::size_t size_;
};

/// Answers of one round, addressable per segment.
class RoundAnswers {
 public:
  std::size_t segment_count() const { return sizes_.size(); }
  BitsRef segment(std::size_t s) const {
    return {{words_.data() + offsets_[s], word_count(sizes_[s])}, sizes_[s]};
  }

  std::vector<std::uint8_t> flat() const {
    std::vector<std::uint8_t> out;
    for (std::size_t s = 0; s < segment_count(); ++s) {
      const BitsRef b = segment(s);
      for (std::size_t r = 0; r < b.size(); ++r) out.push_back(b[r]);
    }
    return out;
  }

 private:
  friend class Oracle;
  std::vector<std::uint64_t> words_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> sizes_;
};

/// Hidden target answering batches of membership queries.
class Oracle {
 public:
  explicit Oracle(Junta target) : n_(target.n), target_(std::move(target)) {}
  Oracle(std::size_t n, Evaluator f) : n_(n), evaluator_(std::move(f)) {}

  std::size_t n() const { return n_; }
  const QueryStats& stats() const { return stats_; }
  /// Query count of every round so far, in order.
  const std::vector<std::uint64_t>& round_sizes() const { return round_sizes_; }

  /// Submits one round. Every row counts as a query; the round counts once.
  RoundAnswers ask(const Round& round) {
    require(!round.empty(), "oracle: empty batch");
    RoundAnswers out;
    std::size_t total_words = 0;
    for (std::size_t s = 0; s < round.segment_count(); ++s) {
      const QueryView& v = round.segment(s);
      require(v.num_vars() == n_, "oracle: query length differs from n");
      out.offsets_.push_back(total_words);
      out.sizes_.push_back(v.size());
      total_words += word_count(v.size());
    }
    out.words_.assign(total_words, 0);
    for (std::size_t s = 0; s < round.segment_count(); ++s) {
      const QueryView& v = round.segment(s);
      answer(v, {out.words_.data() + out.offsets_[s], word_count(v.size())});
    }
    stats_.rounds += 1;
    stats_.queries += round.size();
    round_sizes_.push_back(round.size());
    return out;
  }

  std::vector<std::uint8_t> query_batch(const AssignmentSet& batch) {
    Round r;
    r.add(view_of(batch));
    return ask(r).flat();
  }

  bool query(const Assignment& a) {
    Round r;
    r.add(a);
    return ask(r).segment(0)[0] != 0;
  }

 private:
  void answer(const QueryView& v, std::span<std::uint64_t> out) const {
    if (!target_) {
      for (std::size_t r = 0; r < v.size(); ++r)
        if (evaluator_(v.row(r))) out[r / 64] |= std::uint64_t{1} << (r % 64);
      return;
    }
    const Junta& j = *target_;
    const std::size_t k = j.arity();
    const std::size_t words = out.size();
    std::vector<std::uint64_t> cols(k * words);
    for (std::size_t p = 0; p < k; ++p) v.column(j.relevant[p], {cols.data() + p * words, words});
    // Multiplexer tree over the table: level p selects on relevant[p].
    std::vector<std::uint64_t> acc(j.table.size());
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t i = 0; i < j.table.size(); ++i) acc[i] = j.table[i] ? ~std::uint64_t{0} : 0;
      for (std::size_t p = k; p-- > 0;) {
        const std::uint64_t c = cols[p * words + w];
        const std::size_t half = std::size_t{1} << p;
        for (std::size_t i = 0; i < half; ++i) acc[i] = (acc[2 * i] & ~c) | (acc[2 * i + 1] & c);
      }
      out[w] = acc[0];
    }
    if (words > 0) out[words - 1] &= tail_mask(v.size());
  }

  std::size_t n_;
  std::optional<Junta> target_;
  Evaluator evaluator_;
  QueryStats stats_;
  std::vector<std::uint64_t> round_sizes_;
};

struct LearnerResult {
  Junta output;
  QueryStats stats;
  bool ok = false;
  std::string witness;

  static LearnerResult success(Junta j) { return {std::move(j), {}, true, {}}; }
  static LearnerResult failure(std::size_t n, std::string why) {
    return {Junta::constant(n, false), {}, false, std::move(why)};
  }
};

}  // namespace junta
