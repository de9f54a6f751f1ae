#pragma once

// Multi-round learners. Relevant variables (or bins of a projection) are
// found by binary search between two assignments with different answers, or
// identified in one round when a projection already isolates them.

#include <array>

#include "junta/nonadaptive.hpp"

namespace junta {

// ---------------------------------------------------------------------------
// Binary search between a and a2, which differ exactly on y.

/// Halving state: a and a2 differ exactly on y and f(a) != f(a2).
class BinarySearch {
 public:
  BinarySearch(Assignment a, Assignment a2, bool fa, bool fa2, std::vector<std::size_t> y)
      : a_(std::move(a)), a2_(std::move(a2)), fa_(fa), fa2_(fa2), y_(std::move(y)) {
    require(fa_ != fa2_, "binary search: the two assignments have equal answers");
    require(!y_.empty(), "binary search: empty difference set");
    std::sort(y_.begin(), y_.end());
  }

  bool done() const { return y_.size() == 1; }
  std::size_t result() const { return y_.front(); }
  const Assignment& low() const { return a_; }
  const Assignment& high() const { return a2_; }

  /// a'': a on the first ceil(|y|/2) elements of y, a2 on the rest.
  Assignment next_query() const {
    Assignment q = a2_;
    for (std::size_t k = 0; k < split(); ++k) q.set(y_[k], a_.bit(y_[k]));
    return q;
  }

  void feed(bool answer) {
    const Assignment q = next_query();
    const std::size_t s = split();
    if (answer != fa_) {
      // q and a differ exactly on the second part.
      a2_ = q;
      fa2_ = answer;
      y_.erase(y_.begin(), y_.begin() + static_cast<std::ptrdiff_t>(s));
    } else {
      // q and a2 differ exactly on the first part.
      a_ = q;
      y_.resize(s);
    }
  }

 private:
  std::size_t split() const { return (y_.size() + 1) / 2; }

  Assignment a_, a2_;
  bool fa_, fa2_;
  std::vector<std::size_t> y_;
};

struct SearchResult {
  std::size_t index = 0;
  Assignment low, high;  // differ only at index, with different answers
};

/// One query per round until a single coordinate remains.
inline SearchResult binary_search_relevant(Oracle& o, const Assignment& a, const Assignment& a2, bool fa, bool fa2,
                                           std::vector<std::size_t> y) {
  BinarySearch bs(a, a2, fa, fa2, std::move(y));
  while (!bs.done()) bs.feed(o.query(bs.next_query()));
  return {bs.result(), bs.low(), bs.high()};
}

inline std::vector<std::size_t> differing(const Assignment& a, const Assignment& b) {
  std::vector<std::size_t> y;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.bit(i) != b.bit(i)) y.push_back(i);
  return y;
}

// ---------------------------------------------------------------------------
// One-round identification of the single relevant variable in y.

/// Row r < L = ceil(log2 |y|) takes a2 on the members y_k with bit r of k set
/// and a elsewhere; the last row is a2. Column k is (binary k, 1).
inline AssignmentSet identify_queries(const Assignment& a, const Assignment& a2, std::span<const std::size_t> y) {
  require(!y.empty(), "identify: empty variable set");
  const std::size_t L = ceil_log2(y.size());
  AssignmentSet rows(a.size());
  for (std::size_t r = 0; r < L; ++r) {
    Assignment q = a;
    for (std::size_t k = 0; k < y.size(); ++k)
      if ((k >> r) & 1U) q.set(y[k], a2.bit(y[k]));
    rows.push_back(q);
  }
  rows.push_back(a2);
  return rows;
}

/// The member whose column equals the answers or their negation.
inline std::optional<std::size_t> identify_decode(std::span<const std::size_t> y, const BitsRef& ans) {
  const std::size_t L = ceil_log2(y.size());
  require(ans.size() == L + 1, "identify: answer count mismatch");
  const bool neg = ans[L] == 0;
  std::size_t k = 0;
  for (std::size_t r = 0; r < L; ++r)
    if ((ans[r] != 0) != neg) k |= std::size_t{1} << r;
  if (k >= y.size()) return std::nullopt;
  return y[k];
}

inline std::optional<std::size_t> oneround_identify(Oracle& o, const Assignment& a, const Assignment& a2,
                                                    std::span<const std::size_t> y) {
  Round r;
  r.add(view_of(identify_queries(a, a2, y)));
  const auto ans = o.ask(r);
  return identify_decode(y, ans.segment(0));
}

/// Lexicographically first table index pair differing only in position p.
inline std::pair<std::size_t, std::size_t> sensitive_pair(const Junta& g, std::size_t p) {
  const std::size_t mask = std::size_t{1} << (g.arity() - 1 - p);
  for (std::size_t i = 0; i < g.table.size(); ++i)
    if ((i & mask) == 0 && g.table[i] != g.table[i | mask]) return {i, i | mask};
  throw ContractViolation("sensitive_pair: position not relevant");
}

/// Bin-space assignment with the relevant bins of g set to table index idx
/// and every other bin 0.
inline Assignment bins_for_index(const Junta& g, std::size_t idx) {
  Assignment v(g.n);
  for (std::size_t p = 0; p < g.arity(); ++p) v.set(g.relevant[p], (idx >> (g.arity() - 1 - p)) & 1U);
  return v;
}

/// One round: for each relevant bin of g (a function of the bins of `map`)
/// identifies the original variable it stands for and remaps g. No round is
/// asked when g is constant.
inline LearnerResult identify_round(Oracle& o, const Junta& g, std::span<const std::uint32_t> map) {
  const std::size_t n = map.size();
  if (g.arity() == 0) return LearnerResult::success(Junta{n, {}, g.table});
  Round round;
  std::vector<std::vector<std::size_t>> ys;
  for (std::size_t p = 0; p < g.arity(); ++p) {
    const auto [lo, hi] = sensitive_pair(g, p);
    const Assignment a = expand(bins_for_index(g, lo), map);
    const Assignment a2 = expand(bins_for_index(g, hi), map);
    ys.push_back(differing(a, a2));
    if (ys.back().empty()) return LearnerResult::failure(n, "bin " + std::to_string(g.relevant[p] + 1) + " is empty");
    round.add(view_of(identify_queries(a, a2, ys.back())));
  }
  const auto ans = o.ask(round);
  std::vector<std::size_t> vars;
  for (std::size_t p = 0; p < g.arity(); ++p) {
    const auto v = identify_decode(ys[p], ans.segment(p));
    if (!v) return LearnerResult::failure(n, "identification failed in bin " + std::to_string(g.relevant[p] + 1));
    vars.push_back(*v);
  }
  return LearnerResult::success(Junta::make(n, vars, g.table));
}

// ---------------------------------------------------------------------------
// Adaptive learner from a universal set.

/// Asked assignments and answers in insertion order.
struct History {
  std::vector<Assignment> rows;
  std::vector<std::uint8_t> answers;

  void add(Assignment a, bool v) {
    rows.push_back(std::move(a));
    answers.push_back(v ? 1 : 0);
  }

  /// First pair (i < j, smallest j, then smallest i) agreeing on `on` with
  /// different answers.
  std::optional<std::pair<std::size_t, std::size_t>> witness_pair(std::span<const std::size_t> on) const {
    std::map<std::vector<std::uint8_t>, std::array<std::optional<std::size_t>, 2>> first;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::vector<std::uint8_t> key;
      for (auto v : on) key.push_back(rows[j].bit(v) ? 1 : 0);
      auto& slot = first[key];
      if (const auto& other = slot[1 - answers[j]]) return std::pair{*other, j};
      if (!slot[answers[j]]) slot[answers[j]] = j;
    }
    return std::nullopt;
  }

  /// Table over `vars` from every asked row; nullopt when a pattern is missing.
  std::optional<std::vector<std::uint8_t>> table_over(std::span<const std::size_t> vars) const {
    std::vector<int> t(std::size_t{1} << vars.size(), -1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::size_t idx = 0;
      for (auto v : vars) idx = (idx << 1) | static_cast<std::size_t>(rows[r].bit(v));
      t[idx] = answers[r];
    }
    std::vector<std::uint8_t> out;
    for (int x : t) {
      if (x < 0) return std::nullopt;
      out.push_back(static_cast<std::uint8_t>(x));
    }
    return out;
  }
};

inline LearnerResult learn_adaptive_universal(Oracle& o, std::size_t n, std::size_t d, const AssignmentSet& u) {
  require(u.n() == n && o.n() == n, "learn_adaptive_universal: width mismatch");
  const QueryStats before = o.stats();
  History hist;
  const auto first = o.query_batch(u);
  for (std::size_t r = 0; r < u.size(); ++r) hist.add(u.row(r), first[r] != 0);
  std::vector<std::size_t> rel;
  auto finish = [&](LearnerResult r) {
    r.stats = o.stats() - before;
    return r;
  };
  while (true) {
    const auto pair = hist.witness_pair(rel);
    if (!pair) break;
    if (rel.size() == d) return finish(LearnerResult::failure(n, "more than d relevant variables"));
    const auto [i, j] = *pair;
    BinarySearch bs(hist.rows[i], hist.rows[j], hist.answers[i] != 0, hist.answers[j] != 0,
                    differing(hist.rows[i], hist.rows[j]));
    while (!bs.done()) {
      const Assignment q = bs.next_query();
      const bool v = o.query(q);
      hist.add(q, v);
      bs.feed(v);
    }
    rel.push_back(bs.result());
    std::sort(rel.begin(), rel.end());
  }
  const auto table = hist.table_over(rel);
  if (!table) return finish(LearnerResult::failure(n, "table incomplete over " + detail::format_vars(rel)));
  return finish(LearnerResult::success(Junta::make(n, rel, *table)));
}

// ---------------------------------------------------------------------------
// Two-round learners: learn projections f_h in round 1, identify in round 2.

inline std::size_t cube(std::size_t d) { return d * d * d; }

/// Number of random partitions: 1 when delta > 1/d (or d = 1), otherwise
/// ceil(ln(1/delta) / ln d).
inline std::size_t partition_count(std::size_t d, double delta) {
  require(delta > 0 && delta < 1, "partition_count: delta must lie in (0,1)");
  const double dd = static_cast<double>(d);
  if (d < 2 || delta > 1.0 / dd) return 1;
  return ceil_pos(std::log(1.0 / delta) / std::log(dd));
}

/// Picks the first candidate of maximum arity and identifies its bins.
inline LearnerResult finish_two_round(Oracle& o, std::span<const LearnerResult> cand,
                                      std::span<const std::vector<std::uint32_t>> maps, const QueryStats& before) {
  const std::size_t n = o.n();
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < cand.size(); ++k)
    if (cand[k].ok && (!best || cand[k].output.arity() > cand[*best].output.arity())) best = k;
  LearnerResult r = best ? identify_round(o, cand[*best].output, maps[*best])
                         : LearnerResult::failure(n, "every projected run failed: " + cand.front().witness);
  r.stats = o.stats() - before;
  return r;
}

inline LearnerResult two_round_with(Oracle& o, std::span<const std::vector<std::uint32_t>> maps,
                                    std::span<const OneRoundPlan* const> plans) {
  const QueryStats before = o.stats();
  std::vector<PlanJob> jobs;
  for (std::size_t k = 0; k < maps.size(); ++k) jobs.push_back({plans[k], share_map(maps[k])});
  const auto cand = run_plans(o, jobs);
  return finish_two_round(o, cand, maps, before);
}

/// Round 1 learns f_h for every h of an (n,d^3,d)-perfect hash family with the
/// equivalent-set learner on d^3 variables.
inline LearnerResult learn_tworound_det(Oracle& o, std::size_t n, std::size_t d) {
  require(d >= 1 && d <= n && o.n() == n, "learn_tworound_det: needs 1 <= d <= n");
  const auto h = design_cache().phf(n, cube(d), d);
  const EquivsetPlan plan(design_cache().bcf(h->q, std::min(d, h->q)), d);
  std::vector<const OneRoundPlan*> plans(h->size(), &plan);
  return two_round_with(o, h->maps, plans);
}

inline std::vector<std::vector<std::uint32_t>> random_partitions(std::size_t n, std::size_t bins, std::size_t count,
                                                                 Rng& rng) {
  std::vector<std::vector<std::uint32_t>> maps;
  for (std::size_t k = 0; k < count; ++k) maps.push_back(random_map(n, bins, rng));
  return maps;
}

/// Round 1 learns f_p for random partitions p into d^3 bins with the
/// equivalent-set learner.
inline LearnerResult learn_tworound_rand(Oracle& o, std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(d >= 1 && d <= n && o.n() == n, "learn_tworound_rand: needs 1 <= d <= n");
  const std::size_t q = cube(d);
  const auto maps = random_partitions(n, q, partition_count(d, delta), rng);
  const EquivsetPlan plan(design_cache().bcf(q, d), d);
  std::vector<const OneRoundPlan*> plans(maps.size(), &plan);
  return two_round_with(o, maps, plans);
}

/// Round 1 learns f_p for random partitions p with the randomized one-round
/// learner at 1/d (at delta itself when a single partition suffices).
inline LearnerResult learn_poly_tworound(Oracle& o, std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(d >= 1 && d <= n && o.n() == n, "learn_poly_tworound: needs 1 <= d <= n");
  const std::size_t q = cube(d);
  const std::size_t parts = partition_count(d, delta);
  const double base_delta = parts > 1 ? 1.0 / static_cast<double>(d) : delta;
  const std::uint64_t master = rng();
  std::vector<std::vector<std::uint32_t>> maps;
  std::vector<std::unique_ptr<RandnaPlan>> owned;
  std::vector<const OneRoundPlan*> plans;
  for (std::size_t k = 0; k < parts; ++k) {
    Rng sub(derive_seed(master, k));
    maps.push_back(random_map(n, q, sub));
    owned.push_back(std::make_unique<RandnaPlan>(q, d, base_delta, sub));
    plans.push_back(owned.back().get());
  }
  return two_round_with(o, maps, plans);
}

// ---------------------------------------------------------------------------
// O(d log d)-round learner.

inline constexpr double multiround_C = 4.0;

inline std::size_t multiround_pool_size(std::size_t d, double delta_part) {
  const double two_d = std::ldexp(1.0, static_cast<int>(d));
  return ceil_pos(two_d * (std::log(2.0 * static_cast<double>(d)) + std::log(2.0 / delta_part)));
}

/// Rounds allowed by the documented constant: C d log2(d+1).
inline double multiround_round_bound(std::size_t d) {
  return multiround_C * static_cast<double>(d) * std::log2(static_cast<double>(d) + 1.0);
}

inline LearnerResult learn_multiround(Oracle& o, std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(d >= 1 && d <= n && o.n() == n, "learn_multiround: needs 1 <= d <= n");
  const QueryStats before = o.stats();
  const std::size_t q = cube(d);
  const std::size_t parts = partition_count(d, delta);
  const double delta_part = parts > 1 ? 1.0 / static_cast<double>(d) : delta;
  const std::size_t pool = multiround_pool_size(d, delta_part);

  // Stage 0: one pool of bin-space assignments per partition.
  const auto maps = random_partitions(n, q, parts, rng);
  std::vector<History> hist(parts);
  {
    Round round;
    for (std::size_t p = 0; p < parts; ++p) {
      AssignmentSet s(q);
      for (std::size_t k = 0; k < pool; ++k) s.push_back(Assignment::random(q, rng));
      hist[p].rows = s.rows();
      round.add(std::make_shared<ProjectedView>(view_of(std::move(s)), share_map(maps[p])));
    }
    const auto ans = o.ask(round);
    for (std::size_t p = 0; p < parts; ++p)
      for (std::size_t k = 0; k < pool; ++k) hist[p].answers.push_back(ans.segment(p)[k]);
  }

  // Stage 1: synchronous phases; each phase adds at most one bin per partition.
  std::vector<std::vector<std::size_t>> found(parts);
  std::vector<std::uint8_t> active(parts, 1);
  for (std::size_t phase = 0; phase < d; ++phase) {
    std::vector<std::pair<std::size_t, BinarySearch>> searches;
    for (std::size_t p = 0; p < parts; ++p) {
      if (!active[p]) continue;
      const auto pair = hist[p].witness_pair(found[p]);
      if (!pair) {
        active[p] = 0;
        continue;
      }
      const auto [i, j] = *pair;
      const auto& h = hist[p];
      searches.emplace_back(p, BinarySearch(h.rows[i], h.rows[j], h.answers[i] != 0, h.answers[j] != 0,
                                            differing(h.rows[i], h.rows[j])));
    }
    if (searches.empty()) break;
    while (true) {
      Round round;
      std::vector<std::size_t> live;
      std::vector<Assignment> asked;
      for (std::size_t s = 0; s < searches.size(); ++s) {
        if (searches[s].second.done()) continue;
        live.push_back(s);
        asked.push_back(searches[s].second.next_query());
        round.add(expand(asked.back(), maps[searches[s].first]));
      }
      if (live.empty()) break;
      const auto ans = o.ask(round);
      for (std::size_t k = 0; k < live.size(); ++k) {
        const bool v = ans.segment(k)[0] != 0;
        hist[searches[live[k]].first].add(asked[k], v);
        searches[live[k]].second.feed(v);
      }
    }
    for (auto& [p, bs] : searches) {
      found[p].push_back(bs.result());
      std::sort(found[p].begin(), found[p].end());
      if (found[p].size() == d) active[p] = 0;
    }
  }

  std::size_t best = 0;
  for (std::size_t p = 1; p < parts; ++p)
    if (found[p].size() > found[best].size()) best = p;
  const auto& bins = found[best];

  // Stage 2: every pattern on the discovered bins, all other bins 0.
  Round round;
  AssignmentSet patterns(q);
  for (std::size_t idx = 0; idx < (std::size_t{1} << bins.size()); ++idx) {
    Assignment v(q);
    for (std::size_t k = 0; k < bins.size(); ++k) v.set(bins[k], (idx >> (bins.size() - 1 - k)) & 1U);
    patterns.push_back(v);
  }
  round.add(std::make_shared<ProjectedView>(view_of(std::move(patterns)), share_map(maps[best])));
  const auto ans = o.ask(round);
  std::vector<std::uint8_t> table;
  for (std::size_t idx = 0; idx < (std::size_t{1} << bins.size()); ++idx) table.push_back(ans.segment(0)[idx]);
  const Junta g = Junta::make(q, bins, std::move(table));

  // Stage 3: identify the variable behind each relevant bin.
  LearnerResult r = identify_round(o, g, maps[best]);
  r.stats = o.stats() - before;
  return r;
}

}  // namespace junta
