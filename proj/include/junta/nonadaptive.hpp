#pragma once

// One-round learners. Each learner is a plan: a fixed list of query segments
// over its own variable space plus a decoder of their answers. Plans for
// projected functions f_h are batched into a single round by run_plans, which
// expands every segment through its map (x_i := v_{h(i)}).

#include <cmath>

#include "junta/cache.hpp"
#include "junta/oracle.hpp"

namespace junta {

/// The answers belonging to one plan inside a round.
class AnswerSlice {
 public:
  AnswerSlice(const RoundAnswers& ans, std::size_t first, std::size_t count)
      : ans_(&ans), first_(first), count_(count) {}
  std::size_t size() const { return count_; }
  BitsRef operator[](std::size_t k) const { return ans_->segment(first_ + k); }

 private:
  const RoundAnswers* ans_;
  std::size_t first_;
  std::size_t count_;
};

class OneRoundPlan {
 public:
  virtual ~OneRoundPlan() = default;
  std::size_t num_vars() const { return vars_; }
  const std::vector<ViewPtr>& segments() const { return segments_; }
  std::uint64_t query_count() const {
    std::uint64_t q = 0;
    for (const auto& s : segments_) q += s->size();
    return q;
  }
  /// Learned function over num_vars() variables.
  virtual LearnerResult decode(const AnswerSlice& ans) const = 0;

 protected:
  explicit OneRoundPlan(std::size_t vars) : vars_(vars) {}
  std::size_t vars_;
  std::vector<ViewPtr> segments_;
};

using MapPtr = std::shared_ptr<const std::vector<std::uint32_t>>;

/// A plan run on the projection of the target through `map` (null: identity).
struct PlanJob {
  const OneRoundPlan* plan = nullptr;
  MapPtr map;
};

inline MapPtr share_map(std::vector<std::uint32_t> m) {
  return std::make_shared<const std::vector<std::uint32_t>>(std::move(m));
}

/// Asks every job's queries in one round and decodes each job.
inline std::vector<LearnerResult> run_plans(Oracle& o, std::span<const PlanJob> jobs) {
  Round round;
  std::vector<std::size_t> first;
  for (const auto& job : jobs) {
    require(job.map ? job.map->size() == o.n() : job.plan->num_vars() == o.n(), "run_plans: width mismatch");
    first.push_back(round.segment_count());
    for (const auto& seg : job.plan->segments())
      round.add(job.map ? std::make_shared<ProjectedView>(seg, job.map) : seg);
  }
  const RoundAnswers ans = o.ask(round);
  std::vector<LearnerResult> out;
  for (std::size_t k = 0; k < jobs.size(); ++k)
    out.push_back(jobs[k].plan->decode(AnswerSlice(ans, first[k], jobs[k].plan->segments().size())));
  return out;
}

inline LearnerResult run_single(Oracle& o, const OneRoundPlan& plan) {
  const QueryStats before = o.stats();
  const PlanJob job{&plan, nullptr};
  LearnerResult r = std::move(run_plans(o, {&job, 1}).front());
  r.stats = o.stats() - before;
  return r;
}

namespace detail {

/// Truth table over `vars` read from rows of `rows` with answers `ans`.
/// Missing patterns are -1; returns false on two rows that conflict.
inline bool fill_table(const QueryView& rows, const BitsRef& ans, std::span<const std::size_t> vars,
                       std::vector<int>& table, std::string* why = nullptr) {
  table.assign(std::size_t{1} << vars.size(), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t idx = 0;
    for (auto v : vars) idx = (idx << 1) | static_cast<std::size_t>(rows.bit(r, v));
    const int val = ans[r];
    if (table[idx] == -1) {
      table[idx] = val;
    } else if (table[idx] != val) {
      if (why) *why = "rows disagree on pattern " + std::to_string(idx) + " (row " + std::to_string(r + 1) + ")";
      return false;
    }
  }
  return true;
}

inline std::string format_vars(std::span<const std::size_t> vars) {
  std::string s = "{";
  for (std::size_t k = 0; k < vars.size(); ++k) s += (k ? "," : "") + std::to_string(vars[k] + 1);
  return s + "}";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Equivalent-set learner.

/// Asks a d-wise bipartite connected family A and returns the table of the
/// first d-subset whose rows are consistent with a function of it.
class EquivsetPlan final : public OneRoundPlan {
 public:
  EquivsetPlan(std::shared_ptr<const AssignmentSet> a, std::size_t d) : OneRoundPlan(a->n()), d_(d) {
    require(!a->empty(), "equivset: empty query set");
    rows_ = std::make_shared<SetView>(*a);
    segments_.push_back(rows_);
  }

  LearnerResult decode(const AnswerSlice& ans) const override {
    const BitsRef bits = ans[0];
    const std::size_t k = std::min(d_, vars_);
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), 0);
    std::vector<int> table;
    do {
      if (!detail::fill_table(*rows_, bits, c, table)) continue;
      std::vector<std::uint8_t> t(table.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = table[i] == 1 ? 1 : 0;
      return LearnerResult::success(Junta::make(vars_, c, std::move(t)));
    } while (next_combination(c, vars_));
    return LearnerResult::failure(vars_, "no " + std::to_string(k) + "-subset is consistent with the answers");
  }

 private:
  std::size_t d_;
  std::shared_ptr<const SetView> rows_;
};

inline LearnerResult learn_equivset(Oracle& o, std::size_t n, std::size_t d, const AssignmentSet& a) {
  require(a.n() == n && o.n() == n, "learn_equivset: width mismatch");
  return run_single(o, EquivsetPlan(std::make_shared<const AssignmentSet>(a), d));
}

// ---------------------------------------------------------------------------
// Block-expansion learner.

/// Every row u of a universal set U together with its n single flips.
class BlockPlan final : public OneRoundPlan {
 public:
  BlockPlan(const AssignmentSet& u, std::size_t d) : OneRoundPlan(u.n()), d_(d), u_(u) {
    require(!u.empty(), "block: empty universal set");
    segments_.push_back(std::make_shared<BlockView>(u));
  }

  LearnerResult decode(const AnswerSlice& ans) const override {
    const BitsRef bits = ans[0];
    const std::size_t n = vars_;
    std::vector<std::size_t> rel;
    std::vector<std::uint8_t> seen(n, 0);
    for (std::size_t r = 0; r < u_.size(); ++r) {
      const std::size_t base = r * (n + 1);
      for (std::size_t i = 0; i < n; ++i)
        if (bits[base + 1 + i] != bits[base]) seen[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (seen[i]) rel.push_back(i);
    if (rel.size() > d_) return LearnerResult::failure(n, "too many variables: " + detail::format_vars(rel));
    std::vector<int> table(std::size_t{1} << rel.size(), -1);
    for (std::size_t r = 0; r < u_.size(); ++r) {
      std::size_t idx = 0;
      for (auto v : rel) idx = (idx << 1) | static_cast<std::size_t>(u_.bit(r, v));
      const int val = bits[r * (n + 1)];
      if (table[idx] != -1 && table[idx] != val) return LearnerResult::failure(n, "inconsistent table over " + detail::format_vars(rel));
      table[idx] = val;
    }
    std::vector<std::uint8_t> t(table.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (table[i] == -1) return LearnerResult::failure(n, "table incomplete over " + detail::format_vars(rel));
      t[i] = static_cast<std::uint8_t>(table[i]);
    }
    return LearnerResult::success(Junta::make(n, rel, std::move(t)));
  }

 private:
  std::size_t d_;
  AssignmentSet u_;
};

inline LearnerResult learn_block_expansion(Oracle& o, std::size_t n, std::size_t d, const AssignmentSet& u) {
  require(u.n() == n && o.n() == n, "learn_block_expansion: width mismatch");
  return run_single(o, BlockPlan(u, d));
}

// ---------------------------------------------------------------------------
// Deterministic reduction through an (n,q,d+1)-perfect hash family.

/// Builds the base plan for functions of q variables.
using PlanFactory = std::function<std::unique_ptr<OneRoundPlan>(std::size_t q)>;

inline std::size_t detreduce_q(std::size_t d) { return 2 * d * (d + 1) * (d + 1); }

/// Lifts candidates g_h learned on projections to one function of the n
/// original variables: among the candidates with the most relevant bins, the
/// original variables of each hash's relevant bins are intersected.
inline LearnerResult lift_by_intersection(std::size_t n, const HashFamily& h, std::span<const LearnerResult> cand) {
  std::optional<std::size_t> top;
  for (const auto& c : cand)
    if (c.ok) top = std::max(top.value_or(0), c.output.arity());
  if (!top) return LearnerResult::failure(n, "every projected run failed: " + cand.front().witness);
  std::vector<std::uint8_t> in_d(n, 1);
  std::optional<std::size_t> first;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    if (!cand[k].ok || cand[k].output.arity() != *top) continue;
    if (!first) first = k;
    std::vector<std::uint8_t> bin_rel(h.q, 0);
    for (auto v : cand[k].output.relevant) bin_rel[v] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!bin_rel[h.maps[k][i]]) in_d[i] = 0;
  }
  const Junta& g = cand[*first].output;
  const auto& map = h.maps[*first];
  std::vector<std::size_t> vars;
  for (auto v : g.relevant) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (in_d[i] && map[i] == v) members.push_back(i);
    if (members.size() != 1)
      return LearnerResult::failure(n, "bin " + std::to_string(v + 1) + " holds " + std::to_string(members.size()) +
                                           " recovered variables");
    vars.push_back(members[0]);
  }
  return LearnerResult::success(Junta::make(n, vars, g.table));
}

inline LearnerResult learn_reduce_deterministic(Oracle& o, std::size_t n, std::size_t d, std::size_t q,
                                                const PlanFactory& base, const HashFamily& h) {
  require(o.n() == n && h.n == n && h.q == q, "reduce_deterministic: width mismatch");
  require(q >= d, "reduce_deterministic: q must be at least d");
  const QueryStats before = o.stats();
  const auto plan = base(q);
  std::vector<PlanJob> jobs;
  for (const auto& m : h.maps) jobs.push_back({plan.get(), share_map(m)});
  auto cand = run_plans(o, jobs);
  LearnerResult r = lift_by_intersection(n, h, cand);
  r.stats = o.stats() - before;
  return r;
}

/// q = 2d(d+1)^2 with the equivalent-set learner as base.
inline LearnerResult learn_detreduce(Oracle& o, std::size_t n, std::size_t d) {
  const std::size_t q = detreduce_q(d);
  const auto h = design_cache().phf(n, q, std::min(d + 1, n));
  PlanFactory base = [d](std::size_t vars) -> std::unique_ptr<OneRoundPlan> {
    return std::make_unique<EquivsetPlan>(design_cache().bcf(vars, std::min(d, vars)), d);
  };
  return learn_reduce_deterministic(o, n, d, h->q, base, *h);
}

// ---------------------------------------------------------------------------
// Randomized sensitivity-sampling learner.

struct RandnaParams {
  std::size_t t = 0;          // base assignments a
  std::size_t m = 0;          // perturbations per a
  std::size_t m2 = 0;         // table-filling rows
  std::size_t instances = 1;  // independent repetitions in the round
  double delta = 0;           // failure bound of one instance
  std::uint64_t sample_constant = 600;

  std::uint64_t instance_queries() const { return t * (1 + m) + m2; }
  std::uint64_t queries() const { return instances * instance_queries(); }
};

inline std::size_t ceil_pos(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); }

/// Closed-form sizes; for d >= 2 and delta <= 1/d the instance at 1/d is
/// repeated ceil(ln(1/delta)/ln d) times.
inline RandnaParams randna_params(std::size_t n, std::size_t d, double delta, std::uint64_t c = 600) {
  require(d >= 1 && d <= n, "randna: needs 1 <= d <= n");
  require(delta > 0 && delta < 1, "randna: delta must lie in (0,1)");
  RandnaParams p;
  p.sample_constant = c;
  const double dd = static_cast<double>(d);
  if (d >= 2 && delta <= 1.0 / dd) {
    p.instances = ceil_pos(std::log(1.0 / delta) / std::log(dd));
    p.delta = 1.0 / dd;
  } else {
    p.delta = delta;
  }
  const double two_d = std::ldexp(1.0, static_cast<int>(d));
  p.t = ceil_pos(two_d * (std::log(dd) + std::log(3.0 / p.delta)));
  p.m = ceil_pos(static_cast<double>(c) * dd *
                 (std::log(static_cast<double>(n)) + std::log(3.0 * static_cast<double>(p.t) / p.delta)));
  p.m2 = ceil_pos(two_d * (dd * std::log(2.0) + std::log(3.0 / p.delta)));
  return p;
}

using Perturbations = std::vector<std::shared_ptr<const PackedColumns>>;

/// One perturbation matrix per instance, bits 1 with probability 1/(3d).
inline Perturbations make_perturbations(const RandnaParams& p, std::size_t n, std::size_t d, Rng& rng) {
  Perturbations out;
  for (std::size_t k = 0; k < p.instances; ++k)
    out.push_back(std::make_shared<const PackedColumns>(bernoulli_columns(p.m, n, 3 * d, rng)));
  return out;
}

/// Per instance: t assignments a, the rows a + b for a shared matrix of
/// perturbations b, and m2 uniform rows that fill the table.
class RandnaPlan final : public OneRoundPlan {
 public:
  RandnaPlan(std::size_t n, std::size_t d, double delta, Rng& rng, const Perturbations* shared = nullptr)
      : OneRoundPlan(n), d_(d), p_(randna_params(n, d, delta)) {
    perturb_ = shared ? *shared : make_perturbations(p_, n, d, rng);
    require(perturb_.size() == p_.instances, "randna: perturbation count mismatch");
    for (std::size_t k = 0; k < p_.instances; ++k) {
      require(perturb_[k]->rows() == p_.m && perturb_[k]->cols() == n, "randna: perturbation shape mismatch");
      AssignmentSet a(n);
      for (std::size_t i = 0; i < p_.t; ++i) a.push_back(Assignment::random(n, rng));
      AssignmentSet fill(n);
      for (std::size_t i = 0; i < p_.m2; ++i) fill.push_back(Assignment::random(n, rng));
      segments_.push_back(view_of(a));
      for (std::size_t i = 0; i < p_.t; ++i) segments_.push_back(std::make_shared<XorView>(a.row(i), perturb_[k]));
      fill_.push_back(std::make_shared<SetView>(std::move(fill)));
      segments_.push_back(fill_.back());
    }
  }

  const RandnaParams& params() const { return p_; }

  /// Variables marked sensitive by instance k: count * d * 100 < 15 * m.
  std::vector<std::size_t> marked(const AnswerSlice& ans, std::size_t k) const {
    const std::size_t base = k * (p_.t + 2);
    const BitsRef fa = ans[base];
    const PackedColumns& b = *perturb_[k];
    std::vector<std::uint8_t> mark(vars_, 0);
    std::vector<std::uint64_t> eq(word_count(p_.m));
    for (std::size_t a = 0; a < p_.t; ++a) {
      const auto w = ans[base + 1 + a].words();
      const std::uint64_t flip = fa[a] ? 0 : ~std::uint64_t{0};
      for (std::size_t x = 0; x < eq.size(); ++x) eq[x] = w[x] ^ flip;
      if (!eq.empty()) eq.back() &= tail_mask(p_.m);
      for (std::size_t i = 0; i < vars_; ++i) {
        if (mark[i]) continue;
        const auto col = b.col(i);
        std::uint64_t cnt = 0;
        for (std::size_t x = 0; x < eq.size(); ++x) cnt += static_cast<std::uint64_t>(std::popcount(eq[x] & col[x]));
        if (cnt * d_ * 100 < 15 * p_.m) mark[i] = 1;
      }
    }
    std::vector<std::size_t> rel;
    for (std::size_t i = 0; i < vars_; ++i)
      if (mark[i]) rel.push_back(i);
    return rel;
  }

  LearnerResult decode_instance(const AnswerSlice& ans, std::size_t k) const {
    const auto rel = marked(ans, k);
    if (rel.size() > d_) return LearnerResult::failure(vars_, "too many variables: " + detail::format_vars(rel));
    std::vector<int> table;
    std::string why;
    if (!detail::fill_table(*fill_[k], ans[k * (p_.t + 2) + p_.t + 1], rel, table, &why))
      return LearnerResult::failure(vars_, "inconsistent table: " + why);
    std::vector<std::uint8_t> t(table.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (table[i] == -1) return LearnerResult::failure(vars_, "table incomplete over " + detail::format_vars(rel));
      t[i] = static_cast<std::uint8_t>(table[i]);
    }
    Junta j = Junta::make(vars_, rel, std::move(t));
    if (j.arity() != rel.size())
      return LearnerResult::failure(vars_, "claimed variable not relevant in its table " + detail::format_vars(rel));
    return LearnerResult::success(std::move(j));
  }

  /// Survivor with the most relevant variables; first instance wins ties.
  LearnerResult decode(const AnswerSlice& ans) const override {
    std::optional<LearnerResult> best;
    std::optional<LearnerResult> first_fail;
    for (std::size_t k = 0; k < p_.instances; ++k) {
      LearnerResult r = decode_instance(ans, k);
      if (!r.ok) {
        if (!first_fail) first_fail = std::move(r);
        continue;
      }
      if (!best || r.output.arity() > best->output.arity()) best = std::move(r);
    }
    return best ? *best : *first_fail;
  }

 private:
  std::size_t d_;
  RandnaParams p_;
  Perturbations perturb_;
  std::vector<std::shared_ptr<const SetView>> fill_;
};

inline LearnerResult learn_randomized_nonadaptive(Oracle& o, std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(o.n() == n, "learn_randomized_nonadaptive: width mismatch");
  return run_single(o, RandnaPlan(n, d, delta, rng));
}

// ---------------------------------------------------------------------------
// Randomized reduction through random hashes into q = 8 d^2 bins.

struct RandredParams {
  std::size_t q = 0;
  std::size_t hashes = 0;
  RandnaParams base;
  std::uint64_t queries() const { return hashes * base.queries(); }
};

inline constexpr double randred_base_delta = 1.0 / 8.0;

inline RandredParams randred_params(std::size_t n, std::size_t d, double delta) {
  require(d >= 1 && d <= n, "randred: needs 1 <= d <= n");
  require(delta > 0 && delta < 1, "randred: delta must lie in (0,1)");
  RandredParams p;
  p.q = 8 * d * d;
  p.hashes = ceil_pos(32.0 * std::log(3.0 * static_cast<double>(n) / delta));
  p.base = randna_params(p.q, d, randred_base_delta);
  return p;
}

/// Candidates per hash with their relevant bins V_h (empty for failed runs,
/// whose candidate is the constant 0), combined by majority over variables.
inline LearnerResult combine_reduction(std::size_t n, std::span<const std::vector<std::uint32_t>> maps,
                                       std::span<const LearnerResult> cand) {
  const std::size_t hashes = maps.size();
  std::vector<std::size_t> votes(n, 0);
  for (std::size_t h = 0; h < hashes; ++h) {
    if (!cand[h].ok) continue;
    const auto& vh = cand[h].output.relevant;
    for (std::size_t i = 0; i < n; ++i)
      if (std::binary_search(vh.begin(), vh.end(), maps[h][i])) ++votes[i];
  }
  std::vector<std::uint8_t> in_w(n, 0);
  for (std::size_t i = 0; i < n; ++i) in_w[i] = 2 * votes[i] > hashes ? 1 : 0;

  std::vector<Junta> lifted;
  for (std::size_t h = 0; h < hashes; ++h) {
    const Junta g = cand[h].ok ? cand[h].output : Junta::constant(cand[h].output.n, false);
    std::vector<std::size_t> vars;
    bool good = true;
    for (auto v : g.relevant) {
      std::size_t count = 0;
      std::size_t who = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (in_w[i] && maps[h][i] == v) {
          ++count;
          who = i;
        }
      if (count != 1) {
        good = false;
        break;
      }
      vars.push_back(who);
    }
    if (good) lifted.push_back(Junta::make(n, vars, g.table));
  }
  if (lifted.empty()) return LearnerResult::failure(n, "no hash maps its relevant bins one-to-one onto the majority set");
  return LearnerResult::success(plurality(lifted));
}

inline LearnerResult learn_randomized_reduction(Oracle& o, std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(o.n() == n, "learn_randomized_reduction: width mismatch");
  const RandredParams p = randred_params(n, d, delta);
  const QueryStats before = o.stats();
  const std::uint64_t master = rng();
  Rng shared_rng(derive_seed(master, 0));
  const Perturbations shared = make_perturbations(p.base, p.q, d, shared_rng);
  std::vector<std::vector<std::uint32_t>> maps;
  std::vector<std::unique_ptr<RandnaPlan>> plans;
  std::vector<PlanJob> jobs;
  for (std::size_t h = 0; h < p.hashes; ++h) {
    Rng sub(derive_seed(master, h + 1));
    maps.push_back(random_map(n, p.q, sub));
    plans.push_back(std::make_unique<RandnaPlan>(p.q, d, randred_base_delta, sub, &shared));
    jobs.push_back({plans.back().get(), share_map(maps.back())});
  }
  // Every base run asks exactly its closed-form budget, so none is cut off.
  const auto cand = run_plans(o, jobs);
  LearnerResult r = combine_reduction(n, maps, cand);
  r.stats = o.stats() - before;
  return r;
}

}  // namespace junta
