#pragma once

// d-wise bipartite connected families.
//
// A spec (i, j, k, z) with |i| = |k| = d2, |j| = d1, d1 + d2 = d names the
// bipartite graph on {0,1}^{d2} x {L,R} where row a adds the edge
// (a_i, L) -- (a_k, R) whenever a_j = z. The potential X(A) sums
// (components - 1) over all specs; i and k range over disjoint index sets,
// so the pairs (i, k) and (k, i) are both counted (they give mirror graphs).
//
// Internally a spec is stored once per unordered pair with min(i) < min(k)
// and weight 2 (weight 1 when d2 = 0). Vertex u of side L is the pattern of
// a_i read with i_1 as the most significant bit; side R vertex v is stored
// at 2^{d2} + v.

#include <cmath>
#include <cstring>
#include <optional>
#include <set>

#include "junta/designs.hpp"

namespace junta {

struct BipartiteSpec {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::vector<std::size_t> i;
  std::vector<std::size_t> j;
  std::vector<std::size_t> k;
  std::vector<std::uint8_t> z;
  friend bool operator==(const BipartiteSpec&, const BipartiteSpec&) = default;
};

/// Enumeration order: d2 descending, then i, k, j, z lexicographic.
inline bool spec_before(const BipartiteSpec& a, const BipartiteSpec& b) {
  if (a.d2 != b.d2) return a.d2 > b.d2;
  if (a.i != b.i) return a.i < b.i;
  if (a.k != b.k) return a.k < b.k;
  if (a.j != b.j) return a.j < b.j;
  return a.z < b.z;
}

/// Component label (smallest member vertex) of every vertex of B(spec, A).
inline std::vector<std::size_t> bcf_component_labels(const AssignmentSet& a, const BipartiteSpec& s) {
  const std::size_t half = std::size_t{1} << s.d2;
  std::vector<std::size_t> parent(2 * half);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t r = 0; r < a.size(); ++r) {
    bool match = true;
    for (std::size_t m = 0; m < s.d1 && match; ++m) match = a.bit(r, s.j[m]) == (s.z[m] != 0);
    if (!match) continue;
    std::size_t u = 0, v = 0;
    for (std::size_t m = 0; m < s.d2; ++m) {
      u = (u << 1) | (a.bit(r, s.i[m]) ? 1U : 0U);
      v = (v << 1) | (a.bit(r, s.k[m]) ? 1U : 0U);
    }
    const std::size_t x = find(u), y = find(half + v);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
  std::vector<std::size_t> label(2 * half);
  for (std::size_t x = 0; x < label.size(); ++x) label[x] = find(x);
  return label;
}

inline std::size_t bcf_component_count(const AssignmentSet& a, const BipartiteSpec& s) {
  const auto label = bcf_component_labels(a, s);
  std::size_t c = 0;
  for (std::size_t x = 0; x < label.size(); ++x) c += label[x] == x ? 1 : 0;
  return c;
}

/// Calls fn(sub) for every k-subset of `universe` in lexicographic order.
template <class Fn>
void for_each_subset(const std::vector<std::size_t>& universe, std::size_t k, Fn&& fn) {
  if (k > universe.size()) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> sub(k);
  do {
    for (std::size_t m = 0; m < k; ++m) sub[m] = universe[idx[m]];
    fn(sub);
  } while (k > 0 && next_combination(idx, universe.size()));
}

inline std::vector<std::size_t> complement_of(std::size_t n, std::span<const std::size_t> a,
                                              std::span<const std::size_t> b = {}) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < n; ++x)
    if (std::find(a.begin(), a.end(), x) == a.end() && std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  return out;
}

/// Calls fn(spec) for every spec with ordered (i, k), i.e. both mirror
/// orientations, grouped by d2 descending.
template <class Fn>
void for_each_ordered_spec(std::size_t n, std::size_t d, Fn&& fn) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t d2 = d + 1; d2-- > 0;) {
    const std::size_t d1 = d - d2;
    if (2 * d2 + d1 > n) continue;
    for_each_subset(all, d2, [&](const std::vector<std::size_t>& i) {
      for_each_subset(complement_of(n, i), d2, [&](const std::vector<std::size_t>& k) {
        for_each_subset(complement_of(n, i, k), d1, [&](const std::vector<std::size_t>& j) {
          BipartiteSpec s{d1, d2, i, j, k, std::vector<std::uint8_t>(d1)};
          for (std::size_t zz = 0; zz < (std::size_t{1} << d1); ++zz) {
            for (std::size_t m = 0; m < d1; ++m) s.z[m] = (zz >> (d1 - 1 - m)) & 1U;
            fn(s);
          }
        });
      });
    });
  }
}

/// X(A) by direct enumeration of every spec and a union-find per graph.
inline std::uint64_t potential_X(const AssignmentSet& a, std::size_t d) {
  require(d <= a.n(), "potential_X: d exceeds n");
  std::uint64_t x = 0;
  for_each_ordered_spec(a.n(), d, [&](const BipartiteSpec& s) { x += bcf_component_count(a, s) - 1; });
  return x;
}

/// X of the empty family: sum over splits of n!/(d2! d2! d1! (n-2d2-d1)!) 2^{d1} (2^{d2+1}-1).
inline std::uint64_t potential_X_empty(std::size_t n, std::size_t d) {
  std::uint64_t x = 0;
  for (std::size_t d2 = 0; d2 <= d; ++d2) {
    const std::size_t d1 = d - d2;
    if (2 * d2 + d1 > n) continue;
    const std::uint64_t ways = binomial(n, d2) * binomial(n - d2, d2) * binomial(n - 2 * d2, d1);
    x += ways * (std::uint64_t{1} << d1) * ((std::uint64_t{1} << (d2 + 1)) - 1);
  }
  return x;
}

/// Number of canonical (mirror-merged) specs.
inline std::uint64_t bcf_spec_count(std::size_t n, std::size_t d) {
  std::uint64_t c = 0;
  for (std::size_t d2 = 0; d2 <= d; ++d2) {
    const std::size_t d1 = d - d2;
    if (2 * d2 + d1 > n) continue;
    std::uint64_t pairs = binomial(n, d2) * binomial(n - d2, d2);
    if (d2 > 0) pairs /= 2;
    c += pairs * binomial(n - 2 * d2, d1) * (std::uint64_t{1} << d1);
  }
  return c;
}

/// ceil(2d 2^{d+1} ln(2n)).
inline std::size_t bcf_size_bound(std::size_t n, std::size_t d) {
  const double b = 2.0 * static_cast<double>(d) * std::ldexp(1.0, static_cast<int>(d + 1)) *
                   std::log(2.0 * static_cast<double>(n));
  return static_cast<std::size_t>(std::ceil(b - 1e-9));
}

/// Pool of candidate rows for the greedy: a (2d)-wise independent space.
inline AssignmentSet default_bcf_pool(std::size_t n, std::size_t d) {
  return kwise_independent_set(n, std::min(std::max<std::size_t>(2 * d, 1), n));
}

namespace bcf_detail {

// A role assignment of the s = 2 d2 + d1 positions of a column subset.
struct Template {
  std::size_t d2 = 0;
  std::size_t d1 = 0;
  std::uint8_t weight = 1;
  std::vector<std::uint8_t> ipos, kpos, jpos;
};

struct TemplateSet {
  std::size_t s = 0, d2 = 0, d1 = 0;
  std::size_t vertices = 0;  // 2^{d2+1}
  std::size_t zcount = 0;    // 2^{d1}
  std::vector<Template> list;
  // Per template t and pattern p < 2^s: flat index t * 2^s + p.
  std::vector<std::uint8_t> u, v, zv;
};

inline TemplateSet templates_for(std::size_t s, std::size_t d) {
  TemplateSet ts;
  ts.s = s;
  ts.d2 = s - d;
  ts.d1 = 2 * d - s;
  ts.vertices = std::size_t{2} << ts.d2;
  ts.zcount = std::size_t{1} << ts.d1;
  std::vector<std::size_t> pos(s);
  std::iota(pos.begin(), pos.end(), 0);
  for_each_subset(pos, ts.d1, [&](const std::vector<std::size_t>& jp) {
    const auto rest = complement_of(s, jp);
    auto emit = [&](std::vector<std::size_t> ip, std::vector<std::size_t> kp) {
      Template t{ts.d2, ts.d1, static_cast<std::uint8_t>(ts.d2 > 0 ? 2 : 1), {}, {}, {}};
      for (auto x : ip) t.ipos.push_back(static_cast<std::uint8_t>(x));
      for (auto x : kp) t.kpos.push_back(static_cast<std::uint8_t>(x));
      for (auto x : jp) t.jpos.push_back(static_cast<std::uint8_t>(x));
      ts.list.push_back(std::move(t));
    };
    if (ts.d2 == 0) {
      emit({}, {});
      return;
    }
    const std::vector<std::size_t> tail(rest.begin() + 1, rest.end());
    for_each_subset(tail, ts.d2 - 1, [&](const std::vector<std::size_t>& more) {
      std::vector<std::size_t> ip{rest[0]};
      ip.insert(ip.end(), more.begin(), more.end());
      std::vector<std::size_t> kp;
      for (auto x : tail)
        if (std::find(more.begin(), more.end(), x) == more.end()) kp.push_back(x);
      emit(std::move(ip), std::move(kp));
    });
  });
  const std::size_t patterns = std::size_t{1} << s;
  ts.u.resize(ts.list.size() * patterns);
  ts.v.resize(ts.list.size() * patterns);
  ts.zv.resize(ts.list.size() * patterns);
  for (std::size_t t = 0; t < ts.list.size(); ++t) {
    const auto& tp = ts.list[t];
    for (std::size_t p = 0; p < patterns; ++p) {
      auto bit = [&](std::size_t q) { return static_cast<unsigned>((p >> (s - 1 - q)) & 1U); };
      unsigned u = 0, v = 0, z = 0;
      for (auto q : tp.ipos) u = (u << 1) | bit(q);
      for (auto q : tp.kpos) v = (v << 1) | bit(q);
      for (auto q : tp.jpos) z = (z << 1) | bit(q);
      ts.u[t * patterns + p] = static_cast<std::uint8_t>(u);
      ts.v[t * patterns + p] = static_cast<std::uint8_t>(v);
      ts.zv[t * patterns + p] = static_cast<std::uint8_t>(z);
    }
  }
  return ts;
}

// Specs held in memory with their current component labels.
struct ExplicitSpecs {
  std::size_t d = 0;
  std::size_t stride = 0;    // columns per spec: i, k, j
  std::size_t vertices = 0;  // label stride: 2^{d+1}
  std::vector<std::uint16_t> cols;
  std::vector<std::uint8_t> d2, z, w, comps, labels;

  explicit ExplicitSpecs(std::size_t dd = 0) : d(dd), stride(std::max<std::size_t>(2 * dd, 1)), vertices(std::size_t{2} << dd) {}

  std::size_t size() const { return d2.size(); }

  void push(std::size_t sd2, std::size_t sz, std::size_t sw, std::size_t sc, const std::uint16_t* c,
            const std::uint8_t* lab, std::size_t nv) {
    d2.push_back(static_cast<std::uint8_t>(sd2));
    z.push_back(static_cast<std::uint8_t>(sz));
    w.push_back(static_cast<std::uint8_t>(sw));
    comps.push_back(static_cast<std::uint8_t>(sc));
    cols.insert(cols.end(), c, c + stride);
    const std::size_t base = labels.size();
    labels.resize(base + vertices, 0);
    std::copy_n(lab, nv, labels.begin() + static_cast<std::ptrdiff_t>(base));
  }

  std::uint64_t potential() const {
    std::uint64_t x = 0;
    for (std::size_t e = 0; e < size(); ++e) x += static_cast<std::uint64_t>(w[e]) * (comps[e] - 1U);
    return x;
  }

  // Endpoints of the edge row `xb` adds to spec e, or false if a_j != z.
  bool edge(std::size_t e, const std::uint8_t* xb, unsigned& a, unsigned& b) const {
    const std::uint16_t* c = &cols[e * stride];
    const unsigned k2 = d2[e];
    const unsigned k1 = static_cast<unsigned>(d) - k2;
    unsigned u = 0, v = 0, zz = 0;
    for (unsigned m = 0; m < k2; ++m) u = (u << 1) | xb[c[m]];
    for (unsigned m = 0; m < k2; ++m) v = (v << 1) | xb[c[k2 + m]];
    for (unsigned m = 0; m < k1; ++m) zz = (zz << 1) | xb[c[2 * k2 + m]];
    if (zz != z[e]) return false;
    a = u;
    b = (1U << k2) + v;
    return true;
  }

  std::uint64_t gain(const std::uint8_t* xb) const {
    std::uint64_t g = 0;
    unsigned a = 0, b = 0;
    for (std::size_t e = 0; e < size(); ++e) {
      if (!edge(e, xb, a, b)) continue;
      const std::uint8_t* lab = &labels[e * vertices];
      if (lab[a] != lab[b]) g += w[e];
    }
    return g;
  }

  // Adds the row's edges; drops specs that became connected.
  void apply(const std::uint8_t* xb) {
    std::size_t out = 0;
    unsigned a = 0, b = 0;
    for (std::size_t e = 0; e < size(); ++e) {
      std::uint8_t* lab = &labels[e * vertices];
      if (edge(e, xb, a, b) && lab[a] != lab[b]) {
        const std::uint8_t keep = lab[a], drop = lab[b];
        const std::size_t nv = std::size_t{2} << d2[e];
        for (std::size_t x = 0; x < nv; ++x)
          if (lab[x] == drop) lab[x] = keep;
        --comps[e];
      }
      if (comps[e] == 1) continue;
      if (out != e) {
        d2[out] = d2[e];
        z[out] = z[e];
        w[out] = w[e];
        comps[out] = comps[e];
        std::copy_n(&cols[e * stride], stride, &cols[out * stride]);
        std::copy_n(&labels[e * vertices], vertices, &labels[out * vertices]);
      }
      ++out;
    }
    d2.resize(out);
    z.resize(out);
    w.resize(out);
    comps.resize(out);
    cols.resize(out * stride);
    labels.resize(out * vertices);
  }
};

inline void append_spec_cols(const Template& t, std::span<const std::size_t> cset, std::uint16_t* out) {
  std::size_t m = 0;
  for (auto q : t.ipos) out[m++] = static_cast<std::uint16_t>(cset[q]);
  for (auto q : t.kpos) out[m++] = static_cast<std::uint16_t>(cset[q]);
  for (auto q : t.jpos) out[m++] = static_cast<std::uint16_t>(cset[q]);
}

/// All canonical specs with every vertex in its own component.
inline ExplicitSpecs enumerate_specs(std::size_t n, std::size_t d) {
  ExplicitSpecs out(d);
  std::vector<std::uint8_t> ident(out.vertices);
  std::iota(ident.begin(), ident.end(), 0);
  std::vector<std::uint16_t> c(out.stride, 0);
  for (std::size_t s = 2 * d + 1; s-- > d;) {
    if (s > n) continue;
    const auto ts = templates_for(s, d);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for_each_subset(all, s, [&](const std::vector<std::size_t>& cset) {
      for (const auto& t : ts.list) {
        append_spec_cols(t, cset, c.data());
        for (std::size_t zz = 0; zz < ts.zcount; ++zz)
          out.push(ts.d2, zz, t.weight, ts.vertices, c.data(), ident.data(), ts.vertices);
      }
    });
  }
  return out;
}

// Column-subset sweep over a fixed row sequence. For every column subset S
// of size s it scans rows in order, replays first occurrences of each s-bit
// pattern through all role templates and records, per time step, the
// weighted number of merges and the number of graphs that became connected.
// Graphs that connect after the current threshold (or never) are kept as
// records; when more than `cap` are held the threshold is raised.
class Sweep {
 public:
  struct Record {
    std::uint16_t cols[8];
    std::uint8_t d2, z, w;
    std::uint32_t connect;  // rows needed to connect; rows + 1 if never
  };

  Sweep(std::size_t n, std::size_t d, const AssignmentSet& rows, std::size_t cap)
      : n_(n), d_(d), rows_(rows.size()), cap_(cap), gain_(rows.size() + 1, 0), done_(rows.size() + 1, 0) {
    require(d <= 3, "bcf sweep: d too large for column sweeps");
    col_.assign(n, std::vector<std::uint8_t>(rows_));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < n; ++c) col_[c][r] = rows.bit(r, c) ? 1 : 0;
  }

  void run() {
    for (std::size_t s = 2 * d_ + 1; s-- > d_;) {
      if (s > n_ || s == 0) continue;
      ts_ = templates_for(s, d_);
      const std::size_t patterns = std::size_t{1} << s;
      const std::size_t nt = ts_.list.size();
      graphs_ = nt * ts_.zcount;
      stride_ = ts_.vertices <= 16 ? 16 : ts_.vertices;
      weight_ = ts_.list.front().weight;
      ev_.assign(patterns * nt, Event{});
      for (std::size_t p = 0; p < patterns; ++p)
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t k = t * patterns + p;
          ev_[p * nt + t] = Event{static_cast<std::uint16_t>(t * ts_.zcount + ts_.zv[k]), ts_.u[k],
                                  static_cast<std::uint8_t>(ts_.vertices / 2 + ts_.v[k])};
        }
      ident_.assign(graphs_ * stride_, 0);
      for (std::size_t g = 0; g < graphs_; ++g)
        for (std::size_t x = 0; x < stride_; ++x) ident_[g * stride_ + x] = static_cast<std::uint8_t>(x);
      labs_.assign(ident_.size(), 0);
      comps_.assign(graphs_, 0);
      connect_.assign(graphs_, 0);
      tmpl_alive_.assign(nt, 0);
      pre_.assign(s + 1, std::vector<std::uint8_t>(rows_, 0));
      cset_.assign(s, 0);
      level(0, 0);
    }
  }

  const std::vector<std::uint64_t>& gain() const { return gain_; }
  const std::vector<std::uint64_t>& done() const { return done_; }
  const std::vector<Record>& records() const { return records_; }
  /// Every graph whose connect time exceeds this value is in records().
  std::size_t threshold() const { return threshold_; }

 private:
  struct Event {
    std::uint16_t g = 0;
    std::uint8_t a = 0, b = 0;
  };
  using v16 = std::int8_t __attribute__((vector_size(16)));

  void level(std::size_t lv, std::size_t from) {
    const std::size_t s = ts_.s;
    for (std::size_t c = from; c + (s - lv) <= n_; ++c) {
      cset_[lv] = c;
      if (lv + 1 == s) {
        subset(pre_[lv].data(), col_[c].data());
        continue;
      }
      const std::uint8_t* prev = pre_[lv].data();
      const std::uint8_t* cc = col_[c].data();
      std::uint8_t* next = pre_[lv + 1].data();
      for (std::size_t r = 0; r < rows_; ++r) next[r] = static_cast<std::uint8_t>((prev[r] << 1) | cc[r]);
      level(lv + 1, c + 1);
    }
  }

  // Merges the components of a and b in the labels at lab; true if they differed.
  template <std::size_t Stride>
  static bool merge(std::uint8_t* lab, std::uint8_t a, std::uint8_t b) {
    const auto la = static_cast<std::int8_t>(lab[a]);
    const auto lb = static_cast<std::int8_t>(lab[b]);
    if (la == lb) return false;
    for (std::size_t off = 0; off < Stride; off += 16) {
      v16 x;
      std::memcpy(&x, lab + off, 16);
      const v16 m = x == lb;
      x = (x & ~m) | (m & la);
      std::memcpy(lab + off, &x, 16);
    }
    return true;
  }

  void subset(const std::uint8_t* prev, const std::uint8_t* cc) {
    if (stride_ == 16)
      subset_impl<16>(prev, cc);
    else
      subset_impl<32>(prev, cc);
  }

  template <std::size_t Stride>
  void subset_impl(const std::uint8_t* prev, const std::uint8_t* cc) {
    const std::size_t nt = ts_.list.size();
    const std::size_t zc = ts_.zcount;
    const auto nv = static_cast<std::uint8_t>(ts_.vertices);
    std::memcpy(labs_.data(), ident_.data(), ident_.size());
    std::fill(comps_.begin(), comps_.end(), nv);
    std::fill(connect_.begin(), connect_.end(), static_cast<std::uint32_t>(rows_ + 1));
    std::fill(tmpl_alive_.begin(), tmpl_alive_.end(), static_cast<std::uint8_t>(zc));
    std::uint64_t alive_mask = nt >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << nt) - 1U);
    std::size_t alive = graphs_;
    std::uint64_t seen[4] = {0, 0, 0, 0};
    std::uint8_t* labs = labs_.data();
    std::uint8_t* comps = comps_.data();
    for (std::size_t r = 0; r < rows_ && alive > 0; ++r) {
      const unsigned p = (static_cast<unsigned>(prev[r]) << 1) | cc[r];
      const std::uint64_t bit = std::uint64_t{1} << (p & 63);
      if (seen[p >> 6] & bit) continue;
      seen[p >> 6] |= bit;
      const Event* ev = ev_.data() + p * nt;
      std::uint64_t merged = 0;
      for (std::uint64_t m = alive_mask; m != 0; m &= m - 1) {
        const auto t = static_cast<std::size_t>(std::countr_zero(m));
        const Event e = ev[t];
        if (comps[e.g] == 1 || !merge<Stride>(labs + e.g * Stride, e.a, e.b)) continue;
        ++merged;
        if (--comps[e.g] == 1) {
          connect_[e.g] = static_cast<std::uint32_t>(r + 1);
          ++done_[r + 1];
          --alive;
          if (--tmpl_alive_[t] == 0) alive_mask &= ~(std::uint64_t{1} << t);
        }
      }
      gain_[r + 1] += merged * weight_;
    }
    if (alive == 0 && connect_max() <= threshold_) return;
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t zz = 0; zz < zc; ++zz) {
        const std::size_t g = t * zc + zz;
        if (connect_[g] <= threshold_) continue;
        Record rec{};
        append_spec_cols(ts_.list[t], cset_, rec.cols);
        rec.d2 = static_cast<std::uint8_t>(ts_.d2);
        rec.z = static_cast<std::uint8_t>(zz);
        rec.w = static_cast<std::uint8_t>(weight_);
        rec.connect = connect_[g];
        records_.push_back(rec);
      }
    if (records_.size() > cap_) shrink();
  }

  std::uint32_t connect_max() const { return *std::max_element(connect_.begin(), connect_.end()); }

  // Raises the threshold so that at most half the cap remains.
  void shrink() {
    std::vector<std::uint32_t> times;
    times.reserve(records_.size());
    for (const auto& r : records_) times.push_back(r.connect);
    const std::size_t keep = cap_ / 2;
    std::nth_element(times.begin(), times.end() - static_cast<std::ptrdiff_t>(keep + 1), times.end());
    threshold_ = std::max<std::size_t>(threshold_, times[times.size() - keep - 1]);
    std::erase_if(records_, [&](const Record& r) { return r.connect <= threshold_; });
    while (records_.size() > cap_) {
      ++threshold_;
      std::erase_if(records_, [&](const Record& r) { return r.connect <= threshold_; });
    }
  }

  std::size_t n_, d_, rows_, cap_;
  std::vector<std::vector<std::uint8_t>> col_;
  std::vector<std::uint64_t> gain_, done_;
  TemplateSet ts_;
  std::size_t graphs_ = 0, stride_ = 16;
  std::uint64_t weight_ = 1;
  std::vector<Event> ev_;
  std::vector<std::uint8_t> ident_, labs_, comps_, tmpl_alive_;
  std::vector<std::uint32_t> connect_;
  std::vector<std::vector<std::uint8_t>> pre_;
  std::vector<std::size_t> cset_;
  std::vector<Record> records_;
  std::size_t threshold_ = 0;
};

// Graphs with at most 8 + 8 vertices as 8x8 bit matrices: bit 8u + v is the
// edge (u, L) -- (v, R).
inline std::uint64_t transpose8(std::uint64_t x) {
  std::uint64_t t = (x ^ (x >> 7)) & 0x00AA00AA00AA00AAULL;
  x ^= t ^ (t << 7);
  t = (x ^ (x >> 14)) & 0x0000CCCC0000CCCCULL;
  x ^= t ^ (t << 14);
  t = (x ^ (x >> 28)) & 0x00000000F0F0F0F0ULL;
  x ^= t ^ (t << 28);
  return x;
}

/// True if the bipartite graph of m with h vertices per side is connected.
inline bool matrix_connected(std::uint64_t m, unsigned h) {
  const unsigned full = (1U << h) - 1U;
  const std::uint64_t mt = transpose8(m);
  unsigned left = 1, right = 0;
  for (;;) {
    unsigned r2 = right, l2 = left;
    for (unsigned x = left; x != 0; x &= x - 1) r2 |= static_cast<unsigned>(m >> (8 * std::countr_zero(x))) & 0xFFU;
    for (unsigned x = r2; x != 0; x &= x - 1) l2 |= static_cast<unsigned>(mt >> (8 * std::countr_zero(x))) & 0xFFU;
    if (l2 == left && r2 == right) break;
    left = l2;
    right = r2;
  }
  return left == full && right == full;
}

inline std::vector<std::uint8_t> row_bytes(const AssignmentSet& s, std::size_t r) {
  std::vector<std::uint8_t> xb(s.n());
  for (std::size_t c = 0; c < s.n(); ++c) xb[c] = s.bit(r, c) ? 1 : 0;
  return xb;
}

}  // namespace bcf_detail

/// Raised when no pool row achieves the required potential decrease.
class BcfStuck : public ConstructionError {
 public:
  BcfStuck(const std::string& what, AssignmentSet rows) : ConstructionError(what), stuck(std::move(rows)) {}
  AssignmentSet stuck;
};

struct BcfOptions {
  std::uint64_t seed = 1;
  /// Above this many canonical specs the first rows are chosen by sweeps.
  std::size_t explicit_cap = 12'000'000;
  /// Spec evaluations allowed per explicit step; below it the whole pool is scanned.
  std::uint64_t eval_budget = 16'000'000;
  std::size_t min_candidates = 2;
  std::size_t max_batches = 32;
};

struct BcfResult {
  AssignmentSet rows;
  /// potential[t] = X of the first t rows.
  std::vector<std::uint64_t> potential;
  std::size_t rejected = 0;
  bool swept = false;
};

/// Greedy construction driven by the potential X. Every accepted row
/// satisfies X_new * 2^{d+1} <= X_old * (2^{d+1} - 1). While the spec space
/// is small enough and pool x specs fits the budget, each row is the pool
/// row of maximum decrease (ties: lexicographically smallest). Otherwise the
/// best of a seeded sample of pool rows is taken, and for very large spec
/// spaces whole runs of sampled rows are checked at once by column sweeps.
inline BcfResult greedy_bcf(std::size_t n, std::size_t d, const AssignmentSet& pool, const BcfOptions& opt = {}) {
  require(d <= n, "greedy_bcf: d exceeds n");
  require(pool.n() == n && !pool.empty(), "greedy_bcf: pool must be a non-empty set over n variables");
  BcfResult res{AssignmentSet(n), {potential_X_empty(n, d)}, 0, false};
  if (d == 0 || n == 0) {
    res.rows.push_back(pool.row(0));
    res.potential.push_back(0);
    return res;
  }
  const auto shift = static_cast<unsigned>(d + 1);
  auto contracts = [&](std::uint64_t x_old, std::uint64_t g) { return (g << shift) >= x_old && g > 0; };

  Rng rng(opt.seed);
  std::set<std::vector<std::uint64_t>> used;
  auto key_of = [&](std::size_t r) {
    auto w = pool.row_words(r);
    return std::vector<std::uint64_t>(w.begin(), w.end());
  };
  auto fresh = [&](std::size_t& idx) {
    for (std::size_t attempt = 0; attempt < 64; ++attempt) {
      idx = static_cast<std::size_t>(uniform_below(rng, pool.size()));
      if (!used.contains(key_of(idx))) return true;
    }
    return false;
  };
  auto accept = [&](std::size_t idx, std::uint64_t g) {
    used.insert(key_of(idx));
    res.rows.push_back(pool.row(idx));
    res.potential.push_back(res.potential.back() - g);
  };

  const std::uint64_t total = bcf_spec_count(n, d);
  bcf_detail::ExplicitSpecs ex(d);
  if (total <= opt.explicit_cap) {
    ex = bcf_detail::enumerate_specs(n, d);
  } else {
    res.swept = true;
    const std::size_t batch = std::max<std::size_t>(bcf_size_bound(n, d), 8);
    for (std::size_t sweeps = 0;; ++sweeps) {
      if (sweeps > 64) throw BcfStuck("greedy_bcf: sampled rows keep failing the contraction test", res.rows);
      AssignmentSet seq = res.rows;
      std::vector<std::size_t> idxs;
      for (std::size_t b = 0; b < batch; ++b) {
        std::size_t idx = 0;
        if (!fresh(idx)) break;
        used.insert(key_of(idx));
        idxs.push_back(idx);
        seq.push_back(pool.row(idx));
      }
      for (auto idx : idxs) used.erase(key_of(idx));
      bcf_detail::Sweep sw(n, d, seq, opt.explicit_cap);
      sw.run();
      std::uint64_t connected = 0;
      for (std::size_t t = 1; t <= res.rows.size(); ++t) connected += sw.done()[t];
      std::size_t switch_at = 0;
      for (std::size_t b = 0; b < idxs.size(); ++b) {
        const std::size_t t = res.rows.size() + 1;
        const std::uint64_t g = sw.gain()[t];
        if (!contracts(res.potential.back(), g)) {
          ++res.rejected;
          break;
        }
        connected += sw.done()[t];
        accept(idxs[b], g);
        if (res.potential.back() == 0) return res;
        if (total - connected <= opt.explicit_cap && t >= sw.threshold()) {
          switch_at = t;
          break;
        }
      }
      if (switch_at == 0) continue;
      // Replay the accepted rows on the graphs still disconnected.
      std::vector<std::uint8_t> ident(ex.vertices);
      std::iota(ident.begin(), ident.end(), 0);
      for (const auto& rec : sw.records()) {
        if (rec.connect <= switch_at) continue;
        const std::size_t nv = std::size_t{2} << rec.d2;
        ex.push(rec.d2, rec.z, rec.w, nv, rec.cols, ident.data(), nv);
      }
      for (std::size_t r = 0; r < res.rows.size(); ++r) ex.apply(bcf_detail::row_bytes(res.rows, r).data());
      if (ex.potential() != res.potential.back())
        throw std::logic_error("greedy_bcf: replayed specs disagree with the swept potential");
      break;
    }
  }

  auto bytes = [&](std::size_t idx) { return bcf_detail::row_bytes(pool, idx); };
  while (ex.size() > 0) {
    const std::uint64_t x_old = res.potential.back();
    const std::uint64_t act = ex.size();
    std::size_t best = pool.size();
    std::uint64_t best_gain = 0;
    auto consider = [&](std::size_t idx) {
      const auto xb = bytes(idx);
      const std::uint64_t g = ex.gain(xb.data());
      if (best == pool.size() || g > best_gain || (g == best_gain && lex_less(pool.row(idx), pool.row(best)))) {
        best = idx;
        best_gain = g;
      }
    };
    const bool exhaustive = act * pool.size() <= opt.eval_budget;
    if (!exhaustive) {
      const std::size_t per = std::max<std::size_t>(opt.min_candidates, static_cast<std::size_t>(opt.eval_budget / act));
      for (std::size_t b = 0; b < opt.max_batches && !(best < pool.size() && contracts(x_old, best_gain)); ++b) {
        if (b > 0) res.rejected += per;
        for (std::size_t c = 0; c < per; ++c) {
          std::size_t idx = 0;
          if (fresh(idx)) consider(idx);
        }
      }
    }
    if (exhaustive || !(best < pool.size() && contracts(x_old, best_gain))) {
      best = pool.size();
      for (std::size_t idx = 0; idx < pool.size(); ++idx) consider(idx);
    }
    if (best == pool.size() || !contracts(x_old, best_gain))
      throw BcfStuck("greedy_bcf: no pool row decreases the potential enough", res.rows);
    const auto xb = bytes(best);
    ex.apply(xb.data());
    accept(best, best_gain);
  }
  return res;
}

/// First disconnected spec in enumeration order, or none if A is a d-wise
/// bipartite connected family. Column subsets whose rows realize every
/// pattern are skipped; the rest are checked graph by graph.
inline std::optional<BipartiteSpec> verify_bcf(const AssignmentSet& a, std::size_t d) {
  const std::size_t n = a.n();
  require(d <= n, "verify_bcf: d exceeds n");
  if (d == 0) {
    if (a.empty()) return BipartiteSpec{};
    return std::nullopt;
  }
  const std::size_t rows = a.size();
  const std::size_t words = (rows + 63) / 64;
  std::vector<std::vector<std::uint64_t>> col(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (a.bit(r, c)) col[c][r >> 6] |= std::uint64_t{1} << (r & 63);

  for (std::size_t s = 2 * d + 1; s-- > d;) {
    if (s > n) continue;
    const auto ts = bcf_detail::templates_for(s, d);
    const std::size_t patterns = std::size_t{1} << s;
    const std::size_t half = ts.vertices / 2;
    // level[l] holds 2^l row bitsets, one per prefix pattern.
    std::vector<std::vector<std::uint64_t>> level(s);
    for (std::size_t l = 0; l < s; ++l) level[l].assign((std::size_t{1} << l) * words, 0);
    for (std::size_t r = 0; r < rows; ++r) level[0][r >> 6] |= std::uint64_t{1} << (r & 63);
    std::vector<std::size_t> cset(s);
    std::optional<BipartiteSpec> best;

    const std::size_t nt = ts.list.size();
    // With at most 64 patterns every graph fits an 8x8 matrix; edge[t * patterns + p].
    const bool small = patterns <= 64;
    std::vector<std::uint64_t> edge, mat;
    if (small) {
      edge.resize(nt * patterns);
      for (std::size_t k = 0; k < edge.size(); ++k) edge[k] = std::uint64_t{1} << (8 * ts.u[k] + ts.v[k]);
      mat.resize(nt * ts.zcount);
    }
    std::vector<std::uint8_t> present(patterns), lab(ts.vertices);
    auto record = [&](std::size_t t, std::size_t zz) {
      const auto& tp = ts.list[t];
      BipartiteSpec sp{ts.d1, ts.d2, {}, {}, {}, std::vector<std::uint8_t>(ts.d1)};
      for (auto q : tp.ipos) sp.i.push_back(cset[q]);
      for (auto q : tp.kpos) sp.k.push_back(cset[q]);
      for (auto q : tp.jpos) sp.j.push_back(cset[q]);
      for (std::size_t m = 0; m < ts.d1; ++m) sp.z[m] = (zz >> (ts.d1 - 1 - m)) & 1U;
      if (!best || spec_before(sp, *best)) best = std::move(sp);
    };

    auto check = [&](const std::vector<std::uint64_t>& prefix, const std::vector<std::uint64_t>& cc) {
      auto nonempty = [&](std::size_t q, bool one) {
        for (std::size_t w = 0; w < words; ++w)
          if (prefix[q * words + w] & (one ? cc[w] : ~cc[w])) return true;
        return false;
      };
      bool full = true;
      for (std::size_t q = 0; q < patterns / 2 && full; ++q) full = nonempty(q, true) && nonempty(q, false);
      if (full) return;
      for (std::size_t p = 0; p < patterns; ++p) present[p] = nonempty(p >> 1, (p & 1U) != 0);
      if (small) {
        std::fill(mat.begin(), mat.end(), 0);
        for (std::size_t p = 0; p < patterns; ++p) {
          if (!present[p]) continue;
          for (std::size_t t = 0; t < nt; ++t) mat[t * ts.zcount + ts.zv[t * patterns + p]] |= edge[t * patterns + p];
        }
        for (std::size_t g = 0; g < mat.size(); ++g)
          if (!bcf_detail::matrix_connected(mat[g], static_cast<unsigned>(half))) record(g / ts.zcount, g % ts.zcount);
        return;
      }
      for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t zz = 0; zz < ts.zcount; ++zz) {
          std::iota(lab.begin(), lab.end(), 0);
          std::size_t comps = ts.vertices;
          for (std::size_t p = 0; p < patterns && comps > 1; ++p) {
            if (!present[p] || ts.zv[t * patterns + p] != zz) continue;
            const std::uint8_t x = lab[ts.u[t * patterns + p]];
            const std::uint8_t y = lab[half + ts.v[t * patterns + p]];
            if (x == y) continue;
            for (auto& l : lab)
              if (l == y) l = x;
            --comps;
          }
          if (comps > 1) record(t, zz);
        }
      }
    };

    std::vector<std::uint64_t> empty_col(words, 0);
    auto rec = [&](auto&& self, std::size_t lv, std::size_t from) -> void {
      for (std::size_t c = from; c + (s - lv) <= n; ++c) {
        cset[lv] = c;
        if (lv + 1 == s) {
          check(level[lv], col[c]);
          continue;
        }
        const auto& prev = level[lv];
        auto& next = level[lv + 1];
        const std::size_t qn = std::size_t{1} << lv;
        for (std::size_t q = 0; q < qn; ++q)
          for (std::size_t w = 0; w < words; ++w) {
            next[(2 * q) * words + w] = prev[q * words + w] & ~col[c][w];
            next[(2 * q + 1) * words + w] = prev[q * words + w] & col[c][w];
          }
        self(self, lv + 1, c + 1);
      }
    };
    rec(rec, 0, 0);
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace junta
