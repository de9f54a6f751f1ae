#pragma once

// Universal sets, k-wise independent sample spaces and perfect hash
// families, each with an exhaustive verifier.

#include <array>
#include <cmath>
#include <optional>

#include "junta/core.hpp"

namespace junta {

// ---------------------------------------------------------------------------
// GF(2^m) arithmetic for the k-wise construction.

namespace gf2 {

inline std::uint32_t modulus(unsigned m) {
  static constexpr std::array<std::uint32_t, 17> kPoly = {
      0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,    0x89,   0x11D,
      0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,  0x1002D};
  require(m >= 1 && m < kPoly.size(), "gf2: field degree out of range");
  return kPoly[m];
}

inline std::uint32_t mul(std::uint32_t a, std::uint32_t b, unsigned m) {
  const std::uint32_t poly = modulus(m);
  std::uint32_t r = 0;
  while (b != 0) {
    if (b & 1U) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1U << m)) a ^= poly;
  }
  return r;
}

inline std::uint32_t pow(std::uint32_t a, unsigned e, unsigned m) {
  std::uint32_t r = 1;
  while (e != 0) {
    if (e & 1U) r = mul(r, a, m);
    a = mul(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace gf2

// ---------------------------------------------------------------------------
// Universal sets.

/// A d-subset of variables and a pattern no row realizes on them.
struct UniversalWitness {
  std::vector<std::size_t> indices;
  std::vector<std::uint8_t> pattern;
  friend bool operator==(const UniversalWitness&, const UniversalWitness&) = default;
};

/// Lexicographically first (index set, pattern) that S misses, if any.
inline std::optional<UniversalWitness> verify_universal(const AssignmentSet& s, std::size_t d) {
  require(d <= s.n(), "verify_universal: d exceeds n");
  if (d == 0) {
    if (s.empty()) return UniversalWitness{};
    return std::nullopt;
  }
  require(d <= 16, "verify_universal: d too large");
  const std::size_t patterns = std::size_t{1} << d;
  std::vector<std::uint8_t> seen(patterns);
  std::vector<std::size_t> c(d);
  std::iota(c.begin(), c.end(), 0);
  do {
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t hit = 0;
    for (std::size_t r = 0; r < s.size() && hit < patterns; ++r) {
      std::size_t p = 0;
      for (auto v : c) p = (p << 1) | (s.bit(r, v) ? 1U : 0U);
      if (!seen[p]) {
        seen[p] = 1;
        ++hit;
      }
    }
    if (hit == patterns) continue;
    for (std::size_t p = 0; p < patterns; ++p) {
      if (seen[p]) continue;
      UniversalWitness w{c, std::vector<std::uint8_t>(d)};
      for (std::size_t k = 0; k < d; ++k) w.pattern[k] = (p >> (d - 1 - k)) & 1U;
      return w;
    }
  } while (next_combination(c, s.n()));
  return std::nullopt;
}

/// Row count used by random_universal_set: ceil(2^d (d ln n + d + ln(1/delta))).
inline std::size_t universal_set_size(std::size_t n, std::size_t d, double delta) {
  const double p = std::ldexp(1.0, static_cast<int>(d));
  const double m = p * (static_cast<double>(d) * std::log(static_cast<double>(n)) + static_cast<double>(d) +
                        std::log(1.0 / delta));
  return static_cast<std::size_t>(std::ceil(m - 1e-9));
}

/// Uniform rows; (n,d)-universal with probability at least 1 - delta.
inline AssignmentSet random_universal_set(std::size_t n, std::size_t d, double delta, Rng& rng) {
  require(d <= n && n >= 1, "random_universal_set: need d <= n");
  require(delta > 0.0 && delta < 1.0, "random_universal_set: delta must be in (0,1)");
  AssignmentSet s(n);
  const std::size_t m = d == 0 ? 1 : universal_set_size(n, d, delta);
  s.reserve(m);
  for (std::size_t i = 0; i < m; ++i) s.push_back(Assignment::random(n, rng));
  return s;
}

/// All 2^n assignments in increasing binary order (x_1 least significant).
inline AssignmentSet full_cube(std::size_t n) {
  require(n <= 24, "full_cube: n too large");
  AssignmentSet s(n);
  s.reserve(std::size_t{1} << n);
  Assignment a(n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (n > 0) a.words()[0] = x;
    s.push_back(a);
  }
  return s;
}

// ---------------------------------------------------------------------------
// k-wise independent sample spaces.

/// Seed length of the BCH-style construction for (n, k).
inline std::size_t kwise_seed_bits(std::size_t n, std::size_t k) {
  const std::size_t t = k / 2;
  const std::size_t m = std::max<std::size_t>(1, ceil_log2(n + 1));
  return 1 + m * t;
}

/// Sample space where every k columns are exactly uniform. Column i gets the
/// vector (1, a, a^3, ..., a^{2t-1}) over GF(2^m) with a = i+1 and t = k/2;
/// rows are all linear functionals of those vectors. Any 2t+1 columns are
/// linearly independent, so every k <= 2t+1 coordinates are uniform. When
/// 2^n is no larger, the full cube is returned instead.
inline AssignmentSet kwise_independent_set(std::size_t n, std::size_t k) {
  require(k >= 1 && k <= n, "kwise_independent_set: need 1 <= k <= n");
  const std::size_t t = k / 2;
  const std::size_t m = std::max<std::size_t>(1, ceil_log2(n + 1));
  const std::size_t bits = 1 + m * t;
  if (n <= bits) return full_cube(n);
  require(bits <= 26, "kwise_independent_set: sample space too large");
  require(m <= 16, "kwise_independent_set: n too large");

  // colmask[j] = set of variables whose vector has bit j.
  const std::size_t words = (n + 63) / 64;
  std::vector<Assignment> colmask(bits, Assignment(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto alpha = static_cast<std::uint32_t>(i + 1);
    colmask[0].set(i, true);
    for (std::size_t e = 0; e < t; ++e) {
      const std::uint32_t v = gf2::pow(alpha, static_cast<unsigned>(2 * e + 1), static_cast<unsigned>(m));
      for (std::size_t b = 0; b < m; ++b)
        if ((v >> b) & 1U) colmask[1 + e * m + b].set(i, true);
    }
  }

  // Gray-code walk over all seeds; row(g) = XOR of colmask over set bits.
  AssignmentSet s(n);
  const std::size_t rows = std::size_t{1} << bits;
  s.reserve(rows);
  Assignment cur(n);
  s.push_back(cur);
  for (std::size_t w = 1; w < rows; ++w) {
    const auto j = static_cast<std::size_t>(std::countr_zero(w));
    for (std::size_t q = 0; q < words; ++q) cur.words()[q] ^= colmask[j].words()[q];
    s.push_back(cur);
  }
  return s;
}

/// True iff every k columns of s show each k-bit pattern equally often.
inline bool check_kwise_uniform(const AssignmentSet& s, std::size_t k) {
  if (k > s.n() || s.empty()) return false;
  const std::size_t patterns = std::size_t{1} << k;
  if (s.size() % patterns != 0) return false;
  const std::size_t expect = s.size() / patterns;
  std::vector<std::size_t> count(patterns);
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  do {
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t r = 0; r < s.size(); ++r) {
      std::size_t p = 0;
      for (auto v : c) p = (p << 1) | (s.bit(r, v) ? 1U : 0U);
      ++count[p];
    }
    for (auto x : count)
      if (x != expect) return false;
  } while (next_combination(c, s.n()));
  return true;
}

// ---------------------------------------------------------------------------
// Perfect hash families.

/// Maps [n] -> [q]; values are 0-based in memory, 1-based in files.
struct HashFamily {
  std::size_t n = 0;
  std::size_t q = 0;
  std::vector<std::vector<std::uint32_t>> maps;
  std::size_t size() const { return maps.size(); }
};

inline bool injective_on(std::span<const std::uint32_t> h, std::span<const std::size_t> subset) {
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      if (h[subset[a]] == h[subset[b]]) return false;
  return true;
}

/// First d-subset (lexicographic) that no map separates, if any.
inline std::optional<std::vector<std::size_t>> verify_phf(const HashFamily& h, std::size_t d) {
  require(d <= h.n, "verify_phf: d exceeds n");
  if (d <= 1) {
    if (h.maps.empty() && h.n > 0 && d == 1) return std::vector<std::size_t>{0};
    return std::nullopt;
  }
  std::vector<std::size_t> c(d);
  std::iota(c.begin(), c.end(), 0);
  do {
    bool ok = false;
    for (const auto& m : h.maps)
      if (injective_on(m, c)) {
        ok = true;
        break;
      }
    if (!ok) return c;
  } while (next_combination(c, h.n));
  return std::nullopt;
}

/// Single map i -> i, valid when n <= q.
inline HashFamily identity_family(std::size_t n, std::size_t q) {
  require(n <= q, "identity_family: needs n <= q");
  HashFamily f{n, q, {std::vector<std::uint32_t>(n)}};
  std::iota(f.maps[0].begin(), f.maps[0].end(), 0U);
  return f;
}

/// Probability that a uniform map [n]->[q] is injective on a fixed d-set.
inline double phf_separation_probability(std::size_t q, std::size_t d) {
  double p = 1.0;
  for (std::size_t i = 0; i < d; ++i) p *= 1.0 - static_cast<double>(i) / static_cast<double>(q);
  return p;
}

/// Size used by random mode: ceil((ln C(n,d) + ln(1/delta)) / ln(1/(1-p))).
inline std::size_t phf_random_size(std::size_t n, std::size_t q, std::size_t d, double delta) {
  const double p = phf_separation_probability(q, d);
  if (p >= 1.0) return 1;
  const double lnc = std::log(static_cast<double>(std::max<std::uint64_t>(1, binomial(n, d))));
  const double s = (lnc + std::log(1.0 / delta)) / std::log(1.0 / (1.0 - p));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s - 1e-9)));
}

enum class PhfMode { random, greedy };

struct PhfOptions {
  PhfMode mode = PhfMode::greedy;
  double delta = 0.05;
  std::size_t candidates_per_step = 32;
  std::size_t max_attempts = 20;
};

inline std::vector<std::uint32_t> random_map(std::size_t n, std::size_t q, Rng& rng) {
  std::vector<std::uint32_t> h(n);
  for (auto& x : h) x = static_cast<std::uint32_t>(uniform_below(rng, q));
  return h;
}

/// Builds an (n,q,d)-perfect hash family; the output always passes verify_phf.
inline HashFamily phf_build(std::size_t n, std::size_t q, std::size_t d, Rng& rng, const PhfOptions& opt = {}) {
  require(d <= n, "phf_build: d exceeds n");
  require(q >= std::max<std::size_t>(d, 1), "phf_build: q must be at least d");
  HashFamily fam{n, q, {}};
  if (d <= 1) {
    fam.maps.push_back(std::vector<std::uint32_t>(n, 0));
    return fam;
  }
  if (opt.mode == PhfMode::random) {
    const std::size_t size = phf_random_size(n, q, d, opt.delta);
    for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
      fam.maps.clear();
      for (std::size_t i = 0; i < size; ++i) fam.maps.push_back(random_map(n, q, rng));
      if (!verify_phf(fam, d)) return fam;
    }
    throw ConstructionError("phf_build: random family failed verification repeatedly");
  }

  std::vector<std::vector<std::size_t>> open;
  std::vector<std::size_t> c(d);
  std::iota(c.begin(), c.end(), 0);
  do open.push_back(c);
  while (next_combination(c, n));

  const std::size_t cap = 64 * phf_random_size(n, q, d, 0.5) + 64;
  while (!open.empty()) {
    if (fam.maps.size() >= cap) throw ConstructionError("phf_build: greedy family exceeded size cap");
    std::vector<std::uint32_t> best;
    std::size_t best_cover = 0;
    for (std::size_t k = 0; k < opt.candidates_per_step; ++k) {
      auto h = random_map(n, q, rng);
      std::size_t cover = 0;
      for (const auto& s : open) cover += injective_on(h, s) ? 1 : 0;
      if (cover > best_cover) {
        best_cover = cover;
        best = std::move(h);
      }
    }
    if (best_cover == 0) continue;
    std::erase_if(open, [&](const std::vector<std::size_t>& s) { return injective_on(best, s); });
    fam.maps.push_back(std::move(best));
  }
  return fam;
}

}  // namespace junta
