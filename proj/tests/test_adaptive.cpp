#include <gtest/gtest.h>

#include <cmath>

#include "junta/adaptive.hpp"
#include "oracles.hpp"

using namespace junta;

namespace {

Junta jt(std::size_t n, std::vector<std::size_t> vars1, const std::string& table) {
  for (auto& v : vars1) v -= 1;
  std::vector<std::uint8_t> t;
  for (char c : table) t.push_back(c == '1');
  return Junta::make(n, std::move(vars1), std::move(t));
}

Assignment as(const std::string& s) { return Assignment::from_string(s); }

bool recovers(const LearnerResult& r, const Junta& f) { return r.ok && r.output.valid() && juntas_equivalent(r.output, f); }

AssignmentSet verified_universal(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  AssignmentSet u(n);
  do u = random_universal_set(n, d, 0.01, rng);
  while (oracle::first_missing_pattern(u, d));
  return u;
}

/// Failures allowed by the Monte Carlo criterion: delta T + 3 sqrt(delta(1-delta) T).
std::size_t allowed_failures(double delta, std::size_t trials) {
  const double t = static_cast<double>(trials);
  return static_cast<std::size_t>(std::floor(delta * t + 3 * std::sqrt(delta * (1 - delta) * t)));
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(BinarySearch, SingleElementAsksNothing) {
  Oracle o(jt(3, {2}, "01"));
  const auto r = binary_search_relevant(o, as("000"), as("010"), false, true, {1});
  EXPECT_EQ(r.index, 1U);
  EXPECT_EQ(o.stats().queries, 0U);
}

TEST(BinarySearch, HandTrace) {
  // z = {x_1, x_2}: a'' = 001 has f = 1 != f(a), so the search moves to {x_3}.
  Oracle o(jt(3, {3}, "01"));
  const auto r = binary_search_relevant(o, as("000"), as("111"), false, true, {0, 1, 2});
  EXPECT_EQ(r.index, 2U);
  EXPECT_LE(o.stats().queries, 2U);
  EXPECT_EQ(o.stats().queries, o.stats().rounds);
}

TEST(BinarySearch, EqualAnswersAreRejected) {
  EXPECT_THROW(BinarySearch(as("00"), as("11"), true, true, {0, 1}), ContractViolation);
}

TEST(BinarySearch, QueryBoundAndCertificate) {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + uniform_below(rng, 60);
    const Junta f = random_junta(n, 1 + uniform_below(rng, 3), rng);
    if (f.arity() == 0) continue;
    Assignment a = Assignment::random(n, rng), b = Assignment::random(n, rng);
    if (eval_junta(f, a) == eval_junta(f, b)) continue;
    const auto y = differing(a, b);
    Oracle o(f);
    const auto r = binary_search_relevant(o, a, b, eval_junta(f, a), eval_junta(f, b), y);
    EXPECT_LE(o.stats().queries, ceil_log2(y.size()));
    EXPECT_EQ(differing(r.low, r.high), std::vector<std::size_t>{r.index});
    EXPECT_TRUE(sensitive_wrt(f, r.low, r.index));
  }
}

// ---------------------------------------------------------------------------

TEST(Identify, SingleElementConfirms) {
  Oracle o(jt(4, {3}, "01"));
  const std::vector<std::size_t> y{2};
  EXPECT_EQ(oneround_identify(o, as("0000"), as("0010"), y), 2U);
  EXPECT_EQ(o.stats(), (QueryStats{1, 1}));
}

TEST(Identify, FourCandidates) {
  // y = {x_1, x_2, x_3, x_4}; the relevant variable is the third member.
  const Junta f = jt(5, {3}, "10");
  const std::vector<std::size_t> y{0, 1, 2, 3};
  const Assignment a = as("00000"), a2 = as("11110");
  const auto rows = identify_queries(a, a2, y);
  ASSERT_EQ(rows.size(), 3U);
  Oracle o(f);
  const auto ans = o.query_batch(rows);
  // Column of member 3 is (bit0 of 2, bit1 of 2, 1) = (0, 1, 1).
  const std::vector<std::uint8_t> col{0, 1, 1}, neg{1, 0, 0};
  EXPECT_TRUE(ans == col || ans == neg);
  Oracle o2(f);
  EXPECT_EQ(oneround_identify(o2, a, a2, y), 2U);
  EXPECT_EQ(o2.stats(), (QueryStats{3, 1}));
}

TEST(Identify, ColumnsDistinctAndNonComplementary) {
  for (std::size_t m = 1; m <= 70; ++m) {
    std::vector<std::size_t> y(m);
    std::iota(y.begin(), y.end(), 0);
    Assignment a(m), a2(m);
    for (std::size_t i = 0; i < m; ++i) a2.set(i, true);
    const auto rows = identify_queries(a, a2, y);
    ASSERT_EQ(rows.size(), ceil_log2(m) + 1);
    std::vector<std::string> cols;
    for (std::size_t k = 0; k < m; ++k) {
      std::string c;
      for (std::size_t r = 0; r < rows.size(); ++r) c += rows.bit(r, k) ? '1' : '0';
      cols.push_back(c);
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        EXPECT_NE(cols[i], cols[j]);
        std::string comp = cols[j];
        for (auto& ch : comp) ch = ch == '1' ? '0' : '1';
        EXPECT_NE(cols[i], comp);
      }
    }
  }
}

TEST(Identify, RecoversEveryPositionAndPolarity) {
  for (std::size_t m : {2, 3, 5, 8, 13}) {
    std::vector<std::size_t> y;
    for (std::size_t k = 0; k < m; ++k) y.push_back(2 * k + 1);
    const std::size_t n = 2 * m + 1;
    for (std::size_t pos = 0; pos < m; ++pos) {
      for (const char* table : {"01", "10"}) {
        const Junta f = jt(n, {y[pos] + 1}, table);
        Assignment a(n), a2(n);
        for (auto v : y) a2.set(v, true);
        Oracle o(f);
        EXPECT_EQ(oneround_identify(o, a, a2, y), y[pos]);
      }
    }
  }
}

// ---------------------------------------------------------------------------

TEST(AdaptiveUniversal, ConstantTargetUsesOneRound) {
  const auto u = verified_universal(8, 2, 1);
  Oracle o(Junta::constant(8, true));
  const auto r = learn_adaptive_universal(o, 8, 2, u);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.output, Junta::constant(8, true));
  EXPECT_EQ(o.stats(), (QueryStats{u.size(), 1}));
}

TEST(AdaptiveUniversal, XorWithCube) {
  const Junta f = jt(8, {1, 2}, "0110");
  Oracle o(f);
  const auto r = learn_adaptive_universal(o, 8, 2, full_cube(8));
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.output, f);
}

TEST(AdaptiveUniversal, ExhaustiveSmall) {
  for (std::size_t n : {4, 6}) {
    for (std::size_t d : {1, 2}) {
      const auto u = verified_universal(n, d, n + d);
      for (const auto& f : oracle::all_juntas(n, d)) {
        Oracle o(f);
        const auto r = learn_adaptive_universal(o, n, d, u);
        ASSERT_TRUE(recovers(r, f));
        EXPECT_LE(o.stats().queries, u.size() + d * ceil_log2(n));
        EXPECT_LE(o.stats().rounds, 1 + d * ceil_log2(n));
      }
    }
  }
}

TEST(AdaptiveUniversal, SampledAtSixtyFour) {
  Rng rng(31);
  const auto u = *design_cache().universal(64, 3);
  for (int t = 0; t < 50; ++t) {
    const Junta f = random_junta(64, 3, rng);
    Oracle o(f);
    const auto r = learn_adaptive_universal(o, 64, 3, u);
    ASSERT_TRUE(recovers(r, f));
    EXPECT_LE(o.stats().queries, u.size() + 3 * 6);
  }
}

// ---------------------------------------------------------------------------

TEST(TwoRoundDet, ExactlyTwoRounds) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const Junta f = random_junta(16, 2, rng);
    Oracle o(f);
    const auto r = learn_tworound_det(o, 16, 2);
    ASSERT_TRUE(recovers(r, f)) << r.witness;
    EXPECT_EQ(o.stats().rounds, f.arity() == 0 ? 1U : 2U);
  }
}

TEST(TwoRoundDet, ConstantSkipsSecondRound) {
  Oracle o(Junta::constant(16, false));
  const auto r = learn_tworound_det(o, 16, 2);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.output, Junta::constant(16, false));
  EXPECT_EQ(o.stats().rounds, 1U);
}

TEST(TwoRoundDet, QueryAudit) {
  const std::size_t n = 32, d = 2;
  const auto& h = *design_cache().phf(n, 8, d);
  const auto& a = *design_cache().bcf(8, d);
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Junta f = random_junta(n, d, rng);
    Oracle o(f);
    ASSERT_TRUE(recovers(learn_tworound_det(o, n, d), f));
    ASSERT_GE(o.round_sizes().size(), 1U);
    EXPECT_EQ(o.round_sizes()[0], h.size() * a.size());
    if (f.arity() > 0) {
      // One identification per relevant bin: ceil(log2 |bin|) + 1 queries each.
      EXPECT_GE(o.round_sizes()[1], f.arity());
      EXPECT_LE(o.round_sizes()[1], f.arity() * (ceil_log2(n) + 1));
    }
  }
}

TEST(TwoRoundDet, ExhaustiveSmall) {
  for (std::size_t d : {1, 2}) {
    for (const auto& f : oracle::all_juntas(6, d)) {
      Oracle o(f);
      ASSERT_TRUE(recovers(learn_tworound_det(o, 6, d), f));
    }
  }
}

TEST(TwoRoundDet, SampledDegreeThree) {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const Junta f = random_junta(64, 3, rng);
    Oracle o(f);
    ASSERT_TRUE(recovers(learn_tworound_det(o, 64, 3), f));
  }
}

// ---------------------------------------------------------------------------

TEST(TwoRoundRand, PartitionCount) {
  EXPECT_EQ(partition_count(2, 0.5), 1U);
  EXPECT_EQ(partition_count(2, 0.6), 1U);
  EXPECT_EQ(partition_count(2, 0.1), 4U);   // ceil(ln 10 / ln 2) = ceil(3.32)
  EXPECT_EQ(partition_count(3, 0.1), 3U);   // ceil(ln 10 / ln 3) = ceil(2.10)
  EXPECT_EQ(partition_count(1, 0.01), 1U);
}

TEST(TwoRoundRand, OnePartitionAboveOneOverD) {
  Rng rng(5);
  const Junta f = jt(32, {4, 9}, "0111");
  Oracle o(f);
  learn_tworound_rand(o, 32, 2, 0.5, rng);
  EXPECT_EQ(o.round_sizes()[0], design_cache().bcf(8, 2)->size());
}

TEST(TwoRoundRand, SuccessRate) {
  for (double delta : {0.1, 0.05}) {
    std::size_t fails = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      Rng rng(derive_seed(400, t));
      const Junta f = random_junta(32, 2, rng);
      Oracle o(f);
      const auto r = learn_tworound_rand(o, 32, 2, delta, rng);
      fails += recovers(r, f) ? 0 : 1;
      EXPECT_EQ(o.stats().rounds, f.arity() == 0 ? 1U : 2U);
    }
    EXPECT_LE(fails, allowed_failures(delta, 200));
  }
}

TEST(PolyTwoRound, SuccessRateAndAudit) {
  const std::size_t n = 32, d = 2;
  const double delta = 0.1;
  std::size_t fails = 0;
  const auto parts = partition_count(d, delta);
  const auto base = randna_params(8, d, 0.5);
  for (std::size_t t = 0; t < 100; ++t) {
    Rng rng(derive_seed(500, t));
    const Junta f = random_junta(n, d, rng);
    Oracle o(f);
    const auto r = learn_poly_tworound(o, n, d, delta, rng);
    fails += recovers(r, f) ? 0 : 1;
    EXPECT_EQ(o.round_sizes()[0], parts * base.queries());
    EXPECT_EQ(o.stats().rounds, f.arity() == 0 ? 1U : 2U);
  }
  EXPECT_LE(fails, allowed_failures(delta, 100));
}

// ---------------------------------------------------------------------------

TEST(MultiRound, ConstantTarget) {
  Rng rng(1);
  Oracle o(Junta::constant(32, true));
  const auto r = learn_multiround(o, 32, 2, 0.1, rng);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.output, Junta::constant(32, true));
  ASSERT_EQ(o.round_sizes().size(), 2U);
  EXPECT_EQ(o.round_sizes()[1], 1U);
}

TEST(MultiRound, PoolSize) {
  // ceil(2^d (ln 2d + ln(2/delta'))) with delta' = 1/d when repeating.
  EXPECT_EQ(multiround_pool_size(2, 0.5), static_cast<std::size_t>(std::ceil(4 * (std::log(4.0) + std::log(4.0)))));
  EXPECT_EQ(multiround_pool_size(3, 1.0 / 3), static_cast<std::size_t>(std::ceil(8 * (std::log(6.0) + std::log(6.0)))));
}

TEST(MultiRound, SuccessRoundsAndAudit) {
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{32, 2}, {64, 3}}) {
    const double delta = 0.1;
    const auto parts = partition_count(d, delta);
    const auto pool = multiround_pool_size(d, parts > 1 ? 1.0 / static_cast<double>(d) : delta);
    std::size_t fails = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      Rng rng(derive_seed(600 + d, t));
      const Junta f = random_junta(n, d, rng);
      Oracle o(f);
      const auto r = learn_multiround(o, n, d, delta, rng);
      fails += recovers(r, f) ? 0 : 1;
      EXPECT_LE(static_cast<double>(o.stats().rounds), multiround_round_bound(d));
      const auto& rs = o.round_sizes();
      EXPECT_EQ(rs[0], parts * pool);
      // Stage 2 asks every pattern of the discovered bins, stage 3 identifies.
      const std::size_t k = r.output.arity();
      const std::size_t stage2 = k > 0 ? rs.size() - 2 : rs.size() - 1;
      EXPECT_EQ(rs[stage2], std::uint64_t{1} << k);
      std::uint64_t total = 0;
      for (auto x : rs) total += x;
      EXPECT_EQ(total, o.stats().queries);
    }
    EXPECT_LE(fails, allowed_failures(delta, 200));
  }
}
