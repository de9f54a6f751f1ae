#pragma once

// Seeded benchmark harness: random targets per grid point, one record per
// trial, CSV round trip, and per-group summaries against explicit bounds.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <thread>

#include "junta/adaptive.hpp"
#include "junta/io.hpp"

namespace junta {

struct GridPoint {
  std::size_t n = 0;
  std::size_t d = 0;
  double delta = 0.1;
};

struct BenchConfig {
  std::vector<GridPoint> grid;
  std::size_t trials = 1;
  std::vector<std::string> algos;
  std::uint64_t seed = 1;
  std::string out;
  bool timing = false;  // wall time is recorded only when set
};

struct BenchRecord {
  std::string algo;
  std::size_t n = 0;
  std::size_t d = 0;
  double delta = 0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  std::uint64_t rounds = 0;
  bool ok = false;
  double ms = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

// ---------------------------------------------------------------------------
// Algorithm registry.

using LearnFn = std::function<LearnerResult(Oracle&, std::size_t n, std::size_t d, double delta, Rng&)>;
using BoundFn = std::function<double(std::size_t n, std::size_t d, double delta)>;

struct AlgorithmInfo {
  std::string id;
  bool randomized = false;
  LearnFn learn;
  BoundFn bound;  // explicit query bound
};

namespace bounds {

inline double lg(std::size_t x) { return static_cast<double>(ceil_log2(x)); }

/// Identification round: ceil(log2 n) + 1 queries per relevant bin.
inline double identify(std::size_t n, std::size_t d) { return static_cast<double>(d) * (lg(n) + 1); }

inline double phf_maps(std::size_t n, std::size_t q, std::size_t d) {
  return n <= q ? 1.0 : static_cast<double>(phf_random_size(n, q, d, 0.05));
}

inline double equivset(std::size_t n, std::size_t d, double) { return static_cast<double>(bcf_size_bound(n, d)); }

inline double block(std::size_t n, std::size_t d, double) {
  return static_cast<double>(universal_set_size(n, d, 0.01) * (n + 1));
}

inline double detreduce(std::size_t n, std::size_t d, double) {
  const std::size_t q = detreduce_q(d);
  return phf_maps(n, q, std::min(d + 1, n)) * static_cast<double>(bcf_size_bound(std::min(n, q), d));
}

inline double randna(std::size_t n, std::size_t d, double delta) {
  return static_cast<double>(randna_params(n, d, delta).queries());
}

inline double randred(std::size_t n, std::size_t d, double delta) {
  return static_cast<double>(randred_params(n, d, delta).queries());
}

inline double adapuniv(std::size_t n, std::size_t d, double) {
  return static_cast<double>(universal_set_size(n, d, 0.01)) + static_cast<double>(d) * lg(n);
}

inline double det2r(std::size_t n, std::size_t d, double) {
  const std::size_t q = cube(d);
  return phf_maps(n, q, d) * static_cast<double>(bcf_size_bound(std::min(n, q), d)) + identify(n, d);
}

inline double rand2r(std::size_t n, std::size_t d, double delta) {
  return static_cast<double>(partition_count(d, delta) * bcf_size_bound(cube(d), d)) + identify(n, d);
}

inline double poly2r(std::size_t n, std::size_t d, double delta) {
  const std::size_t parts = partition_count(d, delta);
  const double base = parts > 1 ? 1.0 / static_cast<double>(d) : delta;
  return static_cast<double>(parts * randna_params(cube(d), d, base).queries()) + identify(n, d);
}

inline double multi(std::size_t n, std::size_t d, double delta) {
  const std::size_t parts = partition_count(d, delta);
  const double dp = parts > 1 ? 1.0 / static_cast<double>(d) : delta;
  return static_cast<double>(parts * multiround_pool_size(d, dp)) +
         static_cast<double>(parts * d) * lg(cube(d)) + std::ldexp(1.0, static_cast<int>(d)) + identify(n, d);
}

}  // namespace bounds

inline const std::vector<AlgorithmInfo>& algorithms() {
  static const std::vector<AlgorithmInfo> list = [] {
    std::vector<AlgorithmInfo> a;
    auto det = [](auto fn) {
      return [fn](Oracle& o, std::size_t n, std::size_t d, double, Rng&) { return fn(o, n, d); };
    };
    a.push_back({"equivset", false,
                 det([](Oracle& o, std::size_t n, std::size_t d) {
                   return learn_equivset(o, n, d, *design_cache().bcf(n, d));
                 }),
                 bounds::equivset});
    a.push_back({"block", false,
                 det([](Oracle& o, std::size_t n, std::size_t d) {
                   return learn_block_expansion(o, n, d, *design_cache().universal(n, d));
                 }),
                 bounds::block});
    a.push_back({"detreduce", false, det([](Oracle& o, std::size_t n, std::size_t d) { return learn_detreduce(o, n, d); }),
                 bounds::detreduce});
    a.push_back({"randna", true, learn_randomized_nonadaptive, bounds::randna});
    a.push_back({"randred", true, learn_randomized_reduction, bounds::randred});
    a.push_back({"adapuniv", false,
                 det([](Oracle& o, std::size_t n, std::size_t d) {
                   return learn_adaptive_universal(o, n, d, *design_cache().universal(n, d));
                 }),
                 bounds::adapuniv});
    a.push_back({"det2r", false, det([](Oracle& o, std::size_t n, std::size_t d) { return learn_tworound_det(o, n, d); }),
                 bounds::det2r});
    a.push_back({"rand2r", true, learn_tworound_rand, bounds::rand2r});
    a.push_back({"poly2r", true, learn_poly_tworound, bounds::poly2r});
    a.push_back({"multi", true, learn_multiround, bounds::multi});
    return a;
  }();
  return list;
}

inline const AlgorithmInfo& algorithm(const std::string& id) {
  for (const auto& a : algorithms())
    if (a.id == id) return a;
  throw ContractViolation("unknown algorithm " + id);
}

// ---------------------------------------------------------------------------
// Config file: key=value lines; n, d, delta and algos are comma lists whose
// product forms the grid (points with d > n are skipped).

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = io::trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

inline std::size_t parse_size(const std::string& s, const char* what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ContractViolation(std::string("config: bad ") + what);
  return v;
}

inline double parse_double(const std::string& s, const char* what) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ContractViolation(std::string("config: bad ") + what);
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace detail

inline BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig cfg;
  std::vector<std::size_t> ns, ds;
  std::vector<double> deltas{0.1};
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = io::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractViolation("config: expected key=value");
    const std::string key = io::trim(line.substr(0, eq));
    const std::string val = io::trim(line.substr(eq + 1));
    if (key == "n") {
      ns.clear();
      for (const auto& t : detail::split_list(val)) ns.push_back(detail::parse_size(t, "n"));
    } else if (key == "d") {
      ds.clear();
      for (const auto& t : detail::split_list(val)) ds.push_back(detail::parse_size(t, "d"));
    } else if (key == "delta") {
      deltas.clear();
      for (const auto& t : detail::split_list(val)) deltas.push_back(detail::parse_double(t, "delta"));
    } else if (key == "algos" || key == "algo") {
      cfg.algos = detail::split_list(val);
    } else if (key == "trials") {
      cfg.trials = detail::parse_size(val, "trials");
    } else if (key == "seed") {
      cfg.seed = detail::parse_size(val, "seed");
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "timing") {
      cfg.timing = val == "1" || val == "true" || val == "on";
    } else {
      throw ContractViolation("config: unknown key " + key);
    }
  }
  for (auto n : ns)
    for (auto d : ds)
      for (auto delta : deltas)
        if (d <= n) cfg.grid.push_back({n, d, delta});
  if (cfg.grid.empty()) throw ContractViolation("config: empty grid");
  if (cfg.algos.empty()) throw ContractViolation("config: no algorithms");
  if (cfg.trials < 1) throw ContractViolation("config: trials must be at least 1");
  for (const auto& a : cfg.algos) (void)algorithm(a);
  for (const auto& p : cfg.grid)
    if (!(p.delta > 0 && p.delta < 1)) throw ContractViolation("config: delta must lie in (0,1)");
  return cfg;
}

// ---------------------------------------------------------------------------

inline bool record_less(const BenchRecord& a, const BenchRecord& b) {
  return std::tie(a.algo, a.n, a.d, a.delta, a.seed) < std::tie(b.algo, b.n, b.d, b.delta, b.seed);
}

/// Seed of trial t at grid point p; shared by every algorithm.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial) {
  return derive_seed(derive_seed(master, point), trial);
}

inline BenchRecord run_trial(const AlgorithmInfo& algo, const GridPoint& p, std::uint64_t seed, bool timing) {
  BenchRecord rec{algo.id, p.n, p.d, p.delta, seed, 0, 0, false, 0};
  Rng target_rng(seed);
  const Junta target = random_junta(p.n, p.d, target_rng);
  Oracle o(target);
  Rng rng(derive_seed(seed, 1));
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const LearnerResult r = algo.learn(o, p.n, p.d, p.delta, rng);
    rec.ok = r.ok && juntas_equivalent(r.output, target);
  } catch (const std::exception&) {
    rec.ok = false;
  }
  const auto t1 = std::chrono::steady_clock::now();
  rec.queries = o.stats().queries;
  rec.rounds = o.stats().rounds;
  if (timing) rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

/// Worker count from JUNTA_LAB_THREADS, default 1.
inline std::size_t bench_threads() {
  const char* env = std::getenv("JUNTA_LAB_THREADS");
  if (!env) return 1;
  const std::size_t v = std::strtoull(env, nullptr, 10);
  return std::max<std::size_t>(1, v);
}

inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
  struct Task {
    const AlgorithmInfo* algo;
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& id : cfg.algos)
    for (std::size_t p = 0; p < cfg.grid.size(); ++p)
      for (std::size_t t = 0; t < cfg.trials; ++t) tasks.push_back({&algorithm(id), p, trial_seed(cfg.seed, p, t)});
  std::vector<BenchRecord> out(tasks.size());
  const std::size_t workers = std::min(bench_threads(), tasks.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k)
      out[k] = run_trial(*tasks[k].algo, cfg.grid[tasks[k].point], tasks[k].seed, cfg.timing);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < tasks.size();)
          out[k] = run_trial(*tasks[k].algo, cfg.grid[tasks[k].point], tasks[k].seed, cfg.timing);
      });
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

// ---------------------------------------------------------------------------
// CSV.

inline constexpr const char* csv_header = "algo,n,d,delta,seed,queries,rounds,ok,ms";

inline std::string format_records(std::span<const BenchRecord> recs) {
  std::string s = std::string(csv_header) + "\n";
  for (const auto& r : recs) {
    s += r.algo + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," + detail::format_double(r.delta) + "," +
         std::to_string(r.seed) + "," + std::to_string(r.queries) + "," + std::to_string(r.rounds) + "," +
         (r.ok ? "1" : "0") + "," + detail::format_double(r.ms) + "\n";
  }
  return s;
}

inline std::vector<BenchRecord> parse_records(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || io::trim(line) != csv_header) throw ContractViolation("records: missing header");
  std::vector<BenchRecord> out;
  while (std::getline(is, line)) {
    line = io::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != 9) throw ContractViolation("records: expected 9 fields");
    BenchRecord r;
    r.algo = f[0];
    r.n = detail::parse_size(f[1], "n");
    r.d = detail::parse_size(f[2], "d");
    r.delta = detail::parse_double(f[3], "delta");
    r.seed = detail::parse_size(f[4], "seed");
    r.queries = detail::parse_size(f[5], "queries");
    r.rounds = detail::parse_size(f[6], "rounds");
    if (f[7] != "0" && f[7] != "1") throw ContractViolation("records: ok must be 0 or 1");
    r.ok = f[7] == "1";
    r.ms = detail::parse_double(f[8], "ms");
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report.

/// Wilson score interval for k successes in n trials at z = 1.96.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.96) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct ReportRow {
  std::string algo;
  std::size_t n = 0, d = 0;
  double delta = 0;
  std::size_t trials = 0, successes = 0;
  double mean_queries = 0, mean_rounds = 0;
  std::uint64_t max_queries = 0, max_rounds = 0;
  double bound = 0;
  double ratio = 0;
  bool randomized = false;
  double fail_lo = 0, fail_hi = 0;  // 95% interval of the failure rate
  bool pass = false;

  double success_rate() const { return static_cast<double>(successes) / static_cast<double>(trials); }
};

struct Report {
  std::vector<ReportRow> rows;
  std::string text;
  std::string csv;
};

inline std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

/// Deterministic rows pass when every trial succeeds and max queries stay
/// within the bound; randomized rows when the observed failure rate is at
/// most delta + 3 sqrt(delta(1-delta)/T).
inline Report emit_report(std::span<const BenchRecord> records) {
  require(!records.empty(), "report: no records");
  std::vector<BenchRecord> recs(records.begin(), records.end());
  std::sort(recs.begin(), recs.end(), record_less);
  Report rep;
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    ReportRow row;
    row.algo = recs[i].algo;
    row.n = recs[i].n;
    row.d = recs[i].d;
    row.delta = recs[i].delta;
    double sq = 0, sr = 0;
    while (j < recs.size() && recs[j].algo == row.algo && recs[j].n == row.n && recs[j].d == row.d &&
           recs[j].delta == row.delta) {
      ++row.trials;
      row.successes += recs[j].ok ? 1 : 0;
      sq += static_cast<double>(recs[j].queries);
      sr += static_cast<double>(recs[j].rounds);
      row.max_queries = std::max(row.max_queries, recs[j].queries);
      row.max_rounds = std::max(row.max_rounds, recs[j].rounds);
      ++j;
    }
    row.mean_queries = sq / static_cast<double>(row.trials);
    row.mean_rounds = sr / static_cast<double>(row.trials);
    bool known = true;
    try {
      const auto& info = algorithm(row.algo);
      row.randomized = info.randomized;
      row.bound = info.bound(row.n, row.d, row.delta);
    } catch (const std::exception&) {
      known = false;
    }
    row.ratio = row.bound > 0 ? static_cast<double>(row.max_queries) / row.bound : 0;
    const auto [lo, hi] = wilson_interval(row.trials - row.successes, row.trials);
    row.fail_lo = lo;
    row.fail_hi = hi;
    const double fail = 1.0 - row.success_rate();
    const double slack = 3.0 * std::sqrt(row.delta * (1 - row.delta) / static_cast<double>(row.trials));
    row.pass = known && (row.randomized ? fail <= row.delta + slack
                                        : row.successes == row.trials && row.ratio <= 1.0);
    rep.rows.push_back(row);
    i = j;
  }

  std::ostringstream t;
  t << std::left << std::setw(10) << "algo" << std::right << std::setw(5) << "n" << std::setw(3) << "d" << std::setw(7)
    << "delta" << std::setw(7) << "trials" << std::setw(8) << "success" << std::setw(12) << "mean_q" << std::setw(11)
    << "max_q" << std::setw(8) << "mean_r" << std::setw(6) << "max_r" << std::setw(13) << "bound" << std::setw(7)
    << "ratio" << "  fail_95%          verdict\n";
  std::ostringstream c;
  c << "algo,n,d,delta,trials,success_rate,mean_queries,max_queries,mean_rounds,max_rounds,bound,ratio,fail_lo,fail_hi,"
       "verdict\n";
  for (const auto& r : rep.rows) {
    const std::string verdict = r.pass ? "PASS" : "FAIL";
    const std::string interval = r.randomized ? "[" + fixed3(r.fail_lo) + "," + fixed3(r.fail_hi) + "]" : "-";
    t << std::left << std::setw(10) << r.algo << std::right << std::setw(5) << r.n << std::setw(3) << r.d << std::setw(7)
      << detail::format_double(r.delta) << std::setw(7) << r.trials << std::setw(8) << fixed3(r.success_rate())
      << std::setw(12) << fixed3(r.mean_queries) << std::setw(11) << r.max_queries << std::setw(8)
      << fixed3(r.mean_rounds) << std::setw(6) << r.max_rounds << std::setw(13) << fixed3(r.bound) << std::setw(7)
      << fixed3(r.ratio) << "  " << std::left << std::setw(18) << interval << verdict << "\n";
    c << r.algo << "," << r.n << "," << r.d << "," << detail::format_double(r.delta) << "," << r.trials << ","
      << fixed3(r.success_rate()) << "," << fixed3(r.mean_queries) << "," << r.max_queries << ","
      << fixed3(r.mean_rounds) << "," << r.max_rounds << "," << fixed3(r.bound) << "," << fixed3(r.ratio) << ","
      << fixed3(r.fail_lo) << "," << fixed3(r.fail_hi) << "," << verdict << "\n";
  }
  rep.text = t.str();
  rep.csv = c.str();
  return rep;
}

}  // namespace junta
