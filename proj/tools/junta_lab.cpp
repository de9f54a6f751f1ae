// junta_lab: construct and verify designs, run learners, benchmark and report.
// Exit codes: 0 success, 1 verification or learning failure, 2 usage error.

#include <iostream>

#include "CLI11.hpp"
#include "junta/junta.hpp"

using namespace junta;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    io::write_file(out, text);
}

std::uint64_t need_seed(const std::optional<std::uint64_t>& seed, const std::string& what) {
  if (!seed) throw UsageError("--seed is required for " + what);
  return *seed;
}

struct Opts {
  std::string kind;
  std::size_t n = 0, d = 0, q = 0;
  double delta = 0.05;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string in, out, algo, target, design, config;
};

int run_construct(const Opts& o) {
  if (o.n == 0) throw UsageError("construct: --n is required");
  if (o.kind == "universal") {
    if (o.d == 0 || o.d > o.n) throw UsageError("construct universal: needs 1 <= d <= n");
    Rng rng(need_seed(o.seed, "construct universal"));
    emit(io::format_set(random_universal_set(o.n, o.d, o.delta, rng)), o.out);
  } else if (o.kind == "kwise") {
    if (o.d == 0 || o.d > o.n) throw UsageError("construct kwise: needs 1 <= d <= n");
    emit(io::format_set(kwise_independent_set(o.n, o.d)), o.out);
  } else if (o.kind == "bcf") {
    if (o.d > o.n) throw UsageError("construct bcf: needs d <= n");
    BcfOptions opt;
    opt.seed = need_seed(o.seed, "construct bcf");
    const AssignmentSet pool = o.mode == "exhaustive" ? full_cube(o.n) : default_bcf_pool(o.n, o.d);
    if (!o.mode.empty() && o.mode != "exhaustive" && o.mode != "pool")
      throw UsageError("construct bcf: --mode is pool or exhaustive");
    emit(io::format_set(greedy_bcf(o.n, o.d, pool, opt).rows), o.out);
  } else if (o.kind == "phf") {
    if (o.q == 0) throw UsageError("construct phf: --q is required");
    if (o.d > o.n) throw UsageError("construct phf: needs d <= n");
    PhfOptions opt;
    if (o.mode == "random")
      opt.mode = PhfMode::random;
    else if (!o.mode.empty() && o.mode != "greedy")
      throw UsageError("construct phf: --mode is random or greedy");
    opt.delta = o.delta;
    Rng rng(need_seed(o.seed, "construct phf"));
    emit(io::format_family(phf_build(o.n, o.q, o.d, rng, opt)), o.out);
  } else {
    throw UsageError("construct: unknown kind " + o.kind);
  }
  return 0;
}

std::string format_indices(std::span<const std::size_t> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k] + 1);
  return s;
}

int run_verify(const Opts& o) {
  if (o.in.empty()) throw UsageError("verify: --in is required");
  const std::string text = io::read_file(o.in);
  if (o.kind == "phf") {
    const HashFamily h = io::parse_family(text, o.q);
    if (o.d > h.n) throw UsageError("verify phf: d exceeds n");
    if (const auto w = verify_phf(h, o.d)) {
      std::cout << "FAIL unseparated subset " << format_indices(*w) << "\n";
      return 1;
    }
    std::cout << "PASS\n";
    return 0;
  }
  const AssignmentSet s = io::parse_set(text);
  if (o.d > s.n()) throw UsageError("verify: d exceeds n");
  if (o.kind == "universal") {
    if (const auto w = verify_universal(s, o.d)) {
      std::string pat;
      for (auto b : w->pattern) pat += b ? '1' : '0';
      std::cout << "FAIL missing pattern " << pat << " at " << format_indices(w->indices) << "\n";
      return 1;
    }
  } else if (o.kind == "kwise") {
    if (!check_kwise_uniform(s, o.d)) {
      std::cout << "FAIL some " << o.d << " columns are not uniform\n";
      return 1;
    }
  } else if (o.kind == "bcf") {
    if (const auto w = verify_bcf(s, o.d)) {
      std::string z;
      for (auto b : w->z) z += b ? '1' : '0';
      std::cout << "FAIL disconnected graph i=" << format_indices(w->i) << " j=" << format_indices(w->j)
                << " k=" << format_indices(w->k) << " z=" << z << "\n";
      return 1;
    }
  } else {
    throw UsageError("verify: unknown kind " + o.kind);
  }
  std::cout << "PASS\n";
  return 0;
}

int run_learn(const Opts& o) {
  if (o.target.empty()) throw UsageError("learn: --target is required");
  const Junta target = io::parse_junta(io::read_file(o.target));
  const std::size_t n = o.n == 0 ? target.n : o.n;
  if (n != target.n) throw UsageError("learn: --n differs from the target's n");
  if (o.d == 0 || o.d > n) throw UsageError("learn: needs 1 <= d <= n");
  const AlgorithmInfo& info = algorithm(o.algo);
  Oracle oracle(target);
  LearnerResult r;
  if (!o.design.empty()) {
    const std::string text = io::read_file(o.design);
    if (o.algo == "equivset") {
      r = learn_equivset(oracle, n, o.d, io::parse_set(text));
    } else if (o.algo == "block") {
      r = learn_block_expansion(oracle, n, o.d, io::parse_set(text));
    } else if (o.algo == "adapuniv") {
      r = learn_adaptive_universal(oracle, n, o.d, io::parse_set(text));
    } else if (o.algo == "detreduce") {
      const HashFamily h = io::parse_family(text, detreduce_q(o.d));
      const PlanFactory base = [&](std::size_t q) -> std::unique_ptr<OneRoundPlan> {
        return std::make_unique<EquivsetPlan>(design_cache().bcf(q, std::min(o.d, q)), o.d);
      };
      r = learn_reduce_deterministic(oracle, n, o.d, h.q, base, h);
    } else {
      throw UsageError("learn: --design is not accepted by " + o.algo);
    }
  } else {
    Rng rng(info.randomized ? need_seed(o.seed, "randomized algorithms") : o.seed.value_or(0));
    if (info.randomized && !(o.delta > 0 && o.delta < 1)) throw UsageError("learn: --delta must lie in (0,1)");
    r = info.learn(oracle, n, o.d, o.delta, rng);
  }
  const bool ok = r.ok && juntas_equivalent(r.output, target);
  std::cout << io::format_junta(r.output);
  std::cout << "queries=" << oracle.stats().queries << " rounds=" << oracle.stats().rounds
            << " ok=" << (ok ? "true" : "false") << "\n";
  if (!r.ok) std::cout << "witness: " << r.witness << "\n";
  return ok ? 0 : 1;
}

int run_bench_cmd(const Opts& o) {
  if (o.config.empty()) throw UsageError("bench: --config is required");
  BenchConfig cfg = parse_bench_config(io::read_file(o.config));
  if (!o.out.empty()) cfg.out = o.out;
  const auto recs = run_bench(cfg);
  emit(format_records(recs), cfg.out);
  return 0;
}

int run_report(const Opts& o) {
  if (o.in.empty()) throw UsageError("report: --in is required");
  const auto recs = parse_records(io::read_file(o.in));
  const Report rep = emit_report(recs);
  std::cout << rep.text;
  if (!o.out.empty()) io::write_file(o.out, rep.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"junta_lab: exact learning of juntas from membership queries"};
  app.require_subcommand(1);
  Opts o;
  std::uint64_t seed = 0;

  auto* construct = app.add_subcommand("construct", "build a design and print it");
  construct->add_option("kind", o.kind, "universal | kwise | bcf | phf")->required();
  construct->add_option("--n", o.n, "variable count")->required();
  construct->add_option("--d", o.d, "degree (k for kwise)");
  construct->add_option("--q", o.q, "range size for phf");
  construct->add_option("--delta", o.delta, "failure bound for randomized constructions");
  auto* c_seed = construct->add_option("--seed", seed, "random seed");
  construct->add_option("--mode", o.mode, "bcf: pool | exhaustive; phf: greedy | random");
  construct->add_option("--out", o.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "check a design file");
  verify->add_option("kind", o.kind, "universal | kwise | bcf | phf")->required();
  verify->add_option("--in", o.in, "design file")->required();
  verify->add_option("--d", o.d, "degree")->required();
  verify->add_option("--q", o.q, "range size for phf");

  auto* learn = app.add_subcommand("learn", "learn a target junta through its oracle");
  learn->add_option("--algo", o.algo, "learner id")
      ->required()
      ->check(CLI::IsMember({"equivset", "block", "detreduce", "randna", "randred", "adapuniv", "det2r", "rand2r",
                             "poly2r", "multi"}));
  learn->add_option("--n", o.n, "variable count (must match the target)");
  learn->add_option("--d", o.d, "junta size bound")->required();
  learn->add_option("--delta", o.delta, "failure bound");
  auto* l_seed = learn->add_option("--seed", seed, "random seed");
  learn->add_option("--target", o.target, "target junta file")->required();
  learn->add_option("--design", o.design, "design file for deterministic learners");

  auto* bench = app.add_subcommand("bench", "run a benchmark grid");
  bench->add_option("--config", o.config, "config file")->required();
  bench->add_option("--out", o.out, "CSV output (default: config out, else stdout)");

  auto* report = app.add_subcommand("report", "summarize benchmark records");
  report->add_option("--in", o.in, "CSV records")->required();
  report->add_option("--out", o.out, "machine-readable summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (c_seed->count() > 0 || l_seed->count() > 0) o.seed = seed;

  try {
    if (*construct) return run_construct(o);
    if (*verify) return run_verify(o);
    if (*learn) return run_learn(o);
    if (*bench) return run_bench_cmd(o);
    if (*report) return run_report(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
