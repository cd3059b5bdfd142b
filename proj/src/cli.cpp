#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "budgetkl/bench.hpp"
#include "budgetkl/errors.hpp"

namespace budgetkl::cli {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRunFailure = 2;
constexpr int kViolation = 3;

struct GridFlags {
  std::vector<std::string> data;
  std::vector<std::string> algos;
  std::string budgets;
  double sigma = 1.0;
  std::string epsilons;
  std::string U;
  std::optional<double> lambda;
  double eta = 0.0005;
  std::string ct = "norm-ratio";
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::size_t jobs = 1;
  std::string format = "csv";
  std::optional<std::size_t> subsample;
  bool check_bounds = false;
};

void add_grid_flags(CLI::App* app, GridFlags& g) {
  app->add_option("--data", g.data, "dataset path, name under $BUDGETKL_DATA_DIR, or synth:<kind>:k=v,...")->required();
  app->add_option("--algo", g.algos, "perceptron|avp|avp-adaptive|ahpatron|ahpatron-noproj|budget-oldest|budget-random")
      ->required()
      ->delimiter(',');
  app->add_option("--B", g.budgets, "budget(s), comma separated");
  app->add_option("--sigma", g.sigma, "Gaussian kernel width");
  app->add_option("--epsilon", g.epsilons, "epsilon value(s); default grid 0.5..0.9 for margin-triggered learners");
  app->add_option("--U", g.U, "ball radius (default sqrt(B)/2 when budgeted, inf otherwise)");
  app->add_option("--lambda", g.lambda, "step size (default U/(2 sqrt(B)) when budgeted, 1 otherwise)");
  app->add_option("--eta", g.eta, "ridge term of the projection solve");
  app->add_option("--ct", g.ct, "fixed:<c> | norm-ratio");
  app->add_option("--seed", g.seed, "single permutation seed");
  app->add_option("--seeds", g.seeds, "seed list: 1,2,3 or 1..5; a bare N means 1..N");
  app->add_option("--out", g.out, "output file (default stdout)");
  app->add_option("--jobs", g.jobs, "concurrent runs");
  app->add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--subsample", g.subsample, "use a seeded uniform subsample of this size");
  app->add_flag("--check-bounds", g.check_bounds, "audit every run and evaluate the applicable bounds");
}

bench::BenchConfig to_bench_config(const GridFlags& g) {
  bench::BenchConfig c;
  c.datasets = g.data;
  for (const std::string& a : g.algos) c.algorithms.push_back(parse_algorithm(a));
  if (!g.budgets.empty()) c.budgets = bench::parse_size_list(g.budgets);
  c.sigma = g.sigma;
  if (!g.epsilons.empty()) c.epsilons = bench::parse_double_list(g.epsilons);
  if (!g.U.empty()) {
    const auto u = bench::parse_double_list(g.U);
    if (u.size() != 1) throw ConfigError("U: expects a single value");
    c.U = u[0];
  }
  c.lambda = g.lambda;
  c.eta = g.eta;
  c.ct_mode = parse_ct_mode(g.ct);
  if (g.seed && !g.seeds.empty()) throw ConfigError("seed: use either --seed or --seeds");
  if (g.seed) {
    c.seeds = {*g.seed};
  } else if (!g.seeds.empty()) {
    c.seeds = bench::parse_seed_list(g.seeds);
  } else {
    c.seeds = {1};
  }
  c.subsample = g.subsample;
  c.check_bounds = g.check_bounds;
  c.jobs = g.jobs;
  return c;
}

void print_bound_lines(const std::vector<bench::ResultRow>& rows, std::ostream& os) {
  for (const bench::ResultRow& r : rows) {
    const std::string tag = r.dataset + " " + std::string(to_string(r.config.algorithm)) + " seed=" + std::to_string(r.config.seed) +
                            " eps=" + (std::ostringstream() << r.config.epsilon).str();
    for (const BoundReport& b : r.bounds) {
      os << (b.holds ? "holds    " : "VIOLATED ") << b.bound_name << " lhs=" << b.lhs << " rhs=" << b.rhs << "  [" << tag << "]\n";
    }
    for (const std::string& issue : r.invariant_issues) os << "INVARIANT " << issue << "  [" << tag << "]\n";
  }
}

int finish_grid(const GridFlags& g, const std::vector<bench::ResultRow>& rows, bool summary_file) {
  std::ofstream file;
  if (!g.out.empty()) {
    file.open(g.out);
    if (!file) throw ConfigError("out: cannot open '" + g.out + "'");
  }
  std::ostream& out = g.out.empty() ? std::cout : file;
  bench::write_rows(rows, g.format, out);

  const auto aggs = bench::aggregate(rows);
  std::ostream& report = g.out.empty() ? std::cerr : std::cout;
  if (summary_file && !g.out.empty()) {
    std::ofstream summary(g.out + ".summary." + g.format);
    if (!summary) throw ConfigError("out: cannot open summary file next to '" + g.out + "'");
    bench::write_summary(aggs, g.format, summary);
  }
  for (const bench::Aggregate& a : aggs) {
    report << a.dataset << "  " << to_string(a.algorithm) << (a.budget ? "  B=" + std::to_string(*a.budget) : std::string())
           << "  best eps=" << a.best_epsilon << "  AMR=" << std::fixed << std::setprecision(2) << 100.0 * a.amr_mean << "% +- "
           << 100.0 * a.amr_std << "  |N_T|=" << std::setprecision(1) << a.n_t_mean << "  runs=" << a.runs << std::defaultfloat
           << std::setprecision(6) << '\n';
  }
  print_bound_lines(rows, report);

  bool failed = false;
  bool violated = false;
  for (const bench::ResultRow& r : rows) {
    if (!r.ok) {
      std::cerr << "run failed: " << r.dataset << " " << to_string(r.config.algorithm) << " seed " << r.config.seed << ": "
                << r.error << '\n';
      failed = true;
    }
    violated = violated || r.violated();
  }
  if (violated) return kViolation;
  return failed ? kRunFailure : kOk;
}

int cmd_grid(const GridFlags& g, bool single) {
  const bench::BenchConfig cfg = to_bench_config(g);
  if (single && (cfg.datasets.size() != 1 || cfg.algorithms.size() != 1 || cfg.budgets.size() > 1)) {
    throw ConfigError("run: takes one --data, one --algo and at most one --B (use bench for sweeps)");
  }
  bench::expand_grid(cfg);  // validate before loading any data
  return finish_grid(g, bench::run_grid(cfg), !single);
}

struct SuiteFlags {
  std::string data = "synth:noisy:T=2000,d=5,flip=0.05,seed=1";
  std::string suite = "all";
  std::size_t budget = 64;
  std::optional<double> U;
  std::optional<double> epsilon;
  double sigma = 1.0;
  double gamma = 0.1;
  std::uint64_t seed = 1;
  std::string format = "csv";
};

int cmd_check_bounds(const SuiteFlags& f) {
  bench::SuiteOptions o;
  for (std::string item; const char ch : f.suite + ",") {
    if (ch == ',') {
      if (!item.empty()) o.bounds.push_back(item);
      item.clear();
    } else {
      item.push_back(ch);
    }
  }
  o.budget = f.budget;
  o.U = f.U;
  o.epsilon = f.epsilon;
  o.sigma = f.sigma;
  o.gamma = f.gamma;
  o.seed = f.seed;
  Dataset ds = permute(bench::resolve_dataset(f.data), f.seed);

  const auto entries = bench::run_bound_suite(ds, o);
  bool violated = false;
  nlohmann::json arr = nlohmann::json::array();
  for (const bench::SuiteEntry& e : entries) {
    violated = violated || e.violated();
    if (f.format == "json") {
      nlohmann::json j;
      j["bound"] = e.bound;
      j["algo"] = std::string(to_string(e.config.algorithm));
      j["deterministic"] = e.deterministic;
      j["invariant_issues"] = e.invariant_issues;
      if (!e.skipped.empty()) j["skipped"] = e.skipped;
      nlohmann::json reps = nlohmann::json::array();
      for (const BoundReport& r : e.reports) {
        reps.push_back({{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}, {"components", r.components}, {"note", r.note}});
      }
      j["reports"] = reps;
      arr.push_back(j);
      continue;
    }
    if (!e.skipped.empty()) {
      std::cout << "skipped  " << e.bound << ": " << e.skipped << '\n';
    }
    for (const BoundReport& r : e.reports) {
      std::cout << (r.holds ? "holds    " : "VIOLATED ") << e.bound << "  lhs=" << r.lhs << "  rhs=" << r.rhs
                << (r.components.count("comparator_is_zero") && r.components.at("comparator_is_zero") == 1.0 ? "  (zero comparator)"
                                                                                                        : "")
                << '\n';
    }
    for (const std::string& issue : e.invariant_issues) std::cout << "INVARIANT " << e.bound << ": " << issue << '\n';
    if (!e.deterministic) std::cout << "NONDETERMINISTIC " << e.bound << '\n';
  }
  if (f.format == "json") std::cout << arr.dump(2) << '\n';
  return violated ? kViolation : kOk;
}

struct AlignFlags {
  std::string data;
  double sigma = 1.0;
  std::size_t cap = 20000;
  std::optional<std::size_t> subsample;
  std::uint64_t seed = 1;
};

int cmd_alignment(const AlignFlags& f) {
  Dataset ds = bench::resolve_dataset(f.data);
  if (f.subsample) {
    if (*f.subsample == 0 || *f.subsample > ds.size()) throw ConfigError("subsample: must lie in [1, " + std::to_string(ds.size()) + "]");
    ds = subsample(ds, *f.subsample, f.seed);
  }
  if (ds.size() > f.cap) {
    throw ConfigError("cap: stream has " + std::to_string(ds.size()) + " examples, above --cap " + std::to_string(f.cap) +
                      " (use --subsample)");
  }
  const KernelSpec kernel = KernelSpec::gaussian(f.sigma);
  const double a = kernel_alignment(ds.examples, kernel);
  const std::vector<double> scores = mean_embedding_scores(ds.examples, kernel);
  double hinge = 0.0;
  for (std::size_t t = 0; t < ds.size(); ++t) hinge += hinge_loss(scores[t], ds.examples[t].y);
  const double diff = a - hinge;
  const double tol = 1e-9 * static_cast<double>(ds.size());
  std::cout << std::setprecision(12) << "T=" << ds.size() << "\nalignment=" << a << "\nhinge_of_mean_embedding=" << hinge
            << "\ndifference=" << diff << '\n';
  // Gaussian kernels have kappa(x,x) = 1, so the identity must hold.
  if (std::abs(diff) > tol) {
    std::cout << "identity VIOLATED (tolerance " << tol << ")\n";
    return kViolation;
  }
  std::cout << "identity holds (tolerance " << tol << ")\n";
  return kOk;
}

struct GenFlags {
  std::string kind = "separable";
  std::size_t T = 1000;
  std::size_t d = 5;
  double margin = 0.5;
  double flip = 0.1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenFlags& f) {
  Dataset ds;
  try {
    if (f.kind == "separable") {
      ds = synth_separable(f.T, f.d, f.margin, f.seed);
    } else {
      ds = synth_noisy(f.T, f.d, f.flip, f.seed, f.margin);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (f.out.empty()) {
    write_libsvm(ds, std::cout);
  } else {
    std::ofstream out(f.out);
    if (!out) throw ConfigError("out: cannot open '" + f.out + "'");
    write_libsvm(ds, out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted online kernel learning: runs, sweeps, bound checks"};
  app.require_subcommand(1);

  GridFlags run_flags;
  GridFlags bench_flags;
  bench_flags.jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "one algorithm on one dataset (seeds and epsilon may be lists)");
  add_grid_flags(run_cmd, run_flags);
  auto* bench_cmd = app.add_subcommand("bench", "Cartesian sweep; writes <out>.summary.<format> with best-epsilon cells");
  add_grid_flags(bench_cmd, bench_flags);

  SuiteFlags suite;
  auto* check_cmd = app.add_subcommand("check-bounds", "run each bound with its required settings and certify it");
  check_cmd->add_option("--data", suite.data, "dataset (default: a noisy synthetic stream)");
  check_cmd->add_option("--suite", suite.suite, "all or a comma list of: perceptron, avp-constant, avp-adaptive, "
                                                "ahpatron-fixed, ahpatron-norm-ratio, removal-count, gap");
  check_cmd->add_option("--B", suite.budget, "budget for the budgeted bounds");
  check_cmd->add_option("--U", suite.U, "override the radius");
  check_cmd->add_option("--epsilon", suite.epsilon, "override epsilon");
  check_cmd->add_option("--sigma", suite.sigma, "Gaussian kernel width");
  check_cmd->add_option("--gamma", suite.gamma, "slack of the norm-ratio bound");
  check_cmd->add_option("--seed", suite.seed, "permutation seed");
  check_cmd->add_option("--format", suite.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  AlignFlags align;
  auto* align_cmd = app.add_subcommand("alignment", "kernel alignment versus the hinge loss of the mean embedding");
  align_cmd->add_option("--data", align.data, "dataset")->required();
  align_cmd->add_option("--sigma", align.sigma, "Gaussian kernel width");
  align_cmd->add_option("--cap", align.cap, "refuse streams longer than this");
  align_cmd->add_option("--subsample", align.subsample, "seeded uniform subsample size");
  align_cmd->add_option("--seed", align.seed, "subsample seed");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "emit a synthetic stream in LIBSVM format");
  gen_cmd->add_option("--kind", gen.kind, "separable | noisy")->check(CLI::IsMember({"separable", "noisy"}));
  gen_cmd->add_option("--T", gen.T, "number of examples");
  gen_cmd->add_option("--d", gen.d, "dimension");
  gen_cmd->add_option("--margin", gen.margin, "separation margin in (0, 1]");
  gen_cmd->add_option("--flip", gen.flip, "label flip probability (noisy)");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_grid(run_flags, true);
    if (*bench_cmd) return cmd_grid(bench_flags, false);
    if (*check_cmd) return cmd_check_bounds(suite);
    if (*align_cmd) return cmd_alignment(align);
    if (*gen_cmd) return cmd_gen(gen);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return kRunFailure;
  }
  return kConfigError;
}

}  // namespace budgetkl::cli
