#include "budgetkl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "budgetkl/errors.hpp"

namespace budgetkl::bench {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_ms(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

/// RFC 4180 quoting for free-text fields (synthetic dataset specs contain commas).
std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& what) {
  T v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) throw ConfigError(what + ": cannot parse '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  return parse_number<double>(s, what);
}

Dataset resolve_synthetic(const std::string& spec) {
  const std::string rest = spec.substr(std::string("synth:").size());
  const auto colon = rest.find(':');
  const std::string kind = rest.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const std::string& item : split(rest.substr(colon + 1), ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("data: expected key=value in '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  const auto take = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto T = parse_number<std::size_t>(take("T", "2000"), "data T");
  const auto d = parse_number<std::size_t>(take("d", "5"), "data d");
  const auto seed = parse_number<std::uint64_t>(take("seed", "1"), "data seed");
  const double margin = parse_real(take("margin", "0.5"), "data margin");
  Dataset ds;
  try {
    if (kind == "separable") {
      ds = synth_separable(T, d, margin, seed);
    } else if (kind == "noisy") {
      const double flip = parse_real(take("flip", "0.1"), "data flip");
      ds = synth_noisy(T, d, flip, seed, margin);
    } else {
      throw ConfigError("data: unknown synthetic kind '" + kind + "' (separable|noisy)");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
  if (!kv.empty()) throw ConfigError("data: unknown synthetic parameter '" + kv.begin()->first + "'");
  ds.name = spec;
  return ds;
}

Comparator scaled_comparator(const std::vector<double>& unit_scores, double fbar_sq, const Dataset& ds, double U) {
  if (fbar_sq <= 0.0) return Comparator::zero(ds.size());
  const double target = std::min(1.0, U);
  const double factor = target / std::sqrt(fbar_sq);
  std::vector<double> scores(unit_scores);
  for (double& s : scores) s *= factor;
  return Comparator::from_scores(scores, target * target, ds.examples, "mean-embedding");
}

struct EmbeddingCache {
  std::vector<double> scores;
  double sq_norm = 0.0;

  static EmbeddingCache build(const Dataset& ds, const KernelSpec& kernel) {
    EmbeddingCache c;
    c.scores = mean_embedding_scores(ds.examples, kernel);
    for (std::size_t t = 0; t < ds.size(); ++t) c.sq_norm += ds.examples[t].y * c.scores[t];
    c.sq_norm = std::max(0.0, c.sq_norm / static_cast<double>(ds.size()));
    return c;
  }
};

/// Every checker whose algorithm matches; precondition failures are collected as skips.
void attach_bounds(ResultRow& row, const RunTrace& trace, const Comparator& f, double gamma) {
  const auto attempt = [&](auto&& fn) {
    try {
      row.bounds.push_back(fn());
    } catch (const PreconditionViolation& e) {
      row.skipped_bounds.emplace_back(e.what());
    }
  };
  switch (trace.config.algorithm) {
    case Algorithm::Perceptron:
      attempt([&] { return check_perceptron_bound(trace, f); });
      break;
    case Algorithm::AVP:
      attempt([&] { return check_avp_bound(trace, f, AvpVariant::ConstantRate); });
      break;
    case Algorithm::AVPAdaptive:
      attempt([&] { return check_avp_bound(trace, f, AvpVariant::AdaptiveRate); });
      break;
    case Algorithm::Ahpatron:
      if (std::holds_alternative<FixedScale>(trace.config.ct_mode)) {
        attempt([&] { return check_ahpatron_bound(trace, f); });
      } else {
        attempt([&] { return check_refined_bound(trace, f, gamma); });
      }
      break;
    default:
      break;
  }
  if (is_halving(trace.config.algorithm)) attempt([&] { return check_removal_count(trace); });
  if (!uses_perceptron_trigger(trace.config.algorithm)) attempt([&] { return check_gap_inequality(trace); });
}

nlohmann::json bound_json(const BoundReport& r) {
  nlohmann::json j;
  j["bound"] = r.bound_name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["holds"] = r.holds;
  j["components"] = r.components;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json real_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(fmt(v)); }

}  // namespace

Dataset resolve_dataset(const std::string& spec) {
  if (spec.starts_with("synth:")) return resolve_synthetic(spec);
  namespace fs = std::filesystem;
  std::vector<fs::path> candidates{fs::path(spec)};
  if (const char* dir = std::getenv("BUDGETKL_DATA_DIR")) candidates.push_back(fs::path(dir) / spec);
  candidates.push_back(fs::path("data") / spec);
  for (const fs::path& p : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) {
      Dataset ds = load_libsvm(p.string());
      ds.name = spec;
      return ds;
    }
  }
  throw ConfigError("data: cannot find '" + spec + "' (looked in ., $BUDGETKL_DATA_DIR, ./data)");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  const std::vector<std::string> items = split(text, ',');
  if (items.size() == 1 && items[0].find("..") == std::string::npos) {
    const auto n = parse_number<std::uint64_t>(items[0], "seeds");
    if (n == 0) throw ConfigError("seeds: count must be positive");
    for (std::uint64_t s = 1; s <= n; ++s) out.push_back(s);
    return out;
  }
  for (const std::string& item : items) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto lo = parse_number<std::uint64_t>(item.substr(0, dots), "seeds");
      const auto hi = parse_number<std::uint64_t>(item.substr(dots + 2), "seeds");
      if (hi < lo) throw ConfigError("seeds: empty range '" + item + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_number<std::uint64_t>(item, "seeds"));
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_real(item, "list"));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number<std::size_t>(item, "list"));
  return out;
}

std::vector<Cell> expand_grid(const BenchConfig& cfg) {
  if (cfg.datasets.empty()) throw ConfigError("data: at least one dataset is required");
  if (cfg.algorithms.empty()) throw ConfigError("algo: at least one algorithm is required");
  if (cfg.seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) throw ConfigError("sigma: must be positive");
  if (cfg.jobs == 0) throw ConfigError("jobs: must be positive");

  std::vector<Cell> cells;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    for (Algorithm algo : cfg.algorithms) {
      std::vector<std::optional<std::size_t>> budgets;
      if (is_budgeted(algo)) {
        if (cfg.budgets.empty()) throw ConfigError("B: required by " + std::string(to_string(algo)));
        budgets.assign(cfg.budgets.begin(), cfg.budgets.end());
      } else {
        budgets.push_back(std::nullopt);
      }
      std::vector<double> epsilons{0.0};
      if (!uses_perceptron_trigger(algo)) epsilons = cfg.epsilons.empty() ? kEpsilonGrid : cfg.epsilons;

      for (const auto& budget : budgets) {
        for (double eps : epsilons) {
          for (std::uint64_t seed : cfg.seeds) {
            LearnerConfig c;
            c.algorithm = algo;
            c.budget = budget;
            c.epsilon = eps;
            c.eta = cfg.eta;
            c.ct_mode = cfg.ct_mode;
            c.seed = seed;
            const double sqrt_b = budget ? std::sqrt(static_cast<double>(*budget)) : 0.0;
            if (cfg.U) {
              c.U = *cfg.U;
            } else if (budget) {
              c.U = sqrt_b / 2.0;
            } else if (algo == Algorithm::AVPAdaptive) {
              throw ConfigError("U: avp-adaptive needs an explicit --U");
            }
            if (cfg.lambda) {
              c.lambda = *cfg.lambda;
            } else if (budget && std::isfinite(c.U)) {
              c.lambda = c.U / (2.0 * sqrt_b);
            }
            c.validate();
            cells.push_back({d, c});
          }
        }
      }
    }
  }
  return cells;
}

bool ResultRow::violated() const {
  if (!invariant_issues.empty()) return true;
  return std::any_of(bounds.begin(), bounds.end(), [](const BoundReport& b) { return !b.holds; });
}

std::string to_csv(const ResultRow& row, bool with_elapsed) {
  const LearnerConfig& c = row.config;
  std::string s;
  s += csv_field(row.dataset) + ',';
  s += std::string(to_string(c.algorithm)) + ',';
  s += (c.budget ? std::to_string(*c.budget) : std::string()) + ',';
  s += fmt(row.sigma) + ',';
  s += fmt(c.epsilon) + ',';
  s += fmt(c.U) + ',';
  s += fmt(c.lambda) + ',';
  s += fmt(c.eta) + ',';
  s += (is_halving(c.algorithm) ? to_string(c.ct_mode) : std::string()) + ',';
  s += std::to_string(c.seed) + ',';
  if (row.ok) {
    const RunMetrics& m = row.metrics;
    s += std::to_string(row.T) + ',' + std::to_string(m.mistakes) + ',' + fmt(m.amr) + ',' + std::to_string(m.margin_mistakes) +
         ',' + std::to_string(m.low_confidence) + ',' + std::to_string(m.removals) + ',' + fmt(m.zeta_max) + ',';
  } else {
    s += ",,,,,,,";
  }
  if (with_elapsed && row.ok) s += fmt_ms(row.elapsed_ms);
  return s;
}

std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows) {
  struct Key {
    std::string dataset;
    Algorithm algo;
    std::optional<std::size_t> budget;
    auto operator<=>(const Key&) const = default;
  };
  // Preserve first-appearance order of cells so the summary follows grid order.
  std::vector<Key> order;
  std::map<Key, std::map<double, std::vector<const ResultRow*>>> groups;
  for (const ResultRow& r : rows) {
    if (!r.ok) continue;
    Key k{r.dataset, r.config.algorithm, r.config.budget};
    if (!groups.contains(k)) order.push_back(k);
    groups[k][r.config.epsilon].push_back(&r);
  }
  std::vector<Aggregate> out;
  for (const Key& k : order) {
    Aggregate best;
    bool have = false;
    for (const auto& [eps, members] : groups[k]) {
      Aggregate a;
      a.dataset = k.dataset;
      a.algorithm = k.algo;
      a.budget = k.budget;
      a.best_epsilon = eps;
      a.runs = members.size();
      for (const ResultRow* r : members) {
        a.amr_mean += r->metrics.amr;
        a.n_t_mean += static_cast<double>(r->metrics.low_confidence);
        a.elapsed_ms_mean += r->elapsed_ms;
      }
      const double n = static_cast<double>(a.runs);
      a.amr_mean /= n;
      a.n_t_mean /= n;
      a.elapsed_ms_mean /= n;
      double ss = 0.0;
      for (const ResultRow* r : members) ss += (r->metrics.amr - a.amr_mean) * (r->metrics.amr - a.amr_mean);
      a.amr_std = a.runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      if (!have || a.amr_mean < best.amr_mean) {
        best = a;
        have = true;
      }
    }
    out.push_back(best);
  }
  return out;
}

std::string to_csv(const Aggregate& a) {
  return csv_field(a.dataset) + ',' + std::string(to_string(a.algorithm)) + ',' + (a.budget ? std::to_string(*a.budget) : std::string()) +
         ',' + fmt(a.best_epsilon) + ',' + std::to_string(a.runs) + ',' + fmt(a.amr_mean) + ',' + fmt(a.amr_std) + ',' +
         fmt(a.n_t_mean) + ',' + fmt_ms(a.elapsed_ms_mean);
}

std::vector<ResultRow> run_grid(const BenchConfig& cfg) {
  const std::vector<Cell> cells = expand_grid(cfg);
  const KernelSpec kernel = KernelSpec::gaussian(cfg.sigma);

  std::vector<Dataset> datasets;
  for (const std::string& spec : cfg.datasets) {
    Dataset ds = resolve_dataset(spec);
    if (cfg.subsample) {
      if (*cfg.subsample > ds.size()) {
        throw ConfigError("subsample: " + std::to_string(*cfg.subsample) + " exceeds the " + std::to_string(ds.size()) +
                          " examples of '" + spec + "'");
      }
      ds = subsample(ds, *cfg.subsample, 0);
    }
    datasets.push_back(std::move(ds));
  }
  std::vector<EmbeddingCache> embeddings;
  if (cfg.check_bounds) {
    for (const Dataset& ds : datasets) embeddings.push_back(EmbeddingCache::build(ds, kernel));
  }

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const Dataset& ds = datasets[cell.dataset];
      ResultRow& row = rows[i];
      row.dataset = cfg.datasets[cell.dataset];
      row.config = cell.config;
      row.sigma = cfg.sigma;
      try {
        const Dataset stream = permute(ds, cell.config.seed);
        const RunTrace trace = run(cell.config, kernel, stream.examples, RunOptions{cfg.check_bounds});
        row.ok = true;
        row.T = trace.length();
        row.metrics = metrics(trace);
        row.elapsed_ms = trace.elapsed_ms;
        if (cfg.check_bounds) {
          row.invariant_issues = check_invariants(trace);
          const EmbeddingCache& e = embeddings[cell.dataset];
          attach_bounds(row, trace, scaled_comparator(e.scores, e.sq_norm, ds, cell.config.U), 0.1);
        }
      } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.jobs, std::max<std::size_t>(cells.size(), 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

void write_rows(const std::vector<ResultRow>& rows, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << kCsvHeader << '\n';
    for (const ResultRow& r : rows) out << to_csv(r) << '\n';
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    const LearnerConfig& c = r.config;
    nlohmann::json j;
    j["dataset"] = r.dataset;
    j["algo"] = std::string(to_string(c.algorithm));
    j["B"] = c.budget ? nlohmann::json(*c.budget) : nlohmann::json(nullptr);
    j["sigma"] = r.sigma;
    j["epsilon"] = c.epsilon;
    j["U"] = real_json(c.U);
    j["lambda"] = c.lambda;
    j["eta"] = c.eta;
    j["ct_mode"] = is_halving(c.algorithm) ? nlohmann::json(to_string(c.ct_mode)) : nlohmann::json(nullptr);
    j["seed"] = c.seed;
    if (r.ok) {
      j["T"] = r.T;
      j["mistakes"] = r.metrics.mistakes;
      j["amr"] = r.metrics.amr;
      j["m_prime"] = r.metrics.margin_mistakes;
      j["n_t"] = r.metrics.low_confidence;
      j["removals"] = r.metrics.removals;
      j["zeta_max"] = r.metrics.zeta_max;
      j["elapsed_ms"] = r.elapsed_ms;
    } else {
      j["error"] = r.error;
    }
    if (!r.bounds.empty() || !r.skipped_bounds.empty() || !r.invariant_issues.empty()) {
      nlohmann::json b = nlohmann::json::array();
      for (const BoundReport& rep : r.bounds) b.push_back(bound_json(rep));
      j["bounds"] = b;
      j["skipped_bounds"] = r.skipped_bounds;
      j["invariant_issues"] = r.invariant_issues;
    }
    arr.push_back(j);
  }
  out << arr.dump(2) << '\n';
}

void write_summary(const std::vector<Aggregate>& aggs, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << kSummaryHeader << '\n';
    for (const Aggregate& a : aggs) out << to_csv(a) << '\n';
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const Aggregate& a : aggs) {
    arr.push_back({{"dataset", a.dataset},
                   {"algo", std::string(to_string(a.algorithm))},
                   {"B", a.budget ? nlohmann::json(*a.budget) : nlohmann::json(nullptr)},
                   {"best_epsilon", a.best_epsilon},
                   {"runs", a.runs},
                   {"amr_mean", a.amr_mean},
                   {"amr_std", a.amr_std},
                   {"n_t_mean", a.n_t_mean},
                   {"elapsed_ms_mean", a.elapsed_ms_mean}});
  }
  out << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// bound suite

const std::vector<std::string>& suite_bound_names() {
  static const std::vector<std::string> names{"perceptron",          "avp-constant",  "avp-adaptive", "ahpatron-fixed",
                                              "ahpatron-norm-ratio", "removal-count", "gap"};
  return names;
}

bool SuiteEntry::violated() const {
  if (!invariant_issues.empty() || !deterministic) return true;
  return std::any_of(reports.begin(), reports.end(), [](const BoundReport& b) { return !b.holds; });
}

namespace {

LearnerConfig mandated_config(const std::string& bound, const SuiteOptions& o) {
  LearnerConfig c;
  c.seed = o.seed;
  const double sqrt_b = std::sqrt(static_cast<double>(o.budget));
  if (bound == "perceptron") {
    c.algorithm = Algorithm::Perceptron;
  } else if (bound == "avp-constant") {
    c.algorithm = Algorithm::AVP;
    c.lambda = 1.0;
    c.epsilon = o.epsilon.value_or(0.75);
  } else if (bound == "avp-adaptive") {
    c.algorithm = Algorithm::AVPAdaptive;
    c.U = o.U.value_or(1.0);
    c.epsilon = o.epsilon.value_or(0.75);
  } else if (bound == "ahpatron-fixed") {
    c.algorithm = Algorithm::Ahpatron;
    c.budget = o.budget;
    c.U = o.U.value_or(sqrt_b / 4.0);
    c.lambda = std::sqrt(2.0) * c.U / sqrt_b;
    c.ct_mode = FixedScale{0.6};
    c.epsilon = o.epsilon.value_or(std::min(0.95, (1.0 + 3.0 * c.U / sqrt_b) / 2.0));
  } else if (bound == "ahpatron-norm-ratio") {
    c.algorithm = Algorithm::Ahpatron;
    c.budget = o.budget;
    c.U = o.U.value_or(1.0);
    c.lambda = c.U / (2.0 * sqrt_b);
    c.ct_mode = NormRatioScale{};
    c.epsilon = o.epsilon.value_or(0.9);
  } else if (bound == "removal-count" || bound == "gap") {
    c.algorithm = Algorithm::Ahpatron;
    c.budget = o.budget;
    c.U = o.U.value_or(sqrt_b / 2.0);
    c.lambda = c.U / (2.0 * sqrt_b);
    c.epsilon = o.epsilon.value_or(0.7);
  } else {
    throw ConfigError("suite: unknown bound '" + bound + "'");
  }
  c.validate();
  return c;
}

BoundReport evaluate(const std::string& bound, const RunTrace& trace, const Comparator& f, double gamma) {
  if (bound == "perceptron") return check_perceptron_bound(trace, f);
  if (bound == "avp-constant") return check_avp_bound(trace, f, AvpVariant::ConstantRate);
  if (bound == "avp-adaptive") return check_avp_bound(trace, f, AvpVariant::AdaptiveRate);
  if (bound == "ahpatron-fixed") return check_ahpatron_bound(trace, f);
  if (bound == "ahpatron-norm-ratio") return check_refined_bound(trace, f, gamma);
  if (bound == "removal-count") return check_removal_count(trace);
  return check_gap_inequality(trace);
}

}  // namespace

std::vector<SuiteEntry> run_bound_suite(const Dataset& ds, const SuiteOptions& opts) {
  std::vector<std::string> bounds = opts.bounds;
  if (bounds.empty() || (bounds.size() == 1 && bounds[0] == "all")) bounds = suite_bound_names();
  const KernelSpec kernel = KernelSpec::gaussian(opts.sigma);

  // Build every config first so a bad flag fails before any computation.
  std::vector<LearnerConfig> configs;
  for (const std::string& b : bounds) configs.push_back(mandated_config(b, opts));

  EmbeddingCache embedding = EmbeddingCache::build(ds, kernel);
  std::vector<SuiteEntry> out;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    SuiteEntry e;
    e.bound = bounds[i];
    e.config = configs[i];
    const RunTrace trace = run(e.config, kernel, ds.examples, RunOptions{true});
    const RunTrace replay = run(e.config, kernel, ds.examples, RunOptions{true});
    e.deterministic = trace.same_run(replay);
    e.invariant_issues = check_invariants(trace);
    const std::vector<Comparator> comparators{Comparator::zero(ds.size()),
                                              scaled_comparator(embedding.scores, embedding.sq_norm, ds, e.config.U)};
    try {
      for (const Comparator& f : comparators) {
        BoundReport r = evaluate(e.bound, trace, f, opts.gamma);
        // The removal count and gap checks do not involve a comparator.
        if (e.bound == "removal-count" || e.bound == "gap") {
          e.reports.push_back(std::move(r));
          break;
        }
        r.components["comparator_is_zero"] = f.sq_norm == 0.0 ? 1.0 : 0.0;
        e.reports.push_back(std::move(r));
      }
    } catch (const PreconditionViolation& pv) {
      e.reports.clear();
      e.skipped = pv.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace budgetkl::bench
