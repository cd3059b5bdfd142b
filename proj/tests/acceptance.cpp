// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                      every criterion
//   acceptance --criteria 4,5,6,7   a subset
//
// Exit status: 0 when every executed criterion passed, 1 on any failure, 77 when
// everything selected was skipped (the phishing dataset is not available).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "budgetkl/bench.hpp"
#include "budgetkl/data.hpp"
#include "budgetkl/diagnostics.hpp"
#include "budgetkl/errors.hpp"
#include "budgetkl/learners.hpp"
#include "budgetkl/solver.hpp"
#include "oracles.hpp"

using namespace budgetkl;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Line {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

/// Invariant bookkeeping shared by every criterion that runs learners.
struct InvariantLedger {
  std::size_t runs = 0;
  std::size_t removal_rounds = 0;
  std::size_t audited_splits = 0;
  std::size_t drift_samples = 0;
  std::size_t determinism_checks = 0;
  std::vector<std::string> issues;

  void record(const RunTrace& trace, const std::string& tag) {
    ++runs;
    for (const std::string& s : check_invariants(trace)) issues.push_back(tag + ": " + s);
    for (const RoundOutcome& o : trace.outcomes) {
      removal_rounds += o.removal;
      audited_splits += o.split_min_kept.has_value();
      drift_samples += o.norm_drift.has_value();
    }
  }

  void replay(const RunTrace& a, const RunTrace& b, const std::string& tag) {
    ++determinism_checks;
    if (!a.same_run(b)) issues.push_back(tag + ": replay differs");
  }
};

InvariantLedger g_ledger;

// ---------------------------------------------------------------------------
// Criteria 1-3: the phishing protocol.

struct PhishingResults {
  bool available = false;
  std::string missing_reason;
  double ahpatron_best_amr = 0.0;
  double ahpatron_best_eps = 0.0;
  double ahpatron_amr_std = 0.0;
  double ahpatron_n_t = 0.0;
  double oldest_amr = 0.0;
  double random_amr = 0.0;
  double seconds = 0.0;
};

PhishingResults& phishing() {
  static PhishingResults r = [] {
    PhishingResults out;
    Dataset ds;
    try {
      ds = bench::resolve_dataset("phishing");
    } catch (const ConfigError& e) {
      out.missing_reason = e.what();
      return out;
    }
    out.available = true;
    const auto t0 = Clock::now();
    const std::size_t B = 400;
    const double U = std::sqrt(double(B)) / 2.0;
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    const KernelSpec kernel = KernelSpec::gaussian(1.0);

    std::vector<Dataset> streams;
    for (std::uint64_t s : seeds) streams.push_back(permute(ds, s));

    bool first = true;
    for (double eps : bench::kEpsilonGrid) {
      double amr = 0.0;
      double n_t = 0.0;
      std::vector<double> amrs;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        LearnerConfig c;
        c.algorithm = Algorithm::Ahpatron;
        c.budget = B;
        c.U = U;
        c.lambda = U / (2.0 * std::sqrt(double(B)));
        c.epsilon = eps;
        c.eta = 0.0005;
        c.ct_mode = NormRatioScale{};
        c.seed = seeds[i];
        const RunTrace tr = run(c, kernel, streams[i].examples, {true});
        g_ledger.record(tr, "phishing ahpatron");
        const RunMetrics m = metrics(tr);
        amrs.push_back(m.amr);
        amr += m.amr / double(seeds.size());
        n_t += double(m.low_confidence) / double(seeds.size());
      }
      if (first || amr < out.ahpatron_best_amr) {
        first = false;
        out.ahpatron_best_amr = amr;
        out.ahpatron_best_eps = eps;
        out.ahpatron_n_t = n_t;
        double ss = 0.0;
        for (double a : amrs) ss += (a - amr) * (a - amr);
        out.ahpatron_amr_std = std::sqrt(ss / double(amrs.size() - 1));
      }
    }
    for (Algorithm a : {Algorithm::BudgetOldest, Algorithm::BudgetRandom}) {
      double amr = 0.0;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        LearnerConfig c;
        c.algorithm = a;
        c.budget = B;
        c.seed = seeds[i];
        const RunTrace tr = run(c, kernel, streams[i].examples, {true});
        g_ledger.record(tr, "phishing " + std::string(to_string(a)));
        amr += metrics(tr).amr / double(seeds.size());
      }
      (a == Algorithm::BudgetOldest ? out.oldest_amr : out.random_amr) = amr;
    }
    // Determinism on the real stream as well.
    LearnerConfig c;
    c.algorithm = Algorithm::Ahpatron;
    c.budget = B;
    c.U = U;
    c.lambda = U / (2.0 * std::sqrt(double(B)));
    c.epsilon = out.ahpatron_best_eps;
    g_ledger.replay(run(c, kernel, streams[0].examples, {true}), run(c, kernel, streams[0].examples, {true}), "phishing replay");
    out.seconds = seconds_since(t0);
    return out;
  }();
  return r;
}

Line criterion1() {
  const PhishingResults& p = phishing();
  if (!p.available) return {Verdict::Skip, "phishing dataset unavailable (" + p.missing_reason + ")"};
  const bool ok = p.ahpatron_best_amr <= 0.085 && p.seconds < 60.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("Ahpatron B=400 mean AMR %.2f%% +- %.2f (best eps %.1f, limit 8.50%%), %.1f s (limit 60 s)", 100.0 * p.ahpatron_best_amr,
                 100.0 * p.ahpatron_amr_std, p.ahpatron_best_eps, p.seconds)};
}

Line criterion2() {
  const PhishingResults& p = phishing();
  if (!p.available) return {Verdict::Skip, "phishing dataset unavailable"};
  return {p.ahpatron_n_t >= 500.0 ? Verdict::Pass : Verdict::Fail, format("mean |N_T| = %.1f (need >= 500)", p.ahpatron_n_t)};
}

Line criterion3() {
  const PhishingResults& p = phishing();
  if (!p.available) return {Verdict::Skip, "phishing dataset unavailable"};
  const bool ok = p.ahpatron_best_amr < p.oldest_amr && p.ahpatron_best_amr < p.random_amr;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("AMR ahpatron %.2f%% vs budget-oldest %.2f%% and budget-random %.2f%%", 100.0 * p.ahpatron_best_amr,
                 100.0 * p.oldest_amr, 100.0 * p.random_amr)};
}

// ---------------------------------------------------------------------------
// Criterion 4: closed-form projection against an independent minimizer.

Line criterion4() {
  const auto t0 = Clock::now();
  SplitMix64 rng(404);
  const KernelSpec g = KernelSpec::gaussian(1.0);
  double worst = 0.0;
  std::size_t instances = 0;
  for (; instances < 200; ++instances) {
    const int m = 1 + static_cast<int>(rng.uniform_below(20));
    const int k = m;
    std::vector<SparseVector> xs;
    for (int i = 0; i < m + k; ++i) xs.push_back(oracle::random_point(rng, 5, 1.5));
    ProjectionProblem p;
    p.K2.resize(m, m);
    p.K21.resize(m, k);
    p.alpha.resize(k);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) p.K2(i, j) = g(xs[i], xs[j]);
      for (int j = 0; j < k; ++j) p.K21(i, j) = g(xs[i], xs[m + j]);
    }
    for (int j = 0; j < k; ++j) p.alpha[j] = 2.0 * rng.uniform01() - 1.0;
    // Half the instances use the experiments' ridge, the rest a log-uniform spread.
    p.eta = instances % 2 == 0 ? 0.0005 : std::pow(10.0, -3.0 + 3.0 * rng.uniform01());

    const Eigen::VectorXd theta = solve_theta(p);
    oracle::Matrix k2(m, oracle::Vector(m));
    oracle::Vector r(m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) k2[i][j] = oracle::gaussian(xs[i], xs[j], 1.0);
      for (int j = 0; j < k; ++j) r[i] += oracle::gaussian(xs[i], xs[m + j], 1.0) * p.alpha[j];
    }
    const oracle::Vector cd = oracle::coordinate_descent(k2, p.eta, r);
    const double ref = oracle::projection_objective(k2, p.eta, r, cd);
    const double ours = p.objective(theta);
    worst = std::max(worst, std::abs(ours - ref) / std::max(std::abs(ref), 1e-300));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-6 && secs < 10.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("%zu instances (m = k <= 20), max relative objective gap %.2e (tol 1e-6), %.2f s (limit 10 s)", instances, worst, secs)};
}

// ---------------------------------------------------------------------------
// Criterion 5: every bound on 20 synthetic streams.

Line criterion5() {
  const auto t0 = Clock::now();
  std::map<std::string, std::size_t> checked;
  std::map<std::string, std::size_t> skipped;
  std::vector<std::string> violations;
  SplitMix64 rng(505);
  for (int s = 0; s < 20; ++s) {
    const std::uint64_t seed = rng.next();
    const bool separable = s % 2 == 0;
    const std::size_t d = 3 + static_cast<std::size_t>(s % 4);
    const Dataset ds = separable ? synth_separable(2000, d, 0.1 + 0.05 * (s % 5), seed)
                                 : synth_noisy(2000, d, 0.05 + 0.05 * (s % 4), seed);
    bench::SuiteOptions o;
    o.budget = s % 4 < 2 ? 64 : 100;
    if (s % 3 == 1) o.U = 1.0;
    if (s % 3 == 2) o.U = 1.5;
    o.sigma = s % 5 == 4 ? 0.5 : 1.0;
    o.gamma = s % 2 == 0 ? 0.1 : 0.3;
    o.seed = seed;
    const std::string tag = format("stream %d (%s, B=%zu)", s, separable ? "separable" : "noisy", o.budget);

    for (const bench::SuiteEntry& e : bench::run_bound_suite(ds, o)) {
      // The suite ran the trace with auditing on and replayed it once.
      ++g_ledger.runs;
      ++g_ledger.determinism_checks;
      for (const std::string& issue : e.invariant_issues) g_ledger.issues.push_back(tag + " " + e.bound + ": " + issue);
      if (!e.deterministic) g_ledger.issues.push_back(tag + " " + e.bound + ": replay differs");
      if (!e.skipped.empty()) {
        ++skipped[e.bound];
        continue;
      }
      for (const BoundReport& r : e.reports) {
        ++checked[e.bound];
        if (!r.holds) violations.push_back(format("%s %s: lhs %.6g > rhs %.6g", tag.c_str(), e.bound.c_str(), r.lhs, r.rhs));
      }
    }
  }
  // Audited Ahpatron runs for the removal/split bookkeeping counters of criterion 7.
  for (int s = 0; s < 4; ++s) {
    const Dataset ds = synth_noisy(2000, 4, 0.1, 900 + s);
    LearnerConfig c;
    c.algorithm = s % 2 ? Algorithm::AhpatronNoProj : Algorithm::Ahpatron;
    c.budget = 32;
    c.U = std::sqrt(32.0) / 2.0;
    c.lambda = c.U / (2.0 * std::sqrt(32.0));
    c.epsilon = 0.5 + 0.1 * s;
    const RunTrace a = run(c, KernelSpec::gaussian(1.0), ds.examples, {true});
    g_ledger.record(a, "audited ahpatron");
    g_ledger.replay(a, run(c, KernelSpec::gaussian(1.0), ds.examples, {true}), "audited ahpatron");
    LearnerConfig r;
    r.algorithm = Algorithm::BudgetRandom;
    r.budget = 50;
    r.seed = 11 + s;
    const RunTrace b = run(r, KernelSpec::gaussian(1.0), ds.examples, {true});
    g_ledger.record(b, "audited budget-random");
    g_ledger.replay(b, run(r, KernelSpec::gaussian(1.0), ds.examples, {true}), "audited budget-random");
  }
  const double secs = seconds_since(t0);

  std::string counts;
  bool every_bound_exercised = true;
  for (const std::string& name : bench::suite_bound_names()) {
    counts += format(" %s=%zu", name.c_str(), checked[name]);
    if (skipped[name]) counts += format("(+%zu skipped)", skipped[name]);
    every_bound_exercised = every_bound_exercised && checked[name] > 0;
  }
  for (const std::string& v : violations) std::printf("    violation: %s\n", v.c_str());
  const bool ok = violations.empty() && every_bound_exercised && secs < 120.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("%zu violations; reports checked:%s; %.1f s (limit 120 s)", violations.size(), counts.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// Criterion 6: kernel alignment equals the mean embedding's hinge loss.

Line criterion6() {
  const auto t0 = Clock::now();
  SplitMix64 rng(606);
  double worst_ratio = 0.0;
  double min_alignment = 1e300;
  for (int s = 0; s < 10; ++s) {
    const std::size_t T = 200 + rng.uniform_below(1801);
    const Dataset ds = s % 2 ? synth_noisy(T, 2 + s % 5, 0.2, rng.next()) : synth_separable(T, 2 + s % 5, 0.3, rng.next());
    const KernelSpec g = KernelSpec::gaussian(0.3 + 0.3 * (s % 5));
    const double A = kernel_alignment(ds.examples, g);
    const double L = hinge_loss_of(mean_embedding(ds.examples, g), ds.examples);
    worst_ratio = std::max(worst_ratio, std::abs(A - L) / (1e-9 * double(T)));
    min_alignment = std::min(min_alignment, A);
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_ratio <= 1.0 && secs < 30.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("10 Gaussian streams, max |A_T - L_T(fbar)| = %.3g x (1e-9 T), min A_T = %.4g, %.2f s (limit 30 s)", worst_ratio,
                 min_alignment, secs)};
}

// ---------------------------------------------------------------------------
// Criterion 7: invariants across every run above.

Line criterion7() {
  const InvariantLedger& l = g_ledger;
  for (std::size_t i = 0; i < std::min<std::size_t>(l.issues.size(), 20); ++i) std::printf("    invariant: %s\n", l.issues[i].c_str());
  if (l.runs == 0) return {Verdict::Skip, "no learner runs were executed in this invocation"};
  const bool exercised = l.removal_rounds > 0 && l.audited_splits > 0 && l.drift_samples > 0 && l.determinism_checks > 0;
  const bool ok = l.issues.empty() && exercised;
  return {ok ? Verdict::Pass : Verdict::Fail,
          format("%zu audited runs, %zu removal rounds, %zu split audits, %zu drift samples, %zu replays, %zu issues", l.runs,
                 l.removal_rounds, l.audited_splits, l.drift_samples, l.determinism_checks, l.issues.size())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected{1, 2, 3, 4, 5, 6, 7};
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
      selected.clear();
      for (const char* p = argv[++i]; *p;) {
        selected.insert(std::atoi(p));
        while (*p && *p != ',') ++p;
        if (*p == ',') ++p;
      }
    } else {
      std::fprintf(stderr, "usage: acceptance [--criteria 1,2,...]\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Line()>>> criteria{
      {"phishing mean AMR (Ahpatron, B=400)", criterion1},
      {"phishing low-confidence count", criterion2},
      {"phishing baseline ordering", criterion3},
      {"projection solve vs independent minimizer", criterion4},
      {"mistake-bound suite on synthetic streams", criterion5},
      {"kernel alignment identity", criterion6},
      {"structural invariants and determinism", criterion7},
  };

  std::size_t failed = 0;
  std::size_t passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.count(id)) continue;
    Line line;
    try {
      line = criteria[i].second();
    } catch (const std::exception& e) {
      line = {Verdict::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = line.verdict == Verdict::Pass ? "PASS" : line.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::printf("[%s] %d %s: %s\n", tag, id, criteria[i].first.c_str(), line.detail.c_str());
    std::fflush(stdout);
    failed += line.verdict == Verdict::Fail;
    passed += line.verdict == Verdict::Pass;
  }
  if (failed) return 1;
  return passed == 0 ? 77 : 0;
}
