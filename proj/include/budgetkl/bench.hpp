#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "budgetkl/data.hpp"
#include "budgetkl/diagnostics.hpp"
#include "budgetkl/learners.hpp"

namespace budgetkl::bench {

inline constexpr const char* kCsvHeader =
    "dataset,algo,B,sigma,epsilon,U,lambda,eta,ct_mode,seed,T,mistakes,amr,m_prime,n_t,removals,zeta_max,elapsed_ms";

/// Default epsilon grid for margin-triggered learners.
inline const std::vector<double> kEpsilonGrid = {0.5, 0.6, 0.7, 0.8, 0.9};

/// Resolves `synth:separable:T=..,d=..,margin=..,seed=..`, `synth:noisy:...,flip=..`,
/// a readable file path, or a bare name looked up under $BUDGETKL_DATA_DIR and ./data.
/// Throws ConfigError when nothing matches.
Dataset resolve_dataset(const std::string& spec);

/// "1,4,9", "1..5" (inclusive) or mixtures of both; a bare count "N" means 1..N.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

struct BenchConfig {
  std::vector<std::string> datasets;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> budgets;
  double sigma = 1.0;
  std::vector<double> epsilons;   // empty: kEpsilonGrid for margin-triggered learners
  std::optional<double> U;        // empty: sqrt(B)/2 when budgeted, +inf for AVP
  std::optional<double> lambda;   // empty: U/(2 sqrt(B)) when budgeted, 1 otherwise
  double eta = 0.0005;
  CtMode ct_mode = NormRatioScale{};
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> subsample;
  bool check_bounds = false;
  std::size_t jobs = 1;
};

struct Cell {
  std::size_t dataset = 0;  // index into BenchConfig::datasets
  LearnerConfig config;
};

/// Cartesian expansion in (dataset, algo, B, epsilon, seed) order. Every config is
/// validated before returning; throws ConfigError on the first invalid combination.
std::vector<Cell> expand_grid(const BenchConfig& cfg);

struct ResultRow {
  std::string dataset;
  LearnerConfig config;
  double sigma = 1.0;
  bool ok = false;
  std::string error;
  std::size_t T = 0;
  RunMetrics metrics;
  double elapsed_ms = 0.0;
  std::vector<BoundReport> bounds;
  std::vector<std::string> skipped_bounds;
  std::vector<std::string> invariant_issues;

  bool violated() const;
};

/// One CSV line (no trailing newline). Failed runs leave the metric columns empty.
std::string to_csv(const ResultRow& row, bool with_elapsed = true);

struct Aggregate {
  std::string dataset;
  Algorithm algorithm = Algorithm::Perceptron;
  std::optional<std::size_t> budget;
  double best_epsilon = 0.0;
  std::size_t runs = 0;
  double amr_mean = 0.0;
  double amr_std = 0.0;  // sample standard deviation over seeds
  double n_t_mean = 0.0;
  double elapsed_ms_mean = 0.0;
};

inline constexpr const char* kSummaryHeader = "dataset,algo,B,best_epsilon,runs,amr_mean,amr_std,n_t_mean,elapsed_ms_mean";

/// Per (dataset, algo, B): the epsilon with the lowest mean AMR over seeds (ties go
/// to the smaller epsilon). Failed rows are ignored.
std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows);
std::string to_csv(const Aggregate& agg);

/// Runs the whole grid, `jobs` cells at a time. Rows come back in grid order.
std::vector<ResultRow> run_grid(const BenchConfig& cfg);

void write_rows(const std::vector<ResultRow>& rows, const std::string& format, std::ostream& out);
void write_summary(const std::vector<Aggregate>& aggs, const std::string& format, std::ostream& out);

/// Bound checks run with the settings each bound requires.
struct SuiteOptions {
  std::vector<std::string> bounds;  // empty or {"all"}: every bound
  std::size_t budget = 64;
  std::optional<double> U;
  std::optional<double> epsilon;
  double sigma = 1.0;
  double gamma = 0.1;
  std::uint64_t seed = 1;
};

/// Names accepted by SuiteOptions::bounds.
const std::vector<std::string>& suite_bound_names();

struct SuiteEntry {
  std::string bound;
  LearnerConfig config;
  std::vector<BoundReport> reports;  // one per comparator
  std::string skipped;               // precondition message when not applicable
  std::vector<std::string> invariant_issues;
  bool deterministic = true;

  bool violated() const;
};

/// Builds each bound's mandated config, runs it on the stream with auditing on,
/// replays it once to confirm determinism, and checks the bound against the zero
/// comparator and the scaled mean embedding.
std::vector<SuiteEntry> run_bound_suite(const Dataset& ds, const SuiteOptions& opts);

}  // namespace budgetkl::bench

namespace budgetkl::cli {
/// Exit codes: 0 success, 1 config error, 2 run failure, 3 bound violation.
int main(int argc, char** argv);
}  // namespace budgetkl::cli
