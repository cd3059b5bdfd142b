#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "budgetkl/hypothesis.hpp"
#include "budgetkl/rng.hpp"

namespace budgetkl {

enum class Algorithm {
  Perceptron,
  AVP,             // aggressive perceptron, constant rate
  AVPAdaptive,     // aggressive perceptron, rate U / sqrt(U^2 + #{margin <= 0})
  Ahpatron,        // budgeted AVP: halve by |alpha|, project removed half, rescale
  AhpatronNoProj,  // same halving without the projection of the removed half
  BudgetOldest,    // perceptron that evicts the oldest term when full
  BudgetRandom,    // perceptron that evicts a uniformly random term when full
};

std::string_view to_string(Algorithm a);
/// Accepts the names printed by to_string (e.g. "ahpatron-noproj"); throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

bool is_budgeted(Algorithm a);
bool is_halving(Algorithm a);
/// Perceptron-style trigger y f(x) <= 0 rather than y f(x) < 1 - epsilon.
bool uses_perceptron_trigger(Algorithm a);

struct FixedScale {
  double c = 0.6;
  bool operator==(const FixedScale&) const = default;
};
struct NormRatioScale {
  bool operator==(const NormRatioScale&) const = default;
};
/// Radius factor c_t of the post-removal sphere c_t U.
using CtMode = std::variant<FixedScale, NormRatioScale>;

std::string to_string(const CtMode& mode);
/// "norm-ratio" or "fixed:<c>".
CtMode parse_ct_mode(std::string_view text);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::Perceptron;
  std::optional<std::size_t> budget;
  double U = std::numeric_limits<double>::infinity();
  double lambda = 1.0;
  double epsilon = 0.0;
  double eta = 0.0005;
  CtMode ct_mode = NormRatioScale{};
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const LearnerConfig&) const = default;
};

/// Step size lambda_t = U / sqrt(U^2 + count), where count includes the current round.
double adaptive_rate(std::size_t margin_mistakes_inclusive, double U);

struct Prediction {
  int label = -1;  // sign(0) == -1
  double score = 0.0;
};

struct RoundOutcome {
  std::size_t round = 0;
  int label = 1;
  int prediction = -1;
  double score = 0.0;
  double margin = 0.0;  // label * score
  bool mistake = false;
  bool triggered = false;
  bool removal = false;
  bool degenerate = false;  // sphere projection fell back to the zero function
  std::optional<double> removal_distance;
  double rate = 0.0;  // step size applied on a triggered round
  std::size_t active_size = 0;
  double norm = 0.0;
  // audit-only fields
  std::optional<double> norm_drift;
  std::optional<double> split_min_kept;
  std::optional<double> split_max_removed;

  bool operator==(const RoundOutcome&) const = default;
};

/// Removal half S1 and survivor half S2 as positions into the term list.
struct ActiveSetSplit {
  std::vector<std::size_t> removed;
  std::vector<std::size_t> kept;
};

/// Sorts by (|alpha|, insertion id) ascending and sends the first half to the
/// removal set; ties therefore evict older terms first. Both halves are returned
/// in increasing position order. Throws std::invalid_argument on odd sizes.
ActiveSetSplit split_active_set(std::span<const Expansion::Term> terms);

class OnlineLearner {
 public:
  /// Validates the config; throws ConfigError.
  OnlineLearner(LearnerConfig config, KernelSpec kernel);

  Prediction predict(const SparseVector& x) const;
  RoundOutcome step(const LabeledExample& ex);

  /// Recompute ||f|| from scratch after every triggered round and record the cache drift.
  void set_audit(bool on) noexcept { audit_ = on; }

  const LearnerConfig& config() const noexcept { return config_; }
  const Expansion& hypothesis() const noexcept { return f_; }
  std::size_t rounds() const noexcept { return round_; }

 private:
  bool triggers(double margin) const;
  void step_unbudgeted(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out);
  void step_halving(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out);
  void step_evicting(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out);

  LearnerConfig config_;
  Expansion f_;
  SplitMix64 rng_;
  std::size_t round_ = 0;
  std::size_t margin_mistakes_ = 0;
  bool audit_ = false;
};

struct RunTrace {
  LearnerConfig config;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  std::vector<RoundOutcome> outcomes;
  /// Updates fire below this margin (0 for perceptron-style triggers, 1 - epsilon otherwise).
  double trigger_threshold = 0.0;
  /// max_t kappa(x_t, x_t) over the stream.
  double max_self_kernel = 0.0;
  std::size_t final_size = 0;
  double final_norm = 0.0;
  double elapsed_ms = 0.0;

  std::size_t length() const noexcept { return outcomes.size(); }
  /// Everything except elapsed_ms.
  bool same_run(const RunTrace& other) const;
};

struct RunOptions {
  bool audit = false;
};

/// Predict-then-update over the stream. Learner errors surface as RunFailure with the round index.
RunTrace run(const LearnerConfig& config, const KernelSpec& kernel, std::span<const LabeledExample> stream,
             RunOptions options = {});

}  // namespace budgetkl
