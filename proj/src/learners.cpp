#include "budgetkl/learners.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "budgetkl/errors.hpp"
#include "budgetkl/solver.hpp"

namespace budgetkl {

namespace {

struct AlgorithmName {
  Algorithm algorithm;
  std::string_view name;
};

constexpr AlgorithmName kAlgorithmNames[] = {
    {Algorithm::Perceptron, "perceptron"},
    {Algorithm::AVP, "avp"},
    {Algorithm::AVPAdaptive, "avp-adaptive"},
    {Algorithm::Ahpatron, "ahpatron"},
    {Algorithm::AhpatronNoProj, "ahpatron-noproj"},
    {Algorithm::BudgetOldest, "budget-oldest"},
    {Algorithm::BudgetRandom, "budget-random"},
};

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& entry : kAlgorithmNames) {
    if (entry.algorithm == a) return entry.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& entry : kAlgorithmNames) {
    if (entry.name == name) return entry.algorithm;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool is_budgeted(Algorithm a) {
  return a == Algorithm::Ahpatron || a == Algorithm::AhpatronNoProj || a == Algorithm::BudgetOldest ||
         a == Algorithm::BudgetRandom;
}

bool is_halving(Algorithm a) { return a == Algorithm::Ahpatron || a == Algorithm::AhpatronNoProj; }

bool uses_perceptron_trigger(Algorithm a) {
  return a == Algorithm::Perceptron || a == Algorithm::BudgetOldest || a == Algorithm::BudgetRandom;
}

std::string to_string(const CtMode& mode) {
  if (const auto* fixed = std::get_if<FixedScale>(&mode)) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, fixed->c);
    return "fixed:" + std::string(buf, res.ptr);
  }
  return "norm-ratio";
}

CtMode parse_ct_mode(std::string_view text) {
  if (text == "norm-ratio") return NormRatioScale{};
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const std::string_view number = text.substr(prefix.size());
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), c);
    if (ec == std::errc() && ptr == number.data() + number.size()) return FixedScale{c};
  }
  throw ConfigError("--ct must be 'norm-ratio' or 'fixed:<c>', got '" + std::string(text) + "'");
}

void LearnerConfig::validate() const {
  const std::string algo(to_string(algorithm));
  if (is_budgeted(algorithm)) {
    if (!budget) throw ConfigError("B: required by " + algo);
    if (*budget < 2) throw ConfigError("B: must be >= 2 for " + algo);
    if (is_halving(algorithm) && *budget % 2 != 0) {
      throw ConfigError("B: halving needs an even budget, got " + std::to_string(*budget));
    }
  } else if (budget) {
    throw ConfigError("B: " + algo + " is unbudgeted");
  }
  if (!(U > 0.0)) throw ConfigError("U: must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda: must be positive and finite");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon: must lie in [0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta: must be positive");
  if (const auto* fixed = std::get_if<FixedScale>(&ct_mode)) {
    if (!(fixed->c > 0.0 && fixed->c <= 1.0)) throw ConfigError("ct: fixed c must lie in (0, 1]");
  }
  if ((is_halving(algorithm) || algorithm == Algorithm::AVPAdaptive) && std::isinf(U)) {
    throw ConfigError("U: " + algo + " needs a finite radius");
  }
}

double adaptive_rate(std::size_t margin_mistakes_inclusive, double U) {
  if (!(U > 0.0) || std::isinf(U)) throw std::invalid_argument("adaptive rate needs a finite positive U");
  return U / std::sqrt(U * U + static_cast<double>(margin_mistakes_inclusive));
}

ActiveSetSplit split_active_set(std::span<const Expansion::Term> terms) {
  if (terms.size() % 2 != 0) throw std::invalid_argument("split_active_set needs an even number of terms");
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(terms[a].alpha);
    const double mb = std::abs(terms[b].alpha);
    if (ma != mb) return ma < mb;
    return terms[a].id < terms[b].id;
  });
  const std::size_t half = terms.size() / 2;
  ActiveSetSplit split;
  split.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  split.kept.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
  std::sort(split.removed.begin(), split.removed.end());
  std::sort(split.kept.begin(), split.kept.end());
  return split;
}

OnlineLearner::OnlineLearner(LearnerConfig config, KernelSpec kernel)
    : config_(std::move(config)), f_(std::move(kernel)), rng_(config_.seed) {
  config_.validate();
}

Prediction OnlineLearner::predict(const SparseVector& x) const {
  const double score = f_.evaluate(x);
  return {score > 0.0 ? 1 : -1, score};
}

bool OnlineLearner::triggers(double margin) const {
  if (uses_perceptron_trigger(config_.algorithm)) return margin <= 0.0;
  return margin < 1.0 - config_.epsilon;
}

RoundOutcome OnlineLearner::step(const LabeledExample& ex) {
  RoundOutcome out;
  out.round = round_++;
  out.label = ex.y;

  std::vector<double> row = f_.kernel_row(ex.x);
  out.score = f_.evaluate_row(row);
  out.prediction = out.score > 0.0 ? 1 : -1;
  out.margin = ex.y * out.score;
  out.mistake = out.prediction != ex.y;
  if (out.margin <= 0.0) ++margin_mistakes_;

  out.triggered = triggers(out.margin);
  if (out.triggered) {
    if (is_halving(config_.algorithm)) {
      step_halving(ex, row, out);
    } else if (is_budgeted(config_.algorithm)) {
      step_evicting(ex, row, out);
    } else {
      step_unbudgeted(ex, row, out);
    }
    if (audit_) {
      const double scratch = f_.recompute_norm();
      out.norm_drift = std::abs(f_.sq_norm() - scratch * scratch) / std::max(1.0, f_.sq_norm());
    }
  }
  out.active_size = f_.size();
  out.norm = f_.norm();
  return out;
}

void OnlineLearner::step_unbudgeted(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out) {
  switch (config_.algorithm) {
    case Algorithm::Perceptron:
      out.rate = 1.0;
      break;
    case Algorithm::AVPAdaptive:
      out.rate = adaptive_rate(margin_mistakes_, config_.U);
      break;
    default:
      out.rate = config_.lambda;
      break;
  }
  f_.insert(ex, out.rate * ex.y, row);
  if (config_.algorithm != Algorithm::Perceptron) f_.project_ball(config_.U);
}

void OnlineLearner::step_evicting(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out) {
  out.rate = 1.0;
  if (f_.size() == *config_.budget) {
    std::size_t victim = 0;
    if (config_.algorithm == Algorithm::BudgetOldest) {
      const auto terms = f_.terms();
      for (std::size_t i = 1; i < terms.size(); ++i) {
        if (terms[i].id < terms[victim].id) victim = i;
      }
    } else {
      victim = static_cast<std::size_t>(rng_.uniform_below(f_.size()));
    }
    f_.erase(victim);
    row.erase(row.begin() + static_cast<std::ptrdiff_t>(victim));
    out.removal = true;
  }
  f_.insert(ex, ex.y, row);
}

void OnlineLearner::step_halving(const LabeledExample& ex, std::vector<double>& row, RoundOutcome& out) {
  out.rate = config_.lambda;
  const double U = config_.U;
  if (f_.size() < *config_.budget) {
    f_.insert(ex, config_.lambda * ex.y, row);
    f_.project_ball(U);
    return;
  }

  const auto terms = f_.terms();
  const GramBuffer& gram = f_.gram();
  const ActiveSetSplit split = split_active_set(terms);
  const auto m = static_cast<Eigen::Index>(split.kept.size());
  const auto k = static_cast<Eigen::Index>(split.removed.size());

  Eigen::VectorXd beta(m);
  for (Eigen::Index i = 0; i < m; ++i) beta[i] = terms[split.kept[i]].alpha;

  Eigen::MatrixXd K2(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) K2(i, j) = gram(split.kept[i], split.kept[j]);
  }

  if (config_.algorithm == Algorithm::Ahpatron) {
    ProjectionProblem problem;
    problem.K2 = K2;
    problem.K21.resize(m, k);
    problem.alpha.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      problem.alpha[j] = terms[split.removed[j]].alpha;
      for (Eigen::Index i = 0; i < m; ++i) problem.K21(i, j) = gram(split.kept[i], split.removed[j]);
    }
    problem.eta = config_.eta;
    beta += solve_theta_with_retry(std::move(problem)).theta;
  }

  const double g_sq = std::max(0.0, beta.dot(K2 * beta));
  const double radius = std::holds_alternative<FixedScale>(config_.ct_mode)
                            ? std::get<FixedScale>(config_.ct_mode).c * U
                            : f_.norm();

  // New coefficients over the full active set; removed positions become zero.
  std::vector<double> next(terms.size(), 0.0);
  if (g_sq > 0.0 && radius > 0.0) {
    const double factor = radius / std::sqrt(g_sq);
    for (Eigen::Index i = 0; i < m; ++i) next[split.kept[i]] = factor * beta[i];
  } else {
    out.degenerate = radius > 0.0;
  }

  // ||f_t - fbar_t||^2 on the full Gram before anything is discarded.
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double di = terms[i].alpha - next[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) acc += gram(i, j) * (terms[j].alpha - next[j]);
    dist_sq += di * acc;
  }
  out.removal_distance = std::sqrt(std::max(0.0, dist_sq));
  out.removal = true;

  if (audit_) {
    double min_kept = std::numeric_limits<double>::infinity();
    double max_removed = 0.0;
    for (std::size_t i : split.kept) min_kept = std::min(min_kept, std::abs(terms[i].alpha));
    for (std::size_t i : split.removed) max_removed = std::max(max_removed, std::abs(terms[i].alpha));
    out.split_min_kept = min_kept;
    out.split_max_removed = max_removed;
  }

  std::vector<double> survivor_row;
  survivor_row.reserve(split.kept.size() + 1);
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (next[i] != 0.0) survivor_row.push_back(row[i]);
  }
  f_.assign_coefficients(next);
  f_.insert(ex, config_.lambda * ex.y, survivor_row);
  f_.project_ball(U);
}

bool RunTrace::same_run(const RunTrace& other) const {
  return config == other.config && kernel == other.kernel && outcomes == other.outcomes &&
         trigger_threshold == other.trigger_threshold && max_self_kernel == other.max_self_kernel &&
         final_size == other.final_size && final_norm == other.final_norm;
}

RunTrace run(const LearnerConfig& config, const KernelSpec& kernel, std::span<const LabeledExample> stream,
             RunOptions options) {
  if (stream.empty()) throw std::invalid_argument("run needs a nonempty stream");
  OnlineLearner learner(config, kernel);
  learner.set_audit(options.audit);

  RunTrace trace;
  trace.config = config;
  trace.kernel = kernel;
  trace.trigger_threshold = uses_perceptron_trigger(config.algorithm) ? 0.0 : 1.0 - config.epsilon;
  for (const LabeledExample& ex : stream) trace.max_self_kernel = std::max(trace.max_self_kernel, kernel.self(ex.x));
  trace.outcomes.reserve(stream.size());

  const auto start = std::chrono::steady_clock::now();
  for (const LabeledExample& ex : stream) {
    try {
      trace.outcomes.push_back(learner.step(ex));
    } catch (const RunFailure&) {
      throw;
    } catch (const Error& e) {
      throw RunFailure(learner.rounds() - 1, e.what());
    }
  }
  trace.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  trace.final_size = learner.hypothesis().size();
  trace.final_norm = learner.hypothesis().norm();
  return trace;
}

}  // namespace budgetkl
