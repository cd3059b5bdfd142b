#include "budgetkl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "budgetkl/errors.hpp"

namespace budgetkl {

namespace {

void require(bool condition, const std::string& bound, const std::string& what) {
  if (!condition) throw PreconditionViolation(bound + ": " + what);
}

void require_normalized(const RunTrace& trace, const std::string& bound) {
  std::ostringstream os;
  os << "needs kappa(x,x) <= 1 on the stream, observed max " << trace.max_self_kernel;
  require(trace.max_self_kernel <= 1.0 + 1e-12, bound, os.str());
}

void require_matching(const RunTrace& trace, const Comparator& f, const std::string& bound) {
  require(f.T == trace.length(), bound, "comparator was evaluated on a stream of a different length");
}

void require_in_ball(const Comparator& f, double U, const std::string& bound) {
  std::ostringstream os;
  os << "comparator norm " << std::sqrt(f.sq_norm) << " exceeds U = " << U;
  require(std::sqrt(f.sq_norm) <= U * (1.0 + 1e-9), bound, os.str());
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

BoundReport finish(BoundReport r) {
  r.holds = r.lhs <= r.rhs + kBoundTolerance;
  return r;
}

}  // namespace

RunMetrics metrics(const RunTrace& trace) {
  RunMetrics m;
  m.T = trace.length();
  double zeta_sum = 0.0;
  std::size_t distances = 0;
  for (const RoundOutcome& o : trace.outcomes) {
    if (o.mistake) ++m.mistakes;
    if (o.margin <= 0.0) ++m.margin_mistakes;
    if (o.margin > 0.0 && o.margin < trace.trigger_threshold) ++m.low_confidence;
    if (o.removal) ++m.removals;
    if (o.removal_distance && std::isfinite(trace.config.U)) {
      const double z = *o.removal_distance / trace.config.U;
      m.zeta_max = std::max(m.zeta_max, z);
      zeta_sum += z;
      ++distances;
    }
  }
  m.amr = m.T == 0 ? 0.0 : static_cast<double>(m.mistakes) / static_cast<double>(m.T);
  m.zeta_mean = distances == 0 ? 0.0 : zeta_sum / static_cast<double>(distances);
  return m;
}

double hinge_loss(double score, int label) { return std::max(0.0, 1.0 - label * score); }

double hinge_loss_of(const Expansion& f, std::span<const LabeledExample> stream) {
  double total = 0.0;
  for (const LabeledExample& ex : stream) total += hinge_loss(f.evaluate(ex.x), ex.y);
  return total;
}

Expansion mean_embedding(std::span<const LabeledExample> stream, const KernelSpec& spec) {
  if (stream.empty()) throw std::invalid_argument("mean embedding of an empty stream");
  Expansion f(spec);
  const double inv_t = 1.0 / static_cast<double>(stream.size());
  for (const LabeledExample& ex : stream) f.insert(ex, ex.y * inv_t);
  f.resync_norm();
  return f;
}

std::vector<double> mean_embedding_scores(std::span<const LabeledExample> stream, const KernelSpec& spec) {
  const std::size_t T = stream.size();
  std::vector<double> sums(T, 0.0);
  for (std::size_t s = 0; s < T; ++s) {
    sums[s] += stream[s].y * spec.self(stream[s].x);
    for (std::size_t t = s + 1; t < T; ++t) {
      const double k = spec(stream[s].x, stream[t].x);
      sums[s] += stream[t].y * k;
      sums[t] += stream[s].y * k;
    }
  }
  const double inv_t = T == 0 ? 0.0 : 1.0 / static_cast<double>(T);
  for (double& v : sums) v *= inv_t;
  return sums;
}

double kernel_alignment(std::span<const LabeledExample> stream, const KernelSpec& spec) {
  if (stream.empty()) throw std::invalid_argument("kernel alignment of an empty stream");
  double trace_sum = 0.0;
  double yky = 0.0;
  for (std::size_t s = 0; s < stream.size(); ++s) {
    const double self = spec.self(stream[s].x);
    trace_sum += self;
    double off = 0.0;
    for (std::size_t t = s + 1; t < stream.size(); ++t) off += stream[t].y * spec(stream[s].x, stream[t].x);
    yky += self + 2.0 * stream[s].y * off;
  }
  return trace_sum - yky / static_cast<double>(stream.size());
}

Comparator Comparator::zero(std::size_t T) { return {"zero", T, 0.0, static_cast<double>(T)}; }

Comparator Comparator::from_expansion(const Expansion& f, std::span<const LabeledExample> stream, std::string name) {
  const double n = f.recompute_norm();
  return {std::move(name), stream.size(), n * n, hinge_loss_of(f, stream)};
}

Comparator Comparator::from_scores(std::span<const double> scores, double sq_norm, std::span<const LabeledExample> stream,
                                   std::string name) {
  if (scores.size() != stream.size()) throw std::invalid_argument("one comparator score per example is required");
  double hinge = 0.0;
  for (std::size_t t = 0; t < stream.size(); ++t) hinge += hinge_loss(scores[t], stream[t].y);
  return {std::move(name), stream.size(), sq_norm, hinge};
}

Comparator Comparator::mean_embedding(std::span<const LabeledExample> stream, const KernelSpec& spec, double U) {
  std::vector<double> scores = mean_embedding_scores(stream, spec);
  // ||fbar||^2 = (1/T) sum_t y_t fbar(x_t)
  double sq = 0.0;
  for (std::size_t t = 0; t < stream.size(); ++t) sq += stream[t].y * scores[t];
  sq = std::max(0.0, sq / static_cast<double>(stream.size()));
  if (sq == 0.0) return zero(stream.size());
  const double target = std::min(1.0, U);
  const double factor = target / std::sqrt(sq);
  for (double& s : scores) s *= factor;
  return from_scores(scores, target * target, stream, "mean-embedding");
}

BoundReport check_perceptron_bound(const RunTrace& trace, const Comparator& f) {
  const std::string name = "perceptron";
  require(trace.config.algorithm == Algorithm::Perceptron, name, "trace is not from the perceptron");
  require_normalized(trace, name);
  require_matching(trace, f, name);
  const RunMetrics m = metrics(trace);
  BoundReport r;
  r.bound_name = name;
  r.lhs = static_cast<double>(m.mistakes);
  r.rhs = 2.0 * f.hinge + f.sq_norm;
  r.components = {{"L_T", f.hinge}, {"f_sq_norm", f.sq_norm}, {"M_T", r.lhs}};
  return finish(r);
}

BoundReport check_avp_bound(const RunTrace& trace, const Comparator& f, AvpVariant variant) {
  const LearnerConfig& c = trace.config;
  const RunMetrics m = metrics(trace);
  if (variant == AvpVariant::ConstantRate) {
    const std::string name = "avp-constant";
    require(c.algorithm == Algorithm::AVP, name, "trace is not from constant-rate AVP");
    require(std::isinf(c.U), name, "needs U = +inf");
    require(c.lambda == 1.0, name, "needs lambda = 1");
    require(c.epsilon > 0.5 && c.epsilon < 1.0, name, "needs epsilon in (1/2, 1)");
    require_normalized(trace, name);
    require_matching(trace, f, name);
    BoundReport r;
  r.bound_name = name;
    r.lhs = static_cast<double>(m.mistakes);
    r.rhs = 2.0 * f.hinge + f.sq_norm + (1.0 - 2.0 * c.epsilon) * static_cast<double>(m.low_confidence);
    r.components = {{"L_T", f.hinge},
                    {"f_sq_norm", f.sq_norm},
                    {"N_T", static_cast<double>(m.low_confidence)},
                    {"M_prime_T", static_cast<double>(m.margin_mistakes)}};
    return finish(r);
  }

  const std::string name = "avp-adaptive";
  require(c.algorithm == Algorithm::AVPAdaptive, name, "trace is not from adaptive-rate AVP");
  require(std::isfinite(c.U), name, "needs U < +inf");
  require_normalized(trace, name);
  require_matching(trace, f, name);
  require_in_ball(f, c.U, name);
  double delta = 0.0;
  double max_rate = 0.0;
  for (const RoundOutcome& o : trace.outcomes) {
    if (!o.triggered) continue;
    max_rate = std::max(max_rate, o.rate);
    if (o.margin > 0.0 && o.margin < trace.trigger_threshold) delta += o.rate / 2.0 - c.epsilon;
  }
  require(max_rate / 2.0 < c.epsilon && c.epsilon < 1.0, name, "needs lambda_t / 2 < epsilon < 1 on every round");
  const double U = c.U;
  const double core = std::max(f.hinge + 2.0 * U * U + delta, 0.0);
  BoundReport r;
  r.bound_name = name;
  r.lhs = static_cast<double>(m.mistakes);
  r.rhs = core + 9.0 * U * U + 3.0 * U * std::sqrt(core);
  r.components = {{"L_T", f.hinge},
                  {"f_sq_norm", f.sq_norm},
                  {"Delta_T", delta},
                  {"N_T", static_cast<double>(m.low_confidence)},
                  {"max_rate", max_rate}};
  return finish(r);
}

BoundReport check_ahpatron_bound(const RunTrace& trace, const Comparator& f) {
  const std::string name = "ahpatron-fixed";
  const LearnerConfig& c = trace.config;
  require(c.algorithm == Algorithm::Ahpatron, name, "trace is not from Ahpatron");
  const auto* fixed = std::get_if<FixedScale>(&c.ct_mode);
  require(fixed != nullptr && close_rel(fixed->c, 0.6), name, "needs c_t = 0.6");
  const double B = static_cast<double>(*c.budget);
  const double U = c.U;
  const double sqrt_b = std::sqrt(B);
  require(*c.budget >= 50, name, "needs B >= 50");
  require(close_rel(c.lambda, std::sqrt(2.0) * U / sqrt_b), name, "needs lambda = sqrt(2) U / sqrt(B)");
  require(U <= sqrt_b / 4.0, name, "needs U <= sqrt(B) / 4");
  require(3.0 * U / sqrt_b < c.epsilon && c.epsilon < 1.0, name, "needs 3U/sqrt(B) < epsilon < 1");
  require_normalized(trace, name);
  require_matching(trace, f, name);
  require_in_ball(f, U, name);

  const RunMetrics m = metrics(trace);
  const double n_t = static_cast<double>(m.low_confidence);
  const double a = 3.0 * U / sqrt_b;
  const double b = U / std::sqrt(2.0 * B);
  const double delta_hi = (a - c.epsilon) / (1.0 - a) * n_t;
  const double delta_lo = (b - c.epsilon) / (1.0 - b) * n_t;
  const double branch_removal = 12.0 * U / sqrt_b * f.hinge + delta_hi;
  const double branch_plain = 0.9 * U / sqrt_b * f.hinge + sqrt_b / (2.0 * U) * f.sq_norm + delta_lo;

  BoundReport r;
  r.bound_name = name;
  r.lhs = static_cast<double>(m.mistakes);
  r.rhs = f.hinge + std::max(branch_removal, branch_plain);
  r.components = {{"L_T", f.hinge},
                  {"f_sq_norm", f.sq_norm},
                  {"N_T", n_t},
                  {"M_prime_T", static_cast<double>(m.margin_mistakes)},
                  {"Delta_upper", delta_hi},
                  {"Delta_lower", delta_lo},
                  {"J", static_cast<double>(m.removals)}};
  return finish(r);
}

BoundReport check_refined_bound(const RunTrace& trace, const Comparator& f, double gamma) {
  const std::string name = "ahpatron-norm-ratio";
  const LearnerConfig& c = trace.config;
  require(c.algorithm == Algorithm::Ahpatron, name, "trace is not from Ahpatron");
  require(std::holds_alternative<NormRatioScale>(c.ct_mode), name, "needs c_t = ||f_t|| / U");
  require(gamma > 0.0 && gamma < 1.0, name, "needs gamma in (0, 1)");
  const double B = static_cast<double>(*c.budget);
  const double U = c.U;
  const double sqrt_b = std::sqrt(B);
  require(*c.budget >= 16, name, "needs B >= 16");
  require(close_rel(c.lambda, U / (2.0 * sqrt_b)), name, "needs lambda = U / (2 sqrt(B))");
  require_normalized(trace, name);
  require_matching(trace, f, name);
  require_in_ball(f, U, name);

  const RunMetrics m = metrics(trace);
  // Per-event maximum: a conservative instantiation of the summed removal-distance inequality.
  const double zeta = m.zeta_max;
  const double coef = 0.25 + 4.5 * zeta;
  std::ostringstream os;
  os << "needs U <= (1 - gamma) sqrt(B) / (1/4 + 9 zeta / 2) with measured zeta = " << zeta;
  require(U <= (1.0 - gamma) * sqrt_b / coef, name, os.str());
  require(coef * U / sqrt_b < c.epsilon && c.epsilon < 1.0, name,
          "needs (1/4 + 9 zeta / 2) U / sqrt(B) < epsilon < 1 with measured zeta = " + std::to_string(zeta));

  const double n_t = static_cast<double>(m.low_confidence);
  const double a = coef * U / sqrt_b;
  const double delta = n_t / (1.0 - a) * (a - c.epsilon);
  BoundReport r;
  r.bound_name = name;
  r.lhs = static_cast<double>(m.mistakes);
  r.rhs = f.hinge + a / gamma * f.hinge + (1.0 - 2.0 * zeta) / gamma * f.sq_norm * sqrt_b / U + delta;
  r.components = {{"L_T", f.hinge},       {"f_sq_norm", f.sq_norm}, {"N_T", n_t},
                  {"zeta", zeta},         {"zeta_mean", m.zeta_mean}, {"gamma", gamma},
                  {"Delta_T", delta},     {"J", static_cast<double>(m.removals)}};
  r.note = "zeta instantiated as the per-event maximum of removal_distance / U";
  return finish(r);
}

BoundReport check_removal_count(const RunTrace& trace) {
  const std::string name = "removal-count";
  require(is_halving(trace.config.algorithm), name, "trace is not from a halving learner");
  const RunMetrics m = metrics(trace);
  const double B = static_cast<double>(*trace.config.budget);
  const double updates = static_cast<double>(m.margin_mistakes + m.low_confidence);
  BoundReport r;
  r.bound_name = name;
  r.lhs = static_cast<double>(m.removals);
  r.rhs = std::max(2.0 * updates / B - 1.0, 0.0);
  r.components = {{"M_prime_T", static_cast<double>(m.margin_mistakes)},
                  {"N_T", static_cast<double>(m.low_confidence)},
                  {"B", B}};
  return finish(r);
}

BoundReport check_gap_inequality(const RunTrace& trace) {
  const std::string name = "gap-inequality";
  require(!uses_perceptron_trigger(trace.config.algorithm), name, "needs an aggressive (epsilon-margin) learner");
  double hinge = 0.0;
  double eps_sum = 0.0;
  std::size_t m_prime = 0;
  for (const RoundOutcome& o : trace.outcomes) {
    if (o.margin <= 0.0) ++m_prime;
    if (o.margin > 0.0 && o.margin < trace.trigger_threshold) eps_sum += trace.config.epsilon;
    if (o.triggered) hinge += hinge_loss(o.score, o.label);
  }
  BoundReport r;
  r.bound_name = name;
  r.lhs = eps_sum;
  r.rhs = hinge - static_cast<double>(m_prime);
  r.components = {{"triggered_hinge", hinge}, {"M_prime_T", static_cast<double>(m_prime)}};
  return finish(r);
}

std::vector<std::string> check_invariants(const RunTrace& trace) {
  std::vector<std::string> issues;
  const LearnerConfig& c = trace.config;
  const auto report = [&issues](std::size_t round, const std::string& what) {
    issues.push_back("round " + std::to_string(round) + ": " + what);
  };
  const bool bounded_norm = std::isfinite(c.U) && !uses_perceptron_trigger(c.algorithm);
  for (const RoundOutcome& o : trace.outcomes) {
    if (c.budget && o.active_size > *c.budget) report(o.round, "active set exceeds the budget");
    if (is_halving(c.algorithm) && o.removal && !o.degenerate && o.active_size != *c.budget / 2 + 1) {
      report(o.round, "post-removal size " + std::to_string(o.active_size) + " != B/2 + 1");
    }
    if (bounded_norm && o.norm > c.U * (1.0 + 1e-10)) report(o.round, "norm " + std::to_string(o.norm) + " leaves the U-ball");
    if (o.norm_drift && *o.norm_drift > 1e-8) report(o.round, "norm cache drift " + std::to_string(*o.norm_drift));
    if (o.split_min_kept && o.split_max_removed && *o.split_min_kept < *o.split_max_removed) {
      report(o.round, "split kept a smaller |alpha| than it removed");
    }
    if (o.mistake && o.margin > 0.0) report(o.round, "mistake with positive margin");
    if (o.removal && !o.triggered) report(o.round, "removal without an update");
    const bool should_trigger = uses_perceptron_trigger(c.algorithm) ? o.margin <= 0.0 : o.margin < trace.trigger_threshold;
    if (should_trigger != o.triggered) report(o.round, "trigger flag disagrees with the margin");
    if (o.removal_distance && std::isfinite(c.U) && *o.removal_distance > 2.0 * c.U * (1.0 + 1e-9)) {
      report(o.round, "removal distance exceeds 2U");
    }
  }
  return issues;
}

}  // namespace budgetkl
