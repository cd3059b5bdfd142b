#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "budgetkl/hypothesis.hpp"
#include "budgetkl/learners.hpp"

namespace budgetkl {

struct RunMetrics {
  std::size_t T = 0;
  std::size_t mistakes = 0;          // |M_T|: prediction != label
  std::size_t margin_mistakes = 0;   // |M'_T|: margin <= 0
  std::size_t low_confidence = 0;    // |N_T|: 0 < margin < trigger threshold
  std::size_t removals = 0;          // removal events (halvings or evictions)
  double amr = 0.0;                  // |M_T| / T
  double zeta_max = 0.0;             // max removal_distance / U, 0 without removals
  double zeta_mean = 0.0;
};

RunMetrics metrics(const RunTrace& trace);

double hinge_loss(double score, int label);
/// L_T(f) = sum_t max{0, 1 - y_t f(x_t)}.
double hinge_loss_of(const Expansion& f, std::span<const LabeledExample> stream);

/// fbar = (1/T) sum_t y_t kappa(x_t, .) as an explicit expansion (O(T^2) memory).
Expansion mean_embedding(std::span<const LabeledExample> stream, const KernelSpec& spec);
/// fbar(x_t) for every t without materializing the Gram matrix (O(T^2) time, O(T) memory).
std::vector<double> mean_embedding_scores(std::span<const LabeledExample> stream, const KernelSpec& spec);

/// A_T = sum_t kappa(x_t, x_t) - (1/T) Y' K Y.
double kernel_alignment(std::span<const LabeledExample> stream, const KernelSpec& spec);

/// What the bound checkers need from a comparator f: ||f||^2 and L_T(f) on the
/// same stream the trace was produced from.
struct Comparator {
  std::string name;
  std::size_t T = 0;
  double sq_norm = 0.0;
  double hinge = 0.0;

  static Comparator zero(std::size_t T);
  static Comparator from_expansion(const Expansion& f, std::span<const LabeledExample> stream, std::string name = "expansion");
  static Comparator from_scores(std::span<const double> scores, double sq_norm, std::span<const LabeledExample> stream,
                                std::string name);
  /// fbar rescaled to norm min{1, U} (zero comparator when ||fbar|| == 0).
  static Comparator mean_embedding(std::span<const LabeledExample> stream, const KernelSpec& spec, double U);
};

struct BoundReport {
  std::string bound_name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  std::map<std::string, double> components;
  std::string note;
};

inline constexpr double kBoundTolerance = 1e-6;

/// |M_T| <= 2 L_T(f) + ||f||^2 for perceptron traces.
BoundReport check_perceptron_bound(const RunTrace& trace, const Comparator& f);

enum class AvpVariant { ConstantRate, AdaptiveRate };
/// ConstantRate: U = inf, lambda = 1, epsilon in (1/2, 1);
///   |M_T| <= 2 L + ||f||^2 + (1 - 2 eps) |N_T|.
/// AdaptiveRate: U < inf, lambda_t / 2 < epsilon, ||f|| <= U;
///   |M_T| <= max{L + 2U^2 + D, 0} + 9U^2 + 3U sqrt(max{L + 2U^2 + D, 0}), D = sum_{N_T} (lambda_t/2 - eps).
BoundReport check_avp_bound(const RunTrace& trace, const Comparator& f, AvpVariant variant);

/// Fixed c_t = 0.6, lambda = sqrt(2) U / sqrt(B), B >= 50, U <= sqrt(B)/4, 3U/sqrt(B) < eps < 1.
BoundReport check_ahpatron_bound(const RunTrace& trace, const Comparator& f);

/// Norm-ratio c_t, lambda = U / (2 sqrt(B)), B >= 16, zeta measured from the trace
/// as max removal_distance / U (0 without removals); post-hoc U and epsilon conditions.
BoundReport check_refined_bound(const RunTrace& trace, const Comparator& f, double gamma);

/// Removal count J <= max{2(|M'_T| + |N_T|)/B - 1, 0}.
BoundReport check_removal_count(const RunTrace& trace);

/// sum_{N_T} eps <= sum_{triggered} hinge(f_t(x_t), y_t) - |M'_T| for aggressive learners.
BoundReport check_gap_inequality(const RunTrace& trace);

/// Per-round structural invariants; returns human-readable violations (empty when clean).
/// Checks budget safety, the B/2 + 1 post-removal size, the norm ball, cache drift
/// and split ordering when audited, trigger bookkeeping and removal distances <= 2U.
std::vector<std::string> check_invariants(const RunTrace& trace);

}  // namespace budgetkl
