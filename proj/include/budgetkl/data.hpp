#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "budgetkl/kernel.hpp"

namespace budgetkl {

struct Dataset {
  std::string name;
  std::vector<LabeledExample> examples;
  std::size_t feature_count = 0;  // max index + 1
  /// Free-form provenance, e.g. the synthetic comparator ("comparator_scale", "margin").
  std::map<std::string, double> metadata;

  std::size_t size() const noexcept { return examples.size(); }
};

/// Reads `<label> <idx>:<val> ...` lines. '#' starts a comment, blank lines are
/// skipped, per-line indices must be strictly increasing. Labels are mapped to
/// {-1,+1}: when all raw labels are already in {-1,+1} they are kept, otherwise
/// with two distinct raw values the smaller maps to -1 and the larger to +1.
/// Throws MalformedLine, NonBinaryLabels, or Error for an empty input.
Dataset parse_libsvm(std::istream& in, std::string name = "stream");
Dataset load_libsvm(const std::string& path);

/// Writes labels as +1/-1 and values in shortest round-trip form.
void write_libsvm(const Dataset& ds, std::ostream& out);

/// Fisher-Yates driven by SplitMix64(seed): for i = n-1 down to 1, swap i with
/// uniform_below(i + 1).
Dataset permute(const Dataset& ds, std::uint64_t seed);

/// Uniform sample of n examples without replacement (partial forward Fisher-Yates).
/// Throws std::invalid_argument when n > |ds|.
Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed);

/// Two clusters around +-mu e (e = (1,...,1)/sqrt(d)) inside the unit ball.
/// Every emitted example satisfies ||x|| <= 1 and y <e, x> >= margin, so the
/// linear comparator w = e / margin has y <w, x> >= 1 and ||w||^2 = 1/margin^2.
/// margin must lie in (0, 1]. metadata carries "margin" and "comparator_sq_norm".
Dataset synth_separable(std::size_t T, std::size_t d, double margin, std::uint64_t seed);

/// synth_separable with each label flipped independently with probability flip_prob.
/// The flips use their own generator so flip_prob = 0 reproduces synth_separable.
Dataset synth_noisy(std::size_t T, std::size_t d, double flip_prob, std::uint64_t seed, double margin = 0.5);

}  // namespace budgetkl
