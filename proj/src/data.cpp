#include "budgetkl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string_view>

#include "budgetkl/errors.hpp"
#include "budgetkl/rng.hpp"

namespace budgetkl {

namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, SparseVector::Index& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view next_token(std::string_view& rest) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  std::size_t i = 0;
  while (i < rest.size() && is_space(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && !is_space(rest[j])) ++j;
  std::string_view tok = rest.substr(i, j - i);
  rest.remove_prefix(j);
  return tok;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::string name) {
  std::vector<double> raw_labels;
  std::vector<SparseVector> xs;
  std::set<double> distinct;
  std::size_t max_dim = 0;

  std::string line;
  std::size_t line_no = 0;
  std::vector<SparseVector::Entry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    const std::string_view label_tok = next_token(rest);
    if (label_tok.empty()) continue;

    double label = 0.0;
    if (!parse_double(label_tok, label)) throw MalformedLine(line_no, "bad label '" + std::string(label_tok) + "'");

    entries.clear();
    for (std::string_view tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw MalformedLine(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      SparseVector::Index idx = 0;
      double val = 0.0;
      if (!parse_index(tok.substr(0, colon), idx)) throw MalformedLine(line_no, "bad index in '" + std::string(tok) + "'");
      if (!parse_double(tok.substr(colon + 1), val)) throw MalformedLine(line_no, "bad value in '" + std::string(tok) + "'");
      if (!entries.empty() && idx <= entries.back().index) {
        throw MalformedLine(line_no, "indices must be strictly increasing");
      }
      entries.push_back({idx, val});
    }
    SparseVector x(entries);
    max_dim = std::max<std::size_t>(max_dim, entries.empty() ? 0 : entries.back().index + std::size_t{1});
    xs.push_back(std::move(x));
    raw_labels.push_back(label);
    distinct.insert(label);
  }

  if (xs.empty()) throw Error("dataset '" + name + "' has no examples");
  if (distinct.size() > 2) throw NonBinaryLabels("dataset '" + name + "' has " + std::to_string(distinct.size()) + " distinct labels");

  const bool already_signed = std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 1.0 || v == -1.0; });
  const double low = *distinct.begin();
  const auto map_label = [&](double raw) -> int {
    if (already_signed) return raw > 0 ? 1 : -1;
    if (distinct.size() == 2) return raw == low ? -1 : 1;
    return raw > 0 ? 1 : -1;  // single non-signed value
  };

  Dataset ds;
  ds.name = std::move(name);
  ds.feature_count = max_dim;
  ds.examples.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ds.examples.emplace_back(std::move(xs[i]), map_label(raw_labels[i]));
  return ds;
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  return parse_libsvm(in, name);
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  std::string line;
  for (const LabeledExample& ex : ds.examples) {
    line.assign(ex.y > 0 ? "+1" : "-1");
    for (const auto& e : ex.x.entries()) {
      line.push_back(' ');
      line.append(std::to_string(e.index));
      line.push_back(':');
      append_double(line, e.value);
    }
    line.push_back('\n');
    out << line;
  }
}

Dataset permute(const Dataset& ds, std::uint64_t seed) {
  Dataset out = ds;
  SplitMix64 rng(seed);
  auto& v = out.examples;
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(v[i - 1], v[j]);
  }
  return out;
}

Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  if (n > ds.size()) {
    throw std::invalid_argument("cannot sample " + std::to_string(n) + " of " + std::to_string(ds.size()) + " examples");
  }
  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  Dataset out;
  out.name = ds.name;
  out.feature_count = ds.feature_count;
  out.metadata = ds.metadata;
  out.examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.examples.push_back(ds.examples[idx[i]]);
  return out;
}

Dataset synth_separable(std::size_t T, std::size_t d, double margin, std::uint64_t seed) {
  if (!(margin > 0.0 && margin <= 1.0)) throw std::invalid_argument("margin must lie in (0, 1]");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double center = (1.0 + margin) / 2.0;
  const double noise = (1.0 - margin) / 2.0 * inv_sqrt_d;

  SplitMix64 rng(seed);
  Dataset ds;
  ds.name = "synth-separable";
  ds.feature_count = d + 1;
  ds.metadata["margin"] = margin;
  ds.metadata["comparator_sq_norm"] = 1.0 / (margin * margin);
  ds.examples.reserve(T);

  std::vector<double> x(d);
  for (std::size_t t = 0; t < T; ++t) {
    const int y = rng.uniform01() < 0.5 ? -1 : 1;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw Error("synth_separable: rejection sampling did not terminate");
      double along = 0.0;
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = y * center * inv_sqrt_d + noise * rng.normal();
        along += x[i];
        sq += x[i] * x[i];
      }
      along *= inv_sqrt_d;
      // Relative slack keeps the margin = 1 case (every point exactly +-e) reachable.
      if (y * along >= margin * (1.0 - 1e-12) && sq <= 1.0 + 1e-12) break;
    }
    ds.examples.emplace_back(SparseVector::from_dense(x), y);
  }
  return ds;
}

Dataset synth_noisy(std::size_t T, std::size_t d, double flip_prob, std::uint64_t seed, double margin) {
  if (!(flip_prob >= 0.0 && flip_prob < 0.5)) throw std::invalid_argument("flip_prob must lie in [0, 0.5)");
  Dataset ds = synth_separable(T, d, margin, seed);
  ds.name = "synth-noisy";
  ds.metadata["flip_prob"] = flip_prob;
  SplitMix64 flips(seed ^ 0xA5A5A5A5DEADBEEFULL);
  for (LabeledExample& ex : ds.examples) {
    if (flips.uniform01() < flip_prob) ex.y = -ex.y;
  }
  return ds;
}

}  // namespace budgetkl
