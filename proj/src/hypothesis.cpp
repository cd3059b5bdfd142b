#include "budgetkl/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "budgetkl/errors.hpp"

namespace budgetkl {

void GramBuffer::reserve(std::size_t cap) {
  if (cap <= cap_) return;
  std::vector<double> grown(cap * cap, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cap_), n_,
                grown.begin() + static_cast<std::ptrdiff_t>(i * cap));
  }
  data_ = std::move(grown);
  cap_ = cap;
}

void GramBuffer::append(std::span<const double> row, double diagonal) {
  if (row.size() != n_) throw std::invalid_argument("Gram row length does not match the buffer size");
  if (n_ == cap_) reserve(std::max<std::size_t>(8, 2 * cap_));
  for (std::size_t j = 0; j < n_; ++j) {
    data_[n_ * cap_ + j] = row[j];
    data_[j * cap_ + n_] = row[j];
  }
  data_[n_ * cap_ + n_] = diagonal;
  ++n_;
}

void GramBuffer::keep(std::span<const std::size_t> kept) {
  // Source positions are never behind destinations, so a forward sweep is safe in place.
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = 0; j < kept.size(); ++j) {
      data_[i * cap_ + j] = data_[kept[i] * cap_ + kept[j]];
    }
  }
  n_ = kept.size();
}

std::vector<double> Expansion::coefficients() const {
  std::vector<double> a;
  a.reserve(terms_.size());
  for (const Term& t : terms_) a.push_back(t.alpha);
  return a;
}

double Expansion::norm() const { return std::sqrt(sq_norm_); }

double Expansion::evaluate(const SparseVector& x) const {
  double s = 0.0;
  for (const Term& t : terms_) s += t.alpha * spec_(t.example.x, x);
  return s;
}

std::vector<double> Expansion::kernel_row(const SparseVector& x) const {
  std::vector<double> row;
  row.reserve(terms_.size() + 1);
  for (const Term& t : terms_) row.push_back(spec_(t.example.x, x));
  return row;
}

double Expansion::evaluate_row(std::span<const double> row) const {
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) s += terms_[i].alpha * row[i];
  return s;
}

void Expansion::insert(const LabeledExample& ex, double coeff) { insert(ex, coeff, kernel_row(ex.x)); }

void Expansion::insert(const LabeledExample& ex, double coeff, std::span<const double> row) {
  if (coeff == 0.0 || !std::isfinite(coeff)) throw std::invalid_argument("inserted coefficient must be finite and nonzero");
  const double self = spec_.self(ex.x);
  // ||f + c k(x,.)||^2 = ||f||^2 + 2 c f(x) + c^2 k(x,x)
  sq_norm_ = std::max(0.0, sq_norm_ + 2.0 * coeff * evaluate_row(row) + coeff * coeff * self);
  gram_.append(row, self);
  terms_.push_back({ex, coeff, next_id_++});
}

void Expansion::scale(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale factor must be finite");
  if (c == 0.0) {
    clear();
    return;
  }
  if (c == 1.0) return;
  for (Term& t : terms_) t.alpha *= c;
  sq_norm_ *= c * c;
  drop_zero_terms();
}

void Expansion::project_ball(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (std::isinf(radius)) return;
  const double n = norm();
  if (n <= radius) return;
  scale(radius / n);
  if (!terms_.empty()) sq_norm_ = radius * radius;
}

void Expansion::project_sphere(double radius) {
  if (!(radius >= 0.0) || std::isinf(radius)) throw std::invalid_argument("sphere radius must be finite and >= 0");
  const double n = norm();
  if (n == 0.0) {
    if (radius > 0.0) throw DegenerateProjection();
    return;
  }
  if (n == radius) return;
  scale(radius / n);
  if (!terms_.empty()) sq_norm_ = radius * radius;
}

double Expansion::quad_form() const {
  double q = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) row += gram_(i, j) * terms_[j].alpha;
    q += terms_[i].alpha * row;
  }
  return q;
}

double Expansion::recompute_norm() const {
  const double q = quad_form();
  if (q < -1e-12) throw GramCorruption(q);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

void Expansion::resync_norm() {
  const double n = recompute_norm();
  sq_norm_ = n * n;
}

void Expansion::keep(std::span<const std::size_t> kept) {
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= terms_.size() || (i > 0 && kept[i] <= kept[i - 1])) {
      throw std::invalid_argument("kept term positions must be strictly increasing and in range");
    }
  }
  std::vector<Term> next;
  next.reserve(kept.size());
  for (std::size_t k : kept) next.push_back(std::move(terms_[k]));
  terms_ = std::move(next);
  gram_.keep(kept);
  resync_norm();
}

void Expansion::erase(std::size_t position) {
  std::vector<std::size_t> kept;
  kept.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i != position) kept.push_back(i);
  }
  keep(kept);
}

void Expansion::assign_coefficients(std::span<const double> alphas) {
  if (alphas.size() != terms_.size()) throw std::invalid_argument("coefficient count does not match the expansion");
  for (std::size_t i = 0; i < terms_.size(); ++i) terms_[i].alpha = alphas[i];
  drop_zero_terms();
  resync_norm();
}

void Expansion::clear() noexcept {
  terms_.clear();
  gram_.clear();
  sq_norm_ = 0.0;
}

void Expansion::drop_zero_terms() {
  if (std::none_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.alpha == 0.0; })) return;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].alpha != 0.0) kept.push_back(i);
  }
  keep(kept);
}

}  // namespace budgetkl
