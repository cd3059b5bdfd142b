#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "budgetkl/kernel.hpp"

namespace budgetkl {

/// Growable symmetric matrix with row-major storage and spare capacity, so
/// appending a row/column is O(n) amortized and deleting rows compacts in place.
class GramBuffer {
 public:
  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cap_ + j]; }

  /// Appends one row/column. `row` holds kappa against the existing n entries.
  void append(std::span<const double> row, double diagonal);
  /// Keeps the listed rows/columns (strictly increasing), in that order.
  void keep(std::span<const std::size_t> kept);
  void clear() noexcept { n_ = 0; }

 private:
  void reserve(std::size_t cap);

  std::size_t n_ = 0;
  std::size_t cap_ = 0;
  std::vector<double> data_;
};

/// A hypothesis f = sum_i alpha_i kappa(x_i, .) over an insertion-ordered
/// multiset of examples, with a cached Gram matrix and a cached ||f||^2.
///
/// Terms never carry a zero coefficient; anything that would produce one is
/// evicted on the spot. Duplicate instances are kept as separate terms.
class Expansion {
 public:
  struct Term {
    LabeledExample example;
    double alpha = 0.0;
    std::uint64_t id = 0;  // insertion counter, older terms have smaller ids
  };

  explicit Expansion(KernelSpec spec) : spec_(std::move(spec)) {}

  const KernelSpec& kernel() const noexcept { return spec_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  std::span<const Term> terms() const noexcept { return terms_; }
  const GramBuffer& gram() const noexcept { return gram_; }
  std::vector<double> coefficients() const;

  double sq_norm() const noexcept { return sq_norm_; }
  double norm() const;

  double evaluate(const SparseVector& x) const;
  /// kappa(x_i, x) for every term, in term order.
  std::vector<double> kernel_row(const SparseVector& x) const;
  /// sum_i alpha_i row_i for a row produced by kernel_row.
  double evaluate_row(std::span<const double> row) const;

  /// Appends (ex, coeff). Throws std::invalid_argument when coeff == 0.
  void insert(const LabeledExample& ex, double coeff);
  /// Same, reusing a kernel_row(ex.x) computed against the current terms.
  void insert(const LabeledExample& ex, double coeff, std::span<const double> row);

  /// Multiplies every coefficient by c; c == 0 empties the expansion.
  void scale(double c);
  /// Rescales onto {||f|| <= radius} when outside it.
  void project_ball(double radius);
  /// Rescales to ||f|| == radius. Throws DegenerateProjection for f == 0 with radius > 0.
  void project_sphere(double radius);

  /// sqrt(alpha' K alpha) from scratch; throws GramCorruption when the form is below -1e-12.
  double recompute_norm() const;
  /// Replaces the cached squared norm with the scratch value.
  void resync_norm();

  /// Keeps only the listed term positions (strictly increasing) and resyncs the norm.
  void keep(std::span<const std::size_t> kept);
  /// Removes a single term and resyncs the norm.
  void erase(std::size_t position);
  /// Overwrites all coefficients; zero entries are evicted and the norm is resynced.
  void assign_coefficients(std::span<const double> alphas);
  void clear() noexcept;

 private:
  double quad_form() const;
  void drop_zero_terms();

  KernelSpec spec_;
  std::vector<Term> terms_;
  GramBuffer gram_;
  double sq_norm_ = 0.0;
  std::uint64_t next_id_ = 0;
};

}  // namespace budgetkl
