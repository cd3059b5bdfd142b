#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace budgetkl {

/// Sparse instance: strictly increasing indices, finite nonzero values.
/// Explicit zeros are dropped at construction, so the empty vector is the
/// canonical zero.
class SparseVector {
 public:
  using Index = std::uint32_t;
  struct Entry {
    Index index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseVector() = default;
  /// Throws std::invalid_argument on unsorted/duplicate indices or non-finite values.
  explicit SparseVector(std::vector<Entry> entries);
  SparseVector(std::initializer_list<Entry> entries);

  /// Dense helper; index i of `dense` maps to feature `first_index + i`.
  static SparseVector from_dense(std::span<const double> dense, Index first_index = 1);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// Largest index + 1, or 0 for the empty vector.
  Index dimension() const noexcept { return entries_.empty() ? 0 : entries_.back().index + 1; }
  double squared_norm() const noexcept { return sq_norm_; }

  bool operator==(const SparseVector& other) const { return entries_ == other.entries_; }

 private:
  void validate_and_cache();

  std::vector<Entry> entries_;
  double sq_norm_ = 0.0;
};

double sparse_dot(const SparseVector& u, const SparseVector& v);
/// Sum of (u_i - v_i)^2 over the union of supports, merged directly so u == v gives exactly 0.
double sparse_sq_dist(const SparseVector& u, const SparseVector& v);

struct LabeledExample {
  SparseVector x;
  int y = 1;

  LabeledExample() = default;
  /// Throws std::invalid_argument unless y is -1 or +1.
  LabeledExample(SparseVector x_, int y_);
  bool operator==(const LabeledExample&) const = default;
};

struct GaussianKernel {
  double sigma = 1.0;
  bool operator==(const GaussianKernel&) const = default;
};
struct LinearKernel {
  bool operator==(const LinearKernel&) const = default;
};
struct PolynomialKernel {
  int degree = 2;
  double offset = 1.0;
  bool operator==(const PolynomialKernel&) const = default;
};

class KernelSpec {
 public:
  using Family = std::variant<GaussianKernel, LinearKernel, PolynomialKernel>;

  /// Throws ConfigError when sigma <= 0, degree < 1 or offset < 0.
  explicit KernelSpec(Family family);
  static KernelSpec gaussian(double sigma) { return KernelSpec(GaussianKernel{sigma}); }
  static KernelSpec linear() { return KernelSpec(LinearKernel{}); }
  static KernelSpec polynomial(int degree, double offset) { return KernelSpec(PolynomialKernel{degree, offset}); }

  const Family& family() const noexcept { return family_; }
  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianKernel>(family_); }
  std::string describe() const;

  double operator()(const SparseVector& u, const SparseVector& v) const;
  /// kappa(x, x); 1 for the Gaussian family.
  double self(const SparseVector& x) const;

  bool operator==(const KernelSpec&) const = default;

 private:
  Family family_;
  double inv_two_sigma_sq_ = 0.0;
};

double kernel_eval(const KernelSpec& spec, const SparseVector& u, const SparseVector& v);

/// Dense symmetric kernel matrix, row-major n*n.
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// M[i][j] = kappa(xs[i], xs[j]); each off-diagonal value is computed once and mirrored.
GramMatrix gram_matrix(const KernelSpec& spec, std::span<const SparseVector> xs);

}  // namespace budgetkl
