#pragma once
// Independent reference computations for the tests. Nothing here calls into the
// library's numerics: kernels are recomputed from dense maps, linear systems are
// solved by plain elimination or coordinate descent, spectra by Jacobi rotations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "budgetkl/kernel.hpp"
#include "budgetkl/rng.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

inline std::map<std::uint32_t, double> as_map(const budgetkl::SparseVector& v) {
  std::map<std::uint32_t, double> m;
  for (const auto& e : v.entries()) m[e.index] += e.value;
  return m;
}

inline double sq_dist(const budgetkl::SparseVector& a, const budgetkl::SparseVector& b) {
  auto m = as_map(a);
  for (const auto& e : b.entries()) m[e.index] -= e.value;
  double s = 0.0;
  for (const auto& [k, v] : m) s += v * v;
  return s;
}

inline double dot(const budgetkl::SparseVector& a, const budgetkl::SparseVector& b) {
  const auto ma = as_map(a);
  double s = 0.0;
  for (const auto& e : b.entries()) {
    auto it = ma.find(e.index);
    if (it != ma.end()) s += it->second * e.value;
  }
  return s;
}

inline double gaussian(const budgetkl::SparseVector& a, const budgetkl::SparseVector& b, double sigma) {
  return std::exp(-sq_dist(a, b) / (2.0 * sigma * sigma));
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline Vector jacobi_eigenvalues(Matrix a, int max_sweeps = 100) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-22) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Gaussian elimination with partial pivoting.
inline Vector solve_dense(Matrix a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// theta' (K2 + eta I) theta - 2 theta' r
inline double projection_objective(const Matrix& k2, double eta, const Vector& r, const Vector& theta) {
  double v = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double row = eta * theta[i];
    for (std::size_t j = 0; j < theta.size(); ++j) row += k2[i][j] * theta[j];
    v += theta[i] * row - 2.0 * theta[i] * r[i];
  }
  return v;
}

/// Exact coordinate minimization sweeps (Gauss-Seidel) of the objective above.
inline Vector coordinate_descent(const Matrix& k2, double eta, const Vector& r, int max_sweeps = 200000, double tol = 1e-15) {
  const std::size_t m = r.size();
  Vector theta(m, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = r[i];
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) s -= k2[i][j] * theta[j];
      const double next = s / (k2[i][i] + eta);
      change = std::max(change, std::abs(next - theta[i]));
      scale = std::max(scale, std::abs(next));
      theta[i] = next;
    }
    if (change <= tol * std::max(1.0, scale)) break;
  }
  return theta;
}

/// alpha' K alpha with K recomputed from the kernel.
template <class Term, class Kernel>
double quad_form(const std::vector<Term>& terms, Kernel&& k) {
  double s = 0.0;
  for (const auto& a : terms)
    for (const auto& b : terms) s += a.alpha * b.alpha * k(a.x, b.x);
  return s;
}

/// Straight-line reference learner for small streams (Gaussian kernel only).
/// Mirrors the algorithms' textual definitions with dense, from-scratch arithmetic.
struct RefTerm {
  budgetkl::SparseVector x;
  double alpha;
  std::uint64_t id;
};

struct RefRound {
  double score;
  bool triggered;
  bool removal;
};

enum class RefAlgo { Perceptron, AVP, Ahpatron, AhpatronNoProj, BudgetOldest };

struct RefConfig {
  RefAlgo algo = RefAlgo::Perceptron;
  std::size_t B = 0;
  double U = std::numeric_limits<double>::infinity();
  double lambda = 1.0;
  double epsilon = 0.0;
  double eta = 0.0005;
  double fixed_c = -1.0;  // < 0: norm-ratio
  double sigma = 1.0;
};

class RefLearner {
 public:
  explicit RefLearner(RefConfig c) : c_(c) {}

  double score(const budgetkl::SparseVector& x) const {
    double s = 0.0;
    for (const RefTerm& t : terms_) s += t.alpha * k(t.x, x);
    return s;
  }

  double norm() const { return std::sqrt(std::max(0.0, quad_form(terms_, [&](auto& a, auto& b) { return k(a, b); }))); }

  RefRound step(const budgetkl::SparseVector& x, int y) {
    RefRound out{score(x), false, false};
    const double margin = y * out.score;
    const bool perceptron_like = c_.algo == RefAlgo::Perceptron || c_.algo == RefAlgo::BudgetOldest;
    out.triggered = perceptron_like ? margin <= 0.0 : margin < 1.0 - c_.epsilon;
    if (!out.triggered) return out;

    if (c_.algo == RefAlgo::BudgetOldest && terms_.size() == c_.B) {
      terms_.erase(terms_.begin());
      out.removal = true;
    }
    if ((c_.algo == RefAlgo::Ahpatron || c_.algo == RefAlgo::AhpatronNoProj) && terms_.size() == c_.B) {
      halve();
      out.removal = true;
    }
    const double coeff = perceptron_like ? y : c_.lambda * y;
    terms_.push_back({x, coeff, next_id_++});
    if (!perceptron_like) project_ball();
    return out;
  }

  const std::vector<RefTerm>& terms() const { return terms_; }

 private:
  double k(const budgetkl::SparseVector& a, const budgetkl::SparseVector& b) const { return gaussian(a, b, c_.sigma); }

  void project_ball() {
    if (std::isinf(c_.U)) return;
    const double n = norm();
    if (n > c_.U) {
      for (RefTerm& t : terms_) t.alpha *= c_.U / n;
    }
  }

  void halve() {
    const double norm_before = norm();
    std::vector<RefTerm> sorted = terms_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const RefTerm& a, const RefTerm& b) {
      if (std::abs(a.alpha) != std::abs(b.alpha)) return std::abs(a.alpha) < std::abs(b.alpha);
      return a.id < b.id;
    });
    const std::size_t half = sorted.size() / 2;
    std::vector<RefTerm> removed(sorted.begin(), sorted.begin() + half);
    std::vector<RefTerm> kept(sorted.begin() + half, sorted.end());
    std::sort(kept.begin(), kept.end(), [](const RefTerm& a, const RefTerm& b) { return a.id < b.id; });

    if (c_.algo == RefAlgo::Ahpatron) {
      const std::size_t m = kept.size();
      Matrix a(m, Vector(m));
      Vector r(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[i][j] = k(kept[i].x, kept[j].x) + (i == j ? c_.eta : 0.0);
        for (const RefTerm& rm : removed) r[i] += k(kept[i].x, rm.x) * rm.alpha;
      }
      const Vector theta = solve_dense(a, r);
      for (std::size_t i = 0; i < m; ++i) kept[i].alpha += theta[i];
    }
    const double c = c_.fixed_c > 0 ? c_.fixed_c : norm_before / c_.U;
    const double radius = c * c_.U;
    const double n = std::sqrt(std::max(0.0, quad_form(kept, [&](auto& a, auto& b) { return k(a, b); })));
    if (n == 0.0) {
      kept.clear();
    } else {
      for (RefTerm& t : kept) t.alpha *= radius / n;
    }
    kept.erase(std::remove_if(kept.begin(), kept.end(), [](const RefTerm& t) { return t.alpha == 0.0; }), kept.end());
    terms_ = kept;
  }

  RefConfig c_;
  std::vector<RefTerm> terms_;
  std::uint64_t next_id_ = 0;
};

/// Random dense instance inside the unit ball (entries of a d-vector).
inline budgetkl::SparseVector random_point(budgetkl::SplitMix64& rng, std::size_t d, double scale = 1.0) {
  std::vector<double> v(d);
  for (double& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return budgetkl::SparseVector::from_dense(v);
}

}  // namespace oracle
