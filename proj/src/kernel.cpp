#include "budgetkl/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "budgetkl/errors.hpp"

namespace budgetkl {

SparseVector::SparseVector(std::vector<Entry> entries) : entries_(std::move(entries)) { validate_and_cache(); }

SparseVector::SparseVector(std::initializer_list<Entry> entries) : entries_(entries) { validate_and_cache(); }

SparseVector SparseVector::from_dense(std::span<const double> dense, Index first_index) {
  std::vector<Entry> entries;
  entries.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    entries.push_back({static_cast<Index>(first_index + i), dense[i]});
  }
  return SparseVector(std::move(entries));
}

void SparseVector::validate_and_cache() {
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry e = entries_[i];
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("sparse vector value at index " + std::to_string(e.index) + " is not finite");
    }
    if (i > 0 && e.index <= entries_[i - 1].index) {
      throw std::invalid_argument("sparse vector indices must be strictly increasing");
    }
    if (e.value != 0.0) entries_[out++] = e;
  }
  entries_.resize(out);
  double s = 0.0;
  for (const Entry& e : entries_) s += e.value * e.value;
  sq_norm_ = s;
}

double sparse_dot(const SparseVector& u, const SparseVector& v) {
  auto a = u.entries();
  auto b = v.entries();
  std::size_t i = 0, j = 0;
  double s = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      s += a[i++].value * b[j++].value;
    } else if (a[i].index < b[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double sparse_sq_dist(const SparseVector& u, const SparseVector& v) {
  auto a = u.entries();
  auto b = v.entries();
  std::size_t i = 0, j = 0;
  double s = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      const double d = a[i++].value - b[j++].value;
      s += d * d;
    } else if (a[i].index < b[j].index) {
      s += a[i].value * a[i].value;
      ++i;
    } else {
      s += b[j].value * b[j].value;
      ++j;
    }
  }
  for (; i < a.size(); ++i) s += a[i].value * a[i].value;
  for (; j < b.size(); ++j) s += b[j].value * b[j].value;
  return s;
}

LabeledExample::LabeledExample(SparseVector x_, int y_) : x(std::move(x_)), y(y_) {
  if (y != 1 && y != -1) throw std::invalid_argument("label must be -1 or +1, got " + std::to_string(y));
}

KernelSpec::KernelSpec(Family family) : family_(family) {
  if (const auto* g = std::get_if<GaussianKernel>(&family_)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma)) throw ConfigError("Gaussian width sigma must be positive");
    inv_two_sigma_sq_ = 1.0 / (2.0 * g->sigma * g->sigma);
  } else if (const auto* p = std::get_if<PolynomialKernel>(&family_)) {
    if (p->degree < 1) throw ConfigError("polynomial degree must be >= 1");
    if (!(p->offset >= 0.0)) throw ConfigError("polynomial offset must be >= 0");
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GaussianKernel>) {
          os << "gaussian(sigma=" << k.sigma << ")";
        } else if constexpr (std::is_same_v<K, LinearKernel>) {
          os << "linear";
        } else {
          os << "polynomial(degree=" << k.degree << ",offset=" << k.offset << ")";
        }
      },
      family_);
  return os.str();
}

namespace {

double int_pow(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace

double KernelSpec::operator()(const SparseVector& u, const SparseVector& v) const {
  switch (family_.index()) {
    case 0:
      return std::exp(-sparse_sq_dist(u, v) * inv_two_sigma_sq_);
    case 1:
      return sparse_dot(u, v);
    default: {
      const auto& p = std::get<PolynomialKernel>(family_);
      return int_pow(sparse_dot(u, v) + p.offset, p.degree);
    }
  }
}

double KernelSpec::self(const SparseVector& x) const {
  switch (family_.index()) {
    case 0:
      return 1.0;
    case 1:
      return x.squared_norm();
    default: {
      const auto& p = std::get<PolynomialKernel>(family_);
      return int_pow(x.squared_norm() + p.offset, p.degree);
    }
  }
}

double kernel_eval(const KernelSpec& spec, const SparseVector& u, const SparseVector& v) { return spec(u, v); }

GramMatrix gram_matrix(const KernelSpec& spec, std::span<const SparseVector> xs) {
  GramMatrix m(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m(i, i) = spec(xs[i], xs[i]);
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double k = spec(xs[i], xs[j]);
      m(i, j) = k;
      m(j, i) = k;
    }
  }
  return m;
}

}  // namespace budgetkl
