#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace budgetkl {

// Every library error derives from Error so callers can catch the family.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid learner, kernel or bench configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sphere projection of the zero function onto a positive radius.
class DegenerateProjection : public Error {
 public:
  DegenerateProjection() : Error("cannot project the zero function onto a sphere of positive radius") {}
};

/// alpha' K alpha came out clearly negative: the cached Gram matrix is broken.
class GramCorruption : public Error {
 public:
  explicit GramCorruption(double quad_form)
      : Error("Gram quadratic form is negative: " + std::to_string(quad_form)), quad_form_(quad_form) {}
  double quad_form() const noexcept { return quad_form_; }

 private:
  double quad_form_;
};

/// Cholesky factorization met a non-positive pivot.
class FactorizationFailure : public Error {
 public:
  explicit FactorizationFailure(std::size_t pivot)
      : Error("non-positive pivot at column " + std::to_string(pivot)), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// The eta-doubling ladder ran out of retries.
class SolverDiverged : public Error {
 public:
  using Error::Error;
};

/// A bound checker was asked to certify a trace that does not meet the bound's hypotheses.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line, const std::string& why)
      : Error("line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonBinaryLabels : public Error {
 public:
  using Error::Error;
};

/// A learner error tagged with the (zero-based) round where it happened.
class RunFailure : public Error {
 public:
  RunFailure(std::size_t round, const std::string& why)
      : Error("round " + std::to_string(round) + ": " + why), round_(round) {}
  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

}  // namespace budgetkl
