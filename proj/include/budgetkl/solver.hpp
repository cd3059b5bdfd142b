#pragma once

#include <Eigen/Dense>

namespace budgetkl {

/// Regularized projection of a removed expansion onto the survivors' span:
///   minimize  theta' (K2 + eta I) theta - 2 theta' K21 alpha
/// K2 is survivors x survivors, K21 is survivors x removed, alpha the removed coefficients.
struct ProjectionProblem {
  Eigen::MatrixXd K2;
  Eigen::MatrixXd K21;
  Eigen::VectorXd alpha;
  double eta = 0.0;

  /// Throws std::invalid_argument on inconsistent shapes, asymmetric K2 or eta <= 0.
  void validate() const;
  /// The objective above (without the constant alpha' K1 alpha term).
  double objective(const Eigen::VectorXd& theta) const;
};

/// Solves A x = b for symmetric positive definite A via Cholesky.
/// Throws FactorizationFailure when a pivot is not positive.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// theta* = (K2 + eta I)^{-1} K21 alpha. Throws FactorizationFailure on a bad pivot.
Eigen::VectorXd solve_theta(const ProjectionProblem& p);

struct ThetaSolution {
  Eigen::VectorXd theta;
  double eta_used = 0.0;
  int doublings = 0;
};

/// solve_theta with the retry ladder: eta doubles after each FactorizationFailure,
/// at most `max_doublings` times, then SolverDiverged.
ThetaSolution solve_theta_with_retry(ProjectionProblem p, int max_doublings = 20);

}  // namespace budgetkl
