#include "budgetkl/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "budgetkl/errors.hpp"

namespace budgetkl {

void ProjectionProblem::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (K2.rows() != K2.cols()) throw std::invalid_argument("K2 must be square");
  if (K21.rows() != K2.rows()) throw std::invalid_argument("K21 rows must match K2");
  if (K21.cols() != alpha.size()) throw std::invalid_argument("K21 columns must match alpha");
  for (Eigen::Index i = 0; i < K2.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < K2.cols(); ++j) {
      if (std::abs(K2(i, j) - K2(j, i)) > 1e-12) throw std::invalid_argument("K2 is not symmetric");
    }
  }
}

double ProjectionProblem::objective(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd b = K21 * alpha;
  return theta.dot(K2 * theta) + eta * theta.squaredNorm() - 2.0 * theta.dot(b);
}

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw std::invalid_argument("spd_solve: shape mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    // Eigen does not report which column failed; locate it for the error message.
    const Eigen::MatrixXd& L = llt.matrixLLT();
    std::size_t pivot = 0;
    for (Eigen::Index k = 0; k < L.rows(); ++k) {
      if (!(L(k, k) > 0.0) || !std::isfinite(L(k, k))) {
        pivot = static_cast<std::size_t>(k);
        break;
      }
    }
    throw FactorizationFailure(pivot);
  }
  return llt.solve(b);
}

Eigen::VectorXd solve_theta(const ProjectionProblem& p) {
  p.validate();
  const Eigen::VectorXd rhs = p.K21 * p.alpha;
  Eigen::MatrixXd A = p.K2;
  A.diagonal().array() += p.eta;
  return spd_solve(A, rhs);
}

ThetaSolution solve_theta_with_retry(ProjectionProblem p, int max_doublings) {
  for (int doublings = 0;; ++doublings) {
    try {
      return {solve_theta(p), p.eta, doublings};
    } catch (const FactorizationFailure&) {
      if (doublings >= max_doublings) {
        throw SolverDiverged("Cholesky failed after " + std::to_string(doublings) + " eta doublings (eta=" +
                             std::to_string(p.eta) + ")");
      }
      p.eta *= 2.0;
    }
  }
}

}  // namespace budgetkl
