#include "kquad/weights.hpp"

#include <cmath>
#include <utility>

namespace kquad {

std::vector<double> uniform_weights(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("uniform_weights: n >= 1 required");
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
}

SpdSolution solve_spd(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw std::invalid_argument("solve_spd: shape mismatch");
  const double scale = matrix.trace() / static_cast<double>(matrix.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() == Eigen::Success) return {llt.solve(rhs), 0.0};

  for (double eps = 1e-12; eps < 1.5e-4; eps *= 10.0) {
    const double jitter = eps * scale;
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.solve(rhs), jitter};
  }
  throw ConditioningError(
      "solve_spd: Cholesky failed for every jitter level up to 1e-4 * trace/n");
}

SolveReport bq_weights_exact(const Eigen::MatrixXd& gram, const Eigen::VectorXd& kmean) {
  const SpdSolution sol = solve_spd(gram, kmean);
  SolveReport report;
  report.weights.assign(sol.x.data(), sol.x.data() + sol.x.size());
  report.jitter_used = sol.jitter_used;
  report.lambda = 0.0;
  report.weight_sq_norm = sol.x.squaredNorm();
  return report;
}

SolveReport bq_weights_constrained(const Eigen::MatrixXd& gram,
                                   const Eigen::VectorXd& kmean, double bound) {
  if (!(bound > 0.0))
    throw std::invalid_argument("bq_weights_constrained: bound must be positive");
  SolveReport exact = bq_weights_exact(gram, kmean);
  if (exact.weight_sq_norm <= bound) return exact;  // lambda stays 0

  const auto solve_ridge = [&](double lambda) {
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += lambda;
    return solve_spd(shifted, kmean);
  };

  constexpr double kRelTol = 1e-6;
  constexpr int kMaxIterations = 200;
  int iterations = 0;

  // ||(K + lambda I)^{-1} z|| <= ||z|| / lambda, so this lambda is feasible
  // up to round-off; double if numerics disagree.
  double lo = 0.0;
  double hi = kmean.norm() / std::sqrt(bound);
  SpdSolution sol = solve_ridge(hi);
  double norm_sq = sol.x.squaredNorm();
  while (norm_sq > bound) {
    if (++iterations > kMaxIterations)
      throw ConditioningError("bq_weights_constrained: could not bracket the bound");
    hi *= 2.0;
    sol = solve_ridge(hi);
    norm_sq = sol.x.squaredNorm();
  }

  double lambda = hi;
  while (std::abs(norm_sq - bound) > kRelTol * bound) {
    if (++iterations > kMaxIterations)
      throw ConditioningError(
          "bq_weights_constrained: bisection did not converge in 200 iterations");
    const double mid = 0.5 * (lo + hi);
    SpdSolution mid_sol = solve_ridge(mid);
    const double mid_norm_sq = mid_sol.x.squaredNorm();
    if (mid_norm_sq > bound * (1.0 + kRelTol)) {
      lo = mid;
    } else {
      hi = mid;
      lambda = mid;
      sol = std::move(mid_sol);
      norm_sq = mid_norm_sq;
    }
  }

  SolveReport report;
  report.weights.assign(sol.x.data(), sol.x.data() + sol.x.size());
  report.jitter_used = sol.jitter_used;
  report.lambda = lambda;
  report.weight_sq_norm = norm_sq;
  return report;
}

}  // namespace kquad
