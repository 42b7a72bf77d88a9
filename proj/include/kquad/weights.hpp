#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kquad/point_set.hpp"

namespace kquad {

// Numerical failure that a caller may treat as a missing result (exit code 3
// at the CLI); distinct from usage/input errors.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureRule {
  PointSet points;
  std::vector<double> weights;
};

struct SolveReport {
  std::vector<double> weights;
  double jitter_used = 0.0;
  double lambda = 0.0;       // 0 for the unconstrained solve
  double weight_sq_norm = 0.0;
};

std::vector<double> uniform_weights(std::int64_t n);

struct SpdSolution {
  Eigen::VectorXd x;
  double jitter_used = 0.0;
};

// Cholesky with escalating diagonal jitter eps * trace/n, eps = 0 then
// 1e-12, 1e-11, ..., 1e-4; returns the first success and the jitter used.
SpdSolution solve_spd(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs);

// Worst-case-error-minimizing weights: solve gram * w = kmean.
SolveReport bq_weights_exact(const Eigen::MatrixXd& gram, const Eigen::VectorXd& kmean);

// Same minimization subject to sum w_i^2 <= bound. If the unconstrained
// solution is feasible it is returned with lambda = 0; otherwise the lambda
// with sum w_i(lambda)^2 = bound is located by bisection on
// (gram + lambda I) w = kmean, terminating when the norm is within 1e-6
// relative of the bound.
SolveReport bq_weights_constrained(const Eigen::MatrixXd& gram,
                                   const Eigen::VectorXd& kmean, double bound);

}  // namespace kquad
