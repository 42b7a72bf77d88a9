#pragma once

#include <Eigen/Dense>
#include <span>

#include "kquad/kernels.hpp"
#include "kquad/point_set.hpp"
#include "kquad/weights.hpp"

namespace kquad {

// How the kernel-mean terms of the worst-case error are obtained. P is the
// uniform distribution on [0,1]^d throughout.
struct EmbeddingSpec {
  enum class Kind { KorobovUniformClosedForm, NumericReference };

  Kind kind = Kind::KorobovUniformClosedForm;
  int resolution = 2048;  // reference-quadrature nodes per axis (numeric kind)

  static EmbeddingSpec korobov_closed_form() { return {}; }
  static EmbeddingSpec numeric(int resolution = 2048) {
    return {Kind::NumericReference, resolution};
  }
};

struct WceReport {
  double initial_sq = 0.0;  // int int k dP dP
  double cross = 0.0;       // sum_i w_i int k(x, X_i) dP(x)
  double quad = 0.0;        // sum_ij w_i w_j k(X_i, X_j)
  double e = 0.0;           // sqrt(max(0, initial_sq - 2 cross + quad))
};

// int k(y,x) dP(x) = 1 for Korobov kernels with uniform P, any alpha, d, y.
double kernel_mean_korobov(std::span<const double> y);

// Composite-trapezoid approximation of int k(x,y) dx over [0,1]^d, d <= 2.
double kernel_mean_numeric(const MaternKernel& kernel, std::span<const double> y,
                           int resolution);

// |I(2m) - I(m)| at resolution m; must be < 1e-6 before a resolution is
// trusted in acceptance runs.
double kernel_mean_resolution_change(const MaternKernel& kernel,
                                     std::span<const double> y, int resolution);

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const PointSet& ps);
Eigen::VectorXd kernel_mean_vector(const Kernel& kernel,
                                   const EmbeddingSpec& embedding,
                                   const PointSet& ps);
// The initial term of the quadratic form; 1 for the closed-form embedding,
// cached per (kernel, resolution) for the numeric one.
double initial_error_sq(const Kernel& kernel, const EmbeddingSpec& embedding);

// sqrt with the negative-radicand policy: values in [-1e-10, 0) clamp to 0,
// anything lower signals inconsistent inputs.
double wce_from_radicand(double radicand);

WceReport wce_eval(const Kernel& kernel, const EmbeddingSpec& embedding,
                   const QuadratureRule& rule);

// The same quantity via literal double loops with no algebraic shortcuts;
// independent oracle, n <= 256.
double wce_bruteforce(const Kernel& kernel, const EmbeddingSpec& embedding,
                      const QuadratureRule& rule);

}  // namespace kquad
