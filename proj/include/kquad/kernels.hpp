#pragma once

#include <span>
#include <variant>

namespace kquad {

// Fractional part {x} = x - floor(x), clamped into [0,1).
double fractional_part(double x);

// Bernoulli polynomial B_m(x) for even m in {2,...,12}, from hard-coded
// monomial coefficients.
double bernoulli_poly(int degree, double x);

// One-dimensional Korobov kernel of order alpha:
//   k_a(x,y) = 1 + (-1)^(a-1) (2*pi)^(2a) / (2a)! * B_{2a}({x-y}).
double korobov_eval_1d(int alpha, double x, double y);

// Truncated Mercer series of the theta-power of the 1-d Korobov kernel:
//   1 + sum_{i=1}^{n_terms} i^(-2*alpha*theta) [c_i(x)c_i(y) + s_i(x)s_i(y)]
// with c_i(x) = sqrt(2) cos(2*pi*i*x), s_i(x) = sqrt(2) sin(2*pi*i*x).
// Requires 2*alpha*theta > 1 (summability).
double mercer_truncated(int alpha, double theta, int n_terms, double x, double y);

// Bound on the truncation error of mercer_truncated:
//   2 * sum_{i > N} i^(-2at) <= 2 * N^(1-2at) / (2at - 1).
double mercer_tail_bound(int alpha, double theta, int n_terms);

struct KorobovKernel {
  int alpha = 1;
  int dim = 1;

  KorobovKernel() = default;
  KorobovKernel(int alpha, int dim);
};

double korobov_eval(const KorobovKernel& kernel, std::span<const double> x,
                    std::span<const double> y);

// theta-power of a Korobov kernel, evaluated through the truncated Mercer
// series only (no closed form is attempted for non-integer alpha*theta).
struct PowerKernel {
  KorobovKernel base;
  double theta;
  int truncation;

  explicit PowerKernel(KorobovKernel base, double theta, int truncation = 10000);
};

double power_eval(const PowerKernel& kernel, std::span<const double> x,
                  std::span<const double> y);

// Matern kernel with unit variance; nu = r - dim/2 restricted to the
// half-integers 1/2, 3/2, 5/2.
struct MaternKernel {
  int r;
  int dim;
  double lengthscale;

  explicit MaternKernel(int r, int dim, double lengthscale = 1.0);
  double nu() const { return r - 0.5 * dim; }
};

// Radial profile phi(t) with t the euclidean distance, so that
// matern_eval(k, x, y) = phi(|x - y|).
double matern_radial(const MaternKernel& kernel, double distance);

double matern_eval(const MaternKernel& kernel, std::span<const double> x,
                   std::span<const double> y);

using Kernel = std::variant<KorobovKernel, PowerKernel, MaternKernel>;

double kernel_eval(const Kernel& kernel, std::span<const double> x,
                   std::span<const double> y);
int kernel_dim(const Kernel& kernel);
// k(x,x); constant over x for all supported kernels.
double kernel_diag(const Kernel& kernel);

}  // namespace kquad
