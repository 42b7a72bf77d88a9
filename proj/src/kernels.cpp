#include "kquad/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kquad {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Monomial coefficients of the Bernoulli polynomials, constant term first.
constexpr std::array<double, 3> kB2 = {1.0 / 6.0, -1.0, 1.0};
constexpr std::array<double, 5> kB4 = {-1.0 / 30.0, 0.0, 1.0, -2.0, 1.0};
constexpr std::array<double, 7> kB6 = {1.0 / 42.0, 0.0, -0.5, 0.0, 2.5, -3.0, 1.0};
constexpr std::array<double, 9> kB8 = {-1.0 / 30.0, 0.0, 2.0 / 3.0, 0.0,
                                       -7.0 / 3.0,  0.0, 14.0 / 3.0, -4.0, 1.0};
constexpr std::array<double, 11> kB10 = {5.0 / 66.0, 0.0, -1.5, 0.0, 5.0, 0.0,
                                         -7.0, 0.0, 7.5, -5.0, 1.0};
constexpr std::array<double, 13> kB12 = {-691.0 / 2730.0, 0.0, 5.0,   0.0, -16.5,
                                         0.0,             22.0, 0.0, -16.5,
                                         0.0,             11.0, -6.0, 1.0};

std::span<const double> bernoulli_coeffs(int degree) {
  switch (degree) {
    case 2: return kB2;
    case 4: return kB4;
    case 6: return kB6;
    case 8: return kB8;
    case 10: return kB10;
    case 12: return kB12;
    default:
      throw std::invalid_argument(
          "bernoulli_poly: degree " + std::to_string(degree) +
          " unsupported; even degrees 2..12 (alpha in 1..6) only");
  }
}

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " +
                                std::to_string(v));
}

// (-1)^(a-1) (2*pi)^(2a) / (2a)! for a = 1..6.
double korobov_coefficient(int alpha) {
  static const std::array<double, 7> table = [] {
    std::array<double, 7> t{};
    double factorial = 1.0;
    for (int a = 1; a <= 6; ++a) {
      factorial *= (2 * a - 1) * (2 * a);
      const double sign = (a % 2 == 1) ? 1.0 : -1.0;
      t[a] = sign * std::pow(kTwoPi, 2 * a) / factorial;
    }
    return t;
  }();
  if (alpha < 1 || alpha > 6)
    throw std::invalid_argument("korobov kernel: alpha " + std::to_string(alpha) +
                                " unsupported, need 1 <= alpha <= 6");
  return table[alpha];
}

void check_dim(std::span<const double> x, std::span<const double> y, int dim,
               const char* what) {
  if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

double fractional_part(double x) {
  const double f = x - std::floor(x);
  if (f < 0.0 || f >= 1.0) return 0.0;
  return f + 0.0;  // maps -0.0 to +0.0
}

double bernoulli_poly(int degree, double x) {
  const auto coeffs = bernoulli_coeffs(degree);
  check_unit_interval(x, "bernoulli_poly: x");
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

double korobov_eval_1d(int alpha, double x, double y) {
  const double coeff = korobov_coefficient(alpha);
  check_unit_interval(x, "korobov_eval_1d: x");
  check_unit_interval(y, "korobov_eval_1d: y");
  // B_{2a}(u) = B_{2a}(1-u); fold onto [0, 1/2] so k(x,y) == k(y,x) bitwise.
  double u = fractional_part(x - y);
  u = std::min(u, 1.0 - u);
  return 1.0 + coeff * bernoulli_poly(2 * alpha, u);
}

double mercer_truncated(int alpha, double theta, int n_terms, double x, double y) {
  if (alpha < 1) throw std::invalid_argument("mercer_truncated: alpha >= 1 required");
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("mercer_truncated: theta must lie in (0,1]");
  if (n_terms < 1) throw std::invalid_argument("mercer_truncated: n_terms >= 1 required");
  const double power = 2.0 * alpha * theta;
  if (power <= 1.0)
    throw std::domain_error(
        "mercer_truncated: 2*alpha*theta <= 1, series is not summable within an "
        "RKHS power");
  check_unit_interval(x, "mercer_truncated: x");
  check_unit_interval(y, "mercer_truncated: y");
  const double diff = std::abs(x - y);  // cosine is even; keeps k(x,y) == k(y,x) bitwise
  double sum = 0.0;
  // ascending term magnitude
  for (int i = n_terms; i >= 1; --i)
    sum += std::pow(static_cast<double>(i), -power) * 2.0 * std::cos(kTwoPi * i * diff);
  return 1.0 + sum;
}

double mercer_tail_bound(int alpha, double theta, int n_terms) {
  const double power = 2.0 * alpha * theta;
  if (power <= 1.0)
    throw std::domain_error("mercer_tail_bound: requires 2*alpha*theta > 1");
  if (n_terms < 1) throw std::invalid_argument("mercer_tail_bound: n_terms >= 1");
  return 2.0 * std::pow(static_cast<double>(n_terms), 1.0 - power) / (power - 1.0);
}

KorobovKernel::KorobovKernel(int alpha, int dim) : alpha(alpha), dim(dim) {
  korobov_coefficient(alpha);  // validates the supported range
  if (dim < 1) throw std::invalid_argument("KorobovKernel: dim >= 1 required");
}

double korobov_eval(const KorobovKernel& kernel, std::span<const double> x,
                    std::span<const double> y) {
  check_dim(x, y, kernel.dim, "korobov_eval");
  double prod = 1.0;
  for (int j = 0; j < kernel.dim; ++j) prod *= korobov_eval_1d(kernel.alpha, x[j], y[j]);
  return prod;
}

PowerKernel::PowerKernel(KorobovKernel base, double theta, int truncation)
    : base(base), theta(theta), truncation(truncation) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("PowerKernel: theta must lie in (0,1]");
  if (truncation < 1) throw std::invalid_argument("PowerKernel: truncation >= 1");
  if (2.0 * base.alpha * theta <= 1.0)
    throw std::domain_error("PowerKernel: 2*alpha*theta <= 1 is not an RKHS power");
}

double power_eval(const PowerKernel& kernel, std::span<const double> x,
                  std::span<const double> y) {
  check_dim(x, y, kernel.base.dim, "power_eval");
  double prod = 1.0;
  for (int j = 0; j < kernel.base.dim; ++j)
    prod *= mercer_truncated(kernel.base.alpha, kernel.theta, kernel.truncation, x[j], y[j]);
  return prod;
}

MaternKernel::MaternKernel(int r, int dim, double lengthscale)
    : r(r), dim(dim), lengthscale(lengthscale) {
  if (r < 1) throw std::invalid_argument("MaternKernel: r >= 1 required");
  if (dim < 1) throw std::invalid_argument("MaternKernel: dim >= 1 required");
  if (!(lengthscale > 0.0))
    throw std::invalid_argument("MaternKernel: lengthscale must be positive");
  if (2 * r <= dim)
    throw std::invalid_argument("MaternKernel: r > dim/2 required for an RKHS");
  const int two_nu = 2 * r - dim;
  if (two_nu != 1 && two_nu != 3 && two_nu != 5)
    throw std::invalid_argument(
        "MaternKernel: nu = r - dim/2 = " + std::to_string(0.5 * two_nu) +
        " unsupported; supported half-integers are 1/2, 3/2, 5/2");
}

double matern_radial(const MaternKernel& kernel, double distance) {
  const double u = distance / kernel.lengthscale;
  switch (2 * kernel.r - kernel.dim) {
    case 1:
      return std::exp(-u);
    case 3: {
      const double a = std::numbers::sqrt3 * u;
      return (1.0 + a) * std::exp(-a);
    }
    case 5: {
      const double a = std::sqrt(5.0) * u;
      return (1.0 + a + 5.0 * u * u / 3.0) * std::exp(-a);
    }
    default:
      throw std::invalid_argument(
          "matern_radial: nu unsupported; supported half-integers are 1/2, 3/2, 5/2");
  }
}

double matern_eval(const MaternKernel& kernel, std::span<const double> x,
                   std::span<const double> y) {
  check_dim(x, y, kernel.dim, "matern_eval");
  double sq = 0.0;
  for (int j = 0; j < kernel.dim; ++j) {
    const double d = x[j] - y[j];
    sq += d * d;
  }
  return matern_radial(kernel, std::sqrt(sq));
}

double kernel_eval(const Kernel& kernel, std::span<const double> x,
                   std::span<const double> y) {
  return std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, KorobovKernel>) return korobov_eval(k, x, y);
        else if constexpr (std::is_same_v<T, PowerKernel>) return power_eval(k, x, y);
        else return matern_eval(k, x, y);
      },
      kernel);
}

int kernel_dim(const Kernel& kernel) {
  return std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerKernel>) return k.base.dim;
        else return k.dim;
      },
      kernel);
}

double kernel_diag(const Kernel& kernel) {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, KorobovKernel>) {
          return std::pow(korobov_eval_1d(k.alpha, 0.0, 0.0), k.dim);
        } else if constexpr (std::is_same_v<T, PowerKernel>) {
          return std::pow(mercer_truncated(k.base.alpha, k.theta, k.truncation, 0.0, 0.0),
                          k.base.dim);
        } else {
          return 1.0;
        }
      },
      kernel);
}

}  // namespace kquad
