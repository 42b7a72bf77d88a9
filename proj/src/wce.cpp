#include "kquad/wce.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace kquad {
namespace {

void check_domain(const PointSet& ps) {
  for (const double c : ps.coords)
    if (!(c >= 0.0 && c <= 1.0))
      throw std::invalid_argument("wce: rule points must lie in [0,1]^d");
}

void check_rule(const QuadratureRule& rule) {
  if (rule.weights.size() != static_cast<std::size_t>(rule.points.size()))
    throw std::invalid_argument("wce: weights length must match the number of points");
  check_domain(rule.points);
}

template <typename F>
double trapezoid(F&& f, int resolution) {
  const double h = 1.0 / static_cast<double>(resolution);
  double sum = 0.5 * (f(0.0) + f(1.0));
  for (int i = 1; i < resolution; ++i) sum += f(i * h);
  return sum * h;
}

bool closed_form_applicable(const Kernel& kernel) {
  return std::holds_alternative<KorobovKernel>(kernel) ||
         std::holds_alternative<PowerKernel>(kernel);
}

const MaternKernel& require_matern(const Kernel& kernel) {
  const auto* matern = std::get_if<MaternKernel>(&kernel);
  if (!matern)
    throw std::invalid_argument(
        "numeric reference embedding is implemented for Matern kernels only");
  return *matern;
}

// int int phi(|x-y|) dx dy over [0,1]^2d via the difference variable:
// d=1: 2 int_0^1 (1-t) phi(t) dt; d=2: 4 int_{[0,1]^2} (1-u)(1-v) phi(|(u,v)|).
// Finer internal grids keep this term's bias well below the kernel-mean one.
double numeric_initial(const MaternKernel& kernel, int resolution) {
  if (kernel.dim == 1) {
    const int res = std::max(resolution, 1 << 20);
    return 2.0 * trapezoid(
                     [&](double t) { return (1.0 - t) * matern_radial(kernel, t); }, res);
  }
  const int res = std::max(resolution, 4096);
  const double h = 1.0 / static_cast<double>(res);
  double acc = 0.0;
  for (int i = 0; i <= res; ++i) {
    const double wi = (i == 0 || i == res) ? 0.5 : 1.0;
    const double u = i * h;
    double row = 0.0;
    for (int j = 0; j <= res; ++j) {
      const double wj = (j == 0 || j == res) ? 0.5 : 1.0;
      const double v = j * h;
      row += wj * (1.0 - v) * matern_radial(kernel, std::sqrt(u * u + v * v));
    }
    acc += wi * (1.0 - u) * row;
  }
  return 4.0 * acc * h * h;
}

double cached_numeric_initial(const MaternKernel& kernel, int resolution) {
  using Key = std::tuple<int, int, double, int>;
  static std::map<Key, double> cache;
  static std::mutex mutex;
  const Key key{kernel.r, kernel.dim, kernel.lengthscale, resolution};
  std::scoped_lock lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, numeric_initial(kernel, resolution)).first;
  return it->second;
}

}  // namespace

double kernel_mean_korobov(std::span<const double> y) {
  for (const double c : y)
    if (!(c >= 0.0 && c <= 1.0))
      throw std::invalid_argument("kernel_mean_korobov: y must lie in [0,1]^d");
  return 1.0;
}

double kernel_mean_numeric(const MaternKernel& kernel, std::span<const double> y,
                           int resolution) {
  if (kernel.dim > 2)
    throw std::invalid_argument("kernel_mean_numeric: d <= 2 required");
  if (resolution < 64)
    throw std::invalid_argument("kernel_mean_numeric: resolution >= 64 required");
  if (static_cast<int>(y.size()) != kernel.dim)
    throw std::invalid_argument("kernel_mean_numeric: y dimension mismatch");

  if (kernel.dim == 1) {
    const double y0 = y[0];
    return trapezoid(
        [&](double x) { return matern_radial(kernel, std::abs(x - y0)); }, resolution);
  }
  const double h = 1.0 / static_cast<double>(resolution);
  double acc = 0.0;
  for (int i = 0; i <= resolution; ++i) {
    const double wi = (i == 0 || i == resolution) ? 0.5 : 1.0;
    const double dx = i * h - y[0];
    double row = 0.0;
    for (int j = 0; j <= resolution; ++j) {
      const double wj = (j == 0 || j == resolution) ? 0.5 : 1.0;
      const double dy = j * h - y[1];
      row += wj * matern_radial(kernel, std::sqrt(dx * dx + dy * dy));
    }
    acc += wi * row;
  }
  return acc * h * h;
}

double kernel_mean_resolution_change(const MaternKernel& kernel,
                                     std::span<const double> y, int resolution) {
  return std::abs(kernel_mean_numeric(kernel, y, 2 * resolution) -
                  kernel_mean_numeric(kernel, y, resolution));
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const PointSet& ps) {
  if (kernel_dim(kernel) != ps.dim)
    throw std::invalid_argument("gram_matrix: kernel/point dimension mismatch");
  const std::int64_t n = ps.size();
  Eigen::MatrixXd gram(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    gram(i, i) = kernel_eval(kernel, ps.point(i), ps.point(i));
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double v = kernel_eval(kernel, ps.point(i), ps.point(j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

Eigen::VectorXd kernel_mean_vector(const Kernel& kernel, const EmbeddingSpec& embedding,
                                   const PointSet& ps) {
  if (kernel_dim(kernel) != ps.dim)
    throw std::invalid_argument("kernel_mean_vector: kernel/point dimension mismatch");
  Eigen::VectorXd z(ps.size());
  if (embedding.kind == EmbeddingSpec::Kind::KorobovUniformClosedForm) {
    if (!closed_form_applicable(kernel))
      throw std::invalid_argument(
          "closed-form embedding is valid only for Korobov-type kernels with uniform P");
    for (std::int64_t i = 0; i < ps.size(); ++i) z[i] = kernel_mean_korobov(ps.point(i));
  } else {
    const MaternKernel& matern = require_matern(kernel);
    for (std::int64_t i = 0; i < ps.size(); ++i)
      z[i] = kernel_mean_numeric(matern, ps.point(i), embedding.resolution);
  }
  return z;
}

double initial_error_sq(const Kernel& kernel, const EmbeddingSpec& embedding) {
  if (embedding.kind == EmbeddingSpec::Kind::KorobovUniformClosedForm) {
    if (!closed_form_applicable(kernel))
      throw std::invalid_argument(
          "closed-form embedding is valid only for Korobov-type kernels with uniform P");
    return 1.0;
  }
  return cached_numeric_initial(require_matern(kernel), embedding.resolution);
}

double wce_from_radicand(double radicand) {
  if (radicand < -1e-10)
    throw std::runtime_error("wce: radicand " + std::to_string(radicand) +
                             " below -1e-10; the quadratic form is inconsistent");
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

WceReport wce_eval(const Kernel& kernel, const EmbeddingSpec& embedding,
                   const QuadratureRule& rule) {
  check_rule(rule);
  WceReport report;
  report.initial_sq = initial_error_sq(kernel, embedding);
  const Eigen::VectorXd z = kernel_mean_vector(kernel, embedding, rule.points);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                            static_cast<std::int64_t>(rule.weights.size()));
  const Eigen::MatrixXd gram = gram_matrix(kernel, rule.points);
  report.cross = w.dot(z);
  report.quad = w.dot(gram.selfadjointView<Eigen::Upper>() * w);
  report.e = wce_from_radicand(report.initial_sq - 2.0 * report.cross + report.quad);
  return report;
}

double wce_bruteforce(const Kernel& kernel, const EmbeddingSpec& embedding,
                      const QuadratureRule& rule) {
  check_rule(rule);
  const std::int64_t n = rule.points.size();
  if (n > 256) throw std::invalid_argument("wce_bruteforce: n <= 256 required");

  const bool closed = embedding.kind == EmbeddingSpec::Kind::KorobovUniformClosedForm;
  const double initial = initial_error_sq(kernel, embedding);

  double cross = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double mean_i =
        closed ? kernel_mean_korobov(rule.points.point(i))
               : kernel_mean_numeric(require_matern(kernel), rule.points.point(i),
                                     embedding.resolution);
    cross += rule.weights[i] * mean_i;
  }

  double quad = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      quad += rule.weights[i] * rule.weights[j] *
              kernel_eval(kernel, rule.points.point(i), rule.points.point(j));

  return wce_from_radicand(initial - 2.0 * cross + quad);
}

}  // namespace kquad
