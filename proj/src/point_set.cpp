#include "kquad/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "kquad/kernels.hpp"

namespace kquad {
namespace {

// 53 random bits -> [0,1); identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_shape(std::int64_t n, int dim) {
  if (n < 1) throw std::invalid_argument("point set: n >= 1 required");
  if (dim < 1) throw std::invalid_argument("point set: dim >= 1 required");
}

// k_alpha(m/n, 0) for m = 0..n-1; the only kernel values a lattice rule sees.
std::vector<double> korobov_table(std::int64_t n, int alpha) {
  std::vector<double> table(n);
  for (std::int64_t m = 0; m < n; ++m)
    table[m] = korobov_eval_1d(alpha, static_cast<double>(m) / static_cast<double>(n), 0.0);
  return table;
}

double torus_distance_sq(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = std::abs(a[j] - b[j]);
    d = std::min(d, 1.0 - d);
    sq += d * d;
  }
  return sq;
}

double distance_sq(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return sq;
}

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::int64_t next_prime_at_least(std::int64_t n) {
  std::int64_t p = std::max<std::int64_t>(n, 2);
  while (!is_prime(p)) ++p;
  return p;
}

PointSet sample_iid_uniform(std::int64_t n, int dim, std::uint64_t seed) {
  check_shape(n, dim);
  std::mt19937_64 rng(seed);
  PointSet ps{dim, std::vector<double>(static_cast<std::size_t>(n) * dim)};
  for (auto& c : ps.coords) c = uniform01(rng);
  return ps;
}

void validate(const GeneratorVector& gen) {
  if (!is_prime(gen.n))
    throw std::invalid_argument("generator vector: n = " + std::to_string(gen.n) +
                                " is not prime");
  if (gen.n > (std::int64_t{1} << 31))
    throw std::invalid_argument("generator vector: n too large");
  if (gen.alpha < 1) throw std::invalid_argument("generator vector: alpha >= 1 required");
  if (gen.z.empty())
    throw std::invalid_argument("generator vector: needs at least one component");
  for (const auto zj : gen.z)
    if (zj < 1 || zj >= gen.n)
      throw std::invalid_argument("generator vector: component " + std::to_string(zj) +
                                  " outside {1,...,n-1}");
}

PointSet rank1_lattice(const GeneratorVector& gen) {
  validate(gen);
  const std::int64_t n = gen.n;
  const int d = gen.dim();
  PointSet ps{d, std::vector<double>(static_cast<std::size_t>(n) * d)};
  for (std::int64_t i = 1; i <= n; ++i)
    for (int j = 0; j < d; ++j)
      ps.coords[(i - 1) * d + j] =
          static_cast<double>((i * gen.z[j]) % n) / static_cast<double>(n);
  return ps;
}

double lattice_wce_sq(const GeneratorVector& gen, int alpha) {
  validate(gen);
  const auto table = korobov_table(gen.n, alpha);
  double sum = 0.0;
  for (std::int64_t i = 0; i < gen.n; ++i) {
    double prod = 1.0;
    for (const auto zj : gen.z) prod *= table[(i * zj) % gen.n];
    sum += prod;
  }
  return -1.0 + sum / static_cast<double>(gen.n);
}

GeneratorVector cbc_construct(std::int64_t n, int dim, int alpha) {
  if (!is_prime(n))
    throw std::invalid_argument("cbc_construct: n = " + std::to_string(n) +
                                " is not prime");
  if (dim < 1) throw std::invalid_argument("cbc_construct: dim >= 1 required");
  const auto table = korobov_table(n, alpha);

  GeneratorVector gen{n, alpha, {}};
  gen.z.reserve(dim);
  std::vector<double> prod(n, 1.0);  // running product over chosen coordinates
  for (int j = 0; j < dim; ++j) {
    std::int64_t best_z = 1;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::int64_t z = 1; z < n; ++z) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < n; ++i) sum += prod[i] * table[(i * z) % n];
      if (sum < best_sum) {  // strict: ties keep the smallest candidate
        best_sum = sum;
        best_z = z;
      }
    }
    gen.z.push_back(best_z);
    for (std::int64_t i = 0; i < n; ++i) prod[i] *= table[(i * best_z) % n];
  }
  return gen;
}

PointSet shift_by(const PointSet& ps, std::span<const double> delta) {
  if (static_cast<int>(delta.size()) != ps.dim)
    throw std::invalid_argument("shift_by: delta dimension mismatch");
  PointSet out = ps;
  for (std::int64_t i = 0; i < ps.size(); ++i)
    for (int j = 0; j < ps.dim; ++j)
      out.coords[i * ps.dim + j] = fractional_part(ps.coords[i * ps.dim + j] + delta[j]);
  return out;
}

PointSet random_shift(const PointSet& ps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> delta(ps.dim);
  for (auto& v : delta) v = uniform01(rng);
  return shift_by(ps, delta);
}

PointSet regular_grid(std::int64_t m, int dim) {
  check_shape(m, dim);
  if (std::pow(static_cast<double>(m), dim) > 1e8)
    throw std::invalid_argument("regular_grid: m^dim exceeds the supported size");
  std::int64_t count = 1;
  for (int j = 0; j < dim; ++j) count *= m;
  PointSet ps{dim, std::vector<double>(static_cast<std::size_t>(count) * dim)};
  std::vector<std::int64_t> idx(dim, 0);
  for (std::int64_t i = 0; i < count; ++i) {
    for (int j = 0; j < dim; ++j)
      ps.coords[i * dim + j] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(m);
    for (int j = dim - 1; j >= 0; --j) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
  }
  return ps;
}

double separation_radius(const PointSet& ps) {
  if (ps.size() < 2) throw std::invalid_argument("separation_radius: n >= 2 required");
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < ps.size(); ++i)
    for (std::int64_t j = i + 1; j < ps.size(); ++j)
      best = std::min(best, distance_sq(ps.point(i), ps.point(j)));
  return std::sqrt(best);
}

double separation_radius_torus(const PointSet& ps) {
  if (ps.size() < 2)
    throw std::invalid_argument("separation_radius_torus: n >= 2 required");
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < ps.size(); ++i)
    for (std::int64_t j = i + 1; j < ps.size(); ++j)
      best = std::min(best, torus_distance_sq(ps.point(i), ps.point(j)));
  return std::sqrt(best);
}

double diameter(const PointSet& ps) {
  if (ps.size() < 1) throw std::invalid_argument("diameter: n >= 1 required");
  double best = 0.0;
  for (std::int64_t i = 0; i < ps.size(); ++i)
    for (std::int64_t j = i + 1; j < ps.size(); ++j)
      best = std::max(best, distance_sq(ps.point(i), ps.point(j)));
  return std::sqrt(best);
}

void save_generator(const GeneratorVector& gen, const std::filesystem::path& path) {
  validate(gen);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_generator: cannot open " + path.string());
  out << gen.n << ' ' << gen.dim() << ' ' << gen.alpha << '\n';
  for (int j = 0; j < gen.dim(); ++j) out << gen.z[j] << (j + 1 < gen.dim() ? ' ' : '\n');
  if (!out) throw std::runtime_error("save_generator: write failed on " + path.string());
}

GeneratorVector load_generator(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_generator: cannot open " + path.string());
  std::int64_t n = 0;
  int d = 0;
  int alpha = 0;
  if (!(in >> n >> d >> alpha))
    throw std::runtime_error("load_generator: malformed header, expected 'n d alpha'");
  if (d < 1) throw std::runtime_error("load_generator: d >= 1 required");
  GeneratorVector gen{n, alpha, std::vector<std::int64_t>(d)};
  for (auto& zj : gen.z)
    if (!(in >> zj))
      throw std::runtime_error("load_generator: expected " + std::to_string(d) +
                               " components on the second line");
  validate(gen);
  return gen;
}

}  // namespace kquad
