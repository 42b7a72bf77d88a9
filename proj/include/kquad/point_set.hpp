#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace kquad {

// n points in [0,1)^dim, row-major. Constructors below guarantee the
// half-open range; hand-built instances may hold closed-interval data for
// diagnostics such as diameter().
struct PointSet {
  int dim = 1;
  std::vector<double> coords;

  std::int64_t size() const {
    return static_cast<std::int64_t>(coords.size()) / dim;
  }
  std::span<const double> point(std::int64_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

bool is_prime(std::int64_t n);
std::int64_t next_prime_at_least(std::int64_t n);

PointSet sample_iid_uniform(std::int64_t n, int dim, std::uint64_t seed);

// Rank-1 lattice generator vector; n prime, components in {1,...,n-1}.
// alpha records the Korobov order the vector was searched for.
struct GeneratorVector {
  std::int64_t n = 2;
  int alpha = 1;
  std::vector<std::int64_t> z;

  int dim() const { return static_cast<int>(z.size()); }
};

void validate(const GeneratorVector& gen);

// Points X_i = {i z / n} for i = 1..n; i = n yields the zero point.
PointSet rank1_lattice(const GeneratorVector& gen);

// Squared worst-case error of the uniform-weight lattice rule in the Korobov
// space of order alpha, via the group-structure identity:
//   e^2 = -1 + (1/n) sum_{i=0}^{n-1} prod_j k_alpha({i z_j / n}).
double lattice_wce_sq(const GeneratorVector& gen, int alpha);

// Component-by-component search: coordinate j picks the z_j in {1,...,n-1}
// minimizing the squared worst-case error with earlier coordinates fixed,
// ties broken by the smallest candidate. Plain O(d n^2) evaluation.
GeneratorVector cbc_construct(std::int64_t n, int dim, int alpha);

// Every point mapped to {x_i + delta}.
PointSet shift_by(const PointSet& ps, std::span<const double> delta);
// One uniform shift drawn from the seed, applied to all points.
PointSet random_shift(const PointSet& ps, std::uint64_t seed);

// Midpoint grid: m^dim points with coordinates (i + 1/2)/m per axis.
PointSet regular_grid(std::int64_t m, int dim);

// Minimum pairwise euclidean distance; 0 when duplicates exist.
double separation_radius(const PointSet& ps);
// Same in the wrap-around metric on the torus [0,1)^dim.
double separation_radius_torus(const PointSet& ps);
// Maximum pairwise euclidean distance; 0 for a single point.
double diameter(const PointSet& ps);

// Text format: first line "n d alpha", second line the d components.
void save_generator(const GeneratorVector& gen, const std::filesystem::path& path);
GeneratorVector load_generator(const std::filesystem::path& path);

}  // namespace kquad
