#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kquad/kernels.hpp"
#include "kquad/point_set.hpp"
#include "kquad/wce.hpp"
#include "kquad/weights.hpp"

namespace kquad {

// Test function with known true integral and declared smoothness label.
struct Integrand {
  int dim = 1;
  int smoothness_s = 1;
  std::vector<double> anchor;
  double true_integral = 1.0;
  std::function<double(std::span<const double>)> eval;
};

// Korobov kernel section x -> prod_j k_s(x_j, anchor_j); integrates to 1.
// Note the section of k_s is smoother than a generic element of the order-s
// space: its Fourier coefficients decay like h^(-2s).
Integrand make_integrand(int s, int dim, std::vector<double> anchor);

// Fractional power-kernel section whose Fourier coefficients decay with
// exponent s + 0.01, the decay at which log-log error plots read off slope
// -s. Evaluated through the truncated Mercer series; integrates to 1. This
// is the default convergence-experiment integrand.
Integrand make_power_section_integrand(int s, int dim, std::vector<double> anchor,
                                       int n_terms = 10000);

// Matern kernel section of order s (nu = s - d/2); true integral computed
// once by the numeric reference embedding.
Integrand make_matern_integrand(int s, int dim, std::vector<double> anchor,
                                int resolution);

enum class Method { Mc, LatticeShift, BqExact, BqConstrained, GridBq };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct ConvergenceRecord {
  Method method = Method::Mc;
  int assumed_order = 1;  // Korobov alpha, or Sobolev r for grid-bq
  int smoothness_s = 1;
  int dim = 1;
  std::int64_t n = 1;
  int replicate = 0;
  std::uint64_t seed = 0;
  double abs_error = 0.0;
  double wce = 0.0;
  double weight_sq_norm = 0.0;
};

enum class IntegrandKind { PowerSection, KorobovSection, Constant };

struct ExperimentConfig {
  Method method = Method::Mc;
  int alpha = 1;  // assumed order (alpha, or r for grid-bq)
  int s = 1;      // integrand smoothness label
  int dim = 1;
  int j_min = 4;
  int j_max = 10;
  int replicates = 20;
  std::uint64_t seed = 0;
  std::int64_t n_min_fit = 16;
  IntegrandKind integrand = IntegrandKind::PowerSection;
};

// Flat key=value text: method, alpha, s, d, j_min, j_max, replicates, seed,
// n_min_fit (all required) plus the optional integrand key
// (power-section | korobov-section | constant).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Targets 2^j for j = j_min..j_max; lattice methods replace each with the
// nearest prime >= target, grid-bq with the nearest m^d.
std::vector<std::int64_t> n_grid(const ExperimentConfig& config);
int expected_replicates(const ExperimentConfig& config);

// One record per (n, replicate); replicates that fail with a conditioning
// error are recorded as missing, not fabricated.
std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config);
std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config,
                                               const Integrand& integrand);

// Throws ConditioningError when any n lost more than 20% of its replicates.
void check_failure_rate(std::span<const ConvergenceRecord> records,
                        const ExperimentConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::int64_t n_min = 1;
  int points_used = 0;
};

// Per-n mean of abs_error over replicates, then OLS of log2(mean) on log2(n)
// restricted to n >= n_min.
RateFit aggregate_and_fit(std::span<const ConvergenceRecord> records,
                          std::int64_t n_min);

// CSV, header exactly:
// method,assumed_order,smoothness_s,dim,n,replicate,seed,abs_error,wce,weight_sq_norm
// Floats carry 17 significant digits; rows sorted by (method, n, replicate).
void export_table(std::span<const ConvergenceRecord> records,
                  const std::filesystem::path& path);
std::vector<ConvergenceRecord> import_table(const std::filesystem::path& path);

// Decay exponent theta*b - (1/2 - c)(1 - theta); positive = decaying.
double predicted_rate(double b, double c, double theta);
// Sobolev variant b*s/r - (1/2 - c)(1 - s/r), s <= r.
double predicted_rate_sobolev(double b, double c, int s, int r);

struct TheoreticalRate {
  double b = 1.0;
  double c = 0.5;
  double theta = 1.0;
  double exponent = 1.0;
};

TheoreticalRate make_theoretical_rate(double b, double c, double theta);

// Exponent printed next to fitted slopes for an experiment: 0.5 for mc,
// theta*b with theta = min(1, s/alpha), c = 1/2 for the Korobov methods,
// and the Sobolev value with b = r/d, c = 1/2 for grid-bq.
double predicted_exponent(const ExperimentConfig& config);

}  // namespace kquad
