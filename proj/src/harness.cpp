#include "kquad/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kquad {
namespace {

constexpr double kDefaultAnchor = 0.3;

// Numeric-embedding resolution for grid-bq runs. The d=1 grid is fine enough
// that trapezoid bias stays below the wce radicand clamp at the largest grids.
constexpr int kGridBqResolution1d = 1 << 18;
constexpr int kGridBqResolution2d = 256;

int grid_bq_resolution(int dim) {
  return dim == 1 ? kGridBqResolution1d : kGridBqResolution2d;
}

std::vector<double> default_anchor(int dim) {
  return std::vector<double>(dim, kDefaultAnchor);
}

Integrand constant_one(int dim, int s_label) {
  Integrand f;
  f.dim = dim;
  f.smoothness_s = s_label;
  f.anchor = default_anchor(dim);
  f.true_integral = 1.0;
  f.eval = [dim](std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("integrand: dimension mismatch");
    return 1.0;
  };
  return f;
}

std::int64_t isqrt_floor(std::int64_t v) {
  auto m = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  while (m * m > v) --m;
  while ((m + 1) * (m + 1) <= v) ++m;
  return m;
}

struct BuiltRule {
  QuadratureRule rule;
  double weight_sq_norm = 0.0;
};

double estimate(const QuadratureRule& rule, const Integrand& f) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < rule.points.size(); ++i)
    acc += rule.weights[i] * f.eval(rule.points.point(i));
  return acc;
}

void append_csv_row(std::string& out, const ConvergenceRecord& rec) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%lld,%d,%llu,%.17g,%.17g,%.17g\n",
                to_string(rec.method).c_str(), rec.assumed_order, rec.smoothness_s,
                rec.dim, static_cast<long long>(rec.n), rec.replicate,
                static_cast<unsigned long long>(rec.seed), rec.abs_error, rec.wce,
                rec.weight_sq_norm);
  out += buf;
}

constexpr const char* kCsvHeader =
    "method,assumed_order,smoothness_s,dim,n,replicate,seed,abs_error,wce,"
    "weight_sq_norm";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("import_table: line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_integer(const std::string& field, std::size_t line_no, const char* name) {
  T value{};
  const auto* begin = field.data();
  const auto* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    row_error(line_no, std::string("cannot parse ") + name + " from '" + field + "'");
  return value;
}

double parse_double(const std::string& field, std::size_t line_no, const char* name) {
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    row_error(line_no, std::string("cannot parse ") + name + " from '" + field + "'");
  return value;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Integrand make_integrand(int s, int dim, std::vector<double> anchor) {
  KorobovKernel kernel(s, dim);  // validates s and dim
  if (static_cast<int>(anchor.size()) != dim)
    throw std::invalid_argument("make_integrand: anchor dimension mismatch");
  Integrand f;
  f.dim = dim;
  f.smoothness_s = s;
  f.anchor = std::move(anchor);
  f.true_integral = 1.0;
  f.eval = [s, dim, anchor = f.anchor](std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("integrand: dimension mismatch");
    double prod = 1.0;
    for (int j = 0; j < dim; ++j) prod *= korobov_eval_1d(s, x[j], anchor[j]);
    return prod;
  };
  return f;
}

Integrand make_power_section_integrand(int s, int dim, std::vector<double> anchor,
                                       int n_terms) {
  if (s < 1) throw std::invalid_argument("make_power_section_integrand: s >= 1");
  if (dim < 1) throw std::invalid_argument("make_power_section_integrand: dim >= 1");
  if (static_cast<int>(anchor.size()) != dim)
    throw std::invalid_argument("make_power_section_integrand: anchor dimension mismatch");
  // series exponent 2 s theta = s + 0.01: coefficient decay matching the
  // label s, so fitted slopes sit near -s
  const double theta = (static_cast<double>(s) + 0.01) / (2.0 * s);
  Integrand f;
  f.dim = dim;
  f.smoothness_s = s;
  f.anchor = std::move(anchor);
  f.true_integral = 1.0;
  f.eval = [s, theta, n_terms, dim, anchor = f.anchor](std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("integrand: dimension mismatch");
    double prod = 1.0;
    for (int j = 0; j < dim; ++j)
      prod *= mercer_truncated(s, theta, n_terms, x[j], anchor[j]);
    return prod;
  };
  return f;
}

Integrand make_matern_integrand(int s, int dim, std::vector<double> anchor,
                                int resolution) {
  const MaternKernel kernel(s, dim);
  if (static_cast<int>(anchor.size()) != dim)
    throw std::invalid_argument("make_matern_integrand: anchor dimension mismatch");
  Integrand f;
  f.dim = dim;
  f.smoothness_s = s;
  f.anchor = std::move(anchor);
  f.true_integral = kernel_mean_numeric(kernel, f.anchor, resolution);
  f.eval = [kernel, anchor = f.anchor](std::span<const double> x) {
    return matern_eval(kernel, x, anchor);
  };
  return f;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Mc: return "mc";
    case Method::LatticeShift: return "lattice-shift";
    case Method::BqExact: return "bq-exact";
    case Method::BqConstrained: return "bq-constrained";
    case Method::GridBq: return "grid-bq";
  }
  throw std::invalid_argument("to_string: unknown method");
}

Method method_from_string(const std::string& name) {
  if (name == "mc") return Method::Mc;
  if (name == "lattice-shift") return Method::LatticeShift;
  if (name == "bq-exact") return Method::BqExact;
  if (name == "bq-constrained") return Method::BqConstrained;
  if (name == "grid-bq") return Method::GridBq;
  throw std::invalid_argument("unknown method '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!seen.insert(key).second)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    try {
      if (key == "method") config.method = method_from_string(value);
      else if (key == "alpha") config.alpha = std::stoi(value);
      else if (key == "s") config.s = std::stoi(value);
      else if (key == "d") config.dim = std::stoi(value);
      else if (key == "j_min") config.j_min = std::stoi(value);
      else if (key == "j_max") config.j_max = std::stoi(value);
      else if (key == "replicates") config.replicates = std::stoi(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "n_min_fit") config.n_min_fit = std::stoll(value);
      else if (key == "integrand") {
        if (value == "power-section") config.integrand = IntegrandKind::PowerSection;
        else if (value == "korobov-section") config.integrand = IntegrandKind::KorobovSection;
        else if (value == "constant") config.integrand = IntegrandKind::Constant;
        else throw std::invalid_argument("unknown integrand '" + value + "'");
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " +
                                  err.what());
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": value out of range for '" + key + "'");
    }
  }
  static const char* required[] = {"method", "alpha", "s", "d", "j_min",
                                   "j_max",  "replicates", "seed", "n_min_fit"};
  for (const char* key : required)
    if (!seen.count(key))
      throw std::invalid_argument(std::string("config: missing key '") + key + "'");
  if (config.j_min < 1 || config.j_max < config.j_min || config.j_max > 30)
    throw std::invalid_argument("config: need 1 <= j_min <= j_max <= 30");
  if (config.replicates < 1)
    throw std::invalid_argument("config: replicates >= 1 required");
  if (config.dim < 1) throw std::invalid_argument("config: d >= 1 required");
  if (config.alpha < 1 || config.s < 1)
    throw std::invalid_argument("config: alpha >= 1 and s >= 1 required");
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  return parse_config(in);
}

std::vector<std::int64_t> n_grid(const ExperimentConfig& config) {
  std::vector<std::int64_t> ns;
  ns.reserve(config.j_max - config.j_min + 1);
  for (int j = config.j_min; j <= config.j_max; ++j) {
    std::int64_t n = std::int64_t{1} << j;
    if (config.method == Method::LatticeShift) {
      n = next_prime_at_least(n);
    } else if (config.method == Method::GridBq && config.dim == 2) {
      const std::int64_t m = isqrt_floor(n);
      n = m * m;
    }
    ns.push_back(n);
  }
  return ns;
}

int expected_replicates(const ExperimentConfig& config) {
  // grid points are deterministic, so replicates collapse to one
  return config.method == Method::GridBq ? 1 : config.replicates;
}

std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config) {
  if (config.integrand == IntegrandKind::Constant)
    return run_convergence(config, constant_one(config.dim, config.s));
  if (config.method == Method::GridBq)
    return run_convergence(
        config, make_matern_integrand(config.s, config.dim, default_anchor(config.dim),
                                      grid_bq_resolution(config.dim)));
  if (config.integrand == IntegrandKind::KorobovSection)
    return run_convergence(
        config, make_integrand(config.s, config.dim, default_anchor(config.dim)));
  return run_convergence(config, make_power_section_integrand(
                                     config.s, config.dim, default_anchor(config.dim)));
}

std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config,
                                               const Integrand& integrand) {
  if (integrand.dim != config.dim)
    throw std::invalid_argument("run_convergence: integrand dimension mismatch");
  if (config.method == Method::GridBq && config.dim > 2)
    throw std::invalid_argument("run_convergence: grid-bq supports d <= 2");

  const auto ns = n_grid(config);
  const int replicates = expected_replicates(config);
  std::vector<ConvergenceRecord> records;
  records.reserve(ns.size() * replicates);

  const Kernel kernel = config.method == Method::GridBq
                            ? Kernel{MaternKernel(config.alpha, config.dim)}
                            : Kernel{KorobovKernel(config.alpha, config.dim)};
  const EmbeddingSpec embedding =
      config.method == Method::GridBq
          ? EmbeddingSpec::numeric(grid_bq_resolution(config.dim))
          : EmbeddingSpec::korobov_closed_form();

  if (config.method == Method::GridBq) {
    const auto& matern = std::get<MaternKernel>(kernel);
    const std::vector<double> anchor = default_anchor(config.dim);
    if (kernel_mean_resolution_change(matern, anchor, embedding.resolution) >= 1e-6)
      throw std::invalid_argument(
          "run_convergence: numeric embedding resolution too small (self-check)");
  }

  for (const auto n : ns) {
    for (int rep = 0; rep < replicates; ++rep) {
      ConvergenceRecord rec;
      rec.method = config.method;
      rec.assumed_order = config.alpha;
      rec.smoothness_s = config.s;
      rec.dim = config.dim;
      rec.n = n;
      rec.replicate = rep;
      rec.seed = config.seed + static_cast<std::uint64_t>(rep);
      try {
        BuiltRule built;
        switch (config.method) {
          case Method::Mc: {
            built.rule.points = sample_iid_uniform(n, config.dim, rec.seed);
            built.rule.weights = uniform_weights(n);
            built.weight_sq_norm = 1.0 / static_cast<double>(n);
            break;
          }
          case Method::LatticeShift: {
            const auto gen = cbc_construct(n, config.dim, config.alpha);
            built.rule.points = random_shift(rank1_lattice(gen), rec.seed);
            built.rule.weights = uniform_weights(n);
            built.weight_sq_norm = 1.0 / static_cast<double>(n);
            break;
          }
          case Method::BqExact:
          case Method::BqConstrained: {
            built.rule.points = sample_iid_uniform(n, config.dim, rec.seed);
            const Eigen::MatrixXd gram = gram_matrix(kernel, built.rule.points);
            const Eigen::VectorXd z =
                kernel_mean_vector(kernel, embedding, built.rule.points);
            const SolveReport report =
                config.method == Method::BqExact
                    ? bq_weights_exact(gram, z)
                    : bq_weights_constrained(gram, z, 4.0 / static_cast<double>(n));
            built.rule.weights = report.weights;
            built.weight_sq_norm = report.weight_sq_norm;
            break;
          }
          case Method::GridBq: {
            const std::int64_t m = config.dim == 1 ? n : isqrt_floor(n);
            built.rule.points = regular_grid(m, config.dim);
            const Eigen::MatrixXd gram = gram_matrix(kernel, built.rule.points);
            const Eigen::VectorXd z =
                kernel_mean_vector(kernel, embedding, built.rule.points);
            const SolveReport report = bq_weights_exact(gram, z);
            built.rule.weights = report.weights;
            built.weight_sq_norm = report.weight_sq_norm;
            break;
          }
        }
        rec.abs_error = std::abs(estimate(built.rule, integrand) - integrand.true_integral);
        rec.wce = wce_eval(kernel, embedding, built.rule).e;
        rec.weight_sq_norm = built.weight_sq_norm;
        records.push_back(rec);
      } catch (const ConditioningError&) {
        // recorded as missing
      }
    }
  }
  return records;
}

void check_failure_rate(std::span<const ConvergenceRecord> records,
                        const ExperimentConfig& config) {
  const int expected = expected_replicates(config);
  std::map<std::int64_t, int> counts;
  for (const auto n : n_grid(config)) counts[n] = 0;
  for (const auto& rec : records) ++counts[rec.n];
  for (const auto& [n, count] : counts) {
    const int missing = expected - count;
    if (missing * 5 > expected)
      throw ConditioningError("more than 20% of replicates failed at n = " +
                              std::to_string(n) + " (" + std::to_string(missing) + "/" +
                              std::to_string(expected) + ")");
  }
}

RateFit aggregate_and_fit(std::span<const ConvergenceRecord> records,
                          std::int64_t n_min) {
  if (n_min < 1) throw std::invalid_argument("aggregate_and_fit: n_min >= 1 required");
  std::map<std::int64_t, std::pair<double, int>> groups;
  for (const auto& rec : records) {
    if (rec.n < n_min) continue;
    auto& [sum, count] = groups[rec.n];
    sum += rec.abs_error;
    ++count;
  }
  if (groups.size() < 2)
    throw std::invalid_argument(
        "aggregate_and_fit: need at least 2 distinct n values >= n_min");

  std::vector<double> xs, ys;
  xs.reserve(groups.size());
  ys.reserve(groups.size());
  for (const auto& [n, acc] : groups) {
    const double mean = acc.first / acc.second;
    if (!(mean > 0.0))
      throw std::invalid_argument("aggregate_and_fit: mean error at n = " +
                                  std::to_string(n) + " is not positive, cannot take log");
    xs.push_back(std::log2(static_cast<double>(n)));
    ys.push_back(std::log2(mean));
  }

  const auto count = static_cast<double>(xs.size());
  double x_bar = 0.0, y_bar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_bar += xs[i];
    y_bar += ys[i];
  }
  x_bar /= count;
  y_bar /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_bar) * (xs[i] - x_bar);
    sxy += (xs[i] - x_bar) * (ys[i] - y_bar);
  }

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_bar - fit.slope * x_bar;
  fit.n_min = n_min;
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

void export_table(std::span<const ConvergenceRecord> records,
                  const std::filesystem::path& path) {
  std::vector<ConvergenceRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tuple(static_cast<int>(a.method), a.n, a.replicate) <
           std::tuple(static_cast<int>(b.method), b.n, b.replicate);
  });
  std::string body(kCsvHeader);
  body += '\n';
  for (const auto& rec : sorted) append_csv_row(body, rec);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_table: cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("export_table: write failed on " + path.string());
}

std::vector<ConvergenceRecord> import_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("import_table: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("import_table: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::runtime_error("import_table: line 1: header mismatch");

  std::vector<ConvergenceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 10) row_error(line_no, "expected 10 fields");
    ConvergenceRecord rec;
    try {
      rec.method = method_from_string(fields[0]);
    } catch (const std::invalid_argument& err) {
      row_error(line_no, err.what());
    }
    rec.assumed_order = parse_integer<int>(fields[1], line_no, "assumed_order");
    rec.smoothness_s = parse_integer<int>(fields[2], line_no, "smoothness_s");
    rec.dim = parse_integer<int>(fields[3], line_no, "dim");
    rec.n = parse_integer<std::int64_t>(fields[4], line_no, "n");
    rec.replicate = parse_integer<int>(fields[5], line_no, "replicate");
    rec.seed = parse_integer<std::uint64_t>(fields[6], line_no, "seed");
    rec.abs_error = parse_double(fields[7], line_no, "abs_error");
    rec.wce = parse_double(fields[8], line_no, "wce");
    rec.weight_sq_norm = parse_double(fields[9], line_no, "weight_sq_norm");
    if (rec.dim < 1) row_error(line_no, "dim must be >= 1");
    if (rec.n < 1) row_error(line_no, "n must be >= 1");
    if (rec.replicate < 0) row_error(line_no, "replicate must be >= 0");
    if (rec.abs_error < 0.0) row_error(line_no, "abs_error must be >= 0");
    if (rec.wce < 0.0) row_error(line_no, "wce must be >= 0");
    records.push_back(rec);
  }
  return records;
}

double predicted_rate(double b, double c, double theta) {
  if (!(b > 0.0)) throw std::invalid_argument("predicted_rate: b > 0 required");
  if (!(c > 0.0 && c <= 0.5))
    throw std::invalid_argument("predicted_rate: c must lie in (0, 1/2]");
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("predicted_rate: theta must lie in (0, 1]");
  return theta * b - (0.5 - c) * (1.0 - theta);
}

double predicted_rate_sobolev(double b, double c, int s, int r) {
  if (s < 1 || r < 1)
    throw std::invalid_argument("predicted_rate_sobolev: s, r >= 1 required");
  if (s > r) throw std::invalid_argument("predicted_rate_sobolev: s <= r required");
  if (!(b > 0.0)) throw std::invalid_argument("predicted_rate_sobolev: b > 0 required");
  if (!(c > 0.0 && c <= 0.5))
    throw std::invalid_argument("predicted_rate_sobolev: c must lie in (0, 1/2]");
  const double ratio = static_cast<double>(s) / static_cast<double>(r);
  return b * ratio - (0.5 - c) * (1.0 - ratio);
}

TheoreticalRate make_theoretical_rate(double b, double c, double theta) {
  return {b, c, theta, predicted_rate(b, c, theta)};
}

double predicted_exponent(const ExperimentConfig& config) {
  switch (config.method) {
    case Method::Mc:
      return 0.5;
    case Method::LatticeShift:
    case Method::BqExact:
    case Method::BqConstrained: {
      const double theta =
          std::min(1.0, static_cast<double>(config.s) / static_cast<double>(config.alpha));
      return predicted_rate(config.alpha, 0.5, theta);
    }
    case Method::GridBq: {
      const int s = std::min(config.s, config.alpha);
      return predicted_rate_sobolev(static_cast<double>(config.alpha) / config.dim, 0.5, s,
                                    config.alpha);
    }
  }
  throw std::invalid_argument("predicted_exponent: unknown method");
}

}  // namespace kquad
