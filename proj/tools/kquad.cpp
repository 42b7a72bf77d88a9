// kquad: construct quadrature rules, evaluate worst-case errors, and run
// convergence benchmarks against Korobov and Matern RKHSs.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kquad/harness.hpp"
#include "kquad/kernels.hpp"
#include "kquad/point_set.hpp"
#include "kquad/wce.hpp"
#include "kquad/weights.hpp"

namespace {

using namespace kquad;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct RuleFile {
  PointSet points;
  std::vector<double> weights;
};

// Rule file: first line "n d", then n rows of d coordinates and a weight.
RuleFile load_rule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rule file " + path);
  std::int64_t n = 0;
  int d = 0;
  if (!(in >> n >> d) || n < 1 || d < 1)
    throw std::invalid_argument("rule file " + path + ": expected header 'n d'");
  RuleFile rule;
  rule.points.dim = d;
  rule.points.coords.resize(static_cast<std::size_t>(n) * d);
  rule.weights.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      if (!(in >> rule.points.coords[i * d + j]))
        throw std::invalid_argument("rule file " + path + ": truncated row " +
                                    std::to_string(i + 1));
    if (!(in >> rule.weights[i]))
      throw std::invalid_argument("rule file " + path + ": missing weight on row " +
                                  std::to_string(i + 1));
  }
  return rule;
}

GeneratorVector parse_lattice_spec(const std::string& spec, int alpha) {
  std::vector<std::int64_t> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("--lattice: cannot parse '" + item + "'");
    }
  }
  if (values.size() < 2)
    throw std::invalid_argument("--lattice: expected n,z1[,z2,...]");
  GeneratorVector gen{values[0], alpha, {values.begin() + 1, values.end()}};
  validate(gen);
  return gen;
}

int cmd_cbc(std::int64_t n, int d, int alpha, const std::string& out_path) {
  const auto gen = cbc_construct(n, d, alpha);
  save_generator(gen, out_path);
  const QuadratureRule rule{rank1_lattice(gen), uniform_weights(gen.n)};
  const auto report =
      wce_eval(KorobovKernel(alpha, d), EmbeddingSpec::korobov_closed_form(), rule);
  std::printf("wce=%.17g\n", report.e);
  return kExitOk;
}

int cmd_wce(const std::string& rule_path, const std::string& lattice_spec, int alpha,
            int d_flag, const std::string& weight_mode) {
  PointSet points;
  std::vector<double> weights;
  bool have_file_weights = false;

  if (!rule_path.empty()) {
    RuleFile file = load_rule_file(rule_path);
    points = std::move(file.points);
    weights = std::move(file.weights);
    have_file_weights = true;
  } else {
    points = rank1_lattice(parse_lattice_spec(lattice_spec, alpha));
  }
  if (d_flag > 0 && d_flag != points.dim)
    throw std::invalid_argument("--d disagrees with the point dimension");

  const Kernel kernel{KorobovKernel(alpha, points.dim)};
  const auto embedding = EmbeddingSpec::korobov_closed_form();
  const std::int64_t n = points.size();

  bool solved = false;
  SolveReport solve;
  if (weight_mode == "uniform") {
    weights = uniform_weights(n);
  } else if (weight_mode == "bq" || weight_mode == "bq-constrained") {
    const Eigen::MatrixXd gram = gram_matrix(kernel, points);
    const Eigen::VectorXd kmean = kernel_mean_vector(kernel, embedding, points);
    solve = weight_mode == "bq"
                ? bq_weights_exact(gram, kmean)
                : bq_weights_constrained(gram, kmean, 4.0 / static_cast<double>(n));
    weights = solve.weights;
    solved = true;
  } else if (weight_mode.empty()) {
    if (!have_file_weights) weights = uniform_weights(n);
  } else {
    throw std::invalid_argument("--weights must be uniform, bq, or bq-constrained");
  }

  const auto report = wce_eval(kernel, embedding, QuadratureRule{points, weights});
  std::printf("initial_sq=%.17g\n", report.initial_sq);
  std::printf("cross=%.17g\n", report.cross);
  std::printf("quad=%.17g\n", report.quad);
  std::printf("e=%.17g\n", report.e);
  if (solved) {
    std::printf("jitter_used=%.17g\n", solve.jitter_used);
    std::printf("lambda=%.17g\n", solve.lambda);
    std::printf("weight_sq_norm=%.17g\n", solve.weight_sq_norm);
  }
  return kExitOk;
}

int cmd_convergence(const std::string& config_path, const std::string& out_path) {
  const ExperimentConfig config = parse_config_file(config_path);
  const auto records = run_convergence(config);
  check_failure_rate(records, config);
  export_table(records, out_path);
  const RateFit fit = aggregate_and_fit(records, config.n_min_fit);
  std::printf("method=%s fitted_slope=%.6g intercept=%.6g predicted_exponent=%.6g\n",
              to_string(config.method).c_str(), fit.slope, fit.intercept,
              predicted_exponent(config));
  return kExitOk;
}

int cmd_fit(const std::string& in_path, std::int64_t n_min) {
  const auto records = import_table(in_path);
  std::map<std::tuple<int, int, int>, std::vector<ConvergenceRecord>> groups;
  for (const auto& rec : records)
    groups[{static_cast<int>(rec.method), rec.assumed_order, rec.smoothness_s}]
        .push_back(rec);
  if (groups.empty()) throw std::invalid_argument("fit: no records in " + in_path);
  for (const auto& [key, group] : groups) {
    const RateFit fit = aggregate_and_fit(group, n_min);
    std::printf("method=%s assumed_order=%d s=%d slope=%.17g intercept=%.17g "
                "points_used=%d\n",
                to_string(static_cast<Method>(std::get<0>(key))).c_str(),
                std::get<1>(key), std::get<2>(key), fit.slope, fit.intercept,
                fit.points_used);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel quadrature rules, worst-case errors, and convergence benchmarks"};
  app.require_subcommand(1);

  auto* cbc = app.add_subcommand("cbc", "component-by-component lattice construction");
  std::int64_t cbc_n = 0;
  int cbc_d = 1;
  int cbc_alpha = 1;
  std::string cbc_out;
  cbc->add_option("--n", cbc_n, "number of lattice points (prime)")->required();
  cbc->add_option("--d", cbc_d, "dimension")->required();
  cbc->add_option("--alpha", cbc_alpha, "Korobov smoothness order")->required();
  cbc->add_option("--out", cbc_out, "generator vector output path")->required();

  auto* wce = app.add_subcommand("wce", "worst-case error of a single rule");
  std::string wce_rule, wce_lattice, wce_weights;
  int wce_alpha = 1;
  int wce_d = 0;
  auto* rule_opt = wce->add_option("--rule", wce_rule, "rule file: 'n d' then rows of coordinates and weight");
  auto* lattice_opt =
      wce->add_option("--lattice", wce_lattice, "inline lattice 'n,z1[,z2,...]'");
  rule_opt->excludes(lattice_opt);
  wce->add_option("--alpha", wce_alpha, "Korobov smoothness order")->required();
  wce->add_option("--d", wce_d, "dimension (validated against the rule)");
  wce->add_option("--weights", wce_weights, "uniform | bq | bq-constrained");

  auto* conv = app.add_subcommand("convergence", "run a convergence experiment");
  std::string conv_config, conv_out;
  conv->add_option("--config", conv_config, "key=value experiment config")->required();
  conv->add_option("--out", conv_out, "CSV output path")->required();

  auto* fit = app.add_subcommand("fit", "fit log-log slopes from a CSV table");
  std::string fit_in;
  std::int64_t fit_n_min = 16;
  fit->add_option("--in", fit_in, "CSV produced by the convergence command")->required();
  fit->add_option("--n-min", fit_n_min, "smallest n used in the fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cbc->parsed()) return cmd_cbc(cbc_n, cbc_d, cbc_alpha, cbc_out);
    if (wce->parsed()) {
      if (wce_rule.empty() && wce_lattice.empty())
        throw std::invalid_argument("wce: need --rule or --lattice");
      return cmd_wce(wce_rule, wce_lattice, wce_alpha, wce_d, wce_weights);
    }
    if (conv->parsed()) return cmd_convergence(conv_config, conv_out);
    if (fit->parsed()) return cmd_fit(fit_in, fit_n_min);
  } catch (const kquad::ConditioningError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitNumerical;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  }
  return kExitUsage;
}
