#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kquad/harness.hpp"
#include "test_support.hpp"

using namespace kquad;
namespace kt = kquad::testing;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(Method method) {
  ExperimentConfig config;
  config.method = method;
  config.alpha = 2;
  config.s = 2;
  config.dim = 1;
  config.j_min = 4;
  config.j_max = 6;
  config.replicates = 3;
  config.seed = 7;
  config.n_min_fit = 16;
  return config;
}

}  // namespace

TEST_CASE("kernel-section integrands") {
  const auto f = make_integrand(1, 1, {0.3});
  CHECK(f.true_integral == 1.0);
  CHECK(f.eval(std::vector<double>{0.3}) ==
        doctest::Approx(1.0 + kPi * kPi / 3.0).epsilon(1e-14));

  const double numeric = kt::trapezoid01([&](double x) { return f.eval(std::vector<double>{x}); }, 10000);
  CHECK(std::abs(numeric - 1.0) <= 1e-6);

  const auto f2 = make_integrand(1, 2, {0.3, 0.3});
  const double diag = 1.0 + kPi * kPi / 3.0;
  CHECK(f2.eval(std::vector<double>{0.3, 0.3}) ==
        doctest::Approx(diag * diag).epsilon(1e-13));

  CHECK_THROWS_AS(make_integrand(7, 1, {0.3}), std::invalid_argument);
  CHECK_THROWS_AS(make_integrand(1, 2, {0.3}), std::invalid_argument);
}

TEST_CASE("power-section integrands integrate to one") {
  const auto f = make_power_section_integrand(1, 1, {0.3}, 2000);
  const double numeric =
      kt::trapezoid01([&](double x) { return f.eval(std::vector<double>{x}); }, 20000);
  CHECK(std::abs(numeric - f.true_integral) <= 1e-5);
  CHECK(f.smoothness_s == 1);

  const auto f2 = make_power_section_integrand(2, 2, {0.3, 0.6}, 200);
  CHECK(std::isfinite(f2.eval(std::vector<double>{0.1, 0.9})));
  CHECK_THROWS_AS(make_power_section_integrand(1, 2, {0.3}), std::invalid_argument);
}

TEST_CASE("matern-section integrands carry their numeric integral") {
  const auto f = make_matern_integrand(1, 1, {0.3}, 4096);
  CHECK(f.eval(std::vector<double>{0.3}) == 1.0);
  // oracle: int_0^1 e^{-|x-0.3|} dx = 2 - e^{-0.3} - e^{-0.7}
  const double expected = 2.0 - std::exp(-0.3) - std::exp(-0.7);
  CHECK(f.true_integral == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("theorem-1 rate arithmetic") {
  CHECK(predicted_rate(3.0, 0.25, 1.0) == 3.0);
  CHECK(predicted_rate(1.5, 0.5, 1.0) == 1.5);
  CHECK(predicted_rate(3.0, 0.5, 0.5) == 1.5);
  CHECK(predicted_rate(2.0, 0.25, 0.5) == 0.875);
  CHECK_THROWS_AS(predicted_rate(-1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(predicted_rate(1.0, 0.6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(predicted_rate(1.0, 0.5, 1.5), std::invalid_argument);

  const auto rate = make_theoretical_rate(2.0, 0.25, 0.5);
  CHECK(rate.exponent == 0.875);
}

TEST_CASE("theorem-2 rate arithmetic") {
  CHECK(predicted_rate_sobolev(2.5, 0.3, 4, 4) == 2.5);  // s = r collapses to b
  CHECK(predicted_rate_sobolev(2.0, 0.5, 2, 4) == 1.0);
  // b = r/d with c = 1/2 gives s/d
  CHECK(predicted_rate_sobolev(2.0, 0.5, 1, 2) == 1.0);
  CHECK(predicted_rate_sobolev(2.0, 0.5, 2, 4) == 2.0 / 2.0);
  CHECK_THROWS_AS(predicted_rate_sobolev(2.0, 0.5, 5, 4), std::invalid_argument);
}

TEST_CASE("config parsing") {
  std::stringstream good(
      "method=lattice-shift\nalpha=2\ns=1\nd=1\n"
      "j_min=4\nj_max=7\nreplicates=5\nseed=99\nn_min_fit=16\n");
  const auto config = parse_config(good);
  CHECK(config.method == Method::LatticeShift);
  CHECK(config.alpha == 2);
  CHECK(config.s == 1);
  CHECK(config.replicates == 5);
  CHECK(config.seed == 99);

  std::stringstream missing("method=mc\nalpha=2\n");
  CHECK_THROWS_AS(parse_config(missing), std::invalid_argument);

  std::stringstream unknown(
      "method=mc\nalpha=2\ns=1\nd=1\nj_min=4\nj_max=5\n"
      "replicates=2\nseed=1\nn_min_fit=16\nbogus=3\n");
  CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);

  std::stringstream hook(
      "method=mc\nalpha=2\ns=2\nd=1\nj_min=4\nj_max=5\n"
      "replicates=2\nseed=1\nn_min_fit=16\nintegrand=constant\n");
  CHECK(parse_config(hook).integrand == IntegrandKind::Constant);
}

TEST_CASE("n grid follows the method") {
  auto config = small_config(Method::Mc);
  CHECK(n_grid(config) == std::vector<std::int64_t>{16, 32, 64});
  config.method = Method::LatticeShift;
  CHECK(n_grid(config) == std::vector<std::int64_t>{17, 37, 67});
  config.method = Method::GridBq;
  CHECK(n_grid(config) == std::vector<std::int64_t>{16, 32, 64});
  config.dim = 2;
  CHECK(n_grid(config) == std::vector<std::int64_t>{16, 25, 64});  // m = 4, 5, 8
}

TEST_CASE("constant integrand is integrated exactly") {
  auto config = small_config(Method::Mc);
  config.integrand = IntegrandKind::Constant;
  for (const auto& rec : run_convergence(config)) CHECK(rec.abs_error == 0.0);
}

TEST_CASE("record bookkeeping") {
  auto config = small_config(Method::Mc);
  const auto records = run_convergence(config);
  REQUIRE(records.size() == 9);  // 3 n-values x 3 replicates
  for (const auto& rec : records) {
    CHECK(rec.method == Method::Mc);
    CHECK(rec.assumed_order == 2);
    CHECK(rec.seed == config.seed + static_cast<std::uint64_t>(rec.replicate));
    CHECK(rec.abs_error >= 0.0);
    CHECK(rec.wce >= 0.0);
    CHECK(rec.weight_sq_norm == 1.0 / static_cast<double>(rec.n));  // c = 1/2 exactly
  }
}

TEST_CASE("lattice-shift replaces targets with primes and keeps uniform norms") {
  auto config = small_config(Method::LatticeShift);
  const auto records = run_convergence(config);
  REQUIRE(!records.empty());
  for (const auto& rec : records) {
    CHECK(is_prime(rec.n));
    CHECK(rec.weight_sq_norm == 1.0 / static_cast<double>(rec.n));
  }
}

TEST_CASE("well-specified error is bounded by norm times wce") {
  // |P_n f - P f| <= ||f||_H e_n when f = k_s(., y) lies in the assumed space
  for (const Method method : {Method::Mc, Method::LatticeShift}) {
    auto config = small_config(method);
    const auto section = make_integrand(config.s, config.dim, {0.3});
    const auto records = run_convergence(config, section);
    const double norm_f = std::sqrt(kernel_diag(KorobovKernel(config.s, config.dim)));
    for (const auto& rec : records)
      CHECK(rec.abs_error <= norm_f * rec.wce + 1e-8);
  }
}

TEST_CASE("bq-constrained respects the 4/n budget") {
  auto config = small_config(Method::BqConstrained);
  config.alpha = 3;
  config.s = 2;
  config.j_max = 5;
  config.replicates = 2;
  const auto records = run_convergence(config);
  REQUIRE(!records.empty());
  for (const auto& rec : records)
    CHECK(rec.weight_sq_norm <= 4.0 / static_cast<double>(rec.n) * (1.0 + 1e-6));
}

TEST_CASE("grid-bq runs once per n with exact separation radii") {
  auto config = small_config(Method::GridBq);
  config.alpha = 3;  // Matern r = 3, nu = 5/2
  config.s = 2;
  config.j_min = 3;
  config.j_max = 4;
  const auto records = run_convergence(config);
  REQUIRE(records.size() == 2);  // replicates collapse to one
  for (const auto& rec : records) {
    const auto grid = regular_grid(rec.n, 1);
    CHECK(separation_radius(grid) == 1.0 / static_cast<double>(rec.n));
  }
}

TEST_CASE("runs are deterministic and exports byte-identical") {
  auto config = small_config(Method::LatticeShift);
  const auto a = run_convergence(config);
  const auto b = run_convergence(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].abs_error == b[i].abs_error);
    CHECK(a[i].wce == b[i].wce);
    CHECK(a[i].seed == b[i].seed);
  }
  const auto path_a = temp_file("kquad_det_a.csv");
  const auto path_b = temp_file("kquad_det_b.csv");
  export_table(a, path_a);
  export_table(b, path_b);
  CHECK(slurp(path_a) == slurp(path_b));
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
}

TEST_CASE("fit recovers exact power laws") {
  std::vector<ConvergenceRecord> records;
  const double scale = 3.25;
  for (const std::int64_t n : {16, 32, 64, 128}) {
    ConvergenceRecord rec;
    rec.n = n;
    rec.abs_error = scale * std::pow(static_cast<double>(n), -2.0);
    records.push_back(rec);
  }
  const auto fit = aggregate_and_fit(records, 16);
  CHECK(std::abs(fit.slope - (-2.0)) <= 1e-10);
  CHECK(std::abs(fit.intercept - std::log2(scale)) <= 1e-10);
  CHECK(fit.points_used == 4);
}

TEST_CASE("fit through two points") {
  std::vector<ConvergenceRecord> records(2);
  records[0].n = 16;
  records[0].abs_error = 0.1;
  records[1].n = 64;
  records[1].abs_error = 0.025;
  const auto fit = aggregate_and_fit(records, 1);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fit averages replicates per n") {
  std::vector<ConvergenceRecord> records(3);
  records[0].n = 16;
  records[0].abs_error = 0.1;
  records[1].n = 16;
  records[1].abs_error = 0.3;
  records[2].n = 32;
  records[2].abs_error = 0.1;
  const auto fit = aggregate_and_fit(records, 1);
  // mean 0.2 at n = 16
  const double expected_slope = std::log2(0.1 / 0.2);
  CHECK(fit.slope == doctest::Approx(expected_slope).epsilon(1e-12));
}

TEST_CASE("fit requires two usable n values") {
  std::vector<ConvergenceRecord> records(2);
  records[0].n = 16;
  records[0].abs_error = 0.1;
  records[1].n = 32;
  records[1].abs_error = 0.05;
  CHECK_THROWS_AS(aggregate_and_fit(records, 32), std::invalid_argument);
  CHECK_NOTHROW(aggregate_and_fit(records, 16));
}

TEST_CASE("csv round trip") {
  auto config = small_config(Method::Mc);
  config.j_max = 5;
  const auto records = run_convergence(config);
  const auto path = temp_file("kquad_roundtrip.csv");
  export_table(records, path);
  const auto back = import_table(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].method == records[i].method);
    CHECK(back[i].assumed_order == records[i].assumed_order);
    CHECK(back[i].smoothness_s == records[i].smoothness_s);
    CHECK(back[i].dim == records[i].dim);
    CHECK(back[i].n == records[i].n);
    CHECK(back[i].replicate == records[i].replicate);
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].abs_error == records[i].abs_error);
    CHECK(back[i].wce == records[i].wce);
    CHECK(back[i].weight_sq_norm == records[i].weight_sq_norm);
  }
  std::filesystem::remove(path);
}

TEST_CASE("empty export writes only the header") {
  const auto path = temp_file("kquad_empty.csv");
  export_table({}, path);
  CHECK(slurp(path) ==
        "method,assumed_order,smoothness_s,dim,n,replicate,seed,abs_error,wce,"
        "weight_sq_norm\n");
  CHECK(import_table(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("import rejects invalid rows with line numbers") {
  const auto path = temp_file("kquad_bad.csv");
  {
    std::ofstream out(path);
    out << "method,assumed_order,smoothness_s,dim,n,replicate,seed,abs_error,wce,"
           "weight_sq_norm\n";
    out << "mc,2,2,1,16,0,7,-0.25,0.1,0.0625\n";  // negative abs_error
  }
  try {
    import_table(path);
    FAIL("expected an exception");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << "method,assumed_order,smoothness_s,dim,n,replicate,seed,abs_error,wce,"
           "weight_sq_norm\n";
    out << "mc,2,2,1,16,0\n";  // too few fields
  }
  CHECK_THROWS_AS(import_table(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "not,the,right,header\n";
  }
  CHECK_THROWS_AS(import_table(path), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("failure-rate checks pass on complete runs") {
  auto config = small_config(Method::Mc);
  const auto records = run_convergence(config);
  CHECK_NOTHROW(check_failure_rate(records, config));
  // dropping a third of the replicates at one n trips the 20% rule
  std::vector<ConvergenceRecord> damaged(records.begin(), records.end());
  damaged.erase(damaged.begin());
  CHECK_THROWS_AS(check_failure_rate(damaged, config), ConditioningError);
}

TEST_CASE("predicted exponents per method") {
  auto config = small_config(Method::Mc);
  CHECK(predicted_exponent(config) == 0.5);

  config.method = Method::BqExact;
  config.alpha = 3;
  config.s = 2;
  CHECK(predicted_exponent(config) == doctest::Approx(2.0).epsilon(1e-12));

  config.s = 5;  // smoother than assumed: capped at the well-specified rate
  CHECK(predicted_exponent(config) == doctest::Approx(3.0).epsilon(1e-12));

  config.method = Method::GridBq;
  config.alpha = 3;
  config.s = 2;
  config.dim = 1;
  CHECK(predicted_exponent(config) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("method names round trip") {
  for (const Method m : {Method::Mc, Method::LatticeShift, Method::BqExact,
                         Method::BqConstrained, Method::GridBq})
    CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("bogus"), std::invalid_argument);
}
