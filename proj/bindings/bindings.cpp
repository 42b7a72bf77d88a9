#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <Eigen/Dense>

#include "kquad/harness.hpp"
#include "kquad/kernels.hpp"
#include "kquad/point_set.hpp"
#include "kquad/wce.hpp"
#include "kquad/weights.hpp"

namespace py = pybind11;
using namespace kquad;

namespace {

PointSet points_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("points must be a 2-d array (n, d)");
  const auto n = arr.shape(0);
  const auto d = arr.shape(1);
  if (n < 1 || d < 1) throw std::invalid_argument("points must be non-empty");
  PointSet ps{static_cast<int>(d), std::vector<double>(arr.data(), arr.data() + n * d)};
  return ps;
}

py::array_t<double> points_to_array(const PointSet& ps) {
  py::array_t<double> arr({ps.size(), static_cast<std::int64_t>(ps.dim)});
  std::copy(ps.coords.begin(), ps.coords.end(), arr.mutable_data());
  return arr;
}

std::vector<double> weights_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("weights must be a 1-d array");
  return {arr.data(), arr.data() + arr.shape(0)};
}

Eigen::MatrixXd matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
    throw std::invalid_argument("expected a square 2-d array");
  const auto n = arr.shape(0);
  Eigen::MatrixXd m(n, n);
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t j = 0; j < n; ++j) m(i, j) = arr.at(i, j);
  return m;
}

Eigen::VectorXd vector_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.shape(0));
}

EmbeddingSpec embedding_for(const Kernel& kernel, int resolution) {
  if (std::holds_alternative<MaternKernel>(kernel))
    return EmbeddingSpec::numeric(resolution);
  return EmbeddingSpec::korobov_closed_form();
}

ExperimentConfig config_from_kwargs(const std::string& method, int alpha, int s, int d,
                                    int j_min, int j_max, int replicates,
                                    std::uint64_t seed, std::int64_t n_min_fit) {
  ExperimentConfig config;
  config.method = method_from_string(method);
  config.alpha = alpha;
  config.s = s;
  config.dim = d;
  config.j_min = j_min;
  config.j_max = j_max;
  config.replicates = replicates;
  config.seed = seed;
  config.n_min_fit = n_min_fit;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kernel quadrature rules, worst-case errors, and convergence benchmarks";

  py::register_exception<ConditioningError>(m, "ConditioningError", PyExc_RuntimeError);

  py::class_<KorobovKernel>(m, "KorobovKernel")
      .def(py::init<int, int>(), py::arg("alpha"), py::arg("dim"))
      .def_readonly("alpha", &KorobovKernel::alpha)
      .def_readonly("dim", &KorobovKernel::dim);

  py::class_<PowerKernel>(m, "PowerKernel")
      .def(py::init<KorobovKernel, double, int>(), py::arg("base"), py::arg("theta"),
           py::arg("truncation") = 10000)
      .def_readonly("base", &PowerKernel::base)
      .def_readonly("theta", &PowerKernel::theta)
      .def_readonly("truncation", &PowerKernel::truncation);

  py::class_<MaternKernel>(m, "MaternKernel")
      .def(py::init<int, int, double>(), py::arg("r"), py::arg("dim"),
           py::arg("lengthscale") = 1.0)
      .def_readonly("r", &MaternKernel::r)
      .def_readonly("dim", &MaternKernel::dim)
      .def_readonly("lengthscale", &MaternKernel::lengthscale)
      .def_property_readonly("nu", &MaternKernel::nu);

  m.def("bernoulli_poly", &bernoulli_poly, py::arg("degree"), py::arg("x"));
  m.def("fractional_part", &fractional_part, py::arg("x"));
  m.def("korobov_eval_1d", &korobov_eval_1d, py::arg("alpha"), py::arg("x"), py::arg("y"));
  m.def("mercer_truncated", &mercer_truncated, py::arg("alpha"), py::arg("theta"),
        py::arg("n_terms"), py::arg("x"), py::arg("y"));
  m.def("mercer_tail_bound", &mercer_tail_bound, py::arg("alpha"), py::arg("theta"),
        py::arg("n_terms"));
  m.def(
      "kernel_eval",
      [](const Kernel& kernel, const std::vector<double>& x, const std::vector<double>& y) {
        return kernel_eval(kernel, x, y);
      },
      py::arg("kernel"), py::arg("x"), py::arg("y"));

  py::class_<GeneratorVector>(m, "GeneratorVector")
      .def(py::init([](std::int64_t n, int alpha, std::vector<std::int64_t> z) {
             GeneratorVector gen{n, alpha, std::move(z)};
             validate(gen);
             return gen;
           }),
           py::arg("n"), py::arg("alpha"), py::arg("z"))
      .def_readonly("n", &GeneratorVector::n)
      .def_readonly("alpha", &GeneratorVector::alpha)
      .def_readonly("z", &GeneratorVector::z);

  m.def("is_prime", &is_prime, py::arg("n"));
  m.def("next_prime_at_least", &next_prime_at_least, py::arg("n"));
  m.def(
      "sample_iid_uniform",
      [](std::int64_t n, int d, std::uint64_t seed) {
        return points_to_array(sample_iid_uniform(n, d, seed));
      },
      py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def(
      "rank1_lattice",
      [](const GeneratorVector& gen) { return points_to_array(rank1_lattice(gen)); },
      py::arg("generator"));
  m.def("lattice_wce_sq", &lattice_wce_sq, py::arg("generator"), py::arg("alpha"));
  m.def("cbc_construct", &cbc_construct, py::arg("n"), py::arg("d"), py::arg("alpha"));
  m.def(
      "random_shift",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         std::uint64_t seed) {
        return points_to_array(random_shift(points_from_array(points), seed));
      },
      py::arg("points"), py::arg("seed"));
  m.def(
      "shift_by",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         const std::vector<double>& delta) {
        return points_to_array(shift_by(points_from_array(points), delta));
      },
      py::arg("points"), py::arg("delta"));
  m.def(
      "regular_grid",
      [](std::int64_t mm, int d) { return points_to_array(regular_grid(mm, d)); },
      py::arg("m"), py::arg("d"));
  m.def(
      "separation_radius",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
        return separation_radius(points_from_array(points));
      },
      py::arg("points"));
  m.def(
      "diameter",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
        return diameter(points_from_array(points));
      },
      py::arg("points"));
  m.def("save_generator", &save_generator, py::arg("generator"), py::arg("path"));
  m.def("load_generator", &load_generator, py::arg("path"));

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("weights", &SolveReport::weights)
      .def_readonly("jitter_used", &SolveReport::jitter_used)
      .def_readonly("lambda_", &SolveReport::lambda)
      .def_readonly("weight_sq_norm", &SolveReport::weight_sq_norm);

  m.def("uniform_weights", &uniform_weights, py::arg("n"));
  m.def(
      "bq_weights_exact",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& gram,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& kmean) {
        return bq_weights_exact(matrix_from_array(gram), vector_from_array(kmean));
      },
      py::arg("gram"), py::arg("kmean"));
  m.def(
      "bq_weights_constrained",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& gram,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& kmean,
         double bound) {
        return bq_weights_constrained(matrix_from_array(gram), vector_from_array(kmean),
                                      bound);
      },
      py::arg("gram"), py::arg("kmean"), py::arg("bound"));

  py::class_<WceReport>(m, "WceReport")
      .def_readonly("initial_sq", &WceReport::initial_sq)
      .def_readonly("cross", &WceReport::cross)
      .def_readonly("quad", &WceReport::quad)
      .def_readonly("e", &WceReport::e);

  m.def(
      "gram_matrix",
      [](const Kernel& kernel,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
        const Eigen::MatrixXd gram = gram_matrix(kernel, points_from_array(points));
        py::array_t<double> out({gram.rows(), gram.cols()});
        for (Eigen::Index i = 0; i < gram.rows(); ++i)
          for (Eigen::Index j = 0; j < gram.cols(); ++j) out.mutable_at(i, j) = gram(i, j);
        return out;
      },
      py::arg("kernel"), py::arg("points"));
  m.def(
      "kernel_mean_numeric",
      [](const MaternKernel& kernel, const std::vector<double>& y, int resolution) {
        return kernel_mean_numeric(kernel, y, resolution);
      },
      py::arg("kernel"), py::arg("y"), py::arg("resolution") = 2048);
  m.def(
      "wce_eval",
      [](const Kernel& kernel,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& weights,
         int resolution) {
        const QuadratureRule rule{points_from_array(points), weights_from_array(weights)};
        return wce_eval(kernel, embedding_for(kernel, resolution), rule);
      },
      py::arg("kernel"), py::arg("points"), py::arg("weights"),
      py::arg("resolution") = 2048);
  m.def(
      "wce_bruteforce",
      [](const Kernel& kernel,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& weights,
         int resolution) {
        const QuadratureRule rule{points_from_array(points), weights_from_array(weights)};
        return wce_bruteforce(kernel, embedding_for(kernel, resolution), rule);
      },
      py::arg("kernel"), py::arg("points"), py::arg("weights"),
      py::arg("resolution") = 2048);

  py::class_<ConvergenceRecord>(m, "ConvergenceRecord")
      .def_property_readonly("method",
                             [](const ConvergenceRecord& r) { return to_string(r.method); })
      .def_readonly("assumed_order", &ConvergenceRecord::assumed_order)
      .def_readonly("smoothness_s", &ConvergenceRecord::smoothness_s)
      .def_readonly("dim", &ConvergenceRecord::dim)
      .def_readonly("n", &ConvergenceRecord::n)
      .def_readonly("replicate", &ConvergenceRecord::replicate)
      .def_readonly("seed", &ConvergenceRecord::seed)
      .def_readonly("abs_error", &ConvergenceRecord::abs_error)
      .def_readonly("wce", &ConvergenceRecord::wce)
      .def_readonly("weight_sq_norm", &ConvergenceRecord::weight_sq_norm);

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("n_min", &RateFit::n_min)
      .def_readonly("points_used", &RateFit::points_used);

  m.def(
      "run_convergence",
      [](const std::string& method, int alpha, int s, int d, int j_min, int j_max,
         int replicates, std::uint64_t seed, std::int64_t n_min_fit) {
        return run_convergence(config_from_kwargs(method, alpha, s, d, j_min, j_max,
                                                  replicates, seed, n_min_fit));
      },
      py::arg("method"), py::arg("alpha"), py::arg("s"), py::arg("d"),
      py::arg("j_min") = 4, py::arg("j_max") = 10, py::arg("replicates") = 20,
      py::arg("seed") = 0, py::arg("n_min_fit") = 16);
  m.def(
      "aggregate_and_fit",
      [](const std::vector<ConvergenceRecord>& records, std::int64_t n_min) {
        return aggregate_and_fit(records, n_min);
      },
      py::arg("records"), py::arg("n_min") = 16);
  m.def(
      "export_table",
      [](const std::vector<ConvergenceRecord>& records, const std::filesystem::path& path) {
        export_table(records, path);
      },
      py::arg("records"), py::arg("path"));
  m.def("import_table", &import_table, py::arg("path"));

  m.def("predicted_rate", &predicted_rate, py::arg("b"), py::arg("c"), py::arg("theta"));
  m.def("predicted_rate_sobolev", &predicted_rate_sobolev, py::arg("b"), py::arg("c"),
        py::arg("s"), py::arg("r"));
}
