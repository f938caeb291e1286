#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "celltree/bench.hpp"
#include "celltree/cli.hpp"
#include "celltree/lookahead.hpp"
#include "celltree/median_partition.hpp"
#include "celltree/randomized.hpp"
#include "celltree/risk_lab.hpp"

namespace py = pybind11;
using namespace celltree;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Matrix& X, const Labels& y) {
  if (X.ndim() != 2) throw std::invalid_argument("X must be a 2-d array");
  if (y.ndim() != 1 || y.shape(0) != X.shape(0))
    throw std::invalid_argument("y must be 1-d with one label per row of X");
  const auto n = static_cast<std::size_t>(X.shape(0));
  const auto d = static_cast<std::size_t>(X.shape(1));
  std::vector<double> coords(X.data(), X.data() + n * d);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = y.data()[i];
    if (v != 0 && v != 1) throw std::invalid_argument("labels must be 0 or 1");
    labels[i] = static_cast<Label>(v);
  }
  return Dataset(d, std::move(coords), std::move(labels));
}

py::array_t<std::uint8_t> predict(const PartitionTree& tree, const Matrix& X) {
  if (X.ndim() != 2 || static_cast<std::size_t>(X.shape(1)) != tree.dim())
    throw std::invalid_argument("X must have shape (m, d) with the tree's d");
  const auto m = static_cast<std::size_t>(X.shape(0));
  py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(m));
  auto* dst = out.mutable_data();
  const double* src = X.data();
  {
    py::gil_scoped_release release;
    for (std::size_t i = 0; i < m; ++i) dst[i] = tree.classify({src + i * tree.dim(), tree.dim()});
  }
  return out;
}

py::dict stats_dict(const PartitionTree& tree) {
  const TreeStats s = tree.stats();
  py::dict d;
  d["nodes"] = s.nodes;
  d["leaves"] = s.leaves;
  d["max_depth"] = s.max_depth;
  d["leaf_depths"] = s.leaf_depths;
  d["eaten"] = s.eaten;
  d["leaf_points"] = s.leaf_points;
  d["conserves"] = tree.conserves();
  return d;
}

RunOptions run_options(std::size_t workers) {
  RunOptions opt;
  opt.workers = workers;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_celltree, m) {
  m.doc() = "Cellular tree classifiers: randomized and lookahead median trees";
  m.attr("__version__") = cli::kVersion;

  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<UnknownDistribution>(m, "UnknownDistribution", PyExc_KeyError);

  py::class_<PartitionTree>(m, "Tree")
      .def_property_readonly("d", &PartitionTree::dim)
      .def_property_readonly("n", &PartitionTree::sample_size)
      .def_property_readonly("mode", [](const PartitionTree& t) { return std::string(to_string(t.mode())); })
      .def_property_readonly("algorithm",
                             [](const PartitionTree& t) { return std::string(to_string(t.config().algorithm)); })
      .def("predict", &predict, py::arg("X"))
      .def("depths",
           [](const PartitionTree& t, const Matrix& X) {
             std::vector<std::size_t> out;
             for (py::ssize_t i = 0; i < X.shape(0); ++i)
               out.push_back(t.route({X.data() + i * t.dim(), t.dim()}).depth);
             return out;
           },
           py::arg("X"))
      .def("stats", &stats_dict)
      .def("to_json", [](const PartitionTree& t) { return serialize(t); })
      .def_static("from_json", [](const std::string& s) { return deserialize(s); }, py::arg("text"))
      .def("__eq__", [](const PartitionTree& a, const PartitionTree& b) { return a == b; });

  m.def(
      "build_randomized",
      [](const Matrix& X, const Labels& y, double beta, std::uint64_t seed, std::size_t workers) {
        Dataset data = to_dataset(X, y);
        py::gil_scoped_release release;
        return build_randomized(data, RandomizedConfig(beta, seed), run_options(workers));
      },
      py::arg("X"), py::arg("y"), py::arg("beta") = 0.5, py::arg("seed") = 0,
      py::arg("workers") = 1);

  m.def(
      "build_lookahead",
      [](const Matrix& X, const Labels& y, double alpha, double beta, std::uint64_t seed,
         std::size_t workers) {
        Dataset data = to_dataset(X, y);
        LookaheadConfig cfg(alpha, beta, data.dim(), seed);
        py::gil_scoped_release release;
        return build_lookahead(data, cfg, run_options(workers));
      },
      py::arg("X"), py::arg("y"), py::arg("alpha") = 0.1, py::arg("beta") = 0.2,
      py::arg("seed") = 0, py::arg("workers") = 1);

  m.def("phi", &phi, py::arg("n"), py::arg("beta"));
  m.def("k_plus", &k_plus, py::arg("n"), py::arg("alpha"));
  m.def(
      "leaf_bounds",
      [](std::uint64_t n, std::size_t k, std::size_t d) {
        const LeafBounds b = leaf_bounds(n, k, d);
        return py::make_tuple(b.lo, b.hi);
      },
      py::arg("n"), py::arg("k"), py::arg("d"));
  m.def(
      "lookahead_error",
      [](const Matrix& X, const Labels& y, std::size_t k) {
        Dataset data = to_dataset(X, y);
        return lookahead_error(DataView::all(data), k);
      },
      py::arg("X"), py::arg("y"), py::arg("k"));

  m.def(
      "sample",
      [](const std::string& name, std::size_t n, std::uint64_t seed, std::size_t d, double p) {
        const Dataset data = make_distribution(name, {d, p}).sample(n, seed);
        Matrix X({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(data.dim())});
        std::copy(data.coords().begin(), data.coords().end(), X.mutable_data());
        Labels y(static_cast<py::ssize_t>(n));
        for (std::size_t i = 0; i < n; ++i) y.mutable_data()[i] = data.y(i);
        return py::make_tuple(X, y);
      },
      py::arg("name"), py::arg("n"), py::arg("seed") = 0, py::arg("d") = 2, py::arg("p") = 0.5);

  m.def(
      "bayes_risk",
      [](const std::string& name, std::size_t d, double p) {
        return make_distribution(name, {d, p}).bayes_risk();
      },
      py::arg("name"), py::arg("d") = 2, py::arg("p") = 0.5);

  m.def(
      "risk",
      [](const PartitionTree& tree, const std::string& name, std::uint64_t m_draws,
         std::uint64_t seed, double p, std::size_t workers) {
        const auto dist = make_distribution(name, {tree.dim(), p});
        py::gil_scoped_release release;
        const RiskEstimate r = empirical_risk(
            [&](std::span<const double> x) { return tree.classify(x); }, dist, m_draws, seed, workers);
        return std::pair<double, double>(r.mean, r.std_error);
      },
      py::arg("tree"), py::arg("dist"), py::arg("m") = 100000, py::arg("seed") = 0,
      py::arg("p") = 0.5, py::arg("workers") = 1);

  m.def(
      "risk_curve",
      [](const std::string& algorithm, const std::string& dist, std::vector<std::size_t> n_grid,
         std::size_t reps, std::uint64_t m_draws, double alpha, double beta, std::uint64_t seed,
         std::size_t d, double p, std::size_t workers) {
        BenchSpec spec;
        const auto algo = parse_algorithm(algorithm);
        if (!algo) throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
        spec.algorithm = *algo;
        spec.distribution = dist;
        spec.params = {d, p};
        spec.n_grid = std::move(n_grid);
        spec.reps = reps;
        spec.m = m_draws;
        spec.alpha = alpha;
        spec.beta = beta;
        spec.seed = seed;
        spec.workers = workers;
        std::vector<CurveRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_risk_curve(spec);
        }
        py::list out;
        for (const auto& r : aggregate_rows(rows)) {
          py::dict row;
          row["n"] = r.n;
          row["reps"] = r.reps;
          row["mean_risk"] = r.mean_risk;
          row["std_error"] = r.std_error;
          row["bayes_risk"] = r.bayes_risk;
          out.append(row);
        }
        return out;
      },
      py::arg("algorithm"), py::arg("dist"), py::arg("n_grid"), py::arg("reps") = 1,
      py::arg("m") = 100000, py::arg("alpha") = 0.1, py::arg("beta") = 0.2, py::arg("seed") = 0,
      py::arg("d") = 2, py::arg("p") = 0.5, py::arg("workers") = 1);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
