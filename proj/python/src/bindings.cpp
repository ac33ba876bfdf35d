#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geoknn/geoknn.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> flat_rows(const Array& a, std::size_t width) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(1)) != width) {
    throw geoknn::InvalidArgument("expected an (n, " + std::to_string(width) + ") array");
  }
  return {a.data(), a.data() + a.size()};
}

std::vector<geoknn::Point> points_from(const Array& a, std::size_t width) {
  const auto flat = flat_rows(a, width);
  std::vector<geoknn::Point> out;
  out.reserve(flat.size() / std::max<std::size_t>(width, 1));
  for (std::size_t i = 0; i < flat.size(); i += width) {
    out.emplace_back(std::vector<double>(flat.begin() + i, flat.begin() + i + width));
  }
  return out;
}

Array to_array(const geoknn::SampleSet& s) {
  Array out({s.size(), s.stride()});
  std::copy(s.flat().begin(), s.flat().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_geoknn, m) {
  m.doc() = "kNN kernel density estimation on Riemannian manifolds";

  py::register_exception<geoknn::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<geoknn::DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<geoknn::DegenerateBandwidth>(m, "DegenerateBandwidth", PyExc_ArithmeticError);
  py::register_exception<geoknn::ContractError>(m, "ContractError", PyExc_ValueError);

  py::class_<geoknn::Manifold>(m, "Manifold")
      .def_static("euclidean", &geoknn::Manifold::euclidean, py::arg("d"))
      .def_static("sphere", &geoknn::Manifold::sphere, py::arg("radius") = 1.0)
      .def_static("cylinder", &geoknn::Manifold::cylinder)
      .def_static("parse", &geoknn::Manifold::parse, py::arg("text"))
      .def_property_readonly("dim", &geoknn::Manifold::dim)
      .def_property_readonly("ambient_dim", &geoknn::Manifold::ambient_dim)
      .def_property_readonly("injectivity_radius", &geoknn::Manifold::injectivity_radius)
      .def_property_readonly("scalar_curvature", &geoknn::Manifold::scalar_curvature)
      .def("distance",
           [](const geoknn::Manifold& self, std::vector<double> p, std::vector<double> q) {
             return geoknn::distance(self, p, q);
           })
      .def("volume_density",
           [](const geoknn::Manifold& self, std::vector<double> p, std::vector<double> q) {
             return geoknn::volume_density(self, p, q);
           })
      .def("__repr__", [](const geoknn::Manifold& self) { return "Manifold(" + self.describe() + ")"; });

  m.def(
      "knn_distance",
      [](const geoknn::Manifold& manifold, const Array& sample, const Array& queries, std::size_t k) {
        const geoknn::SampleSet s(manifold, flat_rows(sample, manifold.ambient_dim()));
        const auto q = points_from(queries, manifold.ambient_dim());
        return geoknn::knn_distance_batch(s, q, k);
      },
      py::arg("manifold"), py::arg("sample"), py::arg("queries"), py::arg("k"));

  m.def(
      "estimate",
      [](const geoknn::Manifold& manifold, const Array& sample, const Array& queries, std::size_t k,
         const std::string& estimator, double h, const std::string& scaling) {
        const geoknn::SampleSet s(manifold, flat_rows(sample, manifold.ambient_dim()));
        const auto q = points_from(queries, manifold.ambient_dim());
        geoknn::EstimatorConfig cfg;
        cfg.kind = geoknn::parse_estimator_kind(estimator);
        cfg.k = k;
        cfg.h = h;
        cfg.scaling = geoknn::parse_kernel_scaling(scaling);
        const auto eval = geoknn::evaluate_grid(s, q, cfg);
        std::vector<double> values;
        values.reserve(eval.estimates.size());
        for (const auto& e : eval.estimates) values.push_back(e.value);
        return values;
      },
      py::arg("manifold"), py::arg("sample"), py::arg("queries"), py::arg("k") = 0, py::arg("estimator") = "knn",
      py::arg("h") = 0.0, py::arg("scaling") = "normalized",
      "Density estimates at the query rows; NaN where the bandwidth degenerates.");

  m.def(
      "sample_model",
      [](const std::string& model, std::size_t n, std::uint64_t seed, double kappa) {
        const auto mod = geoknn::model_by_name(model, kappa);
        geoknn::Rng rng = geoknn::substream(seed, 0);
        return to_array(mod->sample(rng, n));
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("kappa") = 0.0);

  m.def(
      "model_density",
      [](const std::string& model, const Array& points, double kappa) {
        const auto mod = geoknn::model_by_name(model, kappa);
        std::vector<double> out;
        for (const auto& p : points_from(points, mod->manifold().ambient_dim())) out.push_back(mod->density(p));
        return out;
      },
      py::arg("model"), py::arg("points"), py::arg("kappa") = 0.0);

  m.def("radial_normalization",
        [](int d) { return geoknn::radial_normalization(geoknn::quadratic_kernel(), d); }, py::arg("d"));
  m.def("squared_integral",
        [](int d) { return geoknn::squared_integral(geoknn::quadratic_kernel(), d); }, py::arg("d"));
  m.def("second_moment", [](int d) { return geoknn::second_moment(geoknn::quadratic_kernel(), d); }, py::arg("d"));
  m.def("default_jitter_scale", &geoknn::default_jitter_scale, py::arg("n"));

  m.def(
      "sweep",
      [](const std::string& model, std::size_t n, std::size_t replications, std::vector<std::size_t> k_grid,
         std::uint64_t seed, const std::string& scaling, const std::string& mode, double kappa) {
        geoknn::ExperimentConfig cfg;
        cfg.model = model;
        cfg.kappa = kappa;
        cfg.n = n;
        cfg.replications = replications;
        cfg.k_grid = std::move(k_grid);
        cfg.root_seed = seed;
        cfg.scaling = geoknn::parse_kernel_scaling(scaling);
        cfg.mode = geoknn::parse_evaluation_mode(mode);
        const auto result = geoknn::run_sweep(cfg);
        py::list rows;
        for (const auto& a : result.per_k) {
          py::dict row;
          row["k"] = a.k;
          row["mean_mse"] = a.mean_mse;
          row["mean_medse"] = a.mean_medse;
          row["used"] = a.used;
          row["excluded"] = a.excluded;
          rows.append(row);
        }
        return rows;
      },
      py::arg("model"), py::arg("n"), py::arg("replications"), py::arg("k_grid"), py::arg("seed") = 0,
      py::arg("scaling") = "normalized", py::arg("mode") = "plugin", py::arg("kappa") = 0.0);
}
