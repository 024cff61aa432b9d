// Python module: lattice, synthesis, retrieval, reconstruction, metrics and the experiment runner.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phaseless/error.hpp"
#include "phaseless/experiment.hpp"
#include "phaseless/io.hpp"
#include "phaseless/metrics.hpp"
#include "phaseless/recon.hpp"
#include "phaseless/retrieval.hpp"
#include "phaseless/synth.hpp"

namespace py = pybind11;
using namespace phaseless;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());  // copies
}

std::vector<Complex> to_complex(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<Complex>(a.data(), a.data() + a.size());
}

py::array_t<int> lattice_indices(const FrequencyLattice& lat) {
  const int md = dim(lat.m);
  py::array_t<int> out({static_cast<py::ssize_t>(lat.size()), static_cast<py::ssize_t>(md)});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (int j = 0; j < md; ++j) r(i, j) = lat.points[i].l[j];
  return out;
}

py::array_t<double> lattice_directions(const FrequencyLattice& lat) {
  const int md = dim(lat.m);
  py::array_t<double> out({static_cast<py::ssize_t>(lat.size()), static_cast<py::ssize_t>(md)});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (int j = 0; j < md; ++j) r(i, j) = lat.points[i].xhat[j];
  return out;
}

py::array_t<double> wavenumbers(const FrequencyLattice& lat) {
  std::vector<double> k;
  for (const auto& p : lat.points) k.push_back(p.k);
  return to_array(k);
}

SourceField source_by_name(const std::string& name, double a) {
  return SourceField::builtin(name, a);
}

py::dict row_dict(const SummaryRow& r) {
  py::dict d;
  d["eps"] = r.eps;
  d["N"] = r.N;
  d["seeds"] = r.seeds;
  d["farfield_l2"] = r.farfield_l2.mean;
  d["farfield_linf"] = r.farfield_linf.mean;
  d["stability_ratio_max"] = r.stability_ratio.max;
  d["stability_bound"] = r.stability_bound;
  if (r.has_source_error) {
    d["source_l2"] = r.source_l2.mean;
    d["source_linf"] = r.source_linf.mean;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_phaseless, mod) {
  mod.doc() = "Source reconstruction from multi-frequency phaseless far-field data";

  auto base = py::register_exception<phaseless::Error>(mod, "Error", PyExc_ValueError);
  py::register_exception<phaseless::ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<phaseless::DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<phaseless::DegenerateDataError>(mod, "DegenerateDataError", base.ptr());
  py::register_exception<phaseless::InvariantError>(mod, "InvariantError", base.ptr());

  mod.def("gamma", [](int m, double k) { return gamma(to_dimension(m), k); }, py::arg("m"), py::arg("k"));
  mod.def("stability_constant", &stability_constant, py::arg("eps"));
  mod.def("truncation_from_noise", &truncation_from_noise, py::arg("eps"));

  py::class_<FrequencyLattice>(mod, "Lattice")
      .def_property_readonly("N", [](const FrequencyLattice& l) { return l.N; })
      .def_property_readonly("a", [](const FrequencyLattice& l) { return l.a; })
      .def_property_readonly("m", [](const FrequencyLattice& l) { return dim(l.m); })
      .def_property_readonly("kstar", [](const FrequencyLattice& l) { return l.kstar; })
      .def_property_readonly("indices", &lattice_indices)
      .def_property_readonly("directions", &lattice_directions)
      .def_property_readonly("wavenumbers", &wavenumbers)
      .def("__len__", &FrequencyLattice::size);
  mod.def(
      "build_lattice",
      [](int m, int N, double a, double lambda) { return build_lattice(to_dimension(m), N, a, lambda); },
      py::arg("m"), py::arg("N"), py::arg("a") = 1.0, py::arg("lambda_") = kDefaultLambda);

  py::class_<MeasurementSet>(mod, "Measurements")
      .def_readonly("lattice", &MeasurementSet::lattice)
      .def_readonly("eps", &MeasurementSet::noise_eps)
      .def_readonly("seed", &MeasurementSet::seed)
      .def_property_readonly("u_abs",
                             [](const MeasurementSet& ms) {
                               std::vector<double> v;
                               for (const auto& d : ms.data) v.push_back(d.u_abs);
                               return to_array(v);
                             })
      .def_property_readonly("exact", [](const MeasurementSet& ms) -> py::object {
        if (ms.exact_u.empty()) return py::none();
        return to_array(ms.exact_u);
      });

  mod.def(
      "farfield",
      [](const std::string& source, const FrequencyLattice& lat) {
        const SourceField s = source_by_name(source, lat.a);
        return to_array(farfield_lattice(s, lat, QuadratureSpec::defaults(s)));
      },
      py::arg("source"), py::arg("lattice"), "Exact far field of a built-in source over the lattice.");

  mod.def(
      "synthesize",
      [](const std::string& source, int N, double eps, std::uint64_t seed, double a, const std::string& channels) {
        const SourceField s = source_by_name(source, a);
        const FrequencyLattice lat = build_lattice(s.dim(), N, a);
        const auto u = farfield_lattice(s, lat, QuadratureSpec::defaults(s));
        return measure(u, lat, eps, seed, true, parse_noise_channels(channels));
      },
      py::arg("source"), py::arg("N"), py::arg("eps") = 0.0, py::arg("seed") = 0, py::arg("a") = 1.0,
      py::arg("noise_channels") = "all");

  mod.def("retrieve", [](const MeasurementSet& ms) { return to_array(retrieve_all(ms).values()); },
          py::arg("measurements"), "Phased far field recovered from the moduli, lattice order.");

  py::class_<FourierModel>(mod, "FourierModel")
      .def_readonly("N", &FourierModel::N)
      .def_readonly("s0", &FourierModel::s0)
      .def("coefficient",
           [](const FourierModel& f, std::vector<int> l) {
             IVec v{};
             for (std::size_t j = 0; j < l.size() && j < 3; ++j) v[j] = l[j];
             return f.coefficient(v);
           })
      .def("__call__", [](const FourierModel& f, std::vector<double> x) {
        Vec v{};
        for (std::size_t j = 0; j < x.size() && j < 3; ++j) v[j] = x[j];
        return evaluate_model_at(f, v);
      });

  mod.def(
      "reconstruct",
      [](const FrequencyLattice& lat, const py::array_t<Complex, py::array::c_style | py::array::forcecast>& u) {
        const auto values = to_complex(u);
        return fourier_model(lat, values);
      },
      py::arg("lattice"), py::arg("u"));

  mod.def(
      "evaluate",
      [](const FourierModel& f, int resolution) {
        const GridValues g = evaluate_model(f, EvaluationGrid::over_domain(f.m, f.a, resolution));
        std::vector<py::ssize_t> shape(static_cast<std::size_t>(dim(f.m)), resolution);
        py::array_t<double> values(shape);
        std::copy(g.values.begin(), g.values.end(), values.mutable_data());
        return py::make_tuple(to_array(g.grid.axis()), values);
      },
      py::arg("model"), py::arg("resolution") = 201, "Real part on a uniform grid over D: (axis, values).");

  mod.def(
      "source_values",
      [](const std::string& source, int resolution, double a) {
        const SourceField s = source_by_name(source, a);
        const auto grid = EvaluationGrid::over_domain(s.dim(), a, resolution);
        const auto v = sample_on_grid([&s](const Vec& x) { return s(x); }, grid);
        std::vector<py::ssize_t> shape(static_cast<std::size_t>(dim(s.dim())), resolution);
        py::array_t<double> values(shape);
        std::copy(v.begin(), v.end(), values.mutable_data());
        return values;
      },
      py::arg("source"), py::arg("resolution") = 201, py::arg("a") = 1.0);

  mod.def(
      "relative_errors",
      [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& approx,
         const py::array_t<Complex, py::array::c_style | py::array::forcecast>& exact) {
        const auto a = to_complex(approx), e = to_complex(exact);
        const ErrorReport r = relative_errors(a, e);
        return py::make_tuple(r.rel_l2, r.rel_linf);
      },
      py::arg("approx"), py::arg("exact"), "(relative L2, relative sup) errors.");

  mod.def(
      "run_experiment",
      [](const std::string& config_text, const std::filesystem::path& out) {
        ExperimentConfig c = parse_config(config_text);
        c.out = out;
        const RunSummary s = run_experiment(c);
        py::list rows;
        for (const auto& r : s.rows) rows.append(row_dict(r));
        return py::make_tuple(s.manifest_sha256, rows);
      },
      py::arg("config"), py::arg("out"), "Runs a 'key = value' configuration; returns (manifest hash, rows).");

  mod.def("verify", [] {
    py::list out;
    for (const auto& c : verify_suite().checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  });

  mod.def("sha256", [](const std::string& s) { return sha256_hex(s); });
}
