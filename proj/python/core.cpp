#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spacinglab/ensembles.hpp"
#include "spacinglab/experiment.hpp"
#include "spacinglab/gap.hpp"
#include "spacinglab/kernels.hpp"
#include "spacinglab/spacing.hpp"

namespace py = pybind11;
using namespace spacinglab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

ensembles::Potential potential_from(Beta beta, const std::optional<std::vector<double>>& coefficients) {
  return coefficients ? ensembles::Potential(*coefficients) : ensembles::Potential::semicircle(beta);
}

spacing::RescaledSpectrum window_of(std::vector<double> inside, double rescaled_length) {
  if (!(rescaled_length > 0.0)) throw std::invalid_argument("rescaled_length must be positive");
  spacing::RescaledSpectrum rs;
  rs.window = spacing::Window{0.0, rescaled_length / 2, 1.0, 1};
  rs.inside = std::move(inside);
  return rs;
}

// json <-> Python through text; the documents are small.
py::object to_python(const experiment::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
experiment::json from_python(const py::object& o) {
  return experiment::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bulk eigenvalue spacing toolkit";
  m.attr("__version__") = SPACINGLAB_VERSION;

  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def(
      "gap",
      [](int beta, double s, const std::string& method) {
        return experiment::gap_value(beta_from_int(beta), s, experiment::gap_method_from_string(method));
      },
      py::arg("beta"), py::arg("s"), py::arg("method") = "painleve", "Gap probability G_beta(s).");
  m.def("fredholm_g2", &gap::fredholm_g2, py::arg("s"), py::arg("n") = 40);
  m.def(
      "series_gap",
      [](int beta, double s, int k_max, int nodes) { return gap::series_gap(beta_from_int(beta), s, k_max, nodes); },
      py::arg("beta"), py::arg("s"), py::arg("k_max") = 4, py::arg("nodes_per_dim") = 12);

  m.def(
      "correlation", [](int beta, std::vector<double> x) { return kernels::correlation(beta_from_int(beta), x); },
      py::arg("beta"), py::arg("points"));
  m.def(
      "correlation_expansion",
      [](int beta, std::vector<double> x) { return kernels::correlation_expansion(beta_from_int(beta), x); },
      py::arg("beta"), py::arg("points"));
  m.def(
      "pfaffian",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> a) {
        if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("pfaffian: square matrix expected");
        const auto n = static_cast<int>(a.shape(0));
        auto r = a.unchecked<2>();
        kernels::SkewMatrix mat(n);
        for (int i = 0; i < n; ++i) {
          if (r(i, i) != 0.0) throw std::invalid_argument("pfaffian: matrix is not skew-symmetric");
          for (int j = i + 1; j < n; ++j) {
            if (r(i, j) != -r(j, i)) throw std::invalid_argument("pfaffian: matrix is not skew-symmetric");
            mat.set(i, j, r(i, j));
          }
        }
        return kernels::pfaffian(mat);
      },
      py::arg("matrix"));

  py::class_<gap::UniversalSpacingCDF>(m, "UniversalSpacingCDF")
      .def_property_readonly("beta", [](const gap::UniversalSpacingCDF& c) { return to_int(c.beta); })
      .def_property_readonly("s", [](const gap::UniversalSpacingCDF& c) { return to_array(c.s); })
      .def_property_readonly("F", [](const gap::UniversalSpacingCDF& c) { return to_array(c.F); })
      .def_property_readonly("tail", [](const gap::UniversalSpacingCDF& c) { return to_array(c.tail); })
      .def_property_readonly("nodes", [](const gap::UniversalSpacingCDF& c) { return to_array(c.nodes); })
      .def_readonly("M", &gap::UniversalSpacingCDF::M)
      .def("__call__", &gap::UniversalSpacingCDF::operator(), py::arg("s"))
      .def("quantile", &gap::UniversalSpacingCDF::quantile, py::arg("p"));
  m.def(
      "universal_cdf",
      [](int beta, double s_max, int M) { return experiment::build_universal(beta_from_int(beta), s_max, M); },
      py::arg("beta"), py::arg("s_max") = 8.0, py::arg("M") = 50);

  m.def(
      "sample",
      [](int beta, int n, std::uint64_t seed, std::uint64_t stream, const std::string& sampler,
         std::optional<std::vector<double>> coefficients) {
        const Beta b = beta_from_int(beta);
        const ensembles::EnsembleSpec spec{b, n, potential_from(b, coefficients)};
        ensembles::SamplerState state(seed, stream);
        if (sampler == "tridiagonal") return to_array(ensembles::sample_tridiagonal(spec, state).values);
        if (sampler == "dense") return to_array(ensembles::sample_dense_goe(spec, state).values);
        throw std::invalid_argument("sample: sampler must be tridiagonal or dense");
      },
      py::arg("beta"), py::arg("n"), py::arg("seed") = 20261015, py::arg("stream") = 0,
      py::arg("sampler") = "tridiagonal", py::arg("coefficients") = py::none());
  m.def(
      "sample_mcmc",
      [](int beta, int n, std::size_t samples, std::size_t burn_in, std::size_t thin, std::uint64_t seed,
         std::uint64_t stream, std::optional<std::vector<double>> coefficients) {
        const Beta b = beta_from_int(beta);
        const ensembles::EnsembleSpec spec{b, n, potential_from(b, coefficients)};
        ensembles::SamplerState state(seed, stream);
        std::vector<double> flat;
        const auto report = ensembles::sample_mcmc(spec, state, {burn_in + samples * thin, burn_in, thin, 50},
                                                   [&](const ensembles::Spectrum& s) {
                                                     flat.insert(flat.end(), s.values.begin(), s.values.end());
                                                   });
        py::array_t<double> out({static_cast<py::ssize_t>(report.emitted), static_cast<py::ssize_t>(n)});
        std::copy(flat.begin(), flat.end(), out.mutable_data());
        return py::make_tuple(out, report.acceptance, report.warnings);
      },
      py::arg("beta"), py::arg("n"), py::arg("samples"), py::arg("burn_in") = 2000, py::arg("thin") = 10,
      py::arg("seed") = 20261015, py::arg("stream") = 0, py::arg("coefficients") = py::none());

  m.def(
      "identity_check",
      [](std::vector<double> inside, double rescaled_length) {
        const auto r = spacing::alternating_identity_check(window_of(std::move(inside), rescaled_length));
        py::list violations;
        for (const auto& v : r.violations) {
          std::ostringstream sigma, alt;
          sigma << v.sigma_count;
          alt << v.alternating_sum;
          violations.append(py::dict(py::arg("s") = v.s, py::arg("cutoff") = v.cutoff,
                                     py::arg("sigma_count") = py::int_(py::str(sigma.str())),
                                     py::arg("alternating_sum") = py::int_(py::str(alt.str()))));
        }
        return py::dict(py::arg("ok") = r.ok, py::arg("jump_points") = r.jump_points, py::arg("violations") = violations);
      },
      py::arg("inside"), py::arg("rescaled_length"));
  m.def(
      "ks_bound",
      [](std::vector<double> inside, double rescaled_length, const gap::UniversalSpacingCDF& F) {
        const auto r = spacing::ks_node_distance(spacing::sigma_cdf(window_of(std::move(inside), rescaled_length)), F);
        return py::dict(py::arg("node_max") = r.node_max, py::arg("inverse_m") = r.inverse_m,
                        py::arg("mass_defect") = r.mass_defect, py::arg("bound") = r.bound);
      },
      py::arg("inside"), py::arg("rescaled_length"), py::arg("cdf"));

  m.def(
      "config_hash", [](const py::object& config) { return experiment::config_hash(experiment::config_from_json(from_python(config))); },
      py::arg("config"));
  m.def(
      "run_verify",
      [](const py::object& config) {
        auto c = experiment::config_from_json(from_python(config));
        experiment::RunResult r;
        {
          py::gil_scoped_release release;
          r = experiment::run_verify(c);
        }
        if (!r.complete) throw NumericError("verify failed: " + r.error);
        return to_python(r.summary);
      },
      py::arg("config"), "Runs the verify pipeline and returns the summary document.");
}
