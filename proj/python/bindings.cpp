// Python module _hidsym: catalogs, structure evaluation, symmetry checks,
// integration and the scenario runner. Arrays are numpy float64.

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hidsym/dynamics.hpp"
#include "hidsym/electromagnetic.hpp"
#include "hidsym/scenario.hpp"

namespace py = pybind11;
using namespace hidsym;

namespace {

// pybind11 holders cannot be shared_ptr<const T>; the structures are immutable anyway.
using Handle = std::shared_ptr<PhaseStructure>;

Handle handle(StructurePtr s) { return std::const_pointer_cast<PhaseStructure>(std::move(s)); }

PhasePoint make_point(const Vec4& x, const Vec3& v) {
  PhasePoint p;
  p.x = x;
  p.v = v;
  return p;
}

py::dict report_dict(const ResidualReport& r) {
  return py::module_::import("json").attr("loads")(to_json(r).dump());
}

}  // namespace

PYBIND11_MODULE(_hidsym, m) {
  m.doc() = "Contact phase structure of a test particle: hidden symmetries, checks and integration";

  py::register_exception<Error>(m, "HidsymError");
  py::register_exception<ParameterError>(m, "ParameterError", m.attr("HidsymError"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("HidsymError"));
  py::register_exception<TimelikeViolation>(m, "TimelikeViolation", m.attr("HidsymError"));
  py::register_exception<DomainError>(m, "DomainError", m.attr("HidsymError"));
  py::register_exception<ClosednessError>(m, "ClosednessError", m.attr("HidsymError"));

  py::class_<ScaleConstants>(m, "ScaleConstants")
      .def(py::init([](double c0, double hbar0, double mass, double q) {
             ScaleConstants s{c0, hbar0, mass, q};
             s.validate();
             return s;
           }),
           py::arg("c0") = 1.0, py::arg("hbar0") = 1.0, py::arg("m") = 1.0, py::arg("q") = 0.0)
      .def_readonly("c0", &ScaleConstants::c0)
      .def_readonly("hbar0", &ScaleConstants::hbar0)
      .def_readonly("m", &ScaleConstants::m)
      .def_readonly("q", &ScaleConstants::q);

  py::class_<SpacetimeMetric>(m, "Metric")
      .def_property_readonly("name", &SpacetimeMetric::name)
      .def_property_readonly("params", &SpacetimeMetric::params)
      .def("g", &SpacetimeMetric::g, py::arg("x"))
      .def("ginv", &SpacetimeMetric::ginv, py::arg("x"))
      .def("in_domain", &SpacetimeMetric::in_domain, py::arg("x"))
      .def("christoffel", [](const SpacetimeMetric& g, const Vec4& x) { return christoffel_symbols(g, x); },
           py::arg("x"), "Gamma[nu](lambda, mu)")
      .def("killing_fields", [](const SpacetimeMetric& g) { return killing_field_names(g); });

  m.def("metric", &metric_catalog, py::arg("name"), py::arg("params") = Params{});

  py::class_<SymmetricMultivectorField>(m, "MultivectorField")
      .def_property_readonly("name", &SymmetricMultivectorField::name)
      .def_property_readonly("degree", &SymmetricMultivectorField::degree)
      .def("components",
           [](const SymmetricMultivectorField& K, const Vec4& x) {
             const MultiIndexArray c = K.components(x);
             std::vector<double> flat(c.data().begin(), c.data().end());
             return py::array_t<double>(c.dims(), flat.data());
           },
           py::arg("x"))
      .def("pi_star", [](const SymmetricMultivectorField& K, const Vec4& x, const Vec4& p) { return pi_star(K, x, p); },
           py::arg("x"), py::arg("p"))
      .def("killing_residual",
           [](const SymmetricMultivectorField& K, const SpacetimeMetric& g, const Vec4& x) {
             return killing_residual(K, g, x).max_abs();
           },
           py::arg("metric"), py::arg("x"));

  m.def("killing_field", &killing_field, py::arg("metric"), py::arg("name"), py::arg("scales") = ScaleConstants{});
  m.def("polynomial_field", &polynomial_field, py::arg("degree"), py::arg("seed"), py::arg("scale") = 0.1);
  m.def("schouten", &schouten_sym_field, py::arg("K"), py::arg("L"));

  py::class_<EMField>(m, "EMField")
      .def_property_readonly("name", &EMField::name)
      .def("F", &EMField::F, py::arg("x"))
      .def("closedness_residual", &EMField::closedness_residual, py::arg("x"));
  m.def("em_field", &em_field_catalog, py::arg("name"), py::arg("params"), py::arg("metric"));

  py::class_<PhaseStructure, Handle>(m, "Structure")
      .def_property_readonly("description", &PhaseStructure::description)
      .def("admissible", [](const PhaseStructure& s, const Vec4& x, const Vec3& v) { return s.admissible(make_point(x, v)); },
           py::arg("x"), py::arg("v"))
      .def("evaluate",
           [](const PhaseStructure& s, const Vec4& x, const Vec3& v) {
             const StructureEvaluation e = s.evaluate(make_point(x, v));
             py::dict d;
             d["tau_hat"] = e.tau_hat;
             d["Omega"] = e.Omega;
             d["gamma_hat"] = e.gamma_hat;
             d["Lambda"] = e.Lambda;
             return d;
           },
           py::arg("x"), py::arg("v"))
      .def("contact_pair",
           [](const PhaseStructure& s, const Vec4& x, const Vec3& v) {
             const ContactPairReport r = verify_contact_pair(s, make_point(x, v));
             py::dict d;
             d["omega_exact"] = r.omega_exact;
             d["volume_form"] = r.volume_form;
             d["duality"] = r.duality.max();
             return d;
           },
           py::arg("x"), py::arg("v"))
      .def("sample", [](const PhaseStructure& s, std::size_t count, std::uint64_t seed) {
             SampleSpec spec;
             spec.count = count;
             spec.seed = seed;
             std::vector<std::pair<Vec4, Vec3>> out;
             for (const auto& p : sample_points(s, spec)) out.emplace_back(p.x, p.v);
             return out;
           },
           py::arg("count"), py::arg("seed") = 1);

  m.def(
      "gravitational_structure",
      [](const SpacetimeMetric& g, const ScaleConstants& sc) { return handle(gravitational_structure(g, sc)); },
      py::arg("metric"), py::arg("scales") = ScaleConstants{});
  m.def(
      "joined_structure",
      [](const SpacetimeMetric& g, const ScaleConstants& sc, const EMField& em) { return handle(joined_structure(g, sc, em)); },
      py::arg("metric"), py::arg("scales"), py::arg("em"));

  m.def(
      "phase_value",
      [](const SymmetricMultivectorField& K, Handle s, const Vec4& x, const Vec3& v) {
        return phase_function_from_multivector(K, s)(make_point(x, v));
      },
      py::arg("K"), py::arg("structure"), py::arg("x"), py::arg("v"), "K(tau_hat, ..., tau_hat)");
  m.def(
      "hidden_symmetry",
      [](const SymmetricMultivectorField& K, Handle s, const Vec4& x, const Vec3& v) {
        const PhasePoint p = make_point(x, v);
        const HiddenSymmetry h = hidden_symmetry_from_multivector(K, s, std::vector<PhasePoint>{p});
        py::dict d;
        d["generator"] = h.generator(p);
        d["lift"] = h.lift(p);
        d["projection"] = h.projection(p);
        d["killing"] = h.killing;
        d["projectability"] = projectability_residual(h.projection, *s, p).cwiseAbs().maxCoeff();
        d["conservation"] = conservation_residual(h.projection, *s, p).max();
        return d;
      },
      py::arg("K"), py::arg("structure"), py::arg("x"), py::arg("v"));
  m.def(
      "homomorphism_residual",
      [](const SymmetricMultivectorField& K, const SymmetricMultivectorField& L, Handle s, std::size_t count,
         std::uint64_t seed) {
        SampleSpec spec;
        spec.count = count;
        spec.seed = seed;
        return verify_homomorphism(K, L, s, sample_points(*s, spec)).max().lift_bracket;
      },
      py::arg("K"), py::arg("L"), py::arg("structure"), py::arg("count") = 10, py::arg("seed") = 1);

  m.def(
      "integrate",
      [](Handle s, const Vec4& x, const Vec3& v, double s_end, const std::vector<std::string>& monitors,
         const std::string& method, double tolerance, double step, double sample_interval) {
        StepControl control;
        control.method = integrator_from_string(method);
        control.tolerance = tolerance;
        control.initial_step = step;
        control.min_step = std::min(control.min_step, step);
        control.sample_interval = sample_interval;
        std::vector<SymmetricMultivectorField> fields;
        for (const auto& n : monitors) fields.push_back(killing_field(s->metric(), n, s->scales()));
        const Trajectory tr = integrate(s, make_point(x, v), s_end, control, multivector_monitors(fields, s));
        const auto n = static_cast<py::ssize_t>(tr.samples.size());
        py::array_t<double> states({n, static_cast<py::ssize_t>(8)});
        py::array_t<double> values({n, static_cast<py::ssize_t>(monitors.size())});
        auto st = states.mutable_unchecked<2>();
        auto mv = values.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < n; ++i) {
          const auto& smp = tr.samples[static_cast<std::size_t>(i)];
          st(i, 0) = smp.s;
          const Vec7 y = smp.p.coords();
          for (int a = 0; a < kPhaseDim; ++a) st(i, a + 1) = y[a];
          for (std::size_t k = 0; k < monitors.size(); ++k) mv(i, static_cast<py::ssize_t>(k)) = smp.monitors[k];
        }
        py::dict d;
        d["states"] = states;
        d["monitors"] = values;
        d["monitor_names"] = tr.monitor_names;
        d["exited"] = tr.exited;
        d["exit_reason"] = tr.exit_reason;
        py::dict drift;
        for (const auto& e : monitor(tr)) drift[py::str(e.name)] = e.relative_drift;
        d["relative_drift"] = drift;
        std::ostringstream csv;
        write_csv(csv, tr);
        d["csv"] = csv.str();
        return d;
      },
      py::arg("structure"), py::arg("x"), py::arg("v"), py::arg("s_end"), py::arg("monitors") = std::vector<std::string>{},
      py::arg("method") = "dopri5", py::arg("tolerance") = 1e-10, py::arg("step") = 1e-2,
      py::arg("sample_interval") = 0.0);

  m.def(
      "run_config",
      [](const std::filesystem::path& config, const std::optional<std::filesystem::path>& out) {
        std::ostringstream o, e;
        const int code = run_config_file(config, out, o, e);
        return py::make_tuple(code, o.str(), e.str());
      },
      py::arg("config"), py::arg("out") = std::nullopt, "Returns (exit_code, stdout text, stderr text).");
  m.def(
      "summarize",
      [](const std::string& identity, const SpacetimeMetric& metric, std::uint64_t seed, double tolerance,
         const std::vector<double>& values) { return report_dict(summarize(identity, metric, seed, tolerance, values)); },
      py::arg("identity"), py::arg("metric"), py::arg("seed"), py::arg("tolerance"), py::arg("values"));
  m.def(
      "list_catalog",
      [](const std::string& kind, const std::optional<std::string>& arg) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : list_catalog(kind, arg)) out.emplace_back(e.name, e.description);
        return out;
      },
      py::arg("kind"), py::arg("metric") = std::nullopt);

  m.attr("EXIT_PASS") = kExitPass;
  m.attr("EXIT_RESIDUAL_FAILURE") = kExitResidualFailure;
  m.attr("EXIT_CONFIG_ERROR") = kExitConfigError;
}
