// Python module: dispersion, spectral operators, synthesis and reconstruction.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "patr/cli_io.hpp"
#include "patr/dispersion.hpp"
#include "patr/forward_model.hpp"
#include "patr/spectral_ops.hpp"
#include "patr/time_reversal.hpp"

namespace py = pybind11;
using namespace patr;

// 3-vectors travel as (x, y, z) tuples.
namespace pybind11::detail {
template <>
struct type_caster<Vec3> {
    PYBIND11_TYPE_CASTER(Vec3, const_name("tuple[float, float, float]"));

    bool load(handle src, bool) {
        if (!isinstance<sequence>(src) || isinstance<str>(src)) return false;
        const auto seq = reinterpret_borrow<sequence>(src);
        if (seq.size() != 3) return false;
        value = {seq[0].cast<double>(), seq[1].cast<double>(), seq[2].cast<double>()};
        return true;
    }
    static handle cast(Vec3 v, return_value_policy, handle) {
        return py::make_tuple(v.x, v.y, v.z).release();
    }
};
}  // namespace pybind11::detail

namespace {

TimeSignal signal(const std::vector<double>& samples, double t0, double dt) {
    return {TimeGrid{t0, dt, samples.size()}, samples};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Attenuation-corrected photoacoustic time reversal";
    m.attr("__version__") = kToolVersion;

    auto base = py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_NotImplementedError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_OverflowError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<ThermoViscous>(m, "ThermoViscous")
        .def(py::init<double>(), py::arg("a"))
        .def_readwrite("a", &ThermoViscous::a)
        .def("__repr__", [](const ThermoViscous& x) { return describe(x); });
    py::class_<KSB>(m, "KSB")
        .def(py::init<double, double, double>(), py::arg("alpha0"), py::arg("tau0") = 1.0,
             py::arg("gamma") = 2.0)
        .def_readwrite("alpha0", &KSB::alpha0)
        .def_readwrite("tau0", &KSB::tau0)
        .def_readwrite("gamma", &KSB::gamma)
        .def("__repr__", [](const KSB& x) { return describe(x); });
    py::class_<NSW>(m, "NSW")
        .def(py::init([](const std::vector<std::pair<double, double>>& processes) {
                 NSW n;
                 for (auto [tau, tilde] : processes) n.processes.push_back({tau, tilde});
                 return n;
             }),
             py::arg("processes"), "processes: list of (tau, tau_tilde) pairs")
        .def_property_readonly("processes",
                               [](const NSW& n) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : n.processes) out.emplace_back(p.tau, p.tau_tilde);
                                   return out;
                               })
        .def("__repr__", [](const NSW& x) { return describe(x); });

    m.def("validate", py::overload_cast<const AttenuationModel&>(&validate), py::arg("model"));
    m.def("describe", &describe, py::arg("model"));
    m.def("expansion_parameter", &expansion_parameter, py::arg("model"));
    m.def("front_speed", &front_speed, py::arg("model"));
    m.def("kappa", &kappa, py::arg("model"), py::arg("omega"));
    m.def("kappa_tilde", &kappa_tilde, py::arg("model"), py::arg("omega"), py::arg("order"));
    m.def("lambda_weight", &lambda_weight, py::arg("model"), py::arg("omega"), py::arg("order"));
    m.def("lambda1", py::overload_cast<const AttenuationModel&, double>(&lambda1), py::arg("model"),
          py::arg("omega"));
    m.def("lambda2", py::overload_cast<const AttenuationModel&, double>(&lambda2), py::arg("model"),
          py::arg("omega"));
    m.def("rho_threshold", &rho_threshold, py::arg("model"), py::arg("domain_diameter"));

    m.def(
        "fourier",
        [](const std::vector<double>& samples, double t0, double dt, std::complex<double> omega) {
            return fourier(signal(samples, t0, dt), omega);
        },
        py::arg("samples"), py::arg("t0"), py::arg("dt"), py::arg("omega"));
    m.def(
        "s_rho",
        [](const std::vector<double>& samples, double t0, double dt, double rho, std::size_t half_count) {
            return s_rho(signal(samples, t0, dt), FrequencyGrid{rho, half_count}).samples;
        },
        py::arg("samples"), py::arg("t0"), py::arg("dt"), py::arg("rho"), py::arg("half_count") = 512);
    m.def(
        "apply_attenuation",
        [](const AttenuationModel& model, const std::vector<double>& samples, double t0, double dt,
           double rho, std::size_t half_count) {
            return apply_attenuation(model, signal(samples, t0, dt), FrequencyGrid{rho, half_count}).samples;
        },
        py::arg("model"), py::arg("samples"), py::arg("t0"), py::arg("dt"), py::arg("rho"),
        py::arg("half_count") = 512);
    m.def(
        "apply_correction_adjoint",
        [](const AttenuationModel& model, const std::vector<double>& samples, double t0, double dt,
           double rho, int order, std::size_t half_count) {
            return apply_correction_adjoint(model, signal(samples, t0, dt), FrequencyGrid{rho, half_count},
                                            order)
                .samples;
        },
        py::arg("model"), py::arg("samples"), py::arg("t0"), py::arg("dt"), py::arg("rho"), py::arg("order"),
        py::arg("half_count") = 512);

    py::class_<IdentityCheck>(m, "IdentityCheck")
        .def_readonly("order", &IdentityCheck::order)
        .def_readonly("a", &IdentityCheck::a)
        .def_readonly("residual", &IdentityCheck::residual)
        .def_readonly("slope", &IdentityCheck::slope);
    m.def("verify_composition_identity", &verify_composition_identity, py::arg("family"), py::arg("order"),
          py::arg("sigma") = 0.2, py::arg("rho") = 40.0,
          py::arg("a") = std::vector<double>{0.031622776601683791, 0.01, 0.0031622776601683794});

    py::class_<Ball>(m, "Ball")
        .def(py::init<Vec3, double, double>(), py::arg("center"), py::arg("radius"), py::arg("amplitude") = 1.0)
        .def_readwrite("center", &Ball::center)
        .def_readwrite("radius", &Ball::radius)
        .def_readwrite("amplitude", &Ball::amplitude);
    py::class_<Gaussian>(m, "Gaussian")
        .def(py::init<Vec3, double, double>(), py::arg("center"), py::arg("sigma"), py::arg("amplitude") = 1.0)
        .def_readwrite("center", &Gaussian::center)
        .def_readwrite("sigma", &Gaussian::sigma)
        .def_readwrite("amplitude", &Gaussian::amplitude);
    py::class_<Phantom>(m, "Phantom")
        .def(py::init([](const std::vector<PhantomComponent>& parts, std::optional<double> support) {
                 return Phantom{parts, support.value_or(Phantom::natural_support(parts))};
             }),
             py::arg("components"), py::arg("support_radius") = py::none())
        .def_readonly("components", &Phantom::components)
        .def_readonly("support_radius", &Phantom::support_radius)
        .def("value", &Phantom::value, py::arg("x"))
        .def("__repr__", &Phantom::describe);

    py::class_<SensorArray>(m, "SensorArray")
        .def_static("fibonacci", &SensorArray::fibonacci, py::arg("count"), py::arg("radius"))
        .def_readonly("radius", &SensorArray::radius)
        .def_readonly("points", &SensorArray::points)
        .def_readonly("weights", &SensorArray::weights)
        .def("__len__", &SensorArray::size);

    py::class_<DataSet>(m, "DataSet")
        .def_readonly("sensors", &DataSet::sensors)
        .def_readonly("traces", &DataSet::traces)
        .def_readonly("model", &DataSet::model)
        .def_readonly("phantom", &DataSet::phantom)
        .def_property_readonly("times",
                               [](const DataSet& d) {
                                   std::vector<double> t(d.grid.n);
                                   for (std::size_t i = 0; i < d.grid.n; ++i) t[i] = d.grid.at(i);
                                   return t;
                               })
        .def_property_readonly("final_time", &DataSet::final_time)
        .def("max_abs", &DataSet::max_abs);

    m.def("spherical_mean", &spherical_mean, py::arg("phantom"), py::arg("x"), py::arg("r"));
    m.def("freespace_pressure", &freespace_pressure, py::arg("phantom"), py::arg("x"), py::arg("t"));
    m.def(
        "synthesize",
        [](const Phantom& phantom, const SensorArray& sensors, const AttenuationModel& model,
           std::optional<double> final_time, std::size_t samples, double quiescence_tolerance,
           double noise_level, std::uint64_t seed, int threads) {
            SynthesisOptions o;
            o.quiescence_tolerance = quiescence_tolerance;
            o.noise_level = noise_level;
            o.seed = seed;
            o.threads = threads;
            const double T = final_time.value_or(default_final_time(model, phantom, sensors));
            py::gil_scoped_release release;
            return synthesize_dataset(phantom, sensors, model, TimeGrid::span(0.0, T, samples), o);
        },
        py::arg("phantom"), py::arg("sensors"), py::arg("model"), py::arg("final_time") = py::none(),
        py::arg("samples") = 1025, py::arg("quiescence_tolerance") = 1e-6, py::arg("noise_level") = 0.0,
        py::arg("seed") = 0, py::arg("threads") = 1);

    py::class_<ImagingResult>(m, "ImagingResult")
        .def_readonly("points", &ImagingResult::points)
        .def_readonly("values", &ImagingResult::values)
        .def_readonly("model", &ImagingResult::model)
        .def_readonly("order", &ImagingResult::order)
        .def_readonly("rho", &ImagingResult::rho)
        .def_readonly("warnings", &ImagingResult::warnings)
        .def_readonly("relative_error", &ImagingResult::relative_error);
    m.def("line_profile", &line_profile, py::arg("center"), py::arg("direction"), py::arg("half_length"),
          py::arg("n"));
    m.def(
        "reconstruct",
        [](const DataSet& data, const std::vector<Vec3>& points, double rho, int order, std::size_t half_count,
           bool override_rho, int threads) {
            ReconstructionConfig c;
            c.points = points;
            c.rho = rho;
            c.order = order;
            c.half_count = half_count;
            c.override_rho = override_rho;
            c.threads = threads;
            py::gil_scoped_release release;
            return reconstruct(data, c);
        },
        py::arg("data"), py::arg("points"), py::arg("rho") = 40.0, py::arg("order") = 0,
        py::arg("half_count") = 512, py::arg("override_rho") = false, py::arg("threads") = 1);
    m.def("relative_l2_error", &relative_l2_error, py::arg("values"), py::arg("reference"));

    m.def("read_dataset", &read_dataset, py::arg("path"));
    m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("data"), py::arg("config_hash") = "");
}
