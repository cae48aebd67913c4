#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cpshell/abel_plana.hpp"
#include "cpshell/asymptotics.hpp"
#include "cpshell/cli.hpp"
#include "cpshell/entropy.hpp"
#include "cpshell/errors.hpp"
#include "cpshell/matsubara.hpp"
#include "cpshell/model.hpp"

namespace py = pybind11;
using namespace cpshell;

namespace {

cli::RunConfig config_from_file(const std::string& path) { return cli::parse_config(cli::read_config_file(path)); }

}  // namespace

PYBIND11_MODULE(_cpshell, m) {
  m.doc() = "Thermal Casimir-Polder free energy of an atom near a thin plasma sphere";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<CapabilityError>(m, "CapabilityError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", error.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", error.ptr());
  py::register_exception<PrecisionError>(m, "PrecisionError", error.ptr());
  py::register_exception<SearchError>(m, "SearchError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  py::class_<model::PhysicalSystem>(m, "PhysicalSystem")
      .def(py::init<>())
      .def(py::init([](double R, double Omega, double omega_a, double alpha0, double d, double T) {
             return model::PhysicalSystem{R, Omega, omega_a, alpha0, d, T};
           }),
           py::arg("radius_R"), py::arg("plasma_Omega"), py::arg("atom_omega_a"), py::arg("alpha0"),
           py::arg("separation_d"), py::arg("temperature_T"))
      .def_readwrite("radius_R", &model::PhysicalSystem::radius_R)
      .def_readwrite("plasma_Omega", &model::PhysicalSystem::plasma_Omega)
      .def_readwrite("atom_omega_a", &model::PhysicalSystem::atom_omega_a)
      .def_readwrite("alpha0", &model::PhysicalSystem::alpha0)
      .def_readwrite("separation_d", &model::PhysicalSystem::separation_d)
      .def_readwrite("temperature_T", &model::PhysicalSystem::temperature_T);

  py::class_<model::DimensionlessPoint>(m, "DimensionlessPoint")
      .def(py::init<>())
      .def_readwrite("r", &model::DimensionlessPoint::r)
      .def_readwrite("chi", &model::DimensionlessPoint::chi)
      .def_readwrite("Q", &model::DimensionlessPoint::Q)
      .def_readwrite("q_a", &model::DimensionlessPoint::q_a)
      .def_readwrite("a", &model::DimensionlessPoint::a)
      .def_readwrite("tau", &model::DimensionlessPoint::tau)
      .def_readwrite("t_ratio_R", &model::DimensionlessPoint::t_ratio_R);

  py::class_<model::EffectiveTemperatures>(m, "EffectiveTemperatures")
      .def_readonly("T_omega", &model::EffectiveTemperatures::T_omega)
      .def_readonly("T_R", &model::EffectiveTemperatures::T_R)
      .def_readonly("T_d", &model::EffectiveTemperatures::T_d);

  py::enum_<model::PolarizabilityMode>(m, "PolarizabilityMode")
      .value("single_oscillator", model::PolarizabilityMode::single_oscillator)
      .value("static", model::PolarizabilityMode::static_alpha);

  py::class_<model::Polarizability>(m, "Polarizability")
      .def(py::init([](double alpha0, double omega_a, model::PolarizabilityMode mode) {
             return model::Polarizability{alpha0, omega_a, mode};
           }),
           py::arg("alpha0"), py::arg("omega_a"), py::arg("mode") = model::PolarizabilityMode::single_oscillator)
      .def_readwrite("alpha0", &model::Polarizability::alpha0)
      .def_readwrite("omega_a", &model::Polarizability::omega_a)
      .def_readwrite("mode", &model::Polarizability::mode);

  py::class_<matsubara::SeriesControl>(m, "SeriesControl")
      .def(py::init([](double rel_tol, double abs_floor, int l_max_cap, std::int64_t n_max_cap, int threads) {
             return matsubara::SeriesControl{rel_tol, abs_floor, l_max_cap, n_max_cap, threads};
           }),
           py::arg("rel_tol") = 1e-8, py::arg("abs_floor") = 0.0, py::arg("l_max_cap") = 5000,
           py::arg("n_max_cap") = 1'000'000, py::arg("threads") = 0)
      .def_readwrite("rel_tol", &matsubara::SeriesControl::rel_tol)
      .def_readwrite("abs_floor", &matsubara::SeriesControl::abs_floor)
      .def_readwrite("l_max_cap", &matsubara::SeriesControl::l_max_cap)
      .def_readwrite("n_max_cap", &matsubara::SeriesControl::n_max_cap)
      .def_readwrite("threads", &matsubara::SeriesControl::threads);

  m.def("c60_hydrogen", &model::c60_hydrogen);
  m.def("reduce", [](const model::PhysicalSystem& s) { return model::reduce(s); });
  m.def("effective_temperatures", [](const model::PhysicalSystem& s) { return model::effective_temperatures(s); });
  m.def("polarizability_of", &model::polarizability_of, py::arg("system"),
        py::arg("mode") = model::PolarizabilityMode::single_oscillator);

  py::class_<matsubara::EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("total", &matsubara::EnergyBreakdown::total)
      .def_readonly("zero_mode", &matsubara::EnergyBreakdown::zero_mode)
      .def_readonly("te_share", &matsubara::EnergyBreakdown::te_share)
      .def_readonly("tm_share", &matsubara::EnergyBreakdown::tm_share)
      .def_readonly("l_max_used", &matsubara::EnergyBreakdown::l_max_used)
      .def_readonly("n_max_used", &matsubara::EnergyBreakdown::n_max_used)
      .def_readonly("truncation_bound", &matsubara::EnergyBreakdown::truncation_bound);

  py::class_<abel_plana::AbelPlanaBreakdown>(m, "AbelPlanaBreakdown")
      .def_readonly("E0", &abel_plana::AbelPlanaBreakdown::E0)
      .def_readonly("F1", &abel_plana::AbelPlanaBreakdown::F1)
      .def_readonly("F2", &abel_plana::AbelPlanaBreakdown::F2)
      .def_readonly("total", &abel_plana::AbelPlanaBreakdown::total);

  const matsubara::SeriesControl default_ctrl;
  m.def("matsubara_free_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c) {
          py::gil_scoped_release release;
          return matsubara::free_energy(s, p, c);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl);
  m.def("abel_plana_free_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c) {
          py::gil_scoped_release release;
          return abel_plana::free_energy(s, p, c);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl);
  m.def("zero_mode_coefficient", &matsubara::zero_mode_coefficient, py::arg("r"));
  m.def("zero_mode_series", &matsubara::zero_mode_series, py::arg("r"), py::arg("control") = default_ctrl);
  m.def("jost_te", &matsubara::jost_te, py::arg("l"), py::arg("x"), py::arg("Q"));
  m.def("jost_tm", &matsubara::jost_tm, py::arg("l"), py::arg("x"), py::arg("Q"));

  py::class_<asymptotics::ValidityCheck>(m, "ValidityCheck")
      .def_readonly("name", &asymptotics::ValidityCheck::name)
      .def_readonly("lhs", &asymptotics::ValidityCheck::lhs)
      .def_readonly("rhs", &asymptotics::ValidityCheck::rhs)
      .def_readonly("slack", &asymptotics::ValidityCheck::slack)
      .def_readonly("holds", &asymptotics::ValidityCheck::holds);

  py::class_<asymptotics::RegimeResult>(m, "RegimeResult")
      .def_readonly("value", &asymptotics::RegimeResult::value)
      .def_readonly("validity", &asymptotics::RegimeResult::validity)
      .def_property_readonly("regime", [](const asymptotics::RegimeResult& r) { return asymptotics::to_string(r.regime); })
      .def("worst_slack", &asymptotics::RegimeResult::worst_slack)
      .def("valid", &asymptotics::RegimeResult::valid);

  py::enum_<asymptotics::RegimePolicy>(m, "RegimePolicy")
      .value("report", asymptotics::RegimePolicy::report)
      .value("enforce", asymptotics::RegimePolicy::enforce);

  m.def("casimir_polder_energy", [](double alpha0, double d) { return asymptotics::casimir_polder_energy(alpha0, d); },
        py::arg("alpha0"), py::arg("d"));
  m.def("flat_plate_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c,
           bool corrections) { return asymptotics::flat_plate_energy(s, p, c, corrections); },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl,
        py::arg("include_corrections") = true);
  m.def("low_temperature_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c,
           asymptotics::RegimePolicy policy) { return asymptotics::low_temperature_energy(s, p, c, policy); },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl,
        py::arg("policy") = asymptotics::RegimePolicy::enforce);
  m.def("high_temperature_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, asymptotics::RegimePolicy policy) {
          return asymptotics::high_temperature_energy(s, p, policy);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("policy") = asymptotics::RegimePolicy::enforce);
  m.def("short_distance_energy",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, asymptotics::RegimePolicy policy) {
          return asymptotics::short_distance_energy(s, p, policy);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("policy") = asymptotics::RegimePolicy::enforce);
  m.def("low_temperature_coefficient", &asymptotics::low_temperature_coefficient, py::arg("r"));
  m.def("high_temperature_coefficient", &asymptotics::high_temperature_coefficient, py::arg("r"));
  m.def("eta0", &asymptotics::eta0, py::arg("tau"));
  m.def("eta1", &asymptotics::eta1, py::arg("tau"), py::arg("control") = default_ctrl);

  py::class_<entropy::EntropyBreakdown>(m, "EntropyBreakdown")
      .def_readonly("s1", &entropy::EntropyBreakdown::s1)
      .def_readonly("s2", &entropy::EntropyBreakdown::s2)
      .def_readonly("total", &entropy::EntropyBreakdown::total);

  py::enum_<entropy::FdSource>(m, "FdSource")
      .value("automatic", entropy::FdSource::automatic)
      .value("abel_plana_thermal", entropy::FdSource::abel_plana_thermal)
      .value("matsubara", entropy::FdSource::matsubara);

  m.def("entropy_analytic",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c) {
          py::gil_scoped_release release;
          return entropy::entropy_analytic(s, p, c);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl);
  m.def("entropy_fd",
        [](const model::PhysicalSystem& s, const model::Polarizability& p, const matsubara::SeriesControl& c,
           entropy::FdSource source) {
          py::gil_scoped_release release;
          return entropy::entropy_fd(s, p, c, source);
        },
        py::arg("system"), py::arg("polarizability"), py::arg("control") = default_ctrl,
        py::arg("source") = entropy::FdSource::automatic);
  m.def("low_temperature_entropy", [](const model::PhysicalSystem& s) { return entropy::low_temperature_entropy(s); },
        py::arg("system"));
  m.def("high_temperature_entropy_coefficient", &entropy::high_temperature_entropy_coefficient, py::arg("r"));
  m.def("sigma", &entropy::sigma, py::arg("r"), py::arg("tau"), py::arg("control") = default_ctrl);
  m.def("sigma_minimum",
        [](double r, double tau_min, double tau_max, const matsubara::SeriesControl& c) {
          const entropy::SigmaMinimum s = entropy::sigma_minimum(r, tau_min, tau_max, c);
          return py::make_tuple(s.tau, s.sigma);
        },
        py::arg("r"), py::arg("tau_min"), py::arg("tau_max"), py::arg("control") = default_ctrl);
  m.def("find_sign_change_threshold", &entropy::find_sign_change_threshold, py::arg("tau_range"),
        py::arg("tolerance"), py::arg("control") = default_ctrl, py::arg("r_low") = 0.0, py::arg("r_high") = 0.5);

  m.def("run_config",
        [](const std::string& path) {
          const cli::RunConfig config = config_from_file(path);
          std::ostringstream out;
          {
            py::gil_scoped_release release;
            cli::run(config, out);
          }
          return out.str();
        },
        py::arg("path"), "Runs the sweep of an INI config; returns the text when it has no output path.");
  m.def("verify_config",
        [](const std::string& path) {
          const cli::RunConfig config = config_from_file(path);
          cli::VerifyReport report;
          {
            py::gil_scoped_release release;
            report = cli::verify(config);
          }
          py::list checks;
          for (const cli::Check& c : report.checks) {
            py::dict d;
            d["name"] = c.name;
            d["outcome"] = c.outcome;
            d["measured"] = c.measured;
            d["tolerance"] = c.tolerance;
            d["detail"] = c.detail;
            checks.append(d);
          }
          py::dict out;
          out["passed"] = report.passed();
          out["checks"] = checks;
          out["warnings"] = report.warnings;
          return out;
        },
        py::arg("path"));
}
