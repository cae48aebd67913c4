#include "cpshell/cli.hpp"

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "cpshell/abel_plana.hpp"
#include "cpshell/asymptotics.hpp"
#include "cpshell/errors.hpp"

namespace cpshell::cli {

namespace {

using boost::property_tree::ptree;
using model::PhysicalSystem;

const std::map<std::string, std::vector<std::string>>& section_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"system",
       {"preset", "radius_R_m", "separation_d_m", "separation_r", "plasma_Omega_per_m", "plasma_Q",
        "atom_energy_eV", "atom_omega_rad_per_s", "atom_q_a", "alpha0_m3", "alpha0_A3", "temperature_K"}},
      {"polarizability", {"mode"}},
      {"sweep", {"variable", "min", "max", "count", "spacing"}},
      {"outputs", {"include"}},
      {"control", {"rel_tol", "abs_floor_J", "l_max_cap", "n_max_cap", "threads", "route", "fd_source"}},
      {"sigma", {"r_values"}},
      {"output", {"format", "path"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ValidationError(field, "expected a finite number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError(field, "expected an integer, got '" + text + "'");
  }
  return v;
}

SweepVariable sweep_variable_from(const std::string& field, const std::string& name) {
  static const std::map<std::string, SweepVariable> names = {
      {"T", SweepVariable::T},         {"d", SweepVariable::d}, {"r", SweepVariable::r},
      {"R", SweepVariable::R},         {"Omega", SweepVariable::Omega},
      {"Q", SweepVariable::Q},         {"tau", SweepVariable::tau}};
  const auto it = names.find(name);
  if (it == names.end()) throw ValidationError(field, "unknown sweep variable '" + name + "' (T, d, r, R, Omega, Q, tau)");
  return it->second;
}

Spacing spacing_from(const std::string& field, const std::string& name) {
  if (name == "lin" || name == "linear") return Spacing::linear;
  if (name == "log") return Spacing::log;
  throw ValidationError(field, "unknown spacing '" + name + "' (lin, log)");
}

Output output_from(const std::string& field, const std::string& name) {
  static const std::map<std::string, Output> names = {{"free_energy", Output::free_energy},
                                                      {"breakdown", Output::breakdown},
                                                      {"entropy", Output::entropy},
                                                      {"sigma", Output::sigma},
                                                      {"regimes", Output::regimes}};
  const auto it = names.find(name);
  if (it == names.end()) throw ValidationError(field, "unknown output '" + name + "'");
  return it->second;
}

Format format_from(const std::string& field, const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ValidationError(field, "unknown format '" + name + "' (csv, json)");
}

EnergyRoute route_from(const std::string& field, const std::string& name) {
  if (name == "auto") return EnergyRoute::automatic;
  if (name == "matsubara") return EnergyRoute::matsubara;
  if (name == "abel_plana") return EnergyRoute::abel_plana;
  throw ValidationError(field, "unknown route '" + name + "' (auto, matsubara, abel_plana)");
}

entropy::FdSource fd_source_from(const std::string& field, const std::string& name) {
  if (name == "auto") return entropy::FdSource::automatic;
  if (name == "matsubara") return entropy::FdSource::matsubara;
  if (name == "abel_plana_thermal") return entropy::FdSource::abel_plana_thermal;
  throw ValidationError(field, "unknown fd_source '" + name + "' (auto, matsubara, abel_plana_thermal)");
}

std::string to_string(Spacing s) { return s == Spacing::log ? "log" : "lin"; }
std::string to_string(Format f) { return f == Format::json ? "json" : "csv"; }
std::string to_string(EnergyRoute r) {
  switch (r) {
    case EnergyRoute::matsubara: return "matsubara";
    case EnergyRoute::abel_plana: return "abel_plana";
    default: return "auto";
  }
}
std::string to_string(entropy::FdSource s) {
  switch (s) {
    case entropy::FdSource::matsubara: return "matsubara";
    case entropy::FdSource::abel_plana_thermal: return "abel_plana_thermal";
    default: return "auto";
  }
}

std::string sweep_column(SweepVariable v) {
  switch (v) {
    case SweepVariable::T: return "T_K";
    case SweepVariable::d: return "d_m";
    case SweepVariable::r: return "r";
    case SweepVariable::R: return "R_m";
    case SweepVariable::Omega: return "Omega_per_m";
    case SweepVariable::Q: return "Q";
    case SweepVariable::tau: return "tau";
  }
  return "value";
}

double sweep_value_of(SweepVariable v, const PhysicalSystem& sys) {
  const UnitSystem u = si_units();
  switch (v) {
    case SweepVariable::T: return sys.temperature_T;
    case SweepVariable::d: return sys.separation_d;
    case SweepVariable::r: return sys.separation_d / sys.radius_R;
    case SweepVariable::R: return sys.radius_R;
    case SweepVariable::Omega: return sys.plasma_Omega;
    case SweepVariable::Q: return sys.plasma_Omega * sys.radius_R;
    case SweepVariable::tau:
      return 4.0 * std::numbers::pi * u.k_B * sys.separation_d * sys.temperature_T / (u.hbar * u.c);
  }
  return 0.0;
}

bool has(const RunConfig& c, Output o) { return std::find(c.outputs.begin(), c.outputs.end(), o) != c.outputs.end(); }

bool wants_energy(const RunConfig& c) {
  return has(c, Output::free_energy) || has(c, Output::breakdown) || has(c, Output::regimes) ||
         has(c, Output::entropy);
}

std::string sigma_column(double r) { return "sigma_r" + format_number(r); }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [section, names] : section_keys()) {
      for (const auto& k : names) out.push_back(section + "." + k);
    }
    return out;
  }();
  return keys;
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::T: return "T";
    case SweepVariable::d: return "d";
    case SweepVariable::r: return "r";
    case SweepVariable::R: return "R";
    case SweepVariable::Omega: return "Omega";
    case SweepVariable::Q: return "Q";
    case SweepVariable::tau: return "tau";
  }
  return "?";
}

std::string to_string(Output o) {
  switch (o) {
    case Output::free_energy: return "free_energy";
    case Output::breakdown: return "breakdown";
    case Output::entropy: return "entropy";
    case Output::sigma: return "sigma";
    case Output::regimes: return "regimes";
  }
  return "?";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string error_code(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return "validation_error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence_error";
  if (dynamic_cast<const SingularityError*>(&e)) return "singularity_error";
  if (dynamic_cast<const RegimeError*>(&e)) return "regime_error";
  if (dynamic_cast<const PrecisionError*>(&e)) return "precision_error";
  if (dynamic_cast<const CapabilityError*>(&e)) return "capability_error";
  if (dynamic_cast<const SearchError*>(&e)) return "search_error";
  if (dynamic_cast<const IoError*>(&e)) return "io_error";
  return "error";
}

ptree read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(path + ":" + std::to_string(e.line()), e.message());
  }
  return tree;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"c60-hydrogen",
       "C60 fullerene shell and a hydrogen atom: R = 0.342 nm, hbar omega_a = 11.65 eV, "
       "alpha0 = 0.667 A^3, Q = 4.94e-2, d = R/2, T = 300 K",
       model::c60_hydrogen()},
  };
  return list;
}

const Preset& preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  throw ValidationError("system.preset", "unknown preset '" + name + "'");
}

void print_presets(std::ostream& out) {
  const UnitSystem u = si_units();
  for (const Preset& p : presets()) {
    const model::DimensionlessPoint pt = model::reduce(p.system);
    const model::EffectiveTemperatures t = model::effective_temperatures(p.system);
    out << p.name << ": " << p.description << "\n";
    out << "  radius_R_m = " << format_number(p.system.radius_R) << "\n";
    out << "  plasma_Omega_per_m = " << format_number(p.system.plasma_Omega) << "\n";
    out << "  atom_omega_rad_per_s = " << format_number(p.system.atom_omega_a) << "\n";
    out << "  atom_energy_eV = " << format_number(u.hbar * p.system.atom_omega_a / codata::electron_volt) << "\n";
    out << "  alpha0_m3 = " << format_number(p.system.alpha0) << "\n";
    out << "  separation_d_m = " << format_number(p.system.separation_d) << "\n";
    out << "  temperature_K = " << format_number(p.system.temperature_T) << "\n";
    out << "  Q = " << format_number(pt.Q) << ", q_a = " << format_number(pt.q_a) << ", r = " << format_number(pt.r)
        << "\n";
    out << "  T_omega_K = " << format_number(t.T_omega) << ", T_R_K = " << format_number(t.T_R)
        << ", T_d_K = " << format_number(t.T_d) << "\n";
  }
}

SweepAxis parse_sweep(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() != 5) throw ValidationError("sweep", "expected var:min:max:count:lin|log, got '" + spec + "'");
  SweepAxis axis;
  axis.variable = sweep_variable_from("sweep.variable", parts[0]);
  axis.min = parse_double("sweep.min", parts[1]);
  axis.max = parse_double("sweep.max", parts[2]);
  const long long count = parse_integer("sweep.count", parts[3]);
  if (count < 1 || count > 1'000'000) throw ValidationError("sweep.count", "must be in [1, 1e6]");
  axis.count = static_cast<int>(count);
  axis.spacing = spacing_from("sweep.spacing", parts[4]);
  return axis;
}

RunConfig parse_config(const ptree& tree) {
  const auto& known = section_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ValidationError(section, "unknown section");
    if (!body.data().empty() && body.empty()) throw ValidationError(section, "expected a [section]");
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw ValidationError(section + "." + key, "unknown key");
      }
      (void)value;
    }
  }
  const auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (const auto v = tree.get_optional<std::string>(ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  const auto number = [&](const std::string& path) -> std::optional<double> {
    if (const auto v = get(path)) return parse_double(path, *v);
    return std::nullopt;
  };
  const auto exclusive = [&](const std::string& a, const std::string& b) {
    if (get(a) && get(b)) throw ValidationError(a, "conflicts with " + b);
  };

  RunConfig c;
  const UnitSystem u = si_units();

  if (const auto name = get("system.preset")) {
    c.preset = *name;
    c.system = preset(*name).system;
  } else {
    c.system = PhysicalSystem{};
  }
  PhysicalSystem& s = c.system;
  exclusive("system.separation_d_m", "system.separation_r");
  exclusive("system.plasma_Omega_per_m", "system.plasma_Q");
  exclusive("system.atom_energy_eV", "system.atom_omega_rad_per_s");
  exclusive("system.atom_energy_eV", "system.atom_q_a");
  exclusive("system.atom_omega_rad_per_s", "system.atom_q_a");
  exclusive("system.alpha0_m3", "system.alpha0_A3");

  if (const auto v = number("system.radius_R_m")) s.radius_R = *v;
  if (!(s.radius_R > 0.0)) throw ValidationError("system.radius_R_m", "must be given and positive");
  if (const auto v = number("system.separation_d_m")) s.separation_d = *v;
  if (const auto v = number("system.separation_r")) s.separation_d = *v * s.radius_R;
  if (const auto v = number("system.plasma_Omega_per_m")) s.plasma_Omega = *v;
  if (const auto v = number("system.plasma_Q")) s.plasma_Omega = *v / s.radius_R;
  if (const auto v = number("system.atom_energy_eV")) s.atom_omega_a = *v * codata::electron_volt / u.hbar;
  if (const auto v = number("system.atom_omega_rad_per_s")) s.atom_omega_a = *v;
  if (const auto v = number("system.atom_q_a")) s.atom_omega_a = *v * u.c / s.radius_R;
  if (const auto v = number("system.alpha0_m3")) s.alpha0 = *v;
  if (const auto v = number("system.alpha0_A3")) s.alpha0 = *v * std::pow(codata::angstrom, 3);
  if (const auto v = number("system.temperature_K")) s.temperature_T = *v;

  if (!(s.separation_d > 0.0)) throw ValidationError("system.separation_d_m", "must be given and positive");
  if (!(s.plasma_Omega >= 0.0)) throw ValidationError("system.plasma_Omega_per_m", "must be >= 0");
  if (!(s.atom_omega_a > 0.0)) throw ValidationError("system.atom_energy_eV", "must be given and positive");
  if (!(s.alpha0 > 0.0)) throw ValidationError("system.alpha0_m3", "must be given and positive");
  if (!(s.temperature_T >= 0.0)) throw ValidationError("system.temperature_K", "must be >= 0");

  if (const auto v = get("polarizability.mode")) {
    try {
      c.polarizability = model::polarizability_mode_from_string(*v);
    } catch (const DomainError& e) {
      throw ValidationError("polarizability.mode", e.what());
    }
  }

  bool sweep_given = false;
  c.sweep.variable = SweepVariable::T;
  if (const auto v = get("sweep.variable")) {
    c.sweep.variable = sweep_variable_from("sweep.variable", *v);
    sweep_given = true;
  }
  const double current = sweep_value_of(c.sweep.variable, s);
  c.sweep.min = number("sweep.min").value_or(current);
  c.sweep.max = number("sweep.max").value_or(c.sweep.min);
  if (get("sweep.min") || get("sweep.max")) sweep_given = true;
  if (const auto v = get("sweep.count")) {
    const long long n = parse_integer("sweep.count", *v);
    if (n < 1 || n > 1'000'000) throw ValidationError("sweep.count", "must be in [1, 1e6]");
    c.sweep.count = static_cast<int>(n);
  }
  if (const auto v = get("sweep.spacing")) c.sweep.spacing = spacing_from("sweep.spacing", *v);
  if (!sweep_given && c.sweep.count != 1) throw ValidationError("sweep.variable", "a sweep with count > 1 needs a variable");

  if (const auto v = get("outputs.include")) {
    c.outputs.clear();
    for (const std::string& name : split(*v, ',')) {
      if (name.empty()) continue;
      const Output o = output_from("outputs.include", name);
      if (std::find(c.outputs.begin(), c.outputs.end(), o) == c.outputs.end()) c.outputs.push_back(o);
    }
    if (c.outputs.empty()) throw ValidationError("outputs.include", "no outputs requested");
  }

  if (const auto v = number("control.rel_tol")) c.control.rel_tol = *v;
  if (const auto v = number("control.abs_floor_J")) c.control.abs_floor = *v;
  if (const auto v = get("control.l_max_cap")) {
    const long long n = parse_integer("control.l_max_cap", *v);
    if (n < 1 || n > 1'000'000) throw ValidationError("control.l_max_cap", "must be in [1, 1e6]");
    c.control.l_max_cap = static_cast<int>(n);
  }
  if (const auto v = get("control.n_max_cap")) c.control.n_max_cap = parse_integer("control.n_max_cap", *v);
  if (const auto v = get("control.threads")) {
    const long long n = parse_integer("control.threads", *v);
    if (n < 0 || n > 4096) throw ValidationError("control.threads", "must be in [0, 4096]");
    c.control.threads = static_cast<int>(n);
  }
  if (const auto v = get("control.route")) c.route = route_from("control.route", *v);
  if (const auto v = get("control.fd_source")) c.fd_source = fd_source_from("control.fd_source", *v);

  if (const auto v = get("sigma.r_values")) {
    c.sigma_r_values.clear();
    for (const std::string& item : split(*v, ',')) {
      if (!item.empty()) c.sigma_r_values.push_back(parse_double("sigma.r_values", item));
    }
  }

  if (const auto v = get("output.format")) c.format = format_from("output.format", *v);
  if (const auto v = get("output.path")) c.output_path = *v;

  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  try {
    model::validate(c.system);
  } catch (const DomainError& e) {
    throw ValidationError("system", e.what());
  }
  const matsubara::SeriesControl& ctrl = c.control;
  if (!(ctrl.rel_tol > 0.0 && ctrl.rel_tol < 1.0)) throw ValidationError("control.rel_tol", "must be in (0, 1)");
  if (!(ctrl.abs_floor >= 0.0)) throw ValidationError("control.abs_floor_J", "must be >= 0");
  if (ctrl.l_max_cap < 1) throw ValidationError("control.l_max_cap", "must be positive");
  if (ctrl.n_max_cap < 1) throw ValidationError("control.n_max_cap", "must be positive");
  if (ctrl.threads < 0) throw ValidationError("control.threads", "must be >= 0");
  if (c.outputs.empty()) throw ValidationError("outputs.include", "no outputs requested");

  const SweepAxis& s = c.sweep;
  if (s.count < 1) throw ValidationError("sweep.count", "must be >= 1");
  if (!(s.min <= s.max)) throw ValidationError("sweep.max", "must be >= sweep.min");
  if (s.spacing == Spacing::log && !(s.min > 0.0)) throw ValidationError("sweep.min", "log spacing needs min > 0");
  const bool positive = s.variable != SweepVariable::T && s.variable != SweepVariable::Omega &&
                        s.variable != SweepVariable::Q && s.variable != SweepVariable::tau;
  if (positive && !(s.min > 0.0)) throw ValidationError("sweep.min", "must be positive for " + to_string(s.variable));
  if (!(s.min >= 0.0)) throw ValidationError("sweep.min", "must be >= 0");

  if (has(c, Output::sigma)) {
    if (s.variable != SweepVariable::tau) throw ValidationError("sweep.variable", "the sigma output needs a tau sweep");
    if (!(s.min > 0.0)) throw ValidationError("sweep.min", "sigma needs tau > 0");
    if (c.sigma_r_values.empty()) throw ValidationError("sigma.r_values", "no r values");
    for (double r : c.sigma_r_values) {
      if (!(r >= 0.0)) throw ValidationError("sigma.r_values", "r must be >= 0");
    }
  }
  if (c.route == EnergyRoute::abel_plana && c.polarizability == model::PolarizabilityMode::static_alpha) {
    throw ValidationError("control.route", "abel_plana needs the single_oscillator polarizability");
  }
}

std::vector<double> sweep_values(const SweepAxis& axis) {
  std::vector<double> out(axis.count);
  if (axis.count == 1) {
    out[0] = axis.min;
    return out;
  }
  for (int i = 0; i < axis.count; ++i) {
    const double f = static_cast<double>(i) / (axis.count - 1);
    out[i] = axis.spacing == Spacing::log ? axis.min * std::pow(axis.max / axis.min, f)
                                          : axis.min + (axis.max - axis.min) * f;
  }
  out.front() = axis.min;
  out.back() = axis.max;
  return out;
}

PhysicalSystem system_at(const RunConfig& config, double value) {
  PhysicalSystem s = config.system;
  const UnitSystem u = si_units();
  switch (config.sweep.variable) {
    case SweepVariable::T: s.temperature_T = value; break;
    case SweepVariable::d: s.separation_d = value; break;
    case SweepVariable::r: s.separation_d = value * s.radius_R; break;
    case SweepVariable::R: s.radius_R = value; break;
    case SweepVariable::Omega: s.plasma_Omega = value; break;
    case SweepVariable::Q: s.plasma_Omega = value / s.radius_R; break;
    case SweepVariable::tau:
      s.temperature_T = value * u.hbar * u.c / (4.0 * std::numbers::pi * u.k_B * s.separation_d);
      break;
  }
  return s;
}

std::vector<std::string> columns_for(const RunConfig& c) {
  std::vector<std::string> cols;
  if (wants_energy(c)) {
    cols.insert(cols.end(), {"F_J", "truncation_bound_J"});
  }
  if (has(c, Output::breakdown)) {
    cols.insert(cols.end(), {"E0_J", "F1_J", "F2_J", "te_share_J", "tm_share_J", "zero_mode_J", "l_max_used",
                             "n_max_used"});
  }
  if (has(c, Output::entropy)) {
    cols.insert(cols.end(), {"S_analytic_J_per_K", "S1_J_per_K", "S2_J_per_K", "S_fd_J_per_K"});
  }
  if (has(c, Output::regimes)) {
    cols.insert(cols.end(), {"low_T_J", "low_T_slack", "high_T_J", "high_T_slack", "short_distance_J",
                             "short_distance_slack", "flat_plate_J", "flat_plate_slack"});
  }
  if (has(c, Output::sigma)) {
    for (double r : c.sigma_r_values) cols.push_back(sigma_column(r));
    if (!wants_energy(c)) cols.push_back("truncation_bound");
  }
  return cols;
}

namespace {

class RowBuilder {
 public:
  RowBuilder(const std::vector<std::string>& columns, SweepRow& row) : columns_(columns), row_(row) {
    row_.values.assign(columns.size(), std::nullopt);
  }

  void set(const std::string& column, double value) {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it != columns_.end()) row_.values[it - columns_.begin()] = value;
  }

  // Runs f; a failure is recorded against what without aborting the row.
  template <class F>
  bool attempt(const std::string& what, F&& f) {
    try {
      f();
      return true;
    } catch (const std::exception& e) {
      if (row_.status == "ok") row_.status = error_code(e);
      if (!row_.message.empty()) row_.message += "; ";
      row_.message += what + ": " + e.what();
      return false;
    }
  }

 private:
  const std::vector<std::string>& columns_;
  SweepRow& row_;
};

void evaluate_point(const RunConfig& c, const std::vector<std::string>& columns, double value,
                    const matsubara::SeriesControl& ctrl, SweepRow& row) {
  row.sweep_value = value;
  RowBuilder b(columns, row);
  const PhysicalSystem sys = system_at(c, value);
  const model::Polarizability pol = model::polarizability_of(sys, c.polarizability);
  const bool dynamic = c.polarizability == model::PolarizabilityMode::single_oscillator;

  if (!b.attempt("system", [&] { model::validate(sys); })) return;

  std::optional<matsubara::EnergyBreakdown> ms;
  std::optional<abel_plana::AbelPlanaBreakdown> ap;
  const auto need_ms = [&] {
    if (!ms) ms = matsubara::free_energy(sys, pol, ctrl);
  };
  const auto need_ap = [&] {
    if (!ap) ap = abel_plana::free_energy(sys, pol, ctrl);
  };

  if (wants_energy(c)) {
    b.attempt("F_J", [&] {
      EnergyRoute route = c.route;
      if (route == EnergyRoute::automatic) {
        route = EnergyRoute::matsubara;
        if (dynamic) {
          try {
            need_ap();
            route = EnergyRoute::abel_plana;
          } catch (const SingularityError&) {
          } catch (const ConvergenceError&) {
            if (!(sys.temperature_T > 0.0)) throw;
          }
        }
      }
      if (route == EnergyRoute::abel_plana) {
        need_ap();
        row.route = "abel_plana";
        b.set("F_J", ap->total);
        b.set("truncation_bound_J", ctrl.rel_tol * std::fabs(ap->total));
      } else {
        need_ms();
        row.route = "matsubara";
        b.set("F_J", ms->total);
        b.set("truncation_bound_J", ms->truncation_bound);
      }
    });
  }

  if (has(c, Output::breakdown)) {
    if (dynamic) {
      b.attempt("E0_J", [&] {
        need_ap();
        b.set("E0_J", ap->E0);
        b.set("F1_J", ap->F1);
        b.set("F2_J", ap->F2);
      });
    }
    b.attempt("te_share_J", [&] {
      need_ms();
      b.set("te_share_J", ms->te_share);
      b.set("tm_share_J", ms->tm_share);
      b.set("zero_mode_J", ms->zero_mode);
      b.set("l_max_used", ms->l_max_used);
      b.set("n_max_used", static_cast<double>(ms->n_max_used));
    });
  }

  if (has(c, Output::entropy)) {
    if (dynamic) {
      b.attempt("S_analytic_J_per_K", [&] {
        const entropy::EntropyBreakdown s = entropy::entropy_analytic(sys, pol, ctrl);
        b.set("S_analytic_J_per_K", s.total);
        b.set("S1_J_per_K", *s.s1);
        b.set("S2_J_per_K", *s.s2);
      });
    }
    b.attempt("S_fd_J_per_K", [&] {
      const entropy::EntropyBreakdown s = entropy::entropy_fd(sys, pol, ctrl, c.fd_source);
      b.set("S_fd_J_per_K", s.total);
    });
  }

  if (has(c, Output::regimes)) {
    using asymptotics::RegimePolicy;
    b.attempt("low_T_J", [&] {
      const asymptotics::RegimeResult r = asymptotics::low_temperature_energy(sys, pol, ctrl, RegimePolicy::report);
      b.set("low_T_J", r.value);
      b.set("low_T_slack", r.worst_slack());
    });
    b.attempt("high_T_J", [&] {
      const asymptotics::RegimeResult r = asymptotics::high_temperature_energy(sys, pol, RegimePolicy::report);
      b.set("high_T_J", r.value);
      b.set("high_T_slack", r.worst_slack());
    });
    b.attempt("short_distance_J", [&] {
      const asymptotics::RegimeResult r = asymptotics::short_distance_energy(sys, pol, RegimePolicy::report);
      b.set("short_distance_J", r.value);
      b.set("short_distance_slack", r.worst_slack());
    });
    b.attempt("flat_plate_J", [&] {
      b.set("flat_plate_J", asymptotics::flat_plate_energy(sys, pol, ctrl, true));
      const double r = sys.separation_d / sys.radius_R;
      const double qr = sys.plasma_Omega * sys.separation_d;
      b.set("flat_plate_slack", std::max(r, qr > 0.0 ? 1.0 / qr : std::numeric_limits<double>::max()));
    });
  }

  if (has(c, Output::sigma)) {
    double largest = 0.0;
    for (double r : c.sigma_r_values) {
      b.attempt(sigma_column(r), [&] {
        const double s = entropy::sigma(r, value, ctrl);
        largest = std::max(largest, std::fabs(s));
        b.set(sigma_column(r), s);
      });
    }
    if (!wants_energy(c)) b.set("truncation_bound", ctrl.rel_tol * largest);
  }
}

}  // namespace

SweepResult evaluate(const RunConfig& config) {
  validate(config);
  SweepResult result;
  result.sweep_variable = sweep_column(config.sweep.variable);
  result.columns = columns_for(config);
  const std::vector<double> values = sweep_values(config.sweep);
  result.rows.resize(values.size());

  const int threads = matsubara::resolve_threads(config.control);
  const int workers = std::min<int>(threads, static_cast<int>(values.size()));
  matsubara::SeriesControl inner = config.control;
  // Each worker owns one point at a time; a single point keeps the inner parallelism.
  inner.threads = workers > 1 ? 1 : threads;

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      evaluate_point(config, result.columns, values[i], inner, result.rows[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return result;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& out) {
  out << result.sweep_variable;
  for (const std::string& c : result.columns) out << ',' << c;
  out << ",route,status,message\n";
  for (const SweepRow& row : result.rows) {
    out << format_number(row.sweep_value);
    for (const auto& v : row.values) {
      out << ',';
      if (v) out << format_number(*v);
    }
    out << ',' << row.route << ',' << row.status << ',' << csv_field(row.message) << '\n';
  }
}

void write_json(const RunConfig& config, const SweepResult& result, std::ostream& out) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "cpshell.sweep_result/1";
  ordered_json cfg;
  cfg["preset"] = config.preset;
  cfg["system"] = {{"radius_R_m", config.system.radius_R},
                   {"plasma_Omega_per_m", config.system.plasma_Omega},
                   {"atom_omega_rad_per_s", config.system.atom_omega_a},
                   {"alpha0_m3", config.system.alpha0},
                   {"separation_d_m", config.system.separation_d},
                   {"temperature_K", config.system.temperature_T}};
  cfg["polarizability"] = model::to_string(config.polarizability);
  cfg["sweep"] = {{"variable", to_string(config.sweep.variable)},
                  {"min", config.sweep.min},
                  {"max", config.sweep.max},
                  {"count", config.sweep.count},
                  {"spacing", to_string(config.sweep.spacing)}};
  ordered_json outputs = ordered_json::array();
  for (Output o : config.outputs) outputs.push_back(to_string(o));
  cfg["outputs"] = outputs;
  cfg["control"] = {{"rel_tol", config.control.rel_tol},
                    {"abs_floor_J", config.control.abs_floor},
                    {"l_max_cap", config.control.l_max_cap},
                    {"n_max_cap", config.control.n_max_cap},
                    {"route", to_string(config.route)},
                    {"fd_source", to_string(config.fd_source)}};
  if (has(config, Output::sigma)) cfg["sigma_r_values"] = config.sigma_r_values;
  cfg["format"] = to_string(config.format);
  doc["config"] = cfg;
  doc["sweep_variable"] = result.sweep_variable;
  doc["columns"] = result.columns;
  ordered_json rows = ordered_json::array();
  for (const SweepRow& row : result.rows) {
    ordered_json values;
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
      const auto& v = row.values[i];
      values[result.columns[i]] = (v && std::isfinite(*v)) ? ordered_json(*v) : ordered_json(nullptr);
    }
    rows.push_back({{"sweep_value", row.sweep_value},
                    {"values", values},
                    {"route", row.route},
                    {"status", row.status},
                    {"message", row.message}});
  }
  doc["rows"] = rows;
  out << doc.dump(2) << '\n';
}

SweepResult run(const RunConfig& config, std::ostream& out) {
  std::ofstream file;
  if (!config.output_path.empty()) {
    file.open(config.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write output file '" + config.output_path + "'");
  }
  SweepResult result = evaluate(config);
  std::ostream& sink = config.output_path.empty() ? out : file;
  if (config.format == Format::json) {
    write_json(config, result, sink);
  } else {
    write_csv(result, sink);
  }
  sink.flush();
  if (!sink) throw IoError("failed writing output to '" + (config.output_path.empty() ? "stdout" : config.output_path) + "'");
  return result;
}

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.outcome == "fail"; });
}

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

Check compare(const std::string& name, double measured, double tolerance, std::string detail) {
  return {name, measured <= tolerance ? "pass" : "fail", measured, tolerance, std::move(detail)};
}

Check skipped(const std::string& name, std::string detail) { return {name, "skipped", 0.0, 0.0, std::move(detail)}; }

// A route that could not reach its tolerance fails the check; one that does not apply skips it.
bool tolerance_unmet(const std::exception& e) {
  return dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const PrecisionError*>(&e);
}

Check unavailable(const std::string& name, const std::exception& e) {
  Check c = skipped(name, error_code(e) + ": " + e.what());
  if (tolerance_unmet(e)) {
    c.outcome = "fail";
    c.measured = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace

VerifyReport verify(const RunConfig& config) {
  validate(config);
  VerifyReport report;
  const PhysicalSystem& sys = config.system;
  const model::Polarizability pol = model::polarizability_of(sys, config.polarizability);
  const bool dynamic = config.polarizability == model::PolarizabilityMode::single_oscillator;
  const matsubara::SeriesControl& ctrl = config.control;
  const model::DimensionlessPoint p = model::reduce(sys);

  std::optional<double> f_ms;
  std::optional<double> f_ap;
  std::optional<abel_plana::AbelPlanaBreakdown> ap;
  std::optional<Check> ms_error;
  std::optional<Check> ap_error;
  try {
    f_ms = matsubara::free_energy(sys, pol, ctrl).total;
  } catch (const std::exception& e) {
    ms_error = unavailable("representation_equivalence", e);
  }
  if (dynamic) {
    try {
      ap = abel_plana::free_energy(sys, pol, ctrl);
      f_ap = ap->total;
    } catch (const std::exception& e) {
      ap_error = unavailable("representation_equivalence", e);
    }
  } else {
    ap_error = skipped("representation_equivalence", "static polarizability has no Abel-Plana form");
  }

  {
    const double tol = std::max(1e-6, ctrl.rel_tol);
    const std::string note = tol > 1e-6 ? "degraded tolerance from rel_tol" : "";
    if (f_ms && f_ap) {
      report.checks.push_back(compare("representation_equivalence", rel_diff(*f_ms, *f_ap), tol,
                                      note.empty() ? "matsubara vs abel_plana" : "matsubara vs abel_plana; " + note));
    } else {
      report.checks.push_back(f_ms ? *ap_error : *ms_error);
    }
  }

  if (dynamic && sys.temperature_T > 0.0) {
    const double tol = std::max(1e-4, ctrl.rel_tol);
    try {
      const double sa = entropy::entropy_analytic(sys, pol, ctrl).total;
      const double sf = entropy::entropy_fd(sys, pol, ctrl, config.fd_source).total;
      report.checks.push_back(compare("entropy_routes", rel_diff(sa, sf), tol, "analytic vs finite difference"));
    } catch (const std::exception& e) {
      report.checks.push_back(unavailable("entropy_routes", e));
    }
  } else {
    report.checks.push_back(skipped("entropy_routes", "needs the single_oscillator polarizability and T > 0"));
  }

  const auto regime = [&](const std::string& name, const asymptotics::RegimeResult& r, std::optional<double> full,
                          double tol) {
    if (!r.valid()) {
      std::string worst;
      for (const auto& v : r.validity) {
        if (!v.holds) worst += (worst.empty() ? "" : ", ") + v.name;
      }
      report.warnings.push_back(name + ": outside its validity region, slack " + format_number(r.worst_slack()) +
                                " (" + worst + ")");
      report.checks.push_back(skipped(name, "slack " + format_number(r.worst_slack())));
      return;
    }
    if (!full) {
      report.checks.push_back(skipped(name, "full free energy unavailable"));
      return;
    }
    report.checks.push_back(compare(name, rel_diff(r.value, *full), tol, "slack " + format_number(r.worst_slack())));
  };

  using asymptotics::RegimePolicy;
  try {
    const asymptotics::RegimeResult low = asymptotics::low_temperature_energy(sys, pol, ctrl, RegimePolicy::report);
    if (ap && sys.temperature_T > 0.0 && p.Q > 0.0) {
      // Thermal parts, free of the cancellation against E0.
      asymptotics::RegimeResult thermal = low;
      thermal.value = asymptotics::casimir_polder_energy(sys.alpha0, sys.separation_d) *
                      asymptotics::low_temperature_coefficient(p.r) * std::pow(p.t_ratio_R, 4);
      regime("low_temperature_law", thermal, ap->F1 + ap->F2, 1e-2);
    } else {
      regime("low_temperature_law", low, f_ap ? f_ap : f_ms, 1e-2);
    }
  } catch (const std::exception& e) {
    report.checks.push_back(unavailable("low_temperature_law", e));
  }
  try {
    regime("high_temperature_law", asymptotics::high_temperature_energy(sys, pol, RegimePolicy::report), f_ms, 1e-3);
  } catch (const std::exception& e) {
    report.checks.push_back(unavailable("high_temperature_law", e));
  }
  try {
    regime("short_distance_law", asymptotics::short_distance_energy(sys, pol, RegimePolicy::report),
           f_ap ? f_ap : f_ms, 5e-2);
  } catch (const std::exception& e) {
    report.checks.push_back(unavailable("short_distance_law", e));
  }

  {
    const std::optional<double> f = f_ms ? f_ms : f_ap;
    if (!f) {
      report.checks.push_back(skipped("sign", "no free energy available"));
    } else if (p.Q == 0.0) {
      report.checks.push_back(compare("sign", std::fabs(*f), 0.0, "Q = 0 gives exactly 0"));
    } else {
      report.checks.push_back({"sign", *f < 0.0 ? "pass" : "fail", *f, 0.0, "F < 0 for Q > 0"});
    }
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    if (p.Q > 0.0) {
      for (int l = 1; l <= 12; ++l) {
        for (int n = 1; n <= 12; ++n) {
          const double x = std::max(p.t_ratio_R, 1e-3) * n;
          worst = std::min({worst, matsubara::jost_te(l, x, p.Q), matsubara::jost_tm(l, x, p.Q)});
        }
      }
    } else {
      worst = 1.0;
    }
    report.checks.push_back({"jost_lower_bound", worst >= 1.0 ? "pass" : "fail", worst, 1.0,
                             "min over l, n <= 12 of f_TE, f_TM"});
  }

  {
    const double closed = matsubara::zero_mode_coefficient(p.r);
    const double series = matsubara::zero_mode_series(p.r, ctrl);
    report.checks.push_back(compare("zero_mode_series", rel_diff(closed, series), std::max(1e-9, ctrl.rel_tol),
                                    "closed form vs summed l-series"));
  }
  return report;
}

void print_report(const VerifyReport& report, std::ostream& out) {
  for (const Check& c : report.checks) {
    std::string tag = c.outcome == "pass" ? "PASS" : c.outcome == "fail" ? "FAIL" : "SKIP";
    out << tag << ' ' << c.name;
    if (c.outcome != "skipped" && !std::isnan(c.measured)) {
      out << " measured=" << format_number(c.measured) << " tol=" << format_number(c.tolerance);
    }
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
  for (const std::string& w : report.warnings) out << "WARN " << w << '\n';
  out << (report.passed() ? "verify: all checks passed" : "verify: some checks failed") << '\n';
}

}  // namespace cpshell::cli
