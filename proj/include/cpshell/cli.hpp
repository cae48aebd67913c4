#pragma once

// Batch front end: configuration intake, parameter sweeps, the verify
// suite and CSV/JSON emission. tools/cpshell.cpp wraps this in a command line.

#include <boost/property_tree/ptree.hpp>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpshell/entropy.hpp"
#include "cpshell/matsubara.hpp"

namespace cpshell::cli {

enum class SweepVariable { T, d, r, R, Omega, Q, tau };
enum class Spacing { linear, log };
enum class Output { free_energy, breakdown, entropy, sigma, regimes };
enum class Format { csv, json };
/// Route for the total free energy. automatic: Abel-Plana for the
/// single-oscillator polarizability when its thermal path is resonance-free,
/// Matsubara otherwise.
enum class EnergyRoute { automatic, matsubara, abel_plana };

struct SweepAxis {
  SweepVariable variable = SweepVariable::T;
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  Spacing spacing = Spacing::linear;
};

struct RunConfig {
  std::string preset;  // empty when the system is given explicitly
  model::PhysicalSystem system;
  model::PolarizabilityMode polarizability = model::PolarizabilityMode::single_oscillator;
  SweepAxis sweep;
  std::vector<Output> outputs = {Output::free_energy};
  matsubara::SeriesControl control;
  EnergyRoute route = EnergyRoute::automatic;
  entropy::FdSource fd_source = entropy::FdSource::automatic;
  std::vector<double> sigma_r_values = {0.0, 0.05, 0.1};
  Format format = Format::csv;
  std::string output_path;  // empty: standard output
};

struct SweepRow {
  double sweep_value = 0.0;
  std::string status = "ok";  // ok or the error code of the first failure
  std::string route;          // route of the free_energy column
  std::string message;        // failures, "; "-separated
  std::vector<std::optional<double>> values;  // parallel to SweepResult::columns
};

struct SweepResult {
  std::string sweep_variable;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
};

/// Keys accepted in each config section, as "section.key".
const std::vector<std::string>& config_keys();

/// Parses key = value sections. Throws IoError if unreadable, ValidationError on syntax errors.
boost::property_tree::ptree read_config_file(const std::string& path);

/// Builds and validates a RunConfig; ValidationError names the offending "section.key".
RunConfig parse_config(const boost::property_tree::ptree& tree);

/// Checks cross-field constraints; throws ValidationError.
void validate(const RunConfig& config);

/// "var:min:max:count:lin|log" into a SweepAxis.
SweepAxis parse_sweep(const std::string& spec);

/// Sweep values in order.
std::vector<double> sweep_values(const SweepAxis& axis);

/// The config's system with the sweep variable set to value.
model::PhysicalSystem system_at(const RunConfig& config, double value);

/// Column names of a sweep, which depend on the requested outputs.
std::vector<std::string> columns_for(const RunConfig& config);

/// Evaluates every sweep point; per-point failures are recorded in the row.
SweepResult evaluate(const RunConfig& config);

void write_csv(const SweepResult& result, std::ostream& out);
void write_json(const RunConfig& config, const SweepResult& result, std::ostream& out);

/// evaluate, then write to config.output_path (or out when empty). Throws IoError.
SweepResult run(const RunConfig& config, std::ostream& out);

struct Check {
  std::string name;
  std::string outcome;  // pass, fail, skipped
  double measured = 0.0;  // NaN when a route failed before producing a value
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool passed() const;
};

/// Runs the equivalence, entropy, regime-agreement and positivity checks at
/// the config's system (the sweep is ignored).
VerifyReport verify(const RunConfig& config);

void print_report(const VerifyReport& report, std::ostream& out);

struct Preset {
  std::string name;
  std::string description;
  model::PhysicalSystem system;
};

const std::vector<Preset>& presets();
const Preset& preset(const std::string& name);

void print_presets(std::ostream& out);

/// Documented exit codes.
enum ExitCode : int { success = 0, validation_failure = 1, convergence_failure = 2, io_failure = 3, verify_failure = 4 };

/// Short error code used in row status columns.
std::string error_code(const std::exception& e);

std::string to_string(SweepVariable v);
std::string to_string(Output o);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

}  // namespace cpshell::cli
