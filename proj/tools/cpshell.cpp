// cpshell run|verify|presets

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>

#include "cpshell/cli.hpp"
#include "cpshell/errors.hpp"

namespace {

using namespace cpshell;

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> keys;  // "section.key" -> value
  std::string sweep;
};

void add_config_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
  cmd.add_option_function<std::string>("--output", [&o](const std::string& v) { o.keys["output.path"] = v; },
                                       "Output file (default: stdout)");
  cmd.add_option_function<std::string>("--format", [&o](const std::string& v) { o.keys["output.format"] = v; },
                                       "csv or json");
  cmd.add_option_function<std::string>("--preset", [&o](const std::string& v) { o.keys["system.preset"] = v; },
                                       "Named parameter preset");
  cmd.add_option("--sweep", o.sweep, "var:min:max:count:lin|log");
  cmd.add_option_function<std::string>("--rel-tol", [&o](const std::string& v) { o.keys["control.rel_tol"] = v; },
                                       "Relative tolerance of every series and quadrature");
  for (const std::string& key : cli::config_keys()) {
    cmd.add_option_function<std::string>("--" + key, [&o, key](const std::string& v) { o.keys[key] = v; },
                                         "Overrides " + key)
        ->group("Config keys");
  }
}

cli::RunConfig build_config(const Overrides& o) {
  boost::property_tree::ptree tree;
  if (!o.config_path.empty()) tree = cli::read_config_file(o.config_path);
  if (!o.sweep.empty()) {
    const cli::SweepAxis axis = cli::parse_sweep(o.sweep);
    tree.put("sweep.variable", cli::to_string(axis.variable));
    tree.put("sweep.min", cli::format_number(axis.min));
    tree.put("sweep.max", cli::format_number(axis.max));
    tree.put("sweep.count", axis.count);
    tree.put("sweep.spacing", axis.spacing == cli::Spacing::log ? "log" : "lin");
  }
  for (const auto& [key, value] : o.keys) tree.put(key, value);
  if (!tree.get_optional<std::string>("system.preset") && !tree.get_child_optional("system")) {
    tree.put("system.preset", "c60-hydrogen");
  }
  return cli::parse_config(tree);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return cli::io_failure;
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const PrecisionError*>(&e) ||
      dynamic_cast<const SingularityError*>(&e)) {
    return cli::convergence_failure;
  }
  return cli::validation_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal Casimir-Polder free energy of an atom near a thin plasma sphere"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Evaluate a sweep and write CSV or JSON");
  add_config_options(*run, run_opts);

  Overrides verify_opts;
  auto* verify = app.add_subcommand("verify", "Run the consistency checks at the configured point");
  add_config_options(*verify, verify_opts);

  app.add_subcommand("presets", "List the built-in parameter presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::success : cli::validation_failure;
  }

  try {
    if (run->parsed()) {
      cli::run(build_config(run_opts), std::cout);
      return cli::success;
    }
    if (verify->parsed()) {
      const cli::VerifyReport report = cli::verify(build_config(verify_opts));
      cli::print_report(report, std::cout);
      return report.passed() ? cli::success : cli::verify_failure;
    }
    cli::print_presets(std::cout);
    return cli::success;
  } catch (const std::exception& e) {
    std::cerr << "cpshell: " << cli::error_code(e) << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}
