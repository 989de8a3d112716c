// Command-line front end: runs a pollution-control scenario and writes its
// tables as CSV and/or aligned text.

#include <CLI11.hpp>

#include <iostream>

#include "emgame/errors.hpp"
#include "emgame/scenario.hpp"

namespace sc = emgame::scenario;

int main(int argc, char** argv) {
  CLI::App app{"Open-loop Nash and cooperative emission strategies, coalition values and "
               "Shapley allocations for linear-state pollution games"};

  std::string config_path;
  std::string command = "tables";
  std::vector<double> deltas;
  std::vector<double> x0s;
  std::string out_dir;
  std::size_t verify_steps = 0;
  std::string format;
  int precision = 0;

  app.add_option("--config", config_path, "Scenario YAML file")->required();
  app.add_option("--command", command, "tables|nash|coop|charfn|shapley|gains|verify")
      ->capture_default_str();
  app.add_option("--delta", deltas, "Decay rate(s); replaces the config's delta list");
  app.add_option("--x0", x0s, "Initial stock value(s) at which to evaluate payoffs");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--verify-steps", verify_steps, "Oracle grid size")->check(CLI::Range(2, 100000000));
  app.add_option("--format", format, "csv|text")->check(CLI::IsMember({"csv", "text"}));
  app.add_option("--precision", precision, "Significant digits")->check(CLI::Range(1, 17));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sc::kExitConfigError;
  }

  try {
    auto config = sc::load_config(config_path);
    const auto cmd = sc::parse_command(command);
    if (!deltas.empty()) {
      for (double d : deltas)
        if (!(d > 0.0)) throw emgame::ConfigError("--delta values must be > 0");
      config.deltas = deltas;
    }
    if (!x0s.empty()) {
      for (double x : x0s)
        if (x < 0.0) throw emgame::ConfigError("--x0 values must be >= 0");
      config.x0s = x0s;
    }
    if (!out_dir.empty()) config.output.directory = out_dir;
    if (verify_steps > 0) config.oracle.options.steps = verify_steps;
    if (!format.empty()) config.output.formats = {format == "csv" ? sc::Format::csv : sc::Format::text};
    if (precision > 0) config.output.precision = precision;

    const auto result = sc::run(config, cmd, std::cout);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    if (result.exit_code == sc::kExitOracleFailure)
      std::cerr << config_path << ": oracle verification failed, see "
                << (config.output.directory / "oracle_FAILED.txt").string() << '\n';
    return result.exit_code;
  } catch (const emgame::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return sc::kExitConfigError;
  } catch (const emgame::DomainError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return sc::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
