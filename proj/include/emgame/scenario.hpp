#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emgame/game_model.hpp"
#include "emgame/oracle.hpp"

namespace emgame::scenario {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitOracleFailure = 3;

/// Profit of a player: either a fixed amount or a share of a pool split in
/// proportion to production output.
struct ProfitSource {
  std::optional<double> amount;  // rubles
  std::string pool;
  double output = 0.0;
};

struct PlayerEntry {
  std::string name;
  int line = 0;
  std::optional<PlayerParams> direct;
  // raw inputs, all in rubles / tons
  std::optional<ProfitSource> profit;
  double emissions = 0.0;
  double pollution_payment = 0.0;
};

struct ProfitPool {
  std::string name;
  int line = 0;
  double joint_profit = 0.0;                ///< rubles
  std::optional<double> round_shares_to;    ///< rubles
};

enum class Format { csv, text };

struct OutputOptions {
  std::filesystem::path directory = "out";
  std::vector<Format> formats{Format::csv};
  int precision = 6;
};

struct OracleSettings {
  bool enabled = false;
  OracleOptions options;
  double control_gap_tol = 1e-3;  ///< relative to max b_i
  double payoff_gap_tol = 1e-6;   ///< relative
};

struct ScenarioConfig {
  double t0 = 0.0;
  double T = 0.0;
  std::vector<double> deltas;
  std::vector<double> x0s;
  std::optional<int> coefficient_decimals;
  std::vector<ProfitPool> pools;
  std::vector<PlayerEntry> players;
  OutputOptions output;
  OracleSettings oracle;
};

/// Parses and validates a YAML scenario document. Errors carry the line.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Raw company records after resolving profit pools (empty for direct configs).
std::vector<RawCompanyData> resolve_companies(const ScenarioConfig& config);

/// Model coefficients, derived from raw data when needed and rounded to
/// `coefficient_decimals` when set.
std::vector<PlayerParams> resolve_players(const ScenarioConfig& config);

/// Game for one delta of the sweep, x0 = 0.
GameSpec make_game(const ScenarioConfig& config, double delta);

enum class Command { tables, nash, coop, charfn, shapley, gains, verify };

Command parse_command(std::string_view name);
const char* to_string(Command command);

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

/// Runs a command and writes its tables under config.output.directory.
/// Text-format tables are also echoed to `out`.
RunResult run(const ScenarioConfig& config, Command command, std::ostream& out);

}  // namespace emgame::scenario
