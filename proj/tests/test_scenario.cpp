#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emgame/errors.hpp"
#include "emgame/scenario.hpp"
#include "test_support.hpp"

namespace emgame::scenario {
namespace {

namespace fs = std::filesystem;

const fs::path kDataFile = fs::path(EMGAME_DATA_DIR) / "eastern_siberia_2016.yaml";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("emgame_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int config_error_line(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.line().value_or(-1);
  }
  return 0;
}

const char* kDirect = R"(game:
  T: 1
  delta: 0.3
players:
  - {name: a, b: 2, d: 0.5}
  - {name: b, b: 1, d: 0.25}
)";

TEST(ScenarioConfig, BundledDataGivesReferenceCoefficients) {
  const auto cfg = load_config(kDataFile);
  EXPECT_EQ(cfg.deltas, (std::vector<double>{0.02, 0.2}));
  const auto players = resolve_players(cfg);
  const auto expected = testing::smelters();
  ASSERT_EQ(players.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(players[i].name, expected[i].name);
    EXPECT_DOUBLE_EQ(players[i].b, expected[i].b);
    EXPECT_DOUBLE_EQ(players[i].d, expected[i].d);
  }
  const auto companies = resolve_companies(cfg);
  EXPECT_DOUBLE_EQ(companies[1].operating_profit, 2979.51e6);
  EXPECT_DOUBLE_EQ(companies[2].operating_profit, 1230.92e6);
}

TEST(ScenarioConfig, UnroundedCoefficients) {
  auto cfg = load_config(kDataFile);
  cfg.coefficient_decimals.reset();
  const auto players = resolve_players(cfg);
  EXPECT_NEAR(players[0].b, 59035.12, 0.05);
  EXPECT_NEAR(players[2].b, 47906.72, 0.05);
  EXPECT_NEAR(players[1].d, 351.64, 0.05);
}

TEST(ScenarioConfig, DirectPlayers) {
  const auto cfg = parse_config(kDirect);
  const auto g = make_game(cfg, 0.3);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g.T(), 1.0);
  EXPECT_DOUBLE_EQ(g.player(1).d, 0.25);
  EXPECT_TRUE(resolve_companies(cfg).empty());
}

TEST(ScenarioConfig, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error_line("game:\n  T: 1\n  delta: 0.3\n  colour: red\nplayers:\n"
                              "  - {name: a, b: 1, d: 0}\n"),
            4);
  EXPECT_EQ(config_error_line("game:\n  T: 1\n  delta: 0.3\nplayers:\n  - {name: a, b: 1, d: 0}\n"
                              "  - {name: b, b: -1, d: 0}\n"),
            6);
  EXPECT_EQ(config_error_line("game:\n  T: 1\n  delta: 0.3\nplayers:\n  - name: a\n"
                              "    b: 1\n    d: 0\n    emissions: 4\n"),
            5);
  EXPECT_GT(config_error_line("game:\n  T: 1\n  delta: -0.3\nplayers:\n  - {b: 1, d: 0}\n"), 0);
  EXPECT_GT(config_error_line("game: [1, 2\n"), 0);
}

TEST(ScenarioConfig, RejectsIncompleteDocuments) {
  EXPECT_NE(config_error_line("game:\n  T: 1\n  delta: 0.3\nplayers: []\n"), 0);
  EXPECT_NE(config_error_line("game:\n  T: 1\n  delta: 0.3\n"), 0);
  EXPECT_NE(config_error_line("game:\n  delta: 0.3\nplayers:\n  - {b: 1, d: 0}\n"), 0);
  EXPECT_NE(config_error_line("game:\n  T: 1\n  delta: 0.3\nplayers:\n"
                              "  - {profit: {pool: nope, output: 1}, emissions: 1,"
                              " pollution_payment: 1}\n"),
            0);
  EXPECT_NE(config_error_line("game:\n  T: 1\n  delta: 0.3\nplayers:\n"
                              "  - {profit: {value: 1, unit: usd}, emissions: 1,"
                              " pollution_payment: 1}\n"),
            0);
  EXPECT_THROW(load_config("/nonexistent/emgame.yaml"), ConfigError);
}

TEST(ScenarioConfig, Commands) {
  for (auto c : {Command::tables, Command::nash, Command::coop, Command::charfn,
                 Command::shapley, Command::gains, Command::verify})
    EXPECT_EQ(parse_command(to_string(c)), c);
  EXPECT_THROW(parse_command("everything"), ConfigError);
}

TEST(ScenarioRun, RawAndDirectInputsGiveIdenticalTables) {
  auto raw = load_config(kDataFile);
  raw.output.directory = scratch_dir("raw");
  std::ostringstream sink;
  ASSERT_EQ(run(raw, Command::tables, sink).exit_code, kExitOk);

  std::ostringstream yaml;
  yaml << "game:\n  T: 0.4\n  delta: [0.02, 0.2]\nplayers:\n";
  char buf[64];
  for (const auto& p : resolve_players(raw)) {
    yaml << "  - {name: " << p.name;
    std::snprintf(buf, sizeof buf, ", b: %.17g", p.b);
    yaml << buf;
    std::snprintf(buf, sizeof buf, ", d: %.17g}\n", p.d);
    yaml << buf;
  }
  auto direct = parse_config(yaml.str());
  direct.output.directory = scratch_dir("direct");
  ASSERT_EQ(run(direct, Command::tables, sink).exit_code, kExitOk);

  for (const char* name : {"table2_nash.csv", "table3_cooperative.csv", "table4_cooperation.csv",
                           "table5_characteristic_function.csv", "table6_shapley.csv"}) {
    const auto a = slurp(raw.output.directory / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(direct.output.directory / name)) << name;
  }
}

TEST(ScenarioRun, OutputIsDeterministic) {
  auto cfg = load_config(kDataFile);
  cfg.output.formats = {Format::csv, Format::text};
  std::ostringstream first_out, second_out;
  cfg.output.directory = scratch_dir("det1");
  const auto first = run(cfg, Command::tables, first_out);
  cfg.output.directory = scratch_dir("det2");
  const auto second = run(cfg, Command::tables, second_out);
  ASSERT_EQ(first.files.size(), second.files.size());
  EXPECT_EQ(first.files.size(), 12u);
  for (std::size_t k = 0; k < first.files.size(); ++k) {
    EXPECT_EQ(first.files[k].filename(), second.files[k].filename());
    EXPECT_EQ(slurp(first.files[k]), slurp(second.files[k]));
  }
  EXPECT_EQ(first_out.str(), second_out.str());
  EXPECT_NE(first_out.str().find("KrAS"), std::string::npos);
}

TEST(ScenarioRun, CommandsWriteTheirTables) {
  auto cfg = load_config(kDataFile);
  std::ostringstream sink;
  cfg.output.directory = scratch_dir("gains");
  const auto gains = run(cfg, Command::gains, sink);
  ASSERT_EQ(gains.files.size(), 2u);
  EXPECT_EQ(gains.files[0].filename(), "table4_cooperation.csv");
  EXPECT_EQ(gains.files[1].filename(), "table6_shapley.csv");
  const auto shapley = slurp(gains.files[1]);
  EXPECT_NE(shapley.find("delta"), std::string::npos);
  EXPECT_NE(shapley.find("benefits"), std::string::npos);
}

TEST(ScenarioRun, VerifyPassesOnTheBundledData) {
  auto cfg = load_config(kDataFile);
  cfg.oracle.options.steps = 2000;
  cfg.output.directory = scratch_dir("verify");
  std::ostringstream sink;
  const auto r = run(cfg, Command::verify, sink);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_FALSE(fs::exists(cfg.output.directory / "oracle_FAILED.txt"));
  const auto report = slurp(cfg.output.directory / "oracle_report.csv");
  EXPECT_EQ(report.find("FAIL"), std::string::npos);
}

TEST(ScenarioRun, OracleFailureIsFlagged) {
  auto cfg = load_config(kDataFile);
  cfg.oracle.options.steps = 200;
  cfg.oracle.control_gap_tol = 1e-15;
  cfg.output.directory = scratch_dir("fail_gap");
  std::ostringstream sink;
  EXPECT_EQ(run(cfg, Command::verify, sink).exit_code, kExitOracleFailure);
  EXPECT_TRUE(fs::exists(cfg.output.directory / "oracle_FAILED.txt"));

  cfg = load_config(kDataFile);
  cfg.oracle.options.steps = 200;
  cfg.oracle.options.max_iterations = 1;
  cfg.oracle.options.step_scale = 0.1;
  cfg.output.directory = scratch_dir("fail_budget");
  EXPECT_EQ(run(cfg, Command::verify, sink).exit_code, kExitOracleFailure);
  EXPECT_TRUE(fs::exists(cfg.output.directory / "oracle_FAILED.txt"));
}

}  // namespace
}  // namespace emgame::scenario
