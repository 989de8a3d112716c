#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "emgame/errors.hpp"
#include "emgame/scenario.hpp"

namespace emgame::scenario {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

[[noreturn]] void fail(const YAML::Node& at, const std::string& what) {
  const int line = line_of(at);
  if (line > 0) throw ConfigError(what, line);
  throw ConfigError(what);
}

void check_keys(const YAML::Node& map, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) fail(map, where + ": expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!ok.contains(key)) fail(kv.first, where + ": unknown key '" + key + "'");
  }
}

double as_number(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + ": expected a number");
  double v = 0.0;
  if (!YAML::convert<double>::decode(node, v) || !std::isfinite(v))
    fail(node, what + ": expected a number, got '" + node.Scalar() + "'");
  return v;
}

double required_number(const YAML::Node& map, const char* key, const std::string& where) {
  const auto node = map[key];
  if (!node) fail(map, where + ": missing '" + key + "'");
  return as_number(node, where + "." + key);
}

std::string as_string(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + ": expected a string");
  return node.Scalar();
}

std::vector<double> number_list(const YAML::Node& node, const std::string& what) {
  std::vector<double> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(as_number(item, what));
  } else {
    out.push_back(as_number(node, what));
  }
  return out;
}

// Money is either a plain number of rubles or {value, unit}.
double money(const YAML::Node& node, const std::string& what) {
  if (node.IsScalar()) return as_number(node, what);
  check_keys(node, what, {"value", "unit"});
  const double value = required_number(node, "value", what);
  const auto unit_node = node["unit"];
  const std::string unit = unit_node ? as_string(unit_node, what + ".unit") : "rub";
  static const std::map<std::string, double> scale{
      {"rub", 1.0}, {"ths_rub", 1e3}, {"mln_rub", 1e6}, {"bln_rub", 1e9}};
  const auto it = scale.find(unit);
  if (it == scale.end())
    fail(unit_node, what + ": unknown unit '" + unit + "' (rub, ths_rub, mln_rub, bln_rub)");
  return value * it->second;
}

void parse_game(const YAML::Node& game, ScenarioConfig& cfg) {
  check_keys(game, "game", {"t0", "T", "delta", "x0", "coefficient_decimals"});
  cfg.t0 = game["t0"] ? as_number(game["t0"], "game.t0") : 0.0;
  cfg.T = required_number(game, "T", "game");
  if (!(cfg.T > cfg.t0)) fail(game["T"], "game: T must be greater than t0");

  if (!game["delta"]) fail(game, "game: missing 'delta'");
  cfg.deltas = number_list(game["delta"], "game.delta");
  if (cfg.deltas.empty()) fail(game["delta"], "game.delta: list is empty");
  for (double d : cfg.deltas)
    if (!(d > 0.0)) fail(game["delta"], "game.delta: every delta must be > 0");

  if (game["x0"]) {
    cfg.x0s = number_list(game["x0"], "game.x0");
    for (double x : cfg.x0s)
      if (x < 0.0) fail(game["x0"], "game.x0: initial stock must be >= 0");
  }
  if (const auto dec = game["coefficient_decimals"]) {
    const double v = as_number(dec, "game.coefficient_decimals");
    if (v < 0 || v > 12 || v != std::floor(v))
      fail(dec, "game.coefficient_decimals: expected an integer in [0, 12]");
    cfg.coefficient_decimals = static_cast<int>(v);
  }
}

void parse_pools(const YAML::Node& pools, ScenarioConfig& cfg) {
  if (!pools.IsSequence()) fail(pools, "profit_pools: expected a list");
  for (const auto& p : pools) {
    check_keys(p, "profit_pools entry", {"name", "joint_profit", "round_shares_to"});
    ProfitPool pool;
    pool.line = line_of(p);
    if (!p["name"]) fail(p, "profit_pools entry: missing 'name'");
    pool.name = as_string(p["name"], "profit_pools.name");
    if (!p["joint_profit"]) fail(p, "profit pool '" + pool.name + "': missing 'joint_profit'");
    pool.joint_profit = money(p["joint_profit"], "profit pool '" + pool.name + "'");
    if (!(pool.joint_profit > 0.0))
      fail(p["joint_profit"], "profit pool '" + pool.name + "': joint profit must be > 0");
    if (const auto r = p["round_shares_to"]) {
      pool.round_shares_to = money(r, "profit pool '" + pool.name + "'.round_shares_to");
      if (!(*pool.round_shares_to > 0.0)) fail(r, "round_shares_to must be > 0");
    }
    for (const auto& other : cfg.pools)
      if (other.name == pool.name) fail(p, "duplicate profit pool '" + pool.name + "'");
    cfg.pools.push_back(pool);
  }
}

void parse_players(const YAML::Node& players, ScenarioConfig& cfg) {
  if (!players.IsSequence()) fail(players, "players: expected a list");
  if (players.size() == 0) fail(players, "players: at least one player is required");

  for (const auto& p : players) {
    check_keys(p, "player", {"name", "b", "d", "profit", "emissions", "pollution_payment"});
    PlayerEntry entry;
    entry.line = line_of(p);
    entry.name = p["name"] ? as_string(p["name"], "player.name")
                           : "player " + std::to_string(cfg.players.size() + 1);
    const std::string where = "player '" + entry.name + "'";

    const bool has_direct = p["b"] || p["d"];
    const bool has_raw = p["profit"] || p["emissions"] || p["pollution_payment"];
    if (has_direct == has_raw)
      fail(p, where + ": give either {b, d} or {profit, emissions, pollution_payment}");

    if (has_direct) {
      PlayerParams params{entry.name, required_number(p, "b", where),
                          required_number(p, "d", where)};
      if (!(params.b > 0.0)) fail(p["b"], where + ": b must be > 0");
      if (params.d < 0.0) fail(p["d"], where + ": d must be >= 0");
      entry.direct = params;
    } else {
      if (!p["profit"]) fail(p, where + ": missing 'profit'");
      const auto profit = p["profit"];
      ProfitSource src;
      if (profit.IsMap() && profit["pool"]) {
        check_keys(profit, where + ".profit", {"pool", "output"});
        src.pool = as_string(profit["pool"], where + ".profit.pool");
        src.output = required_number(profit, "output", where + ".profit");
        if (!(src.output >= 0.0)) fail(profit["output"], where + ": output must be >= 0");
      } else {
        src.amount = money(profit, where + ".profit");
        if (!(*src.amount > 0.0)) fail(profit, where + ": operating profit must be > 0");
      }
      entry.profit = src;
      entry.emissions = required_number(p, "emissions", where);
      if (!(entry.emissions > 0.0)) fail(p["emissions"], where + ": emissions must be > 0");
      if (!p["pollution_payment"]) fail(p, where + ": missing 'pollution_payment'");
      entry.pollution_payment = money(p["pollution_payment"], where + ".pollution_payment");
      if (entry.pollution_payment < 0.0)
        fail(p["pollution_payment"], where + ": pollution payment must be >= 0");
    }
    cfg.players.push_back(std::move(entry));
  }

  const bool first_direct = cfg.players.front().direct.has_value();
  for (std::size_t i = 0; i < cfg.players.size(); ++i)
    if (cfg.players[i].direct.has_value() != first_direct)
      fail(players[i], "players: mixing direct coefficients and raw company data");

  for (std::size_t i = 0; i < cfg.players.size(); ++i) {
    const auto& e = cfg.players[i];
    if (!e.profit || e.profit->pool.empty()) continue;
    bool known = false;
    for (const auto& pool : cfg.pools) known = known || pool.name == e.profit->pool;
    if (!known) fail(players[i]["profit"], "player '" + e.name + "': unknown profit pool '" +
                                               e.profit->pool + "'");
  }
}

void parse_output(const YAML::Node& out, ScenarioConfig& cfg) {
  check_keys(out, "output", {"directory", "formats", "precision"});
  if (out["directory"]) cfg.output.directory = as_string(out["directory"], "output.directory");
  if (const auto f = out["formats"]) {
    cfg.output.formats.clear();
    std::vector<YAML::Node> items;
    if (f.IsSequence())
      for (const auto& item : f) items.push_back(item);
    else
      items.push_back(f);
    for (const auto& item : items) {
      const auto name = as_string(item, "output.formats");
      if (name == "csv")
        cfg.output.formats.push_back(Format::csv);
      else if (name == "text")
        cfg.output.formats.push_back(Format::text);
      else
        fail(item, "output.formats: unknown format '" + name + "' (csv, text)");
    }
    if (cfg.output.formats.empty()) fail(f, "output.formats: list is empty");
  }
  if (const auto p = out["precision"]) {
    const double v = as_number(p, "output.precision");
    if (v < 1 || v > 17 || v != std::floor(v)) fail(p, "output.precision: expected 1..17");
    cfg.output.precision = static_cast<int>(v);
  }
}

void parse_oracle(const YAML::Node& o, ScenarioConfig& cfg) {
  check_keys(o, "oracle", {"enabled", "steps", "tolerance", "max_iterations", "step_scale",
                           "control_gap_tol", "payoff_gap_tol"});
  auto& s = cfg.oracle;
  if (const auto e = o["enabled"]) {
    bool v = false;
    if (!e.IsScalar() || !YAML::convert<bool>::decode(e, v))
      fail(e, "oracle.enabled: expected true or false");
    s.enabled = v;
  }
  if (const auto n = o["steps"]) {
    const double v = as_number(n, "oracle.steps");
    if (v < 2 || v != std::floor(v)) fail(n, "oracle.steps: expected an integer >= 2");
    s.options.steps = static_cast<std::size_t>(v);
  }
  if (const auto n = o["max_iterations"]) {
    const double v = as_number(n, "oracle.max_iterations");
    if (v < 1 || v != std::floor(v)) fail(n, "oracle.max_iterations: expected an integer >= 1");
    s.options.max_iterations = static_cast<std::size_t>(v);
  }
  const auto positive = [&](const char* key, double& dst) {
    if (const auto n = o[key]) {
      dst = as_number(n, std::string("oracle.") + key);
      if (!(dst > 0.0)) fail(n, std::string("oracle.") + key + ": must be > 0");
    }
  };
  positive("tolerance", s.options.tolerance);
  positive("step_scale", s.options.step_scale);
  positive("control_gap_tol", s.control_gap_tol);
  positive("payoff_gap_tol", s.payoff_gap_tol);
  if (s.options.step_scale > 1.0) fail(o["step_scale"], "oracle.step_scale: must be <= 1");
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping with a 'game' block");

  try {
    check_keys(root, "config", {"game", "profit_pools", "players", "output", "oracle"});
    ScenarioConfig cfg;
    if (!root["game"]) fail(root, "config: missing 'game' block");
    parse_game(root["game"], cfg);
    if (root["profit_pools"]) parse_pools(root["profit_pools"], cfg);
    if (!root["players"] || root["players"].IsNull())
      fail(root, "config: missing or empty 'players' block");
    parse_players(root["players"], cfg);
    if (root["output"]) parse_output(root["output"], cfg);
    if (root["oracle"]) parse_oracle(root["oracle"], cfg);
    return cfg;
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<RawCompanyData> resolve_companies(const ScenarioConfig& config) {
  std::vector<RawCompanyData> companies;
  if (config.players.empty() || config.players.front().direct) return companies;

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < config.players.size(); ++i)
    if (!config.players[i].profit->pool.empty())
      members[config.players[i].profit->pool].push_back(i);

  std::vector<double> profit(config.players.size(), 0.0);
  for (std::size_t i = 0; i < config.players.size(); ++i)
    if (config.players[i].profit->amount) profit[i] = *config.players[i].profit->amount;

  for (const auto& pool : config.pools) {
    const auto it = members.find(pool.name);
    if (it == members.end()) continue;
    std::vector<double> outputs;
    for (std::size_t i : it->second) outputs.push_back(config.players[i].profit->output);
    auto shares = split_joint_profit(pool.joint_profit, outputs);
    for (std::size_t k = 0; k < shares.size(); ++k) {
      if (pool.round_shares_to)
        shares[k] = std::round(shares[k] / *pool.round_shares_to) * *pool.round_shares_to;
      profit[it->second[k]] = shares[k];
    }
  }

  for (std::size_t i = 0; i < config.players.size(); ++i) {
    const auto& e = config.players[i];
    companies.push_back({e.name, profit[i], e.emissions, e.pollution_payment});
  }
  return companies;
}

std::vector<PlayerParams> resolve_players(const ScenarioConfig& config) {
  std::vector<PlayerParams> players;
  if (config.players.empty()) throw ConfigError("players: at least one player is required");
  if (config.players.front().direct) {
    for (const auto& e : config.players) players.push_back(*e.direct);
  } else {
    players = derive_coefficients(resolve_companies(config));
  }
  if (config.coefficient_decimals) {
    const double scale = std::pow(10.0, *config.coefficient_decimals);
    for (auto& p : players) {
      p.b = std::round(p.b * scale) / scale;
      p.d = std::round(p.d * scale) / scale;
    }
  }
  return players;
}

GameSpec make_game(const ScenarioConfig& config, double delta) {
  return {resolve_players(config), config.t0, config.T, delta, 0.0};
}

Command parse_command(std::string_view name) {
  static const std::pair<std::string_view, Command> table[] = {
      {"tables", Command::tables}, {"nash", Command::nash},       {"coop", Command::coop},
      {"charfn", Command::charfn}, {"shapley", Command::shapley}, {"gains", Command::gains},
      {"verify", Command::verify}};
  for (const auto& [key, cmd] : table)
    if (key == name) return cmd;
  throw ConfigError("unknown command '" + std::string(name) +
                    "' (tables, nash, coop, charfn, shapley, gains, verify)");
}

const char* to_string(Command command) {
  switch (command) {
    case Command::tables: return "tables";
    case Command::nash: return "nash";
    case Command::coop: return "coop";
    case Command::charfn: return "charfn";
    case Command::shapley: return "shapley";
    case Command::gains: return "gains";
    case Command::verify: return "verify";
  }
  return "?";
}

}  // namespace emgame::scenario
