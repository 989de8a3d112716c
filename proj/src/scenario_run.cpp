#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "emgame/closed_form.hpp"
#include "emgame/coalition.hpp"
#include "emgame/errors.hpp"
#include "emgame/scenario.hpp"

namespace emgame::scenario {

namespace {

struct Table {
  std::string name;
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

class Formatter {
 public:
  explicit Formatter(int precision) : precision_(precision) {}

  std::string operator()(double v) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
    return buf;
  }
  std::string operator()(std::optional<double> v) const { return v ? (*this)(*v) : ""; }
  int precision() const { return precision_; }

 private:
  int precision_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const Table& t) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string to_text(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
  for (const auto& r : t.rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());

  std::string out = t.title + "\n";
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += "  ";
      out += cells[c];
      if (c + 1 < cells.size()) out.append(width[c] - cells[c].size(), ' ');
    }
    out += '\n';
  };
  line(t.header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  out.append(total > 2 ? total - 2 : 0, '-');
  out += '\n';
  for (const auto& r : t.rows) line(r);
  return out;
}

// Appends one column per requested x0 evaluating an affine payoff.
void x0_headers(std::vector<std::string>& header, const ScenarioConfig& cfg,
                const Formatter& fmt) {
  for (double x0 : cfg.x0s) header.push_back("at_x0=" + fmt(x0));
}

void x0_cells(std::vector<std::string>& row, const ScenarioConfig& cfg, const Formatter& fmt,
              const AffinePayoff& v) {
  for (double x0 : cfg.x0s) row.push_back(fmt(v(x0)));
}

Table coefficients_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table1_coefficients", "Model coefficients",
          {"player", "name", "profit_rub", "emissions_t", "pollution_payment_rub", "b", "d"},
          {}};
  const auto companies = resolve_companies(cfg);
  const auto players = resolve_players(cfg);
  for (std::size_t i = 0; i < players.size(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1), players[i].name};
    if (companies.empty()) {
      row.insert(row.end(), {"", "", ""});
    } else {
      row.push_back(fmt(companies[i].operating_profit));
      row.push_back(fmt(companies[i].emission_volume));
      row.push_back(fmt(companies[i].pollution_payment));
    }
    row.push_back(fmt(players[i].b));
    row.push_back(fmt(players[i].d));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> strategy_cells(const PiecewiseControl& c, Regime regime,
                                        const Formatter& fmt) {
  return {to_string(regime), fmt(c.level()), fmt(c.amplitude()), fmt(c.switch_time()),
          c.formula(fmt.precision())};
}

Table nash_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table2_nash", "Nash equilibrium strategies and payoffs",
          {"delta", "player", "name", "regime", "c0", "c1", "switch_time", "formula",
           "payoff_intercept", "payoff_x0_slope"},
          {}};
  x0_headers(t.header, cfg, fmt);
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    const auto regimes = classify_regimes(spec);
    const auto profile = nash_controls(spec);
    const auto payoffs = profile_payoffs(spec, profile);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      std::vector<std::string> row{fmt(delta), std::to_string(i + 1), spec.player(i).name};
      for (auto& cell : strategy_cells(profile[i], regimes.players[i].nash.regime, fmt))
        row.push_back(std::move(cell));
      row.push_back(fmt(payoffs[i].intercept));
      row.push_back(fmt(payoffs[i].x0_slope));
      x0_cells(row, cfg, fmt, payoffs[i]);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cooperative_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table3_cooperative", "Optimal cooperative strategies",
          {"delta", "player", "name", "regime", "c0", "c1", "switch_time", "formula"},
          {}};
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    const auto regimes = classify_regimes(spec);
    const auto profile = cooperative_controls(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      std::vector<std::string> row{fmt(delta), std::to_string(i + 1), spec.player(i).name};
      for (auto& cell : strategy_cells(profile[i], regimes.players[i].cooperative.regime, fmt))
        row.push_back(std::move(cell));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cooperation_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table4_cooperation",
          "Emission and stock gaps between Nash and cooperation; joint cooperative payoff",
          {"delta", "emission_gap_scale", "emission_gap_formula", "emission_gap_at_t0",
           "stock_gap_T", "joint_coop_intercept", "joint_coop_x0_slope", "joint_gain"},
          {}};
  x0_headers(t.header, cfg, fmt);
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    const auto nash = nash_controls(spec);
    const auto coop = cooperative_controls(spec);
    const double gap_T = stock_trajectory(spec, nash).value(spec.T()) -
                         stock_trajectory(spec, coop).value(spec.T());
    const auto gains = cooperation_gains(spec);

    bool interior = true;
    for (std::size_t i = 0; i < spec.size(); ++i)
      interior = interior && !nash[i].switch_time() && !coop[i].switch_time() &&
                 nash[i].segments().front().form == SegmentForm::exp &&
                 coop[i].segments().front().form == SegmentForm::exp;

    std::vector<std::string> row{fmt(delta)};
    if (interior) {
      const double scale = static_cast<double>(spec.size() - 1) * spec.total_d() / delta;
      row.push_back(fmt(scale));
      row.push_back(fmt(scale) + "*(1 - e^{" + fmt(delta) + "(t-" + fmt(spec.T()) + ")})");
    } else {
      row.push_back("");
      row.push_back("switching regime: evaluate profiles");
    }
    row.push_back(fmt(total_emission_gap(spec, spec.t0())));
    row.push_back(fmt(gap_T));
    row.push_back(fmt(gains.joint_cooperative.intercept));
    row.push_back(fmt(gains.joint_cooperative.x0_slope));
    row.push_back(fmt(gains.joint_gain));
    x0_cells(row, cfg, fmt, gains.joint_cooperative);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table charfn_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table5_characteristic_function", "Characteristic function",
          {"delta", "coalition", "size", "intercept", "x0_slope"},
          {}};
  x0_headers(t.header, cfg, fmt);
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    const auto cf = characteristic_function(spec);
    // Ordered by size, then by mask, so {1},{2},{3},{1,2},... as in the usual listing.
    std::vector<Coalition> order;
    for (std::uint64_t m = 1; m < cf.coalitions(); ++m) order.emplace_back(m);
    std::stable_sort(order.begin(), order.end(),
                     [](Coalition a, Coalition b) { return a.size() < b.size(); });
    for (Coalition s : order) {
      const auto& v = cf.at(s);
      std::vector<std::string> row{fmt(delta), s.label(), std::to_string(s.size()),
                                   fmt(v.intercept), fmt(v.x0_slope)};
      x0_cells(row, cfg, fmt, v);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table shapley_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  Table t{"table6_shapley", "Shapley value and gain over the Nash payoff",
          {"delta", "player", "name", "shapley_intercept", "shapley_x0_slope", "nash_intercept",
           "gain", "benefits"},
          {}};
  x0_headers(t.header, cfg, fmt);
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    const auto gains = cooperation_gains(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const auto& g = gains.players[i];
      std::vector<std::string> row{fmt(delta),           std::to_string(i + 1),
                                   spec.player(i).name,  fmt(g.shapley.intercept),
                                   fmt(g.shapley.x0_slope), fmt(g.nash.intercept),
                                   fmt(g.gain),          g.benefits ? "yes" : "no"};
      x0_cells(row, cfg, fmt, g.shapley);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

struct OracleOutcome {
  Table table;
  std::vector<std::string> failures;
};

OracleOutcome oracle_table(const ScenarioConfig& cfg, const Formatter& fmt) {
  OracleOutcome out{{"oracle_report", "Discretized oracle versus closed forms",
                     {"delta", "mode", "status", "converged", "iterations", "control_gap",
                      "control_gap_limit", "max_payoff_gap", "joint_payoff_gap",
                      "pontryagin_residual"},
                     {}},
                    {}};
  const auto& s = cfg.oracle;
  for (double delta : cfg.deltas) {
    const auto spec = make_game(cfg, delta);
    double max_b = 0.0;
    for (const auto& p : spec.players()) max_b = std::max(max_b, p.b);
    const double limit = s.control_gap_tol * max_b;

    for (Mode mode : {Mode::nash, Mode::cooperative}) {
      std::vector<std::string> row{fmt(delta), to_string(mode)};
      try {
        const auto rep = mode == Mode::nash ? iterated_best_response(spec, s.options)
                                            : joint_optimum(spec, s.options);
        const double payoff_gap =
            *std::max_element(rep.payoff_gap.begin(), rep.payoff_gap.end());
        const bool ok = rep.converged && rep.control_gap <= limit &&
                        payoff_gap <= s.payoff_gap_tol && rep.joint_payoff_gap <= s.payoff_gap_tol;
        if (!ok)
          out.failures.push_back("delta=" + fmt(delta) + " " + to_string(mode) +
                                 ": gap above tolerance");
        row.insert(row.end(), {ok ? "ok" : "FAILED", rep.converged ? "yes" : "no",
                               std::to_string(rep.iterations), fmt(rep.control_gap), fmt(limit),
                               fmt(payoff_gap), fmt(rep.joint_payoff_gap),
                               fmt(rep.pontryagin_residual)});
      } catch (const ConvergenceError& e) {
        out.failures.push_back("delta=" + fmt(delta) + " " + to_string(mode) + ": " + e.what());
        row.insert(row.end(), {"FAILED", "no", "", "", fmt(limit), "", "", ""});
      }
      out.table.rows.push_back(std::move(row));
    }
  }
  return out;
}

class Emitter {
 public:
  Emitter(const ScenarioConfig& cfg, std::ostream& echo) : cfg_(cfg), echo_(echo) {
    std::filesystem::create_directories(cfg.output.directory);
  }

  void emit(const Table& t) {
    for (Format f : cfg_.output.formats) {
      const bool csv = f == Format::csv;
      const auto path = cfg_.output.directory / (t.name + (csv ? ".csv" : ".txt"));
      const auto body = csv ? to_csv(t) : to_text(t);
      write(path, body);
      if (!csv) echo_ << body << '\n';
    }
  }

  void write(const std::filesystem::path& path, const std::string& body) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + path.string() + "'");
    file << body;
    result.files.push_back(path);
  }

  RunResult result;

 private:
  const ScenarioConfig& cfg_;
  std::ostream& echo_;
};

}  // namespace

RunResult run(const ScenarioConfig& config, Command command, std::ostream& out) {
  // Validate the whole roster for every delta before writing anything.
  for (double delta : config.deltas) (void)make_game(config, delta);

  const Formatter fmt(config.output.precision);
  Emitter emitter(config, out);
  const auto marker = config.output.directory / "oracle_FAILED.txt";
  std::filesystem::remove(marker);

  const bool all = command == Command::tables;
  if (all) emitter.emit(coefficients_table(config, fmt));
  if (all || command == Command::nash) emitter.emit(nash_table(config, fmt));
  if (all || command == Command::coop) emitter.emit(cooperative_table(config, fmt));
  if (all || command == Command::gains) emitter.emit(cooperation_table(config, fmt));
  if (all || command == Command::charfn) emitter.emit(charfn_table(config, fmt));
  if (all || command == Command::shapley || command == Command::gains)
    emitter.emit(shapley_table(config, fmt));

  if (command == Command::verify || (all && config.oracle.enabled)) {
    auto outcome = oracle_table(config, fmt);
    emitter.emit(outcome.table);
    if (!outcome.failures.empty()) {
      std::string body;
      for (const auto& f : outcome.failures) body += f + "\n";
      emitter.write(marker, body);
      emitter.result.exit_code = kExitOracleFailure;
    }
  }
  return emitter.result;
}

}  // namespace emgame::scenario
