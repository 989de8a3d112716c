#include "emgame/game_model.hpp"

#include <cmath>
#include <numeric>

#include "emgame/errors.hpp"

namespace emgame {

namespace {

// Relative window (in units of the horizon) inside which a switch time is
// snapped onto t0 or T.
constexpr double kSwitchSnap = 1e-12;

}  // namespace

GameSpec::GameSpec(std::vector<PlayerParams> players, double t0, double T, double delta,
                   double x0)
    : players_(std::move(players)), t0_(t0), T_(T), delta_(delta), x0_(x0) {
  if (players_.empty()) throw ConfigError("game needs at least one player");
  if (!std::isfinite(t0_) || !std::isfinite(T_) || !(T_ > t0_))
    throw ConfigError("horizon must satisfy T > t0");
  if (!std::isfinite(delta_) || !(delta_ > 0.0)) throw ConfigError("delta must be > 0");
  if (!std::isfinite(x0_) || x0_ < 0.0) throw ConfigError("x0 must be >= 0");
  for (const auto& p : players_) {
    if (!std::isfinite(p.b) || !(p.b > 0.0))
      throw ConfigError("player '" + p.name + "': b must be > 0");
    if (!std::isfinite(p.d) || p.d < 0.0)
      throw ConfigError("player '" + p.name + "': d must be >= 0");
  }
}

double GameSpec::total_b() const {
  return std::accumulate(players_.begin(), players_.end(), 0.0,
                         [](double acc, const PlayerParams& p) { return acc + p.b; });
}

double GameSpec::total_d() const {
  return std::accumulate(players_.begin(), players_.end(), 0.0,
                         [](double acc, const PlayerParams& p) { return acc + p.d; });
}

const char* to_string(Mode mode) { return mode == Mode::nash ? "nash" : "cooperative"; }

const char* to_string(Regime regime) {
  return regime == Regime::interior ? "interior" : "switching";
}

std::vector<PlayerParams> derive_coefficients(std::span<const RawCompanyData> companies) {
  if (companies.empty()) throw ConfigError("no companies to derive coefficients from");
  double total_volume = 0.0;
  for (const auto& c : companies) {
    if (c.emission_volume == 0.0)
      throw DomainError("company '" + c.name + "' has zero emission volume");
    if (!(c.operating_profit > 0.0))
      throw ConfigError("company '" + c.name + "': operating profit must be > 0");
    if (!(c.emission_volume > 0.0))
      throw ConfigError("company '" + c.name + "': emission volume must be > 0");
    if (!(c.pollution_payment >= 0.0))
      throw ConfigError("company '" + c.name + "': pollution payment must be >= 0");
    total_volume += c.emission_volume;
  }

  std::vector<PlayerParams> out;
  out.reserve(companies.size());
  for (const auto& c : companies)
    out.push_back({c.name, c.operating_profit / c.emission_volume,
                   c.pollution_payment / total_volume});
  return out;
}

std::vector<double> split_joint_profit(double joint_profit, std::span<const double> outputs) {
  if (outputs.empty()) throw ConfigError("no outputs to split the joint profit over");
  if (!(joint_profit > 0.0)) throw ConfigError("joint profit must be > 0");
  double total = 0.0;
  for (double o : outputs) {
    if (o < 0.0 || !std::isfinite(o)) throw ConfigError("production outputs must be >= 0");
    total += o;
  }
  if (total == 0.0) throw DomainError("production outputs sum to zero");

  std::vector<double> shares;
  shares.reserve(outputs.size());
  for (double o : outputs) shares.push_back(joint_profit * (o / total));
  return shares;
}

double raw_switch_time(double b, double fine, double delta, double T) {
  return T + std::log1p(-b * delta / fine) / delta;
}

ModeRegime classify_control(double b, double fine, double delta, double t0, double T) {
  // The control never leaves [0,b] when delta >= fine/b, and the switch time
  // is bounded below by T - b/fine, so T <= t0 + b/fine also rules it out.
  if (fine == 0.0 || delta * b >= fine) return {};
  if (T <= t0 + b / fine) return {};

  const double snap = kSwitchSnap * (T - t0);
  const double ts = raw_switch_time(b, fine, delta, T);
  if (ts <= t0 + snap) return {};
  if (ts >= T - snap) return {Regime::switching, std::nullopt};
  return {Regime::switching, ts};
}

RegimeReport classify_regimes(const GameSpec& spec) {
  RegimeReport report;
  report.players.reserve(spec.size());
  const double dN = spec.total_d();
  for (const auto& p : spec.players()) {
    report.players.push_back({classify_control(p.b, p.d, spec.delta(), spec.t0(), spec.T()),
                              classify_control(p.b, dN, spec.delta(), spec.t0(), spec.T())});
  }
  return report;
}

}  // namespace emgame
