#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emgame {

/// Financial inputs of one polluter, in base units (rubles, tons).
struct RawCompanyData {
  std::string name;
  double operating_profit = 0.0;
  double emission_volume = 0.0;
  double pollution_payment = 0.0;
};

/// Revenue slope b (rub/t of emission) and fine rate d (rub/t of stock).
struct PlayerParams {
  std::string name;
  double b = 0.0;
  double d = 0.0;
};

/// Immutable description of one game instance. The constructor validates
/// T > t0, delta > 0, x0 >= 0, at least one player, b_i > 0 and d_i >= 0.
class GameSpec {
 public:
  GameSpec(std::vector<PlayerParams> players, double t0, double T, double delta, double x0 = 0.0);

  const std::vector<PlayerParams>& players() const { return players_; }
  const PlayerParams& player(std::size_t i) const { return players_.at(i); }
  std::size_t size() const { return players_.size(); }
  double t0() const { return t0_; }
  double T() const { return T_; }
  double delta() const { return delta_; }
  double x0() const { return x0_; }
  double horizon() const { return T_ - t0_; }

  double total_b() const;
  double total_d() const;

  GameSpec with_delta(double delta) const { return {players_, t0_, T_, delta, x0_}; }
  GameSpec with_x0(double x0) const { return {players_, t0_, T_, delta_, x0}; }
  GameSpec with_players(std::vector<PlayerParams> players) const {
    return {std::move(players), t0_, T_, delta_, x0_};
  }

 private:
  std::vector<PlayerParams> players_;
  double t0_;
  double T_;
  double delta_;
  double x0_;
};

enum class Mode { nash, cooperative };
enum class Regime { interior, switching };

const char* to_string(Mode mode);
const char* to_string(Regime regime);

/// Regime of one player's optimal control in one mode. `switch_time` is the
/// instant before which the control sits at 0. A switching regime without a
/// switch time means the control is 0 on the whole horizon.
struct ModeRegime {
  Regime regime = Regime::interior;
  std::optional<double> switch_time;

  bool zero_throughout() const { return regime == Regime::switching && !switch_time; }
};

struct PlayerRegimes {
  ModeRegime nash;
  ModeRegime cooperative;

  const ModeRegime& operator[](Mode mode) const {
    return mode == Mode::nash ? nash : cooperative;
  }
};

struct RegimeReport {
  std::vector<PlayerRegimes> players;
};

/// b_i = P_i / V_i, d_i = L_i / sum_j V_j.
std::vector<PlayerParams> derive_coefficients(std::span<const RawCompanyData> companies);

/// Splits a joint profit proportionally to production outputs.
std::vector<double> split_joint_profit(double joint_profit, std::span<const double> outputs);

/// Unclamped switch time T + ln(1 - b*delta/fine)/delta. Only meaningful when
/// delta < fine/b (the log argument then lies in (0,1)).
double raw_switch_time(double b, double fine, double delta, double T);

/// Regime of a control u = b - fine/delta + (fine/delta) e^{delta(t-T)}
/// constrained to [0,b] on [t0,T].
ModeRegime classify_control(double b, double fine, double delta, double t0, double T);

RegimeReport classify_regimes(const GameSpec& spec);

}  // namespace emgame
