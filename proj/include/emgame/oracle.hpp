#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emgame/closed_form.hpp"
#include "emgame/game_model.hpp"

namespace emgame {

/// Piecewise-constant emission rates on a uniform grid of `steps` cells over
/// [t0, T], one row per player. Every rate lies in [0, b_i].
class GridControl {
 public:
  GridControl(const GameSpec& spec, std::size_t steps, std::vector<std::vector<double>> rates);

  static GridControl constant(const GameSpec& spec, std::size_t steps, double fraction_of_b);
  /// Closed-form controls sampled at cell midpoints.
  static GridControl sample(const GameSpec& spec, const Profile& profile, std::size_t steps);

  std::size_t steps() const { return steps_; }
  std::size_t players() const { return rates_.size(); }
  double step_width() const { return h_; }
  std::span<const double> row(std::size_t i) const { return rates_.at(i); }
  const std::vector<std::vector<double>>& rows() const { return rates_; }

  /// Replaces one row; rejects rates outside [0, b_i].
  void set_row(std::size_t i, std::vector<double> row);

 private:
  std::size_t steps_;
  double h_;
  std::vector<double> upper_;
  std::vector<std::vector<double>> rates_;
};

struct Simulation {
  std::vector<double> stock;    ///< x at the N+1 grid nodes
  std::vector<double> payoffs;  ///< K_i at spec.x0
};

struct OracleOptions {
  std::size_t steps = 10000;
  /// Stationarity tolerance on the projected step, relative to b_i.
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;
  /// Fraction of the 1/h step given by the per-cell curvature.
  double step_scale = 1.0;
};

struct BestResponse {
  std::vector<double> row;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> payoff_trace;  ///< K_i after each iteration
};

struct OracleReport {
  Mode mode = Mode::nash;
  bool converged = false;
  std::size_t iterations = 0;
  double control_gap = 0.0;          ///< sup |grid - closed form at midpoints|
  std::vector<double> payoff_gap;    ///< per player, relative
  double joint_payoff_gap = 0.0;     ///< relative gap of the summed payoffs
  double pontryagin_residual = 0.0;  ///< of the closed-form profile
  std::vector<std::vector<double>> solution;
};

struct PontryaginReport {
  double max_residual = 0.0;  ///< |psi' - fine - delta psi| / fine on interior arcs
  double terminal = 0.0;      ///< max_i |psi_i(T)| / b_i
};

/// Exponential-integrator simulation; exact for piecewise-constant rates.
Simulation simulate(const GameSpec& spec, const GridControl& grid);

/// Projected-gradient ascent on player i's payoff with the other rows fixed,
/// starting from the grid's row i. Throws ConvergenceError on budget exhaustion.
BestResponse best_response(const GameSpec& spec, std::size_t i, const GridControl& grid,
                           const OracleOptions& options = {});

/// Best-response sweeps in player order from u_i = b_i until a sweep changes
/// nothing; compared with the closed-form Nash profile.
OracleReport iterated_best_response(const GameSpec& spec, const OracleOptions& options = {});

/// Projected-gradient ascent on the summed payoff; compared with the
/// closed-form cooperative profile.
OracleReport joint_optimum(const GameSpec& spec, const OracleOptions& options = {});

/// Adjoint residual of psi_i = u_i - b_i by central differences on every
/// interior (exp) arc.
PontryaginReport pontryagin_residual(const GameSpec& spec, const Profile& profile, Mode mode);

}  // namespace emgame
