#include "emgame/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "emgame/errors.hpp"
#include "emgame/kernels.hpp"

namespace emgame {

namespace {

namespace kp = kernels::parallel;

std::vector<double> total_rate(const std::vector<std::vector<double>>& rows) {
  std::vector<double> total(rows.front().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t k = 0; k < r.size(); ++k) total[k] += r[k];
  return total;
}

std::vector<double> grid_stock(double delta, double h, double x0, std::span<const double> rate) {
  const double decay = std::exp(-delta * h);
  const double gain = -std::expm1(-delta * h) / delta;
  std::vector<double> x(rate.size() + 1);
  x[0] = x0;
  for (std::size_t k = 0; k < rate.size(); ++k) x[k + 1] = decay * x[k] + gain * rate[k];
  return x;
}

double player_grid_payoff(const GameSpec& spec, std::size_t i, double h,
                          std::span<const double> row, std::span<const double> total,
                          std::span<const double> stock) {
  std::vector<double> terms(row.size());
  const auto& p = spec.player(i);
  kp::step_payoffs(p.b, p.d, spec.delta(), h, row, total, stock, terms);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

double relative_gap(double value, double reference, double scale) {
  return std::abs(value - reference) / std::max(std::abs(reference), scale);
}

// Fills the comparison fields of a report from its converged solution.
void compare_with_closed_form(const GameSpec& spec, const OracleOptions& options,
                              OracleReport& report) {
  const Profile closed = optimal_controls(spec, report.mode);
  const GridControl grid(spec, options.steps, report.solution);
  const auto sim = simulate(spec, grid);
  const auto exact = profile_payoffs(spec, closed);

  std::vector<double> sampled(options.steps);
  double joint_grid = 0.0;
  double joint_exact = 0.0;
  double joint_scale = 0.0;
  report.control_gap = 0.0;
  report.payoff_gap.clear();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    kp::sample_midpoints(closed[i], spec.t0(), grid.step_width(), sampled);
    report.control_gap = std::max(report.control_gap, kp::sup_gap(grid.row(i), sampled));
    const double k_exact = exact[i](spec.x0());
    const double scale = 0.5 * spec.player(i).b * spec.player(i).b * spec.horizon();
    report.payoff_gap.push_back(relative_gap(sim.payoffs[i], k_exact, scale));
    joint_grid += sim.payoffs[i];
    joint_exact += k_exact;
    joint_scale += scale;
  }
  report.joint_payoff_gap = relative_gap(joint_grid, joint_exact, joint_scale);
  report.pontryagin_residual = pontryagin_residual(spec, closed, report.mode).max_residual;
}

}  // namespace

GridControl::GridControl(const GameSpec& spec, std::size_t steps,
                         std::vector<std::vector<double>> rates)
    : steps_(steps), h_(spec.horizon() / static_cast<double>(steps)), rates_(std::move(rates)) {
  if (steps_ < 2) throw ConfigError("oracle grid needs at least 2 steps");
  if (rates_.size() != spec.size())
    throw std::invalid_argument("grid has " + std::to_string(rates_.size()) + " rows for " +
                                std::to_string(spec.size()) + " players");
  for (const auto& p : spec.players()) upper_.push_back(p.b);
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    auto row = std::move(rates_[i]);
    rates_[i].clear();
    set_row(i, std::move(row));
  }
}

void GridControl::set_row(std::size_t i, std::vector<double> row) {
  if (i >= rates_.size()) throw std::out_of_range("player index " + std::to_string(i));
  if (row.size() != steps_) throw std::invalid_argument("grid row has the wrong length");
  for (double u : row)
    if (!(u >= 0.0 && u <= upper_[i]))
      throw std::invalid_argument("grid rate " + std::to_string(u) + " of player " +
                                  std::to_string(i) + " outside [0, b]");
  rates_[i] = std::move(row);
}

GridControl GridControl::constant(const GameSpec& spec, std::size_t steps,
                                  double fraction_of_b) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : spec.players()) rows.emplace_back(steps, fraction_of_b * p.b);
  return {spec, steps, std::move(rows)};
}

GridControl GridControl::sample(const GameSpec& spec, const Profile& profile,
                                std::size_t steps) {
  const double h = spec.horizon() / static_cast<double>(steps);
  std::vector<std::vector<double>> rows;
  for (const auto& control : profile) {
    std::vector<double> row(steps);
    kp::sample_midpoints(control, spec.t0(), h, row);
    // Closed forms may overshoot the box by rounding at switch times.
    for (double& u : row) u = std::clamp(u, 0.0, control.upper_bound());
    rows.push_back(std::move(row));
  }
  return {spec, steps, std::move(rows)};
}

Simulation simulate(const GameSpec& spec, const GridControl& grid) {
  const auto total = total_rate(grid.rows());
  Simulation sim;
  sim.stock = grid_stock(spec.delta(), grid.step_width(), spec.x0(), total);
  for (std::size_t i = 0; i < spec.size(); ++i)
    sim.payoffs.push_back(
        player_grid_payoff(spec, i, grid.step_width(), grid.row(i), total, sim.stock));
  return sim;
}

BestResponse best_response(const GameSpec& spec, std::size_t i, const GridControl& grid,
                           const OracleOptions& options) {
  if (i >= spec.size()) throw std::out_of_range("player index " + std::to_string(i));
  const double h = grid.step_width();
  const auto& p = spec.player(i);

  std::vector<double> sens(grid.steps());
  kp::stock_sensitivity(spec.delta(), h, sens);

  // Stock driven by the other players only; player i's part is added per trace point.
  std::vector<double> others(grid.steps(), 0.0);
  for (std::size_t j = 0; j < grid.players(); ++j) {
    if (j == i) continue;
    const auto row = grid.row(j);
    for (std::size_t k = 0; k < others.size(); ++k) others[k] += row[k];
  }

  BestResponse out;
  out.row.assign(grid.row(i).begin(), grid.row(i).end());
  std::vector<double> total(grid.steps());
  const auto payoff_now = [&] {
    for (std::size_t k = 0; k < total.size(); ++k) total[k] = others[k] + out.row[k];
    const auto stock = grid_stock(spec.delta(), h, spec.x0(), total);
    return player_grid_payoff(spec, i, h, out.row, total, stock);
  };

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const double change = kp::ascent_step(out.row, p.b, p.d, sens, h, options.step_scale);
    out.iterations = it;
    out.residual = change / p.b;
    out.payoff_trace.push_back(payoff_now());
    if (out.residual <= options.tolerance) return out;
  }
  throw ConvergenceError("best response of player " + std::to_string(i + 1) +
                             " did not converge in " + std::to_string(options.max_iterations) +
                             " iterations",
                         out.residual);
}

OracleReport iterated_best_response(const GameSpec& spec, const OracleOptions& options) {
  GridControl grid = GridControl::constant(spec, options.steps, 1.0);
  OracleReport report;
  report.mode = Mode::nash;

  double sweep_change = 0.0;
  for (std::size_t sweep = 1; sweep <= options.max_iterations; ++sweep) {
    sweep_change = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      auto br = best_response(spec, i, grid, options);
      sweep_change =
          std::max(sweep_change, kp::sup_gap(br.row, grid.row(i)) / spec.player(i).b);
      grid.set_row(i, std::move(br.row));
    }
    report.iterations = sweep;
    if (sweep_change <= options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged)
    throw ConvergenceError("iterated best response did not settle", sweep_change);

  report.solution = grid.rows();
  compare_with_closed_form(spec, options, report);
  return report;
}

OracleReport joint_optimum(const GameSpec& spec, const OracleOptions& options) {
  GridControl start = GridControl::constant(spec, options.steps, 1.0);
  auto rows = start.rows();
  const double h = start.step_width();
  const double dN = spec.total_d();
  std::vector<double> sens(options.steps);
  kp::stock_sensitivity(spec.delta(), h, sens);

  OracleReport report;
  report.mode = Mode::cooperative;
  double residual = 0.0;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    residual = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double b = spec.player(i).b;
      residual = std::max(residual,
                          kp::ascent_step(rows[i], b, dN, sens, h, options.step_scale) / b);
    }
    report.iterations = it;
    if (residual <= options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) throw ConvergenceError("joint optimum did not converge", residual);

  report.solution = std::move(rows);
  compare_with_closed_form(spec, options, report);
  return report;
}

PontryaginReport pontryagin_residual(const GameSpec& spec, const Profile& profile, Mode mode) {
  if (profile.size() != spec.size()) throw std::invalid_argument("profile/game size mismatch");
  const double delta = spec.delta();
  const double dN = spec.total_d();
  constexpr int kSamples = 16;

  PontryaginReport report;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& control = profile[i];
    const double b = spec.player(i).b;
    const double fine = mode == Mode::nash ? spec.player(i).d : dN;
    const double scale = fine > 0.0 ? fine : delta * b;
    const auto psi = [&](const ControlSegment& seg, double t) {
      return control.segment_value(seg, t) - b;
    };

    for (const auto& seg : control.segments()) {
      if (seg.form != SegmentForm::exp) continue;
      const double len = seg.end - seg.start;
      // Balances truncation (~(h delta)^2) against rounding (~eps/(h delta)).
      const double fd = std::min(1e-5 / delta, len / 4.0);
      for (int s = 0; s < kSamples; ++s) {
        const double t = seg.start + fd + (len - 2.0 * fd) * (s + 0.5) / kSamples;
        const double slope = (psi(seg, t + fd) - psi(seg, t - fd)) / (2.0 * fd);
        const double r = std::abs(slope - fine - delta * psi(seg, t)) / scale;
        report.max_residual = std::max(report.max_residual, r);
      }
    }
    report.terminal =
        std::max(report.terminal, std::abs(control.value(spec.T()) - b) / b);
  }
  return report;
}

}  // namespace emgame
