#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "emgame/closed_form.hpp"
#include "emgame/game_model.hpp"

namespace emgame::testing {

/// Reference (2-decimal) coefficients of the three smelters.
inline std::vector<PlayerParams> smelters() {
  return {{"KrAS", 59035.12, 525.06}, {"BrAS", 35649.15, 351.64}, {"IrAS", 47906.72, 112.71}};
}

inline GameSpec smelter_game(double delta, double x0 = 0.0) {
  return {smelters(), 0.0, 0.4, delta, x0};
}

/// Raw 2016 inputs in rubles and tons, with the joint profit already split.
inline std::vector<RawCompanyData> smelter_companies() {
  return {{"KrAS", 3412.23e6, 57800.0, 87723.95e3},
          {"BrAS", 2979.51e6, 83578.707, 58750.2e3},
          {"IrAS", 1230.92e6, 25694.1, 18830e3}};
}

/// Random game; when `force_switch` is set, player 0 gets b = d = 1 with
/// delta = 0.5 and T - t0 = 2, which switches in both modes.
inline GameSpec random_game(std::mt19937_64& rng, std::size_t n, bool force_switch) {
  std::uniform_real_distribution<double> b_dist(0.5, 3.0);
  std::uniform_real_distribution<double> d_dist(0.0, 1.0);
  std::vector<PlayerParams> players;
  for (std::size_t i = 0; i < n; ++i)
    players.push_back({"p" + std::to_string(i + 1), b_dist(rng), d_dist(rng)});
  if (force_switch) {
    players[0] = {"p1", 1.0, 1.0};
    return {players, 0.0, 2.0, 0.5, 0.0};
  }
  std::uniform_real_distribution<double> delta_dist(0.05, 1.0);
  std::uniform_real_distribution<double> horizon(0.2, 3.0);
  return {players, 0.0, horizon(rng), delta_dist(rng), 0.0};
}

/// Classical RK4 on the augmented system x' = sum u - delta x,
/// K_i' = u_i (b_i - u_i/2) - d_i x, stepping exactly onto every breakpoint.
/// Independent of the analytic integration in the library.
struct Rk4Result {
  double x_T;
  std::vector<double> payoffs;
};

inline Rk4Result rk4_integrate(const GameSpec& spec, const Profile& profile, double x0,
                               int steps_per_piece = 2000) {
  std::vector<double> cuts{spec.t0(), spec.T()};
  for (const auto& c : profile)
    for (const auto& s : c.segments()) cuts.push_back(s.end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t n = spec.size();
  const auto rhs = [&](double t, const std::vector<double>& y, double lo, double hi) {
    // Evaluate the controls strictly inside the current piece.
    const double tc = std::clamp(t, lo, hi);
    std::vector<double> dy(n + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ControlSegment* seg = &profile[i].segments().back();
      const double mid = 0.5 * (lo + hi);
      for (const auto& s : profile[i].segments())
        if (s.start <= mid && mid <= s.end) {
          seg = &s;
          break;
        }
      const double u = profile[i].segment_value(*seg, tc);
      total += u;
      dy[i + 1] = u * (spec.player(i).b - 0.5 * u) - spec.player(i).d * y[0];
    }
    dy[0] = total - spec.delta() * y[0];
    return dy;
  };

  std::vector<double> y(n + 1, 0.0);
  y[0] = x0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double h = (hi - lo) / steps_per_piece;
    for (int s = 0; s < steps_per_piece; ++s) {
      const double t = lo + s * h;
      const auto add = [&](const std::vector<double>& a, const std::vector<double>& b, double f) {
        std::vector<double> r(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] + f * b[j];
        return r;
      };
      const auto k1 = rhs(t, y, lo, hi);
      const auto k2 = rhs(t + h / 2, add(y, k1, h / 2), lo, hi);
      const auto k3 = rhs(t + h / 2, add(y, k2, h / 2), lo, hi);
      const auto k4 = rhs(t + h, add(y, k3, h), lo, hi);
      for (std::size_t j = 0; j <= n; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
  }
  return {y[0], std::vector<double>(y.begin() + 1, y.end())};
}

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace emgame::testing
