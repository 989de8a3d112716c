#pragma once

// Data-parallel kernels behind coalition_analysis and numeric_oracle. Each
// kernel exists twice: an OpenMP version used by the library and a serial
// reference kept for tests and benchmarks. Results do not depend on the
// thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "emgame/closed_form.hpp"
#include "emgame/game_model.hpp"

namespace emgame::kernels {

/// (e^{-z} - 1 + z) / z^2, accurate for small z.
double phi2(double z);

namespace serial {

/// V(S) for every mask in [0, 2^n).
std::vector<AffinePayoff> coalition_values(const GameSpec& spec, const Profile& nash,
                                           const Profile& coop);

/// Shapley shares from a dense mask-indexed value table.
std::vector<AffinePayoff> shapley(std::span<const AffinePayoff> values, std::size_t n);

/// d(integral of x)/d(U_k): effect of a unit total emission rate on step k on
/// the time-integrated stock. Backward adjoint sweep.
void stock_sensitivity(double delta, double h, std::span<double> out);

/// One projected-gradient step u <- clamp(u + (scale/h) grad, 0, b) with
/// grad_k = h (b - u_k) - fine * sens_k. Returns max |change|.
double ascent_step(std::span<double> row, double b, double fine, std::span<const double> sens,
                   double h, double step_scale);

/// Control values at step midpoints t0 + (k + 1/2) h.
void sample_midpoints(const PiecewiseControl& control, double t0, double h,
                      std::span<double> out);

/// Exact per-step payoff contributions of one player under constant rates.
/// `stock` holds the stock at the start of each step.
void step_payoffs(double b, double fine, double delta, double h, std::span<const double> row,
                  std::span<const double> total_rate, std::span<const double> stock,
                  std::span<double> out);

double sup_gap(std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace parallel {

std::vector<AffinePayoff> coalition_values(const GameSpec& spec, const Profile& nash,
                                           const Profile& coop);
std::vector<AffinePayoff> shapley(std::span<const AffinePayoff> values, std::size_t n);
/// Closed-form sensitivity per step instead of the adjoint sweep.
void stock_sensitivity(double delta, double h, std::span<double> out);
double ascent_step(std::span<double> row, double b, double fine, std::span<const double> sens,
                   double h, double step_scale);
void sample_midpoints(const PiecewiseControl& control, double t0, double h,
                      std::span<double> out);
void step_payoffs(double b, double fine, double delta, double h, std::span<const double> row,
                  std::span<const double> total_rate, std::span<const double> stock,
                  std::span<double> out);
double sup_gap(std::span<const double> a, std::span<const double> b);

}  // namespace parallel

}  // namespace emgame::kernels
