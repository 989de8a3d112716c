#include <algorithm>
#include <cmath>
#include <cstdint>

#include "emgame/coalition.hpp"
#include "emgame/kernels.hpp"

namespace emgame::kernels::parallel {

std::vector<AffinePayoff> coalition_values(const GameSpec& spec, const Profile& nash,
                                           const Profile& coop) {
  const std::int64_t count = std::int64_t{1} << spec.size();
  std::vector<AffinePayoff> values(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t mask = 1; mask < count; ++mask) {
    const Coalition s(static_cast<std::uint64_t>(mask));
    const auto payoffs = profile_payoffs(spec, mixed_profile(nash, coop, s));
    AffinePayoff v;
    for (std::size_t i : s.members()) v += payoffs[i];
    values[static_cast<std::size_t>(mask)] = v;
  }
  return values;
}

std::vector<AffinePayoff> shapley(std::span<const AffinePayoff> values, std::size_t n) {
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }

  // One player per iteration keeps each share's summation order fixed.
  std::vector<AffinePayoff> shares(n);
  const auto players = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < players; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    AffinePayoff acc;
    for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
      if (mask & bit) continue;
      acc += weight[Coalition(mask).size()] * (values[mask | bit] - values[mask]);
    }
    shares[static_cast<std::size_t>(i)] = acc;
  }
  return shares;
}

void stock_sensitivity(double delta, double h, std::span<double> out) {
  const double own = h * h * phi2(delta * h);
  const double first = -std::expm1(-delta * h);
  const auto steps = static_cast<std::int64_t>(out.size());
  const double dd = delta * delta;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < steps; ++k) {
    const double rest = -std::expm1(-delta * h * static_cast<double>(steps - k - 1));
    out[static_cast<std::size_t>(k)] = own + first * rest / dd;
  }
}

double ascent_step(std::span<double> row, double b, double fine, std::span<const double> sens,
                   double h, double step_scale) {
  double change = 0.0;
  const auto steps = static_cast<std::int64_t>(row.size());
#pragma omp parallel for schedule(static) reduction(max : change)
  for (std::int64_t k = 0; k < steps; ++k) {
    const auto j = static_cast<std::size_t>(k);
    const double grad = h * (b - row[j]) - fine * sens[j];
    const double next = std::clamp(row[j] + step_scale / h * grad, 0.0, b);
    change = std::max(change, std::abs(next - row[j]));
    row[j] = next;
  }
  return change;
}

void sample_midpoints(const PiecewiseControl& control, double t0, double h,
                      std::span<double> out) {
  const auto steps = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < steps; ++k)
    out[static_cast<std::size_t>(k)] = control.value(t0 + (static_cast<double>(k) + 0.5) * h);
}

void step_payoffs(double b, double fine, double delta, double h, std::span<const double> row,
                  std::span<const double> total_rate, std::span<const double> stock,
                  std::span<double> out) {
  const double carry = -std::expm1(-delta * h) / delta;
  const double own = h * h * phi2(delta * h);
  const auto steps = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < steps; ++k) {
    const auto j = static_cast<std::size_t>(k);
    const double u = row[j];
    out[j] = h * u * (b - 0.5 * u) - fine * (stock[j] * carry + total_rate[j] * own);
  }
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double gap = 0.0;
  const auto steps = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static) reduction(max : gap)
  for (std::int64_t k = 0; k < steps; ++k) {
    const auto j = static_cast<std::size_t>(k);
    gap = std::max(gap, std::abs(a[j] - b[j]));
  }
  return gap;
}

}  // namespace emgame::kernels::parallel
