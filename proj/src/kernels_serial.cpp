#include <algorithm>
#include <cmath>

#include "emgame/coalition.hpp"
#include "emgame/kernels.hpp"

namespace emgame::kernels {

double phi2(double z) {
  if (std::abs(z) < 0.1) {
    // sum_k (-z)^k / (k+2)!
    double term = 0.5;
    double sum = term;
    for (int k = 1; k < 12; ++k) {
      term *= -z / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(-z) + z) / (z * z);
}

namespace serial {

std::vector<AffinePayoff> coalition_values(const GameSpec& spec, const Profile& nash,
                                           const Profile& coop) {
  const std::size_t count = std::size_t{1} << spec.size();
  std::vector<AffinePayoff> values(count);
  for (std::size_t mask = 1; mask < count; ++mask) {
    const Coalition s(mask);
    const auto payoffs = profile_payoffs(spec, mixed_profile(nash, coop, s));
    AffinePayoff v;
    for (std::size_t i : s.members()) v += payoffs[i];
    values[mask] = v;
  }
  return values;
}

std::vector<AffinePayoff> shapley(std::span<const AffinePayoff> values, std::size_t n) {
  // weight[s] = s! (n-s-1)! / n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }

  std::vector<AffinePayoff> shares(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
      if (mask & bit) continue;
      const double w = weight[Coalition(mask).size()];
      shares[i] += w * (values[mask | bit] - values[mask]);
    }
  }
  return shares;
}

void stock_sensitivity(double delta, double h, std::span<double> out) {
  const double decay = std::exp(-delta * h);
  const double carry = -std::expm1(-delta * h) / delta;  // d(step integral)/d(x_k)
  const double own = h * h * phi2(delta * h);             // d(step integral)/d(U_k)
  // mu = d(integral of x over steps k+1..N-1)/d(x_{k+1}); zero past the horizon.
  double mu = 0.0;
  for (std::size_t k = out.size(); k-- > 0;) {
    out[k] = own + carry * mu;
    mu = carry + decay * mu;
  }
}

double ascent_step(std::span<double> row, double b, double fine, std::span<const double> sens,
                   double h, double step_scale) {
  double change = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double grad = h * (b - row[k]) - fine * sens[k];
    const double next = std::clamp(row[k] + step_scale / h * grad, 0.0, b);
    change = std::max(change, std::abs(next - row[k]));
    row[k] = next;
  }
  return change;
}

void sample_midpoints(const PiecewiseControl& control, double t0, double h,
                      std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = control.value(t0 + (static_cast<double>(k) + 0.5) * h);
}

void step_payoffs(double b, double fine, double delta, double h, std::span<const double> row,
                  std::span<const double> total_rate, std::span<const double> stock,
                  std::span<double> out) {
  const double carry = -std::expm1(-delta * h) / delta;
  const double own = h * h * phi2(delta * h);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double u = row[k];
    out[k] = h * u * (b - 0.5 * u) - fine * (stock[k] * carry + total_rate[k] * own);
  }
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]));
  return gap;
}

}  // namespace serial

}  // namespace emgame::kernels
