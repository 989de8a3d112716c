#include "emgame/coalition.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "emgame/errors.hpp"
#include "emgame/kernels.hpp"

namespace emgame {

Coalition Coalition::of(std::initializer_list<std::size_t> members) {
  std::uint64_t mask = 0;
  for (std::size_t i : members) mask |= std::uint64_t{1} << i;
  return Coalition(mask);
}

std::size_t Coalition::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  for (std::uint64_t m = mask_; m != 0; m &= m - 1)
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

std::string Coalition::label() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : members()) {
    if (!first) out += ",";
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

CharacteristicFunction::CharacteristicFunction(std::size_t n) : n_(n) {
  if (n == 0 || n > kMaxCoalitionPlayers)
    throw ConfigError("characteristic function supports 1.." +
                      std::to_string(kMaxCoalitionPlayers) + " players");
  values_.resize(std::size_t{1} << n);
  values_[0] = AffinePayoff{};
}

void CharacteristicFunction::set(Coalition s, AffinePayoff v) {
  if (s.mask() >= values_.size()) throw std::out_of_range("coalition " + s.label());
  if (s.empty() && v != AffinePayoff{})
    throw std::invalid_argument("the empty coalition is worth 0");
  values_[s.mask()] = v;
}

bool CharacteristicFunction::has(Coalition s) const {
  return s.mask() < values_.size() && values_[s.mask()].has_value();
}

const AffinePayoff& CharacteristicFunction::at(Coalition s) const {
  if (!has(s)) throw IncompleteInputError("no value for coalition " + s.label());
  return *values_[s.mask()];
}

bool CharacteristicFunction::complete() const {
  for (const auto& v : values_)
    if (!v) return false;
  return true;
}

AffinePayoff Allocation::total() const {
  AffinePayoff sum;
  for (const auto& s : shares) sum += s;
  return sum;
}

Profile mixed_profile(const Profile& nash, const Profile& coop, Coalition members) {
  if (nash.size() != coop.size()) throw std::invalid_argument("profile sizes differ");
  Profile out;
  out.reserve(nash.size());
  for (std::size_t i = 0; i < nash.size(); ++i)
    out.push_back(members.contains(i) ? coop[i] : nash[i]);
  return out;
}

CharacteristicFunction characteristic_function(const GameSpec& spec) {
  CharacteristicFunction cf(spec.size());
  const auto values =
      kernels::parallel::coalition_values(spec, nash_controls(spec), cooperative_controls(spec));
  for (std::uint64_t mask = 0; mask < values.size(); ++mask) cf.set(Coalition(mask), values[mask]);
  return cf;
}

Allocation shapley_value(const CharacteristicFunction& cf, std::size_t n) {
  if (cf.players() != n)
    throw IncompleteInputError("characteristic function is over " + std::to_string(cf.players()) +
                               " players, not " + std::to_string(n));
  std::vector<AffinePayoff> dense(cf.coalitions());
  for (std::uint64_t mask = 0; mask < dense.size(); ++mask) dense[mask] = cf.at(Coalition(mask));
  return {kernels::parallel::shapley(dense, n)};
}

GainReport cooperation_gains(const GameSpec& spec) {
  const auto cf = characteristic_function(spec);
  const auto sh = shapley_value(cf, spec.size());
  const auto nash = profile_payoffs(spec, nash_controls(spec));

  GainReport report;
  report.joint_cooperative = cf.grand();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const AffinePayoff diff = sh.shares[i] - nash[i];
    // Both slopes equal -(d_i/delta)(1 - e^{-delta(T-t0)}) up to rounding.
    if (std::abs(diff.x0_slope) > 1e-9 * (std::abs(nash[i].x0_slope) + 1.0))
      throw std::logic_error("Shapley and Nash x0 slopes differ for player " +
                             std::to_string(i + 1));
    report.players.push_back({sh.shares[i], nash[i], diff.intercept, diff.intercept > 0.0});
    report.joint_nash += nash[i];
  }
  report.joint_gain = (report.joint_cooperative - report.joint_nash).intercept;
  return report;
}

}  // namespace emgame
