#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "emgame/closed_form.hpp"
#include "emgame/game_model.hpp"

namespace emgame {

/// Largest roster for which the characteristic function is enumerated.
inline constexpr std::size_t kMaxCoalitionPlayers = 24;

/// Subset of players, encoded as a bit mask over 0-based indices.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t mask) : mask_(mask) {}

  static Coalition of(std::initializer_list<std::size_t> members);
  static Coalition grand(std::size_t n) { return Coalition((std::uint64_t{1} << n) - 1); }

  std::uint64_t mask() const { return mask_; }
  bool empty() const { return mask_ == 0; }
  bool contains(std::size_t i) const { return (mask_ >> i) & 1u; }
  std::size_t size() const;
  std::vector<std::size_t> members() const;
  Coalition with(std::size_t i) const { return Coalition(mask_ | (std::uint64_t{1} << i)); }
  Coalition without(std::size_t i) const { return Coalition(mask_ & ~(std::uint64_t{1} << i)); }

  /// "{1,3}" with 1-based player numbers.
  std::string label() const;

  friend bool operator==(Coalition, Coalition) = default;

 private:
  std::uint64_t mask_ = 0;
};

/// Coalition values indexed by mask. Entries may be missing until set.
class CharacteristicFunction {
 public:
  explicit CharacteristicFunction(std::size_t n);

  std::size_t players() const { return n_; }
  std::size_t coalitions() const { return values_.size(); }

  void set(Coalition s, AffinePayoff v);
  bool has(Coalition s) const;
  /// Throws IncompleteInputError when the coalition has no value.
  const AffinePayoff& at(Coalition s) const;
  const AffinePayoff& grand() const { return at(Coalition::grand(n_)); }
  bool complete() const;

 private:
  std::size_t n_;
  std::vector<std::optional<AffinePayoff>> values_;
};

struct Allocation {
  std::vector<AffinePayoff> shares;

  AffinePayoff total() const;
};

/// Members of S play their grand-coalition optimal controls, the others their
/// Nash controls.
Profile mixed_profile(const Profile& nash, const Profile& coop, Coalition members);

/// V(S) = sum_{i in S} K_i(u*_S, u^NE_{N\S}); V(empty) = 0; V(N) is the joint
/// cooperative payoff. Coalitions are evaluated in parallel.
CharacteristicFunction characteristic_function(const GameSpec& spec);

Allocation shapley_value(const CharacteristicFunction& cf, std::size_t n);

struct PlayerGain {
  AffinePayoff shapley;
  AffinePayoff nash;
  double gain = 0.0;
  bool benefits = false;
};

struct GainReport {
  std::vector<PlayerGain> players;
  AffinePayoff joint_cooperative;
  AffinePayoff joint_nash;
  double joint_gain = 0.0;
};

/// Sh_i - K_i(u^NE) and V(N) - sum K_i(u^NE). The x0 slopes cancel, so the
/// gains are scalars.
GainReport cooperation_gains(const GameSpec& spec);

}  // namespace emgame
