#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "emgame/game_model.hpp"

namespace emgame {

enum class SegmentForm { zero, exp };

/// One piece of an emission schedule on [start, end]:
/// zero, or u(t) = level + amplitude * e^{delta (t - T)}.
struct ControlSegment {
  double start = 0.0;
  double end = 0.0;
  SegmentForm form = SegmentForm::zero;
  double level = 0.0;
  double amplitude = 0.0;
};

/// A player's open-loop emission schedule. Construction rejects schedules that
/// do not tile [t0, T], jump at a boundary, or leave [0, b].
class PiecewiseControl {
 public:
  PiecewiseControl(std::size_t player, double b, double delta, double t0, double T,
                   std::vector<ControlSegment> segments);

  /// Single exp segment on [t0, T].
  static PiecewiseControl exp_form(std::size_t player, double b, double delta, double t0,
                                   double T, double level, double amplitude);

  std::size_t player() const { return player_; }
  double upper_bound() const { return b_; }
  double delta() const { return delta_; }
  double t0() const { return segments_.front().start; }
  double T() const { return T_; }
  const std::vector<ControlSegment>& segments() const { return segments_; }

  double value(double t) const;
  double segment_value(const ControlSegment& seg, double t) const;

  /// Start of the trailing exp segment when preceded by a zero segment.
  std::optional<double> switch_time() const;
  /// Coefficients of the trailing exp segment (0,0 when the control is zero).
  double level() const;
  double amplitude() const;

  /// "c0 + c1*e^{delta(t-T)}" with the zero branch prefixed when switching.
  std::string formula(int precision = 6) const;

 private:
  std::size_t player_;
  double b_;
  double delta_;
  double T_;
  std::vector<ControlSegment> segments_;
};

using Profile = std::vector<PiecewiseControl>;

/// Stock on one interval: x(t) = transient e^{-delta (t - start)} + B e^{delta (t - T)} + C.
struct StockPiece {
  double start = 0.0;
  double end = 0.0;
  double transient = 0.0;
  double B = 0.0;
  double C = 0.0;
};

class StockTrajectory {
 public:
  StockTrajectory(double delta, double T, std::vector<StockPiece> pieces)
      : delta_(delta), T_(T), pieces_(std::move(pieces)) {}

  const std::vector<StockPiece>& pieces() const { return pieces_; }
  double value(double t) const;
  /// Coefficient A of the A e^{-delta t} term of a piece.
  double A(const StockPiece& piece) const;

 private:
  double delta_;
  double T_;
  std::vector<StockPiece> pieces_;
};

/// Payoff as an exact affine function of the initial stock.
struct AffinePayoff {
  double intercept = 0.0;
  double x0_slope = 0.0;

  double operator()(double x0) const { return intercept + x0_slope * x0; }

  AffinePayoff& operator+=(const AffinePayoff& o) {
    intercept += o.intercept;
    x0_slope += o.x0_slope;
    return *this;
  }
  AffinePayoff& operator-=(const AffinePayoff& o) {
    intercept -= o.intercept;
    x0_slope -= o.x0_slope;
    return *this;
  }
  AffinePayoff& operator*=(double s) {
    intercept *= s;
    x0_slope *= s;
    return *this;
  }
  friend AffinePayoff operator+(AffinePayoff a, const AffinePayoff& b) { return a += b; }
  friend AffinePayoff operator-(AffinePayoff a, const AffinePayoff& b) { return a -= b; }
  friend AffinePayoff operator*(double s, AffinePayoff a) { return a *= s; }
  friend bool operator==(const AffinePayoff&, const AffinePayoff&) = default;
};

Profile nash_controls(const GameSpec& spec);
Profile cooperative_controls(const GameSpec& spec);
Profile optimal_controls(const GameSpec& spec, Mode mode);

StockTrajectory stock_trajectory(const GameSpec& spec, const Profile& profile);
StockTrajectory stock_trajectory(const GameSpec& spec, const Profile& profile, double x0);

AffinePayoff player_payoff(const GameSpec& spec, const Profile& profile, std::size_t i);
/// All players' payoffs from a single trajectory integration.
std::vector<AffinePayoff> profile_payoffs(const GameSpec& spec, const Profile& profile);

/// d(K_i)/d(x0) = -(d_i/delta)(1 - e^{-delta (T - t0)}).
double payoff_x0_slope(const GameSpec& spec, double fine);

/// sum_i u_i^NE(t) - sum_i u_i^*(t), by evaluating both profiles.
double total_emission_gap(const GameSpec& spec, double t);
/// (n-1) d_N/delta (1 - e^{delta(t-T)}); equals total_emission_gap when both
/// profiles are interior.
double interior_emission_gap(const GameSpec& spec, double t);
/// (n-1) d_N/(2 delta^2) (1 - e^{-delta(T-t0)})^2; equals x^NE(T) - x^*(T)
/// when both profiles are interior.
double interior_stock_gap(const GameSpec& spec);

namespace detail {

/// Integral over [start, end] of u(b - u/2) - fine * x(s) for
/// u = level + amplitude e^{delta(s-T)} and the given stock piece.
double interval_payoff(double b, double fine, double delta, double T, double level,
                       double amplitude, const StockPiece& stock, double start, double end);

}  // namespace detail

}  // namespace emgame
