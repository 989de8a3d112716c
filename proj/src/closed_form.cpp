#include "emgame/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "emgame/errors.hpp"

namespace emgame {

namespace {

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

// Sum of all players' (level, amplitude) on one elementary interval.
struct ElementaryPiece {
  double start;
  double end;
  std::vector<const ControlSegment*> active;
};

std::vector<ElementaryPiece> elementary_pieces(const Profile& profile, double t0, double T) {
  std::vector<double> cuts{t0, T};
  for (const auto& control : profile)
    for (const auto& seg : control.segments()) cuts.push_back(seg.end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::size_t> cursor(profile.size(), 0);
  std::vector<ElementaryPiece> pieces;
  pieces.reserve(cuts.size() - 1);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    ElementaryPiece piece{cuts[k], cuts[k + 1], {}};
    piece.active.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const auto& segs = profile[i].segments();
      while (segs[cursor[i]].end <= piece.start) ++cursor[i];
      piece.active.push_back(&segs[cursor[i]]);
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

double level_of(const ControlSegment& seg) { return seg.form == SegmentForm::exp ? seg.level : 0.0; }
double amplitude_of(const ControlSegment& seg) {
  return seg.form == SegmentForm::exp ? seg.amplitude : 0.0;
}

void check_profile(const GameSpec& spec, const Profile& profile) {
  if (profile.size() != spec.size())
    throw std::invalid_argument("profile has " + std::to_string(profile.size()) +
                                " controls for a " + std::to_string(spec.size()) + "-player game");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& c = profile[i];
    if (c.player() != i) throw std::invalid_argument("profile controls out of player order");
    if (c.t0() != spec.t0() || c.T() != spec.T() || c.delta() != spec.delta())
      throw std::invalid_argument("control horizon or delta does not match the game");
  }
}

// Stock pieces on the elementary intervals, starting from x0.
std::vector<StockPiece> integrate_stock(const std::vector<ElementaryPiece>& pieces, double delta,
                                        double T, double x0) {
  std::vector<StockPiece> out;
  out.reserve(pieces.size());
  double x = x0;
  for (const auto& piece : pieces) {
    double level = 0.0;
    double amplitude = 0.0;
    for (const auto* seg : piece.active) {
      level += level_of(*seg);
      amplitude += amplitude_of(*seg);
    }
    StockPiece sp;
    sp.start = piece.start;
    sp.end = piece.end;
    sp.C = level / delta;
    sp.B = amplitude / (2.0 * delta);
    sp.transient = x - sp.B * std::exp(delta * (piece.start - T)) - sp.C;
    x = sp.transient * std::exp(-delta * (piece.end - piece.start)) +
        sp.B * std::exp(delta * (piece.end - T)) + sp.C;
    out.push_back(sp);
  }
  return out;
}

}  // namespace

PiecewiseControl::PiecewiseControl(std::size_t player, double b, double delta, double t0,
                                   double T, std::vector<ControlSegment> segments)
    : player_(player), b_(b), delta_(delta), T_(T), segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("control has no segments");
  if (segments_.front().start != t0 || segments_.back().end != T)
    throw std::invalid_argument("control segments do not cover [t0, T]");

  double scale = b_;
  for (const auto& seg : segments_)
    scale = std::max(scale, std::abs(level_of(seg)) + std::abs(amplitude_of(seg)));
  const double tol = 1e-9 * scale;

  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& seg = segments_[k];
    if (!(seg.start < seg.end)) throw std::invalid_argument("control segment has no length");
    if (k + 1 < segments_.size() && seg.end != segments_[k + 1].start)
      throw std::invalid_argument("control segments leave a gap or overlap");
    // The exp form is monotone, so checking both endpoints bounds the segment.
    for (double t : {seg.start, seg.end}) {
      const double u = segment_value(seg, t);
      if (u < -tol || u > b_ + tol)
        throw std::invalid_argument("control of player " + std::to_string(player_) + " is " +
                                    format_number(u, 8) + " at t=" + format_number(t, 8) +
                                    ", outside [0, " + format_number(b_, 8) + "]");
    }
    if (k > 0) {
      const double left = segment_value(segments_[k - 1], seg.start);
      const double right = segment_value(seg, seg.start);
      if (std::abs(left - right) > tol)
        throw std::invalid_argument("control jumps at t=" + format_number(seg.start, 8));
    }
  }
}

PiecewiseControl PiecewiseControl::exp_form(std::size_t player, double b, double delta, double t0,
                                            double T, double level, double amplitude) {
  return {player, b, delta, t0, T, {{t0, T, SegmentForm::exp, level, amplitude}}};
}

double PiecewiseControl::segment_value(const ControlSegment& seg, double t) const {
  if (seg.form == SegmentForm::zero) return 0.0;
  return seg.level + seg.amplitude * std::exp(delta_ * (t - T_));
}

double PiecewiseControl::value(double t) const {
  if (t < t0() || t > T_) throw DomainError("time outside the horizon");
  // Clamped so that rounding near T cannot leave [0, b].
  for (const auto& seg : segments_)
    if (t <= seg.end) return std::clamp(segment_value(seg, t), 0.0, b_);
  return std::clamp(segment_value(segments_.back(), t), 0.0, b_);
}

std::optional<double> PiecewiseControl::switch_time() const {
  if (segments_.size() >= 2 && segments_.front().form == SegmentForm::zero &&
      segments_.back().form == SegmentForm::exp)
    return segments_.back().start;
  return std::nullopt;
}

double PiecewiseControl::level() const { return level_of(segments_.back()); }
double PiecewiseControl::amplitude() const { return amplitude_of(segments_.back()); }

std::string PiecewiseControl::formula(int precision) const {
  std::string out;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& seg = segments_[k];
    if (k > 0) out += "; ";
    if (seg.form == SegmentForm::zero) {
      out += "0";
    } else {
      out += format_number(seg.level, precision);
      out += seg.amplitude < 0 ? " - " : " + ";
      out += format_number(std::abs(seg.amplitude), precision) + "*e^{" +
             format_number(delta_, precision) + "(t-" + format_number(T_, precision) + ")}";
    }
    if (segments_.size() > 1)
      out += " on [" + format_number(seg.start, precision) + ", " +
             format_number(seg.end, precision) + "]";
  }
  return out;
}

double StockTrajectory::value(double t) const {
  for (const auto& p : pieces_) {
    if (t <= p.end || &p == &pieces_.back())
      return p.transient * std::exp(-delta_ * (t - p.start)) + p.B * std::exp(delta_ * (t - T_)) +
             p.C;
  }
  return 0.0;
}

double StockTrajectory::A(const StockPiece& piece) const {
  return piece.transient * std::exp(delta_ * piece.start);
}

Profile optimal_controls(const GameSpec& spec, Mode mode) {
  const auto regimes = classify_regimes(spec);
  const double delta = spec.delta();
  const double t0 = spec.t0();
  const double T = spec.T();
  const double dN = spec.total_d();

  Profile profile;
  profile.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& p = spec.player(i);
    const double fine = mode == Mode::nash ? p.d : dN;
    const double level = p.b - fine / delta;
    const double amplitude = fine / delta;
    const ModeRegime r = regimes.players[i][mode];

    std::vector<ControlSegment> segs;
    if (r.zero_throughout()) {
      segs.push_back({t0, T, SegmentForm::zero, 0.0, 0.0});
    } else if (r.switch_time) {
      segs.push_back({t0, *r.switch_time, SegmentForm::zero, 0.0, 0.0});
      segs.push_back({*r.switch_time, T, SegmentForm::exp, level, amplitude});
    } else {
      segs.push_back({t0, T, SegmentForm::exp, level, amplitude});
    }
    profile.emplace_back(i, p.b, delta, t0, T, std::move(segs));
  }
  return profile;
}

Profile nash_controls(const GameSpec& spec) { return optimal_controls(spec, Mode::nash); }

Profile cooperative_controls(const GameSpec& spec) {
  return optimal_controls(spec, Mode::cooperative);
}

StockTrajectory stock_trajectory(const GameSpec& spec, const Profile& profile) {
  return stock_trajectory(spec, profile, spec.x0());
}

StockTrajectory stock_trajectory(const GameSpec& spec, const Profile& profile, double x0) {
  check_profile(spec, profile);
  const auto pieces = elementary_pieces(profile, spec.t0(), spec.T());
  return {spec.delta(), spec.T(), integrate_stock(pieces, spec.delta(), spec.T(), x0)};
}

double payoff_x0_slope(const GameSpec& spec, double fine) {
  const double delta = spec.delta();
  return (fine / delta) * std::expm1(-delta * spec.horizon());
}

std::vector<AffinePayoff> profile_payoffs(const GameSpec& spec, const Profile& profile) {
  check_profile(spec, profile);
  const auto pieces = elementary_pieces(profile, spec.t0(), spec.T());
  // Intercept from the x0 = 0 trajectory; the x0 part of the stock is
  // x0 e^{-delta(t - t0)} and contributes only the analytic slope.
  const auto stock = integrate_stock(pieces, spec.delta(), spec.T(), 0.0);

  std::vector<AffinePayoff> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& p = spec.player(i);
    double total = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const auto& seg = *pieces[k].active[i];
      total += detail::interval_payoff(p.b, p.d, spec.delta(), spec.T(), level_of(seg),
                                       amplitude_of(seg), stock[k], pieces[k].start,
                                       pieces[k].end);
    }
    out[i] = {total, payoff_x0_slope(spec, p.d)};
  }
  return out;
}

AffinePayoff player_payoff(const GameSpec& spec, const Profile& profile, std::size_t i) {
  if (i >= spec.size()) throw std::out_of_range("player index " + std::to_string(i));
  return profile_payoffs(spec, profile)[i];
}

double total_emission_gap(const GameSpec& spec, double t) {
  if (t < spec.t0() || t > spec.T()) throw DomainError("time outside the horizon");
  const auto nash = nash_controls(spec);
  const auto coop = cooperative_controls(spec);
  double gap = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) gap += nash[i].value(t) - coop[i].value(t);
  return gap;
}

double interior_emission_gap(const GameSpec& spec, double t) {
  const double n = static_cast<double>(spec.size());
  const double delta = spec.delta();
  return -(n - 1.0) * spec.total_d() / delta * std::expm1(delta * (t - spec.T()));
}

double interior_stock_gap(const GameSpec& spec) {
  const double n = static_cast<double>(spec.size());
  const double delta = spec.delta();
  const double decay = -std::expm1(-delta * spec.horizon());
  return (n - 1.0) * spec.total_d() / (2.0 * delta * delta) * decay * decay;
}

namespace detail {

double interval_payoff(double b, double fine, double delta, double T, double level,
                       double amplitude, const StockPiece& stock, double start, double end) {
  const double len = end - start;
  if (len <= 0.0) return 0.0;
  const double e_start = std::exp(delta * (start - T));
  const double int_e = e_start * std::expm1(delta * len) / delta;
  const double int_e2 = e_start * e_start * std::expm1(2.0 * delta * len) / (2.0 * delta);
  const double int_decay = -std::expm1(-delta * len) / delta;

  const double revenue = b * (level * len + amplitude * int_e) -
                         0.5 * (level * level * len + 2.0 * level * amplitude * int_e +
                                amplitude * amplitude * int_e2);
  const double stock_integral = stock.transient * int_decay + stock.B * int_e + stock.C * len;
  return revenue - fine * stock_integral;
}

}  // namespace detail

}  // namespace emgame
