#pragma once
// Latent drifting Gaussian random walk and its first passage of a level.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "fptrack/rng.hpp"

namespace fptrack {

// Full parameterization of one experiment. Exactly one observation mode is
// active: noisy (epsilon used, delay == 0) or delayed (delay used,
// epsilon == 0). epsilon == 0 with delay == 0 is the degenerate Y == X case.
struct WalkParams {
  double s = 0.0;                  // drift per step, >= 0
  double ell = 0.0;                // threshold level, >= 0
  double epsilon = 0.0;            // observation-noise scale, >= 0
  std::int64_t delay = 0;          // observation delay d, >= 0
  std::int64_t horizon_cap = 1000; // maximum simulated steps, >= 1

  bool delayed_mode() const noexcept { return delay > 0; }

  void validate() const {
    if (s < 0.0) throw std::invalid_argument("WalkParams: drift s must be >= 0");
    if (ell < 0.0) throw std::invalid_argument("WalkParams: level ell must be >= 0");
    if (epsilon < 0.0)
      throw std::invalid_argument("WalkParams: noise scale epsilon must be >= 0");
    if (delay < 0)
      throw std::invalid_argument("WalkParams: delay must be >= 0");
    if (horizon_cap < 1)
      throw std::invalid_argument("WalkParams: horizon_cap must be >= 1");
    if (epsilon > 0.0 && delay > 0)
      throw std::invalid_argument(
          "WalkParams: noisy (epsilon>0) and delayed (delay>0) modes are exclusive");
  }
};

// Default cap for drifting walks: ten times the expected crossing time.
// For s == 0 the crossing time has infinite moments, so the cap must be an
// explicit user choice; this helper refuses to pick one.
inline std::int64_t default_horizon_cap(double ell, double s) {
  if (s <= 0.0)
    throw std::invalid_argument(
        "horizon_cap must be set explicitly when s == 0 (crossing time has "
        "infinite moments)");
  return std::max<std::int64_t>(
      10 * static_cast<std::int64_t>(std::ceil(ell / s)), 1000);
}

struct PathState {
  std::int64_t t = 0;
  double x = 0.0;  // latent X_t
  double y = 0.0;  // observed Y_t (noisy mode); mirrors x in delayed mode
};

struct FirstPassage {
  std::int64_t tau = 0;
  double overshoot = 0.0;  // X_tau - ell, >= 0 when not truncated
  bool truncated = false;  // horizon_cap reached before crossing
};

// One step of the latent walk plus the noisy observation channel.
// v, w are standard-normal draws. In delayed mode the observation is
// produced by the delay channel instead, and y just mirrors x.
inline PathState advance(const PathState& st, const WalkParams& p, double v,
                         double w) noexcept {
  PathState nxt;
  nxt.t = st.t + 1;
  nxt.x = st.x + p.s + v;
  nxt.y = p.delayed_mode() ? nxt.x : st.y + p.s + v + p.epsilon * w;
  return nxt;
}

// First time X_t >= ell, fed by any source of standard-normal draws
// (callable double()). Truncation at horizon_cap is reported in the result,
// never as a failure.
template <class Draws>
FirstPassage simulate_first_passage(const WalkParams& p, Draws&& next_v) {
  if (p.ell <= 0.0) return {0, -p.ell, false};
  double x = 0.0;
  for (std::int64_t t = 1; t <= p.horizon_cap; ++t) {
    x += p.s + next_v();
    if (x >= p.ell) return {t, x - p.ell, false};
  }
  return {p.horizon_cap, 0.0, true};
}

inline FirstPassage simulate_first_passage(const WalkParams& p,
                                           RandomStream& v_stream) {
  return simulate_first_passage(p, [&v_stream] { return v_stream.normal(); });
}

inline FirstPassage simulate_first_passage(const WalkParams& p,
                                           std::span<const double> draws) {
  if (p.ell > 0.0 &&
      draws.size() < static_cast<std::size_t>(p.horizon_cap))
    throw std::invalid_argument(
        "simulate_first_passage: draw sequence shorter than horizon_cap");
  std::size_t i = 0;
  return simulate_first_passage(p, [&draws, &i] { return draws[i++]; });
}

}  // namespace fptrack
