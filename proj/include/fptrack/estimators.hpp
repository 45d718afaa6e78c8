#pragma once
// The four stopping rules estimating the first-passage time from the
// observation process alone:
//   - sequential mmse: stop when the running mmse estimate of X_t hits ell
//   - single observation: look once at t_star, extrapolate at rate s
//   - fixed time: round(ell/s), ignores observations entirely
//   - delayed threshold: stop when the delayed view hits ell - s*d

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "fptrack/walk.hpp"

namespace fptrack {

struct EstimatorKind {
  enum class Tag { sequential_mmse, single_observation, fixed_time, delayed_threshold };
  Tag tag = Tag::sequential_mmse;
  double q = 0.51;  // single_observation exponent, in (1/2, 1)

  static EstimatorKind SequentialMmse() { return {Tag::sequential_mmse, 0.0}; }
  static EstimatorKind SingleObservation(double q) {
    if (!(q > 0.5 && q < 1.0))
      throw std::invalid_argument("single-observation exponent q must lie in (1/2, 1)");
    return {Tag::single_observation, q};
  }
  static EstimatorKind FixedTime() { return {Tag::fixed_time, 0.0}; }
  static EstimatorKind DelayedThreshold() { return {Tag::delayed_threshold, 0.0}; }

  std::string_view name() const noexcept {
    switch (tag) {
      case Tag::sequential_mmse: return "sequential_mmse";
      case Tag::single_observation: return "single_observation";
      case Tag::fixed_time: return "fixed_time";
      case Tag::delayed_threshold: return "delayed_threshold";
    }
    return "?";
  }
};

struct StopDecision {
  std::int64_t eta = 0;
  bool stopped_by_cap = false;
};

// mmse estimator of X_t given the single observation Y_t:
//   Xhat_t = Y_t/(1+eps^2) + s*eps^2*t/(1+eps^2),  Xhat_0 = 0.
inline double mmse_estimate(double y_t, std::int64_t t, double s,
                            double epsilon) noexcept {
  const double e2 = epsilon * epsilon;
  return y_t / (1.0 + e2) + s * e2 * double(t) / (1.0 + e2);
}

// t_star = floor(ell/s - (ell/s)^q). Rejects parameter sets with ell/s < 1,
// where the expression would go negative.
std::int64_t t_star(double ell, double s, double q);

// eta = round(ell/s) to the nearest integer.
StopDecision fixed_time_eta(double ell, double s);

// eta = t_star + floor((ell - Xhat_{t_star})_+ / s), a function of the single
// observation Y_{t_star}. When t_star == 0 the convention Xhat_0 = 0 applies
// and y_at_tstar is ignored.
StopDecision single_observation_eta(const WalkParams& params, double q,
                                    double y_at_tstar);

// Incremental form of the sequential rule: feed observations (t, y_t) in
// order; returns eta the first time Xhat_t >= ell.
class SequentialMmseRule {
 public:
  explicit SequentialMmseRule(const WalkParams& p)
      : s_(p.s), ell_(p.ell), epsilon_(p.epsilon) {}

  std::optional<std::int64_t> offer(std::int64_t t, double y_t) noexcept {
    if (done_) return eta_;
    const double xhat = t == 0 ? 0.0 : mmse_estimate(y_t, t, s_, epsilon_);
    if (xhat >= ell_) {
      done_ = true;
      eta_ = t;
      return eta_;
    }
    return std::nullopt;
  }
  bool done() const noexcept { return done_; }

 private:
  double s_, ell_, epsilon_;
  bool done_ = false;
  std::int64_t eta_ = 0;
};

// Incremental form of the delayed-threshold rule: stop when y_t >= ell - s*d.
class DelayedThresholdRule {
 public:
  explicit DelayedThresholdRule(const WalkParams& p)
      : threshold_(p.ell - p.s * double(p.delay)) {}

  double threshold() const noexcept { return threshold_; }

  std::optional<std::int64_t> offer(std::int64_t t, double y_t) noexcept {
    if (done_) return eta_;
    if (y_t >= threshold_) {
      done_ = true;
      eta_ = t;
      return eta_;
    }
    return std::nullopt;
  }
  bool done() const noexcept { return done_; }

 private:
  double threshold_;
  bool done_ = false;
  std::int64_t eta_ = 0;
};

// Stream drivers over any range of (t, y_t) pairs. The estimators see the
// observation process only; nothing about the latent path enters here.
template <class ObsRange>
StopDecision run_sequential_mmse(const WalkParams& params, const ObsRange& obs) {
  SequentialMmseRule rule(params);
  for (const auto& [t, y] : obs) {
    if (auto eta = rule.offer(t, y)) return {*eta, false};
    if (t >= params.horizon_cap) break;
  }
  return {params.horizon_cap, true};
}

template <class ObsRange>
StopDecision delayed_eta(const WalkParams& params, const ObsRange& obs) {
  DelayedThresholdRule rule(params);
  for (const auto& [t, y] : obs) {
    if (auto eta = rule.offer(t, y)) return {*eta, false};
    if (t >= params.horizon_cap) break;
  }
  return {params.horizon_cap, true};
}

// Theorem 4's hypothesis for the delayed rule; callers warn when violated.
inline bool delayed_threshold_hypothesis_ok(const WalkParams& p) noexcept {
  return p.ell >= p.s * double(p.delay);
}

}  // namespace fptrack
