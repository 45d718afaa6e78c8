#pragma once
// Coupled-trial experiment engine: tau and every requested estimator are
// evaluated on one shared path per trial, trials are distributed over
// workers on deterministic per-trial streams, and the reduction is
// performed in fixed trial order so output never depends on the worker
// count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fptrack/estimators.hpp"
#include "fptrack/rng.hpp"
#include "fptrack/walk.hpp"

namespace fptrack {

enum class Mode { noisy, delayed };

// Target precision delta as in the appendix sizing rule: the empirical
// ratio deviates from truth by less than delta with probability >= 1-delta.
struct PrecisionSpec {
  double delta = 0.05;
  std::optional<std::int64_t> n_override;
};

// Chebyshev sample sizing. Noisy mode: ceil(pi/(2 delta^3)) for the
// sequential and single-observation rules, (1+eps^2)/eps^2 times that for
// the fixed-time rule. Delayed mode: ceil(pi/(2 delta^3)).
std::int64_t required_samples(double delta, const EstimatorKind& kind,
                              Mode mode, double epsilon);

// ell as a function of d for delayed sweeps: base (+ s*d when plus_sd).
struct LevelRule {
  double base = 0.0;
  bool plus_sd = false;
};

struct ExperimentConfig {
  Mode mode = Mode::noisy;
  double s = 0.0;
  double epsilon = 0.0;  // noisy mode only
  double p = 1.0;
  std::vector<EstimatorKind> estimators;
  std::vector<double> sweep;  // ell values (noisy) or d values (delayed)
  LevelRule level_rule;       // delayed mode only
  PrecisionSpec precision;
  std::uint64_t master_seed = 0;
  int workers = 0;  // <= 0 means hardware concurrency
  std::optional<std::int64_t> horizon_cap;  // mandatory when s == 0

  // invoked after each sweep point finishes (plain progress reporting)
  std::function<void(std::size_t sweep_index, std::int64_t n)> on_point_done;

  void validate() const;
  WalkParams params_at(double sweep_value) const;
  std::int64_t trials_per_point() const;
};

// One coupled sample: the shared tau and one estimator's stop on that path.
struct TrialOutcome {
  EstimatorKind kind;
  std::int64_t tau = 0;
  std::int64_t eta = 0;
  double overshoot = 0.0;
  bool truncated = false;  // horizon hit before tau or this eta resolved
};

// Test hook: observes every step of a coupled trial.
struct PathProbe {
  virtual ~PathProbe() = default;
  virtual void on_step(std::int64_t t, double v, double w, double x,
                       double y_obs) = 0;
};

// Simulate one trial: a single (V, W) path drives tau and every requested
// estimator until all have stopped or the horizon cap. The streams are
// keyed by (master_seed, sweep_index, trial_index); the lane field of the
// key is ignored.
std::vector<TrialOutcome> run_coupled_trial(const WalkParams& params,
                                            std::span<const EstimatorKind> kinds,
                                            const StreamKey& trial_id,
                                            PathProbe* probe = nullptr);

struct MomentEstimate {
  EstimatorKind kind;
  double sweep_value = 0.0;  // ell or d
  std::int64_t n = 0;
  double empirical_moment = 0.0;
  double stderr_ = 0.0;  // sample sd of |eta-tau|^p over sqrt(n)
  double theory_constant = 0.0;
  double ratio = 0.0;
  std::int64_t truncated_count = 0;
};

// One MomentEstimate per (sweep point, estimator), in sweep-major order.
std::vector<MomentEstimate> run_experiment(const ExperimentConfig& cfg);

// Theorem-1 demonstration at s == 0: the p-moment of |eta_const - tau| for
// the constant estimator eta_const = empirical median of tau, across an
// increasing trial-count grid. Truncated trials are counted at the cap,
// never dropped.
struct DivergenceConfig {
  double ell = 0.0;
  double epsilon = 0.0;
  double p = 0.5;
  std::int64_t horizon_cap = 0;  // mandatory, no default for s == 0
  std::vector<std::int64_t> n_grid;
  std::uint64_t master_seed = 0;
  int workers = 0;
};

struct DivergenceRow {
  std::int64_t n = 0;
  double moment = 0.0;
  double truncation_rate = 0.0;
};

std::vector<DivergenceRow> run_divergence_demo(const DivergenceConfig& cfg);

// Kolmogorov-Smirnov distance between the empirical CDF of
// sqrt(s^3/ell) (tau - ell/s) over n trials and the standard normal CDF.
double empirical_cdf_check(const WalkParams& params, std::int64_t n,
                           std::uint64_t master_seed, int workers = 0);

// Lemma-1 tail validation: analytic bounds next to empirical tail
// frequencies of tau from n trials, one row per z (ascending).
struct TailCheckRow {
  double z = 0.0;
  double lower_bound = 0.0;
  double lower_empirical = 0.0;
  double lower_stderr = 0.0;
  double upper_bound = 0.0;
  double upper_empirical = 0.0;
  double upper_stderr = 0.0;
};

std::vector<TailCheckRow> tail_bound_check(const WalkParams& params,
                                           double sigma2,
                                           std::span<const double> zs,
                                           std::int64_t n,
                                           std::uint64_t master_seed,
                                           int workers = 0);

}  // namespace fptrack
