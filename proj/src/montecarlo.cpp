#include "fptrack/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "fptrack/theory.hpp"

namespace fptrack {

namespace {

constexpr std::int64_t kChunk = 1024;  // trials per work unit, fixed so the
                                       // reduction layout never depends on
                                       // the worker count

struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) noexcept {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  void merge(const KahanSum& o) noexcept {
    add(o.s);
    add(-o.c);
  }
  double value() const noexcept { return s; }
};

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs work(chunk_index) for chunk_index in [0, n_chunks) over a pool of
// workers. Chunk results must be written to per-chunk slots; ordering of
// execution is unspecified.
void parallel_chunks(std::int64_t n_chunks, int workers,
                     const std::function<void(std::int64_t)>& work) {
  workers = std::min<std::int64_t>(resolve_workers(workers), n_chunks);
  if (workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) work(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        work(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double abs_power(double x, double p) {
  const double a = std::fabs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 0.5) return std::sqrt(a);
  return std::pow(a, p);
}

void validate_estimators(const WalkParams& params,
                         std::span<const EstimatorKind> kinds) {
  if (kinds.empty())
    throw std::invalid_argument("run_coupled_trial: no estimators requested");
  for (const auto& k : kinds) {
    switch (k.tag) {
      case EstimatorKind::Tag::sequential_mmse:
      case EstimatorKind::Tag::single_observation:
      case EstimatorKind::Tag::fixed_time:
        if (params.delay != 0)
          throw std::invalid_argument(
              "estimator requires noisy mode (delay == 0)");
        if (!(params.s > 0.0))
          throw std::invalid_argument("estimator requires drift s > 0");
        break;
      case EstimatorKind::Tag::delayed_threshold:
        if (params.epsilon != 0.0)
          throw std::invalid_argument(
              "delayed-threshold estimator requires epsilon == 0");
        break;
    }
  }
}

// Per-trial simulation state for one estimator.
struct Slot {
  EstimatorKind kind;
  SequentialMmseRule seq;
  DelayedThresholdRule del;
  std::int64_t single_obs_time = -1;
  bool done = false;
  StopDecision dec{};
};

}  // namespace

std::vector<TrialOutcome> run_coupled_trial(const WalkParams& params,
                                            std::span<const EstimatorKind> kinds,
                                            const StreamKey& trial_id,
                                            PathProbe* probe) {
  params.validate();
  validate_estimators(params, kinds);

  RandomStream vs({trial_id.master_seed, trial_id.sweep_index,
                   trial_id.trial_index, kLaneWalk});
  RandomStream ws({trial_id.master_seed, trial_id.sweep_index,
                   trial_id.trial_index, kLaneNoise});
  const bool delayed = params.delayed_mode();

  bool tau_done = params.ell <= 0.0;
  std::int64_t tau = 0;
  double overshoot = tau_done ? -params.ell : 0.0;
  bool tau_trunc = false;

  std::vector<Slot> slots;
  slots.reserve(kinds.size());
  int unresolved = tau_done ? 0 : 1;
  for (const auto& k : kinds) {
    Slot sl{k, SequentialMmseRule(params), DelayedThresholdRule(params), -1,
            false, {}};
    switch (k.tag) {
      case EstimatorKind::Tag::fixed_time: {
        StopDecision d = fixed_time_eta(params.ell, params.s);
        if (d.eta > params.horizon_cap) d = {params.horizon_cap, true};
        sl.dec = d;
        sl.done = true;
        break;
      }
      case EstimatorKind::Tag::single_observation: {
        sl.single_obs_time = t_star(params.ell, params.s, k.q);
        if (sl.single_obs_time == 0) {
          sl.dec = single_observation_eta(params, k.q, 0.0);
          sl.done = true;
        }
        break;
      }
      case EstimatorKind::Tag::sequential_mmse: {
        if (auto eta = sl.seq.offer(0, 0.0)) {
          sl.dec = {*eta, false};
          sl.done = true;
        }
        break;
      }
      case EstimatorKind::Tag::delayed_threshold: {
        if (auto eta = sl.del.offer(0, 0.0)) {
          sl.dec = {*eta, false};
          sl.done = true;
        }
        break;
      }
    }
    if (!sl.done) ++unresolved;
    slots.push_back(sl);
  }

  PathState st{};
  DelayRing ring(delayed ? params.delay : 0);
  for (std::int64_t t = 1; unresolved > 0 && t <= params.horizon_cap; ++t) {
    const double v = vs.normal();
    const double w = delayed ? 0.0 : ws.normal();
    st = advance(st, params, v, w);
    double y_obs;
    if (delayed) {
      ring.push(st.x);
      y_obs = ring.observe(t);
    } else {
      y_obs = st.y;
    }
    if (probe) probe->on_step(t, v, w, st.x, y_obs);
    if (!tau_done && st.x >= params.ell) {
      tau_done = true;
      tau = t;
      overshoot = st.x - params.ell;
      --unresolved;
    }
    for (auto& sl : slots) {
      if (sl.done) continue;
      switch (sl.kind.tag) {
        case EstimatorKind::Tag::sequential_mmse:
          if (auto eta = sl.seq.offer(t, y_obs)) {
            sl.dec = {*eta, false};
            sl.done = true;
            --unresolved;
          }
          break;
        case EstimatorKind::Tag::delayed_threshold:
          if (auto eta = sl.del.offer(t, y_obs)) {
            sl.dec = {*eta, false};
            sl.done = true;
            --unresolved;
          }
          break;
        case EstimatorKind::Tag::single_observation:
          if (t == sl.single_obs_time) {
            sl.dec = single_observation_eta(params, sl.kind.q, y_obs);
            sl.done = true;
            --unresolved;
          }
          break;
        case EstimatorKind::Tag::fixed_time:
          break;  // resolved at t = 0
      }
    }
  }
  if (!tau_done) {
    tau = params.horizon_cap;
    overshoot = 0.0;
    tau_trunc = true;
  }

  std::vector<TrialOutcome> out;
  out.reserve(slots.size());
  for (auto& sl : slots) {
    if (!sl.done) sl.dec = {params.horizon_cap, true};
    out.push_back({sl.kind, tau, sl.dec.eta, overshoot,
                   tau_trunc || sl.dec.stopped_by_cap});
  }
  return out;
}

std::int64_t required_samples(double delta, const EstimatorKind& kind,
                              Mode mode, double epsilon) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("required_samples: delta must lie in (0, 1)");
  const double base = M_PI / (2.0 * delta * delta * delta);
  if (mode == Mode::noisy && kind.tag == EstimatorKind::Tag::fixed_time) {
    if (!(epsilon > 0.0))
      throw std::invalid_argument(
          "required_samples: fixed-time sizing needs epsilon > 0");
    const double e2 = epsilon * epsilon;
    return static_cast<std::int64_t>(std::ceil((1.0 + e2) / e2 * base));
  }
  return static_cast<std::int64_t>(std::ceil(base));
}

void ExperimentConfig::validate() const {
  if (sweep.empty())
    throw std::invalid_argument("ExperimentConfig: sweep must be nonempty");
  if (estimators.empty())
    throw std::invalid_argument("ExperimentConfig: no estimators requested");
  if (p < 1.0)
    throw std::invalid_argument(
        "ExperimentConfig: p must be >= 1 in noisy/delayed mode");
  if (!precision.n_override && !(precision.delta > 0.0 && precision.delta < 1.0))
    throw std::invalid_argument("ExperimentConfig: delta must lie in (0, 1)");
  if (precision.n_override && *precision.n_override < 1)
    throw std::invalid_argument("ExperimentConfig: n must be >= 1");
  if (horizon_cap && *horizon_cap < 1)
    throw std::invalid_argument("ExperimentConfig: horizon_cap must be >= 1");
  if (mode == Mode::noisy) {
    if (!(s > 0.0))
      throw std::invalid_argument("noisy mode requires drift s > 0");
    if (!(epsilon > 0.0))
      throw std::invalid_argument("noisy mode requires epsilon > 0");
    for (const auto& k : estimators)
      if (k.tag == EstimatorKind::Tag::delayed_threshold)
        throw std::invalid_argument(
            "delayed-threshold estimator is not valid in noisy mode");
    for (double ell : sweep)
      if (!(ell > 0.0))
        throw std::invalid_argument("noisy sweep levels must be > 0");
  } else {
    if (s < 0.0) throw std::invalid_argument("drift s must be >= 0");
    if (epsilon != 0.0)
      throw std::invalid_argument("delayed mode requires epsilon == 0");
    if (s == 0.0 && !horizon_cap)
      throw std::invalid_argument(
          "delayed mode with s == 0 requires an explicit horizon_cap "
          "(crossing time has infinite moments)");
    for (const auto& k : estimators)
      if (k.tag != EstimatorKind::Tag::delayed_threshold)
        throw std::invalid_argument(
            "delayed mode supports the delayed-threshold estimator only");
    for (double d : sweep) {
      if (d < 0.0 || d != std::floor(d))
        throw std::invalid_argument(
            "delayed sweep values must be nonnegative integers");
    }
  }
}

WalkParams ExperimentConfig::params_at(double sweep_value) const {
  WalkParams wp;
  wp.s = s;
  if (mode == Mode::noisy) {
    wp.ell = sweep_value;
    wp.epsilon = epsilon;
    wp.delay = 0;
  } else {
    wp.delay = static_cast<std::int64_t>(std::llround(sweep_value));
    wp.ell = level_rule.base + (level_rule.plus_sd ? s * sweep_value : 0.0);
    wp.epsilon = 0.0;
  }
  wp.horizon_cap =
      horizon_cap ? *horizon_cap : default_horizon_cap(wp.ell, wp.s);
  return wp;
}

std::int64_t ExperimentConfig::trials_per_point() const {
  if (precision.n_override) return *precision.n_override;
  std::int64_t n = 1;
  for (const auto& k : estimators)
    n = std::max(n, required_samples(precision.delta, k, mode, epsilon));
  return n;
}

std::vector<MomentEstimate> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  // Resolve everything fallible up front; a partial sweep is never emitted.
  const std::int64_t n = cfg.trials_per_point();
  std::vector<WalkParams> point_params;
  std::vector<std::vector<double>> point_constants;  // per point, per estimator
  for (double value : cfg.sweep) {
    WalkParams wp = cfg.params_at(value);
    wp.validate();
    std::vector<double> constants;
    for (const auto& k : cfg.estimators) {
      if (cfg.mode == Mode::noisy) {
        constants.push_back(c1(wp.ell, cfg.s, cfg.epsilon, cfg.p));
      } else if (cfg.s > 0.0) {
        constants.push_back(c2(double(wp.delay), cfg.s, cfg.p));
      } else {
        constants.push_back(driftless_delay_moment(double(wp.delay), cfg.p));
      }
      if (k.tag == EstimatorKind::Tag::single_observation)
        (void)t_star(wp.ell, cfg.s, k.q);  // reject infeasible parameters now
    }
    point_params.push_back(wp);
    point_constants.push_back(std::move(constants));
  }

  const std::size_t n_est = cfg.estimators.size();
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;

  std::vector<MomentEstimate> results;
  results.reserve(cfg.sweep.size() * n_est);

  for (std::size_t sw = 0; sw < cfg.sweep.size(); ++sw) {
    const WalkParams& wp = point_params[sw];

    struct ChunkAcc {
      KahanSum sum, sumsq;
      std::int64_t trunc = 0;
    };
    std::vector<std::vector<ChunkAcc>> acc(
        static_cast<std::size_t>(n_chunks),
        std::vector<ChunkAcc>(n_est));

    parallel_chunks(n_chunks, cfg.workers, [&](std::int64_t chunk) {
      const std::int64_t lo = chunk * kChunk;
      const std::int64_t hi = std::min(n, lo + kChunk);
      auto& slots = acc[static_cast<std::size_t>(chunk)];
      for (std::int64_t trial = lo; trial < hi; ++trial) {
        const StreamKey id{cfg.master_seed, static_cast<std::uint32_t>(sw),
                           static_cast<std::uint64_t>(trial), 0};
        const auto outcomes = run_coupled_trial(wp, cfg.estimators, id);
        for (std::size_t e = 0; e < n_est; ++e) {
          const auto& oc = outcomes[e];
          const double err =
              abs_power(double(oc.eta) - double(oc.tau), cfg.p);
          slots[e].sum.add(err);
          slots[e].sumsq.add(err * err);
          if (oc.truncated) ++slots[e].trunc;
        }
      }
    });

    for (std::size_t e = 0; e < n_est; ++e) {
      KahanSum sum, sumsq;
      std::int64_t trunc = 0;
      for (std::int64_t c = 0; c < n_chunks; ++c) {
        sum.merge(acc[static_cast<std::size_t>(c)][e].sum);
        sumsq.merge(acc[static_cast<std::size_t>(c)][e].sumsq);
        trunc += acc[static_cast<std::size_t>(c)][e].trunc;
      }
      MomentEstimate m;
      m.kind = cfg.estimators[e];
      m.sweep_value = cfg.sweep[sw];
      m.n = n;
      m.empirical_moment = sum.value() / double(n);
      const double var_num =
          sumsq.value() - sum.value() * sum.value() / double(n);
      m.stderr_ = n > 1 ? std::sqrt(std::max(0.0, var_num / double(n - 1))) /
                              std::sqrt(double(n))
                        : 0.0;
      m.theory_constant = point_constants[sw][e];
      m.ratio = m.theory_constant > 0.0
                    ? m.empirical_moment / m.theory_constant
                    : 0.0;
      m.truncated_count = trunc;
      results.push_back(m);
    }
  }
  return results;
}

namespace {

// Simulate first-passage times for n trials into tau[i], flags into
// trunc[i]; storage is indexed by trial so the result is scheduling-free.
void simulate_passages(const WalkParams& params, std::int64_t n,
                       std::uint64_t master_seed, int workers,
                       std::vector<double>& tau, std::vector<bool>* trunc) {
  tau.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::uint8_t> tflags;
  if (trunc) tflags.assign(static_cast<std::size_t>(n), 0);
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  parallel_chunks(n_chunks, workers, [&](std::int64_t chunk) {
    const std::int64_t lo = chunk * kChunk;
    const std::int64_t hi = std::min(n, lo + kChunk);
    for (std::int64_t trial = lo; trial < hi; ++trial) {
      RandomStream vs({master_seed, 0, static_cast<std::uint64_t>(trial),
                       kLaneWalk});
      const FirstPassage fp = simulate_first_passage(params, vs);
      tau[static_cast<std::size_t>(trial)] = double(fp.tau);
      if (trunc) tflags[static_cast<std::size_t>(trial)] = fp.truncated;
    }
  });
  if (trunc) {
    trunc->assign(static_cast<std::size_t>(n), false);
    for (std::int64_t i = 0; i < n; ++i)
      (*trunc)[static_cast<std::size_t>(i)] = tflags[static_cast<std::size_t>(i)] != 0;
  }
}

}  // namespace

std::vector<DivergenceRow> run_divergence_demo(const DivergenceConfig& cfg) {
  if (!(cfg.ell > 0.0))
    throw std::invalid_argument("divergence demo requires ell > 0");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument(
        "divergence demo requires epsilon > 0 (noisy observations)");
  if (cfg.p < 0.5)
    throw std::invalid_argument("divergence demo requires p >= 1/2");
  if (cfg.horizon_cap < 1)
    throw std::invalid_argument(
        "divergence demo refuses to run without an explicit horizon_cap");
  if (cfg.n_grid.empty())
    throw std::invalid_argument("divergence demo requires a nonempty n grid");
  for (std::int64_t n : cfg.n_grid)
    if (n < 1)
      throw std::invalid_argument("divergence demo n grid must be >= 1");

  std::vector<std::int64_t> grid = cfg.n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::int64_t n_max = grid.back();

  WalkParams wp;
  wp.s = 0.0;
  wp.ell = cfg.ell;
  wp.epsilon = cfg.epsilon;
  wp.horizon_cap = cfg.horizon_cap;
  wp.validate();

  std::vector<double> tau;
  std::vector<bool> trunc;
  simulate_passages(wp, n_max, cfg.master_seed, cfg.workers, tau, &trunc);

  std::vector<DivergenceRow> rows;
  rows.reserve(grid.size());
  std::vector<double> scratch;
  for (std::int64_t n : grid) {
    scratch.assign(tau.begin(), tau.begin() + n);
    // lower median as the constant estimator; any estimator exhibits the
    // divergence, a constant is just the cheapest witness
    auto mid = scratch.begin() + (n - 1) / 2;
    std::nth_element(scratch.begin(), mid, scratch.end());
    const double eta_const = *mid;
    KahanSum sum;
    std::int64_t truncated = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      sum.add(abs_power(tau[static_cast<std::size_t>(i)] - eta_const, cfg.p));
      if (trunc[static_cast<std::size_t>(i)]) ++truncated;
    }
    rows.push_back({n, sum.value() / double(n),
                    double(truncated) / double(n)});
  }
  return rows;
}

double empirical_cdf_check(const WalkParams& params, std::int64_t n,
                           std::uint64_t master_seed, int workers) {
  params.validate();
  if (!(params.s > 0.0))
    throw std::invalid_argument("empirical_cdf_check: requires drift s > 0");
  if (n < 1)
    throw std::invalid_argument("empirical_cdf_check: empty sample");

  std::vector<double> tau;
  simulate_passages(params, n, master_seed, workers, tau, nullptr);

  const double scale = std::sqrt(params.s * params.s * params.s / params.ell);
  const double center = params.ell / params.s;
  for (double& t : tau) t = scale * (t - center);
  std::sort(tau.begin(), tau.end());

  double ks = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double phi = normal_cdf(tau[static_cast<std::size_t>(i)]);
    ks = std::max(ks, double(i + 1) / double(n) - phi);
    ks = std::max(ks, phi - double(i) / double(n));
  }
  return ks;
}

std::vector<TailCheckRow> tail_bound_check(const WalkParams& params,
                                           double sigma2,
                                           std::span<const double> zs,
                                           std::int64_t n,
                                           std::uint64_t master_seed,
                                           int workers) {
  params.validate();
  if (!(params.s > 0.0))
    throw std::invalid_argument("tail_bound_check: requires drift s > 0");
  if (n < 1) throw std::invalid_argument("tail_bound_check: empty sample");
  if (zs.empty())
    throw std::invalid_argument("tail_bound_check: empty z grid");

  std::vector<double> grid(zs.begin(), zs.end());
  std::sort(grid.begin(), grid.end());
  // validate the whole grid before simulating
  for (double z : grid) {
    (void)lower_tail_bound(params.ell, params.s, sigma2, z);
    (void)upper_tail_bound(params.ell, params.s, sigma2, z);
  }

  std::vector<double> tau;
  simulate_passages(params, n, master_seed, workers, tau, nullptr);

  const double center = params.ell / params.s;
  std::vector<TailCheckRow> rows;
  rows.reserve(grid.size());
  for (double z : grid) {
    TailCheckRow row;
    row.z = z;
    row.lower_bound = lower_tail_bound(params.ell, params.s, sigma2, z);
    row.upper_bound = upper_tail_bound(params.ell, params.s, sigma2, z);
    std::int64_t below = 0, above = 0;
    for (double t : tau) {
      if (t < center - z) ++below;
      if (t > center + z) ++above;
    }
    row.lower_empirical = double(below) / double(n);
    row.upper_empirical = double(above) / double(n);
    row.lower_stderr = std::sqrt(row.lower_empirical *
                                 (1.0 - row.lower_empirical) / double(n));
    row.upper_stderr = std::sqrt(row.upper_empirical *
                                 (1.0 - row.upper_empirical) / double(n));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fptrack
