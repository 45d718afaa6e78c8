#include "fptrack/estimators.hpp"

#include <cmath>

namespace fptrack {

std::int64_t t_star(double ell, double s, double q) {
  if (!(s > 0.0)) throw std::invalid_argument("t_star: requires drift s > 0");
  if (!(q > 0.5 && q < 1.0))
    throw std::invalid_argument("t_star: exponent q must lie in (1/2, 1)");
  const double m = ell / s;
  if (m < 1.0)
    throw std::invalid_argument(
        "t_star: requires ell/s >= 1, otherwise ell/s - (ell/s)^q < 0");
  const double v = m - std::pow(m, q);
  return static_cast<std::int64_t>(std::floor(v));
}

StopDecision fixed_time_eta(double ell, double s) {
  if (!(s > 0.0))
    throw std::invalid_argument("fixed_time_eta: requires drift s > 0");
  if (ell < 0.0)
    throw std::invalid_argument("fixed_time_eta: requires ell >= 0");
  return {static_cast<std::int64_t>(std::llround(ell / s)), false};
}

StopDecision single_observation_eta(const WalkParams& params, double q,
                                    double y_at_tstar) {
  const std::int64_t ts = t_star(params.ell, params.s, q);
  const double xhat =
      ts == 0 ? 0.0 : mmse_estimate(y_at_tstar, ts, params.s, params.epsilon);
  const double gap = params.ell - xhat;
  std::int64_t eta = ts;
  if (gap > 0.0) eta += static_cast<std::int64_t>(std::floor(gap / params.s));
  if (eta > params.horizon_cap) return {params.horizon_cap, true};
  return {eta, false};
}

}  // namespace fptrack
