#include "fptrack/theory.hpp"

#include <cmath>

namespace fptrack {

double gauss_abs_moment(double p) {
  if (p < 0.0)
    throw std::invalid_argument("gauss_abs_moment: requires p >= 0");
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) /
         std::sqrt(M_PI);
}

double c1(double ell, double s, double epsilon, double p) {
  if (!(s > 0.0)) throw std::invalid_argument("c1: requires 0 < s");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("c1: requires 0 < epsilon (noisy mode)");
  if (ell < 0.0) throw std::invalid_argument("c1: requires ell >= 0");
  if (p < 1.0) throw std::invalid_argument("c1: requires p >= 1");
  const double e2 = epsilon * epsilon;
  const double base = ell * e2 / (s * s * s * (1.0 + e2));
  return std::pow(base, 0.5 * p) * gauss_abs_moment(p);
}

double c2(double d, double s, double p) {
  if (!(s > 0.0))
    throw std::invalid_argument(
        "c2: requires s > 0; for s == 0 the exact moment is d^p "
        "(driftless_delay_moment)");
  if (d < 0.0) throw std::invalid_argument("c2: requires d >= 0");
  if (p < 1.0) throw std::invalid_argument("c2: requires p >= 1");
  return std::pow(d, 0.5 * p) / std::pow(s, p) * gauss_abs_moment(p);
}

double driftless_delay_moment(double d, double p) {
  if (d < 0.0)
    throw std::invalid_argument("driftless_delay_moment: requires d >= 0");
  if (p < 0.5)
    throw std::invalid_argument("driftless_delay_moment: requires p >= 1/2");
  return std::pow(d, p);
}

double fixed_time_ratio(double epsilon, double p) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument(
        "fixed_time_ratio: requires epsilon > 0 (ratio diverges at 0)");
  if (p < 1.0) throw std::invalid_argument("fixed_time_ratio: requires p >= 1");
  const double e2 = epsilon * epsilon;
  return std::pow((1.0 + e2) / e2, 0.5 * p);
}

double lower_tail_bound(double ell, double s, double sigma2, double z) {
  if (!(s > 0.0)) throw std::invalid_argument("lower_tail_bound: requires s > 0");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("lower_tail_bound: requires sigma2 > 0");
  if (z < 0.0 || z >= ell / s)
    throw std::invalid_argument(
        "lower_tail_bound: valid for 0 <= z < ell/s only");
  return std::exp(-s * s * z * z / (2.0 * sigma2 * (ell / s - z)));
}

double upper_tail_bound(double ell, double s, double sigma2, double z) {
  if (!(s > 0.0)) throw std::invalid_argument("upper_tail_bound: requires s > 0");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("upper_tail_bound: requires sigma2 > 0");
  if (z < 0.0)
    throw std::invalid_argument("upper_tail_bound: requires z >= 0");
  if (ell < 0.0)
    throw std::invalid_argument("upper_tail_bound: requires ell >= 0");
  return std::exp(-s * s * z * z / (2.0 * sigma2 * (ell / s + z)));
}

MomentBound centered_moment_bound(double ell, double s, double sigma2,
                                  double p) {
  if (!(p > 0.0))
    throw std::invalid_argument("centered_moment_bound: requires p > 0");
  if (!(s > 0.0))
    throw std::invalid_argument("centered_moment_bound: requires s > 0");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("centered_moment_bound: requires sigma2 > 0");
  if (ell < 0.0)
    throw std::invalid_argument("centered_moment_bound: requires ell >= 0");
  MomentBound b{};
  b.k1 = std::pow(4.0 * sigma2 / (s * s * s), 0.5 * p) *
         std::tgamma(0.5 * p + 1.0);
  b.k2 = std::pow(s, -2.0 * p) * std::pow(8.0 * sigma2, p) *
         std::tgamma(p + 1.0);
  b.i1 = b.k1 * std::pow(ell, 0.5 * p);
  b.i2 = b.k2;
  b.value = 2.0 * (b.i1 + b.i2);
  return b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace fptrack
