#pragma once
// Closed-form constants, concentration bounds, and reference distributions
// the simulations are compared against.

#include <stdexcept>

namespace fptrack {

// E|N|^p for N ~ N(0,1):  2^{p/2} Gamma((p+1)/2) / sqrt(pi), p >= 0.
double gauss_abs_moment(double p);

// Asymptotic minimal p-moment under noisy observations:
//   C1 = (ell*eps^2 / (s^3*(1+eps^2)))^{p/2} * E|N|^p.
// Requires s > 0 and eps > 0.
double c1(double ell, double s, double epsilon, double p);

// Asymptotic minimal p-moment under delayed observations with drift:
//   C2 = d^{p/2}/s^p * E|N|^p.  Requires s > 0; the s == 0 case is exactly
// d^p and is exposed separately.
double c2(double d, double s, double p);

// Exact error moment of the delayed rule when s == 0: |eta - tau|^p = d^p.
double driftless_delay_moment(double d, double p);

// lim_{ell->inf} E|tau - ell/s|^p / C1 = ((1+eps^2)/eps^2)^{p/2}, always > 1.
double fixed_time_ratio(double epsilon, double p);

// Upper bound on P(mu < ell/s - z) for a Gaussian walk with drift s and
// increment variance sigma2, valid for 0 <= z < ell/s:
//   exp(-s^2 z^2 / (2 sigma2 (ell/s - z))).
double lower_tail_bound(double ell, double s, double sigma2, double z);

// Upper bound on P(mu > ell/s + z), valid for z >= 0:
//   exp(-s^2 z^2 / (2 sigma2 (ell/s + z))).
double upper_tail_bound(double ell, double s, double sigma2, double z);

// Explicit-constant upper bound on E|mu - ell/s|^p, the chain
// E|mu - ell/s|^p <= 2 (I1 + I2) with
//   I1 <= (4 sigma2 ell / s^3)^{p/2} Gamma(p/2 + 1)   (k1 * ell^{p/2})
//   I2 <= s^{-2p} * Integral_0^inf exp(-t^{1/p}/(8 sigma2)) dt
//       = s^{-2p} (8 sigma2)^p Gamma(p+1)             (k2)
// The constants are exposed alongside the bound.
struct MomentBound {
  double value;  // 2 * (i1 + i2)
  double i1;     // k1 * ell^{p/2}
  double i2;     // k2
  double k1;
  double k2;
};
MomentBound centered_moment_bound(double ell, double s, double sigma2, double p);

// Standard normal CDF, the reference for the CLT check
// sqrt(s^3/(sigma2*ell)) (tau - ell/s) -> N(0,1).
double normal_cdf(double x);

}  // namespace fptrack
