// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/normal.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "shadowsim/errors.hpp"

namespace shadowsim {

double log_norm_sf(double x) {
  if (x < 35.0) {
    double s = norm_sf(x);
    if (s > 0.0) return std::log(s);
  }
  // Continued asymptotic expansion Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - ...).
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(x * kSqrt2Pi) + std::log(series);
}

namespace {

// AS241 (Wichura) PPND16 coefficients.
constexpr std::array<double, 8> kA = {
    3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr std::array<double, 7> kB = {
    4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
    2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
    5.2264952788528545610e3};
constexpr std::array<double, 8> kC = {
    1.42343711074968357734e0,  4.63033784615654529590e0,
    5.76949722146069140550e0,  3.64784832476320460504e0,
    1.27045825245236838258e0,  2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr std::array<double, 7> kD = {
    2.05319162663775882187e0,  1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9};
constexpr std::array<double, 8> kE = {
    6.65790464350110377720e0,  5.46378491116411436990e0,
    1.78482653991729133580e0,  2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr std::array<double, 7> kF = {
    5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15};

double rational(const std::array<double, 8>& num, const std::array<double, 7>& den, double r) {
  double p = num[7];
  for (int i = 6; i >= 0; --i) p = p * r + num[i];
  double q = den[6];
  for (int i = 5; i >= 0; --i) q = q * r + den[i];
  q = q * r + 1.0;
  return p / q;
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw parameter_error("norm_quantile: p must lie in [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * rational(kA, kB, r);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    x = rational(kC, kD, r - 1.6);
  } else {
    x = rational(kE, kF, r - 5.0);
  }
  return (q < 0.0) ? -x : x;
}

double truncated_normal_lower(double z_lo, double u) {
  // Map u into the upper tail mass so the far tail keeps full precision.
  const double sf = norm_sf(z_lo);
  if (sf <= 0.0) return z_lo;  // unreachable tail; clamp
  double v = sf * u;
  if (v <= 0.0) v = std::numeric_limits<double>::denorm_min();
  return -norm_quantile(v);
}

double kolmogorov_critical(double alpha) {
  // Constants pinned for the experiment protocols.
  if (alpha == 0.01) return 1.628;
  if (alpha == 0.05) return 1.358;
  if (alpha == 0.10) return 1.224;
  throw parameter_error("kolmogorov_critical: supported levels are 0.01, 0.05, 0.10");
}

}  // namespace shadowsim
