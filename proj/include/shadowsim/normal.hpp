// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>

namespace shadowsim {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

/// Standard Gaussian CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Standard Gaussian survival function 1 - Phi(x).
inline double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

/// log(1 - Phi(x)), usable far beyond the underflow range of erfc.
double log_norm_sf(double x);

/// Inverse of norm_cdf (Wichura's PPND16 rational approximation).
double norm_quantile(double p);

/// Draw Z ~ N(0,1) conditioned on Z >= z_lo, given u ~ U(0,1).
double truncated_normal_lower(double z_lo, double u);

/// Asymptotic Kolmogorov critical constant c(alpha); supports 0.01, 0.05, 0.10.
/// One-sample critical value is c(alpha)/sqrt(n).
double kolmogorov_critical(double alpha);

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz confidence band at level 1-alpha.
inline double dkw_epsilon(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

}  // namespace shadowsim
