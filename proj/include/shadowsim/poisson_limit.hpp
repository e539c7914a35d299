// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shadowsim/mark_kernel.hpp"
#include "shadowsim/propagation.hpp"
#include "shadowsim/rng.hpp"

namespace shadowsim {

/// Parameters of the limiting inhomogeneous Poisson propagation process with
/// intensity Lambda([0,y)) = a * y^{2/beta}.
struct LimitModel {
  double a = 1.0;      // propagation constant
  double beta = 4.0;   // path-loss exponent, > 2
  double K = 1.0;
  double lambda = 1.0;
  std::optional<double> sigma;  // needed for the conditional-distance laws

  /// a = lambda * pi * E[S^{2/beta}] / K^2.
  static LimitModel from_network(double lambda, double K, double beta,
                                 const ShadowingSpec& spec);
  /// Limit of the K^(sigma)-rescaled process: a = lambda * pi / K^2.
  static LimitModel rescaled_limit(double lambda, double K, double beta);
  static LimitModel from_constant(double a, double beta);

  void validate() const;
};

/// Lambda([0,y)) = a y^{2/beta}.
double intensity(double y, const LimitModel& model);

/// P(L* >= t) = exp(-a t^{2/beta}).
double lstar_ccdf(double t, const LimitModel& model);

/// Inverse-CDF draw of the smallest loss L*.
double sample_lstar(const LimitModel& model, Rng& rng);

/// All losses on (0, l_max], sorted: L_i = (Gamma_i / a)^{beta/2} with
/// Gamma_i the cumulative unit-rate exponential arrivals.
std::vector<double> sample_limit_process(const LimitModel& model, double l_max, Rng& rng);

/// Marked limit sample per the limiting joint law: rescaled distances are
/// i.i.d. standard Gaussian, the type is drawn from the kernel at the same
/// Gaussian value, both independent of the losses.
struct MarkedLimitSample {
  std::vector<double> losses;
  std::vector<double> rescaled_distances;
  std::vector<std::size_t> types;
};
MarkedLimitSample sample_limit_marked(const LimitModel& model, const MarkKernel* kernel,
                                      double l_max, Rng& rng);

/// G_u^R(rho) = P(S e^{2 sigma^2/beta} <= (K rho)^beta / u): CDF of the
/// distance to the station received with loss u, log-normal shadowing.
double conditional_distance_cdf(double rho, double u, const LimitModel& model);

/// Draw R_u = (u^{1/beta}/K) exp(2 sigma^2/beta^2) S^{1/beta}.
double sample_conditional_distance(double u, const LimitModel& model, Rng& rng);

/// Tilted type law E[G^{T|Z}(tau | Z + 2 sigma/beta)]: the law of the type of
/// a station given its loss is observed (independent of the loss value).
std::vector<double> tilted_type_law(const MarkKernel& kernel, double sigma, double beta);

/// G(rho, tau) = Integral_{-inf}^{rho} G^{T|Z}(tau|z) phi(z) dz for one type.
double limit_mark_law(const MarkKernel& kernel, double rho, std::size_t type);
/// All types at once.
std::vector<double> limit_mark_law(const MarkKernel& kernel, double rho);

/// E[F^{2/beta}] for the Suzuki extra factor: analytic
/// mean^{2/beta} Gamma(1 + 2/beta) for the exponential power, empirical mean
/// for generic samples.
double suzuki_scale(const ShadowingSpec& spec, double beta);

/// SIR of one realization with mean-compensated interference tail:
/// (1/L*) / (sum 1/L_i - 1/L* + tail_mean). Empty realizations give +inf.
double sir_from_losses(std::span<const double> losses, double tail_mean);

/// Exact mean of the truncated interference tail
/// Integral_{l_max}^inf y^{-1} Lambda(dy) = (2a/(beta-2)) l_max^{2/beta - 1}.
double interference_tail_mean(const LimitModel& model, double l_max);

std::vector<double> sample_sir(const LimitModel& model, std::size_t draws, double l_max, Rng& rng);

/// Monte Carlo P(SIR > t) on a threshold grid.
std::vector<double> sir_ccdf_mc(const LimitModel& model, std::span<const double> thresholds,
                                std::size_t replications, double l_max, std::uint64_t seed);

}  // namespace shadowsim
