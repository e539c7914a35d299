// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "shadowsim/geometry.hpp"
#include "shadowsim/mark_kernel.hpp"
#include "shadowsim/rng.hpp"

namespace shadowsim {

/// sigma_dB = sigma * 10 / ln 10; all CLI inputs are in dB, all internal
/// computations use the natural-log sigma.
double sigma_from_db(double sigma_db);
double db_from_sigma(double sigma);

/// Log-normal propagation effect S = exp(mu + sigma Z) with mu = -sigma^2/2
/// (so E[S] = 1), optionally multiplied by an extra independent factor F
/// (Suzuki-style composite fading).
struct ShadowingSpec {
  enum class Extra { none, rayleigh_power, generic };

  double sigma = 0.0;  // natural-log scale, >= 0
  Extra extra = Extra::none;
  double rayleigh_mean = 1.0;            // E[F] for the exponential power factor
  std::vector<double> extra_samples;     // empirical F distribution for Extra::generic

  static ShadowingSpec lognormal(double sigma);
  static ShadowingSpec lognormal_db(double sigma_db);
  static ShadowingSpec suzuki(double sigma, double rayleigh_mean = 1.0);

  double mu() const { return -0.5 * sigma * sigma; }
  bool has_extra() const { return extra != Extra::none; }
  void validate() const;

  /// One draw of S (and F when configured): returns S*F.
  double draw(Rng& rng) const;
  /// Draw the Gaussian driver and the extra factor separately.
  double draw_extra(Rng& rng) const;

  /// E[(S F)^p], closed form for the log-normal part.
  double moment(double p) const;
  /// E[(S F)^p 1(S F > x)] (partial upper moment); x > 0.
  double partial_moment(double p, double x) const;
  /// P(S F > x).
  double tail_prob(double x) const;
};

/// (K r)^beta; K > 0, beta > 2, r > 0.
double path_loss(double r, double K, double beta);

/// E[S^{2/beta}] = exp(-sigma^2/beta + 2 sigma^2/beta^2) under mu = -sigma^2/2.
double moment_s_2beta(double sigma, double beta);

/// Rescaled path-loss constant K^(sigma) = K * exp(sigma^2 (2-beta)/(2 beta^2))
/// = K * sqrt(E[S^{2/beta}]).
double k_sigma(double K, double beta, double sigma);

/// i.i.d. draws of S (times F when configured).
std::vector<double> sample_shadowing(const ShadowingSpec& spec, std::size_t n, std::uint64_t seed);

/// R(r) = (beta/sigma) ln r - sigma/beta; requires sigma > 0.
double rescaled_distance(double r, double sigma, double beta);

/// Annular truncation: keep stations with a < |X| < b.
struct Truncation {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();

  /// Concrete sequences satisfying the truncation conditions
  /// log(max(a,1))/sigma^2 -> 0 and log(b)/sigma^2 -> inf:
  /// a = max(exp(sigma) - 1, 0), b = exp(sigma^3).
  static Truncation defaults(double sigma);
};

struct PropagationOptions {
  double K = 1.0;
  double beta = 4.0;
  std::optional<Truncation> truncation;
  const MarkKernel* marks = nullptr;
  /// Apply the K^(sigma) rescaling (the sigma -> infinity normalization).
  /// Disable to simulate the plain Poisson-network loss process with
  /// constant K.
  bool rescale_constant = true;
};

/// One realization of the marked propagation process of a user:
/// {(L_i, R_i^(sigma), T_i)} sorted by loss.
struct MarkedPropagationSample {
  std::vector<double> losses;              // ascending
  std::vector<double> raw_distances;       // same order
  std::vector<double> rescaled_distances;  // NaN entries when sigma == 0
  std::vector<std::size_t> types;          // zeros when no kernel given
  // meta
  double K = 0.0, beta = 0.0, sigma = 0.0;
  Truncation truncation;
  std::uint64_t seed = 0;
};

/// Propagation losses of `user` with respect to every retained station:
/// L_i = (k_sigma(K,beta,sigma) * d_i)^beta / S_i, with per-station draws in
/// pattern order (Z first, then the extra factor when configured).
MarkedPropagationSample propagation_process(const PointPattern& pattern, const Vec2& user,
                                            const ShadowingSpec& spec,
                                            const PropagationOptions& options, std::uint64_t seed);

/// Smallest loss only; allocation-free inner loop for the K-S protocols.
double min_loss(const PointPattern& pattern, const Vec2& user, const ShadowingSpec& spec,
                const PropagationOptions& options, Rng& rng);

/// nu_n(s, r) = Phi((s - beta ln(K r) - n/beta)/sqrt(n)): probability that the
/// log propagation loss from a station at distance r is <= s, with n = sigma^2
/// and the K^(sigma) rescaling applied.
double nu_n(double s, double r, double K, double beta, double n);

/// Sum of nu_n(s, |X_i|) over retained stations (plane radii from the origin):
/// the exact mean number of log-losses <= s.
double exact_mean_measure(const PointPattern& pattern, double s, double K, double beta, double n,
                          const std::optional<Truncation>& truncation = std::nullopt);

/// Closed form of lambda * Integral_{a<|x|<b} nu_n(s,|x|) dx. With a=0, b=inf
/// this equals lambda_log((-inf,s]) = (lambda pi / K^2) exp(2 s / beta) for
/// every n.
double mean_measure_integral(double s, double K, double beta, double n, double lambda,
                             double r_lo = 0.0,
                             double r_hi = std::numeric_limits<double>::infinity());

/// (lambda pi / K^2) exp(2 s / beta): the limiting mean measure of log-losses.
double lambda_log(double s, double K, double beta, double lambda);

/// Mean measure of the pattern extended periodically over the whole plane:
/// enumerated copies within r_enum plus the continuum tail beyond. The pattern
/// must carry a torus extent and a nominal density.
double extended_mean_measure(const PointPattern& pattern, double s, double K, double beta,
                             double n, double r_enum);

/// Sample CSV "loss,log_loss,distance,rescaled_distance,type" plus a JSON
/// sidecar with the meta fields.
void append_sample_csv(std::ostream& out, const MarkedPropagationSample& sample);

}  // namespace shadowsim
