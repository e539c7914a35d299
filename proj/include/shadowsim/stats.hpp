// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "shadowsim/geometry.hpp"
#include "shadowsim/poisson_limit.hpp"
#include "shadowsim/propagation.hpp"

namespace shadowsim {

/// Right-continuous step CDF of a sample.
struct EmpiricalCdf {
  std::vector<double> sorted_values;
  std::size_t n() const { return sorted_values.size(); }
  /// F_hat(x) = #{values <= x} / n.
  double operator()(double x) const;
};

EmpiricalCdf ecdf(std::span<const double> samples);

/// sup over jump points of |F_hat - F|, both sides of each jump.
double ks_distance(const EmpiricalCdf& empirical, const std::function<double(double)>& cdf);

/// Two-sample sup distance between sorted samples.
double ks_distance_two_sample(std::span<const double> a_sorted, std::span<const double> b_sorted);

struct KsReport {
  double statistic = 0.0;
  std::size_t n = 0;
  double alpha = 0.0;
  double critical = 0.0;
  bool reject = false;
};

/// Asymptotic one-sample test: critical = c(alpha)/sqrt(n), n >= 35.
KsReport ks_test(double statistic, std::size_t n, double alpha);

/// Two-sample version: critical = c(alpha) * sqrt((n1+n2)/(n1*n2)).
KsReport ks_test_two_sample(double statistic, std::size_t n1, std::size_t n2, double alpha);

// ---------------------------------------------------------------------------
// Experiment protocols
// ---------------------------------------------------------------------------

/// Window half-extent for simulating min-loss samples of a Poisson network:
/// smallest radius R such that the CCDF error of restricting the network to
/// a disc of radius R stays below tol uniformly in the threshold.
double min_loss_window_radius(double lambda, double K, double beta, const ShadowingSpec& spec,
                              std::size_t n_samples, double tol = 1e-3);

/// i.i.d. min-loss draws, one fresh Poisson network per draw on the square
/// window [-R,R]^2 with the user at the origin. `rescale` selects the
/// K^(sigma) normalization (off = plain Poisson-network losses).
std::vector<double> sample_lstar_poisson(double lambda, double K, double beta,
                                         const ShadowingSpec& spec, double window_radius,
                                         std::size_t count, Rng& rng, bool rescale = false);

/// i.i.d. min-loss draws on a fixed torus pattern: per observation the user
/// is re-dropped uniformly and the shadowing is fresh.
std::vector<double> sample_lstar_pattern(const PointPattern& pattern, double K, double beta,
                                         const ShadowingSpec& spec, std::size_t count, Rng& rng,
                                         bool rescale = true);

struct SigmaSearchProtocol {
  int observations = 300;
  int realizations = 10;
  int pass_quota = 9;
  double alpha = 0.01;
  double grid_min_db = 0.0;
  double grid_max_db = 30.0;
  double grid_step_db = 0.5;
  /// Evaluate every grid point instead of bisecting (small grids, invariants).
  bool full_scan = false;
};

struct SigmaSearchResult {
  /// Smallest grid sigma_dB meeting the quota; empty when the grid maximum
  /// fails ("above grid max" sentinel).
  std::optional<double> sigma_db_star;
  /// (sigma_dB, pass count) for every evaluated grid point.
  std::vector<std::pair<double, int>> evaluated;
};

/// Fig.1-style search: per realization, `observations` min-loss draws on the
/// hexagonal torus are K-S tested against the Poisson closed form; a grid
/// point passes when at least pass_quota of the realizations are not
/// rejected. The search bisects on the grid assuming a monotone pass
/// boundary; with full_scan the smallest passing point is exact.
SigmaSearchResult critical_sigma_search(int hex_n, double spacing, double K, double beta,
                                        const SigmaSearchProtocol& protocol,
                                        std::uint64_t master_seed);

struct SirExperimentConfig {
  int hex_n = 30;
  double spacing = 1.0;
  double K = 1.0;
  double beta = 4.0;
  double sigma_db = 20.0;
  int network_draws = 300;   // SIR samples from the hexagonal torus
  int limit_draws = 1000;    // SIR samples from the limit model
  double alpha = 0.10;
  int repetitions = 10;
  double l_max = 0.0;        // 0 = choose so the tail compensation is < rel_tol
  double tail_rel_tol = 1e-3;
};

struct SirExperimentResult {
  std::vector<KsReport> repetitions;  // two-sample K-S per repetition
  std::vector<double> thresholds;
  std::vector<double> network_ccdf;  // pooled over repetitions
  std::vector<double> limit_ccdf;
  double l_max = 0.0;
  int not_rejected = 0;
};

SirExperimentResult sir_experiment(const SirExperimentConfig& config,
                                   std::span<const double> thresholds,
                                   std::uint64_t master_seed);

/// Pearson correlation of two equal-length samples.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Run tasks 0..count-1 on `workers` threads; results are a deterministic
/// function of the task index regardless of worker count.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace shadowsim
