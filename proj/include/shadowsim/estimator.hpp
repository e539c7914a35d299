// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "shadowsim/stats.hpp"

namespace shadowsim {

/// Transformed regression points (ln t, ln(-ln P_hat(L* >= t))); grid points
/// with P_hat in {0, 1} are dropped and counted.
struct LinearizedPoints {
  std::vector<double> log_t;
  std::vector<double> log_neg_log_ccdf;
  std::size_t dropped = 0;
};

LinearizedPoints linearize(const EmpiricalCdf& F, std::span<const double> t_grid);

/// Quantile levels 0.05 .. 0.95 step 0.05 of the sample (default grid policy).
std::vector<double> default_t_grid(const EmpiricalCdf& F);

struct BetaFit {
  double beta_hat = 0.0;
  double a_hat = 0.0;
  double slope = 0.0;      // = 2 / beta_hat
  double intercept = 0.0;  // = ln a_hat
  double ci_beta_lo = 0.0;
  double ci_beta_hi = 0.0;
  double ks_D = 0.0;       // fitted CCDF exp(-a_hat t^{2/beta_hat}) vs data
  std::size_t n = 0;
  std::size_t dropped_grid_points = 0;
};

/// Ordinary least squares on the linearized points with the default quantile
/// grid; beta_hat = 2/slope, a_hat = exp(intercept). The 95% CI comes from
/// the delta method on the slope, propagating the asymptotic covariance of
/// the empirical quantiles under the fitted law.
BetaFit fit_beta(std::span<const double> lstar_samples);

enum class LossColumn { automatic, loss, loss_db };

/// Read L* samples from a CSV with a `loss` (natural scale) or `loss_db`
/// column; dB values convert via L = 10^{L_dB/10}. Invalid rows are counted;
/// more than 50% invalid is an ingestion error.
struct IngestResult {
  std::vector<double> samples;
  std::size_t invalid_rows = 0;
};
IngestResult ingest_measurements(const std::filesystem::path& path,
                                 LossColumn column = LossColumn::automatic);

}  // namespace shadowsim
