// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shadowsim/errors.hpp"
#include "shadowsim/poisson_limit.hpp"

namespace shadowsim {

LinearizedPoints linearize(const EmpiricalCdf& F, std::span<const double> t_grid) {
  LinearizedPoints out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw parameter_error("linearize: thresholds must be positive");
    // P_hat(L* >= t) = #{samples >= t} / n = 1 - F_hat(t^-).
    const auto& v = F.sorted_values;
    const auto it = std::lower_bound(v.begin(), v.end(), t);
    const double p = static_cast<double>(v.end() - it) / static_cast<double>(v.size());
    if (p <= 0.0 || p >= 1.0) {
      ++out.dropped;
      continue;
    }
    out.log_t.push_back(std::log(t));
    out.log_neg_log_ccdf.push_back(std::log(-std::log(p)));
  }
  if (out.log_t.size() < 3) throw data_error("linearize: fewer than 3 usable grid points");
  return out;
}

std::vector<double> default_t_grid(const EmpiricalCdf& F) {
  const auto& v = F.sorted_values;
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) {
    const double q = 0.05 * i;
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    k = std::min(std::max<std::size_t>(k, 1), v.size());
    grid.push_back(v[k - 1]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

BetaFit fit_beta(std::span<const double> lstar_samples) {
  if (lstar_samples.size() < 30) throw data_error("fit_beta: need at least 30 samples");
  for (double s : lstar_samples) {
    if (!(s > 0.0) || !std::isfinite(s)) throw data_error("fit_beta: losses must be positive");
  }
  const auto F = ecdf(lstar_samples);
  const auto grid = default_t_grid(F);
  const auto pts = linearize(F, grid);

  const std::size_t m = pts.log_t.size();
  const auto& x = pts.log_t;
  const auto& y = pts.log_neg_log_ccdf;
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(m);
  ybar /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw data_error("fit_beta: degenerate threshold grid (no spread)");
  const double slope = sxy / sxx;
  if (!(slope > 0.0)) throw data_error("fit_beta: non-positive slope, data inconsistent with model");

  BetaFit fit;
  fit.slope = slope;
  fit.intercept = ybar - slope * xbar;
  fit.beta_hat = 2.0 / slope;
  fit.a_hat = std::exp(fit.intercept);
  fit.n = lstar_samples.size();
  fit.dropped_grid_points = pts.dropped;

  // Delta method: Var(slope) = g' Cov(x) g with g_i = d slope / d x_i and the
  // Brownian-bridge covariance of the log empirical quantiles under the
  // fitted law, Cov(ln T_q, ln T_q') = (q ^ q' - q q')/(n f(t) f(t') t t').
  const double nd = static_cast<double>(lstar_samples.size());
  std::vector<double> g(m), qlev(m), ft(m);
  auto fitted_cdf = [&](double t) { return 1.0 - std::exp(-fit.a_hat * std::pow(t, slope)); };
  for (std::size_t i = 0; i < m; ++i) {
    g[i] = ((y[i] - ybar) - 2.0 * slope * (x[i] - xbar)) / sxx;
    const double t = std::exp(x[i]);
    qlev[i] = fitted_cdf(t);
    // density of the fitted Weibull-type law times t (Jacobian of ln t)
    ft[i] = fit.a_hat * slope * std::pow(t, slope) * std::exp(-fit.a_hat * std::pow(t, slope));
  }
  double var_slope = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double qi = qlev[i], qj = qlev[j];
      const double cov = (std::min(qi, qj) - qi * qj) / (nd * ft[i] * ft[j]);
      var_slope += g[i] * g[j] * cov;
    }
  }
  const double se_slope = std::sqrt(std::max(var_slope, 0.0));
  const double se_beta = 2.0 * se_slope / (slope * slope);
  fit.ci_beta_lo = fit.beta_hat - 1.959963984540054 * se_beta;
  fit.ci_beta_hi = fit.beta_hat + 1.959963984540054 * se_beta;

  const auto model = LimitModel::from_constant(fit.a_hat, fit.beta_hat);
  fit.ks_D = ks_distance(F, [&](double t) { return 1.0 - lstar_ccdf(t, model); });
  return fit;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

IngestResult ingest_measurements(const std::filesystem::path& path, LossColumn column) {
  std::ifstream in(path);
  if (!in) throw data_error("ingest_measurements: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw data_error("ingest_measurements: empty file");
  const auto cols = split_csv_row(header);

  std::ptrdiff_t idx = -1;
  bool db_scale = false;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "loss" && (column == LossColumn::automatic || column == LossColumn::loss)) {
      idx = static_cast<std::ptrdiff_t>(i);
      db_scale = false;
      break;
    }
    if (cols[i] == "loss_db" &&
        (column == LossColumn::automatic || column == LossColumn::loss_db)) {
      idx = static_cast<std::ptrdiff_t>(i);
      db_scale = true;
      break;
    }
  }
  if (idx < 0) throw data_error("ingest_measurements: no loss/loss_db column");

  IngestResult result;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto fields = split_csv_row(line);
    if (static_cast<std::size_t>(idx) >= fields.size()) {
      ++result.invalid_rows;
      continue;
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(fields[static_cast<std::size_t>(idx)], &pos);
      if (pos != fields[static_cast<std::size_t>(idx)].size() || !std::isfinite(v)) {
        ++result.invalid_rows;
        continue;
      }
      const double loss = db_scale ? std::pow(10.0, v / 10.0) : v;
      if (!(loss > 0.0)) {
        ++result.invalid_rows;
        continue;
      }
      result.samples.push_back(loss);
    } catch (const std::exception&) {
      ++result.invalid_rows;
    }
  }
  if (rows == 0) throw data_error("ingest_measurements: no data rows");
  if (result.invalid_rows * 2 > rows) {
    throw data_error("ingest_measurements: more than half of the rows are invalid");
  }
  return result;
}

}  // namespace shadowsim
