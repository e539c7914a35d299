// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"

namespace shadowsim {

std::vector<ConvergenceRow> convergence_report(const ConvergenceConfig& config,
                                               std::uint64_t master_seed) {
  if (config.sigma_db_grid.empty()) throw parameter_error("convergence_report: empty sigma grid");
  for (std::size_t i = 1; i < config.sigma_db_grid.size(); ++i) {
    if (config.sigma_db_grid[i] <= config.sigma_db_grid[i - 1]) {
      throw parameter_error("convergence_report: sigma grid must be ascending");
    }
  }
  MarkKernel default_kernel = MarkKernel::indicator_two_type();
  const MarkKernel* kernel = config.kernel != nullptr ? config.kernel : &default_kernel;

  const double lambda = hex_lattice_density(config.spacing);
  const auto model = LimitModel::rescaled_limit(lambda, config.K, config.beta);
  const double s_obs =
      config.beta / 2.0 * std::log(config.window_expected / model.a);  // a e^{2s/beta} = target
  const auto limit_types = limit_mark_law(*kernel, std::numeric_limits<double>::infinity());

  // Discreteness oracle for (ii): mean measure of the periodically extended
  // lattice vs the limit, on a block large enough that only the continuum
  // tail lies outside.
  const auto block = gen_hexagonal(32, config.spacing);
  const double r_enum = 100.0 * config.spacing;

  std::vector<ConvergenceRow> rows;
  for (std::size_t gi = 0; gi < config.sigma_db_grid.size(); ++gi) {
    ConvergenceRow row;
    row.sigma_db = config.sigma_db_grid[gi];
    const double sigma = sigma_from_db(row.sigma_db);
    const double n = sigma * sigma;

    LatticeWindowConfig wcfg;
    wcfg.spacing = config.spacing;
    wcfg.K = config.K;
    wcfg.beta = config.beta;
    wcfg.sigma = sigma;
    wcfg.max_log_loss = s_obs;
    wcfg.marks = kernel;
    const LatticeWindowSampler sampler(wcfg);

    std::vector<double> minima;
    std::vector<double> pooled_logl, pooled_rescaled;
    std::vector<std::size_t> pooled_types;
    Rng rng = make_rng(master_seed, {gi});
    for (int rep = 0; rep < config.replications; ++rep) {
      const auto sample = sampler.sample(rng);
      minima.push_back(sample.losses.empty() ? std::numeric_limits<double>::infinity()
                                             : sample.losses.front());
      if (pooled_logl.size() < static_cast<std::size_t>(config.marked_pool_target)) {
        for (std::size_t i = 0; i < sample.losses.size(); ++i) {
          pooled_logl.push_back(std::log(sample.losses[i]));
          pooled_rescaled.push_back(sample.rescaled_distances[i]);
          pooled_types.push_back(sample.types[i]);
        }
      }
    }

    // (i)
    const auto Fmin = ecdf(minima);
    row.ks_min_loss = ks_distance(Fmin, [&](double t) { return 1.0 - lstar_ccdf(t, model); });
    row.min_loss_reject = ks_test(row.ks_min_loss, minima.size(), 0.01).reject;

    // (ii)
    double sup = 0.0;
    for (int k = 0; k <= 32; ++k) {
      const double s = s_obs - 10.0 + 10.0 * k / 32.0;
      const double mm = extended_mean_measure(block, s, config.K, config.beta, n, r_enum);
      sup = std::max(sup, std::fabs(mm - lambda_log(s, config.K, config.beta, lambda)));
    }
    row.mean_measure_sup = sup / lambda_log(s_obs, config.K, config.beta, lambda);

    // (iii)-(v)
    row.marked_n = pooled_rescaled.size();
    if (row.marked_n >= 35) {
      const auto Fr = ecdf(pooled_rescaled);
      row.ks_rescaled_gauss = ks_distance(Fr, [](double z) { return norm_cdf(z); });
      row.gauss_reject = ks_test(row.ks_rescaled_gauss, row.marked_n, 0.01).reject;
      row.abs_corr = std::fabs(pearson_correlation(pooled_logl, pooled_rescaled));
      double dev = 0.0;
      for (std::size_t t = 0; t < limit_types.size(); ++t) {
        double freq = 0.0;
        for (auto ty : pooled_types) freq += (ty == t) ? 1.0 : 0.0;
        freq /= static_cast<double>(pooled_types.size());
        dev = std::max(dev, std::fabs(freq - limit_types[t]));
      }
      row.mark_freq_dev = dev;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shadowsim
