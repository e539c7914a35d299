// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"
#include "shadowsim/rng.hpp"

namespace shadowsim {

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
  return static_cast<double>(it - sorted_values.begin()) / static_cast<double>(n());
}

EmpiricalCdf ecdf(std::span<const double> samples) {
  if (samples.empty()) throw parameter_error("ecdf: empty sample");
  EmpiricalCdf f;
  f.sorted_values.assign(samples.begin(), samples.end());
  std::sort(f.sorted_values.begin(), f.sorted_values.end());
  return f;
}

double ks_distance(const EmpiricalCdf& empirical, const std::function<double(double)>& cdf) {
  const auto& v = empirical.sorted_values;
  if (v.empty()) throw parameter_error("ks_distance: empty ECDF");
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    const double hi = static_cast<double>(i + 1) / n - f;  // right side of the jump
    const double lo = f - static_cast<double>(i) / n;      // left side
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_distance_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw parameter_error("ks_distance_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KsReport ks_test(double statistic, std::size_t n, double alpha) {
  if (n < 35) throw parameter_error("ks_test: asymptotic critical values need n >= 35");
  KsReport r;
  r.statistic = statistic;
  r.n = n;
  r.alpha = alpha;
  r.critical = kolmogorov_critical(alpha) / std::sqrt(static_cast<double>(n));
  r.reject = statistic > r.critical;
  return r;
}

KsReport ks_test_two_sample(double statistic, std::size_t n1, std::size_t n2, double alpha) {
  if (n1 < 35 || n2 < 35) throw parameter_error("ks_test_two_sample: need n >= 35");
  KsReport r;
  r.statistic = statistic;
  r.n = std::min(n1, n2);
  r.alpha = alpha;
  const double n1d = static_cast<double>(n1);
  const double n2d = static_cast<double>(n2);
  r.critical = kolmogorov_critical(alpha) * std::sqrt((n1d + n2d) / (n1d * n2d));
  r.reject = statistic > r.critical;
  return r;
}

// ---------------------------------------------------------------------------

double min_loss_window_radius(double lambda, double K, double beta, const ShadowingSpec& spec,
                              std::size_t n_samples, double tol) {
  if (!(lambda > 0.0)) throw parameter_error("min_loss_window_radius: lambda must be positive");
  spec.validate();
  const double p = 2.0 / beta;
  const double a = lambda * std::numbers::pi * spec.moment(p) / (K * K);

  // Threshold grid: limit-law quantiles up to beyond the largest value a
  // sample of n_samples will realistically see.
  const double cc_lo = 1.0 / (50.0 * static_cast<double>(n_samples));
  std::vector<double> ts;
  for (double cc = 0.9999; cc >= cc_lo; cc *= 0.7) {
    ts.push_back(std::pow(-std::log(cc) / a, beta / 2.0));
  }

  // CCDF error of the disc-restricted network: exp(-Lambda(t)) * (exp(M_out) - 1),
  // M_out(t,R) = lambda*pi*E[((t S)^{2/beta}/K^2 - R^2)^+].
  auto sup_error = [&](double R) {
    double worst = 0.0;
    for (double t : ts) {
      const double x = std::pow(K * R, beta) / t;  // S > x contributes beyond R
      const double m_out = lambda * std::numbers::pi *
                           (std::pow(t, p) / (K * K) * spec.partial_moment(p, x) -
                            R * R * spec.tail_prob(x));
      const double err = std::exp(-a * std::pow(t, p)) * std::expm1(std::max(m_out, 0.0));
      worst = std::max(worst, err);
    }
    return worst;
  };

  double r = std::pow(ts.back(), 1.0 / beta) / K + 1.0;
  while (sup_error(r) > tol) {
    r *= 1.5;
    if (r > 1e9) throw accuracy_error("min_loss_window_radius: no radius meets the tolerance");
  }
  return r;
}

std::vector<double> sample_lstar_poisson(double lambda, double K, double beta,
                                         const ShadowingSpec& spec, double window_radius,
                                         std::size_t count, Rng& rng, bool rescale) {
  const Metric window = Metric::plane_window(2.0 * window_radius, 2.0 * window_radius);
  PropagationOptions opts;
  opts.K = K;
  opts.beta = beta;
  opts.rescale_constant = rescale;
  const Vec2 origin{0.0, 0.0};

  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto pattern = gen_poisson(lambda, window, rng());
    if (pattern.points.empty()) {
      // No station in the window: the minimum exceeds every threshold the
      // tolerance was built for; record +inf (censored in the ECDF tail).
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    out.push_back(min_loss(pattern, origin, spec, opts, rng));
  }
  return out;
}

std::vector<double> sample_lstar_pattern(const PointPattern& pattern, double K, double beta,
                                         const ShadowingSpec& spec, std::size_t count, Rng& rng,
                                         bool rescale) {
  if (pattern.metric.kind != MetricKind::torus) {
    throw parameter_error("sample_lstar_pattern: torus pattern required");
  }
  PropagationOptions opts;
  opts.K = K;
  opts.beta = beta;
  opts.rescale_constant = rescale;

  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec2 user{(uniform01(rng) - 0.5) * pattern.metric.width,
                    (uniform01(rng) - 0.5) * pattern.metric.height};
    out.push_back(min_loss(pattern, user, spec, opts, rng));
  }
  return out;
}

namespace {

int sigma_grid_pass_count(const PointPattern& pattern, double K, double beta, double sigma_db,
                          const SigmaSearchProtocol& proto, std::uint64_t master_seed,
                          std::uint64_t grid_index) {
  const auto spec = ShadowingSpec::lognormal_db(sigma_db);
  const auto model = LimitModel::rescaled_limit(*pattern.nominal_density, K, beta);
  int passes = 0;
  for (int j = 0; j < proto.realizations; ++j) {
    Rng rng = make_rng(master_seed, {grid_index, static_cast<std::uint64_t>(j)});
    auto lstars = sample_lstar_pattern(pattern, K, beta, spec, proto.observations, rng);
    const auto F = ecdf(lstars);
    const double d = ks_distance(F, [&](double t) { return 1.0 - lstar_ccdf(t, model); });
    if (!ks_test(d, lstars.size(), proto.alpha).reject) ++passes;
  }
  return passes;
}

}  // namespace

SigmaSearchResult critical_sigma_search(int hex_n, double spacing, double K, double beta,
                                        const SigmaSearchProtocol& protocol,
                                        std::uint64_t master_seed) {
  if (protocol.pass_quota > protocol.realizations) {
    throw parameter_error("critical_sigma_search: quota exceeds realization count");
  }
  if (!(protocol.grid_step_db > 0.0) || protocol.grid_max_db < protocol.grid_min_db) {
    throw parameter_error("critical_sigma_search: bad sigma_dB grid");
  }
  const auto pattern = gen_hexagonal(hex_n, spacing);

  std::vector<double> grid;
  for (double v = protocol.grid_min_db; v <= protocol.grid_max_db + 1e-12;
       v += protocol.grid_step_db) {
    grid.push_back(v);
  }

  SigmaSearchResult result;
  std::vector<int> cache(grid.size(), -1);
  auto passes = [&](std::size_t idx) {
    if (cache[idx] < 0) {
      cache[idx] = sigma_grid_pass_count(pattern, K, beta, grid[idx], protocol, master_seed,
                                         static_cast<std::uint64_t>(idx));
      result.evaluated.emplace_back(grid[idx], cache[idx]);
    }
    return cache[idx];
  };
  auto ok = [&](std::size_t idx) { return passes(idx) >= protocol.pass_quota; };

  if (protocol.full_scan) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (ok(i)) {
        result.sigma_db_star = grid[i];
        break;
      }
    }
    return result;
  }

  // Bisection under the assumption that the pass indicator is monotone in
  // sigma_dB; Monte Carlo noise near the boundary resolves in favour of the
  // bisection fixpoint (deterministic for a given master seed).
  if (!ok(grid.size() - 1)) return result;  // sentinel: above grid max
  std::size_t lo = 0, hi = grid.size() - 1;
  if (ok(lo)) {
    result.sigma_db_star = grid[lo];
    return result;
  }
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.sigma_db_star = grid[hi];
  return result;
}

SirExperimentResult sir_experiment(const SirExperimentConfig& config,
                                   std::span<const double> thresholds,
                                   std::uint64_t master_seed) {
  if (config.network_draws < 100) {
    throw parameter_error("sir_experiment: need at least 100 network replications");
  }
  const auto pattern = gen_hexagonal(config.hex_n, config.spacing);
  const double lambda = *pattern.nominal_density;
  const auto model = LimitModel::rescaled_limit(lambda, config.K, config.beta);
  const auto spec = ShadowingSpec::lognormal_db(config.sigma_db);

  SirExperimentResult result;
  result.thresholds.assign(thresholds.begin(), thresholds.end());

  // l_max so the mean-compensated tail is small against the interference.
  double l_max = config.l_max;
  if (l_max <= 0.0) {
    // Pilot: median interference, then l_max so the compensated tail mean is
    // a tail_rel_tol fraction of it.
    const double l0 = std::pow(200.0 / model.a, config.beta / 2.0);
    std::vector<double> interf;
    Rng pilot = make_rng(master_seed, {0xABCDULL});
    for (int i = 0; i < 64; ++i) {
      const auto losses = sample_limit_process(model, l0, pilot);
      double s = 0.0, best = std::numeric_limits<double>::infinity();
      for (double l : losses) {
        s += 1.0 / l;
        best = std::min(best, l);
      }
      if (!losses.empty()) interf.push_back(s - 1.0 / best);
    }
    std::sort(interf.begin(), interf.end());
    const double med = interf.empty() ? 1.0 : interf[interf.size() / 2];
    const double target = config.tail_rel_tol * med;
    // solve (2a/(beta-2)) l^{2/beta-1} = target
    l_max = std::pow(2.0 * model.a / ((config.beta - 2.0) * target),
                     config.beta / (config.beta - 2.0));
    if (interference_tail_mean(model, l_max) > target * 1.01) {
      throw accuracy_error("sir_experiment: tail compensation above tolerance");
    }
  }
  result.l_max = l_max;

  PropagationOptions opts;
  opts.K = config.K;
  opts.beta = config.beta;
  opts.rescale_constant = true;

  std::vector<double> pooled_net, pooled_lim;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    Rng rng_net = make_rng(master_seed, {1, static_cast<std::uint64_t>(rep)});
    std::vector<double> net;
    net.reserve(config.network_draws);
    for (int i = 0; i < config.network_draws; ++i) {
      const Vec2 user{(uniform01(rng_net) - 0.5) * pattern.metric.width,
                      (uniform01(rng_net) - 0.5) * pattern.metric.height};
      const auto s =
          propagation_process(pattern, user, spec, opts, derive_seed(master_seed, {2, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(i)}));
      net.push_back(sir_from_losses(s.losses, 0.0));
    }
    Rng rng_lim = make_rng(master_seed, {3, static_cast<std::uint64_t>(rep)});
    auto lim = sample_sir(model, static_cast<std::size_t>(config.limit_draws), l_max, rng_lim);

    std::sort(net.begin(), net.end());
    std::sort(lim.begin(), lim.end());
    const double d = ks_distance_two_sample(net, lim);
    auto report = ks_test_two_sample(d, net.size(), lim.size(), config.alpha);
    if (!report.reject) ++result.not_rejected;
    result.repetitions.push_back(report);
    pooled_net.insert(pooled_net.end(), net.begin(), net.end());
    pooled_lim.insert(pooled_lim.end(), lim.begin(), lim.end());
  }

  auto ccdf_on = [&](const std::vector<double>& sample) {
    std::vector<double> out(thresholds.size(), 0.0);
    for (double s : sample) {
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (s > thresholds[i]) out[i] += 1.0;
      }
    }
    for (auto& v : out) v /= static_cast<double>(sample.size());
    return out;
  };
  result.network_ccdf = ccdf_on(pooled_net);
  result.limit_ccdf = ccdf_on(pooled_lim);
  return result;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw parameter_error("pearson_correlation: bad input");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& task) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      task(i);
    }
  };
  std::vector<std::thread> pool;
  const unsigned k = std::min<unsigned>(workers, std::thread::hardware_concurrency());
  for (unsigned w = 0; w + 1 < std::max(1u, k); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace shadowsim
