// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/poisson_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"

namespace shadowsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

LimitModel LimitModel::from_network(double lambda, double K, double beta,
                                    const ShadowingSpec& spec) {
  LimitModel m;
  m.lambda = lambda;
  m.K = K;
  m.beta = beta;
  m.sigma = spec.sigma;
  m.a = lambda * kPi * spec.moment(2.0 / beta) / (K * K);
  m.validate();
  return m;
}

LimitModel LimitModel::rescaled_limit(double lambda, double K, double beta) {
  LimitModel m;
  m.lambda = lambda;
  m.K = K;
  m.beta = beta;
  m.a = lambda * kPi / (K * K);
  m.validate();
  return m;
}

LimitModel LimitModel::from_constant(double a, double beta) {
  LimitModel m;
  m.a = a;
  m.beta = beta;
  m.lambda = a / kPi;  // K = 1 convention
  m.validate();
  return m;
}

void LimitModel::validate() const {
  if (!(a > 0.0)) throw parameter_error("LimitModel: a must be positive");
  if (!(beta > 2.0)) throw parameter_error("LimitModel: beta must exceed 2");
  if (sigma && *sigma < 0.0) throw parameter_error("LimitModel: sigma must be >= 0");
}

double intensity(double y, const LimitModel& model) {
  if (y < 0.0) throw parameter_error("intensity: y must be >= 0");
  return model.a * std::pow(y, 2.0 / model.beta);
}

double lstar_ccdf(double t, const LimitModel& model) {
  if (t < 0.0) throw parameter_error("lstar_ccdf: t must be >= 0");
  return std::exp(-model.a * std::pow(t, 2.0 / model.beta));
}

double sample_lstar(const LimitModel& model, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  return std::pow(exp1(rng) / model.a, model.beta / 2.0);
}

std::vector<double> sample_limit_process(const LimitModel& model, double l_max, Rng& rng) {
  if (!(l_max > 0.0)) throw parameter_error("sample_limit_process: l_max must be positive");
  std::exponential_distribution<double> exp1(1.0);
  const double gamma_max = intensity(l_max, model);
  std::vector<double> losses;
  double gamma = exp1(rng);
  while (gamma <= gamma_max) {
    losses.push_back(std::pow(gamma / model.a, model.beta / 2.0));
    gamma += exp1(rng);
  }
  return losses;
}

MarkedLimitSample sample_limit_marked(const LimitModel& model, const MarkKernel* kernel,
                                      double l_max, Rng& rng) {
  MarkedLimitSample out;
  out.losses = sample_limit_process(model, l_max, rng);
  out.rescaled_distances.reserve(out.losses.size());
  out.types.reserve(out.losses.size());
  for (std::size_t i = 0; i < out.losses.size(); ++i) {
    const double z = normal(rng);
    out.rescaled_distances.push_back(z);
    out.types.push_back(kernel != nullptr ? kernel->sample(z, rng) : 0);
  }
  return out;
}

double conditional_distance_cdf(double rho, double u, const LimitModel& model) {
  if (!(rho > 0.0)) throw parameter_error("conditional_distance_cdf: rho must be positive");
  if (!(u > 0.0)) throw parameter_error("conditional_distance_cdf: u must be positive");
  if (!model.sigma) throw parameter_error("conditional_distance_cdf: model needs sigma");
  const double sigma = *model.sigma;
  const double beta = model.beta;
  const double threshold = beta * std::log(model.K * rho) - std::log(u);
  if (sigma == 0.0) return threshold >= 0.0 ? 1.0 : 0.0;
  // ln S <= threshold - 2 sigma^2/beta, with ln S ~ N(-sigma^2/2, sigma^2).
  const double mu = -0.5 * sigma * sigma;
  return norm_cdf((threshold - 2.0 * sigma * sigma / beta - mu) / sigma);
}

double sample_conditional_distance(double u, const LimitModel& model, Rng& rng) {
  if (!(u > 0.0)) throw parameter_error("sample_conditional_distance: u must be positive");
  if (!model.sigma) throw parameter_error("sample_conditional_distance: model needs sigma");
  const double sigma = *model.sigma;
  const double beta = model.beta;
  const double s = std::exp(-0.5 * sigma * sigma + sigma * normal(rng));
  return std::pow(u, 1.0 / beta) / model.K * std::exp(2.0 * sigma * sigma / (beta * beta)) *
         std::pow(s, 1.0 / beta);
}

namespace {

void check_law_sums_to_one(const MarkKernel& kernel, double shift) {
  const auto total = kernel_gauss_integral(kernel, shift, std::numeric_limits<double>::infinity());
  double sum = 0.0;
  for (double v : total) sum += v;
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw accuracy_error("mark-law integration did not sum to 1 (kernel grid too coarse)");
  }
}

}  // namespace

std::vector<double> tilted_type_law(const MarkKernel& kernel, double sigma, double beta) {
  if (sigma < 0.0) throw parameter_error("tilted_type_law: sigma must be >= 0");
  if (!(beta > 0.0)) throw parameter_error("tilted_type_law: beta must be positive");
  const double shift = 2.0 * sigma / beta;
  check_law_sums_to_one(kernel, shift);
  return kernel_gauss_integral(kernel, shift, std::numeric_limits<double>::infinity());
}

std::vector<double> limit_mark_law(const MarkKernel& kernel, double rho) {
  check_law_sums_to_one(kernel, 0.0);
  return kernel_gauss_integral(kernel, 0.0, rho);
}

double limit_mark_law(const MarkKernel& kernel, double rho, std::size_t type) {
  return limit_mark_law(kernel, rho).at(type);
}

double suzuki_scale(const ShadowingSpec& spec, double beta) {
  if (!(beta > 2.0)) throw parameter_error("suzuki_scale: beta must exceed 2");
  const double p = 2.0 / beta;
  switch (spec.extra) {
    case ShadowingSpec::Extra::none:
      return 1.0;
    case ShadowingSpec::Extra::rayleigh_power:
      return std::pow(spec.rayleigh_mean, p) * std::tgamma(1.0 + p);
    case ShadowingSpec::Extra::generic: {
      double acc = 0.0;
      for (double f : spec.extra_samples) acc += std::pow(f, p);
      const double m = acc / static_cast<double>(spec.extra_samples.size());
      if (!std::isfinite(m)) throw data_error("suzuki_scale: moment estimate is not finite");
      return m;
    }
  }
  return 1.0;
}

double interference_tail_mean(const LimitModel& model, double l_max) {
  if (!(model.beta > 2.0)) throw parameter_error("interference diverges for beta <= 2");
  return 2.0 * model.a / (model.beta - 2.0) * std::pow(l_max, 2.0 / model.beta - 1.0);
}

double sir_from_losses(std::span<const double> losses, double tail_mean) {
  if (losses.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  double power_sum = 0.0;
  for (double l : losses) {
    best = std::min(best, l);
    power_sum += 1.0 / l;
  }
  const double interference = power_sum - 1.0 / best + tail_mean;
  if (interference <= 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 / best) / interference;
}

std::vector<double> sample_sir(const LimitModel& model, std::size_t draws, double l_max, Rng& rng) {
  const double tail = interference_tail_mean(model, l_max);
  std::vector<double> out;
  out.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto losses = sample_limit_process(model, l_max, rng);
    out.push_back(sir_from_losses(losses, tail));
  }
  return out;
}

std::vector<double> sir_ccdf_mc(const LimitModel& model, std::span<const double> thresholds,
                                std::size_t replications, double l_max, std::uint64_t seed) {
  for (double t : thresholds) {
    if (!(t > 0.0)) throw parameter_error("sir_ccdf_mc: thresholds must be positive");
  }
  Rng rng = make_rng(seed);
  const auto sirs = sample_sir(model, replications, l_max, rng);
  std::vector<double> ccdf(thresholds.size(), 0.0);
  for (double s : sirs) {
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (s > thresholds[i]) ccdf[i] += 1.0;
    }
  }
  for (auto& v : ccdf) v /= static_cast<double>(replications);
  return ccdf;
}

}  // namespace shadowsim
