// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"

namespace shadowsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLn10 = std::numbers::ln10;
constexpr double kOriginTol = 1e-9;

// Gauss-Laguerre nodes/weights (32 points) for expectations against the
// exponential density, used by the Suzuki partial moments.
struct Laguerre32 {
  std::vector<double> x, w;
  Laguerre32() {
    // Newton iteration on L_n with standard initial guesses.
    const int n = 32;
    x.resize(n);
    w.resize(n);
    double xi = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == 0) {
        xi = 3.0 / (1.0 + 2.4 * n);
      } else if (i == 1) {
        xi += 15.0 / (1.0 + 2.5 * n);
      } else {
        xi += ((1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))) * (xi - x[i - 2]);
      }
      double p1 = 0.0, p2 = 0.0;
      for (int it = 0; it < 100; ++it) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0 - xi) * p2 - (j - 1.0) * p3) / j;
        }
        const double pp = n * (p1 - p2) / xi;
        const double dx = p1 / pp;
        xi -= dx;
        if (std::fabs(dx) < 1e-14 * std::max(1.0, xi)) break;
      }
      p2 = 0.0;
      {
        double q1 = 1.0, q2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double q3 = q2;
          q2 = q1;
          q1 = ((2.0 * j - 1.0 - xi) * q2 - (j - 1.0) * q3) / j;
        }
        p1 = q1;
        p2 = q2;
      }
      x[i] = xi;
      const double pp = n * (p1 - p2) / xi;
      w[i] = -1.0 / (pp * n * p2);
    }
  }
};

const Laguerre32& laguerre32() {
  static const Laguerre32 table;
  return table;
}

// E[S^p 1(S > x)] for log-normal S = exp(mu + sigma Z):
// exp(p mu + p^2 sigma^2 / 2) * Phi(p sigma - (ln x - mu)/sigma).
double lognormal_partial_moment(double mu, double sigma, double p, double x) {
  const double full = std::exp(p * mu + 0.5 * p * p * sigma * sigma);
  if (x <= 0.0) return full;
  if (sigma == 0.0) return (std::exp(mu) > x) ? full : 0.0;
  return full * norm_cdf(p * sigma - (std::log(x) - mu) / sigma);
}

double lognormal_tail(double mu, double sigma, double x) {
  if (x <= 0.0) return 1.0;
  if (sigma == 0.0) return (std::exp(mu) > x) ? 1.0 : 0.0;
  return norm_sf((std::log(x) - mu) / sigma);
}

void check_loss_params(double K, double beta) {
  if (!(K > 0.0)) throw parameter_error("path-loss constant K must be positive");
  if (!(beta > 2.0)) throw parameter_error("path-loss exponent beta must exceed 2");
}

}  // namespace

double sigma_from_db(double sigma_db) { return sigma_db * kLn10 / 10.0; }
double db_from_sigma(double sigma) { return sigma * 10.0 / kLn10; }

ShadowingSpec ShadowingSpec::lognormal(double sigma) {
  ShadowingSpec s;
  s.sigma = sigma;
  s.validate();
  return s;
}

ShadowingSpec ShadowingSpec::lognormal_db(double sigma_db) {
  return lognormal(sigma_from_db(sigma_db));
}

ShadowingSpec ShadowingSpec::suzuki(double sigma, double rayleigh_mean) {
  ShadowingSpec s;
  s.sigma = sigma;
  s.extra = Extra::rayleigh_power;
  s.rayleigh_mean = rayleigh_mean;
  s.validate();
  return s;
}

void ShadowingSpec::validate() const {
  if (sigma < 0.0) throw parameter_error("shadowing sigma must be >= 0");
  if (extra == Extra::rayleigh_power && !(rayleigh_mean > 0.0)) {
    throw parameter_error("rayleigh_power mean must be positive");
  }
  if (extra == Extra::generic) {
    if (extra_samples.empty()) throw parameter_error("generic extra factor needs samples");
    for (double f : extra_samples) {
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw parameter_error("generic extra-factor samples must be positive and finite");
      }
    }
  }
}

double ShadowingSpec::draw_extra(Rng& rng) const {
  switch (extra) {
    case Extra::none:
      return 1.0;
    case Extra::rayleigh_power: {
      std::exponential_distribution<double> d(1.0 / rayleigh_mean);
      return d(rng);
    }
    case Extra::generic: {
      std::uniform_int_distribution<std::size_t> d(0, extra_samples.size() - 1);
      return extra_samples[d(rng)];
    }
  }
  return 1.0;
}

double ShadowingSpec::draw(Rng& rng) const {
  const double z = normal(rng);
  const double s = std::exp(mu() + sigma * z);
  return has_extra() ? s * draw_extra(rng) : s;
}

double ShadowingSpec::moment(double p) const {
  double m = std::exp(p * mu() + 0.5 * p * p * sigma * sigma);
  switch (extra) {
    case Extra::none:
      break;
    case Extra::rayleigh_power:
      m *= std::pow(rayleigh_mean, p) * std::tgamma(1.0 + p);
      break;
    case Extra::generic: {
      double acc = 0.0;
      for (double f : extra_samples) acc += std::pow(f, p);
      m *= acc / static_cast<double>(extra_samples.size());
      break;
    }
  }
  if (!std::isfinite(m)) throw data_error("shadowing moment is not finite");
  return m;
}

double ShadowingSpec::partial_moment(double p, double x) const {
  switch (extra) {
    case Extra::none:
      return lognormal_partial_moment(mu(), sigma, p, x);
    case Extra::rayleigh_power: {
      // E_F[F^p * E_S[S^p 1(S > x/F)]] with F ~ Exp(1/mean).
      const auto& gl = laguerre32();
      double acc = 0.0;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double f = rayleigh_mean * gl.x[i];
        acc += gl.w[i] * std::pow(f, p) * lognormal_partial_moment(mu(), sigma, p, x / f);
      }
      return acc;
    }
    case Extra::generic: {
      double acc = 0.0;
      for (double f : extra_samples) {
        acc += std::pow(f, p) * lognormal_partial_moment(mu(), sigma, p, x / f);
      }
      return acc / static_cast<double>(extra_samples.size());
    }
  }
  return 0.0;
}

double ShadowingSpec::tail_prob(double x) const {
  switch (extra) {
    case Extra::none:
      return lognormal_tail(mu(), sigma, x);
    case Extra::rayleigh_power: {
      const auto& gl = laguerre32();
      double acc = 0.0;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double f = rayleigh_mean * gl.x[i];
        acc += gl.w[i] * lognormal_tail(mu(), sigma, x / f);
      }
      return acc;
    }
    case Extra::generic: {
      double acc = 0.0;
      for (double f : extra_samples) acc += lognormal_tail(mu(), sigma, x / f);
      return acc / static_cast<double>(extra_samples.size());
    }
  }
  return 0.0;
}

double path_loss(double r, double K, double beta) {
  check_loss_params(K, beta);
  if (!(r > 0.0)) throw parameter_error("path_loss: singular at r = 0");
  return std::pow(K * r, beta);
}

double moment_s_2beta(double sigma, double beta) {
  if (sigma < 0.0) throw parameter_error("moment_s_2beta: sigma must be >= 0");
  if (!(beta >= 2.0)) throw parameter_error("moment_s_2beta: beta must be >= 2");
  const double s2 = sigma * sigma;
  return std::exp(-s2 / beta + 2.0 * s2 / (beta * beta));
}

double k_sigma(double K, double beta, double sigma) {
  if (!(K > 0.0)) throw parameter_error("k_sigma: K must be positive");
  if (!(beta >= 2.0)) throw parameter_error("k_sigma: beta must be >= 2");
  if (sigma < 0.0) throw parameter_error("k_sigma: sigma must be >= 0");
  return K * std::exp(sigma * sigma * (2.0 - beta) / (2.0 * beta * beta));
}

std::vector<double> sample_shadowing(const ShadowingSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(spec.draw(rng));
  return out;
}

double rescaled_distance(double r, double sigma, double beta) {
  if (!(sigma > 0.0)) throw parameter_error("rescaled_distance: sigma must be positive");
  if (!(r > 0.0)) throw parameter_error("rescaled_distance: r must be positive");
  return (beta / sigma) * std::log(r) - sigma / beta;
}

Truncation Truncation::defaults(double sigma) {
  Truncation t;
  t.a = std::max(std::exp(sigma) - 1.0, 0.0);
  const double s3 = sigma * sigma * sigma;
  t.b = (s3 < 700.0) ? std::exp(s3) : std::numeric_limits<double>::infinity();
  return t;
}

MarkedPropagationSample propagation_process(const PointPattern& pattern, const Vec2& user,
                                            const ShadowingSpec& spec,
                                            const PropagationOptions& options, std::uint64_t seed) {
  check_loss_params(options.K, options.beta);
  spec.validate();
  const double sigma = spec.sigma;
  const double keff = options.rescale_constant ? k_sigma(options.K, options.beta, sigma) : options.K;
  const Truncation trunc = options.truncation.value_or(Truncation{});

  MarkedPropagationSample out;
  out.K = options.K;
  out.beta = options.beta;
  out.sigma = sigma;
  out.truncation = trunc;
  out.seed = seed;

  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  const double mu = spec.mu();

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double d = distance(user, pattern.points[i], pattern.metric);
    if (d < kOriginTol) {
      throw parameter_error("propagation_process: station coincides with the user location");
    }
    if (!(d > trunc.a && d < trunc.b)) continue;
    const double z = gauss(rng);
    double s = std::exp(mu + sigma * z);
    if (spec.has_extra()) s *= spec.draw_extra(rng);
    const double loss = std::exp(options.beta * std::log(keff * d)) / s;

    out.losses.push_back(loss);
    out.raw_distances.push_back(d);
    out.rescaled_distances.push_back(sigma > 0.0
                                         ? rescaled_distance(d, sigma, options.beta)
                                         : std::numeric_limits<double>::quiet_NaN());
    if (options.marks != nullptr) {
      const double shift = sigma > 0.0 ? 2.0 * sigma / options.beta : 0.0;
      out.types.push_back(options.marks->sample(z - shift, rng));
    } else {
      out.types.push_back(0);
    }
    order.push_back(order.size());
  }
  if (out.losses.empty()) {
    throw parameter_error("propagation_process: no stations retained after truncation");
  }

  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.losses[a] < out.losses[b]; });
  auto permute = [&](auto& v) {
    auto tmp = v;
    for (std::size_t i = 0; i < order.size(); ++i) v[i] = tmp[order[i]];
  };
  permute(out.losses);
  permute(out.raw_distances);
  permute(out.rescaled_distances);
  permute(out.types);
  return out;
}

double min_loss(const PointPattern& pattern, const Vec2& user, const ShadowingSpec& spec,
                const PropagationOptions& options, Rng& rng) {
  const double sigma = spec.sigma;
  const double keff = options.rescale_constant ? k_sigma(options.K, options.beta, sigma) : options.K;
  const Truncation trunc = options.truncation.value_or(Truncation{});
  std::normal_distribution<double> gauss;
  const double mu = spec.mu();

  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pattern.points) {
    const double d = distance(user, p, pattern.metric);
    if (d < kOriginTol) {
      throw parameter_error("min_loss: station coincides with the user location");
    }
    if (!(d > trunc.a && d < trunc.b)) continue;
    const double z = gauss(rng);
    double s = std::exp(mu + sigma * z);
    if (spec.has_extra()) s *= spec.draw_extra(rng);
    const double loss = std::exp(options.beta * std::log(keff * d)) / s;
    best = std::min(best, loss);
  }
  if (!std::isfinite(best)) {
    throw parameter_error("min_loss: no stations retained after truncation");
  }
  return best;
}

double nu_n(double s, double r, double K, double beta, double n) {
  check_loss_params(K, beta);
  if (!(r > 0.0)) throw parameter_error("nu_n: r must be positive");
  if (!(n > 0.0)) throw parameter_error("nu_n: n must be positive");
  return norm_cdf((s - beta * std::log(K * r) - n / beta) / std::sqrt(n));
}

double exact_mean_measure(const PointPattern& pattern, double s, double K, double beta, double n,
                          const std::optional<Truncation>& truncation) {
  const Truncation trunc = truncation.value_or(Truncation{});
  double acc = 0.0;
  for (const auto& p : pattern.points) {
    const double r = std::hypot(p.x, p.y);
    if (!(r > trunc.a && r < trunc.b)) continue;
    acc += nu_n(s, r, K, beta, n);
  }
  return acc;
}

double lambda_log(double s, double K, double beta, double lambda) {
  return lambda * kPi / (K * K) * std::exp(2.0 * s / beta);
}

double mean_measure_integral(double s, double K, double beta, double n, double lambda,
                             double r_lo, double r_hi) {
  check_loss_params(K, beta);
  if (!(n > 0.0)) throw parameter_error("mean_measure_integral: n must be positive");
  if (!(r_lo >= 0.0 && r_hi > r_lo)) throw parameter_error("mean_measure_integral: bad radii");
  const double sqn = std::sqrt(n);
  const double c = lambda * kPi / (K * K);

  // Boundary term (pi/K^2) exp((2/beta)(s - n/beta + t sqrt(n))) Phi(-t),
  // evaluated in log space so the huge exponential and the tiny tail cancel.
  auto boundary = [&](double t) {
    if (std::isinf(t)) return 0.0;  // vanishes at both infinities
    const double lg = (2.0 / beta) * (s - n / beta + t * sqn) + log_norm_sf(t);
    return c * std::exp(lg);
  };

  // u_n and v_n from the change of variables t = (s - beta ln(K r) - n/beta)/sqrt(n).
  const double u_n = (r_lo == 0.0)
                         ? std::numeric_limits<double>::infinity()
                         : (s - beta * std::log(K * r_lo) - n / beta) / sqn;
  const double v_n = std::isinf(r_hi)
                         ? -std::numeric_limits<double>::infinity()
                         : (s - beta * std::log(K * r_hi) - n / beta) / sqn;

  const double shift = 2.0 * sqn / beta;
  const double gauss_term =
      c * std::exp(2.0 * s / beta) * (norm_cdf(-v_n - shift) - norm_cdf(-u_n - shift));
  return boundary(-v_n) - boundary(-u_n) + gauss_term;
}

double extended_mean_measure(const PointPattern& pattern, double s, double K, double beta,
                             double n, double r_enum) {
  if (pattern.metric.kind != MetricKind::torus || !pattern.metric.has_extent()) {
    throw parameter_error("extended_mean_measure: pattern must carry a torus extent");
  }
  if (!pattern.nominal_density) {
    throw parameter_error("extended_mean_measure: pattern needs a nominal density");
  }
  const double w = pattern.metric.width;
  const double h = pattern.metric.height;
  const double reach = r_enum + 0.5 * std::hypot(w, h);
  const int jmax = static_cast<int>(std::ceil(reach / w));
  const int kmax = static_cast<int>(std::ceil(reach / h));

  double acc = 0.0;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int k = -kmax; k <= kmax; ++k) {
      const double sx = j * w;
      const double sy = k * h;
      for (const auto& p : pattern.points) {
        const double r = std::hypot(p.x + sx, p.y + sy);
        if (r > 0.0 && r <= r_enum) acc += nu_n(s, r, K, beta, n);
      }
    }
  }
  acc += mean_measure_integral(s, K, beta, n, *pattern.nominal_density, r_enum);
  return acc;
}

void append_sample_csv(std::ostream& out, const MarkedPropagationSample& sample) {
  for (std::size_t i = 0; i < sample.losses.size(); ++i) {
    out << sample.losses[i] << ',' << std::log(sample.losses[i]) << ','
        << sample.raw_distances[i] << ',' << sample.rescaled_distances[i] << ','
        << sample.types[i] << '\n';
  }
}

}  // namespace shadowsim
