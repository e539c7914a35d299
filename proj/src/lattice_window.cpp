// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/lattice_window.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"

namespace shadowsim {

double hex_lattice_density(double spacing) {
  if (!(spacing > 0.0)) throw parameter_error("hex_lattice_density: spacing must be positive");
  return 2.0 / (spacing * spacing * std::numbers::sqrt3);
}

double LatticeWindowSampler::row_y(long long j) const {
  return (static_cast<double>(j) + 0.5) * (std::numbers::sqrt3 * cfg_.spacing / 2.0);
}

double LatticeWindowSampler::row_offset(long long j) const {
  return (((j % 2) + 2) % 2 == 0) ? 0.25 : 0.75;
}

LatticeWindowSampler::ColRange LatticeWindowSampler::cols_in_disc(long long j, double r) const {
  const double y = row_y(j);
  ColRange range;
  if (std::fabs(y) >= r) return range;
  const double wd = std::sqrt(r * r - y * y) / cfg_.spacing;
  const double off = row_offset(j);
  range.lo = static_cast<long long>(std::floor(-wd - off)) + 1;
  range.hi = static_cast<long long>(std::ceil(wd - off)) - 1;
  return range;
}

double LatticeWindowSampler::station_radius(long long j, long long c) const {
  const double x = (static_cast<double>(c) + row_offset(j)) * cfg_.spacing;
  return std::hypot(x, row_y(j));
}

LatticeWindowSampler::LatticeWindowSampler(const LatticeWindowConfig& config) : cfg_(config) {
  if (!(cfg_.spacing > 0.0)) throw parameter_error("LatticeWindowSampler: spacing must be positive");
  if (!(cfg_.sigma > 0.0)) throw parameter_error("LatticeWindowSampler: sigma must be positive");
  if (!(cfg_.K > 0.0) || !(cfg_.beta > 2.0)) {
    throw parameter_error("LatticeWindowSampler: need K > 0 and beta > 2");
  }
  if (!(cfg_.tail_tol > 0.0)) throw parameter_error("LatticeWindowSampler: tail_tol must be positive");
  if (cfg_.marks != nullptr) cfg_.marks->validate();
  density_ = hex_lattice_density(cfg_.spacing);
  n_ = cfg_.sigma * cfg_.sigma;

  const double s = cfg_.max_log_loss;
  const double du = cfg_.shell_du;
  const double u_min = std::log(0.45 * cfg_.spacing);

  // Outer cutoff: continuum tail below tail_tol.
  double u_max = std::max(u_min + du, s / cfg_.beta + n_ / (cfg_.beta * cfg_.beta));
  while (mean_measure_integral(s, cfg_.K, cfg_.beta, n_, density_, std::exp(u_max)) >
         cfg_.tail_tol) {
    u_max += du;
    if (u_max > 700.0) throw accuracy_error("LatticeWindowSampler: radial cutoff out of range");
  }

  const auto n_shells = static_cast<std::size_t>(std::ceil((u_max - u_min) / du));
  shells_.reserve(n_shells);
  for (std::size_t k = 0; k < n_shells; ++k) {
    Shell sh;
    sh.r_lo = std::exp(u_min + k * du);
    sh.r_hi = std::exp(u_min + (k + 1) * du);
    sh.q_max = nu_n(s, sh.r_lo, cfg_.K, cfg_.beta, n_);

    const double h = std::numbers::sqrt3 * cfg_.spacing / 2.0;
    sh.j_hi = static_cast<long long>(std::floor(sh.r_hi / h - 0.5));
    sh.j_lo = -sh.j_hi - 1;  // rows are symmetric about y = 0
    for (long long j = sh.j_lo; j <= sh.j_hi; ++j) {
      const auto outer = cols_in_disc(j, sh.r_hi);
      const auto inner = cols_in_disc(j, sh.r_lo);
      const long long cnt = outer.size() - inner.size();
      sh.count += cnt;
      sh.row_max = std::max(sh.row_max, cnt);
    }
    if (sh.count > 0 && sh.q_max > 0.0) {
      expected_candidates_ += static_cast<double>(sh.count) * sh.q_max;
      shells_.push_back(sh);
    }
  }
}

MarkedPropagationSample LatticeWindowSampler::sample(Rng& rng) const {
  MarkedPropagationSample out;
  out.K = cfg_.K;
  out.beta = cfg_.beta;
  out.sigma = cfg_.sigma;

  const double s_max = cfg_.max_log_loss;
  const double sigma = cfg_.sigma;
  const double beta = cfg_.beta;
  const double mark_shift = 2.0 * sigma / beta;

  std::vector<std::pair<long long, long long>> chosen;
  for (const auto& sh : shells_) {
    std::binomial_distribution<long long> binom(sh.count, sh.q_max);
    const long long m = binom(rng);
    if (m == 0) continue;
    chosen.clear();

    std::uniform_int_distribution<long long> row_dist(sh.j_lo, sh.j_hi);
    for (long long cand = 0; cand < m; ++cand) {
      long long j = 0, c = 0;
      // Uniform distinct station of the shell: row by rejection on the
      // per-row count, column by index, duplicate draws rejected.
      while (true) {
        j = row_dist(rng);
        const auto outer = cols_in_disc(j, sh.r_hi);
        const auto inner = cols_in_disc(j, sh.r_lo);
        const long long cnt = outer.size() - inner.size();
        if (cnt <= 0) continue;
        if (static_cast<double>(cnt) < static_cast<double>(sh.row_max) * uniform01(rng)) continue;
        std::uniform_int_distribution<long long> col_idx(0, cnt - 1);
        long long idx = col_idx(rng);
        const long long left_len = inner.size() > 0 ? inner.lo - outer.lo : outer.size();
        c = idx < left_len ? outer.lo + idx : inner.hi + 1 + (idx - left_len);
        if (std::find(chosen.begin(), chosen.end(), std::make_pair(j, c)) == chosen.end()) break;
      }
      chosen.emplace_back(j, c);

      const double r = station_radius(j, c);
      const double q = nu_n(s_max, r, cfg_.K, beta, n_);
      if (uniform01(rng) * sh.q_max >= q) continue;

      // Accepted: the shadowing driver is a normal conditioned on landing in
      // the window, log L = beta ln(K r) + n/beta - sigma Z <= s_max.
      const double base = beta * std::log(cfg_.K * r) + n_ / beta;
      const double z_lo = (base - s_max) / sigma;
      const double z = truncated_normal_lower(z_lo, uniform01(rng));
      const double log_loss = base - sigma * z;

      out.losses.push_back(std::exp(log_loss));
      out.raw_distances.push_back(r);
      out.rescaled_distances.push_back(rescaled_distance(r, sigma, beta));
      out.types.push_back(cfg_.marks != nullptr ? cfg_.marks->sample(z - mark_shift, rng) : 0);
    }
  }

  std::vector<std::size_t> order(out.losses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
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

}  // namespace shadowsim
