// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/mark_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowsim/errors.hpp"
#include "shadowsim/normal.hpp"

namespace shadowsim {

double MarkKernel::prob(double z, std::size_t type) const {
  if (z_grid.empty()) throw parameter_error("MarkKernel: empty grid");
  if (z <= z_grid.front()) return probs.front()[type];
  if (z >= z_grid.back()) return probs.back()[type];
  const auto it = std::upper_bound(z_grid.begin(), z_grid.end(), z);
  const std::size_t hi = static_cast<std::size_t>(it - z_grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (z - z_grid[lo]) / (z_grid[hi] - z_grid[lo]);
  return (1.0 - t) * probs[lo][type] + t * probs[hi][type];
}

std::vector<double> MarkKernel::row(double z) const {
  std::vector<double> out(type_count());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = prob(z, t);
  return out;
}

std::size_t MarkKernel::sample(double z, Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  const std::size_t m = type_count();
  for (std::size_t t = 0; t + 1 < m; ++t) {
    acc += prob(z, t);
    if (u < acc) return t;
  }
  return m - 1;
}

void MarkKernel::validate() const {
  if (z_grid.empty() || probs.size() != z_grid.size()) {
    throw parameter_error("MarkKernel: grid/probability size mismatch");
  }
  const std::size_t m = type_count();
  if (m == 0) throw parameter_error("MarkKernel: no types");
  for (std::size_t g = 0; g < z_grid.size(); ++g) {
    if (g > 0 && !(z_grid[g] > z_grid[g - 1])) {
      throw parameter_error("MarkKernel: z grid must be strictly ascending");
    }
    if (probs[g].size() != m) throw parameter_error("MarkKernel: ragged probability rows");
    double s = 0.0;
    for (double p : probs[g]) {
      if (p < -1e-15 || p > 1.0 + 1e-12) throw parameter_error("MarkKernel: probability out of range");
      s += p;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw parameter_error("MarkKernel: row does not sum to 1");
  }
}

MarkKernel MarkKernel::constant(std::vector<double> p) {
  MarkKernel k;
  k.z_grid = {0.0};
  k.probs = {std::move(p)};
  k.validate();
  return k;
}

MarkKernel MarkKernel::indicator_two_type(double split) {
  const double eps = 1e-9;
  MarkKernel k;
  k.z_grid = {split - eps, split + eps};
  k.probs = {{1.0, 0.0}, {0.0, 1.0}};
  k.validate();
  return k;
}

std::vector<double> kernel_gauss_integral(const MarkKernel& kernel, double mean, double upper) {
  kernel.validate();
  const std::size_t m = kernel.type_count();
  std::vector<double> out(m, 0.0);

  // Integral of (a z + b) phi(z - mean) over [z0, z1]:
  //   (a*mean + b) * (Phi(z1-mean) - Phi(z0-mean)) - a * (phi(z1-mean) - phi(z0-mean)).
  auto segment = [&](double z0, double z1, double a, double b, std::size_t t) {
    if (z1 <= z0) return;
    const double u0 = z0 - mean;
    const double u1 = z1 - mean;
    const double dPhi = norm_cdf(u1) - norm_cdf(u0);
    const double dphi = norm_pdf(u1) - norm_pdf(u0);
    out[t] += (a * mean + b) * dPhi - a * dphi;
  };

  const double lo = -std::numeric_limits<double>::infinity();
  const auto& zg = kernel.z_grid;
  for (std::size_t t = 0; t < m; ++t) {
    // Constant tail below the grid.
    segment(lo, std::min(zg.front(), upper), 0.0, kernel.probs.front()[t], t);
    for (std::size_t g = 0; g + 1 < zg.size(); ++g) {
      const double z0 = zg[g];
      const double z1 = std::min(zg[g + 1], upper);
      if (z1 <= z0) break;
      const double a = (kernel.probs[g + 1][t] - kernel.probs[g][t]) / (zg[g + 1] - zg[g]);
      const double b = kernel.probs[g][t] - a * zg[g];
      segment(z0, z1, a, b, t);
    }
    if (upper > zg.back()) {
      segment(zg.back(), upper, 0.0, kernel.probs.back()[t], t);
    }
  }
  return out;
}

}  // namespace shadowsim
