// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "shadowsim/rng.hpp"

namespace shadowsim {

/// Conditional law of a station's type given the Gaussian driver z of its
/// shadowing: a probability vector per grid point, linearly interpolated in z
/// and clamped beyond the grid.
struct MarkKernel {
  std::vector<double> z_grid;               // strictly ascending
  std::vector<std::vector<double>> probs;   // probs[g][type], each row sums to 1

  std::size_t type_count() const { return probs.empty() ? 0 : probs.front().size(); }

  /// P(T = type | Z = z).
  double prob(double z, std::size_t type) const;
  std::vector<double> row(double z) const;

  /// Draw a type index at driver value z.
  std::size_t sample(double z, Rng& rng) const;

  void validate() const;  // row sums within 1e-12 of 1, grid ascending

  static MarkKernel constant(std::vector<double> p);
  /// Two types with P(type 1 | z) = 1(z > split), realized as a steep ramp.
  static MarkKernel indicator_two_type(double split = 0.0);
};

/// Per-type integral of the kernel against a Gaussian N(mean, 1) density,
/// restricted to z <= upper: E[k_t(Z) 1(Z <= upper)], Z ~ N(mean,1).
/// Exact for the piecewise-linear kernel (closed form per segment).
std::vector<double> kernel_gauss_integral(const MarkKernel& kernel, double mean, double upper);

}  // namespace shadowsim
