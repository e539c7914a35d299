// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "shadowsim/mark_kernel.hpp"
#include "shadowsim/propagation.hpp"
#include "shadowsim/rng.hpp"

namespace shadowsim {

/// Density of the infinite hexagonal lattice with the given spacing.
double hex_lattice_density(double spacing);

struct LatticeWindowConfig {
  double spacing = 1.0;
  double K = 1.0;
  double beta = 4.0;
  double sigma = 1.0;          // natural-log scale, > 0
  double max_log_loss = 0.0;   // observation window: log-losses in (-inf, s_max]
  const MarkKernel* marks = nullptr;
  double tail_tol = 1e-4;      // expected count allowed beyond the radial cutoff
  double shell_du = 0.05;      // shell width in u = ln r
};

/// Exact sampler of the rescaled propagation process of the INFINITE
/// hexagonal lattice restricted to losses <= exp(max_log_loss).
///
/// Stations are organized in radial shells. A station at radius r lands in
/// the window with probability q(r) = nu_n(s_max, r); within a shell the
/// contributing stations are drawn exactly: candidate count
/// Binomial(shell station count, q_max), candidate positions a uniform
/// distinct subset (exact integer lattice counts per shell), thinning by
/// q(r)/q_max. The radial cutoff is chosen so the expected count beyond it is
/// below tail_tol. This reaches shadowing strengths where the contributing
/// stations sit at radii ~ exp(sigma^2/beta^2) and explicit pattern
/// enumeration is hopeless.
class LatticeWindowSampler {
 public:
  explicit LatticeWindowSampler(const LatticeWindowConfig& config);

  MarkedPropagationSample sample(Rng& rng) const;

  double density() const { return density_; }
  double outer_radius() const { return shells_.empty() ? 0.0 : shells_.back().r_hi; }
  /// Sum over shells of count * q_max: upper bound on candidates per draw.
  double expected_candidates() const { return expected_candidates_; }

 private:
  struct Shell {
    double r_lo = 0.0, r_hi = 0.0;
    long long count = 0;      // exact station count in {r_lo <= r < r_hi}
    double q_max = 0.0;
    long long j_lo = 0, j_hi = 0;  // row index range
    long long row_max = 0;         // max per-row count in the shell
  };

  struct ColRange {
    long long lo = 0, hi = -1;  // empty when hi < lo
    long long size() const { return hi >= lo ? hi - lo + 1 : 0; }
  };

  double row_y(long long j) const;
  double row_offset(long long j) const;
  ColRange cols_in_disc(long long j, double r) const;
  double station_radius(long long j, long long c) const;

  LatticeWindowConfig cfg_;
  double density_ = 0.0;
  double n_ = 0.0;  // sigma^2
  std::vector<Shell> shells_;
  double expected_candidates_ = 0.0;
};

}  // namespace shadowsim
