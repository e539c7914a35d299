// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace shadowsim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream seed: the master seed mixed with a path of indices
/// (e.g. {replication, grid point}). Used by every parallel protocol so that
/// results do not depend on worker count or evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master ^ 0x6a09e667f3bcc909ULL;
  splitmix64(state);
  for (std::uint64_t p : path) {
    state ^= splitmix64(state) ^ (p + 0x9e3779b97f4a7c15ULL);
    splitmix64(state);
  }
  return splitmix64(state);
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(master, path));
}

inline double uniform01(Rng& rng) {
  // 53-bit mantissa uniform in (0,1); never returns exactly 0 or 1.
  return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

inline double normal(Rng& rng) {
  std::normal_distribution<double> d;
  return d(rng);
}

}  // namespace shadowsim
