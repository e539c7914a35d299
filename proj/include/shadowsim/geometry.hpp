// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace shadowsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class MetricKind { plane, torus };

/// Distance context of a point pattern. A torus always carries a positive
/// extent; a plane metric may carry the generation window for bookkeeping.
struct Metric {
  MetricKind kind = MetricKind::plane;
  double width = 0.0;
  double height = 0.0;

  static Metric plane() { return {MetricKind::plane, 0.0, 0.0}; }
  static Metric plane_window(double w, double h) { return {MetricKind::plane, w, h}; }
  static Metric torus(double w, double h);

  bool has_extent() const { return width > 0.0 && height > 0.0; }
  double area() const;
  void validate() const;
};

/// Finite set of station locations, their metric, and (when known) the
/// nominal density lambda per unit area.
struct PointPattern {
  std::vector<Vec2> points;
  Metric metric;
  std::optional<double> nominal_density;

  std::size_t size() const { return points.size(); }
};

/// Euclidean distance on the plane, or the wrap-around (minimum-image)
/// distance on the torus. The per-axis minimum image equals the minimum over
/// the 9 translated copies for points inside the fundamental rectangle.
double distance(const Vec2& p, const Vec2& q, const Metric& metric);

/// Homogeneous Poisson pattern on the rectangle [-W/2,W/2) x [-H/2,H/2).
PointPattern gen_poisson(double lambda, const Metric& window, std::uint64_t seed);

/// N x N triangular lattice with spacing `spacing` on the rectangle
/// [-N*d/2, N*d/2) x [-N*sqrt(3)*d/4, N*sqrt(3)*d/4), toroidal metric,
/// density 2/(d^2*sqrt(3)). The lattice is offset so no station sits at the
/// origin.
PointPattern gen_hexagonal(int n, double spacing);

/// Hexagonal lattice with each point displaced by an isotropic Gaussian of
/// standard deviation jitter_std, wrapped on the torus.
PointPattern gen_perturbed_lattice(int n, double spacing, double jitter_std, std::uint64_t seed);

struct HomogeneityProfile {
  std::vector<double> radii;
  std::vector<double> density;  // count(B_0(r)) / (pi r^2)
  bool empty_pattern = false;
};

/// Empirical density phi(B_0(r))/(pi r^2) at each radius, computed with plane
/// radii from the origin (torus patterns are evaluated on their unwrapped
/// rectangle).
HomogeneityProfile homogeneity_profile(const PointPattern& pattern, std::span<const double> radii);

/// Largest radius whose ball is contained in the pattern's rectangle.
double largest_inscribed_radius(const PointPattern& pattern);

/// Density estimate from the homogeneity profile at the largest in-window
/// radius; used for loaded patterns without metadata.
double estimate_density(const PointPattern& pattern);

/// Ripley K estimate on a torus pattern (no edge correction needed).
double ripley_k(const PointPattern& pattern, double r);

/// Pattern CSV ("x,y" header) with a JSON sidecar describing the metric.
void save_pattern_csv(const PointPattern& pattern, const std::filesystem::path& csv_path);
PointPattern load_pattern_csv(const std::filesystem::path& csv_path);

}  // namespace shadowsim
