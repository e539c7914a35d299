// SPDX-License-Identifier: Apache-2.0
#include "shadowsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shadowsim/errors.hpp"
#include "shadowsim/rng.hpp"

namespace shadowsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;
}  // namespace

Metric Metric::torus(double w, double h) {
  Metric m{MetricKind::torus, w, h};
  m.validate();
  return m;
}

double Metric::area() const {
  if (!has_extent()) throw parameter_error("Metric::area: no extent");
  return width * height;
}

void Metric::validate() const {
  if (kind == MetricKind::torus && !(width > 0.0 && height > 0.0)) {
    throw parameter_error("torus extent must be strictly positive");
  }
  if (width < 0.0 || height < 0.0) throw parameter_error("negative metric extent");
}

double distance(const Vec2& p, const Vec2& q, const Metric& metric) {
  double dx = std::fabs(p.x - q.x);
  double dy = std::fabs(p.y - q.y);
  if (metric.kind == MetricKind::torus) {
    dx = std::min(dx, metric.width - dx);
    dy = std::min(dy, metric.height - dy);
  }
  return std::hypot(dx, dy);
}

PointPattern gen_poisson(double lambda, const Metric& window, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw parameter_error("gen_poisson: lambda must be positive");
  window.validate();
  if (!window.has_extent()) throw parameter_error("gen_poisson: window needs a finite extent");
  const double area = window.area();

  Rng rng = make_rng(seed);
  std::poisson_distribution<long> count_dist(lambda * area);
  const long count = count_dist(rng);

  PointPattern pat;
  pat.metric = window;
  pat.nominal_density = lambda;
  pat.points.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double x = (uniform01(rng) - 0.5) * window.width;
    const double y = (uniform01(rng) - 0.5) * window.height;
    pat.points.push_back({x, y});
  }
  return pat;
}

PointPattern gen_hexagonal(int n, double spacing) {
  if (n < 1) throw parameter_error("gen_hexagonal: N must be >= 1");
  if (!(spacing > 0.0)) throw parameter_error("gen_hexagonal: spacing must be positive");
  const double row_h = kSqrt3 * spacing / 2.0;
  const double width = n * spacing;
  const double height = n * row_h;

  PointPattern pat;
  pat.metric = Metric::torus(width, height);
  pat.nominal_density = 2.0 / (spacing * spacing * kSqrt3);
  pat.points.reserve(static_cast<std::size_t>(n) * n);

  // Row j: y = (j + 1/2) * row_h; columns offset by d/4 on even rows and
  // 3d/4 on odd rows, which keeps the origin off the lattice for every N.
  const int j0 = -((n + 1) / 2);
  for (int j = j0; j < j0 + n; ++j) {
    const double y = (j + 0.5) * row_h;
    const double off = (((j % 2) + 2) % 2 == 0) ? 0.25 : 0.75;
    const int c0 = static_cast<int>(std::ceil(-0.5 * n - off));
    for (int c = c0; c < c0 + n; ++c) {
      pat.points.push_back({(c + off) * spacing, y});
    }
  }
  return pat;
}

PointPattern gen_perturbed_lattice(int n, double spacing, double jitter_std, std::uint64_t seed) {
  if (jitter_std < 0.0) throw parameter_error("gen_perturbed_lattice: jitter_std must be >= 0");
  PointPattern pat = gen_hexagonal(n, spacing);
  if (jitter_std == 0.0) return pat;

  Rng rng = make_rng(seed);
  std::normal_distribution<double> jitter(0.0, jitter_std);
  const double w = pat.metric.width;
  const double h = pat.metric.height;
  for (auto& p : pat.points) {
    double x = p.x + jitter(rng);
    double y = p.y + jitter(rng);
    x -= w * std::floor((x + 0.5 * w) / w);
    y -= h * std::floor((y + 0.5 * h) / h);
    p = {x, y};
  }
  return pat;
}

HomogeneityProfile homogeneity_profile(const PointPattern& pattern, std::span<const double> radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw parameter_error("homogeneity_profile: radii must be positive");
    if (i > 0 && radii[i] <= radii[i - 1]) {
      throw parameter_error("homogeneity_profile: radii must be increasing");
    }
  }
  HomogeneityProfile prof;
  prof.radii.assign(radii.begin(), radii.end());
  prof.density.assign(radii.size(), 0.0);
  prof.empty_pattern = pattern.points.empty();
  if (prof.empty_pattern) return prof;

  std::vector<double> r2;
  r2.reserve(pattern.size());
  for (const auto& p : pattern.points) r2.push_back(p.x * p.x + p.y * p.y);
  std::sort(r2.begin(), r2.end());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double rr = radii[i] * radii[i];
    const auto it = std::upper_bound(r2.begin(), r2.end(), rr);
    const auto count = static_cast<double>(it - r2.begin());
    prof.density[i] = count / (kPi * rr);
  }
  return prof;
}

double largest_inscribed_radius(const PointPattern& pattern) {
  if (!pattern.metric.has_extent()) {
    // No window recorded: fall back to the farthest point radius.
    double r2max = 0.0;
    for (const auto& p : pattern.points) r2max = std::max(r2max, p.x * p.x + p.y * p.y);
    return std::sqrt(r2max);
  }
  return 0.5 * std::min(pattern.metric.width, pattern.metric.height);
}

double estimate_density(const PointPattern& pattern) {
  const double r = largest_inscribed_radius(pattern);
  if (!(r > 0.0)) throw data_error("estimate_density: pattern has no usable radius");
  const double radii[1] = {r};
  const auto prof = homogeneity_profile(pattern, radii);
  if (prof.empty_pattern) throw data_error("estimate_density: empty pattern");
  return prof.density[0];
}

double ripley_k(const PointPattern& pattern, double r) {
  if (pattern.metric.kind != MetricKind::torus) {
    throw parameter_error("ripley_k: torus metric required");
  }
  const std::size_t n = pattern.size();
  if (n < 2) throw parameter_error("ripley_k: need at least two points");
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(pattern.points[i], pattern.points[j], pattern.metric) <= r) pairs += 2;
    }
  }
  const double area = pattern.metric.area();
  const double lambda_hat = static_cast<double>(n) / area;
  return static_cast<double>(pairs) / (lambda_hat * static_cast<double>(n));
}

void save_pattern_csv(const PointPattern& pattern, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw data_error("cannot open " + csv_path.string());
  out.precision(17);
  out << "x,y\n";
  for (const auto& p : pattern.points) out << p.x << "," << p.y << "\n";

  nlohmann::json side;
  side["metric"] = pattern.metric.kind == MetricKind::torus ? "torus" : "plane";
  if (pattern.metric.has_extent()) {
    side["width"] = pattern.metric.width;
    side["height"] = pattern.metric.height;
  }
  if (pattern.nominal_density) side["nominal_density"] = *pattern.nominal_density;
  std::filesystem::path sp = csv_path;
  sp += ".json";
  std::ofstream sout(sp);
  sout << side.dump(2) << "\n";
}

PointPattern load_pattern_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw data_error("cannot open " + csv_path.string());
  PointPattern pat;
  pat.metric = Metric::plane();

  std::string line;
  if (!std::getline(in, line)) throw data_error("empty pattern file " + csv_path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string xs, ys;
    if (!std::getline(ls, xs, ',') || !std::getline(ls, ys, ',')) {
      throw data_error("malformed pattern row: " + line);
    }
    pat.points.push_back({std::stod(xs), std::stod(ys)});
  }

  std::filesystem::path sp = csv_path;
  sp += ".json";
  if (std::filesystem::exists(sp)) {
    std::ifstream sin(sp);
    nlohmann::json side = nlohmann::json::parse(sin);
    const std::string kind = side.value("metric", "plane");
    if (kind == "torus") {
      pat.metric = Metric::torus(side.at("width").get<double>(), side.at("height").get<double>());
    } else if (side.contains("width")) {
      pat.metric = Metric::plane_window(side["width"].get<double>(), side["height"].get<double>());
    }
    if (side.contains("nominal_density")) pat.nominal_density = side["nominal_density"].get<double>();
  }
  if (!pat.nominal_density && !pat.points.empty() && pat.metric.has_extent()) {
    pat.nominal_density = estimate_density(pat);
  }
  return pat;
}

}  // namespace shadowsim
