#include "axirot/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace axirot {

void CylinderSpec::validate() const {
  if (!(axis_distance > 0) || !(height > 0) || !(radius > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cylinder dimensions must be positive");
  }
  if (!(radius < axis_distance)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cylinder must lie in front of the camera (radius < D)");
  }
  if (point_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "point_count must be positive");
  }
}

void LatticeSpec::validate() const {
  if (!(side > 0) || !(center_distance > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lattice side and distance must be positive");
  }
  if (!(side / 2 < center_distance)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lattice must lie in front of the camera");
  }
  if (points_per_edge < 2) {
    throw Error(ErrorCode::kInvalidArgument, "points_per_edge must be >= 2");
  }
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument,
                "noise sigma must be finite and nonnegative");
  }
}

std::vector<ScenePoint> sample_cylinder(const CylinderSpec& spec,
                                        std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScenePoint> points;
  points.reserve(spec.point_count);
  for (int i = 0; i < spec.point_count; ++i) {
    const double rho = spec.radius * std::sqrt(unit(rng));
    const double phi = 2 * kPi<double> * unit(rng);
    const double y = spec.height * (unit(rng) - 0.5);
    points.emplace_back(rho * std::cos(phi), y,
                        spec.axis_distance + rho * std::sin(phi));
  }
  return points;
}

std::vector<ScenePoint> make_lattice(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.points_per_edge;
  const double half = spec.side / 2;
  const double step = spec.spacing();
  // Symmetric coordinates: index k and n-1-k are exact negatives.
  std::vector<double> coord(n);
  for (int k = 0; k < n; ++k) {
    if (2 * k == n - 1) {
      coord[k] = 0;
    } else {
      coord[k] = 2 * k < n - 1 ? -half + k * step : half - (n - 1 - k) * step;
    }
  }
  std::vector<ScenePoint> points;
  points.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        points.emplace_back(coord[i], coord[j],
                            spec.center_distance + coord[k]);
      }
    }
  }
  return points;
}

std::vector<ScenePoint> rotate_about_axis(std::span<const ScenePoint> points,
                                          const AngleD& alpha,
                                          double axis_distance) {
  if (!(axis_distance > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "axis_distance must be positive");
  }
  const Matrix3<double> r = rotation_about_y(alpha);
  const ScenePoint axis(0, 0, axis_distance);
  std::vector<ScenePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(r * (p - axis) + axis);
  return out;
}

NormalizedPoint<double> project(const ScenePoint& p) {
  if (!(p.z() > 0)) {
    throw Error(ErrorCode::kBehindCamera, "point is not in front of camera");
  }
  return {p.x() / p.z(), p.y() / p.z()};
}

CorrespondenceSet generate_pair(std::span<const ScenePoint> points,
                                const AngleD& alpha, double axis_distance,
                                const NoiseSpec& noise, int outlier_count) {
  noise.validate();
  const std::size_t n = points.size();
  if (outlier_count < 0 || static_cast<std::size_t>(outlier_count) > n) {
    throw Error(ErrorCode::kInsufficientPoints,
                "outlier_count exceeds the number of points");
  }
  if (outlier_count == 1) {
    throw Error(ErrorCode::kInsufficientPoints,
                "a single outlier cannot be re-paired with another point");
  }

  const std::vector<ScenePoint> rotated =
      rotate_about_axis(points, alpha, axis_distance);

  CorrespondenceSet set;
  set.ground_truth_angle = alpha;
  set.pairs.reserve(n);
  set.inlier_flags.assign(n, true);

  std::mt19937_64 noise_rng(mix_seed(noise.rng_seed, 0));
  std::normal_distribution<double> gauss(0.0, noise.sigma);
  auto jitter = [&]() { return noise.sigma > 0 ? gauss(noise_rng) : 0.0; };
  for (std::size_t i = 0; i < n; ++i) {
    NormalizedPoint<double> q = project(points[i]);
    NormalizedPoint<double> qp = project(rotated[i]);
    q.x += jitter();
    q.y += jitter();
    qp.x += jitter();
    qp.y += jitter();
    set.pairs.push_back({q, qp});
  }

  if (outlier_count > 0) {
    std::mt19937_64 pair_rng(mix_seed(noise.rng_seed, 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), pair_rng);
    std::vector<std::size_t> chosen(order.begin(),
                                    order.begin() + outlier_count);
    std::sort(chosen.begin(), chosen.end());

    std::vector<std::size_t> perm(chosen.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto has_fixed_point = [&]() {
      for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] == k) return true;
      }
      return false;
    };
    do {
      std::shuffle(perm.begin(), perm.end(), pair_rng);
    } while (has_fixed_point());

    std::vector<NormalizedPoint<double>> seconds;
    seconds.reserve(chosen.size());
    for (std::size_t i : chosen) seconds.push_back(set.pairs[i].second);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      set.pairs[chosen[k]].second = seconds[perm[k]];
      set.inlier_flags[chosen[k]] = false;
    }
  }
  return set;
}

}  // namespace axirot
