#ifndef AXIROT_SYNTHETIC_HPP
#define AXIROT_SYNTHETIC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "axirot/estimators.hpp"

namespace axirot {

// Camera frame: x right, y up, z along the optical axis.
using ScenePoint = Vector3<double>;

// Vertical cylinder whose axis passes through (0, 0, axis_distance).
// Defaults reproduce the reference synthetic scene (D = 200, H = 230,
// R = 115).
struct CylinderSpec {
  double axis_distance = 200;
  double height = 230;
  double radius = 115;
  int point_count = 100;

  void validate() const;
};

// Axis-aligned cube of edge `side` centered at (0, 0, center_distance),
// sampled on a points_per_edge^3 grid.
struct LatticeSpec {
  double side = 200;
  double center_distance = 200;
  int points_per_edge = 21;

  void validate() const;
  double spacing() const { return side / (points_per_edge - 1); }
};

// Zero-mean Gaussian noise on both coordinates of both image points.
struct NoiseSpec {
  double sigma = 1e-4;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct CorrespondenceSet {
  std::vector<CorrespondenceD> pairs;
  AngleD ground_truth_angle;
  std::vector<bool> inlier_flags;
};

// Uniform in volume: radial coordinate R sqrt(U), angle and height uniform.
std::vector<ScenePoint> sample_cylinder(const CylinderSpec& spec,
                                        std::uint64_t seed);

std::vector<ScenePoint> make_lattice(const LatticeSpec& spec);

// Turns the points by `alpha` about the vertical axis through
// (0, 0, axis_distance). The direction is the one for which
// angle_from_correspondence on (project(p), project(p')) returns +alpha.
std::vector<ScenePoint> rotate_about_axis(std::span<const ScenePoint> points,
                                          const AngleD& alpha,
                                          double axis_distance);

NormalizedPoint<double> project(const ScenePoint& p);

// Projects every point before and after the rotation, perturbs all four
// coordinates with noise, then turns `outlier_count` randomly chosen pairs
// into outliers by re-pairing their second points through a derangement.
CorrespondenceSet generate_pair(std::span<const ScenePoint> points,
                                const AngleD& alpha, double axis_distance,
                                const NoiseSpec& noise, int outlier_count);

}  // namespace axirot

#endif  // AXIROT_SYNTHETIC_HPP
