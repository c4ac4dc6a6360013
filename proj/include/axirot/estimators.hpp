#ifndef AXIROT_ESTIMATORS_HPP
#define AXIROT_ESTIMATORS_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "axirot/geometry.hpp"

namespace axirot {

using AngleD = Angle<double>;
using CorrespondenceD = Correspondence<double>;

enum class EstimatorMethod { kRansac, kHistogram, kMedian };

std::string_view method_name(EstimatorMethod method);

// Defaults are the values that worked best on real projection pairs:
// p = 0.999, outlier prior 0.95, Sampson gate 8e-4, 60% consensus.
struct RansacConfig {
  double success_probability = 0.999;
  double outlier_fraction = 0.95;
  int sample_size = 1;
  double sampson_threshold = 8e-4;
  double min_inlier_fraction = 0.6;
  std::int64_t max_iterations_cap = 100000;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Bins are centered on range_min + k * bin_width, k = 0 .. K with
// K = (range_max - range_min) / bin_width, and each covers
// [center - bin_width / 2, center + bin_width / 2).
struct HistogramConfig {
  AngleD range_min = AngleD::from_degrees(-90);
  AngleD range_max = AngleD::from_degrees(90);
  AngleD bin_width = AngleD::from_degrees(1);
  int min_peak_count = 2;

  void validate() const;
  int bin_count() const;
  double bin_center_radians(int bin) const;
  // Bin index for an angle, or -1 when it falls outside every bin.
  int bin_of(const AngleD& angle) const;
};

struct EstimateResult {
  AngleD angle;
  std::vector<std::size_t> inlier_indices;
  double mean_squared_residual = 0;
  std::int64_t iterations_run = 0;
  bool iterations_truncated = false;
  EstimatorMethod method = EstimatorMethod::kRansac;
};

struct RefinedAngle {
  AngleD angle;
  // Mean of (q'^T E(angle) q)^2 over the refined set.
  double mean_squared_residual = 0;
};

// Number of hypotheses N = ceil(log(1 - p) / log(1 - (1 - eps)^n)) that
// draws at least one all-inlier sample with probability p.
std::int64_t required_iterations(double p, double epsilon, int n);

// Mean of squared epipolar residuals of the pairs at `indices` under
// E(angle); 0 for an empty index set.
double mean_squared_epipolar_residual(std::span<const CorrespondenceD> corrs,
                                      std::span<const std::size_t> indices,
                                      const AngleD& angle);

// Least-squares angle over `corrs`, searched around `initial`.
//
// The objective is the sum of squared epipolar residuals with E taken at unit
// baseline length, sum_i (cos(a/2) u_i - sin(a/2) v_i)^2. It differs from
// the raw q'^T E(a) q sum only by the factor 4 sin^2(a/2), which would
// otherwise pull every solution toward the trivial root a = 0.
RefinedAngle refine_angle_ls(std::span<const CorrespondenceD> corrs,
                             const AngleD& initial);

// The least-squares objective above, averaged over `corrs`.
double unit_baseline_objective(std::span<const CorrespondenceD> corrs,
                               const AngleD& angle);

// One-correspondence RANSAC with least-squares refinement of every valid
// consensus. Iteration i draws its sample from a random stream seeded by
// (rng_seed, i), so the result does not depend on evaluation order.
EstimateResult ransac_estimate(std::span<const CorrespondenceD> corrs,
                               const RansacConfig& cfg);

EstimateResult histogram_estimate(std::span<const CorrespondenceD> corrs,
                                  const HistogramConfig& cfg);

EstimateResult median_estimate(std::span<const CorrespondenceD> corrs);

// Seed mixing shared by every randomized component (SplitMix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace axirot

#endif  // AXIROT_ESTIMATORS_HPP
