#ifndef AXIROT_EXPERIMENTS_HPP
#define AXIROT_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "axirot/estimators.hpp"
#include "axirot/synthetic.hpp"

namespace axirot {

struct SweepConfig {
  std::vector<AngleD> angle_grid;
  int trials_per_angle = 300;
  CylinderSpec scene;
  // Only sigma is used; per-trial noise seeds derive from master_seed.
  NoiseSpec noise;
  int outlier_count = 70;
  int inlier_count = 30;
  RansacConfig ransac;
  HistogramConfig histogram;
  std::uint64_t master_seed = 0;
  // Worker threads; results do not depend on this.
  unsigned threads = 1;

  void validate() const;
};

// RANSAC settings of the reference synthetic experiments: p = 0.999,
// consensus >= 25%, Sampson gate 0.01, outlier prior 70/100.
RansacConfig synthetic_ransac_config();

// Reference synthetic setup (D = 200, H = 230, R = 115, sigma = 1e-4,
// 30 inliers + 70 outliers, 300 trials) over -80..80 deg in 5 deg steps.
SweepConfig default_sweep_config();

// Same scene, 100 inliers and no outliers, 1000 trials per noise level.
SweepConfig default_noise_sweep_config();

// Inclusive grid from..to in degrees.
std::vector<AngleD> angle_grid_degrees(double from, double to, double step);
std::vector<double> log_spaced(double lo, double hi, int count);

struct SweepRow {
  double parameter_value = 0;
  EstimatorMethod method = EstimatorMethod::kRansac;
  // Over successful trials only; NaN when every trial failed.
  double mean_absolute_error_deg = 0;
  int failure_count = 0;
  int trials = 0;
};

// |estimate - truth| in degrees, on the difference wrapped to (-180, 180].
double absolute_error_deg(const AngleD& estimate, const AngleD& truth);

// One row per (angle, method), methods ordered ransac, histogram, median.
std::vector<SweepRow> run_angle_sweep(const SweepConfig& cfg);

inline const AngleD kDefaultNoiseSweepAngle = AngleD::from_degrees(30);

// One row per (sigma, method) at a fixed rotation angle.
std::vector<SweepRow> run_noise_sweep(const SweepConfig& cfg,
                                      std::span<const double> sigma_grid,
                                      const AngleD& angle =
                                          kDefaultNoiseSweepAngle);

// Normalized units per detector pixel. With it, a 1 deg turn of the default
// cylinder moves points by about 1.5 px vertically on average.
inline constexpr double kDefaultPixelScale = 1e-3;

struct PixelShift {
  double dx = 0;
  double dy = 0;
};

struct ShiftCell {
  PixelShift shift;
  std::optional<AngleD> angle;      // empty for a degenerate cell
  std::optional<double> error_deg;  // against the true angle
};

// Square grid of shifts in [-radius, radius]^2 pixels with the given step,
// row-major in dy then dx.
std::vector<PixelShift> square_shift_grid(double radius_px, double step_px);

// Moves the second point of `base` by each shift and re-evaluates the
// single-correspondence angle.
std::vector<ShiftCell> run_shift_sensitivity(const CorrespondenceD& base,
                                             const AngleD& true_angle,
                                             std::span<const PixelShift> shifts,
                                             double pixel_scale);

struct ShiftFixture {
  CorrespondenceD pair;
  AngleD angle;
};

// Noiseless pair from the default cylinder scene turned by 1 deg: the scene
// point (50, 40, 200), whose image moves by about 0.87 px vertically at the
// default pixel scale.
ShiftFixture calibrated_shift_fixture();

struct ConditioningPoint {
  ScenePoint position;
  double mean_error_deg = 0;
};

// Mean single-correspondence angle error of every lattice point over
// `repeats` noisy projections; degenerate evaluations score 180 deg. Keeps
// the points whose mean error is at least `discard_below_deg`.
std::vector<ConditioningPoint> run_conditioning_map(const LatticeSpec& spec,
                                                    const AngleD& alpha,
                                                    const NoiseSpec& noise,
                                                    int repeats,
                                                    double discard_below_deg,
                                                    unsigned threads = 1);

}  // namespace axirot

#endif  // AXIROT_EXPERIMENTS_HPP
