#include "axirot/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace axirot {
namespace {

constexpr std::array<EstimatorMethod, 3> kMethods = {
    EstimatorMethod::kRansac, EstimatorMethod::kHistogram,
    EstimatorMethod::kMedian};

// Runs fn(0) .. fn(count - 1) on up to `threads` workers. The first
// exception thrown by any call is rethrown once all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(
      1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

using TrialErrors = std::array<std::optional<double>, kMethods.size()>;

TrialErrors run_trial(const SweepConfig& cfg, const AngleD& angle,
                      double sigma, std::uint64_t trial_seed) {
  CylinderSpec scene = cfg.scene;
  scene.point_count = cfg.inlier_count + cfg.outlier_count;
  const std::vector<ScenePoint> points =
      sample_cylinder(scene, mix_seed(trial_seed, 0));
  const NoiseSpec noise{sigma, mix_seed(trial_seed, 1)};
  const CorrespondenceSet set = generate_pair(
      points, angle, scene.axis_distance, noise, cfg.outlier_count);

  RansacConfig ransac = cfg.ransac;
  ransac.rng_seed = mix_seed(trial_seed, 2);

  TrialErrors errors;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    try {
      EstimateResult r;
      switch (kMethods[m]) {
        case EstimatorMethod::kRansac:
          r = ransac_estimate(set.pairs, ransac);
          break;
        case EstimatorMethod::kHistogram:
          r = histogram_estimate(set.pairs, cfg.histogram);
          break;
        case EstimatorMethod::kMedian:
          r = median_estimate(set.pairs);
          break;
      }
      errors[m] = absolute_error_deg(r.angle, angle);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::kNoConsensus:
        case ErrorCode::kNoPeak:
        case ErrorCode::kEmptyInput:
          break;  // counted as a failed trial
        default:
          throw;
      }
    }
  }
  return errors;
}

// Evaluates trials for one parameter point and appends one row per method.
void sweep_point(const SweepConfig& cfg, const AngleD& angle, double sigma,
                 double parameter_value, std::uint64_t point_seed,
                 std::vector<SweepRow>& rows) {
  std::vector<TrialErrors> trials(cfg.trials_per_angle);
  parallel_for(trials.size(), cfg.threads, [&](std::size_t t) {
    trials[t] = run_trial(cfg, angle, sigma, mix_seed(point_seed, t));
  });
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    double sum = 0;
    int successes = 0;
    for (const auto& t : trials) {
      if (t[m]) {
        sum += *t[m];
        ++successes;
      }
    }
    SweepRow row;
    row.parameter_value = parameter_value;
    row.method = kMethods[m];
    row.trials = cfg.trials_per_angle;
    row.failure_count = cfg.trials_per_angle - successes;
    row.mean_absolute_error_deg =
        successes > 0 ? sum / successes
                      : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
}

}  // namespace

void SweepConfig::validate() const {
  if (trials_per_angle < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials_per_angle must be >= 1");
  }
  if (inlier_count < 0 || outlier_count < 0 ||
      inlier_count + outlier_count < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "inlier and outlier counts must be nonnegative, not both 0");
  }
  CylinderSpec s = scene;
  s.point_count = inlier_count + outlier_count;
  s.validate();
  noise.validate();
  ransac.validate();
  histogram.validate();
}

RansacConfig synthetic_ransac_config() {
  RansacConfig cfg;
  cfg.success_probability = 0.999;
  cfg.outlier_fraction = 0.7;
  cfg.sampson_threshold = 0.01;
  cfg.min_inlier_fraction = 0.25;
  return cfg;
}

SweepConfig default_sweep_config() {
  SweepConfig cfg;
  cfg.angle_grid = angle_grid_degrees(-80, 80, 5);
  cfg.noise.sigma = 1e-4;
  cfg.ransac = synthetic_ransac_config();
  return cfg;
}

SweepConfig default_noise_sweep_config() {
  SweepConfig cfg = default_sweep_config();
  cfg.angle_grid = {kDefaultNoiseSweepAngle};
  cfg.inlier_count = 100;
  cfg.outlier_count = 0;
  cfg.trials_per_angle = 1000;
  return cfg;
}

std::vector<AngleD> angle_grid_degrees(double from, double to, double step) {
  if (!(step > 0) || !(to >= from)) {
    throw Error(ErrorCode::kInvalidArgument, "bad angle grid");
  }
  std::vector<AngleD> grid;
  const auto count = static_cast<int>(std::floor((to - from) / step + 1e-9));
  for (int k = 0; k <= count; ++k) {
    grid.push_back(AngleD::from_degrees(from + k * step));
  }
  return grid;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi >= lo) || count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad log-spaced grid");
  }
  if (count == 1) return {lo};
  std::vector<double> out;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) {
    out.push_back(k == count - 1 ? hi
                                 : std::pow(10.0, a + (b - a) * k / (count - 1)));
  }
  out.front() = lo;
  return out;
}

double absolute_error_deg(const AngleD& estimate, const AngleD& truth) {
  return std::abs((estimate - truth).degrees());
}

std::vector<SweepRow> run_angle_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.angle_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "angle grid is empty");
  }
  for (const auto& a : cfg.angle_grid) {
    if (!(std::abs(a.degrees()) < 90)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sweep angles must lie in (-90, 90) degrees");
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.angle_grid.size(); ++i) {
    const AngleD& angle = cfg.angle_grid[i];
    // Degrees survive the radian round trip only up to rounding.
    const double label = std::round(angle.degrees() * 1e9) / 1e9;
    sweep_point(cfg, angle, cfg.noise.sigma, label,
                mix_seed(cfg.master_seed, i), rows);
  }
  return rows;
}

std::vector<SweepRow> run_noise_sweep(const SweepConfig& cfg,
                                      std::span<const double> sigma_grid,
                                      const AngleD& angle) {
  cfg.validate();
  if (sigma_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sigma grid is empty");
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    NoiseSpec{sigma_grid[i], 0}.validate();
    sweep_point(cfg, angle, sigma_grid[i], sigma_grid[i],
                mix_seed(cfg.master_seed, i), rows);
  }
  return rows;
}

std::vector<PixelShift> square_shift_grid(double radius_px, double step_px) {
  if (!(radius_px >= 0) || !(step_px > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad shift grid");
  }
  const auto n = static_cast<int>(std::floor(radius_px / step_px + 1e-9));
  std::vector<PixelShift> grid;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) grid.push_back({i * step_px, j * step_px});
  }
  return grid;
}

std::vector<ShiftCell> run_shift_sensitivity(const CorrespondenceD& base,
                                             const AngleD& true_angle,
                                             std::span<const PixelShift> shifts,
                                             double pixel_scale) {
  if (!(pixel_scale > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel_scale must be positive");
  }
  std::vector<ShiftCell> cells;
  cells.reserve(shifts.size());
  for (const auto& s : shifts) {
    CorrespondenceD moved = base;
    moved.second.x += s.dx * pixel_scale;
    moved.second.y += s.dy * pixel_scale;
    ShiftCell cell{s, std::nullopt, std::nullopt};
    try {
      cell.angle = angle_from_correspondence(moved);
      cell.error_deg = absolute_error_deg(*cell.angle, true_angle);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateCorrespondence) throw;
    }
    cells.push_back(cell);
  }
  return cells;
}

ShiftFixture calibrated_shift_fixture() {
  const AngleD angle = AngleD::from_degrees(1);
  const double axis_distance = CylinderSpec{}.axis_distance;
  const ScenePoint p(50, 40, axis_distance);
  const std::vector<ScenePoint> moved =
      rotate_about_axis(std::span(&p, 1), angle, axis_distance);
  return {{project(p), project(moved.front())}, angle};
}

std::vector<ConditioningPoint> run_conditioning_map(const LatticeSpec& spec,
                                                    const AngleD& alpha,
                                                    const NoiseSpec& noise,
                                                    int repeats,
                                                    double discard_below_deg,
                                                    unsigned threads) {
  noise.validate();
  if (repeats < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  }
  const std::vector<ScenePoint> points = make_lattice(spec);
  const std::vector<ScenePoint> rotated =
      rotate_about_axis(points, alpha, spec.center_distance);

  std::vector<double> mean_error(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const NormalizedPoint<double> q = project(points[i]);
    const NormalizedPoint<double> qp = project(rotated[i]);
    std::mt19937_64 rng(mix_seed(noise.rng_seed, i));
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    auto jitter = [&]() { return noise.sigma > 0 ? gauss(rng) : 0.0; };
    double sum = 0;
    for (int r = 0; r < repeats; ++r) {
      CorrespondenceD c{q, qp};
      c.first.x += jitter();
      c.first.y += jitter();
      c.second.x += jitter();
      c.second.y += jitter();
      try {
        sum += absolute_error_deg(angle_from_correspondence(c), alpha);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateCorrespondence) throw;
        sum += 180.0;
      }
    }
    mean_error[i] = sum / repeats;
  });

  std::vector<ConditioningPoint> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (mean_error[i] >= discard_below_deg) {
      kept.push_back({points[i], mean_error[i]});
    }
  }
  return kept;
}

}  // namespace axirot
