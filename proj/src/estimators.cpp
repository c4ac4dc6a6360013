#include "axirot/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace axirot {
namespace {

constexpr double kInitialHalfBracket = 5.0 * kPi<double> / 180.0;
constexpr double kRootTolerance = 1e-12;

struct Moments {
  double uu = 0;
  double uv = 0;
  double vv = 0;
};

Moments accumulate_moments(std::span<const CorrespondenceD> corrs) {
  Moments m;
  for (const auto& c : corrs) {
    const auto [u, v] = motion_terms(c);
    m.uu += u * u;
    m.uv += u * v;
    m.vv += v * v;
  }
  return m;
}

// d/da of sum_i (cos(a/2) u_i - sin(a/2) v_i)^2, up to a positive factor.
double objective_slope(const Moments& m, double a) {
  return (m.vv - m.uu) * std::sin(a) - 2 * m.uv * std::cos(a);
}

// Slope goes from negative at lo to positive at hi.
double bisect_minimum(const Moments& m, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > kRootTolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double slope = objective_slope(m, mid);
    if (slope == 0) return mid;
    (slope < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Over a full period the objective is a single sinusoid in a, so scanning
// sub-intervals for a -/+ slope change finds its unique minimum.
std::optional<double> scan_full_period(const Moments& m, double center) {
  constexpr int kSegments = 64;
  const double lo = center - kPi<double>;
  const double step = 2 * kPi<double> / kSegments;
  for (int k = 0; k < kSegments; ++k) {
    const double a = lo + k * step;
    const double b = a + step;
    if (objective_slope(m, a) < 0 && objective_slope(m, b) >= 0) {
      return bisect_minimum(m, a, b);
    }
  }
  return std::nullopt;
}

double minimize_in_bracket(const Moments& m, double initial) {
  double center = initial;
  double half = kInitialHalfBracket;
  while (half < kPi<double>) {
    const double lo = center - half;
    const double hi = center + half;
    const double slope_lo = objective_slope(m, lo);
    const double slope_hi = objective_slope(m, hi);
    if (slope_lo < 0 && slope_hi > 0) return bisect_minimum(m, lo, hi);
    if (slope_lo >= 0 && slope_hi <= 0) break;
    // Minimizer sits on an endpoint: recenter there and widen.
    center = slope_lo >= 0 ? lo : hi;
    half *= 2;
  }
  return scan_full_period(m, initial).value_or(initial);
}

void require_non_empty(std::span<const CorrespondenceD> corrs) {
  if (corrs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no correspondences given");
  }
}

std::optional<AngleD> try_angle(const CorrespondenceD& c) {
  try {
    return angle_from_correspondence(c);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateCorrespondence) return std::nullopt;
    throw;
  }
}

}  // namespace

std::string_view method_name(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::kRansac: return "ransac";
    case EstimatorMethod::kHistogram: return "histogram";
    case EstimatorMethod::kMedian: return "median";
  }
  return "unknown";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void RansacConfig::validate() const {
  if (!(success_probability > 0 && success_probability < 1)) {
    throw Error(ErrorCode::kInvalidProbability,
                "success_probability must lie in (0, 1)");
  }
  if (!(outlier_fraction >= 0 && outlier_fraction < 1)) {
    throw Error(ErrorCode::kInvalidProbability,
                "outlier_fraction must lie in [0, 1)");
  }
  if (sample_size != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample_size must be 1");
  }
  if (!(sampson_threshold > 0) || !std::isfinite(sampson_threshold)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sampson_threshold must be positive");
  }
  if (!(min_inlier_fraction > 0 && min_inlier_fraction <= 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_inlier_fraction must lie in (0, 1]");
  }
  if (max_iterations_cap <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_iterations_cap must be positive");
  }
}

void HistogramConfig::validate() const {
  const double span = range_max.radians() - range_min.radians();
  const double w = bin_width.radians();
  if (!(span > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram range_min must be below range_max");
  }
  if (!(w > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram bin_width must be positive");
  }
  const double ratio = span / w;
  if (ratio < 1 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram bin_width must divide the range into >= 2 bins");
  }
  if (min_peak_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_peak_count must be >= 1");
  }
}

int HistogramConfig::bin_count() const {
  return static_cast<int>(std::lround(
             (range_max.radians() - range_min.radians()) /
             bin_width.radians())) +
         1;
}

double HistogramConfig::bin_center_radians(int bin) const {
  return range_min.radians() + bin * bin_width.radians();
}

int HistogramConfig::bin_of(const AngleD& angle) const {
  // The slack keeps angles on a decimal bin edge, such as 0.5 deg, in the
  // upper bin despite rounding in the degree-radian conversion.
  const double k = std::floor(
      (angle.radians() - range_min.radians()) / bin_width.radians() + 0.5 +
      1e-9);
  if (k < 0 || k >= bin_count()) return -1;
  return static_cast<int>(k);
}

std::int64_t required_iterations(double p, double epsilon, int n) {
  if (!(p > 0 && p < 1) || !(epsilon >= 0 && epsilon < 1) || n < 1) {
    throw Error(ErrorCode::kInvalidProbability,
                "required_iterations needs 0 < p < 1, 0 <= eps < 1, n >= 1");
  }
  if (epsilon == 0) return 1;
  const double clean_sample = std::pow(1 - epsilon, n);
  const double denom = std::log1p(-clean_sample);
  if (denom == 0) return std::numeric_limits<std::int64_t>::max();
  const double ratio = std::log1p(-p) / denom;
  // Keep ratios that are integers up to rounding from being pushed up by one.
  const double n_iter = std::ceil(ratio * (1 - 1e-12));
  if (n_iter >= 9.2e18) return std::numeric_limits<std::int64_t>::max();
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(n_iter));
}

double mean_squared_epipolar_residual(std::span<const CorrespondenceD> corrs,
                                      std::span<const std::size_t> indices,
                                      const AngleD& angle) {
  if (indices.empty()) return 0;
  double sum = 0;
  for (std::size_t i : indices) {
    const double r = epipolar_residual_closed_form(corrs[i], angle);
    sum += r * r;
  }
  return sum / static_cast<double>(indices.size());
}

double unit_baseline_objective(std::span<const CorrespondenceD> corrs,
                               const AngleD& angle) {
  require_non_empty(corrs);
  const double h = angle.radians() / 2;
  const double ch = std::cos(h);
  const double sh = std::sin(h);
  double sum = 0;
  for (const auto& c : corrs) {
    const auto [u, v] = motion_terms(c);
    const double r = ch * u - sh * v;
    sum += r * r;
  }
  return sum / static_cast<double>(corrs.size());
}

RefinedAngle refine_angle_ls(std::span<const CorrespondenceD> corrs,
                             const AngleD& initial) {
  require_non_empty(corrs);
  const Moments m = accumulate_moments(corrs);
  const AngleD angle =
      AngleD::from_radians(minimize_in_bracket(m, initial.radians()));
  double sum = 0;
  for (const auto& c : corrs) {
    const double r = epipolar_residual_closed_form(c, angle);
    sum += r * r;
  }
  return {angle, sum / static_cast<double>(corrs.size())};
}

EstimateResult ransac_estimate(std::span<const CorrespondenceD> corrs,
                               const RansacConfig& cfg) {
  require_non_empty(corrs);
  cfg.validate();

  const std::int64_t required = required_iterations(
      cfg.success_probability, cfg.outlier_fraction, cfg.sample_size);
  const std::int64_t iterations = std::min(required, cfg.max_iterations_cap);
  const std::size_t n = corrs.size();

  std::optional<EstimateResult> best;
  std::vector<std::size_t> inliers;
  std::vector<CorrespondenceD> consensus;
  inliers.reserve(n);
  consensus.reserve(n);

  for (std::int64_t it = 0; it < iterations; ++it) {
    std::mt19937_64 rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(it)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::optional<AngleD> hypothesis = try_angle(corrs[pick(rng)]);
    // A degenerate draw still counts as an iteration.
    if (!hypothesis) continue;

    const Matrix3<double> e = unit_baseline_essential(*hypothesis);
    inliers.clear();
    consensus.clear();
    for (std::size_t j = 0; j < n; ++j) {
      double d;
      try {
        d = sampson_distance(corrs[j], e);
      } catch (const Error&) {
        continue;
      }
      if (d <= cfg.sampson_threshold) {
        inliers.push_back(j);
        consensus.push_back(corrs[j]);
      }
    }
    const double fraction =
        static_cast<double>(inliers.size()) / static_cast<double>(n);
    if (inliers.empty() || fraction < cfg.min_inlier_fraction - 1e-12) {
      continue;
    }

    // Smallest mean residual over the model's own inliers wins; ties keep
    // the earlier model.
    const RefinedAngle refined = refine_angle_ls(consensus, *hypothesis);
    if (!best || refined.mean_squared_residual < best->mean_squared_residual) {
      best = EstimateResult{refined.angle, inliers,
                            refined.mean_squared_residual, 0, false,
                            EstimatorMethod::kRansac};
    }
  }

  if (!best) {
    throw Error(ErrorCode::kNoConsensus,
                "RANSAC found no valid consensus in " +
                    std::to_string(iterations) + " iterations");
  }
  best->iterations_run = iterations;
  best->iterations_truncated = required > cfg.max_iterations_cap;
  return *best;
}

EstimateResult histogram_estimate(std::span<const CorrespondenceD> corrs,
                                  const HistogramConfig& cfg) {
  require_non_empty(corrs);
  cfg.validate();

  const int bins = cfg.bin_count();
  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const std::optional<AngleD> angle = try_angle(corrs[i]);
    if (!angle) continue;
    const int b = cfg.bin_of(*angle);
    if (b >= 0) members[b].push_back(i);
  }

  int peak = 0;
  for (int b = 1; b < bins; ++b) {
    const std::size_t count = members[b].size();
    const std::size_t best_count = members[peak].size();
    if (count > best_count ||
        (count == best_count && std::abs(cfg.bin_center_radians(b)) <
                                    std::abs(cfg.bin_center_radians(peak)))) {
      peak = b;
    }
  }
  if (static_cast<int>(members[peak].size()) < cfg.min_peak_count) {
    throw Error(ErrorCode::kNoPeak,
                "histogram has no bin with at least " +
                    std::to_string(cfg.min_peak_count) + " angles");
  }

  std::vector<CorrespondenceD> peak_pairs;
  peak_pairs.reserve(members[peak].size());
  for (std::size_t i : members[peak]) peak_pairs.push_back(corrs[i]);
  const RefinedAngle refined = refine_angle_ls(
      peak_pairs, AngleD::from_radians(cfg.bin_center_radians(peak)));

  return EstimateResult{refined.angle, std::move(members[peak]),
                        refined.mean_squared_residual, 0, false,
                        EstimatorMethod::kHistogram};
}

EstimateResult median_estimate(std::span<const CorrespondenceD> corrs) {
  require_non_empty(corrs);
  std::vector<double> angles;
  angles.reserve(corrs.size());
  for (const auto& c : corrs) {
    if (const auto a = try_angle(c)) angles.push_back(a->radians());
  }
  if (angles.empty()) {
    throw Error(ErrorCode::kEmptyInput, "every correspondence is degenerate");
  }
  std::sort(angles.begin(), angles.end());
  const std::size_t mid = angles.size() / 2;
  const double median = angles.size() % 2 == 1
                            ? angles[mid]
                            : 0.5 * (angles[mid - 1] + angles[mid]);
  return EstimateResult{AngleD::from_radians(median), {}, 0, 0, false,
                        EstimatorMethod::kMedian};
}

}  // namespace axirot
