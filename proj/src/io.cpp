#include "axirot/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace axirot {
namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_real(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  return in;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoConsensus: return kExitNoConsensus;
    case ErrorCode::kNoPeak: return kExitNoPeak;
    case ErrorCode::kDegenerateCorrespondence:
    case ErrorCode::kUndefinedDistance:
      return kExitDegenerate;
    default:
      return kExitInputError;
  }
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<CorrespondenceD> parse_correspondences(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) {
    throw Error(ErrorCode::kEmptyFile, "correspondence file is empty");
  }
  if (lines.front() != kCorrespondenceHeader) {
    throw Error(ErrorCode::kMalformed, 1,
                "line 1: expected header '" +
                    std::string(kCorrespondenceHeader) + "'");
  }
  if (lines.size() == 1) {
    throw Error(ErrorCode::kEmptyFile, "correspondence file has no data rows");
  }

  std::vector<CorrespondenceD> pairs;
  pairs.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::kMalformed, line_no,
                  "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      if (!parse_real(fields[k], v[k])) {
        throw Error(ErrorCode::kMalformed, line_no,
                    "line " + std::to_string(line_no) +
                        ": non-numeric field '" + fields[k] + "'");
      }
    }
    pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return pairs;
}

std::vector<CorrespondenceD> parse_correspondences(
    const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_correspondences(in);
}

void write_correspondences(std::ostream& out,
                           std::span<const CorrespondenceD> pairs) {
  out << kCorrespondenceHeader << '\n';
  for (const auto& c : pairs) {
    out << format_real(c.first.x) << ',' << format_real(c.first.y) << ','
        << format_real(c.second.x) << ',' << format_real(c.second.y) << '\n';
  }
}

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_real(r.parameter_value) << ',' << method_name(r.method)
        << ',' << format_real(r.mean_absolute_error_deg) << ','
        << r.failure_count << ',' << r.trials << '\n';
  }
}

void write_conditioning_table(std::ostream& out,
                              std::span<const ConditioningPoint> points) {
  out << "x,y,z,mean_error_deg\n";
  for (const auto& p : points) {
    out << format_real(p.position.x()) << ',' << format_real(p.position.y())
        << ',' << format_real(p.position.z()) << ','
        << format_real(p.mean_error_deg) << '\n';
  }
}

void write_shift_table(std::ostream& out, std::span<const ShiftCell> cells) {
  out << "dx_px,dy_px,angle_deg,error_deg\n";
  for (const auto& c : cells) {
    out << format_real(c.shift.dx) << ',' << format_real(c.shift.dy) << ',';
    if (c.angle) {
      out << format_real(c.angle->degrees()) << ','
          << format_real(*c.error_deg);
    } else {
      out << "undefined,undefined";
    }
    out << '\n';
  }
}

std::string format_angle(const AngleD& angle, bool radians) {
  return radians ? format_fixed(angle.radians(), 9)
                 : format_fixed(angle.degrees(), 6);
}

void write_estimate_report(std::ostream& out, const EstimateResult& result,
                           bool radians) {
  out << "method=" << method_name(result.method) << '\n';
  out << (radians ? "angle_rad=" : "angle_deg=")
      << format_angle(result.angle, radians) << '\n';
  out << "inlier_indices=";
  for (std::size_t k = 0; k < result.inlier_indices.size(); ++k) {
    if (k > 0) out << ',';
    out << result.inlier_indices[k];
  }
  out << '\n';
  out << "mean_squared_residual=" << format_real(result.mean_squared_residual)
      << '\n';
  out << "iterations=" << result.iterations_run << '\n';
  out << "iterations_truncated="
      << (result.iterations_truncated ? "true" : "false") << '\n';
}

void write_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << key << '=' << value << '\n';
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, line_no,
                  "config line " + std::to_string(line_no) +
                      ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidConfig, line_no,
                  "config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse(in);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool KeyValueConfig::contains(const std::string& key) const {
  return values_.count(key) > 0;
}

double KeyValueConfig::get_real(const std::string& key,
                                double fallback) const {
  double value = fallback;
  if (const auto it = values_.find(key); it != values_.end()) {
    if (!parse_real(it->second, value)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "config key '" + key + "' is not a finite real");
    }
  }
  effective_[key] = format_real(value);
  return value;
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t fallback) const {
  std::int64_t value = fallback;
  if (const auto it = values_.find(key); it != values_.end()) {
    const std::string_view text = trim(it->second);
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidConfig,
                  "config key '" + key + "' is not an integer");
    }
  }
  effective_[key] = std::to_string(value);
  return value;
}

std::uint64_t KeyValueConfig::get_seed(const std::string& key,
                                       std::uint64_t fallback) const {
  std::uint64_t value = fallback;
  if (const auto it = values_.find(key); it != values_.end()) {
    const std::string_view text = trim(it->second);
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidConfig,
                  "config key '" + key + "' is not an unsigned 64-bit seed");
    }
  }
  effective_[key] = std::to_string(value);
  return value;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  std::string value = it != values_.end() ? it->second : fallback;
  effective_[key] = value;
  return value;
}

void KeyValueConfig::require_all_used() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (effective_.count(key) == 0) {
      unknown += unknown.empty() ? key : ", " + key;
    }
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown config keys: " + unknown);
  }
}

Metadata KeyValueConfig::effective() const {
  return Metadata(effective_.begin(), effective_.end());
}

RansacConfig ransac_config_from(const KeyValueConfig& kv,
                                const RansacConfig& base) {
  RansacConfig cfg = base;
  cfg.success_probability =
      kv.get_real("success_probability", base.success_probability);
  cfg.outlier_fraction = kv.get_real("outlier_fraction", base.outlier_fraction);
  cfg.sampson_threshold =
      kv.get_real("sampson_threshold", base.sampson_threshold);
  cfg.min_inlier_fraction =
      kv.get_real("min_inlier_fraction", base.min_inlier_fraction);
  cfg.max_iterations_cap = kv.get_int("max_iterations", base.max_iterations_cap);
  cfg.validate();
  return cfg;
}

HistogramConfig histogram_config_from(const KeyValueConfig& kv,
                                      const HistogramConfig& base) {
  HistogramConfig cfg = base;
  cfg.range_min = AngleD::from_degrees(
      kv.get_real("histogram_min_deg", base.range_min.degrees()));
  cfg.range_max = AngleD::from_degrees(
      kv.get_real("histogram_max_deg", base.range_max.degrees()));
  cfg.bin_width = AngleD::from_degrees(
      kv.get_real("histogram_bin_deg", base.bin_width.degrees()));
  cfg.min_peak_count = static_cast<int>(
      kv.get_int("histogram_min_peak", base.min_peak_count));
  cfg.validate();
  return cfg;
}

RunConfig run_config_from(const KeyValueConfig& kv) {
  RunConfig cfg;
  cfg.method = kv.get_string("method", cfg.method);
  if (cfg.method != "ransac" && cfg.method != "histogram" &&
      cfg.method != "median" && cfg.method != "all") {
    throw Error(ErrorCode::kInvalidConfig,
                "method must be ransac, histogram, median or all");
  }
  const std::string units = kv.get_string("units", "deg");
  if (units != "deg" && units != "rad") {
    throw Error(ErrorCode::kInvalidConfig, "units must be deg or rad");
  }
  cfg.radians = units == "rad";
  cfg.ransac = ransac_config_from(kv, cfg.ransac);
  cfg.histogram = histogram_config_from(kv, cfg.histogram);
  return cfg;
}

SweepConfig sweep_config_from(const KeyValueConfig& kv,
                              const SweepConfig& base) {
  SweepConfig cfg = base;
  cfg.scene.axis_distance = kv.get_real("axis_distance", base.scene.axis_distance);
  cfg.scene.height = kv.get_real("cylinder_height", base.scene.height);
  cfg.scene.radius = kv.get_real("cylinder_radius", base.scene.radius);
  cfg.noise.sigma = kv.get_real("noise_sigma", base.noise.sigma);
  cfg.inlier_count = static_cast<int>(kv.get_int("inliers", base.inlier_count));
  cfg.outlier_count =
      static_cast<int>(kv.get_int("outliers", base.outlier_count));
  cfg.trials_per_angle =
      static_cast<int>(kv.get_int("trials", base.trials_per_angle));
  cfg.ransac = ransac_config_from(kv, base.ransac);
  cfg.histogram = histogram_config_from(kv, base.histogram);

  auto grid_end = [&](bool front, double fallback) {
    if (base.angle_grid.empty()) return fallback;
    const AngleD& a = front ? base.angle_grid.front() : base.angle_grid.back();
    return std::round(a.degrees() * 1e9) / 1e9;
  };
  const double from = kv.get_real("angle_from_deg", grid_end(true, -80.0));
  const double to = kv.get_real("angle_to_deg", grid_end(false, 80.0));
  const double step = kv.get_real("angle_step_deg", 5.0);
  cfg.angle_grid = angle_grid_degrees(from, to, step);
  cfg.validate();
  return cfg;
}

}  // namespace axirot
