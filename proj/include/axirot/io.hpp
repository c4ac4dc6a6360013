#ifndef AXIROT_IO_HPP
#define AXIROT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axirot/estimators.hpp"
#include "axirot/experiments.hpp"

namespace axirot {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kCorrespondenceHeader = "x,y,x_prime,y_prime";
inline constexpr std::string_view kSweepHeader =
    "parameter,method,mae_deg,failures,trials";
inline constexpr std::string_view kSeedEnvironmentVariable = "AXIROT_SEED";

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitInputError = 2,
  kExitNoConsensus = 3,
  kExitNoPeak = 4,
  kExitDegenerate = 5,
};

int exit_code_for(ErrorCode code);

// Shortest round-trippable decimal form ("%.17g").
std::string format_real(double value);

// Correspondence files: UTF-8, LF, header `x,y,x_prime,y_prime`, then one
// row of four decimal reals per correspondence in normalized coordinates.
// Errors: kMalformed with the 1-based line number, kEmptyFile when there is
// no data row, kIo when the file cannot be opened.
std::vector<CorrespondenceD> parse_correspondences(std::istream& in);
std::vector<CorrespondenceD> parse_correspondences(
    const std::filesystem::path& path);

void write_correspondences(std::ostream& out,
                           std::span<const CorrespondenceD> pairs);

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows);
void write_conditioning_table(std::ostream& out,
                              std::span<const ConditioningPoint> points);
void write_shift_table(std::ostream& out, std::span<const ShiftCell> cells);

// Angle in degrees with 6 decimals, or radians with 9.
std::string format_angle(const AngleD& angle, bool radians);

void write_estimate_report(std::ostream& out, const EstimateResult& result,
                           bool radians);

using Metadata = std::vector<std::pair<std::string, std::string>>;

// One `key=value` per line, in the given order.
void write_metadata(std::ostream& out, const Metadata& metadata);

// Flat `key=value` configuration document. Blank lines and lines starting
// with '#' are ignored. Every getter records the value it resolved (given
// or default) so the effective configuration can be echoed afterwards.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const;

  double get_real(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_seed(const std::string& key,
                         std::uint64_t fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;

  // Throws kInvalidConfig naming any key that no getter asked for.
  void require_all_used() const;

  // Resolved values, sorted by key.
  Metadata effective() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> effective_;
};

struct RunConfig {
  // ransac, histogram, median or all.
  std::string method = "ransac";
  bool radians = false;
  RansacConfig ransac;
  HistogramConfig histogram;
};

RansacConfig ransac_config_from(const KeyValueConfig& kv,
                                const RansacConfig& base);
HistogramConfig histogram_config_from(const KeyValueConfig& kv,
                                      const HistogramConfig& base);
RunConfig run_config_from(const KeyValueConfig& kv);

// Scene, noise, counts, trials and estimator settings; the angle grid is
// built from angle_from_deg / angle_to_deg / angle_step_deg.
SweepConfig sweep_config_from(const KeyValueConfig& kv,
                              const SweepConfig& base);

}  // namespace axirot

#endif  // AXIROT_IO_HPP
