// axirot: estimate the axial rotation angle between two views from point
// correspondences, and run the synthetic studies.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "axirot/estimators.hpp"
#include "axirot/experiments.hpp"
#include "axirot/io.hpp"
#include "axirot/synthetic.hpp"

namespace {

using namespace axirot;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string output;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool output_required) {
  cmd->add_option("-c,--config", opts.config_path,
                  "key=value configuration file");
  cmd->add_option("--set", opts.overrides,
                  "override a configuration key (key=value), repeatable");
  cmd->add_option("--seed", opts.seed,
                  "master seed (default: $AXIROT_SEED, else 0)");
  auto* out = cmd->add_option("-o,--output", opts.output, "output file");
  if (output_required) out->required();
  cmd->add_option("-j,--threads", opts.threads,
                  "worker threads (does not change results)")
      ->check(CLI::PositiveNumber);
}

// Config file, then --set overrides, then the seed from flag or environment.
KeyValueConfig load_config(const CommonOptions& opts) {
  KeyValueConfig kv = opts.config_path.empty()
                          ? KeyValueConfig{}
                          : KeyValueConfig::load(opts.config_path);
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kInvalidConfig,
                  "--set expects key=value, got '" + item + "'");
    }
    kv.set(item.substr(0, eq), item.substr(eq + 1));
  }
  if (opts.seed) {
    kv.set("seed", std::to_string(*opts.seed));
  } else if (!kv.contains("seed")) {
    if (const char* env = std::getenv(kSeedEnvironmentVariable.data())) {
      kv.set("seed", env);
    }
  }
  return kv;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void write_sidecar(const std::string& output, const std::string& command,
                   const KeyValueConfig& kv, const Metadata& extra = {}) {
  Metadata meta{{"version", std::string(kVersion)}, {"command", command}};
  for (const auto& entry : kv.effective()) meta.push_back(entry);
  for (const auto& entry : extra) meta.push_back(entry);
  std::ofstream out = open_output(output + ".meta");
  write_metadata(out, meta);
}

int cmd_estimate(const CommonOptions& opts, const std::string& input,
                 const std::optional<std::string>& method,
                 const std::optional<std::string>& units) {
  KeyValueConfig kv = load_config(opts);
  if (method) kv.set("method", *method);
  if (units) kv.set("units", *units);
  const RunConfig cfg = run_config_from(kv);
  RansacConfig ransac = cfg.ransac;
  ransac.rng_seed = kv.get_seed("seed", 0);
  kv.require_all_used();

  const std::vector<CorrespondenceD> corrs = parse_correspondences(input);
  bool any_usable = false;
  for (const auto& c : corrs) {
    try {
      angle_from_correspondence(c);
      any_usable = true;
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateCorrespondence) throw;
    }
  }
  if (!any_usable) {
    throw Error(ErrorCode::kDegenerateCorrespondence,
                "every correspondence is degenerate (u = v = 0)");
  }

  std::vector<EstimatorMethod> methods;
  if (cfg.method == "ransac" || cfg.method == "all") {
    methods.push_back(EstimatorMethod::kRansac);
  }
  if (cfg.method == "histogram" || cfg.method == "all") {
    methods.push_back(EstimatorMethod::kHistogram);
  }
  if (cfg.method == "median" || cfg.method == "all") {
    methods.push_back(EstimatorMethod::kMedian);
  }

  std::optional<std::ofstream> file;
  if (!opts.output.empty()) file = open_output(opts.output);
  std::ostream& out = file ? *file : std::cout;

  const bool several = methods.size() > 1;
  int status = kExitSuccess;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (k > 0) out << '\n';
    try {
      EstimateResult r;
      switch (methods[k]) {
        case EstimatorMethod::kRansac:
          r = ransac_estimate(corrs, ransac);
          break;
        case EstimatorMethod::kHistogram:
          r = histogram_estimate(corrs, cfg.histogram);
          break;
        case EstimatorMethod::kMedian:
          r = median_estimate(corrs);
          break;
      }
      write_estimate_report(out, r, cfg.radians);
      if (several) out << "status=ok\n";
    } catch (const Error& e) {
      if (!several) throw;
      out << "method=" << method_name(methods[k]) << '\n'
          << "status=" << ErrorCodeName(e.code()) << '\n';
      std::cerr << "axirot: " << method_name(methods[k]) << ": "
                << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
      if (status == kExitSuccess) status = exit_code_for(e.code());
    }
  }
  return status;
}

int cmd_synth(const CommonOptions& opts) {
  KeyValueConfig kv = load_config(opts);
  const SweepConfig base = default_sweep_config();
  CylinderSpec scene;
  scene.axis_distance = kv.get_real("axis_distance", base.scene.axis_distance);
  scene.height = kv.get_real("cylinder_height", base.scene.height);
  scene.radius = kv.get_real("cylinder_radius", base.scene.radius);
  const auto inliers = kv.get_int("inliers", base.inlier_count);
  const auto outliers = kv.get_int("outliers", base.outlier_count);
  const double sigma = kv.get_real("noise_sigma", base.noise.sigma);
  const AngleD angle = AngleD::from_degrees(kv.get_real("angle_deg", 30.0));
  const std::uint64_t seed = kv.get_seed("seed", 0);
  kv.require_all_used();

  if (inliers < 0 || outliers < 0) {
    throw Error(ErrorCode::kInvalidArgument, "counts must be nonnegative");
  }
  scene.point_count = static_cast<int>(inliers + outliers);
  const std::vector<ScenePoint> points =
      sample_cylinder(scene, mix_seed(seed, 0));
  const CorrespondenceSet set =
      generate_pair(points, angle, scene.axis_distance,
                    NoiseSpec{sigma, mix_seed(seed, 1)},
                    static_cast<int>(outliers));

  std::ofstream out = open_output(opts.output);
  write_correspondences(out, set.pairs);

  std::string flags;
  for (std::size_t i = 0; i < set.inlier_flags.size(); ++i) {
    if (i > 0) flags += ',';
    flags += set.inlier_flags[i] ? '1' : '0';
  }
  write_sidecar(opts.output, "synth", kv,
                {{"ground_truth_angle_deg",
                  format_real(std::round(angle.degrees() * 1e9) / 1e9)},
                 {"ground_truth_angle_rad", format_real(angle.radians())},
                 {"inlier_flags", flags}});
  return kExitSuccess;
}

int cmd_sweep(const CommonOptions& opts) {
  KeyValueConfig kv = load_config(opts);
  SweepConfig cfg = sweep_config_from(kv, default_sweep_config());
  cfg.master_seed = kv.get_seed("seed", 0);
  cfg.threads = opts.threads;
  kv.require_all_used();

  const std::vector<SweepRow> rows = run_angle_sweep(cfg);
  std::ofstream out = open_output(opts.output);
  write_sweep_table(out, rows);
  write_sidecar(opts.output, "sweep", kv);
  return kExitSuccess;
}

int cmd_noise(const CommonOptions& opts) {
  KeyValueConfig kv = load_config(opts);
  SweepConfig cfg = sweep_config_from(kv, default_noise_sweep_config());
  cfg.master_seed = kv.get_seed("seed", 0);
  cfg.threads = opts.threads;
  const AngleD angle = AngleD::from_degrees(kv.get_real("angle_deg", 30.0));
  const double lo = kv.get_real("sigma_min", 1e-6);
  const double hi = kv.get_real("sigma_max", 1e-3);
  const auto count = kv.get_int("sigma_count", 10);
  kv.require_all_used();

  const std::vector<double> sigmas =
      log_spaced(lo, hi, static_cast<int>(count));
  const std::vector<SweepRow> rows = run_noise_sweep(cfg, sigmas, angle);
  std::ofstream out = open_output(opts.output);
  write_sweep_table(out, rows);
  write_sidecar(opts.output, "noise", kv);
  return kExitSuccess;
}

int cmd_condmap(const CommonOptions& opts) {
  KeyValueConfig kv = load_config(opts);
  LatticeSpec spec;
  spec.side = kv.get_real("lattice_side", spec.side);
  spec.center_distance = kv.get_real("lattice_distance", spec.center_distance);
  spec.points_per_edge = static_cast<int>(
      kv.get_int("lattice_points_per_edge", spec.points_per_edge));
  const AngleD angle = AngleD::from_degrees(kv.get_real("angle_deg", 21.0));
  const double sigma = kv.get_real("noise_sigma", 0.004);
  const auto repeats = kv.get_int("repeats", 100);
  const double discard = kv.get_real("discard_below_deg", 60.0);
  const std::uint64_t seed = kv.get_seed("seed", 0);
  kv.require_all_used();

  const std::vector<ConditioningPoint> kept =
      run_conditioning_map(spec, angle, NoiseSpec{sigma, seed},
                           static_cast<int>(repeats), discard, opts.threads);
  std::ofstream out = open_output(opts.output);
  write_conditioning_table(out, kept);
  write_sidecar(opts.output, "condmap", kv,
                {{"retained_points", std::to_string(kept.size())}});
  return kExitSuccess;
}

int cmd_shift(const CommonOptions& opts) {
  KeyValueConfig kv = load_config(opts);
  const double pixel_scale = kv.get_real("pixel_scale", kDefaultPixelScale);
  const double radius = kv.get_real("shift_radius_px", 5.0);
  const double step = kv.get_real("shift_step_px", 1.0);
  kv.require_all_used();

  const ShiftFixture fixture = calibrated_shift_fixture();
  const std::vector<PixelShift> grid = square_shift_grid(radius, step);
  const std::vector<ShiftCell> cells = run_shift_sensitivity(
      fixture.pair, fixture.angle, grid, pixel_scale);
  std::ofstream out = open_output(opts.output);
  write_shift_table(out, cells);
  write_sidecar(
      opts.output, "shift", kv,
      {{"base_x", format_real(fixture.pair.first.x)},
       {"base_y", format_real(fixture.pair.first.y)},
       {"base_x_prime", format_real(fixture.pair.second.x)},
       {"base_y_prime", format_real(fixture.pair.second.y)},
       {"true_angle_deg",
        format_real(std::round(fixture.angle.degrees() * 1e9) / 1e9)}});
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axial rotation angle estimation from point correspondences"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string input;
  std::optional<std::string> method;
  std::optional<std::string> units;

  auto* estimate = app.add_subcommand(
      "estimate", "estimate the rotation angle from a correspondence file");
  estimate->add_option("correspondences", input, "x,y,x_prime,y_prime file")
      ->required();
  estimate->add_option("-m,--method", method, "ransac|histogram|median|all");
  estimate->add_option("-u,--units", units, "deg (default) or rad");
  add_common(estimate, opts, false);

  auto* synth = app.add_subcommand(
      "synth", "write a synthetic correspondence file and its ground truth");
  add_common(synth, opts, true);
  auto* sweep = app.add_subcommand(
      "sweep", "estimator error against rotation angle");
  add_common(sweep, opts, true);
  auto* noise = app.add_subcommand(
      "noise", "estimator error against detection noise");
  add_common(noise, opts, true);
  auto* condmap = app.add_subcommand(
      "condmap", "ill-conditioned lattice points of the angle equation");
  add_common(condmap, opts, true);
  auto* shift = app.add_subcommand(
      "shift", "angle sensitivity to shifting one image point");
  add_common(shift, opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(opts, input, method, units);
    if (synth->parsed()) return cmd_synth(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (noise->parsed()) return cmd_noise(opts);
    if (condmap->parsed()) return cmd_condmap(opts);
    if (shift->parsed()) return cmd_shift(opts);
  } catch (const Error& e) {
    std::cerr << "axirot: " << ErrorCodeName(e.code()) << ": " << e.what()
              << '\n';
    return exit_code_for(e.code());
  }
  return kExitInputError;
}
