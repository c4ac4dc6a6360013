#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "axirot/experiments.hpp"

namespace axirot {
namespace {

bool same_rows(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i].parameter_value, &b[i].parameter_value,
                    sizeof(double)) != 0 ||
        std::memcmp(&a[i].mean_absolute_error_deg,
                    &b[i].mean_absolute_error_deg, sizeof(double)) != 0 ||
        a[i].method != b[i].method ||
        a[i].failure_count != b[i].failure_count ||
        a[i].trials != b[i].trials) {
      return false;
    }
  }
  return true;
}

TEST(Grids, AngleGridIsInclusive) {
  const auto grid = angle_grid_degrees(-80, 80, 5);
  ASSERT_EQ(grid.size(), 33u);
  EXPECT_NEAR(grid.front().degrees(), -80, 1e-12);
  EXPECT_NEAR(grid.back().degrees(), 80, 1e-12);
  EXPECT_THROW(angle_grid_degrees(0, 10, 0), Error);
}

TEST(Grids, LogSpaced) {
  const auto s = log_spaced(1e-6, 1e-3, 10);
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s.front(), 1e-6);
  EXPECT_EQ(s.back(), 1e-3);
  for (std::size_t i = 1; i < s.size(); ++i) {
    EXPECT_NEAR(s[i] / s[i - 1], std::pow(10.0, 1.0 / 3), 1e-12);
  }
  EXPECT_THROW(log_spaced(0, 1, 3), Error);
}

TEST(AbsoluteError, UsesWrappedDifference) {
  EXPECT_NEAR(absolute_error_deg(AngleD::from_degrees(179),
                                 AngleD::from_degrees(-179)),
              2, 1e-12);
}

TEST(AngleSweep, NoiselessDataIsExactForEveryMethod) {
  SweepConfig cfg = default_sweep_config();
  cfg.angle_grid = angle_grid_degrees(-80, 80, 20);
  cfg.noise.sigma = 0;
  cfg.outlier_count = 0;
  cfg.trials_per_angle = 5;
  const auto rows = run_angle_sweep(cfg);
  ASSERT_EQ(rows.size(), cfg.angle_grid.size() * 3);
  for (const auto& r : rows) {
    EXPECT_LT(r.mean_absolute_error_deg, 1e-6)
        << r.parameter_value << " " << method_name(r.method);
    EXPECT_EQ(r.failure_count, 0);
  }
}

TEST(AngleSweep, RowLayoutAndAccounting) {
  SweepConfig cfg = default_sweep_config();
  cfg.angle_grid = {AngleD::from_degrees(-10), AngleD::from_degrees(40)};
  cfg.trials_per_angle = 20;
  const auto rows = run_angle_sweep(cfg);
  ASSERT_EQ(rows.size(), 6u);
  const EstimatorMethod order[] = {EstimatorMethod::kRansac,
                                   EstimatorMethod::kHistogram,
                                   EstimatorMethod::kMedian};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].method, order[i % 3]);
    EXPECT_EQ(rows[i].parameter_value, i < 3 ? -10 : 40);
    EXPECT_EQ(rows[i].trials, 20);
    EXPECT_GE(rows[i].failure_count, 0);
    EXPECT_LE(rows[i].failure_count, rows[i].trials);
  }
}

TEST(AngleSweep, DeterministicAndThreadIndependent) {
  SweepConfig cfg = default_sweep_config();
  cfg.angle_grid = {AngleD::from_degrees(-55), AngleD::from_degrees(5)};
  cfg.trials_per_angle = 1;
  cfg.master_seed = 314;
  EXPECT_TRUE(same_rows(run_angle_sweep(cfg), run_angle_sweep(cfg)));

  cfg.trials_per_angle = 40;
  const auto serial = run_angle_sweep(cfg);
  cfg.threads = 4;
  EXPECT_TRUE(same_rows(serial, run_angle_sweep(cfg)));
  cfg.master_seed = 315;
  EXPECT_FALSE(same_rows(serial, run_angle_sweep(cfg)));
}

TEST(AngleSweep, RejectsAnglesOutsideWorkingRange) {
  SweepConfig cfg = default_sweep_config();
  cfg.angle_grid = {AngleD::from_degrees(90)};
  EXPECT_THROW(run_angle_sweep(cfg), Error);
  cfg.angle_grid.clear();
  EXPECT_THROW(run_angle_sweep(cfg), Error);
}

TEST(NoiseSweep, SmallAndZeroNoise) {
  SweepConfig cfg = default_noise_sweep_config();
  cfg.trials_per_angle = 50;
  const std::vector<double> sigmas{0.0, 1e-6};
  const auto rows = run_noise_sweep(cfg, sigmas);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT(rows[i].mean_absolute_error_deg, 1e-6);
    EXPECT_EQ(rows[i].failure_count, 0);
  }
  for (std::size_t i = 3; i < 6; ++i) {
    EXPECT_LT(rows[i].mean_absolute_error_deg, 0.01);
    EXPECT_EQ(rows[i].parameter_value, 1e-6);
  }
}

TEST(NoiseSweep, DefaultsFollowReferenceSetup) {
  const SweepConfig cfg = default_noise_sweep_config();
  EXPECT_EQ(cfg.inlier_count, 100);
  EXPECT_EQ(cfg.outlier_count, 0);
  EXPECT_EQ(cfg.trials_per_angle, 1000);
  EXPECT_EQ(cfg.ransac.sampson_threshold, 0.01);
  EXPECT_NEAR(kDefaultNoiseSweepAngle.degrees(), 30, 1e-12);
}

TEST(ShiftSensitivity, GridShape) {
  const auto grid = square_shift_grid(2, 1);
  ASSERT_EQ(grid.size(), 25u);
  EXPECT_EQ(grid.front().dx, -2);
  EXPECT_EQ(grid.front().dy, -2);
  EXPECT_EQ(grid[1].dx, -1);
  EXPECT_EQ(grid[1].dy, -2);
}

TEST(ShiftSensitivity, ZeroShiftReturnsTrueAngle) {
  const auto fixture = calibrated_shift_fixture();
  const std::vector<PixelShift> none{{0, 0}};
  const auto cells = run_shift_sensitivity(fixture.pair, fixture.angle, none,
                                           kDefaultPixelScale);
  ASSERT_TRUE(cells[0].angle.has_value());
  EXPECT_NEAR(cells[0].angle->degrees(), 1, 1e-9);
  EXPECT_LT(*cells[0].error_deg, 1e-9);
}

TEST(ShiftSensitivity, VerticalShiftsDominate) {
  const auto fixture = calibrated_shift_fixture();
  const std::vector<PixelShift> shifts{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const auto cells = run_shift_sensitivity(fixture.pair, fixture.angle, shifts,
                                           kDefaultPixelScale);
  EXPECT_LE(*cells[0].error_deg, 0.1);
  EXPECT_LE(*cells[1].error_deg, 0.1);
  EXPECT_GE(*cells[2].error_deg, 1.0);
  EXPECT_GE(*cells[3].error_deg, 1.0);
}

TEST(ShiftSensitivity, FixtureMovesAboutOnePixelVertically) {
  const auto fixture = calibrated_shift_fixture();
  const double dy_px =
      std::abs(fixture.pair.second.y - fixture.pair.first.y) /
      kDefaultPixelScale;
  EXPECT_GT(dy_px, 0.5);
  EXPECT_LT(dy_px, 1.75);
}

TEST(ShiftSensitivity, ScaleAndStepAreInterchangeable) {
  const auto fixture = calibrated_shift_fixture();
  const auto a = run_shift_sensitivity(fixture.pair, fixture.angle,
                                       square_shift_grid(4, 2), 1e-3);
  const auto b = run_shift_sensitivity(fixture.pair, fixture.angle,
                                       square_shift_grid(2, 1), 2e-3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].angle.has_value(), b[i].angle.has_value());
    if (a[i].angle) {
      EXPECT_NEAR(a[i].angle->radians(), b[i].angle->radians(), 1e-12);
    }
  }
}

TEST(ShiftSensitivity, DegenerateCellIsUndefined) {
  const CorrespondenceD base{{0.3, 0.0}, {0.3, 0.001}};
  const std::vector<PixelShift> shifts{{0, -1}, {0, 0}};
  const auto cells =
      run_shift_sensitivity(base, AngleD::from_degrees(1), shifts, 1e-3);
  EXPECT_FALSE(cells[0].angle.has_value());
  EXPECT_FALSE(cells[0].error_deg.has_value());
  EXPECT_TRUE(cells[1].angle.has_value());
}

TEST(ConditioningMap, NoiselessRetainsExactlyThePlanes) {
  const LatticeSpec spec;
  const auto alpha = AngleD::from_degrees(21);
  const auto kept =
      run_conditioning_map(spec, alpha, NoiseSpec{0, 0}, 1, 60.0);
  const double h = alpha.radians() / 2;
  std::size_t expected = 0;
  for (const auto& p : make_lattice(spec)) {
    const double a = p.x();
    const double b = p.z() - spec.center_distance;
    if (p.y() == 0 ||
        std::abs(a * std::cos(h) - b * std::sin(h)) < 1e-9) {
      ++expected;
    }
  }
  EXPECT_EQ(expected, 461u);
  EXPECT_EQ(kept.size(), expected);
  for (const auto& c : kept) {
    const double a = c.position.x();
    const double b = c.position.z() - spec.center_distance;
    EXPECT_TRUE(c.position.y() == 0 ||
                std::abs(a * std::cos(h) - b * std::sin(h)) < 1e-9);
    EXPECT_EQ(c.mean_error_deg, 180);
  }
}

TEST(ConditioningMap, DeterministicAndThreadIndependent) {
  const LatticeSpec spec{200, 200, 9};
  const auto alpha = AngleD::from_degrees(21);
  const NoiseSpec noise{0.004, 5};
  const auto a = run_conditioning_map(spec, alpha, noise, 1, 10.0, 1);
  const auto b = run_conditioning_map(spec, alpha, noise, 1, 10.0, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].position, b[i].position);
    EXPECT_EQ(a[i].mean_error_deg, b[i].mean_error_deg);
  }
}

TEST(ConditioningMap, RejectsZeroRepeats) {
  EXPECT_THROW(run_conditioning_map(LatticeSpec{}, AngleD{}, NoiseSpec{0, 0},
                                    0, 60),
               Error);
}

}  // namespace
}  // namespace axirot
