#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "axirot/geometry.hpp"
#include "axirot/synthetic.hpp"

namespace axirot {
namespace {

using LD = long double;

// y' chosen so that the single-pair angle is exactly 10 deg for
// q = (0.1, 0.2), x' = 0.15.
double ten_degree_y_prime() {
  const LD t = std::tan(5.0L * kPi<LD> / 180);
  return static_cast<double>(0.2L * (1 - t * 0.15L) / (1 + t * 0.1L));
}

CorrespondenceD ten_degree_pair() {
  return {{0.1, 0.2}, {0.15, ten_degree_y_prime()}};
}

// Each entry of the essential matrix, evaluated independently in long double.
Matrix3<LD> essential_oracle(LD a) {
  const LD s = std::sin(a);
  const LD c = std::cos(a);
  Matrix3<LD> m;
  m << 0, -(1 - c), 0,
       -(1 - c), 0, -s,
       0, s, 0;
  return m;
}

TEST(Angle, NormalizesIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(AngleD::from_degrees(190).degrees(), -170);
  EXPECT_DOUBLE_EQ(AngleD::from_degrees(-180).degrees(), 180);
  EXPECT_DOUBLE_EQ(AngleD::from_degrees(180).degrees(), 180);
  EXPECT_NEAR(AngleD::from_degrees(720 + 30).degrees(), 30, 1e-12);
}

TEST(Angle, RejectsNonFinite) {
  EXPECT_THROW(AngleD::from_radians(NAN), Error);
  EXPECT_THROW(AngleD::from_degrees(INFINITY), Error);
}

TEST(Angle, DifferenceWraps) {
  const auto d = AngleD::from_degrees(179) - AngleD::from_degrees(-179);
  EXPECT_NEAR(d.degrees(), -2, 1e-12);
}

TEST(EssentialMatrix, ZeroAtZeroAngle) {
  const auto e = essential_from_angle(AngleD::from_radians(0));
  EXPECT_TRUE(e.matrix().isZero(0));
}

TEST(EssentialMatrix, QuarterTurn) {
  const auto e = essential_from_angle(AngleD::from_radians(kPi<double> / 2));
  Matrix3<double> expected;
  expected << 0, -1, 0, -1, 0, -1, 0, 1, 0;
  EXPECT_LT((e.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EssentialMatrix, MatchesExtendedPrecisionOracle) {
  const auto e = essential_from_angle(AngleD::from_radians(0.3));
  const Matrix3<LD> oracle = essential_oracle(0.3L);
  EXPECT_LT((e.matrix().cast<LD>() - oracle).cwiseAbs().maxCoeff(), 1e-12L);
  EXPECT_DOUBLE_EQ(e.alpha().radians(), 0.3);
}

TEST(EssentialMatrix, RankTwoWithEqualSingularValues) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-kPi<double>, kPi<double>);
  for (int i = 0; i < 1000; ++i) {
    double a = angle(rng);
    if (std::abs(a) < 1e-6) a = 0.5;
    const auto e = essential_from_angle(AngleD::from_radians(a));
    EXPECT_NEAR(e.matrix().determinant(), 0, 1e-12);
    Eigen::JacobiSVD<Matrix3<double>> svd(e.matrix());
    const auto sv = svd.singularValues();
    EXPECT_NEAR(sv(0), sv(1), 1e-9) << "alpha = " << a;
    EXPECT_NEAR(sv(2), 0, 1e-9);
  }
}

TEST(EssentialMatrix, ZeroOnlyAtZero) {
  for (double deg : {-170.0, -1.0, 1e-3, 45.0, 180.0}) {
    const auto e = essential_from_angle(AngleD::from_degrees(deg));
    EXPECT_FALSE(e.matrix().isZero(0)) << deg;
  }
}

TEST(UnitBaselineEssential, IsScaledEssential) {
  for (double deg : {-120.0, -10.0, 3.0, 77.0}) {
    const auto a = AngleD::from_degrees(deg);
    const double scale = 2 * std::sin(a.radians() / 2);
    EXPECT_LT((unit_baseline_essential(a) * scale -
               essential_from_angle(a).matrix())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
  }
  EXPECT_FALSE(unit_baseline_essential(AngleD{}).isZero(0));
}

TEST(RigidMotion, ZeroAngle) {
  const auto m = motion_from_angle(AngleD{}, 1.0);
  EXPECT_TRUE(m.rotation.isIdentity(0));
  EXPECT_TRUE(m.translation.isZero(0));
}

TEST(RigidMotion, QuarterTurnRadiusTwo) {
  const auto m = motion_from_angle(AngleD::from_radians(kPi<double> / 2), 2.0);
  Matrix3<double> r;
  r << 0, 0, -1, 0, 1, 0, 1, 0, 0;
  EXPECT_LT((m.rotation - r).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((m.translation - Vector3<double>(2, 0, 2)).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(RigidMotion, CrossProductFormReproducesEssential) {
  const auto a = AngleD::from_radians(0.21);
  const auto m = motion_from_angle(a, 1.0);
  EXPECT_LT((cross_matrix(m.translation) * m.rotation -
             essential_from_angle(a).matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(RigidMotion, ConsistencyOverRandomAngles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi<double>, kPi<double>);
  std::uniform_real_distribution<double> radius(0.1, 500);
  for (int i = 0; i < 1000; ++i) {
    const auto a = AngleD::from_radians(angle(rng));
    const double r = radius(rng);
    const auto m = motion_from_angle(a, r);
    EXPECT_LT((m.rotation.transpose() * m.rotation -
               Matrix3<double>::Identity())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_NEAR(m.rotation.determinant(), 1, 1e-12);
    const Matrix3<double> lhs = cross_matrix(m.translation) * m.rotation;
    const Matrix3<double> rhs = r * essential_from_angle(a).matrix();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, r));
  }
}

TEST(RigidMotion, RejectsNonPositiveRadius) {
  try {
    motion_from_angle(AngleD{}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveRadius);
  }
  EXPECT_THROW(motion_from_angle(AngleD{}, -1.0), Error);
}

TEST(AngleFromCorrespondence, ConstructedTenDegreePair) {
  EXPECT_NEAR(angle_from_correspondence(ten_degree_pair()).degrees(), 10, 1e-6);
  EXPECT_NEAR(angle_from_correspondence(ten_degree_pair()).degrees(), 10,
              1e-12);
}

TEST(AngleFromCorrespondence, HorizontalPlanePointIsDegenerate) {
  const CorrespondenceD c{{0.3, 0.0}, {0.3, 0.0}};
  try {
    angle_from_correspondence(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCorrespondence);
  }
}

TEST(AngleFromCorrespondence, IdenticalPointsGiveZero) {
  const CorrespondenceD c{{0.2, 0.1}, {0.2, 0.1}};
  EXPECT_EQ(angle_from_correspondence(c).radians(), 0);
}

TEST(AngleFromCorrespondence, VanishingDenominatorGivesHalfTurn) {
  // v = x'y + xy' = 0 with u != 0.
  const CorrespondenceD c{{0.1, 0.2}, {0.1, -0.2}};
  EXPECT_DOUBLE_EQ(angle_from_correspondence(c).degrees(), 180);
}

TEST(AngleFromCorrespondence, ToleranceIsConfigurable) {
  const CorrespondenceD c{{0.3, 1e-9}, {0.3, 1e-9}};
  EXPECT_NO_THROW(angle_from_correspondence(c));
  EXPECT_THROW(angle_from_correspondence(c, 1e-6), Error);
}

TEST(AngleFromCorrespondence, RejectsNonFinite) {
  const CorrespondenceD c{{NAN, 0.1}, {0.2, 0.1}};
  try {
    angle_from_correspondence(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(AngleFromCorrespondence, SwapNegates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-0.6, 0.6);
  for (int i = 0; i < 10000; ++i) {
    const CorrespondenceD c{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
    const auto a = angle_from_correspondence(c);
    const auto b = angle_from_correspondence(swapped(c));
    if (std::abs(a.degrees()) == 180) continue;
    EXPECT_NEAR(b.radians(), -a.radians(), 1e-12);
  }
}

// Noiseless projections of random scene points recover the rotation angle.
TEST(AngleFromCorrespondence, RoundTripOverRandomScenes) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle_deg(-170, 170);
  std::uniform_real_distribution<double> lateral(-80, 80);
  constexpr double kAxis = 200;
  int checked = 0;
  while (checked < 10000) {
    const auto alpha = AngleD::from_degrees(angle_deg(rng));
    const ScenePoint p(lateral(rng), lateral(rng), kAxis + lateral(rng));
    const double h = alpha.radians() / 2;
    const double a = p.x();
    const double b = p.z() - kAxis;
    // Stay clear of both degenerate planes.
    if (std::abs(p.y()) < 1e-3 ||
        std::abs(a * std::cos(h) - b * std::sin(h)) < 1e-3) {
      continue;
    }
    const ScenePoint moved =
        rotate_about_axis(std::span(&p, 1), alpha, kAxis).front();
    if (moved.z() < 1) continue;
    const CorrespondenceD c{project(p), project(moved)};
    const auto recovered = angle_from_correspondence(c);
    EXPECT_NEAR((recovered - alpha).radians(), 0, 1e-9)
        << "alpha = " << alpha.degrees() << " p = " << p.transpose();
    ++checked;
  }
}

TEST(EpipolarResidual, VanishesOnConstructedPair) {
  const auto e = essential_from_angle(AngleD::from_degrees(10));
  EXPECT_NEAR(epipolar_residual(ten_degree_pair(), e), 0, 1e-12);
}

TEST(EpipolarResidual, ZeroMatrixGivesZero) {
  const auto e = essential_from_angle(AngleD{});
  const CorrespondenceD c{{0.4, -0.3}, {0.1, 0.25}};
  EXPECT_EQ(epipolar_residual(c, e), 0);
}

TEST(EpipolarResidual, MatrixAndClosedFormAgreeWithOracle) {
  const CorrespondenceD c{{0.1, 0.2}, {0.15, 0.2}};
  const auto alpha = AngleD::from_degrees(10);
  const LD a = 10.0L * kPi<LD> / 180;
  const LD u = 0.2L - 0.2L;
  const LD v = 0.15L * 0.2L + 0.1L * 0.2L;
  const LD oracle = std::sin(a) * u - (1 - std::cos(a)) * v;
  const double by_matrix = epipolar_residual(c, essential_from_angle(alpha));
  const double closed = epipolar_residual_closed_form(c, alpha);
  EXPECT_NEAR(by_matrix, static_cast<double>(oracle), 1e-12);
  EXPECT_NEAR(closed, static_cast<double>(oracle), 1e-12);
  EXPECT_NEAR(by_matrix, closed, 1e-12);
}

TEST(EpipolarResidual, IdentityOnEstimatedAngle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-0.6, 0.6);
  for (int i = 0; i < 10000; ++i) {
    const CorrespondenceD c{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
    const auto alpha = angle_from_correspondence(c);
    EXPECT_NEAR(epipolar_residual(c, essential_from_angle(alpha)), 0, 1e-10);
    EXPECT_NEAR(epipolar_residual(c, essential_from_angle(alpha)),
                epipolar_residual_closed_form(c, alpha), 1e-12);
  }
}

TEST(SampsonDistance, ZeroOnConsistentPair) {
  const auto e = essential_from_angle(AngleD::from_degrees(10));
  EXPECT_NEAR(sampson_distance(ten_degree_pair(), e), 0, 1e-12);
}

TEST(SampsonDistance, MatchesDirectEvaluation) {
  CorrespondenceD c = ten_degree_pair();
  c.second.y += 0.001;
  const auto e = essential_from_angle(AngleD::from_degrees(10));

  const LD a = 10.0L * kPi<LD> / 180;
  const Matrix3<LD> m = essential_oracle(a);
  const Vector3<LD> q(0.1L, 0.2L, 1);
  const Vector3<LD> qp(0.15L, static_cast<LD>(c.second.y), 1);
  const Vector3<LD> eq = m * q;
  const Vector3<LD> etqp = m.transpose() * qp;
  const LD r = qp.dot(eq);
  const LD oracle = std::sqrt(
      r * r / (eq(0) * eq(0) + eq(1) * eq(1) + etqp(0) * etqp(0) +
               etqp(1) * etqp(1)));

  const double d = sampson_distance(c, e);
  EXPECT_GT(d, 0);
  EXPECT_NEAR(d, static_cast<double>(oracle), 1e-12);
}

TEST(SampsonDistance, UndefinedForZeroMatrix) {
  const auto e = essential_from_angle(AngleD{});
  try {
    sampson_distance(ten_degree_pair(), e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kUndefinedDistance);
  }
}

TEST(SampsonDistance, InvariantToMatrixScale) {
  CorrespondenceD c = ten_degree_pair();
  c.second.x += 0.01;
  const auto a = AngleD::from_degrees(10);
  EXPECT_NEAR(sampson_distance(c, essential_from_angle(a)),
              sampson_distance(c, unit_baseline_essential(a)), 1e-15);
}

TEST(Geometry, WorksInLongDouble) {
  const Correspondence<LD> c{{0.1L, 0.2L}, {0.15L, 0.2L}};
  const auto alpha = angle_from_correspondence(c);
  EXPECT_NEAR(static_cast<double>(
                  epipolar_residual(c, essential_from_angle(alpha))),
              0, 1e-15);
}

}  // namespace
}  // namespace axirot
