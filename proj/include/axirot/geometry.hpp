#ifndef AXIROT_GEOMETRY_HPP
#define AXIROT_GEOMETRY_HPP

// One-parameter epipolar model of circular relative motion.
//
// The camera (or, equivalently, the object) turns by an angle alpha about a
// vertical axis that is perpendicular to the optical axis. Camera frame: x to
// the right, y up, z along the optical axis. Image points are normalized
// (unit focal length, principal point at the origin), so a point is the
// homogeneous vector (x, y, 1).
//
// Everything here is templated on the scalar type so that the same code runs
// in double for production and in long double where extra headroom is wanted.

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "axirot/error.hpp"

namespace axirot {

template <typename Scalar>
inline constexpr Scalar kPi =
    static_cast<Scalar>(3.14159265358979323846264338327950288L);

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

// Maps any finite angle in radians to (-pi, pi].
template <typename Scalar>
Scalar normalize_radians(Scalar radians) {
  const Scalar two_pi = 2 * kPi<Scalar>;
  Scalar r = std::remainder(radians, two_pi);
  if (r <= -kPi<Scalar>) r += two_pi;
  if (r > kPi<Scalar>) r -= two_pi;
  return r;
}

template <typename Scalar = double>
class Angle {
 public:
  Angle() = default;

  static Angle from_radians(Scalar radians) {
    if (!std::isfinite(radians)) {
      throw Error(ErrorCode::kInvalidArgument, "angle must be finite");
    }
    return Angle(normalize_radians(radians));
  }
  static Angle from_degrees(Scalar degrees) {
    if (!std::isfinite(degrees)) {
      throw Error(ErrorCode::kInvalidArgument, "angle must be finite");
    }
    return from_radians(degrees * (kPi<Scalar> / 180));
  }

  Scalar radians() const { return radians_; }
  Scalar degrees() const { return radians_ * (180 / kPi<Scalar>); }

  Angle operator-() const { return from_radians(-radians_); }

  friend bool operator==(const Angle&, const Angle&) = default;

 private:
  explicit Angle(Scalar radians) : radians_(radians) {}

  Scalar radians_ = 0;
};

// Canonical difference a - b, in (-pi, pi].
template <typename Scalar>
Angle<Scalar> operator-(const Angle<Scalar>& a, const Angle<Scalar>& b) {
  return Angle<Scalar>::from_radians(a.radians() - b.radians());
}

template <typename Scalar = double>
struct NormalizedPoint {
  Scalar x = 0;
  Scalar y = 0;

  Vector3<Scalar> homogeneous() const { return {x, y, Scalar(1)}; }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
};

// (first, second) = (q, q'): the same scene point seen before and after the
// rotation.
template <typename Scalar = double>
struct Correspondence {
  NormalizedPoint<Scalar> first;
  NormalizedPoint<Scalar> second;

  bool is_finite() const { return first.is_finite() && second.is_finite(); }
};

template <typename Scalar>
Correspondence<Scalar> swapped(const Correspondence<Scalar>& c) {
  return {c.second, c.first};
}

// The two scalars the whole model depends on:
//   u = y - y',  v = x' y + x y'.
// The epipolar residual is sin(a) u - (1 - cos(a)) v.
template <typename Scalar>
struct MotionTerms {
  Scalar u;
  Scalar v;
};

template <typename Scalar>
MotionTerms<Scalar> motion_terms(const Correspondence<Scalar>& c) {
  return {c.first.y - c.second.y,
          c.second.x * c.first.y + c.first.x * c.second.y};
}

template <typename Scalar>
Matrix3<Scalar> cross_matrix(const Vector3<Scalar>& t) {
  Matrix3<Scalar> m;
  m << 0, -t.z(), t.y(),
       t.z(), 0, -t.x(),
       -t.y(), t.x(), 0;
  return m;
}

// Rotation about the y axis with the sign convention under which
// cross_matrix(t) * R reproduces the essential matrix below.
template <typename Scalar>
Matrix3<Scalar> rotation_about_y(const Angle<Scalar>& alpha) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(alpha.radians());
  const Scalar s = sin(alpha.radians());
  Matrix3<Scalar> r;
  r << c, 0, -s,
       0, 1, 0,
       s, 0, c;
  return r;
}

template <typename Scalar = double>
class EssentialMatrix {
 public:
  const Matrix3<Scalar>& matrix() const { return m_; }
  const Angle<Scalar>& alpha() const { return alpha_; }

  template <typename S>
  friend EssentialMatrix<S> essential_from_angle(const Angle<S>& alpha);

 private:
  EssentialMatrix(const Matrix3<Scalar>& m, const Angle<Scalar>& alpha)
      : m_(m), alpha_(alpha) {}

  Matrix3<Scalar> m_;
  Angle<Scalar> alpha_;
};

// E(alpha) for a unit circle radius, written exactly in its trigonometric
// form (the radius only scales E and cancels in every use).
template <typename Scalar>
EssentialMatrix<Scalar> essential_from_angle(const Angle<Scalar>& alpha) {
  using std::cos;
  using std::sin;
  const Scalar a = alpha.radians();
  const Scalar s = sin(a);
  const Scalar c = cos(a);
  const Scalar half_sin = sin(a / 2);
  const Scalar two_sin2_half = 2 * half_sin * half_sin;
  Matrix3<Scalar> m;
  m << 0, -two_sin2_half, 0,
       two_sin2_half * c - s * s, 0, -two_sin2_half * s - s * c,
       0, s, 0;
  return EssentialMatrix<Scalar>(m, alpha);
}

// E(alpha) / (2 sin(alpha / 2)), i.e. the essential matrix of a unit-length
// baseline. It has the same epipolar geometry as E(alpha) for alpha != 0 and
// stays well defined at alpha = 0, where E(alpha) itself vanishes.
template <typename Scalar>
Matrix3<Scalar> unit_baseline_essential(const Angle<Scalar>& alpha) {
  using std::cos;
  using std::sin;
  const Scalar h = alpha.radians() / 2;
  const Scalar sh = sin(h);
  const Scalar ch = cos(h);
  Matrix3<Scalar> m;
  m << 0, -sh, 0,
       -sh, 0, -ch,
       0, ch, 0;
  return m;
}

template <typename Scalar = double>
struct RigidMotion {
  Matrix3<Scalar> rotation;
  Vector3<Scalar> translation;
  Scalar radius;
};

template <typename Scalar>
RigidMotion<Scalar> motion_from_angle(const Angle<Scalar>& alpha,
                                      Scalar radius) {
  using std::cos;
  using std::sin;
  if (!(radius > 0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kNonPositiveRadius, "radius must be positive");
  }
  const Scalar a = alpha.radians();
  return {rotation_about_y(alpha),
          Vector3<Scalar>(radius * sin(a), 0, radius * (1 - cos(a))),
          radius};
}

inline constexpr double kDefaultDegeneracyTolerance = 1e-12;

// Rotation angle from a single correspondence: alpha = 2 atan(u / v).
// Throws kDegenerateCorrespondence when |u| and |v| are both within
// `tolerance` of zero (the 0/0 case).
template <typename Scalar>
Angle<Scalar> angle_from_correspondence(
    const Correspondence<Scalar>& c,
    Scalar tolerance = static_cast<Scalar>(kDefaultDegeneracyTolerance)) {
  using std::abs;
  using std::atan;
  if (!c.is_finite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "correspondence coordinates must be finite");
  }
  const auto [u, v] = motion_terms(c);
  if (abs(u) <= tolerance && abs(v) <= tolerance) {
    throw Error(ErrorCode::kDegenerateCorrespondence,
                "correspondence lies on an ill-conditioned plane (u = v = 0)");
  }
  if (v == 0) return Angle<Scalar>::from_radians(kPi<Scalar>);
  return Angle<Scalar>::from_radians(2 * atan(u / v));
}

// q'^T E q.
template <typename Scalar, typename Derived>
Scalar epipolar_residual(const Correspondence<Scalar>& c,
                         const Eigen::MatrixBase<Derived>& e) {
  return c.second.homogeneous().dot(e * c.first.homogeneous());
}

template <typename Scalar>
Scalar epipolar_residual(const Correspondence<Scalar>& c,
                         const EssentialMatrix<Scalar>& e) {
  return epipolar_residual(c, e.matrix());
}

// sin(a) u - (1 - cos(a)) v: q'^T E(a) q expanded.
template <typename Scalar>
Scalar epipolar_residual_closed_form(const Correspondence<Scalar>& c,
                                     const Angle<Scalar>& alpha) {
  using std::cos;
  using std::sin;
  const auto [u, v] = motion_terms(c);
  const Scalar a = alpha.radians();
  return sin(a) * u - (1 - cos(a)) * v;
}

// First-order geometric distance of q, q' to the epipolar constraint.
// Throws kUndefinedDistance when the gradient term vanishes, which happens
// for every pair when E is the zero matrix.
template <typename Scalar, typename Derived>
Scalar sampson_distance(const Correspondence<Scalar>& c,
                        const Eigen::MatrixBase<Derived>& e) {
  using std::sqrt;
  const Vector3<Scalar> q = c.first.homogeneous();
  const Vector3<Scalar> qp = c.second.homogeneous();
  const Vector3<Scalar> eq = e * q;
  const Vector3<Scalar> etqp = e.transpose() * qp;
  const Scalar denom = eq.x() * eq.x() + eq.y() * eq.y() +
                       etqp.x() * etqp.x() + etqp.y() * etqp.y();
  if (!(denom > 0)) {
    throw Error(ErrorCode::kUndefinedDistance,
                "Sampson distance undefined: vanishing denominator");
  }
  const Scalar r = qp.dot(eq);
  return sqrt(r * r / denom);
}

template <typename Scalar>
Scalar sampson_distance(const Correspondence<Scalar>& c,
                        const EssentialMatrix<Scalar>& e) {
  return sampson_distance(c, e.matrix());
}

}  // namespace axirot

#endif  // AXIROT_GEOMETRY_HPP
