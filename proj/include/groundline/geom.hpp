#pragma once

// Fixed-size rotation and rigid-transform algebra on SO(3) / SE(3).
//
// Rotations are stored as 3x3 matrices. Conventions used throughout:
//   * Transform T maps points from its local frame into the parent frame,
//     p_parent = R * p_local + t.
//   * Euler angles: roll about z, pitch about x, yaw about y, composed as
//     R = R_y(yaw) * R_x(pitch) * R_z(roll).
//   * The ground-normal extractor reads column 1 (the y axis) of a rotation.

#include <Eigen/Core>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "groundline/errors.hpp"

namespace groundline {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Element of so(3) as an axis-angle vector (magnitude = angle, radians).
using TangentVector = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Skew-symmetric matrix with hat(w) * v = w x v.
inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

inline Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Wraps `m` as-is. Caller guarantees orthonormality.
  static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }

  /// Wraps `m` after checking R R^T = I and det R = 1 within `tol`.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-9) {
    if (!is_rotation_matrix(m, tol)) throw InvalidRotationError("matrix is not in SO(3)");
    return Rotation(m);
  }

  /// Closest rotation in the Frobenius sense (polar projection via SVD).
  static Rotation nearest(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
    return Rotation(u * v.transpose());
  }

  static Rotation about_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 m;
    m << 1.0, 0.0, 0.0,
         0.0, c, -s,
         0.0, s, c;
    return Rotation(m);
  }

  static Rotation about_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 m;
    m << c, 0.0, s,
         0.0, 1.0, 0.0,
         -s, 0.0, c;
    return Rotation(m);
  }

  static Rotation about_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 m;
    m << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return Rotation(m);
  }

  /// Rodrigues formula; small angles use the Taylor expansion of the coefficients.
  static Rotation exp(const TangentVector& w) {
    const double theta2 = w.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a, b;  // sin(t)/t, (1 - cos(t))/t^2
    if (theta < 1e-4) {
      a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
      b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
      a = std::sin(theta) / theta;
      b = (1.0 - std::cos(theta)) / theta2;
    }
    const Mat3 k = hat(w);
    return Rotation(Mat3::Identity() + a * k + b * k * k);
  }

  /// Canonical logarithm with angle in [0, pi]. Near pi the axis comes from
  /// the largest diagonal entry of the symmetric part.
  TangentVector log() const {
    const Vec3 s = 0.5 * vee(m_ - m_.transpose());  // sin(theta) * axis
    const double cos_theta = std::clamp(0.5 * (m_.trace() - 1.0), -1.0, 1.0);
    const double sin_theta = s.norm();
    const double theta = std::atan2(sin_theta, cos_theta);

    if (theta < 1e-4) {
      // theta / sin(theta) ~ 1 + theta^2 / 6
      return (1.0 + theta * theta / 6.0) * s;
    }
    if (cos_theta > -0.999) {
      return (theta / sin_theta) * s;
    }
    const Mat3 b = (0.5 * (m_ + m_.transpose()) - cos_theta * Mat3::Identity()) / (1.0 - cos_theta);
    Eigen::Index i = 0;
    b.diagonal().maxCoeff(&i);
    Vec3 axis = b.col(i) / std::sqrt(std::max(b(i, i), 0.0));
    axis.normalize();
    if (axis.dot(s) < 0.0) axis = -axis;
    return theta * axis;
  }

  Rotation inverse() const { return Rotation(m_.transpose()); }

  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  /// Gram-Schmidt re-orthonormalization. Equivariant under left
  /// multiplication by a rotation.
  Rotation orthonormalized() const {
    Vec3 c0 = m_.col(0).normalized();
    Vec3 c1 = m_.col(1) - c0.dot(m_.col(1)) * c0;
    c1.normalize();
    Mat3 m;
    m.col(0) = c0;
    m.col(1) = c1;
    m.col(2) = c0.cross(c1);
    return Rotation(m);
  }

  /// Geodesic angle to `other`, radians.
  double angle_to(const Rotation& other) const { return (inverse() * other).log().norm(); }

  static bool is_rotation_matrix(const Mat3& m, double tol = 1e-9) {
    if (!m.allFinite()) return false;
    const Mat3 e = m * m.transpose() - Mat3::Identity();
    return e.cwiseAbs().maxCoeff() <= tol && std::abs(m.determinant() - 1.0) <= tol;
  }

  bool is_valid(double tol = 1e-9) const { return is_rotation_matrix(m_, tol); }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

inline Rotation exp(const TangentVector& w) { return Rotation::exp(w); }
inline TangentVector log(const Rotation& r) { return r.log(); }

struct Transform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static Transform identity() { return {}; }

  Transform inverse() const {
    const Rotation rt = rotation.inverse();
    return {rt, -(rt * translation)};
  }

  Transform operator*(const Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  /// 3x4 [R | t].
  Eigen::Matrix<double, 3, 4> matrix3x4() const {
    Eigen::Matrix<double, 3, 4> m;
    m.leftCols<3>() = rotation.matrix();
    m.col(3) = translation;
    return m;
  }
};

inline Transform compose(const Transform& a, const Transform& b) { return a * b; }
inline Transform inverse(const Transform& t) { return t.inverse(); }

struct EulerAngles {
  double roll = 0.0;   // about z
  double pitch = 0.0;  // about x
  double yaw = 0.0;    // about y
};

/// R = R_y(yaw) * R_x(pitch) * R_z(roll).
inline Rotation rotation_from_euler(const EulerAngles& e) {
  return Rotation::about_y(e.yaw) * Rotation::about_x(e.pitch) * Rotation::about_z(e.roll);
}

/// Inverse of rotation_from_euler. Throws GimbalLockError when |R(1,2)| is
/// within 1e-9 of one, where roll and yaw are no longer separable.
inline EulerAngles euler_from_rotation(const Rotation& r) {
  const double s_pitch = -r(1, 2);
  if (std::abs(s_pitch) >= 1.0 - 1e-9) throw GimbalLockError();
  EulerAngles e;
  e.pitch = std::asin(s_pitch);
  e.roll = std::atan2(r(1, 0), r(1, 1));
  e.yaw = std::atan2(r(0, 2), r(2, 2));
  return e;
}

/// Unit-norm 3-vector. Construction normalizes; zero or non-finite input throws.
class UnitVector3 {
 public:
  explicit UnitVector3(const Vec3& v) : v_(v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error("cannot normalize a zero or non-finite vector");
    v_ /= n;
  }
  UnitVector3(double x, double y, double z) : UnitVector3(Vec3(x, y, z)) {}

  static UnitVector3 unit_x() { return UnitVector3(Vec3::UnitX()); }
  static UnitVector3 unit_y() { return UnitVector3(Vec3::UnitY()); }
  static UnitVector3 unit_z() { return UnitVector3(Vec3::UnitZ()); }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVector3& o) const { return v_.dot(o.v_); }
  UnitVector3 operator-() const { return UnitVector3(-v_); }

  /// Angle to `o` in [0, pi]. Equal to acos of the clamped dot product, but
  /// computed with atan2 so that tiny angles keep full precision.
  double angle_to(const UnitVector3& o) const { return std::atan2(v_.cross(o.v_).norm(), v_.dot(o.v_)); }

 private:
  Vec3 v_;
};

inline UnitVector3 operator*(const Rotation& r, const UnitVector3& u) { return UnitVector3(r.matrix() * u.vec()); }

/// Column 1 (the y axis) of `r`, renormalized.
inline UnitVector3 normal_column(const Rotation& r) { return UnitVector3(r.matrix().col(1)); }

}  // namespace groundline
