#pragma once

// Pinhole projection utilities: inverse perspective mapping onto the ground
// plane, the ground plane's vanishing line, and bird's-eye-view warping.
//
// Camera frame: x right, y down, z forward. A GroundPlane normal points from
// the camera toward the road, so a level camera has normal (0, 1, 0), the same
// convention the estimator emits. Ground coordinates are (forward, lateral):
// forward is the camera z axis projected onto the plane, lateral = n x forward
// (to the right for a level camera).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>

#include "groundline/errors.hpp"
#include "groundline/geom.hpp"
#include "groundline/raster.hpp"

namespace groundline {

struct CameraIntrinsics {
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  void validate() const {
    if (!(fx > 0.0)) throw InvalidConfigError("fx", "must be > 0");
    if (!(fy > 0.0)) throw InvalidConfigError("fy", "must be > 0");
  }

  Mat3 matrix() const {
    Mat3 k;
    k << fx, 0.0, cx,
         0.0, fy, cy,
         0.0, 0.0, 1.0;
    return k;
  }

  Mat3 inverse_matrix() const {
    Mat3 k;
    k << 1.0 / fx, 0.0, -cx / fx,
         0.0, 1.0 / fy, -cy / fy,
         0.0, 0.0, 1.0;
    return k;
  }

  /// Pixel of camera-frame point `p`; nullopt when p is not in front (z <= 0).
  std::optional<Eigen::Vector2d> project(const Vec3& p) const {
    if (!(p.z() > 0.0)) return std::nullopt;
    return Eigen::Vector2d(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy);
  }

  Vec3 back_project(double u, double v) const { return {(u - cx) / fx, (v - cy) / fy, 1.0}; }
};

struct GroundPlane {
  UnitVector3 normal = UnitVector3::unit_y();
  double height = 1.5;  // meters, camera-to-plane distance

  void validate() const {
    if (!(height > 0.0)) throw InvalidConfigError("height", "must be > 0");
  }

  /// Unit forward and lateral axes spanning the plane.
  Vec3 forward_axis() const {
    const Vec3& n = normal.vec();
    Vec3 f = Vec3::UnitZ() - n.z() * n;
    if (f.norm() < 1e-9) f = Vec3::UnitX() - n.x() * n;  // camera looking straight at the plane
    return f.normalized();
  }
  Vec3 lateral_axis() const { return normal.vec().cross(forward_axis()); }
};

/// Pixel (homogeneous) -> ground (forward, lateral, 1) up to scale.
struct Homography {
  Mat3 matrix = Mat3::Identity();

  /// Dehomogenized image of pixel (u, v). Infinite when the ray is parallel to
  /// the plane; points behind the camera come back with the sign flipped, use
  /// ray_hits_plane() to filter them.
  Eigen::Vector2d apply(double u, double v) const {
    const Vec3 h = matrix * Vec3(u, v, 1.0);
    if (std::abs(h.z()) <= 1e-12 * h.norm()) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    return {h.x() / h.z(), h.y() / h.z()};
  }

  bool ray_hits_plane(double u, double v) const { return (matrix.row(2).dot(Vec3(u, v, 1.0))) > 0.0; }

  Homography inverse() const { return {matrix.inverse()}; }

  /// Scaled to unit Frobenius norm with the first non-negligible entry
  /// (row-major) positive.
  Mat3 normalized() const {
    Mat3 m = matrix / matrix.norm();
    for (int i = 0; i < 9; ++i) {
      const double v = m(i / 3, i % 3);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) m = -m;
        break;
      }
    }
    return m;
  }

  bool invertible() const { return std::abs(normalized().determinant()) > 1e-12; }
};

inline Homography ipm_homography(const CameraIntrinsics& intr, const GroundPlane& plane) {
  intr.validate();
  plane.validate();
  Mat3 basis;
  basis.row(0) = plane.forward_axis().transpose();
  basis.row(1) = plane.lateral_axis().transpose();
  basis.row(2) = plane.normal.vec().transpose() / plane.height;
  return {basis * intr.inverse_matrix()};
}

/// Explicit ray-plane intersection for pixel (u, v), in camera coordinates.
inline std::optional<Vec3> intersect_ground(const CameraIntrinsics& intr, const GroundPlane& plane, double u,
                                            double v) {
  const Vec3 d = intr.back_project(u, v);
  const double denom = plane.normal.vec().dot(d);
  if (!(denom > 0.0)) return std::nullopt;
  return Vec3((plane.height / denom) * d);
}

/// Line coefficients (a, b, c), a*u + b*v + c = 0, with a^2 + b^2 = 1.
struct ImageLine {
  double a = 0.0, b = 1.0, c = 0.0;

  double signed_distance(double u, double v) const { return a * u + b * v + c; }
  /// Row of the line at column u (requires b != 0).
  double v_at(double u) const { return -(a * u + c) / b; }
  double u_at(double v) const { return -(b * v + c) / a; }
};

/// Vanishing line l ~ K^-T n, normalized, with b >= 0.
inline ImageLine vanishing_line(const CameraIntrinsics& intr, const UnitVector3& normal) {
  intr.validate();
  // fx*fy * K^-T n, which keeps the axis-aligned case exact.
  const Vec3& n = normal.vec();
  Vec3 l(intr.fy * n.x(), intr.fx * n.y(), intr.fx * intr.fy * n.z() - intr.cx * intr.fy * n.x() - intr.cy * intr.fx * n.y());
  const double s = std::hypot(l.x(), l.y());
  if (s < 1e-15 * std::abs(l.z()) || s == 0.0) throw DegenerateInputError("normal is parallel to the optical axis; vanishing line at infinity");
  l /= s;
  if (l.y() < 0.0 || (l.y() == 0.0 && l.x() < 0.0)) l = -l;
  return {l.x(), l.y(), l.z()};
}

/// BEV raster geometry: a square `extent` x `extent` meters region in front of
/// the camera, vehicle at bottom-center.
struct BevGrid {
  double extent = 20.0;      // meters
  double resolution = 0.05;  // meters / pixel

  int size_px() const { return static_cast<int>(std::lround(extent / resolution)); }

  /// Ground (forward, lateral) at the center of BEV pixel (col, row).
  Eigen::Vector2d ground_of(int col, int row) const {
    const int n = size_px();
    const double lateral = (col + 0.5 - 0.5 * n) * resolution;
    const double forward = (n - row - 0.5) * resolution;
    return {forward, lateral};
  }
};

/// Inverse warp of `image` onto the BEV grid with nearest-neighbor sampling
/// (pixel centers at integer coordinates). Samples outside the image or above
/// the horizon are zero.
inline Image warp_to_bev(const Image& image, const Homography& h, const BevGrid& grid = {}) {
  if (!(grid.resolution > 0.0) || !(grid.extent > 0.0)) throw InvalidConfigError("bev", "extent and resolution must be > 0");
  const int n = grid.size_px();
  Image out(n, n, image.channels, 0);
  const Mat3 inv = h.matrix.inverse();
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Eigen::Vector2d g = grid.ground_of(col, row);
      const Vec3 p = inv * Vec3(g.x(), g.y(), 1.0);
      // p = lambda * (u, v, 1) with lambda > 0 for ground points in front.
      if (!(p.z() > 0.0)) continue;
      const int x = static_cast<int>(std::floor(p.x() / p.z() + 0.5));
      const int y = static_cast<int>(std::floor(p.y() / p.z() + 0.5));
      if (!image.contains(x, y)) continue;
      for (int c = 0; c < image.channels; ++c) out.at(col, row, c) = image.at(x, y, c);
    }
  }
  return out;
}

}  // namespace groundline
