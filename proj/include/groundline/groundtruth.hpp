#pragma once

// Ground-truth ground normals from LiDAR: keep the points that project onto
// ground pixels of a segmentation mask, then fit a plane with RANSAC and
// refine it by least squares over the consensus set.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "groundline/errors.hpp"
#include "groundline/geom.hpp"
#include "groundline/log.hpp"
#include "groundline/projective.hpp"
#include "groundline/raster.hpp"

namespace groundline {

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Ground pixels of a camera image; nonzero = ground.
struct GroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  GroundMask() = default;
  GroundMask(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  static GroundMask from_image(const Image& img) {
    GroundMask m(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) m.set(x, y, img.at(x, y, 0) != 0);
    return m;
  }

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
};

/// Points (returned in the camera frame) that lie in front of the camera,
/// project inside the image, and land on a ground pixel. Pixel centers are at
/// integer coordinates.
inline PointCloud select_ground_points(const PointCloud& cloud, const CameraIntrinsics& intr,
                                       const Transform& cam_from_lidar, const GroundMask& mask) {
  intr.validate();
  if (mask.width != intr.width || mask.height != intr.height) {
    throw DimensionMismatchError("mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                                 ", camera is " + std::to_string(intr.width) + "x" + std::to_string(intr.height));
  }
  PointCloud out;
  for (const Vec3& p : cloud.points) {
    const Vec3 pc = cam_from_lidar * p;
    const auto uv = intr.project(pc);
    if (!uv) continue;
    const double u = std::floor(uv->x() + 0.5);
    const double v = std::floor(uv->y() + 0.5);
    if (u < 0.0 || v < 0.0 || u >= intr.width || v >= intr.height) continue;
    if (mask.at(static_cast<int>(u), static_cast<int>(v))) out.points.push_back(pc);
  }
  return out;
}

/// Plane n^T x = offset.
struct PlaneFit {
  UnitVector3 normal = UnitVector3::unit_y();
  double offset = 0.0;  // meters
  std::size_t inlier_count = 0;
  double inlier_ratio = 0.0;

  double distance(const Vec3& p) const { return normal.vec().dot(p) - offset; }
};

struct RansacParams {
  double threshold = 0.03;  // meters
  int iterations = 200;
  std::uint64_t seed = 0;
  /// The fitted normal is flipped to have a positive dot product with this.
  Vec3 reference = Vec3::UnitY();
  /// Called with every sampled candidate model (diagnostics only).
  std::function<void(const PlaneFit&)> on_candidate;
};

namespace detail {

struct PlaneLsq {
  Vec3 centroid;
  Eigen::Vector3d eigenvalues;  // ascending
  Mat3 eigenvectors;
};

inline PlaneLsq plane_lsq(const std::vector<Vec3>& pts, const std::vector<std::size_t>* subset = nullptr) {
  const std::size_t n = subset ? subset->size() : pts.size();
  auto at = [&](std::size_t i) -> const Vec3& { return subset ? pts[(*subset)[i]] : pts[i]; };
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) c += at(i);
  c /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = at(i) - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  return {c, es.eigenvalues(), es.eigenvectors()};
}

/// True when the spread is essentially one-dimensional (or a single point).
inline bool collinear(const PlaneLsq& f) {
  return f.eigenvalues(1) <= 1e-12 * std::max(f.eigenvalues(2), 1e-300);
}

inline PlaneFit oriented_plane(const Vec3& normal, const Vec3& point_on_plane, const Vec3& reference) {
  Vec3 n = normal.normalized();
  if (n.dot(reference) < 0.0) n = -n;
  return {UnitVector3(n), n.dot(point_on_plane), 0, 0.0};
}

inline std::size_t count_inliers(const PlaneFit& plane, const std::vector<Vec3>& pts, double threshold,
                                 std::vector<std::size_t>* idx = nullptr) {
  std::size_t count = 0;
  if (idx) idx->clear();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(plane.distance(pts[i])) <= threshold) {
      ++count;
      if (idx) idx->push_back(i);
    }
  }
  return count;
}

}  // namespace detail

/// Best-consensus plane over `params.iterations` minimal samples, refined by
/// least squares over its inliers. The refinement is kept only when it does
/// not lose inliers. Deterministic for a given seed.
inline PlaneFit ransac_plane(const PointCloud& cloud, const RansacParams& params = {}) {
  const auto& pts = cloud.points;
  if (pts.size() < 3) throw DegenerateInputError("plane fit needs at least 3 points, got " + std::to_string(pts.size()));
  if (detail::collinear(detail::plane_lsq(pts))) throw DegenerateInputError("all points are collinear");

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);

  PlaneFit best;
  bool have_best = false;
  for (int it = 0; it < params.iterations; ++it) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const Vec3 e1 = pts[j] - pts[i];
    const Vec3 e2 = pts[k] - pts[i];
    const Vec3 n = e1.cross(e2);
    if (n.norm() <= 1e-12 * e1.norm() * e2.norm()) continue;

    PlaneFit cand = detail::oriented_plane(n, pts[i], params.reference);
    cand.inlier_count = detail::count_inliers(cand, pts, params.threshold);
    cand.inlier_ratio = static_cast<double>(cand.inlier_count) / static_cast<double>(pts.size());
    if (params.on_candidate) params.on_candidate(cand);
    if (!have_best || cand.inlier_count > best.inlier_count) {
      best = cand;
      have_best = true;
    }
  }

  std::vector<std::size_t> inliers;
  if (!have_best) {
    // Every draw was degenerate; fall back to all points.
    inliers.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) inliers[i] = i;
  } else {
    detail::count_inliers(best, pts, params.threshold, &inliers);
  }

  PlaneFit result = best;
  if (inliers.size() >= 3) {
    const auto lsq = detail::plane_lsq(pts, &inliers);
    if (!detail::collinear(lsq)) {
      PlaneFit refined = detail::oriented_plane(lsq.eigenvectors.col(0), lsq.centroid, params.reference);
      refined.inlier_count = detail::count_inliers(refined, pts, params.threshold);
      if (!have_best || refined.inlier_count >= best.inlier_count) result = refined;
    }
  }
  result.inlier_ratio = static_cast<double>(result.inlier_count) / static_cast<double>(pts.size());
  if (result.inlier_ratio < 0.5) {
    logging::warn("low RANSAC inlier ratio " + std::to_string(result.inlier_ratio) + " (uneven ground?)");
  }
  return result;
}

}  // namespace groundline
