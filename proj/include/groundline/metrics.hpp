#pragma once

// Angular error between normal streams, and pitch/roll dynamics of a normal
// stream relative to a static normal.

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "groundline/errors.hpp"
#include "groundline/geom.hpp"

namespace groundline {

struct ErrorReport {
  double mean_error_rad = 0.0;
  double mean_error_deg = 0.0;
  std::vector<double> per_frame_errors;  // radians, counted frames only
  std::size_t frames_counted = 0;
  std::size_t first_frame = 0;  // index of per_frame_errors[0] in the input
};

/// Mean of arccos(est_i . gt_i) over frames [skip, n), evaluated as
/// UnitVector3::angle_to.
inline ErrorReport angular_error(const std::vector<UnitVector3>& est, const std::vector<UnitVector3>& gt,
                                 std::size_t skip = 0) {
  if (est.size() != gt.size()) throw LengthMismatchError(est.size(), gt.size());
  ErrorReport r;
  r.first_frame = std::min(skip, est.size());
  double sum = 0.0;
  for (std::size_t i = r.first_frame; i < est.size(); ++i) {
    const double e = est[i].angle_to(gt[i]);
    r.per_frame_errors.push_back(e);
    sum += e;
  }
  r.frames_counted = r.per_frame_errors.size();
  r.mean_error_rad = r.frames_counted ? sum / static_cast<double>(r.frames_counted) : 0.0;
  r.mean_error_deg = rad_to_deg(r.mean_error_rad);
  return r;
}

struct DynamicsStats {
  double pitch_mean = 0.0;  // degrees, mean |deviation|
  double pitch_std = 0.0;   // degrees, population std of |deviation|
  double roll_mean = 0.0;
  double roll_std = 0.0;
  double bucket_width = 0.25;  // degrees
  std::vector<std::size_t> pitch_histogram;
  std::vector<std::size_t> roll_histogram;
  std::vector<double> pitch_deviation;  // signed, degrees, per frame
  std::vector<double> roll_deviation;
  std::size_t frame_count = 0;
};

struct PitchRoll {
  double pitch = 0.0;  // radians
  double roll = 0.0;
};

/// Deviation of `normal` from `static_normal`, resolved in the static frame:
/// the minimal rotation taking static_normal onto +y is applied, then
/// pitch = atan2(n_z, n_y) and roll = atan2(-n_x, n_y).
inline PitchRoll normal_deviation(const UnitVector3& normal, const UnitVector3& static_normal) {
  const Eigen::Quaterniond to_static = Eigen::Quaterniond::FromTwoVectors(static_normal.vec(), Vec3::UnitY());
  const Vec3 n = to_static * normal.vec();
  return {std::atan2(n.z(), n.y()), std::atan2(-n.x(), n.y())};
}

namespace detail {

inline void summarize(const std::vector<double>& signed_deg, double bucket, double& mean, double& stddev,
                      std::vector<std::size_t>& hist) {
  mean = 0.0;
  stddev = 0.0;
  hist.clear();
  if (signed_deg.empty()) return;
  for (double v : signed_deg) mean += std::abs(v);
  mean /= static_cast<double>(signed_deg.size());
  for (double v : signed_deg) stddev += (std::abs(v) - mean) * (std::abs(v) - mean);
  stddev = std::sqrt(stddev / static_cast<double>(signed_deg.size()));
  for (double v : signed_deg) {
    const auto idx = static_cast<std::size_t>(std::floor(std::abs(v) / bucket));
    if (idx >= hist.size()) hist.resize(idx + 1, 0);
    ++hist[idx];
  }
}

}  // namespace detail

inline DynamicsStats dynamics_stats(const std::vector<UnitVector3>& gt_normals, const UnitVector3& static_normal) {
  DynamicsStats s;
  s.frame_count = gt_normals.size();
  s.pitch_deviation.reserve(gt_normals.size());
  s.roll_deviation.reserve(gt_normals.size());
  for (const auto& n : gt_normals) {
    const PitchRoll d = normal_deviation(n, static_normal);
    s.pitch_deviation.push_back(rad_to_deg(d.pitch));
    s.roll_deviation.push_back(rad_to_deg(d.roll));
  }
  detail::summarize(s.pitch_deviation, s.bucket_width, s.pitch_mean, s.pitch_std, s.pitch_histogram);
  detail::summarize(s.roll_deviation, s.bucket_width, s.roll_mean, s.roll_std, s.roll_histogram);
  return s;
}

/// Normalized mean direction; used as the static normal when none is given.
inline UnitVector3 mean_normal(const std::vector<UnitVector3>& normals) {
  if (normals.empty()) throw EmptySequenceError();
  Vec3 sum = Vec3::Zero();
  for (const auto& n : normals) sum += n.vec();
  return UnitVector3(sum);
}

}  // namespace groundline
