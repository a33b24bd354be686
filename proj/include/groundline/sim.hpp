#pragma once

// Synthetic straight-line drive with analytic ground-truth normals.
//
// Camera orientation in the world is S(slope) * O(t): the slope rotation S is
// low frequency (grade profile over distance, nose-up about the world x axis)
// and the oscillation O(t) = R_x(pitch(t)) * R_z(roll(t)) is a pair of
// sinusoids in the camera frame. Because the car follows the road, the ground normal seen by
// the camera is O(t)^T * (0, 1, 0) regardless of slope.
//
// Odometry is the noise-free relative motion perturbed on the right by an
// isotropic Gaussian in so(3) plus a constant drift split between the pitch
// and yaw axes.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "groundline/errors.hpp"
#include "groundline/estimator.hpp"
#include "groundline/geom.hpp"

namespace groundline {

struct SlopePoint {
  double distance = 0.0;  // meters along the path
  double grade = 0.0;     // percent
};

struct SimConfig {
  std::size_t frames = 1000;
  double frame_rate = 10.0;        // Hz
  double pitch_amplitude = 1.0;    // degrees
  double pitch_period = 2.0;       // seconds
  double roll_amplitude = 0.0;     // degrees
  double roll_period = 3.0;        // seconds
  std::vector<SlopePoint> slope_profile;  // piecewise linear; empty = flat
  double speed = 10.0;             // m/s
  double odometry_noise_std = 0.02;  // degrees per frame, per axis
  double drift_rate = 0.0;         // degrees per frame
  std::uint64_t seed = 0;

  void validate() const {
    if (frames == 0) throw InvalidConfigError("frames", "must be > 0");
    if (!(frame_rate > 0.0)) throw InvalidConfigError("frame_rate", "must be > 0");
    if (!(pitch_amplitude >= 0.0)) throw InvalidConfigError("pitch_amplitude", "must be >= 0");
    if (!(roll_amplitude >= 0.0)) throw InvalidConfigError("roll_amplitude", "must be >= 0");
    if (!(pitch_period > 0.0)) throw InvalidConfigError("pitch_period", "must be > 0");
    if (!(roll_period > 0.0)) throw InvalidConfigError("roll_period", "must be > 0");
    if (!(speed >= 0.0) || !std::isfinite(speed)) throw InvalidConfigError("speed", "must be finite and >= 0");
    if (!(odometry_noise_std >= 0.0)) throw InvalidConfigError("odometry_noise_std", "must be >= 0");
    if (!std::isfinite(drift_rate)) throw InvalidConfigError("drift_rate", "must be finite");
    for (std::size_t i = 0; i < slope_profile.size(); ++i) {
      const auto& p = slope_profile[i];
      if (!std::isfinite(p.distance) || !std::isfinite(p.grade))
        throw InvalidConfigError("slope_profile", "non-finite entry");
      if (i > 0 && !(p.distance > slope_profile[i - 1].distance))
        throw InvalidConfigError("slope_profile", "distances must be strictly increasing");
    }
  }
};

struct SimOutput {
  OdometrySequence odometry;  // Relative, noisy
  std::vector<Transform> gt_poses;
  std::vector<UnitVector3> gt_normals;
  std::vector<double> gt_pitch;  // oscillation pitch, radians
  std::vector<double> gt_roll;   // oscillation roll, radians
};

/// Grade (percent) at `distance`, linearly interpolated and clamped at the ends.
inline double grade_at(const std::vector<SlopePoint>& profile, double distance) {
  if (profile.empty()) return 0.0;
  if (distance <= profile.front().distance) return profile.front().grade;
  if (distance >= profile.back().distance) return profile.back().grade;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    if (distance <= profile[i].distance) {
      const auto& a = profile[i - 1];
      const auto& b = profile[i];
      const double f = (distance - a.distance) / (b.distance - a.distance);
      return a.grade + f * (b.grade - a.grade);
    }
  }
  return profile.back().grade;
}

inline double slope_angle(double grade_percent) { return std::atan(grade_percent / 100.0); }

inline SimOutput simulate(const SimConfig& cfg) {
  cfg.validate();
  SimOutput out;
  out.gt_poses.reserve(cfg.frames);
  out.gt_normals.reserve(cfg.frames);

  const double dt = 1.0 / cfg.frame_rate;
  Vec3 position = Vec3::Zero();
  for (std::size_t k = 0; k < cfg.frames; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double dist = cfg.speed * t;
    const Rotation slope = Rotation::about_x(slope_angle(grade_at(cfg.slope_profile, dist)));
    const double pitch = deg_to_rad(cfg.pitch_amplitude) * std::sin(2.0 * kPi * t / cfg.pitch_period);
    const double roll = deg_to_rad(cfg.roll_amplitude) * std::sin(2.0 * kPi * t / cfg.roll_period);
    const Rotation osc = Rotation::about_x(pitch) * Rotation::about_z(roll);

    if (k > 0) {
      // Advance along the road direction at the previous frame.
      const Rotation prev_slope = Rotation::about_x(slope_angle(grade_at(cfg.slope_profile, cfg.speed * (t - dt))));
      position += cfg.speed * dt * (prev_slope * Vec3::UnitZ());
    }
    out.gt_poses.push_back({slope * osc, position});
    out.gt_normals.push_back(osc.inverse() * UnitVector3::unit_y());
    out.gt_pitch.push_back(pitch);
    out.gt_roll.push_back(roll);
  }

  std::mt19937_64 rng(cfg.seed);
  const double sigma = deg_to_rad(cfg.odometry_noise_std);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  const double drift_axis = deg_to_rad(cfg.drift_rate) / std::sqrt(2.0);
  const TangentVector drift(drift_axis, drift_axis, 0.0);

  out.odometry = OdometrySequence{OdometryKind::Relative, {}, cfg.frame_rate};
  out.odometry.frames.reserve(cfg.frames);
  out.odometry.frames.push_back(out.gt_poses.front());
  for (std::size_t k = 1; k < cfg.frames; ++k) {
    Transform rel = out.gt_poses[k - 1].inverse() * out.gt_poses[k];
    if (sigma > 0.0) {
      const TangentVector w(noise(rng), noise(rng), noise(rng));
      rel.rotation = rel.rotation * Rotation::exp(w);
    }
    if (cfg.drift_rate != 0.0) rel.rotation = rel.rotation * Rotation::exp(drift);
    out.odometry.frames.push_back(rel);
  }
  return out;
}

}  // namespace groundline
