#pragma once

// Ground-plane normal estimation from ego-motion.
//
// Per frame t the absolute pose T_t is formed, the filter prediction T'_t is
// taken before the observation is applied, the filter is updated with the
// rotation of T_t, and the residual G_t = rot(T_t)^-1 * T'_t is turned into a
// normal by reading column 1 of G_t * rot(E), E being the static
// sensor-to-ground extrinsic.
//
// Three baselines reuse the same extraction with a different residual:
//   constant  G_t = I
//   relative  G_t = rot(T_{t-1}^-1 * T_t)     (inter-frame rotation)
//   absolute  G_t = rot(T_t)^-1 * rot(T_0)    (pose w.r.t. the first frame)

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "groundline/errors.hpp"
#include "groundline/filter.hpp"
#include "groundline/geom.hpp"

namespace groundline {

enum class OdometryKind { Relative, Absolute };

/// Ego-motion stream. A Relative sequence holds the absolute initial pose T_0
/// in frame 0 followed by inter-frame motions T_t^{t-1} = T_{t-1}^-1 * T_t.
struct OdometrySequence {
  OdometryKind kind = OdometryKind::Absolute;
  std::vector<Transform> frames;
  double frame_rate = 10.0;  // Hz

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

struct ExtrinsicCalibration {
  Transform sensor_to_ground;

  /// Ground normal in the sensor frame while the vehicle is at rest.
  UnitVector3 static_normal() const { return normal_column(sensor_to_ground.rotation); }
};

struct NormalEstimate {
  std::size_t frame_index = 0;
  UnitVector3 normal = UnitVector3::unit_y();
  Rotation residual;   // G_t
  double pitch = 0.0;  // radians, Euler pitch of G_t
  bool burn_in = false;
};

enum class Initialization {
  FirstObservation,  // seed the estimate with rot(T_0)
  Identity,          // zero state, as in the reference algorithm
};

struct EstimatorOptions {
  std::size_t burn_in = 20;
  Initialization init = Initialization::FirstObservation;
  bool raw_residual = false;  // skip composition with the extrinsic
};

enum class EstimatorKind { Iekf, Constant, Relative, Absolute };

inline std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Iekf: return "iekf";
    case EstimatorKind::Constant: return "constant";
    case EstimatorKind::Relative: return "relative";
    case EstimatorKind::Absolute: return "absolute";
  }
  return "?";
}

inline EstimatorKind estimator_kind_from_string(std::string_view s) {
  if (s == "iekf") return EstimatorKind::Iekf;
  if (s == "constant") return EstimatorKind::Constant;
  if (s == "relative") return EstimatorKind::Relative;
  if (s == "absolute") return EstimatorKind::Absolute;
  throw InvalidConfigError("estimator", "unknown estimator '" + std::string(s) + "'");
}

/// Relative -> Absolute by chaining T_t = T_{t-1} * T_t^{t-1}.
inline OdometrySequence accumulate(const OdometrySequence& seq) {
  if (seq.kind != OdometryKind::Relative) throw AlreadyAbsoluteError();
  OdometrySequence out{OdometryKind::Absolute, {}, seq.frame_rate};
  out.frames.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i == 0) {
      out.frames.push_back(seq.frames[0]);
      continue;
    }
    Transform t = out.frames.back() * seq.frames[i];
    if (i % 100 == 0) t.rotation = t.rotation.orthonormalized();
    out.frames.push_back(t);
  }
  return out;
}

/// Absolute -> Relative; inverse of accumulate().
inline OdometrySequence differentiate(const OdometrySequence& seq) {
  if (seq.kind != OdometryKind::Absolute) throw Error("differentiate expects an absolute sequence");
  OdometrySequence out{OdometryKind::Relative, {}, seq.frame_rate};
  out.frames.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.frames.push_back(i == 0 ? seq.frames[0] : seq.frames[i - 1].inverse() * seq.frames[i]);
  }
  return out;
}

/// Absolute poses for either kind of sequence.
inline std::vector<Transform> absolute_poses(const OdometrySequence& seq) {
  return seq.kind == OdometryKind::Absolute ? seq.frames : accumulate(seq).frames;
}

namespace detail {

inline double residual_pitch(const Rotation& g) {
  try {
    return euler_from_rotation(g).pitch;
  } catch (const GimbalLockError&) {
    return std::copysign(kPi / 2.0, -g(1, 2));
  }
}

/// Builds the estimate for one frame from a residual rotation.
inline NormalEstimate make_estimate(std::size_t index, const Rotation& residual,
                                    const ExtrinsicCalibration& extrinsic, const EstimatorOptions& opts) {
  const Rotation oriented = opts.raw_residual ? residual : residual * extrinsic.sensor_to_ground.rotation;
  const UnitVector3 reference = opts.raw_residual ? UnitVector3::unit_y() : extrinsic.static_normal();
  UnitVector3 n = normal_column(oriented);
  if (n.dot(reference) < 0.0) n = -n;
  return {index, n, residual, residual_pitch(residual), index < opts.burn_in};
}

}  // namespace detail

/// Streaming form of the estimator: feed absolute poses one at a time.
class GroundNormalEstimator {
 public:
  GroundNormalEstimator(ExtrinsicCalibration extrinsic, FilterParams params, EstimatorOptions opts = {})
      : extrinsic_(std::move(extrinsic)), opts_(opts), filter_(params) {
    params.validate();
  }

  NormalEstimate step(const Transform& absolute_pose) {
    const Rotation& observed = absolute_pose.rotation;
    if (frame_ == 0) {
      FilterState init;
      if (opts_.init == Initialization::FirstObservation) init.estimate = observed;
      filter_.reset(init);
    }
    const Rotation predicted = filter_.step(observed);
    const Rotation residual = observed.inverse() * predicted;
    return detail::make_estimate(frame_++, residual, extrinsic_, opts_);
  }

  const FilterState& state() const { return filter_.state(); }
  std::size_t frames_seen() const { return frame_; }

 private:
  ExtrinsicCalibration extrinsic_;
  EstimatorOptions opts_;
  InvariantEkf filter_;
  std::size_t frame_ = 0;
};

inline std::vector<NormalEstimate> estimate_normals(const OdometrySequence& seq, const ExtrinsicCalibration& extrinsic,
                                                    const FilterParams& params, const EstimatorOptions& opts = {}) {
  if (seq.empty()) throw EmptySequenceError();
  GroundNormalEstimator est(extrinsic, params, opts);
  std::vector<NormalEstimate> out;
  out.reserve(seq.size());
  if (seq.kind == OdometryKind::Absolute) {
    for (const auto& pose : seq.frames) out.push_back(est.step(pose));
  } else {
    Transform pose = seq.frames.front();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) {
        pose = pose * seq.frames[i];
        if (i % 100 == 0) pose.rotation = pose.rotation.orthonormalized();
      }
      out.push_back(est.step(pose));
    }
  }
  return out;
}

inline std::vector<NormalEstimate> baseline_constant(const OdometrySequence& seq, const ExtrinsicCalibration& extrinsic,
                                                     const EstimatorOptions& opts = {}) {
  std::vector<NormalEstimate> out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out.push_back(detail::make_estimate(i, Rotation(), extrinsic, opts));
  return out;
}

inline std::vector<NormalEstimate> baseline_relative(const OdometrySequence& seq, const ExtrinsicCalibration& extrinsic,
                                                     const EstimatorOptions& opts = {}) {
  std::vector<NormalEstimate> out;
  out.reserve(seq.size());
  const OdometrySequence rel = seq.kind == OdometryKind::Relative ? seq : differentiate(seq);
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const Rotation g = i == 0 ? Rotation() : rel.frames[i].rotation;
    out.push_back(detail::make_estimate(i, g, extrinsic, opts));
  }
  return out;
}

inline std::vector<NormalEstimate> baseline_absolute(const OdometrySequence& seq, const ExtrinsicCalibration& extrinsic,
                                                     const EstimatorOptions& opts = {}) {
  std::vector<NormalEstimate> out;
  out.reserve(seq.size());
  const std::vector<Transform> poses = absolute_poses(seq);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Rotation g = poses[i].rotation.inverse() * poses.front().rotation;
    out.push_back(detail::make_estimate(i, g, extrinsic, opts));
  }
  return out;
}

inline std::vector<NormalEstimate> run_estimator(EstimatorKind kind, const OdometrySequence& seq,
                                                 const ExtrinsicCalibration& extrinsic, const FilterParams& params,
                                                 const EstimatorOptions& opts = {}) {
  switch (kind) {
    case EstimatorKind::Iekf: return estimate_normals(seq, extrinsic, params, opts);
    case EstimatorKind::Constant: return baseline_constant(seq, extrinsic, opts);
    case EstimatorKind::Relative: return baseline_relative(seq, extrinsic, opts);
    case EstimatorKind::Absolute: return baseline_absolute(seq, extrinsic, opts);
  }
  return {};
}

inline std::vector<UnitVector3> normals_of(const std::vector<NormalEstimate>& estimates) {
  std::vector<UnitVector3> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(e.normal);
  return out;
}

}  // namespace groundline
