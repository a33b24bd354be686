#pragma once

// Invariant extended Kalman filter on SO(3) with an identity (zero-order)
// process model and an identity measurement model.
//
// Error convention is left-invariant: the innovation is log(x^-1 * z) and the
// correction multiplies on the right, x <- x * exp(K * nu). Conjugating the
// whole problem by a fixed rotation on the left therefore leaves the
// innovations, gains and covariances untouched.

#include <Eigen/Dense>

#include "groundline/errors.hpp"
#include "groundline/geom.hpp"

namespace groundline {

struct FilterParams {
  double process_variance = 1e-2;     // p, rad^2 per frame
  double measurement_variance = 1.0;  // m, rad^2

  void validate() const {
    if (!(process_variance > 0.0)) throw InvalidConfigError("process_variance", "must be > 0");
    if (!(measurement_variance > 0.0)) throw InvalidConfigError("measurement_variance", "must be > 0");
  }
};

struct FilterState {
  Rotation estimate;
  Mat3 covariance = Mat3::Identity();
};

struct Prediction {
  Rotation rotation;
  FilterState state;
};

/// Identity process model: the estimate is carried over and p*I is added to C.
inline Prediction predict(const FilterState& state, const FilterParams& params) {
  FilterState next = state;
  next.covariance += params.process_variance * Mat3::Identity();
  return {state.estimate, next};
}

inline FilterState update(const FilterState& state, const Rotation& observation, const FilterParams& params) {
  const Mat3& c = state.covariance;
  const Mat3 s = c + params.measurement_variance * Mat3::Identity();
  const Eigen::FullPivLU<Mat3> lu(s);
  if (!lu.isInvertible()) throw CovarianceSingularError();

  // K = C S^-1. C and S are symmetric, so K^T = S^-1 C.
  const Mat3 gain = lu.solve(c).transpose();
  const TangentVector innovation = (state.estimate.inverse() * observation).log();

  FilterState next;
  next.estimate = (state.estimate * Rotation::exp(gain * innovation)).orthonormalized();
  const Mat3 cov = (Mat3::Identity() - gain) * c;
  next.covariance = 0.5 * (cov + cov.transpose());
  return next;
}

/// Stateful wrapper running predict/update in sequence.
class InvariantEkf {
 public:
  explicit InvariantEkf(const FilterParams& params, FilterState initial = {})
      : params_(params), state_(std::move(initial)) {}

  /// Returns the predicted rotation (the estimate before this observation).
  Rotation step(const Rotation& observation) {
    Prediction pred = predict(state_, params_);
    state_ = update(pred.state, observation, params_);
    return pred.rotation;
  }

  const FilterState& state() const { return state_; }
  const FilterParams& params() const { return params_; }
  void reset(FilterState state) { state_ = std::move(state); }

 private:
  FilterParams params_;
  FilterState state_;
};

}  // namespace groundline
