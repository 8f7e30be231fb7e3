#ifndef GTRACK_KALMAN_HPP
#define GTRACK_KALMAN_HPP

#include <Eigen/Dense>

#include "gtrack/types.hpp"

namespace gtrack {

struct KalmanNoise {
  double p0 = 100.0;  // initial error covariance scale
  double q = 0.01;    // process noise scale
  double r = 1.0;     // measurement noise scale

  friend bool operator==(const KalmanNoise&, const KalmanNoise&) = default;
};

/// Constant-velocity filter over (row, col, v_row, v_col), one frame per step.
struct KalmanState {
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  using Mat4 = Eigen::Matrix<double, 4, 4>;
  using Mat24 = Eigen::Matrix<double, 2, 4>;
  using Mat2 = Eigen::Matrix<double, 2, 2>;

  Vec4 x = Vec4::Zero();
  Mat4 P = Mat4::Identity();
  Mat4 A = Mat4::Identity();
  Mat24 H = Mat24::Zero();
  Mat4 Q = Mat4::Identity();
  Mat2 R = Mat2::Identity();

  Point position() const { return {x(0), x(1)}; }
  Point velocity() const { return {x(2), x(3)}; }
};

inline KalmanState kalman_init(const Point& centroid, const KalmanNoise& noise = {}) {
  KalmanState s;
  s.x << centroid.row, centroid.col, 0.0, 0.0;
  s.P = noise.p0 * KalmanState::Mat4::Identity();
  s.Q = noise.q * KalmanState::Mat4::Identity();
  s.R = noise.r * KalmanState::Mat2::Identity();
  s.A << 1, 0, 1, 0,
         0, 1, 0, 1,
         0, 0, 1, 0,
         0, 0, 0, 1;
  s.H << 1, 0, 0, 0,
         0, 1, 0, 0;
  return s;
}

/// A priori step: x = A x, P = A P A^T + Q.
inline KalmanState kalman_predict(KalmanState s) {
  s.x = s.A * s.x;
  s.P = s.A * s.P * s.A.transpose() + s.Q;
  return s;
}

/// A posteriori step with a (row, col) measurement. P is re-symmetrised afterwards.
inline KalmanState kalman_correct(KalmanState s, const Point& measurement) {
  const Eigen::Vector2d y(measurement.row, measurement.col);
  const KalmanState::Mat2 innovation_cov = s.H * s.P * s.H.transpose() + s.R;
  const Eigen::Matrix<double, 4, 2> K = s.P * s.H.transpose() * innovation_cov.inverse();
  s.x = s.x + K * (y - s.H * s.x);
  s.P = (KalmanState::Mat4::Identity() - K * s.H) * s.P;
  s.P = 0.5 * (s.P + s.P.transpose()).eval();
  return s;
}

}  // namespace gtrack

#endif  // GTRACK_KALMAN_HPP
