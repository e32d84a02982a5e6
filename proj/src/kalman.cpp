#include "amot/kalman.hpp"

#include <cmath>

namespace amot::kalman {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Mat48 projection() {
  Mat48 h = Mat48::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

Vec4 measurement(const BBox& b) { return Vec4(b.cx(), b.cy(), b.w() / b.h(), b.h()); }

}  // namespace

KalmanState init(const BBox& b) {
  KalmanState s;
  s.mean.head<4>() = measurement(b);
  s.mean.tail<4>().setZero();
  const double h = b.h();
  Vec8 std;
  std << 2 * kStdWeightPosition * h, 2 * kStdWeightPosition * h, 1e-2, 2 * kStdWeightPosition * h,
      10 * kStdWeightVelocity * h, 10 * kStdWeightVelocity * h, 1e-5, 10 * kStdWeightVelocity * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanState predict(const KalmanState& s) {
  static const Mat8 f = transition();
  const double h = s.mean(3);
  Vec8 std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-2, kStdWeightPosition * h,
      kStdWeightVelocity * h, kStdWeightVelocity * h, 1e-5, kStdWeightVelocity * h;
  const Mat8 q = std.array().square().matrix().asDiagonal();

  KalmanState out;
  out.mean = f * s.mean;
  // A shrinking box never predicts through zero size.
  for (int i : {2, 3}) {
    if (!(out.mean(i) > 0.0)) {
      out.mean(i) = s.mean(i);
      out.mean(i + 4) = 0.0;
    }
  }
  out.covariance = f * s.covariance * f.transpose() + q;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KalmanState update(const KalmanState& s, const BBox& z) {
  static const Mat48 hm = projection();
  const double h = s.mean(3);
  Vec4 std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-1, kStdWeightPosition * h;
  const Mat4 r = std.array().square().matrix().asDiagonal();

  const Mat4 innovation_cov = hm * s.covariance * hm.transpose() + r;
  const Eigen::LLT<Mat4> llt(innovation_cov);
  if (llt.info() != Eigen::Success || !innovation_cov.allFinite()) {
    throw DegenerateInnovation("kalman update: innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, solved as S K^T = H P.
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(hm * s.covariance).transpose();
  const Vec4 innovation = measurement(z) - hm * s.mean;

  KalmanState out;
  out.mean = s.mean + gain * innovation;
  // Joseph form keeps the posterior symmetric PSD.
  const Mat8 ikh = Mat8::Identity() - gain * hm;
  out.covariance = ikh * s.covariance * ikh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  // Only a pathological measurement sequence drives these non-positive.
  if (!(out.mean(3) > 0.0)) out.mean(3) = z.h();
  if (!(out.mean(2) > 0.0)) out.mean(2) = z.w() / z.h();
  return out;
}

}  // namespace amot::kalman
