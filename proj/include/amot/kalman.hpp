#pragma once

#include <stdexcept>

#include "amot/types.hpp"

namespace amot {

// Constant-velocity filter over (cx, cy, aspect, h) and their velocities,
// one frame per step. Noise standard deviations scale with box height.
namespace kalman {

inline constexpr double kStdWeightPosition = 1.0 / 20.0;
inline constexpr double kStdWeightVelocity = 1.0 / 160.0;

class DegenerateInnovation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

KalmanState init(const BBox& b);
KalmanState predict(const KalmanState& s);
// Throws DegenerateInnovation if the innovation covariance is not positive definite.
KalmanState update(const KalmanState& s, const BBox& z);

}  // namespace kalman
}  // namespace amot
