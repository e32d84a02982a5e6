#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace amot::fixtures {

using Precise = boost::multiprecision::cpp_bin_float_50;

// 1 - exp(-(df + db) / (2 sigma^2)) carried out in 50 decimal digits.
inline double precise_amc(double df, double db, double sigma) {
  const Precise s = Precise(df) + Precise(db);
  const Precise sg = sigma;
  return static_cast<double>(Precise(1) - boost::multiprecision::exp(-s / (2 * sg * sg)));
}

// 1 - (1 - amc * iou) * (1 - app) carried out in 50 decimal digits.
inline double precise_unified(double amc, double iou_cost, double app) {
  const Precise m = Precise(amc) * Precise(iou_cost);
  return static_cast<double>(Precise(1) - (Precise(1) - m) * (Precise(1) - Precise(app)));
}

inline double relative_error(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace amot::fixtures
