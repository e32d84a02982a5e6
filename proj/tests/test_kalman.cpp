#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "amot/kalman.hpp"

using namespace amot;

namespace {

// Independent two-state (position, velocity) filter for one coordinate.
// With diagonal noise the 8-state filter decouples into four of these.
struct ScalarFilter {
  double p, v;
  double pp, pv, vv;  // covariance entries

  ScalarFilter(double z, double h)
      : p(z), v(0), pp(std::pow(2 * h / 20, 2)), pv(0), vv(std::pow(10 * h / 160, 2)) {}

  void predict(double h) {
    p += v;
    const double npp = pp + 2 * pv + vv + std::pow(h / 20, 2);
    const double npv = pv + vv;
    const double nvv = vv + std::pow(h / 160, 2);
    pp = npp, pv = npv, vv = nvv;
  }
  void update(double z, double h) {
    const double s = pp + std::pow(h / 20, 2);
    const double kp = pp / s, kv = pv / s;
    const double r = z - p;
    p += kp * r;
    v += kv * r;
    const double npp = (1 - kp) * pp;
    const double npv = (1 - kp) * pv;
    const double nvv = vv - kv * pv;
    pp = npp, pv = npv, vv = nvv;
  }
};

// Least-squares line through (t, z_t); returns the extrapolation at t_next.
double line_fit_predict(const std::vector<double>& z, double t_next) {
  const double n = static_cast<double>(z.size());
  double st = 0, sz = 0, stt = 0, stz = 0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    st += t, sz += z[t], stt += double(t) * t, stz += t * z[t];
  }
  const double slope = (n * stz - st * sz) / (n * stt - st * st);
  const double icept = (sz - slope * st) / n;
  return icept + slope * t_next;
}

void expect_symmetric_psd(const Eigen::Matrix<double, 8, 8>& c, double tol) {
  EXPECT_LE((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(c);
  EXPECT_GE(es.eigenvalues().minCoeff(), -tol);
}

}  // namespace

TEST(KalmanInit, MeanFromBox) {
  const KalmanState s = kalman::init(BBox(10, 10, 4, 8));
  Eigen::Matrix<double, 8, 1> expected;
  expected << 10, 10, 0.5, 8, 0, 0, 0, 0;
  EXPECT_EQ(s.mean, expected);
  const KalmanState o = kalman::init(BBox(0, 0, 1, 1));
  EXPECT_EQ(o.mean(0), 0);
  EXPECT_EQ(o.mean(1), 0);
  EXPECT_TRUE(o.mean.tail<4>().isZero());
}

TEST(KalmanInit, CovarianceDiagonalPositive) {
  const KalmanState s = kalman::init(BBox(3, 4, 2, 6));
  expect_symmetric_psd(s.covariance, 0.0);
  for (int i = 0; i < 8; ++i) EXPECT_GT(s.covariance(i, i), 0.0);
  EXPECT_DOUBLE_EQ(s.covariance(0, 0), std::pow(2.0 * 6 / 20, 2));
  EXPECT_DOUBLE_EQ(s.covariance(4, 4), std::pow(10.0 * 6 / 160, 2));
  EXPECT_TRUE((s.covariance - Eigen::Matrix<double, 8, 8>(s.covariance.diagonal().asDiagonal())).isZero());
}

TEST(KalmanPredict, ConstantVelocityStep) {
  KalmanState s = kalman::init(BBox(10, 10, 4, 8));
  s.mean(4) = 1.0;
  const KalmanState p = kalman::predict(s);
  EXPECT_DOUBLE_EQ(p.box().cx(), 11.0);
  EXPECT_DOUBLE_EQ(p.box().cy(), 10.0);

  const KalmanState still = kalman::predict(kalman::init(BBox(7, 3, 2, 2)));
  EXPECT_DOUBLE_EQ(still.box().cx(), 7.0);
  EXPECT_DOUBLE_EQ(still.box().cy(), 3.0);
}

TEST(KalmanPredict, ProcessNoiseOnlyGrowsTrace) {
  Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(1, 10);
  for (int i = 0; i < 100; ++i) {
    KalmanState s = kalman::init(BBox(u(gen), u(gen), u(gen), u(gen)));
    for (int k = 0; k < i % 5; ++k) s = kalman::update(kalman::predict(s), BBox(u(gen), u(gen), u(gen), u(gen)));
    const KalmanState p = kalman::predict(s);
    EXPECT_GE(p.covariance.trace(), (f * s.covariance * f.transpose()).trace() - 1e-12);
  }
}

TEST(KalmanUpdate, ZeroInnovationKeepsMean) {
  KalmanState s = kalman::predict(kalman::init(BBox(10, 12, 4, 8)));
  const KalmanState u = kalman::update(s, s.box());
  EXPECT_NEAR(u.mean(0), 10, 1e-12);
  EXPECT_NEAR(u.mean(1), 12, 1e-12);
  EXPECT_NEAR(u.mean(2), 0.5, 1e-12);
  EXPECT_NEAR(u.mean(3), 8, 1e-12);
}

TEST(KalmanUpdate, PosteriorVarianceContracts) {
  const KalmanState prior = kalman::predict(kalman::init(BBox(10, 12, 4, 8)));
  const KalmanState post = kalman::update(prior, BBox(11, 12.5, 4, 8));
  for (int i = 0; i < 4; ++i) EXPECT_LE(post.covariance(i, i), prior.covariance(i, i));
}

TEST(KalmanUpdate, DegenerateInnovationThrows) {
  KalmanState s = kalman::init(BBox(10, 12, 4, 8));
  s.covariance.setZero();
  s.covariance(0, 0) = -1e6;
  EXPECT_THROW(kalman::update(s, BBox(10, 12, 4, 8)), kalman::DegenerateInnovation);
}

TEST(KalmanUpdate, MatchesScalarRecursionOnStationaryBox) {
  const BBox truth(10, 10, 4, 8);
  KalmanState s = kalman::init(BBox(12, 9, 4, 8));
  ScalarFilter ref(12, 8);
  for (int step = 0; step < 10; ++step) {
    s = kalman::update(kalman::predict(s), truth);
    ref.predict(8);
    ref.update(10, 8);
    EXPECT_NEAR(s.mean(0), ref.p, 1e-9);
    EXPECT_NEAR(s.mean(4), ref.v, 1e-9);
    EXPECT_NEAR(s.covariance(0, 0), ref.pp, 1e-9);
    EXPECT_NEAR(s.covariance(0, 4), ref.pv, 1e-9);
  }
  EXPECT_LT(std::abs(s.box().cx() - 10), 0.1);
  EXPECT_LT(std::abs(s.box().cy() - 10), 0.1);
}

TEST(KalmanProperty, ConstantVelocityPredictionConvergesToLineFit) {
  std::mt19937_64 gen(17);
  // The lag after 20 cycles is about 0.0275 * |v| whatever the box size, so
  // speeds stay within 1.5 cells/frame.
  std::uniform_real_distribution<double> speed(0, 1.5), heading(0, 2 * std::numbers::pi), pos(20, 80), size(3, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const double sp = speed(gen), th = heading(gen);
    const double vx = sp * std::cos(th), vy = sp * std::sin(th), x0 = pos(gen), y0 = pos(gen), w = size(gen), h = size(gen);
    std::vector<double> xs, ys;
    KalmanState s = kalman::init(BBox(x0, y0, w, h));
    xs.push_back(x0), ys.push_back(y0);
    double err = 0;
    for (int t = 1; t <= 20; ++t) {
      s = kalman::predict(s);
      const double zx = x0 + vx * t, zy = y0 + vy * t;
      if (xs.size() < 2) {
        s = kalman::update(s, BBox(zx, zy, w, h));
        xs.push_back(zx), ys.push_back(zy);
        continue;
      }
      const double lx = line_fit_predict(xs, t), ly = line_fit_predict(ys, t);
      err = std::hypot(s.box().cx() - lx, s.box().cy() - ly);
      ASSERT_NEAR(lx, zx, 1e-6);  // the oracle is exact on noiseless lines
      s = kalman::update(s, BBox(zx, zy, w, h));
      xs.push_back(zx), ys.push_back(zy);
    }
    EXPECT_LT(err, 0.05) << "trial " << trial;
  }
}

TEST(KalmanProperty, CovarianceStaysSymmetricPsd) {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> jitter(0, 1.5);
  std::uniform_real_distribution<double> size(2, 12);
  KalmanState s = kalman::init(BBox(50, 50, 5, 8));
  double x = 50, y = 50;
  for (int i = 0; i < 1000; ++i) {
    s = kalman::predict(s);
    expect_symmetric_psd(s.covariance, 1e-6);
    x += jitter(gen), y += jitter(gen);
    if (i % 7 != 3) {
      s = kalman::update(s, BBox(x, y, size(gen), size(gen)));
      expect_symmetric_psd(s.covariance, 1e-6);
    }
    ASSERT_GT(s.mean(3), 0.0);
  }
}
