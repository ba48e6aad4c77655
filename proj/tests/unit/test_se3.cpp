// Copyright 2026 The radloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "radloc/errors.hpp"
#include "radloc/se3.hpp"

namespace radloc
{
namespace
{

constexpr double kPi = std::numbers::pi;

Vector3 random_unit(RandomStream & rng)
{
  Vector3 v(rng.normal(1.0), rng.normal(1.0), rng.normal(1.0));
  return v.normalized();
}

Twist random_twist(RandomStream & rng, double max_angle, double max_trans)
{
  Twist t;
  t.rot = random_unit(rng) * rng.uniform(0.0, max_angle);
  for (int a = 0; a < 3; ++a) {
    t.trans[a] = rng.uniform(-max_trans, max_trans);
  }
  return t;
}

Rotation rz(double angle) { return Rotation::about_axis(Vector3::UnitZ(), angle); }

// Integrates dX/ds = X * hat(xi) over s in [0, 1] with forward Euler.
Pose integrate_twist_ode(const Twist & xi, int steps)
{
  Matrix3 r = Matrix3::Identity();
  Vector3 p = Vector3::Zero();
  const double h = 1.0 / steps;
  const Matrix3 w = skew(xi.rot);
  for (int i = 0; i < steps; ++i) {
    p += h * (r * xi.trans);
    r += h * (r * w);
  }
  return Pose(Rotation::from_matrix(r), p);
}

TEST(ExpMap, ZeroTwistIsIdentity)
{
  const Pose p = exp_map(Twist{});
  EXPECT_EQ(p.rotation().matrix(), Matrix3::Identity());
  EXPECT_EQ(p.translation(), Vector3::Zero());
}

TEST(ExpMap, PureRotationAboutZ)
{
  const Pose p = exp_map(Twist{Vector3(0, 0, kPi / 2), Vector3::Zero()});
  Matrix3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((p.rotation().matrix() - expected).norm(), 1e-12);
  EXPECT_EQ(p.translation(), Vector3::Zero());
}

TEST(ExpMap, CoupledTranslationMatchesOdeIntegration)
{
  const Twist xi{Vector3(0, 0, kPi / 2), Vector3(1, 0, 0)};
  const Pose oracle = integrate_twist_ode(xi, 1000000);
  const Pose p = exp_map(xi);
  // Forward Euler with 1e6 steps is first-order accurate to ~1e-6.
  EXPECT_LT((p.translation() - oracle.translation()).norm(), 1e-5);
  EXPECT_LT((p.rotation().matrix() - oracle.rotation().matrix()).norm(), 1e-5);
  // Closed form for a planar screw: (sin t / t, (1 - cos t) / t, 0).
  EXPECT_NEAR(p.translation().x(), 2.0 / kPi, 1e-12);
  EXPECT_NEAR(p.translation().y(), 2.0 / kPi, 1e-12);
}

TEST(ExpMap, SmallAngleBranchMatchesSeries)
{
  // Around the 1e-7 branch point the cubic terms are ~1e-21, so the truncated
  // series is exact to double precision on both sides.
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vector3 axis = random_unit(rng);
    const Vector3 trans(rng.normal(1.0), rng.normal(1.0), rng.normal(1.0));
    for (const double angle : {0.5e-7, 0.99e-7, 1.01e-7, 2e-7}) {
      const Matrix3 w = skew(axis * angle);
      const Pose p = exp_map(Twist{axis * angle, trans});
      const Matrix3 r = Matrix3::Identity() + w + 0.5 * w * w;
      const Matrix3 v = Matrix3::Identity() + 0.5 * w + w * w / 6.0;
      EXPECT_LT((p.rotation().matrix() - r).norm(), 1e-15);
      EXPECT_LT((p.translation() - v * trans).norm(), 1e-14);
    }
  }
}

TEST(LogMap, IdentityIsZero)
{
  const Twist t = log_map(Pose::identity());
  EXPECT_EQ(t.rot, Vector3::Zero());
  EXPECT_EQ(t.trans, Vector3::Zero());
}

TEST(LogMap, RoundTripOverRandomTwists)
{
  RandomStream rng(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Twist d = random_twist(rng, 3.0, 5.0);
    const Twist back = log_map(exp_map(d));
    worst = std::max(worst, (back.vector() - d.vector()).norm());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(LogMap, NearHalfTurnAboutX)
{
  for (const double eps : {1e-2, 1e-4, 1e-5}) {
    const Pose p(Rotation::about_axis(Vector3::UnitX(), kPi - eps), Vector3::Zero());
    const Twist t = log_map(p);
    EXPECT_NEAR(t.rot.x(), kPi - eps, 1e-9) << eps;
    EXPECT_NEAR(t.rot.y(), 0.0, 1e-9);
    EXPECT_NEAR(t.rot.z(), 0.0, 1e-9);
  }
}

TEST(LogMap, ThrowsWithinTolerranceOfPi)
{
  for (const double eps : {0.0, 1e-7, 5e-7}) {
    const Pose p(Rotation::about_axis(Vector3(1, 2, 3), kPi - eps), Vector3(1, 0, 0));
    EXPECT_THROW(log_map(p), AngleNearPiError) << eps;
  }
}

TEST(SampleNoise, ZeroParamsGiveZeroTwist)
{
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const Twist t = sample_noise({0.0, 0.0}, rng);
    EXPECT_EQ(t.vector(), Vector6::Zero());
  }
}

TEST(SampleNoise, MomentsMatchParameters)
{
  constexpr int kDraws = 100000;
  const NoiseParams params{0.1, 0.02};
  RandomStream rng(2024);
  Vector6 sum = Vector6::Zero();
  Vector6 sum_sq = Vector6::Zero();
  for (int i = 0; i < kDraws; ++i) {
    const Vector6 v = sample_noise(params, rng).vector();
    sum += v;
    sum_sq += v.cwiseProduct(v);
  }
  for (int c = 0; c < 6; ++c) {
    const double sigma = c < 3 ? params.sigma_r : params.sigma_t;
    const double mean = sum[c] / kDraws;
    const double sd = std::sqrt(sum_sq[c] / kDraws - mean * mean);
    // Standard error of a sample standard deviation is sigma / sqrt(2N).
    EXPECT_NEAR(sd, sigma, 3.0 * sigma / std::sqrt(2.0 * kDraws)) << "component " << c;
    EXPECT_LT(std::abs(mean), 4.0 * sigma / std::sqrt(static_cast<double>(kDraws))) << "component " << c;
  }
}

TEST(SampleNoise, FixedSeedIsBitIdentical)
{
  RandomStream a(77);
  RandomStream b(77);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_noise({0.3, 0.7}, a).vector(), sample_noise({0.3, 0.7}, b).vector());
  }
}

TEST(Geodesic, BasicValues)
{
  const Rotation r = Rotation::about_axis(Vector3(1, 1, 0), 0.7);
  EXPECT_NEAR(rotation_geodesic_deg(r, r), 0.0, 1e-5);
  EXPECT_NEAR(rotation_geodesic_deg(Rotation::identity(), rz(kPi / 2)), 90.0, 1e-12);
}

TEST(Geodesic, AgreesWithLogMapAngle)
{
  RandomStream rng(5);
  for (int i = 0; i < 500; ++i) {
    const Rotation a = exp_map(random_twist(rng, 3.0, 0.0)).rotation();
    const Rotation b = exp_map(random_twist(rng, 3.0, 0.0)).rotation();
    const double angle = so3_log(a.inverse() * b).norm() * 180.0 / kPi;
    EXPECT_NEAR(rotation_geodesic_deg(a, b), angle, 1e-6);
  }
}

TEST(Pose, AssociativeWithIdentity)
{
  RandomStream rng(9);
  for (int i = 0; i < 200; ++i) {
    const Pose a = exp_map(random_twist(rng, 3.0, 2.0));
    const Pose b = exp_map(random_twist(rng, 3.0, 2.0));
    const Pose c = exp_map(random_twist(rng, 3.0, 2.0));
    const Pose l = (a * b) * c;
    const Pose r = a * (b * c);
    EXPECT_LT((l.matrix() - r.matrix()).norm(), 1e-12);
    EXPECT_LT(((a * Pose::identity()).matrix() - a.matrix()).norm(), 1e-15);
    EXPECT_LT(((a * a.inverse()).matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-12);
    EXPECT_LT(l.rotation().orthonormality_error(), 1e-9);
    EXPECT_NEAR(l.rotation().matrix().determinant(), 1.0, 1e-9);
  }
}

TEST(Pose, LongCompositionChainsStayOrthonormal)
{
  RandomStream rng(13);
  Pose p;
  for (int i = 0; i < 20000; ++i) {
    p = p * exp_map(random_twist(rng, 0.5, 0.1));
  }
  EXPECT_LT(p.rotation().orthonormality_error(), 1e-9);
  EXPECT_NEAR(p.rotation().matrix().determinant(), 1.0, 1e-9);
}

TEST(RotationAverage, EqualInputsReturnThatRotation)
{
  const Rotation r = Rotation::about_axis(Vector3(0.2, -1, 0.4), 1.1);
  const std::vector<Rotation> rs(7, r);
  const std::vector<double> ws(7, 1.0 / 7.0);
  EXPECT_LT((rotation_average(rs, ws).matrix() - r.matrix()).norm(), 1e-12);
}

TEST(RotationAverage, SymmetricPairAveragesToIdentity)
{
  const std::vector<Rotation> rs = {rz(20.0 * kPi / 180.0), rz(-20.0 * kPi / 180.0)};
  const std::vector<double> ws = {0.5, 0.5};
  EXPECT_LT(rotation_geodesic_deg(rotation_average(rs, ws), Rotation::identity()), 1e-6);
}

// Weighted geodesic cost evaluated through the trace formula only.
double geodesic_cost(const Rotation & r, const std::vector<Rotation> & rs, const std::vector<double> & ws)
{
  double c = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double d = rotation_geodesic_deg(r, rs[i]) * kPi / 180.0;
    c += ws[i] * d * d;
  }
  return c;
}

// Derivative-free compass search over the tangent space at `start`.
Rotation brute_force_average(const std::vector<Rotation> & rs, const std::vector<double> & ws, const Rotation & start)
{
  Rotation best = start;
  double best_cost = geodesic_cost(best, rs, ws);
  for (double h = 0.1; h > 1e-7; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int a = 0; a < 3; ++a) {
        for (const double sgn : {1.0, -1.0}) {
          Vector3 d = Vector3::Zero();
          d[a] = sgn * h;
          const Rotation cand = best * so3_exp(d);
          const double c = geodesic_cost(cand, rs, ws);
          if (c < best_cost) {
            best = cand;
            best_cost = c;
            improved = true;
          }
        }
      }
    }
  }
  return best;
}

TEST(RotationAverage, MatchesBruteForceOnClusteredSets)
{
  RandomStream rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Rotation center = exp_map(random_twist(rng, 3.0, 0.0)).rotation();
    std::vector<Rotation> rs;
    std::vector<double> ws;
    for (int i = 0; i < 5; ++i) {
      rs.push_back(center * so3_exp(random_unit(rng) * rng.uniform(0.0, 30.0 * kPi / 180.0)));
      ws.push_back(rng.uniform(0.05, 1.0));
    }
    double total = 0.0;
    for (const double w : ws) total += w;
    for (double & w : ws) w /= total;

    const Rotation karcher = rotation_average(rs, ws);
    const Rotation oracle = brute_force_average(rs, ws, center);
    EXPECT_LT(rotation_geodesic_deg(karcher, oracle) * kPi / 180.0, 1e-3) << "trial " << trial;

    Vector3 grad = Vector3::Zero();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      grad += ws[i] * so3_log(karcher.inverse() * rs[i]);
    }
    EXPECT_LT(grad.norm(), 1e-6);
  }
}

TEST(RotationAverage, RejectsMismatchedInputs)
{
  const std::vector<Rotation> rs(2);
  const std::vector<double> ws = {1.0};
  EXPECT_THROW(rotation_average(rs, ws), BadCountError);
  EXPECT_THROW(rotation_average({}, {}), BadCountError);
}

TEST(RotationAverage, WeightScaleDoesNotMatter)
{
  RandomStream rng(32);
  const Rotation center = exp_map(random_twist(rng, 3.0, 0.0)).rotation();
  std::vector<Rotation> rs;
  std::vector<double> ws;
  for (int i = 0; i < 12; ++i) {
    rs.push_back(center * so3_exp(random_unit(rng) * rng.uniform(0.0, 0.6)));
    ws.push_back(rng.uniform(0.1, 1.0));
  }
  std::vector<double> normalized = ws;
  double total = 0.0;
  for (const double w : ws) total += w;
  for (double & w : normalized) w /= total;
  EXPECT_LT(rotation_geodesic_deg(rotation_average(rs, ws), rotation_average(rs, normalized)), 1e-9);

  const std::vector<double> zeros(rs.size(), 0.0);
  EXPECT_THROW(rotation_average(rs, zeros), BadCountError);
}

TEST(RotationAverage, NonFiniteInputReportsNonConvergence)
{
  Matrix3 bad = Matrix3::Identity();
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<Rotation> rs = {Rotation::from_matrix(bad), Rotation::identity()};
  const std::vector<double> ws = {0.5, 0.5};
  EXPECT_THROW(rotation_average(rs, ws), NonConvergenceError);
}

}  // namespace
}  // namespace radloc
