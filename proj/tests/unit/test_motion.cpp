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
#include <filesystem>
#include <fstream>
#include <vector>

#include "radloc/errors.hpp"
#include "radloc/motion.hpp"

namespace radloc
{
namespace
{

std::vector<TrajectorySample> random_walk(int n, RandomStream & rng)
{
  std::vector<TrajectorySample> traj;
  Pose x = Pose::identity();
  for (int i = 0; i < n; ++i) {
    traj.push_back({0.1 * i + 3.0, x});
    Twist t{Vector3(rng.normal(0.1), rng.normal(0.1), rng.normal(0.1)), Vector3(rng.normal(0.3), rng.normal(0.3), rng.normal(0.3))};
    x = x * exp_map(t);
  }
  return traj;
}

class TempFile
{
public:
  explicit TempFile(const char * name) : path_(std::filesystem::temp_directory_path() / name) {}
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path & path() const { return path_; }
  void write(const std::string & text) const { std::ofstream(path_) << text; }

private:
  std::filesystem::path path_;
};

TEST(PerturbedOdometry, ZeroNoiseTelescopes)
{
  RandomStream rng(1);
  const auto traj = random_walk(200, rng);
  const auto segs = perturbed_gt_odometry(traj, NoiseParams{}, rng);
  ASSERT_EQ(segs.size(), 199u);
  Pose chain = Pose::identity();
  for (const auto & s : segs) {
    EXPECT_NEAR(s.dt, 0.1, 1e-12);
    chain = chain * s.relative;
  }
  const Pose expected = traj.front().pose.inverse() * traj.back().pose;
  EXPECT_LT((chain.matrix() - expected.matrix()).cwiseAbs().maxCoeff(), 1e-9);

  const auto poses = integrate_odometry(traj.front().pose, segs);
  ASSERT_EQ(poses.size(), traj.size());
  EXPECT_LT((poses.back().matrix() - traj.back().pose.matrix()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PerturbedOdometry, StaticTrajectoryGivesIdentitySegments)
{
  RandomStream rng(2);
  const Pose p(Rotation::about_axis(Vector3(1, 2, 3).normalized(), 0.7), Vector3(1, -2, 0.5));
  const std::vector<TrajectorySample> traj{{0, p}, {1, p}, {2.5, p}};
  for (const auto & s : perturbed_gt_odometry(traj, NoiseParams{}, rng)) {
    EXPECT_LT((s.relative.matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-14);
  }
  EXPECT_THROW(perturbed_gt_odometry(std::span(traj).first(1), NoiseParams{}, rng), TooShortError);
}

TEST(PerturbedOdometry, TerminalDriftFollowsRandomWalkVariance)
{
  constexpr int kRuns = 1000;
  constexpr int kSegments = 100;
  const double sigma = 0.01;
  const std::vector<TrajectorySample> traj = [] {
    std::vector<TrajectorySample> t;
    for (int i = 0; i <= kSegments; ++i) t.push_back({static_cast<double>(i), Pose::identity()});
    return t;
  }();
  RandomStream rng(3);
  double sum_sq = 0.0;
  for (int r = 0; r < kRuns; ++r) {
    const auto poses = integrate_odometry(Pose::identity(), perturbed_gt_odometry(traj, NoiseParams{0.0, sigma}, rng));
    sum_sq += poses.back().translation().squaredNorm();
  }
  const double expected = sigma * std::sqrt(3.0 * kSegments);
  EXPECT_NEAR(std::sqrt(sum_sq / kRuns), expected, 0.1 * expected);
}

TEST(PerturbedOdometry, SegmentNoiseIsUncorrelatedAtLagOne)
{
  constexpr int kSegments = 10000;
  std::vector<TrajectorySample> traj;
  for (int i = 0; i <= kSegments; ++i) traj.push_back({static_cast<double>(i), Pose::identity()});
  RandomStream rng(4);
  const auto segs = perturbed_gt_odometry(traj, NoiseParams{0.01, 0.02}, rng);
  for (int c = 0; c < 6; ++c) {
    std::vector<double> x;
    for (const auto & s : segs) x.push_back(log_map(s.relative).vector()[c]);
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= x.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      den += (x[i] - mean) * (x[i] - mean);
      if (i + 1 < x.size()) num += (x[i] - mean) * (x[i + 1] - mean);
    }
    EXPECT_LT(std::abs(num / den), 3.0 / std::sqrt(static_cast<double>(kSegments))) << c;
  }
}

TEST(ConstantVelocity, AtRestGivesIdentity)
{
  const Pose p(Rotation::about_axis(Vector3::UnitZ(), 1.0), Vector3(3, 2, 1));
  EXPECT_TRUE(constant_velocity_propagate(p, p).matrix().isApprox(Eigen::Matrix4d::Identity(), 1e-14));
}

TEST(ConstantVelocity, StraightLineIsExact)
{
  const Rotation r = Rotation::about_axis(Vector3(0, 1, 0), 0.4);
  const Vector3 v(0.3, -0.1, 0.5);
  const auto at = [&](int k) { return Pose(r, Vector3(1, 2, 3) + k * v); };
  const Pose next = at(5) * constant_velocity_propagate(at(5), at(4));
  EXPECT_LT((next.matrix() - at(6).matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ConstantVelocity, CircleIsExact)
{
  // Body heading tangent to a circle of radius 2 about the world y axis.
  const double radius = 2.0;
  const double rate = 0.3;
  const auto at = [&](int k) {
    const double a = rate * k;
    return Pose(Rotation::about_axis(Vector3::UnitY(), a), Vector3(radius * std::cos(a), 0.5, -radius * std::sin(a)));
  };
  for (int k = 1; k < 20; ++k) {
    const Pose next = at(k) * constant_velocity_propagate(at(k), at(k - 1));
    EXPECT_LT((next.matrix() - at(k + 1).matrix()).cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST(TrajectoryFile, RoundTrip)
{
  RandomStream rng(5);
  const auto traj = random_walk(100, rng);
  TempFile f("radloc_traj.txt");
  save_trajectory(f.path(), traj);
  const auto back = load_trajectory(f.path());
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_EQ(back[i].timestamp, traj[i].timestamp);
    EXPECT_LT((back[i].pose.matrix() - traj[i].pose.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TrajectoryFile, CommentsBlankLinesAndErrors)
{
  TempFile f("radloc_traj_errors.txt");
  f.write("# timestamp tx ty tz qx qy qz qw\n\n0 1 2 3 0 0 0 2\n1 0 0 0 0 0 0 1\n");
  const auto t = load_trajectory(f.path());
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].pose.translation(), Vector3(1, 2, 3));
  EXPECT_TRUE(t[0].pose.rotation().matrix().isApprox(Eigen::Matrix3d::Identity()));

  f.write("");
  EXPECT_THROW(load_trajectory(f.path()), ParseError);
  f.write("0 1 2 3 0 0 0 1\n1 1 2 x 0 0 0 1\n");
  try {
    load_trajectory(f.path());
    FAIL() << "expected ParseError";
  } catch (const ParseError & e) {
    EXPECT_EQ(e.line(), 2);
  }
  f.write("0 1 2 3 0 0 0 1\n1 1 2 3 0 0 0\n");
  EXPECT_THROW(load_trajectory(f.path()), ParseError);
  f.write("0 1 2 3 0 0 0 0\n");
  EXPECT_THROW(load_trajectory(f.path()), ParseError);
  f.write("0 1 2 3 0 0 0 1\n2 1 2 3 0 0 0 1\n1 1 2 3 0 0 0 1\n");
  EXPECT_THROW(load_trajectory(f.path()), NonMonotonicTimestampsError);
  f.write("0 1 2 3 0 0 0 1\n0 1 2 3 0 0 0 1\n");
  EXPECT_THROW(load_trajectory(f.path()), NonMonotonicTimestampsError);
  EXPECT_THROW(load_trajectory(f.path().string() + ".missing"), IoError);
}

TEST(OdometryFile, RoundTripPreservesSegmentsAndDurations)
{
  RandomStream rng(6);
  const auto traj = random_walk(50, rng);
  const auto segs = perturbed_gt_odometry(traj, NoiseParams{0.01, 0.01}, rng);
  TempFile f("radloc_odom.txt");
  save_odometry(f.path(), segs, traj.front().timestamp);
  const auto back = load_odometry(f.path());
  ASSERT_EQ(back.size(), segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_NEAR(back[i].dt, segs[i].dt, 1e-9);
    EXPECT_LT((back[i].relative.matrix() - segs[i].relative.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
  f.write("5 0 0 0 0 0 0 1\n4 0 0 0 0 0 0 1\n");
  EXPECT_THROW(load_odometry(f.path()), NonMonotonicTimestampsError);
  f.write("\n# nothing\n");
  EXPECT_THROW(load_odometry(f.path()), ParseError);
}

}  // namespace
}  // namespace radloc
