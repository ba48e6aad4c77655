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

#ifndef RADLOC__MOTION_HPP_
#define RADLOC__MOTION_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "radloc/random.hpp"
#include "radloc/se3.hpp"

namespace radloc
{

struct TrajectorySample
{
  double timestamp = 0.0;  // seconds
  Pose pose;               // world-from-body
};

struct OdometrySegment
{
  Pose relative;  // body_{t-1}-from-body_t
  double dt = 0.0;
};

/// relative_k = X_{k-1}^-1 X_k exp(noise). Throws TooShortError for fewer than
/// two samples.
std::vector<OdometrySegment> perturbed_gt_odometry(
  std::span<const TrajectorySample> traj, const NoiseParams & noise, RandomStream & rng);

/// Relative motion that repeats the last interval: prev2^-1 * prev.
Pose constant_velocity_propagate(const Pose & prev, const Pose & prev2);

/// Composes segments starting from `start`; element 0 is `start` itself.
std::vector<Pose> integrate_odometry(const Pose & start, std::span<const OdometrySegment> segments);

/// Text format, one sample per line: "timestamp tx ty tz qx qy qz qw".
/// Blank lines and lines starting with '#' are ignored.
std::vector<TrajectorySample> load_trajectory(const std::filesystem::path & path);
void save_trajectory(const std::filesystem::path & path, std::span<const TrajectorySample> traj);

/// Same line format. The first line anchors the start time (its pose is not
/// used); every later line holds the motion since the previous line, with dt
/// the timestamp difference. Throws ParseError and NonMonotonicTimestampsError.
std::vector<OdometrySegment> load_odometry(const std::filesystem::path & path);
void save_odometry(const std::filesystem::path & path, std::span<const OdometrySegment> segments, double t0 = 0.0);

}  // namespace radloc

#endif  // RADLOC__MOTION_HPP_
