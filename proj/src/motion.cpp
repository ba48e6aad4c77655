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

#include "radloc/motion.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "radloc/errors.hpp"

namespace radloc
{

std::vector<OdometrySegment> perturbed_gt_odometry(
  std::span<const TrajectorySample> traj, const NoiseParams & noise, RandomStream & rng)
{
  if (traj.size() < 2) {
    throw TooShortError("perturbed_gt_odometry: need at least two trajectory samples");
  }
  std::vector<OdometrySegment> out;
  out.reserve(traj.size() - 1);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Pose rel = traj[k - 1].pose.inverse() * traj[k].pose;
    out.push_back({rel * exp_map(sample_noise(noise, rng)), traj[k].timestamp - traj[k - 1].timestamp});
  }
  return out;
}

Pose constant_velocity_propagate(const Pose & prev, const Pose & prev2) { return prev2.inverse() * prev; }

std::vector<Pose> integrate_odometry(const Pose & start, std::span<const OdometrySegment> segments)
{
  std::vector<Pose> out;
  out.reserve(segments.size() + 1);
  out.push_back(start);
  for (const auto & seg : segments) {
    out.push_back(out.back() * seg.relative);
  }
  return out;
}

namespace
{

struct PoseLine
{
  double timestamp;
  Pose pose;
};

std::vector<PoseLine> read_pose_lines(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<PoseLine> lines;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(is, text)) {
    ++line_no;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') {
      continue;
    }
    std::istringstream ls(text);
    double v[8];
    for (double & x : v) {
      if (!(ls >> x)) {
        throw ParseError(path.string() + ": expected 8 numbers", line_no);
      }
    }
    std::string extra;
    if (ls >> extra) {
      throw ParseError(path.string() + ": trailing content '" + extra + "'", line_no);
    }
    for (const double x : v) {
      if (!std::isfinite(x)) {
        throw ParseError(path.string() + ": non-finite value", line_no);
      }
    }
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (q.norm() < 1e-6) {
      throw ParseError(path.string() + ": degenerate quaternion", line_no);
    }
    q.normalize();
    if (!lines.empty() && !(v[0] > lines.back().timestamp)) {
      throw NonMonotonicTimestampsError(
        path.string() + ": timestamps must be strictly increasing (line " + std::to_string(line_no) + ")");
    }
    lines.push_back({v[0], Pose(Rotation::from_matrix(q.toRotationMatrix()), Vector3(v[1], v[2], v[3]))});
  }
  if (lines.empty()) {
    throw ParseError(path.string() + ": no samples", line_no);
  }
  return lines;
}

void write_pose_line(std::ostream & os, double timestamp, const Pose & pose)
{
  const Eigen::Quaterniond q(pose.rotation().matrix());
  const Vector3 & t = pose.translation();
  os << timestamp << ' ' << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q.x() << ' ' << q.y() << ' '
     << q.z() << ' ' << q.w() << '\n';
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::vector<TrajectorySample> load_trajectory(const std::filesystem::path & path)
{
  std::vector<TrajectorySample> out;
  for (auto & line : read_pose_lines(path)) {
    out.push_back({line.timestamp, line.pose});
  }
  return out;
}

void save_trajectory(const std::filesystem::path & path, std::span<const TrajectorySample> traj)
{
  auto os = open_out(path);
  os << "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto & s : traj) {
    write_pose_line(os, s.timestamp, s.pose);
  }
}

std::vector<OdometrySegment> load_odometry(const std::filesystem::path & path)
{
  const auto lines = read_pose_lines(path);
  std::vector<OdometrySegment> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    out.push_back({lines[k].pose, lines[k].timestamp - lines[k - 1].timestamp});
  }
  return out;
}

void save_odometry(const std::filesystem::path & path, std::span<const OdometrySegment> segments, double t0)
{
  auto os = open_out(path);
  os << "# relative odometry: timestamp tx ty tz qx qy qz qw (first line anchors time)\n";
  write_pose_line(os, t0, Pose::identity());
  double t = t0;
  for (const auto & seg : segments) {
    if (!(seg.dt > 0.0)) {
      throw BadSpecError("save_odometry: segment dt must be positive");
    }
    t += seg.dt;
    write_pose_line(os, t, seg.relative);
  }
}

}  // namespace radloc
