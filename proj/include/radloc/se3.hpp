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

#ifndef RADLOC__SE3_HPP_
#define RADLOC__SE3_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "radloc/random.hpp"

namespace radloc
{

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Element of SO(3), stored as an orthonormal 3x3 matrix.
class Rotation
{
public:
  Rotation() : m_(Matrix3::Identity()) {}

  /// Wraps a matrix that is already orthonormal; no projection is applied.
  static Rotation from_matrix(const Matrix3 & m) { return Rotation(m); }
  /// Nearest rotation in the Frobenius sense (polar decomposition via SVD).
  static Rotation project(const Matrix3 & m);
  static Rotation identity() { return Rotation(); }
  /// Rotation of `angle` radians about the unit `axis`.
  static Rotation about_axis(const Vector3 & axis, double angle);

  const Matrix3 & matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation & other) const { return Rotation(m_ * other.m_); }
  Vector3 operator*(const Vector3 & v) const { return m_ * v; }

  /// ||R^T R - I||_F
  double orthonormality_error() const;

private:
  explicit Rotation(const Matrix3 & m) : m_(m) {}
  Matrix3 m_;
};

/// Rigid transform (world-from-body when used as a camera/particle pose).
class Pose
{
public:
  Pose() = default;
  Pose(const Rotation & rotation, const Vector3 & translation)
  : rotation_(rotation), translation_(translation)
  {
  }

  static Pose identity() { return Pose(); }

  const Rotation & rotation() const { return rotation_; }
  const Vector3 & translation() const { return translation_; }

  Pose inverse() const;
  /// Composition; the rotation block is re-projected onto SO(3) once every
  /// kReprojectInterval chained compositions to bound round-off drift.
  Pose operator*(const Pose & other) const;
  Vector3 operator*(const Vector3 & p) const { return rotation_ * p + translation_; }

  Eigen::Matrix4d matrix() const;

  static constexpr std::uint32_t kReprojectInterval = 1000;

private:
  Rotation rotation_;
  Vector3 translation_ = Vector3::Zero();
  std::uint32_t compositions_ = 0;
};

/// Element of se(3). Rotation part first, translation part second.
struct Twist
{
  Vector3 rot = Vector3::Zero();
  Vector3 trans = Vector3::Zero();

  Vector6 vector() const;
  static Twist from_vector(const Vector6 & v);
};

struct NoiseParams
{
  double sigma_r = 0.0;  // radians
  double sigma_t = 0.0;  // meters
};

Matrix3 skew(const Vector3 & v);

Rotation so3_exp(const Vector3 & rot);
/// Axis-angle of R with angle in [0, pi]. Total at pi (one of the two equivalent
/// axes is returned); use log_map when the canonical branch must be enforced.
Vector3 so3_log(const Rotation & r);

Pose exp_map(const Twist & delta);
/// Throws AngleNearPiError when the rotation angle is within 1e-6 of pi.
Twist log_map(const Pose & pose);

Twist sample_noise(const NoiseParams & params, RandomStream & rng);

/// Geodesic distance between two rotations, degrees in [0, 180].
double rotation_geodesic_deg(const Rotation & a, const Rotation & b);

/// Weighted Karcher mean on SO(3), starting from the highest-weight input.
/// Weights need not be normalized; non-positive weights are ignored and a
/// non-positive total raises BadCountError. Throws NonConvergenceError when the iteration cap is reached with an update
/// norm above 1e-6.
Rotation rotation_average(std::span<const Rotation> rotations, std::span<const double> weights);

}  // namespace radloc

#endif  // RADLOC__SE3_HPP_
