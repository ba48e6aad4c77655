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

#include "radloc/se3.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "radloc/errors.hpp"

namespace radloc
{

namespace
{

constexpr double kSmallAngle = 1e-7;

Vector3 vee(const Matrix3 & m) { return Vector3(m(2, 1), m(0, 2), m(1, 0)); }

// Coefficients of the Rodrigues formula and the SE(3) left Jacobian:
//   R = I + a W + b W^2,  V = I + b W + c W^2
struct ExpCoefficients
{
  double a;
  double b;
  double c;
};

ExpCoefficients exp_coefficients(double theta)
{
  const double t2 = theta * theta;
  if (theta < kSmallAngle) {
    const double t4 = t2 * t2;
    return {1.0 - t2 / 6.0 + t4 / 120.0, 0.5 - t2 / 24.0 + t4 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0};
  }
  const double half_sin = std::sin(0.5 * theta);
  return {std::sin(theta) / theta, 2.0 * half_sin * half_sin / t2,
          (theta - std::sin(theta)) / (t2 * theta)};
}

}  // namespace

Rotation Rotation::project(const Matrix3 & m)
{
  Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 d = Matrix3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  return Rotation(svd.matrixU() * d * svd.matrixV().transpose());
}

Rotation Rotation::about_axis(const Vector3 & axis, double angle)
{
  return so3_exp(axis.normalized() * angle);
}

double Rotation::orthonormality_error() const
{
  return (m_.transpose() * m_ - Matrix3::Identity()).norm();
}

Pose Pose::inverse() const
{
  const Rotation rt = rotation_.inverse();
  return Pose(rt, -(rt * translation_));
}

Pose Pose::operator*(const Pose & other) const
{
  Pose out(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
  out.compositions_ = compositions_ + other.compositions_ + 1;
  if (out.compositions_ >= kReprojectInterval) {
    out.rotation_ = Rotation::project(out.rotation_.matrix());
    out.compositions_ = 0;
  }
  return out;
}

Eigen::Matrix4d Pose::matrix() const
{
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Vector6 Twist::vector() const
{
  Vector6 v;
  v << rot, trans;
  return v;
}

Twist Twist::from_vector(const Vector6 & v) { return Twist{v.head<3>(), v.tail<3>()}; }

Matrix3 skew(const Vector3 & v)
{
  Matrix3 s;
  // clang-format off
  s <<  0.0,  -v.z(),  v.y(),
       v.z(),   0.0,  -v.x(),
      -v.y(),  v.x(),   0.0;
  // clang-format on
  return s;
}

Rotation so3_exp(const Vector3 & rot)
{
  const auto k = exp_coefficients(rot.norm());
  const Matrix3 w = skew(rot);
  return Rotation::from_matrix(Matrix3::Identity() + k.a * w + k.b * w * w);
}

Vector3 so3_log(const Rotation & r)
{
  const Matrix3 & m = r.matrix();
  const double cos_theta = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const Vector3 sin_axis = 0.5 * vee(m - m.transpose());
  const double sin_theta = sin_axis.norm();
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < kSmallAngle) {
    return sin_axis * (1.0 + theta * theta / 6.0);
  }
  if (cos_theta > -0.9) {
    return sin_axis * (theta / sin_theta);
  }
  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part (1 - cos) a a^T and take its sign from sin_axis.
  const Matrix3 sym = 0.5 * (m + m.transpose()) - cos_theta * Matrix3::Identity();
  Eigen::Index j = 0;
  sym.diagonal().maxCoeff(&j);
  Vector3 axis = sym.col(j).normalized();
  if (axis.dot(sin_axis) < 0.0) {
    axis = -axis;
  }
  return axis * theta;
}

Pose exp_map(const Twist & delta)
{
  const double theta = delta.rot.norm();
  const auto k = exp_coefficients(theta);
  const Matrix3 w = skew(delta.rot);
  const Matrix3 w2 = w * w;
  const Matrix3 r = Matrix3::Identity() + k.a * w + k.b * w2;
  const Matrix3 v = Matrix3::Identity() + k.b * w + k.c * w2;
  return Pose(Rotation::from_matrix(r), v * delta.trans);
}

Twist log_map(const Pose & pose)
{
  const Matrix3 & m = pose.rotation().matrix();
  const double cos_theta = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(0.5 * vee(m - m.transpose()).norm(), cos_theta);
  if (theta >= std::numbers::pi - 1e-6) {
    std::ostringstream msg;
    msg << "log_map: rotation angle " << theta << " rad is within 1e-6 of pi";
    throw AngleNearPiError(msg.str());
  }

  const Vector3 rot = so3_log(pose.rotation());
  const double t = rot.norm();
  double d = 0.0;
  if (t < 1e-3) {
    const double t2 = t * t;
    d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double half = 0.5 * t;
    d = (1.0 - half * std::cos(half) / std::sin(half)) / (t * t);
  }
  const Matrix3 w = skew(rot);
  const Matrix3 v_inv = Matrix3::Identity() - 0.5 * w + d * w * w;
  return Twist{rot, v_inv * pose.translation()};
}

Twist sample_noise(const NoiseParams & params, RandomStream & rng)
{
  Twist t;
  for (int i = 0; i < 3; ++i) {
    t.rot[i] = rng.normal(params.sigma_r);
  }
  for (int i = 0; i < 3; ++i) {
    t.trans[i] = rng.normal(params.sigma_t);
  }
  return t;
}

double rotation_geodesic_deg(const Rotation & a, const Rotation & b)
{
  const double c = 0.5 * ((a.matrix().transpose() * b.matrix()).trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

Rotation rotation_average(std::span<const Rotation> rotations, std::span<const double> weights)
{
  if (rotations.empty() || rotations.size() != weights.size()) {
    throw BadCountError("rotation_average: need matching, non-empty rotation and weight lists");
  }
  double total = 0.0;
  for (const double w : weights) {
    total += w > 0.0 ? w : 0.0;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw BadCountError("rotation_average: weights must have a positive finite sum");
  }
  const auto best = std::max_element(weights.begin(), weights.end()) - weights.begin();
  Rotation estimate = rotations[static_cast<std::size_t>(best)];

  constexpr int kMaxIterations = 100;
  double step_norm = 0.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Vector3 step = Vector3::Zero();
    const Rotation inv = estimate.inverse();
    for (std::size_t i = 0; i < rotations.size(); ++i) {
      if (weights[i] > 0.0) {
        step += (weights[i] / total) * so3_log(inv * rotations[i]);
      }
    }
    step_norm = step.norm();
    if (step_norm < 1e-10) {
      return estimate;
    }
    estimate = Rotation::project((estimate * so3_exp(step)).matrix());
  }
  if (!(step_norm <= 1e-6)) {
    std::ostringstream msg;
    msg << "rotation_average: no convergence after " << kMaxIterations
        << " iterations (update norm " << step_norm << ")";
    throw NonConvergenceError(msg.str());
  }
  return estimate;
}

}  // namespace radloc
