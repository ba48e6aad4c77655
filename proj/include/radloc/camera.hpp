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

#ifndef RADLOC__CAMERA_HPP_
#define RADLOC__CAMERA_HPP_

#include <vector>

#include "radloc/image.hpp"
#include "radloc/random.hpp"
#include "radloc/se3.hpp"

namespace radloc
{

/// Pinhole intrinsics. Camera frame: +z forward, +x right, +y down; pixel
/// (u, v) has its center at continuous image coordinates (u + 0.5, v + 0.5).
struct CameraIntrinsics
{
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Square pixels, principal point at the image center.
  static CameraIntrinsics from_fov(int width, int height, double horizontal_fov_rad);

  /// Throws BadSpecError when the invariants do not hold.
  void validate() const;
};

struct Ray
{
  Vector3 origin = Vector3::Zero();
  Vector3 direction = Vector3::UnitZ();

  Vector3 at(double t) const { return origin + t * direction; }
};

struct PixelSample
{
  int u = 0;
  int v = 0;
  Rgb color = Rgb::Zero();
};

/// World-frame ray through the center of pixel (u, v) for a camera at `pose`
/// (world-from-camera). Throws OutOfBoundsError for pixels outside the image.
Ray pixel_to_ray(const CameraIntrinsics & intr, const Pose & pose, int u, int v);

/// Draws m distinct pixels uniformly without replacement and reads their
/// colors from `image`. Throws BadCountError unless 1 <= m <= width * height.
std::vector<PixelSample> sample_pixels(
  const CameraIntrinsics & intr, const Image & image, int m, RandomStream & rng);

}  // namespace radloc

#endif  // RADLOC__CAMERA_HPP_
