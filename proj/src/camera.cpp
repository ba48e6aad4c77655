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

#include "radloc/camera.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "radloc/errors.hpp"

namespace radloc
{

CameraIntrinsics CameraIntrinsics::from_fov(int width, int height, double horizontal_fov_rad)
{
  CameraIntrinsics intr;
  intr.width = width;
  intr.height = height;
  intr.fx = 0.5 * width / std::tan(0.5 * horizontal_fov_rad);
  intr.fy = intr.fx;
  intr.cx = 0.5 * width;
  intr.cy = 0.5 * height;
  intr.validate();
  return intr;
}

void CameraIntrinsics::validate() const
{
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw BadSpecError("CameraIntrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw BadSpecError("CameraIntrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw BadSpecError("CameraIntrinsics: principal point outside the image");
  }
}

Ray pixel_to_ray(const CameraIntrinsics & intr, const Pose & pose, int u, int v)
{
  if (u < 0 || u >= intr.width || v < 0 || v >= intr.height) {
    throw OutOfBoundsError(
      "pixel_to_ray: pixel (" + std::to_string(u) + ", " + std::to_string(v) +
      ") outside the image");
  }
  const Vector3 cam((u + 0.5 - intr.cx) / intr.fx, (v + 0.5 - intr.cy) / intr.fy, 1.0);
  return Ray{pose.translation(), (pose.rotation() * cam).normalized()};
}

std::vector<PixelSample> sample_pixels(
  const CameraIntrinsics & intr, const Image & image, int m, RandomStream & rng)
{
  const int total = intr.width * intr.height;
  if (m < 1 || m > total) {
    throw BadCountError(
      "sample_pixels: m = " + std::to_string(m) + " outside [1, " + std::to_string(total) + "]");
  }
  if (image.width() != intr.width || image.height() != intr.height) {
    throw BadSpecError("sample_pixels: image size does not match intrinsics");
  }

  // Partial Fisher-Yates over the flat pixel index.
  std::vector<int> index(static_cast<std::size_t>(total));
  std::iota(index.begin(), index.end(), 0);
  std::vector<PixelSample> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng.index(static_cast<std::uint64_t>(total - i)));
    std::swap(index[i], index[j]);
    const int u = index[i] % intr.width;
    const int v = index[i] / intr.width;
    out.push_back(PixelSample{u, v, image.at(u, v)});
  }
  return out;
}

}  // namespace radloc
