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

#ifndef RADLOC__IMAGE_HPP_
#define RADLOC__IMAGE_HPP_

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace radloc
{

using Rgb = Eigen::Vector3d;

/// Row-major RGB image with components in [0, 1]. Pixel (u, v) is column u,
/// row v.
class Image
{
public:
  Image() = default;
  Image(int width, int height, const Rgb & fill = Rgb::Zero());

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  Rgb at(int u, int v) const;
  void set(int u, int v, const Rgb & c);

  const std::vector<double> & data() const { return data_; }

  bool operator==(const Image & other) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Mean over pixels and channels of |a - b|. Images must share dimensions.
double mean_absolute_error(const Image & a, const Image & b);

/// Writes an 8-bit RGB PNG (values are clamped and rounded to 1/255 steps).
void write_png(const std::filesystem::path & path, const Image & image);
Image read_png(const std::filesystem::path & path);

/// Rounds every component to the nearest 1/255 step, matching a PNG round trip.
Image quantize_8bit(const Image & image);

/// Places two equally sized images next to each other.
Image side_by_side(const Image & left, const Image & right);

}  // namespace radloc

#endif  // RADLOC__IMAGE_HPP_
