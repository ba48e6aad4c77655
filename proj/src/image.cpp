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

#include "radloc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "radloc/errors.hpp"

namespace radloc
{

namespace
{

std::uint8_t to_byte(double x)
{
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

}  // namespace

Image::Image(int width, int height, const Rgb & fill)
: width_(width), height_(height), data_(static_cast<std::size_t>(width * height * 3))
{
  if (width <= 0 || height <= 0) {
    throw BadSpecError("Image: dimensions must be positive");
  }
  for (int i = 0; i < width * height; ++i) {
    data_[3 * i] = fill.x();
    data_[3 * i + 1] = fill.y();
    data_[3 * i + 2] = fill.z();
  }
}

Rgb Image::at(int u, int v) const
{
  const auto i = static_cast<std::size_t>(3 * (v * width_ + u));
  return Rgb(data_[i], data_[i + 1], data_[i + 2]);
}

void Image::set(int u, int v, const Rgb & c)
{
  const auto i = static_cast<std::size_t>(3 * (v * width_ + u));
  data_[i] = c.x();
  data_[i + 1] = c.y();
  data_[i + 2] = c.z();
}

double mean_absolute_error(const Image & a, const Image & b)
{
  if (a.width() != b.width() || a.height() != b.height()) {
    throw BadSpecError("mean_absolute_error: image dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    sum += std::abs(a.data()[i] - b.data()[i]);
  }
  return sum / static_cast<double>(a.data().size());
}

void write_png(const std::filesystem::path & path, const Image & image)
{
  std::vector<std::uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), to_byte);

  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError("write_png: " + path.string() + ": " + png.message);
  }
}

Image read_png(const std::filesystem::path & path)
{
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("read_png: " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
    throw IoError("read_png: " + path.string() + ": " + png.message);
  }
  Image out(static_cast<int>(png.width), static_cast<int>(png.height));
  for (int v = 0; v < out.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) {
      const auto i = static_cast<std::size_t>(3 * (v * out.width() + u));
      out.set(u, v, Rgb(bytes[i], bytes[i + 1], bytes[i + 2]) / 255.0);
    }
  }
  return out;
}

Image quantize_8bit(const Image & image)
{
  Image out(image.width(), image.height());
  for (int v = 0; v < image.height(); ++v) {
    for (int u = 0; u < image.width(); ++u) {
      const Rgb c = image.at(u, v);
      out.set(u, v, Rgb(to_byte(c.x()), to_byte(c.y()), to_byte(c.z())) / 255.0);
    }
  }
  return out;
}

Image side_by_side(const Image & left, const Image & right)
{
  if (left.width() != right.width() || left.height() != right.height()) {
    throw BadSpecError("side_by_side: image dimensions differ");
  }
  Image out(2 * left.width(), left.height());
  for (int v = 0; v < left.height(); ++v) {
    for (int u = 0; u < left.width(); ++u) {
      out.set(u, v, left.at(u, v));
      out.set(u + left.width(), v, right.at(u, v));
    }
  }
  return out;
}

}  // namespace radloc
