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

#ifndef RADLOC__RADIANCE_FIELD_HPP_
#define RADLOC__RADIANCE_FIELD_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "radloc/camera.hpp"
#include "radloc/image.hpp"
#include "radloc/se3.hpp"

namespace radloc
{

struct Aabb
{
  Vector3 min = Vector3::Zero();
  Vector3 max = Vector3::Zero();

  bool contains(const Vector3 & p) const;
  bool contains(const Aabb & other) const;
  /// Parameter range of `ray` inside the box, intersected with [t0, t1].
  std::optional<std::pair<double, double>> clip(const Ray & ray, double t0, double t1) const;
};

struct FieldSample
{
  double sigma = 0.0;  // 1/m
  Rgb color = Rgb::Zero();
};

/// Closed range of ray parameters.
struct Interval
{
  double t0;
  double t1;
};

/// The map: density and color as a function of position and view direction.
/// Implementations are immutable after construction and safe to query from
/// any number of threads.
class RadianceField
{
public:
  virtual ~RadianceField() = default;

  /// sigma >= 0 and color in [0,1]^3; sigma is zero outside bounds().
  virtual FieldSample query(const Vector3 & position, const Vector3 & view_dir) const = 0;
  virtual const Aabb & bounds() const = 0;

  /// Color seen through a ray that is not fully absorbed.
  virtual Rgb background() const { return Rgb::Zero(); }

  /// Appends sorted, disjoint parameter intervals of `ray` within [t0, t1]
  /// outside of which sigma is guaranteed to be zero. The default is the
  /// bounds clip; implementations may return tighter sets. Used only to skip
  /// field evaluations that would return zero.
  virtual void support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const;
};

struct Sphere
{
  Vector3 center = Vector3::Zero();
  double radius = 0.0;
};

struct Box
{
  Vector3 min = Vector3::Zero();
  Vector3 max = Vector3::Zero();
};

struct Primitive
{
  std::variant<Sphere, Box> shape;
  double sigma = 0.0;
  Rgb color = Rgb::Zero();
};

/// Constant-density spheres and boxes. Where primitives overlap the one with
/// the largest sigma wins; ties go to the lowest index.
class AnalyticScene : public RadianceField
{
public:
  AnalyticScene(std::vector<Primitive> primitives, const Aabb & bounds, const Rgb & background = Rgb::Zero());

  /// Red, green and blue spheres over a gray floor slab; see README.
  static AnalyticScene triad();

  FieldSample query(const Vector3 & position, const Vector3 & view_dir) const override;
  const Aabb & bounds() const override { return bounds_; }
  Rgb background() const override { return background_; }
  void support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const override;

  const std::vector<Primitive> & primitives() const { return primitives_; }

private:
  std::vector<Primitive> primitives_;
  Aabb bounds_;
  Rgb background_;
};

/// Regular grid of (sigma, r, g, b) samples at voxel centers with trilinear
/// interpolation. Queries between the outermost voxel centers and the bounds
/// clamp to the edge values.
class VoxelField : public RadianceField
{
public:
  VoxelField(
    const std::array<int, 3> & resolution, const Aabb & bounds, std::vector<float> records,
    const Rgb & background = Rgb::Zero());

  FieldSample query(const Vector3 & position, const Vector3 & view_dir) const override;
  const Aabb & bounds() const override { return bounds_; }
  Rgb background() const override { return background_; }
  void support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const override;

  const std::array<int, 3> & resolution() const { return resolution_; }
  /// nx*ny*nz records of (sigma, r, g, b), x fastest.
  const std::vector<float> & records() const { return records_; }
  Vector3 voxel_center(int i, int j, int k) const;
  Vector3 voxel_size() const { return voxel_size_; }

private:
  void build_occupancy();
  bool block_occupied(int bx, int by, int bz) const;

  std::array<int, 3> resolution_;
  Aabb bounds_;
  std::vector<float> records_;
  Rgb background_;
  Vector3 voxel_size_;

  static constexpr int kBlock = 8;
  std::array<int, 3> blocks_{};
  std::vector<unsigned char> occupied_;
};

/// Samples `field` at the voxel centers of a grid spanning its bounds.
/// Throws BadSpecError unless every resolution entry is >= 2.
VoxelField bake_voxels(const RadianceField & field, const std::array<int, 3> & resolution);

/// Binary format: "VOXRF1", nx ny nz as little-endian uint32, bounds as six
/// little-endian float64 (min xyz, max xyz), then nx*ny*nz records of four
/// little-endian float32 (sigma, r, g, b), x fastest.
void save_voxels(const std::filesystem::path & path, const VoxelField & field);
VoxelField load_voxels(const std::filesystem::path & path, const Rgb & background = Rgb::Zero());

}  // namespace radloc

#endif  // RADLOC__RADIANCE_FIELD_HPP_
