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

#include "radloc/radiance_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radloc/errors.hpp"

namespace radloc
{

namespace
{

// Support intervals are widened by this much so that rounding in the
// intersection math can never drop a sample the field would report as dense.
constexpr double kSupportPad = 1e-9;

void push_merged(std::vector<Interval> & out, double a, double b)
{
  if (!out.empty() && a <= out.back().t1) {
    out.back().t1 = std::max(out.back().t1, b);
  } else {
    out.push_back({a, b});
  }
}

std::optional<std::pair<double, double>> clip_box(
  const Vector3 & lo, const Vector3 & hi, const Ray & ray, double t0, double t1)
{
  for (int a = 0; a < 3; ++a) {
    const double d = ray.direction[a];
    const double o = ray.origin[a];
    if (d == 0.0) {
      if (o < lo[a] || o > hi[a]) {
        return std::nullopt;
      }
      continue;
    }
    double ta = (lo[a] - o) / d;
    double tb = (hi[a] - o) / d;
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) {
      return std::nullopt;
    }
  }
  return std::make_pair(t0, t1);
}

std::optional<std::pair<double, double>> clip_sphere(
  const Sphere & s, const Ray & ray, double t0, double t1)
{
  const Vector3 oc = ray.origin - s.center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double root = std::sqrt(disc);
  const double lo = std::max(t0, -b - root);
  const double hi = std::min(t1, -b + root);
  if (lo > hi) {
    return std::nullopt;
  }
  return std::make_pair(lo, hi);
}

bool inside(const Primitive & prim, const Vector3 & p)
{
  if (const auto * s = std::get_if<Sphere>(&prim.shape)) {
    return (p - s->center).squaredNorm() <= s->radius * s->radius;
  }
  const auto & b = std::get<Box>(prim.shape);
  return (p.array() >= b.min.array()).all() && (p.array() <= b.max.array()).all();
}

Aabb primitive_box(const Primitive & prim)
{
  if (const auto * s = std::get_if<Sphere>(&prim.shape)) {
    return Aabb{s->center.array() - s->radius, s->center.array() + s->radius};
  }
  const auto & b = std::get<Box>(prim.shape);
  return Aabb{b.min, b.max};
}

}  // namespace

bool Aabb::contains(const Vector3 & p) const
{
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

bool Aabb::contains(const Aabb & other) const
{
  return (other.min.array() >= min.array()).all() && (other.max.array() <= max.array()).all();
}

std::optional<std::pair<double, double>> Aabb::clip(const Ray & ray, double t0, double t1) const
{
  return clip_box(min, max, ray, t0, t1);
}

void RadianceField::support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const
{
  if (const auto range = bounds().clip(ray, t0, t1)) {
    out.push_back({range->first - kSupportPad, range->second + kSupportPad});
  }
}

// ---------------------------------------------------------------------------
// AnalyticScene

AnalyticScene::AnalyticScene(std::vector<Primitive> primitives, const Aabb & bounds, const Rgb & background)
: primitives_(std::move(primitives)), bounds_(bounds), background_(background)
{
  if (!(bounds_.min.array() < bounds_.max.array()).all()) {
    throw BadSpecError("AnalyticScene: bounds must be a non-empty box");
  }
  for (const auto & prim : primitives_) {
    if (!(prim.sigma >= 0.0)) {
      throw BadSpecError("AnalyticScene: primitive sigma must be non-negative");
    }
    if ((prim.color.array() < 0.0).any() || (prim.color.array() > 1.0).any()) {
      throw BadSpecError("AnalyticScene: primitive color must lie in [0,1]");
    }
    if (const auto * s = std::get_if<Sphere>(&prim.shape); s && !(s->radius > 0.0)) {
      throw BadSpecError("AnalyticScene: sphere radius must be positive");
    }
    if (!bounds_.contains(primitive_box(prim))) {
      throw BadSpecError("AnalyticScene: primitive extends outside the scene bounds");
    }
  }
}

AnalyticScene AnalyticScene::triad()
{
  constexpr double kSigma = 50.0;
  std::vector<Primitive> prims = {
    {Sphere{Vector3(-1.0, 0.0, 2.5), 0.5}, kSigma, Rgb(0.9, 0.15, 0.15)},
    {Sphere{Vector3(1.0, 0.0, 2.5), 0.5}, kSigma, Rgb(0.15, 0.8, 0.2)},
    {Sphere{Vector3(0.0, 1.0, 2.5), 0.5}, kSigma, Rgb(0.15, 0.25, 0.9)},
    {Box{Vector3(-3.0, 1.5, -3.0), Vector3(3.0, 1.75, 3.0)}, kSigma, Rgb(0.5, 0.5, 0.5)},
  };
  return AnalyticScene(std::move(prims), Aabb{Vector3::Constant(-3.0), Vector3::Constant(3.0)});
}

FieldSample AnalyticScene::query(const Vector3 & position, const Vector3 &) const
{
  FieldSample out;
  if (!bounds_.contains(position)) {
    return out;
  }
  bool hit = false;
  for (const auto & prim : primitives_) {
    if ((!hit || prim.sigma > out.sigma) && inside(prim, position)) {
      out.sigma = prim.sigma;
      out.color = prim.color;
      hit = true;
    }
  }
  return out;
}

void AnalyticScene::support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const
{
  const auto range = bounds_.clip(ray, t0, t1);
  if (!range) {
    return;
  }
  std::array<Interval, 16> local{};
  std::vector<Interval> heap;
  std::size_t count = 0;
  for (const auto & prim : primitives_) {
    if (prim.sigma <= 0.0) {
      continue;
    }
    std::optional<std::pair<double, double>> hit;
    if (const auto * s = std::get_if<Sphere>(&prim.shape)) {
      hit = clip_sphere(*s, ray, range->first, range->second);
    } else {
      const auto & b = std::get<Box>(prim.shape);
      hit = clip_box(b.min, b.max, ray, range->first, range->second);
    }
    if (!hit) {
      continue;
    }
    const Interval iv{hit->first - kSupportPad, hit->second + kSupportPad};
    if (count < local.size()) {
      local[count] = iv;
    } else {
      if (heap.empty()) {
        heap.assign(local.begin(), local.end());
      }
      heap.push_back(iv);
    }
    ++count;
  }
  Interval * begin = heap.empty() ? local.data() : heap.data();
  Interval * end = begin + count;
  std::sort(begin, end, [](const Interval & a, const Interval & b) { return a.t0 < b.t0; });
  for (auto * it = begin; it != end; ++it) {
    push_merged(out, it->t0, it->t1);
  }
}

// ---------------------------------------------------------------------------
// VoxelField

VoxelField::VoxelField(
  const std::array<int, 3> & resolution, const Aabb & bounds, std::vector<float> records,
  const Rgb & background)
: resolution_(resolution), bounds_(bounds), records_(std::move(records)), background_(background)
{
  for (const int n : resolution_) {
    if (n < 2) {
      throw BadSpecError("VoxelField: resolution must be >= 2 on every axis");
    }
  }
  if (!(bounds_.min.array() < bounds_.max.array()).all()) {
    throw BadSpecError("VoxelField: bounds must be a non-empty box");
  }
  const auto n = static_cast<std::size_t>(resolution_[0]) * resolution_[1] * resolution_[2];
  if (records_.size() != 4 * n) {
    throw BadSpecError("VoxelField: record count does not match resolution");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(records_[4 * i] >= 0.0f)) {
      throw BadSpecError("VoxelField: stored sigma must be non-negative");
    }
  }
  voxel_size_ = (bounds_.max - bounds_.min).array() /
                Eigen::Array3d(resolution_[0], resolution_[1], resolution_[2]);
  build_occupancy();
}

Vector3 VoxelField::voxel_center(int i, int j, int k) const
{
  return bounds_.min + (Eigen::Array3d(i, j, k) + 0.5).matrix().cwiseProduct(voxel_size_);
}

FieldSample VoxelField::query(const Vector3 & position, const Vector3 &) const
{
  FieldSample out;
  if (!bounds_.contains(position)) {
    return out;
  }
  std::array<int, 3> i0{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    const int n = resolution_[a];
    double g = (position[a] - bounds_.min[a]) / voxel_size_[a] - 0.5;
    g = std::clamp(g, 0.0, static_cast<double>(n - 1));
    if (const double r = std::round(g); std::abs(g - r) < 1e-9) {
      g = r;
    }
    const int lo = std::min(static_cast<int>(std::floor(g)), n - 2);
    i0[a] = lo;
    f[a] = g - lo;
  }
  const std::size_t sx = 4;
  const std::size_t sy = 4 * static_cast<std::size_t>(resolution_[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(resolution_[1]);
  const std::size_t base = i0[0] * sx + i0[1] * sy + i0[2] * sz;

  // Color is interpolated with density weights so empty neighbors do not darken surfaces.
  double sigma = 0.0;
  Rgb weighted = Rgb::Zero();
  Rgb plain = Rgb::Zero();
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1;
    const int dy = (c >> 1) & 1;
    const int dz = (c >> 2) & 1;
    const double w = (dx ? f[0] : 1.0 - f[0]) * (dy ? f[1] : 1.0 - f[1]) * (dz ? f[2] : 1.0 - f[2]);
    if (w == 0.0) {
      continue;
    }
    const float * rec = &records_[base + dx * sx + dy * sy + dz * sz];
    const Rgb color(rec[1], rec[2], rec[3]);
    sigma += w * rec[0];
    weighted += (w * rec[0]) * color;
    plain += w * color;
  }
  out.sigma = std::max(0.0, sigma);
  const Rgb color = sigma > 0.0 ? Rgb(weighted / sigma) : plain;
  out.color = color.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

void VoxelField::build_occupancy()
{
  for (int a = 0; a < 3; ++a) {
    blocks_[a] = (resolution_[a] + kBlock - 1) / kBlock;
  }
  occupied_.assign(static_cast<std::size_t>(blocks_[0]) * blocks_[1] * blocks_[2], 0);
  // A trilinear query inside a block reads voxels up to one index outside it.
  for (int k = 0; k < resolution_[2]; ++k) {
    for (int j = 0; j < resolution_[1]; ++j) {
      for (int i = 0; i < resolution_[0]; ++i) {
        const std::size_t idx =
          4 * (static_cast<std::size_t>(i) +
               static_cast<std::size_t>(resolution_[0]) * (j + static_cast<std::size_t>(resolution_[1]) * k));
        if (records_[idx] <= 0.0f) {
          continue;
        }
        const int ijk[3] = {i, j, k};
        int lo[3];
        int hi[3];
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::max(0, (ijk[a] - 1) / kBlock);
          hi[a] = std::min(blocks_[a] - 1, (ijk[a] + 1) / kBlock);
        }
        for (int bz = lo[2]; bz <= hi[2]; ++bz) {
          for (int by = lo[1]; by <= hi[1]; ++by) {
            for (int bx = lo[0]; bx <= hi[0]; ++bx) {
              occupied_[bx + blocks_[0] * (by + blocks_[1] * static_cast<std::size_t>(bz))] = 1;
            }
          }
        }
      }
    }
  }
}

bool VoxelField::block_occupied(int bx, int by, int bz) const
{
  return occupied_[bx + blocks_[0] * (by + blocks_[1] * static_cast<std::size_t>(bz))] != 0;
}

void VoxelField::support(const Ray & ray, double t0, double t1, std::vector<Interval> & out) const
{
  const auto range = bounds_.clip(ray, t0, t1);
  if (!range) {
    return;
  }
  const auto [ta, tb] = *range;
  const Vector3 block_size = voxel_size_ * kBlock;

  // Amanatides-Woo traversal of the occupancy blocks.
  const Vector3 start = ray.at(0.5 * (ta + std::min(tb, ta + 1e-9)));
  int cell[3];
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    cell[a] = std::clamp(
      static_cast<int>(std::floor((start[a] - bounds_.min[a]) / block_size[a])), 0, blocks_[a] - 1);
    const double d = ray.direction[a];
    if (d > 0.0) {
      step[a] = 1;
      t_max[a] = (bounds_.min[a] + (cell[a] + 1) * block_size[a] - ray.origin[a]) / d;
      t_delta[a] = block_size[a] / d;
    } else if (d < 0.0) {
      step[a] = -1;
      t_max[a] = (bounds_.min[a] + cell[a] * block_size[a] - ray.origin[a]) / d;
      t_delta[a] = -block_size[a] / d;
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  double t = ta;
  while (t < tb) {
    const int axis = t_max[0] < t_max[1] ? (t_max[0] < t_max[2] ? 0 : 2) : (t_max[1] < t_max[2] ? 1 : 2);
    const double t_next = std::min(t_max[axis], tb);
    if (block_occupied(cell[0], cell[1], cell[2])) {
      push_merged(out, t - kSupportPad, t_next + kSupportPad);
    }
    t = t_next;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= blocks_[axis]) {
      break;
    }
    t_max[axis] += t_delta[axis];
  }
}

VoxelField bake_voxels(const RadianceField & field, const std::array<int, 3> & resolution)
{
  for (const int n : resolution) {
    if (n < 2) {
      throw BadSpecError("bake_voxels: resolution must be >= 2 on every axis");
    }
  }
  const Aabb & b = field.bounds();
  const Vector3 size = (b.max - b.min).array() / Eigen::Array3d(resolution[0], resolution[1], resolution[2]);
  std::vector<float> records(4 * static_cast<std::size_t>(resolution[0]) * resolution[1] * resolution[2]);
  std::size_t idx = 0;
  const Vector3 view = Vector3::UnitZ();
  for (int k = 0; k < resolution[2]; ++k) {
    for (int j = 0; j < resolution[1]; ++j) {
      for (int i = 0; i < resolution[0]; ++i) {
        const Vector3 p = b.min + (Eigen::Array3d(i, j, k) + 0.5).matrix().cwiseProduct(size);
        const FieldSample s = field.query(p, view);
        records[idx++] = static_cast<float>(s.sigma);
        records[idx++] = static_cast<float>(s.color.x());
        records[idx++] = static_cast<float>(s.color.y());
        records[idx++] = static_cast<float>(s.color.z());
      }
    }
  }
  return VoxelField(resolution, b, std::move(records), field.background());
}

}  // namespace radloc
