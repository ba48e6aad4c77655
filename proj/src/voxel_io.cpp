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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string_view>

#include "radloc/errors.hpp"
#include "radloc/radiance_field.hpp"

namespace radloc
{

namespace
{

constexpr std::string_view kMagic = "VOXRF1";

static_assert(std::endian::native == std::endian::little, "voxel files are little-endian");

template <typename T>
void put(std::ofstream & os, T value)
{
  os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream & is, const std::filesystem::path & path)
{
  T value{};
  if (!is.read(reinterpret_cast<char *>(&value), sizeof(T))) {
    throw IoError("load_voxels: " + path.string() + ": truncated file");
  }
  return value;
}

}  // namespace

void save_voxels(const std::filesystem::path & path, const VoxelField & field)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("save_voxels: cannot open " + path.string());
  }
  os.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  for (const int n : field.resolution()) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  }
  for (int a = 0; a < 3; ++a) {
    put<double>(os, field.bounds().min[a]);
  }
  for (int a = 0; a < 3; ++a) {
    put<double>(os, field.bounds().max[a]);
  }
  const auto & rec = field.records();
  os.write(reinterpret_cast<const char *>(rec.data()), static_cast<std::streamsize>(rec.size() * sizeof(float)));
  if (!os) {
    throw IoError("save_voxels: write failed for " + path.string());
  }
}

VoxelField load_voxels(const std::filesystem::path & path, const Rgb & background)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("load_voxels: cannot open " + path.string());
  }
  char magic[6];
  if (!is.read(magic, sizeof(magic)) || std::string_view(magic, sizeof(magic)) != kMagic) {
    throw IoError("load_voxels: " + path.string() + ": bad magic");
  }
  std::array<int, 3> res{};
  for (auto & n : res) {
    n = static_cast<int>(get<std::uint32_t>(is, path));
  }
  Aabb bounds;
  for (int a = 0; a < 3; ++a) {
    bounds.min[a] = get<double>(is, path);
  }
  for (int a = 0; a < 3; ++a) {
    bounds.max[a] = get<double>(is, path);
  }
  if (res[0] < 2 || res[1] < 2 || res[2] < 2 || res[0] > 4096 || res[1] > 4096 || res[2] > 4096) {
    throw IoError("load_voxels: " + path.string() + ": implausible resolution");
  }
  std::vector<float> records(4 * static_cast<std::size_t>(res[0]) * res[1] * res[2]);
  if (!is.read(reinterpret_cast<char *>(records.data()), static_cast<std::streamsize>(records.size() * sizeof(float)))) {
    throw IoError("load_voxels: " + path.string() + ": truncated records");
  }
  return VoxelField(res, bounds, std::move(records), background);
}

}  // namespace radloc
