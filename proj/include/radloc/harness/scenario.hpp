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


#ifndef RADLOC__HARNESS__SCENARIO_HPP_
#define RADLOC__HARNESS__SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "radloc/camera.hpp"
#include "radloc/motion.hpp"
#include "radloc/particle_filter.hpp"
#include "radloc/radiance_field.hpp"
#include "radloc/render.hpp"

namespace radloc::harness
{

enum class MapKind
{
  kAnalytic,  // filter and dataset both use the analytic scene
  kBaked,     // dataset from the analytic scene, filter from its voxel bake
  kVoxel,     // filter and dataset both use a voxel file
};

struct MapSpec
{
  MapKind kind = MapKind::kAnalytic;
  std::vector<Primitive> primitives;  // empty means the built-in triad scene
  Aabb bounds{Vector3::Constant(-3.0), Vector3::Constant(3.0)};
  Rgb background = Rgb::Zero();
  std::filesystem::path voxel_file;
  int bake_resolution = 128;
};

enum class TrajectoryKind { kOrbit, kFile };

/// Cameras on a horizontal arc around `center`, each looking at it.
struct OrbitSpec
{
  Vector3 center{0.0, 1.0 / 3.0, 2.5};
  double radius = 2.0;
  double height = -0.5;  // added to center.y (negative is up)
  double arc_start_deg = -45.0;
  double arc_end_deg = 45.0;
  int count = 20;
  double dt = 1.0;
};

struct TrajectorySpec
{
  TrajectoryKind kind = TrajectoryKind::kOrbit;
  OrbitSpec orbit;
  std::filesystem::path file;
};

struct InitConfig
{
  InitMode mode = InitMode::kLocal;
  // Local: the initial guess is truth * exp(delta) with a random-axis rotation
  // of angle uniform in +/- guess_rot_deg and per-axis translation in
  // +/- guess_trans; particles spread around it by rot_range_deg/trans_range.
  double guess_rot_deg = 40.0;
  double guess_trans = 0.1;
  double rot_range_deg = 40.0;
  double trans_range = 0.1;
  // Global: a box of half-size box_half centered at truth + offset, with the
  // offset uniform in +/- offset per axis. Heading is uniform in
  // +/- yaw_range_deg about the world up axis, on top of the true attitude.
  double offset = 1.0;
  Vector3 box_half = Vector3::Ones();
  double yaw_range_deg = 180.0;
  double roll_pitch_range_deg = 0.0;
};

struct FilterSettings
{
  int n_init = 300;
  int n_reduced = 100;
  int m = 64;
  double sigma_r_init_deg = 1.0;
  double sigma_t_init = 0.04;
  bool relative_thresholds = true;  // alphas are multiples of the initial spread
  double alpha_refine = 0.1;
  double alpha_super_refine = 0.05;
  ResamplingScheme resampling = ResamplingScheme::kMultinomial;
  int updates_per_image = 1;
  bool annealing = true;
};

struct ExperimentSettings
{
  int trials = 20;
  int max_updates = 60;
  double success_rot_deg = 5.0;
  double success_trans = 0.05;
};

enum class OdometrySource { kPerturbedGt, kConstantVelocity, kFile };

struct OdometrySettings
{
  OdometrySource source = OdometrySource::kPerturbedGt;
  double sigma_r_deg = 1.0;
  double sigma_t = 0.02;
  std::filesystem::path file;
};

struct Scenario
{
  std::uint64_t seed = 0;
  MapSpec map;
  CameraIntrinsics intrinsics = CameraIntrinsics::from_fov(96, 96, 60.0 * std::numbers::pi / 180.0);
  RenderConfig render;          // filter-side rendering
  RenderConfig dataset_render;  // ground-truth image rendering
  double pixel_noise = 0.0;     // std of Gaussian noise added to dataset images
  TrajectorySpec trajectory;
  InitConfig init;
  FilterSettings filter;
  ExperimentSettings experiment;
  OdometrySettings odometry;
  /// Verbatim source text, copied into run directories.
  std::string source_text;
};

/// Parses a scenario; relative file paths resolve against `base_dir`.
/// Throws ConfigError for schema violations and missing files.
Scenario parse_scenario(const std::string & text, const std::filesystem::path & base_dir);
Scenario load_scenario(const std::filesystem::path & path);

/// Fields of a scenario: `truth` renders ground-truth images and `map()` is
/// what the filter localizes against (the same object unless the map is baked).
struct SceneFields
{
  std::unique_ptr<RadianceField> truth;
  std::unique_ptr<RadianceField> baked;

  const RadianceField & map() const { return baked ? *baked : *truth; }
};

SceneFields make_fields(const Scenario & scenario);

/// Camera pose looking from `eye` toward `target`, image +y pointing along world +y.
Pose look_at(const Vector3 & eye, const Vector3 & target);

/// Ground-truth trajectory of the scenario (orbit or file).
std::vector<TrajectorySample> make_trajectory(const Scenario & scenario);

}  // namespace radloc::harness

#endif  // RADLOC__HARNESS__SCENARIO_HPP_
