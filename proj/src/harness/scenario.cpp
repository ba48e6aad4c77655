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


#include "radloc/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "radloc/errors.hpp"

namespace radloc::harness
{
namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const YAML::Node & node, const std::string & what)
{
  std::ostringstream os;
  os << "scenario: " << what;
  if (node.Mark().line >= 0) {
    os << " (line " << node.Mark().line + 1 << ")";
  }
  throw ConfigError(os.str());
}

void check_keys(const YAML::Node & node, const std::string & section, const std::set<std::string> & allowed)
{
  if (!node.IsMap()) {
    fail(node, "section '" + section + "' must be a mapping");
  }
  for (const auto & kv : node) {
    const auto key = kv.first.as<std::string>();
    if (allowed.count(key) == 0) {
      fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const YAML::Node & node, const char * key, T & out)
{
  if (const YAML::Node v = node[key]) {
    try {
      out = v.as<T>();
    } catch (const YAML::Exception &) {
      fail(v, std::string("bad value for '") + key + "'");
    }
  }
}

Vector3 as_vec3(const YAML::Node & v, const char * key)
{
  if (!v.IsSequence() || v.size() != 3) {
    fail(v, std::string("'") + key + "' must be a list of three numbers");
  }
  try {
    return Vector3(v[0].as<double>(), v[1].as<double>(), v[2].as<double>());
  } catch (const YAML::Exception &) {
    fail(v, std::string("'") + key + "' must be a list of three numbers");
  }
}

void read_vec3(const YAML::Node & node, const char * key, Vector3 & out)
{
  if (const YAML::Node v = node[key]) {
    out = as_vec3(v, key);
  }
}

std::filesystem::path resolve(const std::filesystem::path & base, const std::string & p)
{
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const YAML::Node & node, const std::filesystem::path & path)
{
  if (!std::filesystem::is_regular_file(path)) {
    fail(node, "referenced file does not exist: " + path.string());
  }
}

RenderConfig parse_render(const YAML::Node & node, const char * section, RenderConfig cfg)
{
  if (!node) {
    return cfg;
  }
  check_keys(node, section, {"z_near", "z_far", "n_coarse", "n_fine", "stratified"});
  read(node, "z_near", cfg.z_near);
  read(node, "z_far", cfg.z_far);
  read(node, "n_coarse", cfg.n_coarse);
  read(node, "n_fine", cfg.n_fine);
  read(node, "stratified", cfg.stratified);
  try {
    cfg.validate();
  } catch (const BadSpecError & e) {
    fail(node, e.what());
  }
  return cfg;
}

Primitive parse_primitive(const YAML::Node & node)
{
  check_keys(node, "primitive", {"shape", "center", "radius", "min", "max", "sigma", "color"});
  Primitive prim;
  std::string shape;
  read(node, "shape", shape);
  read(node, "sigma", prim.sigma);
  read_vec3(node, "color", prim.color);
  if (shape == "sphere") {
    Sphere s;
    read_vec3(node, "center", s.center);
    read(node, "radius", s.radius);
    prim.shape = s;
  } else if (shape == "box") {
    Box b;
    read_vec3(node, "min", b.min);
    read_vec3(node, "max", b.max);
    prim.shape = b;
  } else {
    fail(node, "primitive shape must be 'sphere' or 'box'");
  }
  return prim;
}

void parse_map(const YAML::Node & node, const std::filesystem::path & base, MapSpec & map)
{
  check_keys(node, "map", {"type", "scene", "primitives", "bounds", "background", "voxel_file", "bake_resolution"});
  std::string type = "analytic";
  read(node, "type", type);
  if (type == "analytic") {
    map.kind = MapKind::kAnalytic;
  } else if (type == "baked") {
    map.kind = MapKind::kBaked;
  } else if (type == "voxel") {
    map.kind = MapKind::kVoxel;
  } else {
    fail(node["type"], "map.type must be analytic, baked or voxel");
  }
  std::string scene = "triad";
  read(node, "scene", scene);
  if (scene != "triad" && scene != "custom") {
    fail(node["scene"], "map.scene must be 'triad' or 'custom'");
  }
  if (scene == "triad" && node["primitives"]) {
    fail(node["primitives"], "map.primitives requires scene: custom");
  }
  if (scene == "custom") {
    const YAML::Node prims = node["primitives"];
    if (!prims || !prims.IsSequence() || prims.size() == 0) {
      fail(node, "scene: custom needs a non-empty primitives list");
    }
    for (const auto & p : prims) {
      map.primitives.push_back(parse_primitive(p));
    }
  }
  if (const YAML::Node b = node["bounds"]) {
    check_keys(b, "map.bounds", {"min", "max"});
    read_vec3(b, "min", map.bounds.min);
    read_vec3(b, "max", map.bounds.max);
  }
  read_vec3(node, "background", map.background);
  read(node, "bake_resolution", map.bake_resolution);
  if (map.bake_resolution < 2) {
    fail(node, "map.bake_resolution must be >= 2");
  }
  if (map.kind == MapKind::kVoxel) {
    std::string file;
    read(node, "voxel_file", file);
    if (file.empty()) {
      fail(node, "map.type voxel needs map.voxel_file");
    }
    map.voxel_file = resolve(base, file);
    require_file(node["voxel_file"], map.voxel_file);
  }
}

CameraIntrinsics parse_camera(const YAML::Node & node)
{
  check_keys(node, "camera", {"width", "height", "hfov_deg", "fx", "fy", "cx", "cy"});
  int w = 96;
  int h = 96;
  read(node, "width", w);
  read(node, "height", h);
  double hfov = 60.0;
  read(node, "hfov_deg", hfov);
  if (!(hfov > 0.0 && hfov < 180.0)) {
    fail(node, "camera.hfov_deg must be in (0, 180)");
  }
  CameraIntrinsics intr;
  try {
    intr = CameraIntrinsics::from_fov(w, h, hfov * kDeg);
  } catch (const Error & e) {
    fail(node, e.what());
  }
  read(node, "fx", intr.fx);
  read(node, "fy", intr.fy);
  read(node, "cx", intr.cx);
  read(node, "cy", intr.cy);
  try {
    intr.validate();
  } catch (const Error & e) {
    fail(node, e.what());
  }
  return intr;
}

void parse_trajectory(const YAML::Node & node, const std::filesystem::path & base, TrajectorySpec & traj)
{
  check_keys(node, "trajectory", {"type", "center", "radius", "height", "arc_deg", "count", "dt", "file"});
  std::string type = "orbit";
  read(node, "type", type);
  if (type == "orbit") {
    traj.kind = TrajectoryKind::kOrbit;
    OrbitSpec & o = traj.orbit;
    read_vec3(node, "center", o.center);
    read(node, "radius", o.radius);
    read(node, "height", o.height);
    if (const YAML::Node arc = node["arc_deg"]) {
      if (!arc.IsSequence() || arc.size() != 2) {
        fail(arc, "trajectory.arc_deg must be [start, end]");
      }
      o.arc_start_deg = arc[0].as<double>();
      o.arc_end_deg = arc[1].as<double>();
    }
    read(node, "count", o.count);
    read(node, "dt", o.dt);
    if (o.count < 1) {
      fail(node, "trajectory.count must be at least 1");
    }
    if (!(o.radius > 0.0) || !(o.dt > 0.0)) {
      fail(node, "trajectory.radius and trajectory.dt must be positive");
    }
  } else if (type == "file") {
    traj.kind = TrajectoryKind::kFile;
    std::string file;
    read(node, "file", file);
    traj.file = resolve(base, file);
    require_file(node, traj.file);
  } else {
    fail(node["type"], "trajectory.type must be orbit or file");
  }
}

void parse_init(const YAML::Node & node, InitConfig & init)
{
  check_keys(
    node, "init",
    {"mode", "guess_rot_deg", "guess_trans", "rot_range_deg", "trans_range", "offset", "box_half", "yaw_range_deg",
     "roll_pitch_range_deg"});
  std::string mode = "local";
  read(node, "mode", mode);
  if (mode == "local") {
    init.mode = InitMode::kLocal;
  } else if (mode == "global") {
    init.mode = InitMode::kGlobal;
  } else {
    fail(node["mode"], "init.mode must be local or global");
  }
  read(node, "guess_rot_deg", init.guess_rot_deg);
  read(node, "guess_trans", init.guess_trans);
  read(node, "rot_range_deg", init.rot_range_deg);
  read(node, "trans_range", init.trans_range);
  read(node, "offset", init.offset);
  read_vec3(node, "box_half", init.box_half);
  read(node, "yaw_range_deg", init.yaw_range_deg);
  read(node, "roll_pitch_range_deg", init.roll_pitch_range_deg);
  const bool negative = init.guess_rot_deg < 0 || init.guess_trans < 0 || init.rot_range_deg < 0 ||
                        init.trans_range < 0 || init.offset < 0 || (init.box_half.array() < 0).any() ||
                        init.yaw_range_deg < 0 || init.roll_pitch_range_deg < 0;
  if (negative) {
    fail(node, "init ranges must be non-negative");
  }
}

void parse_filter(const YAML::Node & node, FilterSettings & f)
{
  check_keys(
    node, "filter",
    {"n_init", "n_reduced", "m", "sigma_r_init_deg", "sigma_t_init", "thresholds", "alpha_refine",
     "alpha_super_refine", "resampling", "updates_per_image", "annealing"});
  read(node, "n_init", f.n_init);
  f.n_reduced = f.n_init < f.n_reduced ? f.n_init : f.n_reduced;
  read(node, "n_reduced", f.n_reduced);
  read(node, "m", f.m);
  read(node, "sigma_r_init_deg", f.sigma_r_init_deg);
  read(node, "sigma_t_init", f.sigma_t_init);
  std::string thresholds = "relative";
  read(node, "thresholds", thresholds);
  if (thresholds != "relative" && thresholds != "absolute") {
    fail(node["thresholds"], "filter.thresholds must be relative or absolute");
  }
  f.relative_thresholds = thresholds == "relative";
  read(node, "alpha_refine", f.alpha_refine);
  read(node, "alpha_super_refine", f.alpha_super_refine);
  std::string resampling = "multinomial";
  read(node, "resampling", resampling);
  if (resampling == "multinomial") {
    f.resampling = ResamplingScheme::kMultinomial;
  } else if (resampling == "systematic") {
    f.resampling = ResamplingScheme::kSystematic;
  } else {
    fail(node["resampling"], "filter.resampling must be multinomial or systematic");
  }
  read(node, "updates_per_image", f.updates_per_image);
  read(node, "annealing", f.annealing);
  if (f.n_init < 1 || f.n_reduced < 1 || f.n_reduced > f.n_init) {
    fail(node, "filter needs 1 <= n_reduced <= n_init");
  }
  if (f.m < 1) {
    fail(node, "filter.m must be at least 1");
  }
  if (f.sigma_r_init_deg < 0 || f.sigma_t_init < 0) {
    fail(node, "filter noise must be non-negative");
  }
  if (!(f.alpha_super_refine > 0.0 && f.alpha_super_refine < f.alpha_refine)) {
    fail(node, "filter needs 0 < alpha_super_refine < alpha_refine");
  }
  if (f.updates_per_image < 0) {
    fail(node, "filter.updates_per_image must be non-negative");
  }
}

void parse_experiment(const YAML::Node & node, ExperimentSettings & e)
{
  check_keys(node, "experiment", {"trials", "max_updates", "success_rot_deg", "success_trans"});
  read(node, "trials", e.trials);
  read(node, "max_updates", e.max_updates);
  read(node, "success_rot_deg", e.success_rot_deg);
  read(node, "success_trans", e.success_trans);
  if (e.trials < 1 || e.max_updates < 0) {
    fail(node, "experiment needs trials >= 1 and max_updates >= 0");
  }
}

void parse_odometry(const YAML::Node & node, const std::filesystem::path & base, OdometrySettings & o)
{
  check_keys(node, "odometry", {"source", "sigma_r_deg", "sigma_t", "file"});
  std::string source = "perturbed_gt";
  read(node, "source", source);
  if (source == "perturbed_gt") {
    o.source = OdometrySource::kPerturbedGt;
  } else if (source == "constant_velocity") {
    o.source = OdometrySource::kConstantVelocity;
  } else if (source == "file") {
    o.source = OdometrySource::kFile;
    std::string file;
    read(node, "file", file);
    o.file = resolve(base, file);
    require_file(node, o.file);
  } else {
    fail(node["source"], "odometry.source must be perturbed_gt, constant_velocity or file");
  }
  read(node, "sigma_r_deg", o.sigma_r_deg);
  read(node, "sigma_t", o.sigma_t);
  if (o.sigma_r_deg < 0 || o.sigma_t < 0) {
    fail(node, "odometry noise must be non-negative");
  }
}

}  // namespace

Scenario parse_scenario(const std::string & text, const std::filesystem::path & base_dir)
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException & e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (!root.IsMap()) {
    throw ConfigError("scenario: top level must be a mapping");
  }
  check_keys(
    root, "top level",
    {"seed", "map", "camera", "render", "dataset_render", "pixel_noise", "trajectory", "init", "filter", "experiment",
     "odometry"});

  Scenario s;
  s.source_text = text;
  if (!root["seed"]) {
    throw ConfigError("scenario: 'seed' is mandatory");
  }
  read(root, "seed", s.seed);

  s.dataset_render.n_coarse = 128;
  s.dataset_render.n_fine = 64;
  if (root["map"]) parse_map(root["map"], base_dir, s.map);
  if (root["camera"]) s.intrinsics = parse_camera(root["camera"]);
  s.render = parse_render(root["render"], "render", s.render);
  s.dataset_render = parse_render(root["dataset_render"], "dataset_render", s.dataset_render);
  read(root, "pixel_noise", s.pixel_noise);
  if (s.pixel_noise < 0) {
    fail(root["pixel_noise"], "pixel_noise must be non-negative");
  }
  if (root["trajectory"]) parse_trajectory(root["trajectory"], base_dir, s.trajectory);
  if (root["init"]) parse_init(root["init"], s.init);
  if (root["filter"]) parse_filter(root["filter"], s.filter);
  if (root["experiment"]) parse_experiment(root["experiment"], s.experiment);
  if (root["odometry"]) parse_odometry(root["odometry"], base_dir, s.odometry);
  return s;
}

Scenario load_scenario(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

SceneFields make_fields(const Scenario & s)
{
  SceneFields f;
  if (s.map.kind == MapKind::kVoxel) {
    f.truth = std::make_unique<VoxelField>(load_voxels(s.map.voxel_file, s.map.background));
  } else if (s.map.primitives.empty()) {
    const AnalyticScene triad = AnalyticScene::triad();
    f.truth = std::make_unique<AnalyticScene>(triad.primitives(), triad.bounds(), s.map.background);
  } else {
    try {
      f.truth = std::make_unique<AnalyticScene>(s.map.primitives, s.map.bounds, s.map.background);
    } catch (const BadSpecError & e) {
      throw ConfigError(std::string("scenario: invalid scene: ") + e.what());
    }
  }
  if (s.map.kind == MapKind::kBaked) {
    const int r = s.map.bake_resolution;
    f.baked = std::make_unique<VoxelField>(bake_voxels(*f.truth, {r, r, r}));
  }
  return f;
}

Pose look_at(const Vector3 & eye, const Vector3 & target)
{
  const Vector3 z = (target - eye).normalized();
  Vector3 x = Vector3::UnitY().cross(z);
  if (x.norm() < 1e-9) {
    throw BadSpecError("look_at: viewing direction parallel to the vertical axis");
  }
  x.normalize();
  const Vector3 y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(Rotation::from_matrix(r), eye);
}

std::vector<TrajectorySample> make_trajectory(const Scenario & s)
{
  if (s.trajectory.kind == TrajectoryKind::kFile) {
    return load_trajectory(s.trajectory.file);
  }
  const OrbitSpec & o = s.trajectory.orbit;
  std::vector<TrajectorySample> out;
  for (int k = 0; k < o.count; ++k) {
    const double t = o.count == 1 ? 0.5 : static_cast<double>(k) / (o.count - 1);
    const double az = (o.arc_start_deg + t * (o.arc_end_deg - o.arc_start_deg)) * kDeg;
    const Vector3 eye = o.center + Vector3(o.radius * std::sin(az), o.height, -o.radius * std::cos(az));
    out.push_back({k * o.dt, look_at(eye, o.center)});
  }
  return out;
}

}  // namespace radloc::harness
