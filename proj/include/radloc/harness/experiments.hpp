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


#ifndef RADLOC__HARNESS__EXPERIMENTS_HPP_
#define RADLOC__HARNESS__EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "radloc/harness/scenario.hpp"
#include "radloc/image.hpp"

namespace radloc::harness
{

struct RunOptions
{
  /// Run directory; nothing is written when empty.
  std::filesystem::path out_dir;
  /// Overrides the scenario seed.
  std::optional<std::uint64_t> seed;
  /// Ablation switch: fixed initial noise and population.
  bool no_anneal = false;
};

/// One row of the per-step record stream.
struct StepRecord
{
  int step = 0;
  int updates = 0;
  double rot_err_deg = 0.0;
  double trans_err_m = 0.0;
  double spread_m = 0.0;
  std::uint64_t n_particles = 0;
  double wall_ms = 0.0;
  /// Cumulative rays rendered times samples per ray.
  std::uint64_t forward_passes = 0;
};

struct TrialResult
{
  int trial = 0;
  int frame = 0;
  std::vector<StepRecord> steps;
  Pose final_estimate;
  /// First step meeting both success thresholds, or -1.
  int first_success_step = -1;
  /// First update step that ran with a non-initial anneal stage, or -1.
  int trigger_step = -1;
  int updates_after_trigger = 0;
  std::uint64_t forward_passes_after_trigger = 0;
};

struct BenchmarkResult
{
  std::vector<TrialResult> trials;
};

struct Dataset
{
  std::vector<TrajectorySample> trajectory;
  std::vector<Image> images;
};

struct FrameRecord
{
  int frame = 0;
  double pred_rot_deg = 0.0;
  double pred_trans_m = 0.0;
  double post_rot_deg = 0.0;
  double post_trans_m = 0.0;
  double odom_rot_deg = 0.0;
  double odom_trans_m = 0.0;
};

struct TrackRun
{
  int trial = 0;
  std::vector<StepRecord> steps;
  std::vector<FrameRecord> frames;
  std::vector<Pose> estimates;
};

struct TrackResult
{
  std::vector<TrackRun> runs;
};

struct ComparePair
{
  int frame = 0;
  double mae = 0.0;
};

/// Renders the ground-truth image of every trajectory pose. Image k is
/// render_image(truth, pose_k) with a stream derived from (seed, k), plus
/// optional pixel noise from the same stream.
Dataset render_dataset(const Scenario & scenario, const RadianceField & truth, std::uint64_t seed);

/// Bakes the scene, renders the dataset and writes map.voxrf, images/,
/// trajectory.txt and manifest.txt into the run directory.
Dataset make_scene(const Scenario & scenario, const RunOptions & options);

/// Static-image localization from a perturbed local initialization.
BenchmarkResult run_single_image(const Scenario & scenario, const RunOptions & options);
/// Static-image localization from a global initialization.
BenchmarkResult run_global(const Scenario & scenario, const RunOptions & options);
/// Filtering along the trajectory with odometry and several updates per image.
TrackResult run_track(const Scenario & scenario, const RunOptions & options);

/// Renders the poses stored in `run_dir`/estimates.txt next to renders from
/// the matching ground-truth poses. Throws IoError if the artifact is missing.
std::vector<ComparePair> render_compare(
  const Scenario & scenario, const std::filesystem::path & run_dir, const RunOptions & options);

/// Geodesic rotation error in degrees and translation error in meters.
std::pair<double, double> pose_error(const Pose & estimate, const Pose & truth);

}  // namespace radloc::harness

#endif  // RADLOC__HARNESS__EXPERIMENTS_HPP_
