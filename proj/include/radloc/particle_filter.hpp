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

#ifndef RADLOC__PARTICLE_FILTER_HPP_
#define RADLOC__PARTICLE_FILTER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "radloc/camera.hpp"
#include "radloc/image.hpp"
#include "radloc/radiance_field.hpp"
#include "radloc/random.hpp"
#include "radloc/render.hpp"
#include "radloc/se3.hpp"

namespace radloc
{

struct Particle
{
  Pose pose;
  double weight = 0.0;
};

struct ParticleSet
{
  std::vector<Particle> particles;
  /// Number of filter iterations applied so far.
  std::uint64_t time_index = 0;

  std::size_t size() const { return particles.size(); }
  double weight_sum() const;
};

struct AnnealConfig
{
  double sigma_r_init = 0.0;        // radians
  double sigma_t_init = 0.0;        // meters
  double alpha_refine = 0.0;        // meters
  double alpha_super_refine = 0.0;  // meters
  int n_init = 0;
  int n_reduced = 0;

  /// Throws BadSpecError unless 0 < alpha_super_refine < alpha_refine and
  /// 0 < n_reduced <= n_init.
  void validate() const;
};

enum class AnnealStage { kInit, kRefine, kSuperRefine };

const char * to_string(AnnealStage stage);

struct AnnealState
{
  double sigma_r = 0.0;
  double sigma_t = 0.0;
  int n = 0;
  AnnealStage stage = AnnealStage::kInit;

  NoiseParams noise() const { return {sigma_r, sigma_t}; }
};

enum class InitMode { kLocal, kGlobal };

struct InitSpec
{
  InitMode mode = InitMode::kLocal;
  int count = 0;

  // kLocal: center * exp(delta), delta uniform per component.
  Pose center;
  double rot_range = 0.0;    // radians
  double trans_range = 0.0;  // meters

  // kGlobal: positions uniform in the box; heading uniform about the world
  // up axis applied on top of base_rotation; roll (about the body z axis) and
  // pitch (about the body x axis) uniform in +/- roll_pitch_range.
  Vector3 box_min = Vector3::Zero();
  Vector3 box_max = Vector3::Zero();
  double yaw_range = 0.0;         // radians
  double roll_pitch_range = 0.0;  // radians
  Rotation base_rotation;
  Vector3 up_axis = -Vector3::UnitY();
};

enum class ResamplingScheme { kMultinomial, kSystematic };

ParticleSet init_local(const InitSpec & spec, RandomStream & rng);
ParticleSet init_global(const InitSpec & spec, RandomStream & rng);

/// X <- X * odom * exp(noise sample), per particle; weights unchanged.
ParticleSet predict(const ParticleSet & set, const Pose & odom, const NoiseParams & noise, RandomStream & rng);

/// Raw photometric weight (m / max(eps, residual_sum))^4 with eps = 1e-8 m.
double photometric_weight(int m, double residual_sum);

/// In-place normalization to unit sum; falls back to uniform weights when the
/// sum is zero or not finite. Scaling every input weight by a power of two
/// leaves the result bit-identical.
void normalize_weights(std::vector<Particle> & particles);

struct UpdateStats
{
  std::vector<double> residual_sums;
  /// rays rendered * samples per ray
  std::uint64_t forward_passes = 0;
};

/// One pixel subset of size m is drawn and shared by every particle; each
/// particle renders those pixels from its pose and is weighted by
/// photometric_weight. Weights are normalized on return.
ParticleSet update_weights(
  const ParticleSet & set, const Image & image, const RadianceField & field, const CameraIntrinsics & intr,
  const RenderConfig & cfg, int m, RandomStream & rng, UpdateStats * stats = nullptr);

/// Draws n particles with replacement in proportion to weight; output weights 1/n.
ParticleSet resample(
  const ParticleSet & set, int n, RandomStream & rng,
  ResamplingScheme scheme = ResamplingScheme::kMultinomial);

/// sqrt(trace(cov)) of particle positions, equal weights, population covariance.
double position_spread(const ParticleSet & set);

/// Particle annealing schedule: noise and population from the current spread.
AnnealState anneal(const AnnealConfig & cfg, double spread);
/// State used when annealing is switched off.
AnnealState anneal_disabled(const AnnealConfig & cfg);

/// Weighted mean translation and Karcher-mean rotation.
Pose estimate_pose(const ParticleSet & set);

struct FilterConfig
{
  AnnealConfig anneal;
  int m = 64;
  ResamplingScheme resampling = ResamplingScheme::kMultinomial;
  int updates_per_image = 1;
  bool annealing = true;
  RenderConfig render;
};

struct FilterContext
{
  const RadianceField & field;
  CameraIntrinsics intr;
  FilterConfig cfg;
};

/// Reported after every update iteration inside step().
struct IterationReport
{
  int iteration = 0;
  Pose estimate;
  AnnealState anneal;
  /// Particles weighed in this iteration.
  std::size_t particles = 0;
  std::uint64_t forward_passes = 0;
  /// Spread after resampling.
  double spread = 0.0;
};

struct StepResult
{
  ParticleSet set;
  Pose estimate;
  AnnealState anneal;
  /// Estimate of the predicted set before the first update of this image;
  /// empty when the rotation average of that set did not converge.
  std::optional<Pose> predicted_estimate;
  int updates = 0;
  std::uint64_t forward_passes = 0;
};

using IterationObserver = std::function<void(const IterationReport &)>;

/// One image worth of filtering: cfg.updates_per_image iterations of
/// anneal -> predict -> update -> estimate -> resample. The odometry is applied
/// on the first iteration only. With zero updates the set is only predicted
/// and the estimate is taken from the predicted set.
StepResult step(
  const ParticleSet & set, const Pose & odom, const Image & image, const FilterContext & ctx, RandomStream & rng,
  const IterationObserver & observer = {});

}  // namespace radloc

#endif  // RADLOC__PARTICLE_FILTER_HPP_
