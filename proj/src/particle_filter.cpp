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

#include "radloc/particle_filter.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radloc/errors.hpp"

namespace radloc
{

double ParticleSet::weight_sum() const
{
  double s = 0.0;
  for (const auto & p : particles) {
    s += p.weight;
  }
  return s;
}

void AnnealConfig::validate() const
{
  if (!(sigma_r_init >= 0.0) || !(sigma_t_init >= 0.0)) {
    throw BadSpecError("AnnealConfig: initial noise must be non-negative");
  }
  if (!(alpha_super_refine > 0.0 && alpha_super_refine < alpha_refine)) {
    throw BadSpecError("AnnealConfig: need 0 < alpha_super_refine < alpha_refine");
  }
  if (!(n_reduced > 0 && n_reduced <= n_init)) {
    throw BadSpecError("AnnealConfig: need 0 < n_reduced <= n_init");
  }
}

const char * to_string(AnnealStage stage)
{
  switch (stage) {
    case AnnealStage::kInit:
      return "INIT";
    case AnnealStage::kRefine:
      return "REFINE";
    case AnnealStage::kSuperRefine:
      return "SUPER_REFINE";
  }
  return "?";
}

namespace
{

ParticleSet uniform_set(std::vector<Pose> poses)
{
  ParticleSet set;
  const double w = 1.0 / static_cast<double>(poses.size());
  set.particles.reserve(poses.size());
  for (auto & p : poses) {
    set.particles.push_back({std::move(p), w});
  }
  return set;
}

}  // namespace

ParticleSet init_local(const InitSpec & spec, RandomStream & rng)
{
  if (spec.mode != InitMode::kLocal) {
    throw BadSpecError("init_local: spec is not LOCAL");
  }
  if (spec.count < 1 || !(spec.rot_range >= 0.0) || !(spec.trans_range >= 0.0)) {
    throw BadSpecError("init_local: need count >= 1 and non-negative ranges");
  }
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    Twist d;
    for (int a = 0; a < 3; ++a) {
      d.rot[a] = rng.uniform(-spec.rot_range, spec.rot_range);
    }
    for (int a = 0; a < 3; ++a) {
      d.trans[a] = rng.uniform(-spec.trans_range, spec.trans_range);
    }
    poses.push_back(spec.center * exp_map(d));
  }
  return uniform_set(std::move(poses));
}

ParticleSet init_global(const InitSpec & spec, RandomStream & rng)
{
  if (spec.mode != InitMode::kGlobal) {
    throw BadSpecError("init_global: spec is not GLOBAL");
  }
  if (spec.count < 1 || !(spec.yaw_range >= 0.0) || !(spec.roll_pitch_range >= 0.0)) {
    throw BadSpecError("init_global: need count >= 1 and non-negative ranges");
  }
  if (!(spec.box_min.array() <= spec.box_max.array()).all()) {
    throw BadSpecError("init_global: empty position box");
  }
  if (!(spec.up_axis.norm() > 0.0)) {
    throw BadSpecError("init_global: up axis must be non-zero");
  }
  const Vector3 up = spec.up_axis.normalized();
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    Vector3 p;
    for (int a = 0; a < 3; ++a) {
      p[a] = rng.uniform(spec.box_min[a], spec.box_max[a]);
    }
    const double yaw = rng.uniform(-spec.yaw_range, spec.yaw_range);
    const double roll = rng.uniform(-spec.roll_pitch_range, spec.roll_pitch_range);
    const double pitch = rng.uniform(-spec.roll_pitch_range, spec.roll_pitch_range);
    const Rotation r = so3_exp(up * yaw) * spec.base_rotation * so3_exp(Vector3::UnitX() * pitch) *
                       so3_exp(Vector3::UnitZ() * roll);
    poses.emplace_back(r, p);
  }
  return uniform_set(std::move(poses));
}

ParticleSet predict(const ParticleSet & set, const Pose & odom, const NoiseParams & noise, RandomStream & rng)
{
  const std::uint64_t base = rng.next_seed();
  ParticleSet out = set;
  for (std::size_t i = 0; i < out.particles.size(); ++i) {
    RandomStream prng = RandomStream::derive(base, {set.time_index, i});
    out.particles[i].pose = set.particles[i].pose * odom * exp_map(sample_noise(noise, prng));
  }
  return out;
}

double photometric_weight(int m, double residual_sum)
{
  const double eps = 1e-8 * m;
  const double ratio = static_cast<double>(m) / std::max(eps, residual_sum);
  const double sq = ratio * ratio;
  return sq * sq;
}

void normalize_weights(std::vector<Particle> & particles)
{
  double max_w = 0.0;
  for (const auto & p : particles) {
    max_w = std::max(max_w, p.weight);
  }
  if (!(max_w > 0.0) || !std::isfinite(max_w)) {
    for (auto & p : particles) {
      p.weight = 1.0 / static_cast<double>(particles.size());
    }
    return;
  }
  double sum = 0.0;
  for (auto & p : particles) {
    p.weight /= max_w;
    sum += p.weight;
  }
  for (auto & p : particles) {
    p.weight /= sum;
  }
}

ParticleSet update_weights(
  const ParticleSet & set, const Image & image, const RadianceField & field, const CameraIntrinsics & intr,
  const RenderConfig & cfg, int m, RandomStream & rng, UpdateStats * stats)
{
  if (set.particles.empty()) {
    throw BadCountError("update_weights: empty particle set");
  }
  const auto pixels = sample_pixels(intr, image, m, rng);
  const std::uint64_t base = rng.next_seed();

  ParticleSet out = set;
  std::vector<double> residuals(set.size(), 0.0);
  tbb::parallel_for(std::size_t{0}, set.size(), [&](std::size_t i) {
    RandomStream prng = RandomStream::derive(base, {set.time_index, i});
    const Pose & pose = set.particles[i].pose;
    double sum = 0.0;
    for (const auto & px : pixels) {
      const Rgb c = render_ray(field, pixel_to_ray(intr, pose, px.u, px.v), cfg, prng);
      sum += (px.color - c).squaredNorm();
    }
    residuals[i] = sum;
    out.particles[i].weight = photometric_weight(m, sum);
  });
  normalize_weights(out.particles);

  if (stats != nullptr) {
    stats->residual_sums = std::move(residuals);
    stats->forward_passes =
      static_cast<std::uint64_t>(set.size()) * static_cast<std::uint64_t>(m) * cfg.samples_per_ray();
  }
  return out;
}

ParticleSet resample(const ParticleSet & set, int n, RandomStream & rng, ResamplingScheme scheme)
{
  if (set.particles.empty() || n < 1) {
    throw BadCountError("resample: need a non-empty set and n >= 1");
  }
  std::vector<double> cdf(set.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    acc += set.particles[i].weight;
    cdf[i] = acc;
  }
  const auto pick = [&](double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * acc);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), set.size() - 1);
  };

  ParticleSet out;
  out.time_index = set.time_index;
  out.particles.reserve(static_cast<std::size_t>(n));
  const double w = 1.0 / n;
  if (scheme == ResamplingScheme::kMultinomial) {
    for (int k = 0; k < n; ++k) {
      out.particles.push_back({set.particles[pick(rng.uniform01())].pose, w});
    }
  } else {
    const double u0 = rng.uniform01() / n;
    for (int k = 0; k < n; ++k) {
      out.particles.push_back({set.particles[pick(u0 + static_cast<double>(k) / n)].pose, w});
    }
  }
  return out;
}

double position_spread(const ParticleSet & set)
{
  if (set.particles.empty()) {
    throw BadCountError("position_spread: empty particle set");
  }
  const double n = static_cast<double>(set.size());
  Vector3 mean = Vector3::Zero();
  for (const auto & p : set.particles) {
    mean += p.pose.translation();
  }
  mean /= n;
  double trace = 0.0;
  for (const auto & p : set.particles) {
    trace += (p.pose.translation() - mean).squaredNorm();
  }
  return std::sqrt(trace / n);
}

AnnealState anneal(const AnnealConfig & cfg, double spread)
{
  if (spread < cfg.alpha_super_refine) {
    return {cfg.sigma_r_init / 4.0, cfg.sigma_t_init / 4.0, cfg.n_reduced, AnnealStage::kSuperRefine};
  }
  if (spread < cfg.alpha_refine) {
    return {cfg.sigma_r_init / 2.0, cfg.sigma_t_init / 2.0, cfg.n_reduced, AnnealStage::kRefine};
  }
  return anneal_disabled(cfg);
}

AnnealState anneal_disabled(const AnnealConfig & cfg)
{
  return {cfg.sigma_r_init, cfg.sigma_t_init, cfg.n_init, AnnealStage::kInit};
}

Pose estimate_pose(const ParticleSet & set)
{
  if (set.particles.empty()) {
    throw BadCountError("estimate_pose: empty particle set");
  }
  Vector3 t = Vector3::Zero();
  std::vector<Rotation> rotations;
  std::vector<double> weights;
  rotations.reserve(set.size());
  weights.reserve(set.size());
  for (const auto & p : set.particles) {
    t += p.weight * p.pose.translation();
    rotations.push_back(p.pose.rotation());
    weights.push_back(p.weight);
  }
  return Pose(rotation_average(rotations, weights), t);
}

StepResult step(
  const ParticleSet & set, const Pose & odom, const Image & image, const FilterContext & ctx, RandomStream & rng,
  const IterationObserver & observer)
{
  const FilterConfig & cfg = ctx.cfg;
  StepResult result;
  result.set = set;

  const auto schedule = [&](const ParticleSet & s) {
    return cfg.annealing ? anneal(cfg.anneal, position_spread(s)) : anneal_disabled(cfg.anneal);
  };

  if (cfg.updates_per_image <= 0) {
    result.anneal = schedule(result.set);
    result.set = predict(result.set, odom, result.anneal.noise(), rng);
    result.set.time_index++;
    result.estimate = estimate_pose(result.set);
    result.predicted_estimate = result.estimate;
    return result;
  }

  for (int it = 0; it < cfg.updates_per_image; ++it) {
    const AnnealState state = schedule(result.set);
    ParticleSet predicted = predict(result.set, it == 0 ? odom : Pose::identity(), state.noise(), rng);
    if (it == 0) {
      try {
        result.predicted_estimate = estimate_pose(predicted);
      } catch (const NonConvergenceError &) {
        result.predicted_estimate.reset();
      }
    }
    UpdateStats stats;
    ParticleSet weighed = update_weights(predicted, image, ctx.field, ctx.intr, cfg.render, cfg.m, rng, &stats);
    result.estimate = estimate_pose(weighed);
    result.set = resample(weighed, state.n, rng, cfg.resampling);
    result.set.time_index++;
    result.anneal = state;
    result.updates++;
    result.forward_passes += stats.forward_passes;

    if (observer) {
      IterationReport report;
      report.iteration = it;
      report.estimate = result.estimate;
      report.anneal = state;
      report.particles = weighed.size();
      report.forward_passes = stats.forward_passes;
      report.spread = position_spread(result.set);
      observer(report);
    }
  }
  return result;
}

}  // namespace radloc
