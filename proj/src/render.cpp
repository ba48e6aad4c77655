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

#include "radloc/render.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>

#include "radloc/errors.hpp"

namespace radloc
{

void RenderConfig::validate() const
{
  if (!(z_near >= 0.0 && z_near < z_far)) {
    throw BadSpecError("RenderConfig: need 0 <= z_near < z_far");
  }
  if (n_coarse < 2) {
    throw BadSpecError("RenderConfig: n_coarse must be >= 2");
  }
  if (n_fine < 0) {
    throw BadSpecError("RenderConfig: n_fine must be >= 0");
  }
}

std::vector<double> sample_coarse(const RenderConfig & cfg, RandomStream & rng)
{
  std::vector<double> z(static_cast<std::size_t>(cfg.n_coarse));
  const double width = (cfg.z_far - cfg.z_near) / cfg.n_coarse;
  for (int i = 0; i < cfg.n_coarse; ++i) {
    const double offset = cfg.stratified ? rng.uniform01() : 0.5;
    z[i] = std::min(cfg.z_far, cfg.z_near + (i + offset) * width);
  }
  return z;
}

std::vector<double> sample_fine(
  const RenderConfig & cfg, std::span<const double> coarse_depths, std::span<const double> weights,
  RandomStream & rng)
{
  if (coarse_depths.size() != weights.size() || coarse_depths.empty()) {
    throw BadCountError("sample_fine: depth and weight lists must be non-empty and equal in length");
  }
  const std::size_t n = coarse_depths.size();
  std::vector<double> out(coarse_depths.begin(), coarse_depths.end());
  if (cfg.n_fine <= 0) {
    return out;
  }

  std::vector<double> edges(n + 1);
  edges[0] = cfg.z_near;
  for (std::size_t i = 1; i < n; ++i) {
    edges[i] = 0.5 * (coarse_depths[i - 1] + coarse_depths[i]);
  }
  edges[n] = cfg.z_far;

  double total = 0.0;
  for (const double w : weights) {
    if (w < 0.0) {
      throw BadSpecError("sample_fine: weights must be non-negative");
    }
    total += w;
  }
  std::vector<double> cdf(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double mass = total > 0.0 ? weights[i] / total : 1.0 / static_cast<double>(n);
    cdf[i + 1] = cdf[i] + mass;
  }
  cdf[n] = 1.0;

  out.reserve(n + static_cast<std::size_t>(cfg.n_fine));
  for (int k = 0; k < cfg.n_fine; ++k) {
    const double u = rng.uniform01();
    // First bin whose upper CDF value exceeds u; zero-mass bins are skipped.
    auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    if (it == cdf.end()) {
      --it;
    }
    const auto bin = static_cast<std::size_t>(it - cdf.begin()) - 1;
    const double mass = cdf[bin + 1] - cdf[bin];
    const double frac = mass > 0.0 ? std::clamp((u - cdf[bin]) / mass, 0.0, 1.0) : 0.5;
    out.push_back(edges[bin] + frac * (edges[bin + 1] - edges[bin]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace
{

struct Scratch
{
  std::vector<Interval> support;
  std::vector<double> sigma;
  std::vector<Rgb> color;
};

// Evaluates the field at `depths`, skipping depths outside the field's support.
void evaluate(
  const RadianceField & field, const Ray & ray, const RenderConfig & cfg, std::span<const double> depths,
  Scratch & s)
{
  s.support.clear();
  field.support(ray, cfg.z_near, cfg.z_far, s.support);
  s.sigma.assign(depths.size(), 0.0);
  s.color.resize(depths.size());
  std::size_t iv = 0;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double z = depths[i];
    while (iv < s.support.size() && s.support[iv].t1 < z) {
      ++iv;
    }
    if (iv == s.support.size()) {
      break;
    }
    if (z < s.support[iv].t0) {
      continue;
    }
    const FieldSample f = field.query(ray.at(z), ray.direction);
    s.sigma[i] = f.sigma;
    s.color[i] = f.color;
  }
}

// Per-sample compositing weights T_i alpha_i; returns the residual transmittance.
// The first sample also covers the leading segment [z_near, z_0].
double composite_weights(
  std::span<const double> depths, std::span<const double> sigma, const RenderConfig & cfg,
  std::vector<double> & weights)
{
  weights.assign(depths.size(), 0.0);
  double transmittance = 1.0;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (sigma[i] <= 0.0) {
      continue;
    }
    const double start = i == 0 ? cfg.z_near : depths[i];
    const double gap = (i + 1 < depths.size() ? depths[i + 1] : cfg.z_far) - start;
    const double alpha = 1.0 - std::exp(-sigma[i] * gap);
    weights[i] = transmittance * alpha;
    transmittance *= 1.0 - alpha;
  }
  return transmittance;
}

}  // namespace

RayResult render_ray_detail(const RadianceField & field, const Ray & ray, const RenderConfig & cfg, RandomStream & rng)
{
  thread_local Scratch scratch;
  thread_local std::vector<double> weights;

  std::vector<double> depths = sample_coarse(cfg, rng);
  evaluate(field, ray, cfg, depths, scratch);
  double transmittance = composite_weights(depths, scratch.sigma, cfg, weights);

  if (cfg.n_fine > 0) {
    depths = sample_fine(cfg, depths, weights, rng);
    evaluate(field, ray, cfg, depths, scratch);
    transmittance = composite_weights(depths, scratch.sigma, cfg, weights);
  }

  RayResult out;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (weights[i] > 0.0) {
      out.color += weights[i] * scratch.color[i];
      out.opacity += weights[i];
    }
  }
  out.color += transmittance * field.background();
  out.color = out.color.cwiseMax(0.0).cwiseMin(1.0);
  out.opacity = std::clamp(out.opacity, 0.0, 1.0);
  return out;
}

Rgb render_ray(const RadianceField & field, const Ray & ray, const RenderConfig & cfg, RandomStream & rng)
{
  return render_ray_detail(field, ray, cfg, rng).color;
}

Image render_image(
  const RadianceField & field, const Pose & pose, const CameraIntrinsics & intr, const RenderConfig & cfg,
  RandomStream & rng)
{
  intr.validate();
  cfg.validate();
  const std::uint64_t base = rng.next_seed();
  Image out(intr.width, intr.height);
  tbb::parallel_for(0, intr.height, [&](int v) {
    for (int u = 0; u < intr.width; ++u) {
      RandomStream pixel_rng = RandomStream::derive(base, {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(u)});
      out.set(u, v, render_ray(field, pixel_to_ray(intr, pose, u, v), cfg, pixel_rng));
    }
  });
  return out;
}

}  // namespace radloc
