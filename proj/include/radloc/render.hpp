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

#ifndef RADLOC__RENDER_HPP_
#define RADLOC__RENDER_HPP_

#include <span>
#include <vector>

#include "radloc/camera.hpp"
#include "radloc/image.hpp"
#include "radloc/radiance_field.hpp"
#include "radloc/random.hpp"

namespace radloc
{

struct RenderConfig
{
  double z_near = 0.05;
  double z_far = 8.0;
  int n_coarse = 64;
  int n_fine = 0;
  bool stratified = false;

  /// Throws BadSpecError when 0 <= z_near < z_far, n_coarse >= 2 or n_fine >= 0 fails.
  void validate() const;
  int samples_per_ray() const { return n_coarse + n_fine; }
};

/// n_coarse sorted depths in [z_near, z_far]: bin midpoints, or one uniform
/// draw per equal-width bin when stratified.
std::vector<double> sample_coarse(const RenderConfig & cfg, RandomStream & rng);

/// Inverse-CDF draws of cfg.n_fine depths from the piecewise-constant density
/// whose bin around coarse depth i carries mass proportional to weights[i].
/// Bin edges are z_near, the midpoints between consecutive coarse depths, and
/// z_far. All-zero weights fall back to uniform mass. Returns the fine depths
/// merged with the coarse ones, sorted ascending.
std::vector<double> sample_fine(
  const RenderConfig & cfg, std::span<const double> coarse_depths, std::span<const double> weights,
  RandomStream & rng);

struct RayResult
{
  Rgb color = Rgb::Zero();
  /// sum_i T_i alpha_i
  double opacity = 0.0;
};

/// Alpha-compositing quadrature of the volume rendering integral. With sorted
/// depths z_i, gaps d_i = z_{i+1} - z_i (last gap z_far - z_n),
/// alpha_i = 1 - exp(-sigma_i d_i) and T_i = prod_{j<i} (1 - alpha_j), returns
/// sum_i T_i alpha_i c_i plus the residual transmittance times the background.
RayResult render_ray_detail(const RadianceField & field, const Ray & ray, const RenderConfig & cfg, RandomStream & rng);
Rgb render_ray(const RadianceField & field, const Ray & ray, const RenderConfig & cfg, RandomStream & rng);

/// Renders every pixel. Each pixel uses its own stream derived from one draw of
/// `rng` and the pixel index, so the result does not depend on thread count.
Image render_image(
  const RadianceField & field, const Pose & pose, const CameraIntrinsics & intr, const RenderConfig & cfg,
  RandomStream & rng);

}  // namespace radloc

#endif  // RADLOC__RENDER_HPP_
