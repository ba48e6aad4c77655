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

#include <gtest/gtest.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "radloc/errors.hpp"
#include "radloc/radiance_field.hpp"
#include "radloc/render.hpp"

namespace radloc
{
namespace
{

// Constant density and color everywhere inside its bounds.
class ConstantField : public RadianceField
{
public:
  ConstantField(double sigma, const Rgb & color, const Aabb & bounds) : sigma_(sigma), color_(color), bounds_(bounds) {}

  FieldSample query(const Vector3 & p, const Vector3 &) const override
  {
    if (!bounds_.contains(p)) {
      return {};
    }
    return {sigma_, color_};
  }
  const Aabb & bounds() const override { return bounds_; }

private:
  double sigma_;
  Rgb color_;
  Aabb bounds_;
};

RenderConfig config(double near, double far, int coarse, int fine = 0, bool stratified = false)
{
  RenderConfig cfg;
  cfg.z_near = near;
  cfg.z_far = far;
  cfg.n_coarse = coarse;
  cfg.n_fine = fine;
  cfg.stratified = stratified;
  return cfg;
}

const Ray kForward{Vector3::Zero(), Vector3::UnitZ()};

TEST(SampleCoarse, MidpointsWhenUnstratified)
{
  RandomStream rng(1);
  const auto z = sample_coarse(config(0.0, 4.0, 4), rng);
  EXPECT_EQ(z, (std::vector<double>{0.5, 1.5, 2.5, 3.5}));
}

TEST(SampleCoarse, StratifiedDrawsStayInTheirBins)
{
  RandomStream rng(2);
  const auto cfg = config(1.0, 5.0, 16, 0, true);
  for (int rep = 0; rep < 100; ++rep) {
    const auto z = sample_coarse(cfg, rng);
    ASSERT_TRUE(std::is_sorted(z.begin(), z.end()));
    for (int i = 0; i < 16; ++i) {
      EXPECT_GE(z[i], 1.0 + i * 0.25);
      EXPECT_LE(z[i], 1.0 + (i + 1) * 0.25);
    }
  }
}

TEST(SampleCoarse, StratifiedBinMeansAreCentered)
{
  constexpr int kDraws = 100000;
  const auto cfg = config(0.0, 2.0, 8, 0, true);
  RandomStream rng(3);
  std::vector<double> sum(8, 0.0);
  for (int r = 0; r < kDraws; ++r) {
    const auto z = sample_coarse(cfg, rng);
    for (int i = 0; i < 8; ++i) sum[i] += z[i];
  }
  const double width = 0.25;
  const double se = width / std::sqrt(12.0 * kDraws);
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(sum[i] / kDraws, (i + 0.5) * width, 3.0 * se) << i;
  }
}

TEST(SampleFine, DegenerateWeightsConcentrateInOneBin)
{
  auto cfg = config(0.0, 4.0, 8, 200);
  RandomStream rng(4);
  const auto coarse = sample_coarse(cfg, rng);
  std::vector<double> w(8, 0.0);
  w[5] = 0.7;
  const auto merged = sample_fine(cfg, coarse, w, rng);
  ASSERT_EQ(merged.size(), 208u);
  EXPECT_TRUE(std::is_sorted(merged.begin(), merged.end()));
  // Bin 5 spans the midpoints around coarse depth 2.75: [2.5, 3.0].
  int inside = 0;
  for (const double z : merged) inside += (z >= 2.5 && z <= 3.0);
  EXPECT_EQ(inside, 200 + 1);
}

TEST(SampleFine, UniformWeightsGiveUniformDepths)
{
  constexpr int kDraws = 100000;
  auto cfg = config(1.0, 3.0, 16, kDraws);
  RandomStream rng(5);
  const auto coarse = sample_coarse(cfg, rng);
  const std::vector<double> w(16, 1.0);
  auto merged = sample_fine(cfg, coarse, w, rng);
  std::vector<double> fine;
  for (const double z : merged) {
    if (std::find(coarse.begin(), coarse.end(), z) == coarse.end()) fine.push_back(z);
  }
  ASSERT_EQ(fine.size(), static_cast<std::size_t>(kDraws));
  std::sort(fine.begin(), fine.end());
  double d = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double f = (fine[i] - 1.0) / 2.0;
    d = std::max({d, std::abs(f - double(i) / kDraws), std::abs(f - double(i + 1) / kDraws)});
  }
  // Kolmogorov-Smirnov critical value at the 1% level.
  EXPECT_LT(d, 1.628 / std::sqrt(double(kDraws)));
}

TEST(SampleFine, ZeroWeightsFallBackToUniform)
{
  auto cfg = config(0.0, 2.0, 8, 50);
  RandomStream seed_rng(6);
  const auto coarse = sample_coarse(cfg, seed_rng);
  RandomStream a(7);
  RandomStream b(7);
  EXPECT_EQ(sample_fine(cfg, coarse, std::vector<double>(8, 0.0), a),
            sample_fine(cfg, coarse, std::vector<double>(8, 3.0), b));
}

TEST(RenderRay, VacuumShowsBackground)
{
  const Rgb bg(0.2, 0.3, 0.4);
  const AnalyticScene empty({}, Aabb{Vector3::Constant(-1), Vector3::Constant(1)}, bg);
  RandomStream rng(1);
  const auto r = render_ray_detail(empty, kForward, config(0.0, 4.0, 64), rng);
  EXPECT_EQ(r.color, bg);
  EXPECT_EQ(r.opacity, 0.0);
  const AnalyticScene black({}, Aabb{Vector3::Constant(-1), Vector3::Constant(1)});
  EXPECT_EQ(render_ray(black, kForward, config(0.0, 4.0, 64), rng), Rgb::Zero());
}

TEST(RenderRay, HomogeneousMediumMatchesClosedForm)
{
  const Rgb c(0.8, 0.4, 0.1);
  const double length = 4.0;
  const Aabb box{Vector3(-10, -10, 0), Vector3(10, 10, length)};
  for (const double s : {0.1, 0.5, 1.0, 3.0}) {
    const ConstantField field(s, c, box);
    RandomStream rng(2);
    const Rgb expected = c * (1.0 - std::exp(-s * length));
    const Rgb mid = render_ray(field, kForward, config(0.0, length, 256), rng);
    EXPECT_LT((mid - expected).cwiseAbs().maxCoeff(), 1e-3) << s;
    const Rgb strat = render_ray(field, kForward, config(0.0, length, 256, 0, true), rng);
    EXPECT_LT((strat - expected).cwiseAbs().maxCoeff(), 1e-3) << s;
  }
}

TEST(RenderRay, QuadratureConvergesWithSampleCount)
{
  const ConstantField field(0.7, Rgb(0.3, 0.6, 0.9), Aabb{Vector3(-10, -10, 0), Vector3(10, 10, 4)});
  RandomStream rng(3);
  const Rgb a = render_ray(field, kForward, config(0.0, 4.0, 128), rng);
  const Rgb b = render_ray(field, kForward, config(0.0, 4.0, 256), rng);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(RenderRay, OpaqueWallOccludesFarContent)
{
  const Aabb bounds{Vector3::Constant(-5), Vector3::Constant(5)};
  const Rgb near_color(0.9, 0.2, 0.1);
  const Primitive wall{Box{Vector3(-1, -1, 0.0), Vector3(1, 1, 0.5)}, 1e4, near_color};
  const Primitive far{Box{Vector3(-1, -1, 2.0), Vector3(1, 1, 3.0)}, 20.0, Rgb(0.1, 0.9, 0.9)};
  const AnalyticScene with_far({wall, far}, bounds, Rgb(1, 1, 1));
  const AnalyticScene without_far({wall}, bounds, Rgb(1, 1, 1));
  RandomStream rng(4);
  const auto cfg = config(0.0, 4.0, 64);
  const Rgb a = render_ray(with_far, kForward, cfg, rng);
  const Rgb b = render_ray(without_far, kForward, cfg, rng);
  EXPECT_LT((a - near_color).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-3);
}

AnalyticScene random_scene(RandomStream & rng, double sigma_scale = 1.0)
{
  std::vector<Primitive> prims;
  for (int i = 0; i < 4; ++i) {
    const Vector3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 3));
    const Rgb col(rng.uniform01(), rng.uniform01(), rng.uniform01());
    const double sigma = rng.uniform(0.1, 20.0) * sigma_scale;
    if (i % 2 == 0) {
      prims.push_back({Sphere{c, rng.uniform(0.1, 0.8)}, sigma, col});
    } else {
      const Vector3 h(rng.uniform(0.1, 0.8), rng.uniform(0.1, 0.8), rng.uniform(0.1, 0.8));
      prims.push_back({Box{c - h, c + h}, sigma, col});
    }
  }
  return AnalyticScene(prims, Aabb{Vector3(-3, -3, -1), Vector3(3, 3, 5)}, Rgb(rng.uniform01(), 0.5, 0.2));
}

Ray random_ray(RandomStream & rng)
{
  const Vector3 d(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0);
  return Ray{Vector3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0), d.normalized()};
}

TEST(RenderRay, OutputRangeAndOpacityMonotonicity)
{
  RandomStream rng(5);
  const auto cfg = config(0.05, 6.0, 64, 32, true);
  for (int t = 0; t < 200; ++t) {
    RandomStream scene_a(t);
    RandomStream scene_b(t);
    const AnalyticScene base = random_scene(scene_a, 1.0);
    const AnalyticScene dense = random_scene(scene_b, 2.5);
    const Ray ray = random_ray(rng);
    const std::uint64_t seed = rng.next_seed();
    RandomStream r1(seed);
    RandomStream r2(seed);
    const auto lo = render_ray_detail(base, ray, config(0.05, 6.0, 64), r1);
    const auto hi = render_ray_detail(dense, ray, config(0.05, 6.0, 64), r2);
    EXPECT_GE(hi.opacity + 1e-12, lo.opacity);
    RandomStream r3(seed);
    const auto any = render_ray_detail(base, ray, cfg, r3);
    EXPECT_TRUE((any.color.array() >= 0.0).all() && (any.color.array() <= 1.0).all());
    EXPECT_GE(any.opacity, 0.0);
    EXPECT_LE(any.opacity, 1.0);
  }
}

// The support intervals only skip evaluations; compare to evaluating everywhere.
class NoSkip : public RadianceField
{
public:
  explicit NoSkip(const RadianceField & f) : f_(f) {}
  FieldSample query(const Vector3 & p, const Vector3 & d) const override { return f_.query(p, d); }
  const Aabb & bounds() const override { return f_.bounds(); }
  Rgb background() const override { return f_.background(); }
  void support(const Ray &, double t0, double t1, std::vector<Interval> & out) const override { out.push_back({t0, t1}); }

private:
  const RadianceField & f_;
};

TEST(RenderRay, SupportSkippingIsExact)
{
  RandomStream rng(6);
  const auto cfg = config(0.05, 7.0, 96, 16);
  for (int t = 0; t < 50; ++t) {
    const AnalyticScene scene = random_scene(rng);
    const VoxelField voxels = bake_voxels(scene, {24, 20, 28});
    for (int k = 0; k < 20; ++k) {
      const Ray ray = random_ray(rng);
      const std::uint64_t seed = rng.next_seed();
      for (const RadianceField * f : {static_cast<const RadianceField *>(&scene), static_cast<const RadianceField *>(&voxels)}) {
        RandomStream a(seed);
        RandomStream b(seed);
        EXPECT_EQ(render_ray(*f, ray, cfg, a), render_ray(NoSkip(*f), ray, cfg, b));
      }
    }
  }
}

TEST(AnalyticScene, OverlapTakesMaxSigmaWithIndexTieBreak)
{
  const Aabb bounds{Vector3::Constant(-2), Vector3::Constant(2)};
  const AnalyticScene scene(
    {{Sphere{Vector3::Zero(), 1.0}, 5.0, Rgb(1, 0, 0)},
     {Sphere{Vector3::Zero(), 0.5}, 9.0, Rgb(0, 1, 0)},
     {Box{Vector3::Constant(-0.2), Vector3::Constant(0.2)}, 9.0, Rgb(0, 0, 1)}},
    bounds);
  const auto center = scene.query(Vector3::Zero(), Vector3::UnitZ());
  EXPECT_EQ(center.sigma, 9.0);
  EXPECT_EQ(center.color, Rgb(0, 1, 0));
  EXPECT_EQ(scene.query(Vector3(0.8, 0, 0), Vector3::UnitZ()).color, Rgb(1, 0, 0));
  EXPECT_EQ(scene.query(Vector3(1.5, 0, 0), Vector3::UnitZ()).sigma, 0.0);
  EXPECT_EQ(scene.query(Vector3(5, 0, 0), Vector3::UnitZ()).sigma, 0.0);
}

TEST(AnalyticScene, RejectsInvalidPrimitives)
{
  const Aabb bounds{Vector3::Constant(-1), Vector3::Constant(1)};
  EXPECT_THROW(AnalyticScene({{Sphere{Vector3::Zero(), 0.5}, -1.0, Rgb(0, 0, 0)}}, bounds), BadSpecError);
  EXPECT_THROW(AnalyticScene({{Sphere{Vector3::Zero(), 2.0}, 1.0, Rgb(0, 0, 0)}}, bounds), BadSpecError);
  EXPECT_THROW(AnalyticScene({{Sphere{Vector3::Zero(), 0.5}, 1.0, Rgb(2, 0, 0)}}, bounds), BadSpecError);
}

CameraIntrinsics camera96() { return CameraIntrinsics::from_fov(96, 96, 60.0 * std::numbers::pi / 180.0); }

TEST(RenderImage, VacuumSceneIsAllBackground)
{
  const Rgb bg(0.1, 0.2, 0.3);
  const AnalyticScene empty({}, Aabb{Vector3::Constant(-1), Vector3::Constant(1)}, bg);
  RandomStream rng(1);
  const Image img = render_image(empty, Pose::identity(), CameraIntrinsics::from_fov(16, 12, 1.0), config(0.1, 3, 16), rng);
  EXPECT_EQ(img, Image(16, 12, bg));
}

TEST(RenderImage, SphereSilhouetteMatchesPinholeProjection)
{
  const double radius = 0.5;
  const double dist = 3.0;
  const AnalyticScene scene(
    {{Sphere{Vector3(0, 0, dist), radius}, 200.0, Rgb(1, 1, 1)}}, Aabb{Vector3::Constant(-4), Vector3::Constant(4)});
  const auto intr = camera96();
  RandomStream rng(2);
  const Image img = render_image(scene, Pose::identity(), intr, config(0.05, 6.0, 128, 64), rng);
  // Silhouette edge of a sphere seen on-axis: tan(asin(r / d)).
  const double expected = 2.0 * intr.fx * std::tan(std::asin(radius / dist));
  int row = 0;
  int col = 0;
  for (int i = 0; i < 96; ++i) {
    row += img.at(i, 47).x() > 0.5;
    col += img.at(47, i).x() > 0.5;
  }
  EXPECT_NEAR(row, expected, 2.0);
  EXPECT_NEAR(col, expected, 2.0);
}

TEST(RenderImage, DeterministicAcrossRunsAndThreadCounts)
{
  const AnalyticScene scene = AnalyticScene::triad();
  const auto intr = CameraIntrinsics::from_fov(48, 48, 1.2);
  const auto cfg = config(0.05, 8.0, 32, 16, true);
  RandomStream a(42);
  RandomStream b(42);
  const Image first = render_image(scene, Pose::identity(), intr, cfg, a);
  Image second;
  tbb::task_arena(1).execute([&] { second = render_image(scene, Pose::identity(), intr, cfg, b); });
  EXPECT_EQ(first, second);
}

TEST(BakeVoxels, ConstantFieldBakesToConstant)
{
  const ConstantField field(2.5, Rgb(0.25, 0.5, 0.75), Aabb{Vector3::Constant(-1), Vector3::Constant(1)});
  const VoxelField v = bake_voxels(field, {4, 3, 5});
  for (std::size_t i = 0; i < v.records().size(); i += 4) {
    EXPECT_EQ(v.records()[i], 2.5f);
    EXPECT_EQ(v.records()[i + 1], 0.25f);
    EXPECT_EQ(v.records()[i + 2], 0.5f);
    EXPECT_EQ(v.records()[i + 3], 0.75f);
  }
  EXPECT_THROW(bake_voxels(field, {1, 4, 4}), BadSpecError);
}

TEST(BakeVoxels, RebakingAVoxelFieldIsAFixedPoint)
{
  RandomStream rng(8);
  const VoxelField v1 = bake_voxels(random_scene(rng), {17, 13, 11});
  const VoxelField v2 = bake_voxels(v1, {17, 13, 11});
  EXPECT_EQ(v1.records(), v2.records());
}

TEST(VoxelField, InterpolationStaysInCornerHull)
{
  RandomStream rng(9);
  std::vector<float> rec(4 * 3 * 3 * 3);
  for (auto & x : rec) x = static_cast<float>(rng.uniform01());
  const VoxelField v({3, 3, 3}, Aabb{Vector3::Zero(), Vector3::Constant(3)}, rec);
  const auto lo = *std::min_element(rec.begin(), rec.end());
  const auto hi = *std::max_element(rec.begin(), rec.end());
  for (int i = 0; i < 2000; ++i) {
    const Vector3 p(rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3));
    const auto s = v.query(p, Vector3::UnitZ());
    EXPECT_GE(s.sigma, lo - 1e-7);
    EXPECT_LE(s.sigma, hi + 1e-7);
  }
  EXPECT_EQ(v.query(Vector3(-0.1, 1, 1), Vector3::UnitZ()).sigma, 0.0);
}

TEST(VoxelFile, RoundTripAndHeaderLayout)
{
  RandomStream rng(10);
  const VoxelField v = bake_voxels(random_scene(rng), {5, 6, 7});
  const auto path = std::filesystem::temp_directory_path() / "radloc_test.voxrf";
  save_voxels(path, v);
  const VoxelField back = load_voxels(path);
  EXPECT_EQ(back.records(), v.records());
  EXPECT_EQ(back.resolution(), v.resolution());
  EXPECT_EQ(back.bounds().min, v.bounds().min);
  EXPECT_EQ(back.bounds().max, v.bounds().max);

  std::ifstream is(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "VOXRF1");
  EXPECT_EQ(bytes.size(), 6u + 3 * 4 + 6 * 8 + 5 * 6 * 7 * 16);
  EXPECT_EQ(bytes[6], 5);
  EXPECT_EQ(bytes[10], 6);
  EXPECT_EQ(bytes[14], 7);

  std::ofstream(path, std::ios::binary) << "VOXRF2";
  EXPECT_THROW(load_voxels(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_voxels(path), IoError);
}

TEST(BakeVoxels, BakedTriadRendersCloseToAnalytic)
{
  const AnalyticScene scene = AnalyticScene::triad();
  const VoxelField voxels = bake_voxels(scene, {128, 128, 128});
  const auto intr = camera96();
  const Pose pose(Rotation::about_axis(Vector3::UnitX(), -0.15), Vector3(0.0, -0.2, -1.0));
  RandomStream a(11);
  RandomStream b(11);
  const auto cfg = config(0.05, 8.0, 128, 64);
  const Image ref = render_image(scene, pose, intr, cfg, a);
  const Image approx = render_image(voxels, pose, intr, cfg, b);
  EXPECT_LT(mean_absolute_error(ref, approx), 0.05);
}

}  // namespace
}  // namespace radloc
