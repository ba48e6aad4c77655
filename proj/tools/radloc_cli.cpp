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


#include <CLI11.hpp>
#include <tbb/global_control.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "radloc/errors.hpp"
#include "radloc/harness/experiments.hpp"
#include "radloc/harness/records.hpp"
#include "radloc/harness/scenario.hpp"

namespace
{

using radloc::harness::BenchmarkResult;
using radloc::harness::RunOptions;
using radloc::harness::Scenario;

struct CommonArgs
{
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_anneal = false;
  int threads = 0;
};

void add_common(CLI::App * cmd, CommonArgs & args, bool with_anneal)
{
  cmd->add_option("--scenario", args.scenario, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--out", args.out, "Run directory")->required();
  if (with_anneal) {
    cmd->add_flag("--no-anneal", args.no_anneal, "Disable particle annealing");
  }
  cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

void print_benchmark(const BenchmarkResult & result, const Scenario & s)
{
  const auto rows = radloc::harness::summarize(result, s.experiment);
  int reached = 0;
  for (const auto & t : result.trials) {
    reached += t.first_success_step >= 0 ? 1 : 0;
  }
  const auto & last = rows.back();
  std::printf(
    "trials %zu  reached %d  final success %.3f  final mean error %.3f deg %.4f m\n", result.trials.size(), reached,
    last.success_ratio, last.mean_rot_err_deg, last.mean_trans_err_m);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Particle-filter localization against a radiance field map"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string run_dir;
  CLI::App * make_scene = app.add_subcommand("make-scene", "Bake the scene and render the dataset");
  CLI::App * single = app.add_subcommand("single-image", "Single-image pose estimation benchmark");
  CLI::App * global = app.add_subcommand("global", "Global localization benchmark");
  CLI::App * track = app.add_subcommand("track", "Tracking over an image sequence");
  CLI::App * compare = app.add_subcommand("render-compare", "Render estimates next to ground truth");
  add_common(make_scene, args, false);
  add_common(single, args, true);
  add_common(global, args, true);
  add_common(track, args, true);
  add_common(compare, args, false);
  compare->add_option("--run", run_dir, "Completed run directory holding estimates.txt")->required();

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<tbb::global_control> threads;
  if (args.threads > 0) {
    threads = std::make_unique<tbb::global_control>(
      tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(args.threads));
  }

  try {
    const Scenario s = radloc::harness::load_scenario(args.scenario);
    RunOptions opts;
    opts.out_dir = args.out;
    opts.seed = args.seed;
    opts.no_anneal = args.no_anneal;

    if (make_scene->parsed()) {
      const auto data = radloc::harness::make_scene(s, opts);
      std::printf("wrote %zu images to %s\n", data.images.size(), args.out.c_str());
    } else if (single->parsed()) {
      print_benchmark(radloc::harness::run_single_image(s, opts), s);
    } else if (global->parsed()) {
      print_benchmark(radloc::harness::run_global(s, opts), s);
    } else if (track->parsed()) {
      const auto result = radloc::harness::run_track(s, opts);
      for (const auto & run : result.runs) {
        const auto & f = run.frames.back();
        std::printf(
          "run %d  final error %.4f m %.3f deg  open-loop drift %.4f m\n", run.trial, f.post_trans_m, f.post_rot_deg,
          f.odom_trans_m);
      }
    } else if (compare->parsed()) {
      for (const auto & p : radloc::harness::render_compare(s, run_dir, opts)) {
        std::printf("frame %d  mae %.6f\n", p.frame, p.mae);
      }
    }
  } catch (const radloc::ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const radloc::IoError & e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const radloc::Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
