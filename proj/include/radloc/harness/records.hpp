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


#ifndef RADLOC__HARNESS__RECORDS_HPP_
#define RADLOC__HARNESS__RECORDS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radloc/harness/experiments.hpp"

namespace radloc::harness
{

inline constexpr const char * kStepHeader =
  "step,updates,rot_err_deg,trans_err_m,spread_m,n_particles,wall_ms,forward_passes";

/// Per-step statistics across trials. Contains no timing data.
struct SummaryRow
{
  int step = 0;
  double mean_updates = 0.0;
  double mean_forward_passes = 0.0;
  double mean_rot_err_deg = 0.0;
  double mean_trans_err_m = 0.0;
  double mean_particles = 0.0;
  double success_ratio = 0.0;
  double best_so_far_ratio = 0.0;
};

std::vector<SummaryRow> summarize(const BenchmarkResult & result, const ExperimentSettings & settings);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

void write_steps_csv(const std::filesystem::path & path, std::span<const StepRecord> steps);
std::vector<StepRecord> read_steps_csv(const std::filesystem::path & path);
void write_summary_csv(const std::filesystem::path & path, std::span<const SummaryRow> rows);
void write_trials_csv(const std::filesystem::path & path, const BenchmarkResult & result);
void write_sawtooth_csv(const std::filesystem::path & path, const TrackResult & result);
void write_text(const std::filesystem::path & path, const std::string & text);

}  // namespace radloc::harness

#endif  // RADLOC__HARNESS__RECORDS_HPP_
