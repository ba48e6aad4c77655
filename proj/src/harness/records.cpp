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


#include "radloc/harness/records.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "radloc/errors.hpp"

namespace radloc::harness
{
namespace
{

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot write " + path.string());
  }
  return os;
}

bool is_success(const StepRecord & r, const ExperimentSettings & s)
{
  return r.rot_err_deg < s.success_rot_deg && r.trans_err_m < s.success_trans;
}

}  // namespace

std::string format_double(double value)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<SummaryRow> summarize(const BenchmarkResult & result, const ExperimentSettings & settings)
{
  std::vector<SummaryRow> rows;
  if (result.trials.empty()) {
    return rows;
  }
  std::size_t steps = result.trials.front().steps.size();
  for (const auto & t : result.trials) {
    steps = std::min(steps, t.steps.size());
  }
  const double n = static_cast<double>(result.trials.size());
  std::vector<bool> reached(result.trials.size(), false);
  for (std::size_t k = 0; k < steps; ++k) {
    SummaryRow row;
    row.step = static_cast<int>(k);
    double success = 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
      const StepRecord & r = result.trials[i].steps[k];
      row.mean_updates += r.updates;
      row.mean_forward_passes += static_cast<double>(r.forward_passes);
      row.mean_rot_err_deg += r.rot_err_deg;
      row.mean_trans_err_m += r.trans_err_m;
      row.mean_particles += static_cast<double>(r.n_particles);
      const bool ok = is_success(r, settings);
      reached[i] = reached[i] || ok;
      success += ok ? 1.0 : 0.0;
      best += reached[i] ? 1.0 : 0.0;
    }
    row.mean_updates /= n;
    row.mean_forward_passes /= n;
    row.mean_rot_err_deg /= n;
    row.mean_trans_err_m /= n;
    row.mean_particles /= n;
    row.success_ratio = success / n;
    row.best_so_far_ratio = best / n;
    rows.push_back(row);
  }
  return rows;
}

void write_steps_csv(const std::filesystem::path & path, std::span<const StepRecord> steps)
{
  auto os = open_out(path);
  os << kStepHeader << '\n';
  for (const auto & r : steps) {
    os << r.step << ',' << r.updates << ',' << format_double(r.rot_err_deg) << ',' << format_double(r.trans_err_m)
       << ',' << format_double(r.spread_m) << ',' << r.n_particles << ',' << format_double(r.wall_ms) << ','
       << r.forward_passes << '\n';
  }
}

std::vector<StepRecord> read_steps_csv(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(is, line) || line != kStepHeader) {
    throw ParseError("unexpected step CSV header in " + path.string(), 1);
  }
  std::vector<StepRecord> out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    StepRecord r;
    if (!(ls >> r.step >> r.updates >> r.rot_err_deg >> r.trans_err_m >> r.spread_m >> r.n_particles >> r.wall_ms >>
          r.forward_passes)) {
      throw ParseError("malformed step record in " + path.string(), line_no);
    }
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(const std::filesystem::path & path, std::span<const SummaryRow> rows)
{
  auto os = open_out(path);
  os << "step,mean_updates,mean_forward_passes,mean_rot_err_deg,mean_trans_err_m,mean_particles,success_ratio,"
        "best_so_far_ratio\n";
  for (const auto & r : rows) {
    os << r.step << ',' << format_double(r.mean_updates) << ',' << format_double(r.mean_forward_passes) << ','
       << format_double(r.mean_rot_err_deg) << ',' << format_double(r.mean_trans_err_m) << ','
       << format_double(r.mean_particles) << ',' << format_double(r.success_ratio) << ','
       << format_double(r.best_so_far_ratio) << '\n';
  }
}

void write_trials_csv(const std::filesystem::path & path, const BenchmarkResult & result)
{
  auto os = open_out(path);
  os << "trial,frame,success,first_success_step,first_success_forward_passes,final_rot_err_deg,final_trans_err_m,"
        "total_forward_passes,trigger_step,updates_after_trigger,forward_passes_after_trigger\n";
  for (const auto & t : result.trials) {
    const StepRecord & last = t.steps.back();
    const bool ok = t.first_success_step >= 0;
    os << t.trial << ',' << t.frame << ',' << (ok ? 1 : 0) << ',' << t.first_success_step << ','
       << (ok ? t.steps[static_cast<std::size_t>(t.first_success_step)].forward_passes : 0) << ','
       << format_double(last.rot_err_deg) << ',' << format_double(last.trans_err_m) << ',' << last.forward_passes
       << ',' << t.trigger_step << ',' << t.updates_after_trigger << ',' << t.forward_passes_after_trigger << '\n';
  }
}

void write_sawtooth_csv(const std::filesystem::path & path, const TrackResult & result)
{
  auto os = open_out(path);
  os << "trial,frame,pred_rot_deg,pred_trans_m,post_rot_deg,post_trans_m,odom_rot_deg,odom_trans_m\n";
  for (const auto & run : result.runs) {
    for (const auto & f : run.frames) {
      os << run.trial << ',' << f.frame << ',' << format_double(f.pred_rot_deg) << ','
         << format_double(f.pred_trans_m) << ',' << format_double(f.post_rot_deg) << ','
         << format_double(f.post_trans_m) << ',' << format_double(f.odom_rot_deg) << ','
         << format_double(f.odom_trans_m) << '\n';
    }
  }
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  auto os = open_out(path);
  os << text;
}

}  // namespace radloc::harness
