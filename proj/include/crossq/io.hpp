#pragma once

// CSV emission for trajectories, training metrics, evaluation summaries and
// paired comparisons. All writers produce deterministic bytes for a given
// run (no timestamps).

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "crossq/baseline.hpp"
#include "crossq/harness.hpp"

namespace crossq {

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

inline const char* trace_csv_header() {
  return "source,episode,step,t,vehicle,approach,p,v,u,r_total,r_fuel,r_delay,"
         "r_speed,r_rear,r_lateral,r_fifo,r_terminal,rear_violation,"
         "lateral_violation,speed_violation,entered_merging,exited\n";
}

inline void append_trace_csv(std::string& out, const std::string& source,
                             long episode, const std::vector<StepRecord>& records) {
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%ld,%d,%.9g,%d,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                  "%.9g,%.9g,%.9g,%d,%d,%d,%d,%d\n",
                  source.c_str(), episode, r.step, r.t, r.vehicle,
                  to_string(r.approach), r.p, r.v, r.u, r.reward.total,
                  r.reward.fuel, r.reward.delay, r.reward.speed, r.reward.rear,
                  r.reward.lateral, r.reward.fifo, r.reward.terminal,
                  r.rear_violation ? 1 : 0, r.lateral_violation ? 1 : 0,
                  r.speed_violation ? 1 : 0, r.entered_merging ? 1 : 0,
                  r.exited ? 1 : 0);
    out += buf;
  }
}

/// Baseline trajectories rendered into the same trajectory schema; reward
/// columns are zero since the comparator does not score per step.
inline void append_baseline_trace_csv(std::string& out, long episode,
                                      const BaselineResult& res,
                                      const IntersectionConfig& ic) {
  char buf[512];
  for (const auto& tr : res.trajectories) {
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      const auto& s = tr.samples[k];
      const bool entered = k > 0 && tr.samples[k - 1].p < ic.control_zone_length &&
                           s.p >= ic.control_zone_length;
      const bool exited = s.p >= ic.road_length() - 1e-9;
      std::snprintf(buf, sizeof(buf),
                    "baseline,%ld,%zu,%.9g,%d,%s,%.9g,%.9g,%.9g,0,0,0,0,0,0,0,0,"
                    "0,0,0,%d,%d\n",
                    episode, k, s.t, tr.id, to_string(tr.approach), s.p, s.v, s.u,
                    entered ? 1 : 0, exited ? 1 : 0);
      out += buf;
    }
  }
}

inline void write_norms_csv(const std::vector<NormRecord>& history,
                            const std::string& path) {
  std::string out = "episode";
  if (!history.empty())
    for (std::size_t i = 0; i < history.front().per_vehicle.size(); ++i)
      out += ",qnorm_cav" + std::to_string(i + 1);
  out += ",qnorm_avg\n";
  char buf[64];
  for (const auto& rec : history) {
    out += std::to_string(rec.episode);
    for (double v : rec.per_vehicle) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.9g\n", rec.average);
    out += buf;
  }
  write_text_file(path, out);
}

inline void write_eval_csv(const EvalSummary& sum, const std::string& path) {
  std::string out =
      "episode,crashed,completed,steps,rear_violations,lateral_violations,"
      "fifo_respected,mean_travel_time,mean_fuel,mean_merge_abs_err\n";
  char buf[256];
  for (std::size_t ep = 0; ep < sum.per_episode.size(); ++ep) {
    const auto& r = sum.per_episode[ep];
    double travel = 0.0, fuel = 0.0;
    long done = 0;
    for (const auto& vs : r.vehicles) {
      if (!vs.exited()) continue;
      travel += vs.t_exit - vs.t_entry;
      fuel += vs.fuel;
      done += 1;
    }
    const double merge_err =
        r.merge_count > 0 ? r.merge_abs_err_sum / r.merge_count : 0.0;
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d,%ld,%ld,%d,%.9g,%.9g,%.9g\n", ep,
                  r.crashed ? 1 : 0, r.completed ? 1 : 0, r.steps,
                  r.rear_violations, r.lateral_violations, r.fifo_respected ? 1 : 0,
                  done ? travel / done : 0.0, done ? fuel / done : 0.0, merge_err);
    out += buf;
  }
  write_text_file(path, out);
}

inline void write_compare_csv(const CompareReport& rep, const std::string& path) {
  std::string out =
      "episode,rl_crashed,rl_travel,baseline_travel,travel_delta,rl_fuel,"
      "baseline_fuel,fuel_delta,baseline_warnings\n";
  char buf[256];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%ld\n",
                  r.episode, r.rl_crashed ? 1 : 0, r.rl_travel, r.baseline_travel,
                  r.rl_travel - r.baseline_travel, r.rl_fuel, r.baseline_fuel,
                  r.rl_fuel - r.baseline_fuel, r.baseline_warnings);
    out += buf;
  }
  write_text_file(path, out);
}

inline void write_eval_summary_csv(const EvalSummary& s, const std::string& path) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "episodes,crashes,rear_violations,lateral_violations,"
                "completed_episodes,fifo_respected_fraction,mean_travel_time,"
                "mean_delay,mean_fuel,mean_merge_abs_err\n"
                "%ld,%ld,%ld,%ld,%ld,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                s.episodes, s.crashes, s.rear_violations, s.lateral_violations,
                s.completed_episodes, s.fifo_respected_fraction, s.mean_travel_time,
                s.mean_delay, s.mean_fuel, s.mean_merge_abs_err);
  write_text_file(path, buf);
}

}  // namespace crossq
