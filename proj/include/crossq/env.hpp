#pragma once

// Discrete-time multi-vehicle dynamics for the signal-free intersection:
// the double-integrator step, zone bookkeeping, observation construction,
// and rear-end / lateral collision detection.

#include <cmath>
#include <limits>
#include <vector>

#include "crossq/domain.hpp"

namespace crossq {

struct StepFlags {
  bool rear_violation = false;
  int lateral_case1 = 0;       // conflicting occupants found at merging entry
  bool lateral_exonerated = false;  // a conflicting vehicle exited exactly as we entered
  bool speed_violation = false;
  bool entered_merging = false;
  bool exited_merging = false;
  bool exited_control_zone = false;
  // offset within the step at which the merging-zone boundary was crossed
  double merge_offset = std::numeric_limits<double>::quiet_NaN();

  bool lateral_violation() const { return lateral_case1 > 0; }
};

struct StepOutcome {
  std::vector<CavState> next;
  std::vector<StepFlags> flags;
  bool episode_crashed = false;
};

struct LateralOutcome {
  std::vector<int> case1_count;
  std::vector<bool> exonerated;
};

// ---------------------------------------------------------------------------

/// Rear-end check: on each approach, order active vehicles by position and
/// flag a follower whose gap to its immediate leader is below d_safe.
/// Depends only on the ordering by p, not on vehicle ids.
inline std::vector<bool> detect_rear_end(const std::vector<CavState>& states,
                                         const SimConfig& sc) {
  std::vector<bool> flags(states.size(), false);
  for (int a = 0; a < 4; ++a) {
    // indices of active vehicles on this approach, sorted by p ascending
    std::vector<int> lane;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].active() && static_cast<int>(states[i].approach) == a)
        lane.push_back(static_cast<int>(i));
    std::sort(lane.begin(), lane.end(), [&](int x, int y) {
      if (states[x].p != states[y].p) return states[x].p < states[y].p;
      return states[x].id < states[y].id;
    });
    for (std::size_t k = 0; k + 1 < lane.size(); ++k) {
      double gap = states[lane[k + 1]].p - states[lane[k]].p;
      if (gap < sc.d_safe) flags[lane[k]] = true;  // follower is the lower-p vehicle
    }
  }
  return flags;
}

/// Lateral check between two consecutive time steps. A vehicle is flagged
/// only at the step it enters the merging zone: one count per conflicting
/// vehicle occupying the zone after the step, simultaneous entries included.
/// A conflicting vehicle exiting on exactly the entry step produces no count
/// (the entrant is marked exonerated instead).
inline LateralOutcome detect_lateral(const std::vector<CavState>& prev,
                                     const std::vector<CavState>& next,
                                     const IntersectionConfig& ic) {
  const std::size_t n = prev.size();
  LateralOutcome out{std::vector<int>(n, 0), std::vector<bool>(n, false)};
  (void)ic;
  for (std::size_t i = 0; i < n; ++i) {
    bool entered = prev[i].phase == Phase::InControlZone &&
                   (next[i].phase == Phase::InMergingZone || next[i].phase == Phase::Exited) &&
                   next[i].p >= ic.control_zone_length;
    if (!entered) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (!conflicts(prev[j].approach, prev[i].approach)) continue;
      if (next[j].phase == Phase::InMergingZone) {
        out.case1_count[i] += 1;
      } else if (prev[j].phase == Phase::InMergingZone && next[j].phase == Phase::Exited) {
        out.exonerated[i] = true;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Time offset within a step at which a vehicle starting the step at (p, v)
/// under constant control u crosses the boundary at `target`.
inline double crossing_time(double p, double v, double u, double target, double dt) {
  const double rem = target - p;
  if (rem <= 0.0) return 0.0;
  if (std::abs(u) < 1e-12) return std::min(rem / v, dt);
  // 0.5 u tau^2 + v tau - rem = 0, smallest positive root
  const double disc = v * v + 2.0 * u * rem;
  if (disc < 0.0) return dt;
  const double tau = (-v + std::sqrt(disc)) / u;
  if (tau >= 0.0 && tau <= dt) return tau;
  const double tau2 = (-v - std::sqrt(disc)) / u;
  if (tau2 >= 0.0 && tau2 <= dt) return tau2;
  return dt;
}

/// Advances every active vehicle one step: p' = p + v dt + u dt^2 / 2,
/// v' = clamp(v + u dt). Inactive vehicles pass through untouched. Actions
/// must lie on the du lattice; off-grid values are a caller bug.
inline StepOutcome step(const std::vector<CavState>& states,
                        const std::vector<double>& actions, const SimConfig& sc,
                        const IntersectionConfig& ic) {
  if (actions.size() != states.size())
    throw std::invalid_argument("step: actions must align with states");
  StepOutcome out;
  out.next = states;
  out.flags.assign(states.size(), StepFlags{});

  const double L = ic.control_zone_length;
  const double end = ic.road_length();

  for (std::size_t i = 0; i < states.size(); ++i) {
    const CavState& s = states[i];
    if (!s.active()) continue;
    const double u = actions[i];
    sc.action_index(u);  // validates grid membership and bounds

    CavState& nx = out.next[i];
    StepFlags& fl = out.flags[i];

    const double p_new = s.p + s.v * sc.dt + 0.5 * u * sc.dt * sc.dt;
    const double v_raw = s.v + u * sc.dt;
    fl.speed_violation = v_raw < sc.v_min || v_raw > sc.v_max;
    nx.p = p_new;
    nx.v = std::clamp(v_raw, sc.v_min, sc.v_max);
    nx.phase = phase_for_position(p_new, ic);

    if (s.p < L && p_new >= L) {
      fl.entered_merging = true;
      fl.merge_offset = crossing_time(s.p, s.v, u, L, sc.dt);
    }
    if (p_new >= end) {
      fl.exited_merging = true;
      fl.exited_control_zone = true;
    }
  }

  auto rear = detect_rear_end(out.next, sc);
  auto lateral = detect_lateral(states, out.next, ic);
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.flags[i].rear_violation = rear[i];
    out.flags[i].lateral_case1 = lateral.case1_count[i];
    out.flags[i].lateral_exonerated = lateral.exonerated[i];
    if (out.flags[i].rear_violation || out.flags[i].lateral_violation())
      out.episode_crashed = true;
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Projects the global state onto what vehicle i can see: its own (p, v),
/// the vehicle immediately ahead on the same approach, and the positions of
/// the (up to) three conflicting vehicles closest to the merging-zone exit.
inline ObservedState observe(const std::vector<CavState>& states, int i,
                             const IntersectionConfig& ic) {
  const CavState& self = states[i];
  ObservedState obs;
  obs.p = self.p;
  obs.v = self.v;

  // immediate leader on the same approach: smallest p strictly ahead of us
  int lead = -1;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(j) == i || !states[j].active()) continue;
    if (states[j].approach != self.approach) continue;
    if (states[j].p <= self.p) continue;
    if (lead < 0 || states[j].p < states[lead].p) lead = static_cast<int>(j);
  }
  if (lead >= 0) obs.rear = std::make_pair(states[lead].p, states[lead].v);

  // conflicting vehicles sorted by proximity to the merging-zone exit
  std::vector<int> lat;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(j) == i || !states[j].active()) continue;
    if (!conflicts(states[j].approach, self.approach)) continue;
    lat.push_back(static_cast<int>(j));
  }
  std::sort(lat.begin(), lat.end(), [&](int x, int y) {
    if (states[x].p != states[y].p) return states[x].p > states[y].p;
    return states[x].id < states[y].id;
  });
  for (std::size_t k = 0; k < 3 && k < lat.size(); ++k)
    obs.lateral[k] = states[lat[k]].p;
  (void)ic;
  return obs;
}

}  // namespace crossq
