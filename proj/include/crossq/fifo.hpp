#pragma once

// FIFO queuing policy: recursive scheduled merging-zone arrival times with
// safe time-headway separation, predecessor classification, and the revised
// observation used by the combined framework.

#include <string>
#include <vector>

#include "crossq/domain.hpp"
#include "crossq/env.hpp"

namespace crossq {

enum class PredecessorClass { None, Safe, Lateral, RearEnd };

inline const char* to_string(PredecessorClass c) {
  switch (c) {
    case PredecessorClass::None: return "none";
    case PredecessorClass::Safe: return "safe";
    case PredecessorClass::Lateral: return "lateral";
    case PredecessorClass::RearEnd: return "rear-end";
  }
  return "??";
}

/// One vehicle's entry into the control zone, in queue order.
struct ArrivalPlan {
  int id = 0;
  double t0 = 0.0;
  double v0 = 0.0;
  Approach approach = Approach::SB;
};

struct FifoEntry {
  int id = 0;
  Approach approach = Approach::SB;
  double t0 = 0.0;
  double v0 = 0.0;
  double t_feasible = 0.0;  // earliest physically reachable arrival
  double t_star = 0.0;      // scheduled merging-zone arrival
  PredecessorClass predecessor = PredecessorClass::None;
};

struct FifoSchedule {
  std::vector<FifoEntry> queue;  // control-zone entry order
  double time_headway = 0.0;

  const FifoEntry& by_id(int id) const {
    for (const auto& e : queue)
      if (e.id == id) return e;
    throw std::invalid_argument("no schedule entry for vehicle " + std::to_string(id));
  }

  /// Delta t_i^{m*}: scheduled arrival relative to control-zone entry.
  double headway_of(int id) const {
    const auto& e = by_id(id);
    return e.t_star - e.t0;
  }
};

// ---------------------------------------------------------------------------

/// Relation of queue member i to its immediate predecessor: rear-end when
/// they share an approach, lateral when the approaches conflict, safe
/// otherwise (parallel opposite-direction paths).
inline PredecessorClass classify_predecessor(std::size_t i,
                                             const std::vector<ArrivalPlan>& queue) {
  if (i == 0) return PredecessorClass::None;
  const ArrivalPlan& cur = queue[i];
  const ArrivalPlan& prev = queue[i - 1];
  if (prev.approach == cur.approach) return PredecessorClass::RearEnd;
  if (conflicts(prev.approach, cur.approach)) return PredecessorClass::Lateral;
  return PredecessorClass::Safe;
}

/// Earliest merging-zone arrival under the speed and acceleration bounds:
/// full acceleration to v_max, then cruise (the minimum-time profile for a
/// bounded point mass).
inline double earliest_feasible_time(double t0, double v0, double L,
                                     const SimConfig& sc) {
  if (L <= 0.0) return t0;
  const double t_acc = (sc.v_max - v0) / sc.u_max;
  const double d_acc = (sc.v_max * sc.v_max - v0 * v0) / (2.0 * sc.u_max);
  if (d_acc >= L) {
    // never reaches v_max: solve L = v0 t + u_max t^2 / 2
    return t0 + (-v0 + std::sqrt(v0 * v0 + 2.0 * sc.u_max * L)) / sc.u_max;
  }
  return t0 + t_acc + (L - d_acc) / sc.v_max;
}

/// The recursive FIFO schedule. The queue leader cruises at its entry speed;
/// each later vehicle is held to its predecessor's time (plus the headway
/// when a collision is possible), the headway behind the vehicle physically
/// ahead of it, and its own earliest feasible arrival.
inline FifoSchedule schedule(const std::vector<ArrivalPlan>& entries,
                             const IntersectionConfig& ic, const SimConfig& sc,
                             double time_headway) {
  if (entries.empty()) throw std::invalid_argument("schedule: empty entry list");
  if (!(time_headway > 0.0))
    throw std::invalid_argument("schedule: time headway must be > 0");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].t0 < entries[i - 1].t0)
      throw std::invalid_argument("schedule: entries must be sorted by t0");

  const double L = ic.control_zone_length;
  FifoSchedule sched;
  sched.time_headway = time_headway;
  sched.queue.reserve(entries.size());

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const ArrivalPlan& e = entries[i];
    FifoEntry out;
    out.id = e.id;
    out.approach = e.approach;
    out.t0 = e.t0;
    out.v0 = e.v0;
    out.t_feasible = earliest_feasible_time(e.t0, e.v0, L, sc);
    out.predecessor = classify_predecessor(i, entries);

    if (i == 0) {
      out.t_star = e.t0 + L / e.v0;
    } else {
      const double prev_star = sched.queue[i - 1].t_star;
      double t = out.t_feasible;
      if (out.predecessor == PredecessorClass::Safe) {
        t = std::max(t, prev_star);
        // headway behind the vehicle physically ahead on our own approach
        for (std::size_t j = i; j-- > 0;) {
          if (entries[j].approach == e.approach) {
            t = std::max(t, sched.queue[j].t_star + time_headway);
            break;
          }
        }
      } else {
        t = std::max(t, prev_star + time_headway);
      }
      out.t_star = t;
    }
    sched.queue.push_back(out);
  }
  return sched;
}

// ---------------------------------------------------------------------------

/// Revised observation for the combined framework: own kinematics, the rear
/// neighbor, and the binned scheduled headway Delta t_i^{m*}. Values beyond
/// the headway axis clamp to its boundary bins.
inline StateKey combined_observe(const std::vector<CavState>& states, int i,
                                 const FifoSchedule& sched, const DiscreteGrid& grid,
                                 const IntersectionConfig& ic) {
  ObservedState obs = observe(states, i, ic);
  StateKey key;
  key.push(static_cast<std::int16_t>(grid.pos.bin(obs.p)));
  key.push(static_cast<std::int16_t>(grid.speed.bin(obs.v)));
  if (obs.rear) {
    key.push(static_cast<std::int16_t>(grid.pos.bin(obs.rear->first)));
    key.push(static_cast<std::int16_t>(grid.speed.bin(obs.rear->second)));
  } else {
    key.push(DiscreteGrid::kAbsent);
    key.push(DiscreteGrid::kAbsent);
  }
  key.push(static_cast<std::int16_t>(grid.headway.bin(sched.headway_of(states[i].id))));
  return key;
}

/// Audit dump of a schedule, one row per queue position.
inline std::string schedule_csv(const FifoSchedule& sched) {
  std::string out = "vehicle,approach,t0,v0,t_feasible,t_star,predecessor\n";
  char buf[160];
  for (const auto& e : sched.queue) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.9g,%.9g,%.9g,%.9g,%s\n", e.id,
                  to_string(e.approach), e.t0, e.v0, e.t_feasible, e.t_star,
                  to_string(e.predecessor));
    out += buf;
  }
  return out;
}

}  // namespace crossq
