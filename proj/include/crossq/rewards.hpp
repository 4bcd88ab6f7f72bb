#pragma once

// Per-step reward terms and their weighted composition for both frameworks.
// All terms are pure functions; the harness assembles a RewardBreakdown per
// vehicle per transition and composes it under the active framework.

#include <cmath>

#include "crossq/domain.hpp"

namespace crossq {

enum class Framework { Standalone, Combined };

inline const char* to_string(Framework f) {
  return f == Framework::Standalone ? "standalone" : "combined";
}

struct RewardBreakdown {
  double fuel = 0.0;
  double delay = 0.0;
  double speed = 0.0;
  double rear = 0.0;
  double lateral = 0.0;
  double fifo = 0.0;
  double terminal = 0.0;
  double total = 0.0;
};

/// Control-effort penalty: -|u|^2 / max(|u_max|, |u_min|), as a fuel proxy.
inline double r_fuel(double u, const SimConfig& sc) {
  double norm = std::max(std::abs(sc.u_max), std::abs(sc.u_min));
  return -(u * u) / norm;
}

/// Normalized travel-time delay after k steps at traveled distance p,
/// relative to cruising at the entry speed v0. Zero at the entry step.
inline double r_delay(long k, double p, double v0, const SimConfig& sc) {
  if (p <= 0.0) return 0.0;
  const double ref = p / v0;
  return -(k * sc.dt - ref) / ref;
}

inline double r_speed(bool speed_violation) { return speed_violation ? -1.0 : 0.0; }

inline double r_rear(bool rear_violation) { return rear_violation ? -100.0 : 0.0; }

inline double r_lateral(int case1_count) { return -100.0 * case1_count; }

/// Exit bonus of 10 n, paid per vehicle at its own exit when the episode has
/// been crash-free up to and including that step.
inline double r_terminal(int n_vehicles, bool crash_free) {
  return crash_free ? 10.0 * n_vehicles : 0.0;
}

/// FIFO tracking penalty. While approaching, the squared gap between the
/// estimated and scheduled merging-zone arrival; at the entry step, a
/// 10x-weighted squared error against the actual crossing time.
inline double r_fifo(double eat_or_actual, double t_star, bool at_merge_entry) {
  const double err = eat_or_actual - t_star;
  return at_merge_entry ? -10.0 * err * err : -err * err;
}

/// Arrival-time estimate assuming the vehicle holds its current speed for
/// the rest of the approach.
inline double estimate_arrival_time(double t_now, double p, double v, double L) {
  return t_now + (L - p) / v;
}

/// Weighted sum of the active terms. The combined framework zeroes the
/// delay and lateral contributions; the terminal bonus enters unweighted.
inline double compose(RewardBreakdown& b, const RewardWeights& w, Framework f) {
  if (f == Framework::Standalone) {
    b.total = w.w1 * b.fuel + w.w2 * b.delay + w.w3 * b.speed + w.w4 * b.rear +
              w.w5 * b.lateral + b.terminal;
  } else {
    b.total = w.w1p * b.fuel + w.w2p * b.speed + w.w3p * b.rear + w.w4p * b.fifo +
              b.terminal;
  }
  return b.total;
}

}  // namespace crossq
