#pragma once

// Classical comparator: FIFO arrival times plus minimum-energy trajectories
// from control-zone entry to the scheduled merging-zone arrival. For the
// double integrator under a squared-control cost the optimal control is
// affine in time and the position a cubic; the four coefficients come from
// the boundary conditions p(t0) = 0, v(t0) = v0, p(t*) = L, u(t*) = 0.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "crossq/domain.hpp"
#include "crossq/env.hpp"
#include "crossq/fifo.hpp"

namespace crossq {

struct InfeasibleTimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrajectorySample {
  double t = 0.0;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
};

/// A solved trajectory. Over [t0, t_star] the control is u(t) = a t + b and
/// the position p(t) = a t^3/6 + b t^2/2 + c t + d; past the merging-zone
/// entry the vehicle holds its arrival speed until it leaves the zone.
struct OptimalTrajectory {
  int id = 0;
  Approach approach = Approach::SB;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double t0 = 0.0;
  double t_star = 0.0;
  double v0 = 0.0;
  double v_merge = 0.0;
  double t_exit = 0.0;
  bool bounds_ok = true;
  std::vector<std::string> warnings;
  std::vector<TrajectorySample> samples;

  double position(double t) const {
    if (t <= t_star)
      return ((a / 6.0 * t + b / 2.0) * t + c) * t + d;
    return control_zone_end_position() + v_merge * (t - t_star);
  }
  double speed(double t) const {
    if (t <= t_star) return (a / 2.0 * t + b) * t + c;
    return v_merge;
  }
  double control(double t) const { return t <= t_star ? a * t + b : 0.0; }

 private:
  double control_zone_end_position() const {
    return ((a / 6.0 * t_star + b / 2.0) * t_star + c) * t_star + d;
  }
};

namespace detail {

/// Gaussian elimination with partial pivoting for the 4x4 boundary system.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> A,
                                    std::array<double, 4> rhs) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
    if (std::abs(A[pivot][col]) < 1e-14)
      throw std::runtime_error("singular boundary-condition system");
    std::swap(A[col], A[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, 4> x{};
  for (int r = 3; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 4; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace detail

/// Solves for the cubic reaching the merging zone exactly at t_star with
/// free terminal speed. Throws when t_star is earlier than the bang-cruise
/// minimum; speed/control bound violations only produce warnings since the
/// unconstrained solution is the intended comparator.
inline OptimalTrajectory solve_trajectory(double t0, double v0, double t_star,
                                          double L, const SimConfig& sc) {
  if (!(t_star > t0)) throw InfeasibleTimeError("t_star must exceed t0");
  const double t_min = earliest_feasible_time(t0, v0, L, sc);
  if (t_star < t_min - 1e-9)
    throw InfeasibleTimeError("t_star " + std::to_string(t_star) +
                              " earlier than feasible " + std::to_string(t_min));

  // rows: p(t0) = 0, v(t0) = v0, p(t*) = L, u(t*) = 0; unknowns a, b, c, d
  std::array<std::array<double, 4>, 4> A = {{
      {t0 * t0 * t0 / 6.0, t0 * t0 / 2.0, t0, 1.0},
      {t0 * t0 / 2.0, t0, 1.0, 0.0},
      {t_star * t_star * t_star / 6.0, t_star * t_star / 2.0, t_star, 1.0},
      {t_star, 1.0, 0.0, 0.0},
  }};
  std::array<double, 4> rhs = {0.0, v0, L, 0.0};
  const auto x = detail::solve4(A, rhs);

  OptimalTrajectory tr;
  tr.a = x[0];
  tr.b = x[1];
  tr.c = x[2];
  tr.d = x[3];
  tr.t0 = t0;
  tr.t_star = t_star;
  tr.v0 = v0;
  tr.v_merge = tr.speed(t_star);
  return tr;
}

/// Scans the solved arc on a fine grid for speed/control bound violations.
inline void check_bounds(OptimalTrajectory& tr, const SimConfig& sc) {
  const int steps = 200;
  double v_lo = tr.v0, v_hi = tr.v0, u_lo = 0.0, u_hi = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = tr.t0 + (tr.t_star - tr.t0) * k / steps;
    v_lo = std::min(v_lo, tr.speed(t));
    v_hi = std::max(v_hi, tr.speed(t));
    u_lo = std::min(u_lo, tr.control(t));
    u_hi = std::max(u_hi, tr.control(t));
  }
  const double tol = 1e-9;
  if (v_lo < sc.v_min - tol || v_hi > sc.v_max + tol) {
    tr.bounds_ok = false;
    tr.warnings.push_back("speed leaves [" + std::to_string(sc.v_min) + ", " +
                          std::to_string(sc.v_max) + "]");
  }
  if (u_lo < sc.u_min - tol || u_hi > sc.u_max + tol) {
    tr.bounds_ok = false;
    tr.warnings.push_back("control leaves [" + std::to_string(sc.u_min) + ", " +
                          std::to_string(sc.u_max) + "]");
  }
}

struct BaselineResult {
  FifoSchedule schedule;
  std::vector<OptimalTrajectory> trajectories;  // aligned with schedule.queue
};

/// Solves every vehicle in a FIFO schedule and extends each trajectory at
/// constant speed through the merging zone. Samples are taken on the global
/// dt grid so the env collision detectors can audit the result directly.
inline BaselineResult run_baseline(const std::vector<ArrivalPlan>& entries,
                                   const IntersectionConfig& ic, const SimConfig& sc,
                                   double time_headway) {
  BaselineResult out;
  out.schedule = schedule(entries, ic, sc, time_headway);
  const double L = ic.control_zone_length;
  const double D = ic.merging_zone_length;

  for (const auto& e : out.schedule.queue) {
    OptimalTrajectory tr = solve_trajectory(e.t0, e.v0, e.t_star, L, sc);
    tr.id = e.id;
    tr.approach = e.approach;
    check_bounds(tr, sc);
    if (tr.v_merge < sc.v_min) {
      // heavily delayed arrivals leave the unconstrained arc below the speed
      // floor; hold the floor through the zone so the extension stays sane
      tr.warnings.push_back("merging speed " + std::to_string(tr.v_merge) +
                            " below v_min; zone transit clamped");
      tr.bounds_ok = false;
      tr.v_merge = sc.v_min;
    }
    tr.t_exit = tr.t_star + D / tr.v_merge;

    // samples on the global time grid, plus the exact exit point
    const long k0 = static_cast<long>(std::ceil(tr.t0 / sc.dt - 1e-9));
    for (long k = k0;; ++k) {
      const double t = k * sc.dt;
      if (t > tr.t_exit) break;
      tr.samples.push_back({t, tr.position(t), tr.speed(t), tr.control(t)});
    }
    tr.samples.push_back({tr.t_exit, L + D, tr.v_merge, 0.0});
    out.trajectories.push_back(std::move(tr));
  }
  return out;
}

/// Per-step vehicle states reconstructed from baseline trajectories on the
/// global grid, suitable for the env safety detectors.
inline std::vector<std::vector<CavState>> baseline_grid_states(
    const BaselineResult& res, const IntersectionConfig& ic, const SimConfig& sc) {
  double t_end = 0.0;
  for (const auto& tr : res.trajectories) t_end = std::max(t_end, tr.t_exit);
  const long steps = static_cast<long>(std::ceil(t_end / sc.dt)) + 1;

  std::vector<std::vector<CavState>> frames;
  frames.reserve(steps + 1);
  for (long k = 0; k <= steps; ++k) {
    const double t = k * sc.dt;
    std::vector<CavState> frame;
    frame.reserve(res.trajectories.size());
    for (const auto& tr : res.trajectories) {
      CavState s;
      s.id = tr.id;
      s.approach = tr.approach;
      s.t0 = tr.t0;
      s.v0 = tr.v0;
      if (t < tr.t0) {
        s.phase = Phase::NotArrived;
        s.p = 0.0;
        s.v = tr.v0;
      } else {
        s.p = tr.position(t);
        s.v = tr.speed(t);
        s.phase = phase_for_position(s.p, ic);
      }
      frame.push_back(s);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

/// Control-effort proxy of one trajectory over its approach arc.
inline double baseline_fuel_proxy(const OptimalTrajectory& tr, const SimConfig& sc) {
  double sum = 0.0;
  for (const auto& s : tr.samples) {
    if (s.t <= tr.t_star) sum += s.u * s.u * sc.dt;
  }
  return sum;
}

}  // namespace crossq
