#pragma once

// Orchestration: episode generation, the training loop, greedy evaluation,
// and the paired comparison against the optimal-control baseline. One
// (seed, config) pair fully determines every run; each episode draws its
// setup and its action noise from independently derived streams so RL and
// baseline runs can share initial conditions exactly.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "crossq/baseline.hpp"
#include "crossq/config.hpp"
#include "crossq/domain.hpp"
#include "crossq/env.hpp"
#include "crossq/fifo.hpp"
#include "crossq/learner.hpp"
#include "crossq/rewards.hpp"

namespace crossq {

// ---------------------------------------------------------------------------
// Reproducible per-episode streams

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

enum class RngStream : std::uint64_t { Setup = 1, Policy = 2 };

inline std::mt19937_64 episode_rng(std::uint64_t seed, RngStream stream,
                                   long episode) {
  const std::uint64_t s =
      splitmix64(seed + 0x517cc1b727220a95ull * static_cast<std::uint64_t>(stream));
  return std::mt19937_64(splitmix64(s ^ (static_cast<std::uint64_t>(episode) *
                                         0x9e3779b97f4a7c15ull)));
}

// ---------------------------------------------------------------------------
// Episode setup

struct EpisodeSetup {
  std::vector<ArrivalPlan> plans;  // sorted by t0, ids 1..n
  double last_arrival = 0.0;
};

/// Draws entry times from the exponential arrival process (snapped onto the
/// simulation grid) and entry speeds uniformly over the feasible speed
/// lattice. Approaches follow the scenario sequence unless randomized.
inline EpisodeSetup sample_episode_setup(const Config& cfg, std::mt19937_64& rng) {
  const int n = cfg.scenario.n_vehicles;
  EpisodeSetup setup;
  auto arrivals = sample_arrivals(n, cfg.sim.mean_interarrival, rng);
  const int speed_bins =
      static_cast<int>(std::floor((cfg.sim.v_max - cfg.sim.v_min) / cfg.sim.dv)) + 1;
  std::uniform_int_distribution<int> speed_pick(0, speed_bins - 1);
  std::uniform_int_distribution<int> approach_pick(0, 3);
  for (int i = 0; i < n; ++i) {
    ArrivalPlan plan;
    plan.id = i + 1;
    plan.t0 = std::ceil(arrivals[i] / cfg.sim.dt - 1e-9) * cfg.sim.dt;
    plan.v0 = cfg.sim.v_min + speed_pick(rng) * cfg.sim.dv;
    plan.approach = cfg.scenario.randomize_approaches
                        ? static_cast<Approach>(approach_pick(rng))
                        : cfg.scenario.approach_for(i);
    setup.plans.push_back(plan);
    setup.last_arrival = std::max(setup.last_arrival, plan.t0);
  }
  return setup;
}

// ---------------------------------------------------------------------------
// Episode results

struct VehicleStats {
  int id = 0;
  Approach approach = Approach::SB;
  double v0 = 0.0;
  double t_entry = std::numeric_limits<double>::quiet_NaN();
  double t_merge = std::numeric_limits<double>::quiet_NaN();
  double t_exit = std::numeric_limits<double>::quiet_NaN();
  double fuel = 0.0;  // sum of u^2 dt
  double reward_sum = 0.0;

  bool exited() const { return !std::isnan(t_exit); }
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  int vehicle = 0;
  Approach approach = Approach::SB;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  RewardBreakdown reward;
  bool rear_violation = false;
  bool lateral_violation = false;
  bool speed_violation = false;
  bool entered_merging = false;
  bool exited = false;
};

struct EpisodeResult {
  bool crashed = false;
  bool completed = false;  // every vehicle exited
  int steps = 0;
  long rear_violations = 0;
  long lateral_violations = 0;
  std::vector<VehicleStats> vehicles;
  bool fifo_respected = false;  // meaningful when completed and crash-free
  double merge_abs_err_sum = 0.0;  // combined framework, vs schedule
  int merge_count = 0;
};

// ---------------------------------------------------------------------------
// Episode runner (independent-learner modes)

/// Runs one episode: activate arrivals, pick epsilon-greedy actions, step
/// the environment, score, and (optionally) update the per-agent tables.
/// Crashes terminate the episode after the crash-step updates are applied.
inline EpisodeResult run_episode(const Config& cfg, const EpisodeSetup& setup,
                                 std::vector<QTable>& tables, bool learn,
                                 double epsilon, std::mt19937_64& rng,
                                 std::vector<StepRecord>* trace = nullptr) {
  const auto& sc = cfg.sim;
  const auto& ic = cfg.intersection;
  const DiscreteGrid grid = make_grid(sc, ic);
  const int n = static_cast<int>(setup.plans.size());
  const bool combined = cfg.scenario.framework == Framework::Combined;
  const double L = ic.control_zone_length;
  const double alpha_neg =
      cfg.learner.mode == UpdateMode::Hysteretic ? cfg.learner.beta : cfg.learner.alpha;

  std::optional<FifoSchedule> sched;
  if (combined) sched = schedule(setup.plans, ic, sc, cfg.time_headway);

  std::vector<CavState> states(n);
  std::vector<double> t_start(n);  // may slip when the entry gap is blocked
  EpisodeResult res;
  res.vehicles.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& plan = setup.plans[i];
    states[i] = CavState{plan.id, plan.approach, 0.0, 0.0, plan.t0, plan.v0,
                         Phase::NotArrived};
    t_start[i] = plan.t0;
    res.vehicles[i].id = plan.id;
    res.vehicles[i].approach = plan.approach;
    res.vehicles[i].v0 = plan.v0;
  }

  std::vector<int> entry_order;
  std::vector<std::pair<double, int>> merge_order;  // (t_merge, queue index)
  std::vector<double> actions(n, 0.0);
  std::vector<StateKey> keys(n);
  std::vector<int> chosen(n, 0);
  bool crash_so_far = false;
  const int budget = cfg.episode_step_budget(setup.last_arrival);

  int k = 0;
  for (; k < budget; ++k) {
    const double t = k * sc.dt;

    // activations, postponed while the entry gap to the leader is unsafe
    for (int i = 0; i < n; ++i) {
      if (states[i].phase != Phase::NotArrived || t_start[i] > t + 1e-9) continue;
      bool blocked = false;
      for (int j = 0; j < n; ++j) {
        if (j == i || !states[j].active()) continue;
        if (states[j].approach == states[i].approach && states[j].p < sc.d_safe)
          blocked = true;
      }
      if (blocked) {
        t_start[i] = t + sc.dt;
        continue;
      }
      states[i].phase = Phase::InControlZone;
      states[i].p = 0.0;
      states[i].v = states[i].v0;
      states[i].t0 = t;
      res.vehicles[i].t_entry = t;
      entry_order.push_back(i);
    }

    std::vector<int> active;
    bool any_pending = false;
    for (int i = 0; i < n; ++i) {
      if (states[i].active()) active.push_back(i);
      if (states[i].phase == Phase::NotArrived) any_pending = true;
    }
    if (active.empty()) {
      if (!any_pending) break;  // everyone has exited
      continue;                 // waiting for the next arrival
    }

    for (int i : active) {
      keys[i] = combined ? combined_observe(states, i, *sched, grid, ic)
                         : encode_state(observe(states, i, ic), grid);
      chosen[i] = select_action(tables[i], keys[i], epsilon, rng);
      actions[i] = sc.action_value(chosen[i]);
    }

    StepOutcome outcome = step(states, actions, sc, ic);
    const bool crashed_now = outcome.episode_crashed;
    const double t_next = (k + 1) * sc.dt;

    for (int i : active) {
      const StepFlags& fl = outcome.flags[i];
      const CavState& nx = outcome.next[i];
      VehicleStats& vs = res.vehicles[i];
      const bool exited = fl.exited_control_zone;

      RewardBreakdown b;
      b.fuel = r_fuel(actions[i], sc);
      b.speed = r_speed(fl.speed_violation);
      b.rear = r_rear(fl.rear_violation);
      if (combined) {
        const double t_star = sched->by_id(states[i].id).t_star;
        if (fl.entered_merging) {
          const double t_m = t + fl.merge_offset;
          b.fifo = r_fifo(t_m, t_star, true);
          vs.t_merge = t_m;
          res.merge_abs_err_sum += std::abs(t_m - t_star);
          res.merge_count += 1;
          merge_order.push_back({t_m, i});
        } else if (nx.p < L) {
          const double eat = estimate_arrival_time(t_next, nx.p, nx.v, L);
          b.fifo = r_fifo(eat, t_star, false);
        }
        // inside the merging zone the FIFO term is switched off
      } else {
        const long k_rel = std::lround((t_next - states[i].t0) / sc.dt);
        b.delay = r_delay(k_rel, nx.p, states[i].v0, sc);
        b.lateral = r_lateral(fl.lateral_case1);
        if (fl.entered_merging) {
          const double t_m = t + fl.merge_offset;
          vs.t_merge = t_m;
          merge_order.push_back({t_m, i});
        }
      }
      if (exited) {
        b.terminal = r_terminal(n, !crash_so_far && !crashed_now);
        vs.t_exit = t + crossing_time(states[i].p, states[i].v, actions[i],
                                      ic.road_length(), sc.dt);
      }
      compose(b, cfg.weights, cfg.scenario.framework);

      vs.fuel += actions[i] * actions[i] * sc.dt;
      vs.reward_sum += b.total;
      if (fl.rear_violation) res.rear_violations += 1;
      res.lateral_violations += fl.lateral_case1;

      if (learn) {
        const bool terminal = exited || crashed_now;
        StateKey next_key;
        const StateKey* next_ptr = nullptr;
        if (!terminal) {
          next_key = combined ? combined_observe(outcome.next, i, *sched, grid, ic)
                              : encode_state(observe(outcome.next, i, ic), grid);
          next_ptr = &next_key;
        }
        tables[i].update(keys[i], chosen[i], b.total, next_ptr, cfg.learner.gamma,
                         cfg.learner.alpha, alpha_neg);
      }

      if (trace) {
        StepRecord rec;
        rec.step = k;
        rec.t = t_next;
        rec.vehicle = states[i].id;
        rec.approach = states[i].approach;
        rec.p = nx.p;
        rec.v = nx.v;
        rec.u = actions[i];
        rec.reward = b;
        rec.rear_violation = fl.rear_violation;
        rec.lateral_violation = fl.lateral_violation();
        rec.speed_violation = fl.speed_violation;
        rec.entered_merging = fl.entered_merging;
        rec.exited = exited;
        trace->push_back(rec);
      }
    }

    states = std::move(outcome.next);
    if (crashed_now) {
      res.crashed = true;
      k += 1;
      break;
    }
  }
  res.steps = k;

  res.completed = true;
  for (const auto& vs : res.vehicles)
    if (!vs.exited()) res.completed = false;

  if (res.completed && !res.crashed && merge_order.size() == entry_order.size()) {
    std::stable_sort(merge_order.begin(), merge_order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    res.fifo_respected = true;
    for (std::size_t q = 0; q < merge_order.size(); ++q)
      if (merge_order[q].second != entry_order[q]) res.fifo_respected = false;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Episode runner (centralized mode)

/// Joint-table variant: one key concatenating every active agent's slots and
/// one flattened joint action. Kept for study on small vehicle counts; the
/// joint action space is validated against the configured cap up front.
inline EpisodeResult run_episode_centralized(const Config& cfg,
                                             const EpisodeSetup& setup,
                                             JointQTable& table, bool learn,
                                             double epsilon, std::mt19937_64& rng) {
  const auto& sc = cfg.sim;
  const auto& ic = cfg.intersection;
  const DiscreteGrid grid = make_grid(sc, ic);
  const int n = static_cast<int>(setup.plans.size());
  const int per_agent = sc.action_count();
  joint_action_count(per_agent, n, cfg.learner.max_joint_actions);

  std::vector<CavState> states(n);
  std::vector<double> t_start(n);
  EpisodeResult res;
  res.vehicles.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& plan = setup.plans[i];
    states[i] = CavState{plan.id, plan.approach, 0.0, 0.0, plan.t0, plan.v0,
                         Phase::NotArrived};
    t_start[i] = plan.t0;
    res.vehicles[i].id = plan.id;
    res.vehicles[i].approach = plan.approach;
    res.vehicles[i].v0 = plan.v0;
  }

  auto joint_key_now = [&](const std::vector<CavState>& sts) {
    std::vector<StateKey> ks(n);
    for (int i = 0; i < n; ++i) {
      if (sts[i].active()) {
        ks[i] = encode_state(observe(sts, i, ic), grid);
      } else {
        // inactive agents contribute a sentinel-only slot group
        for (int s = 0; s < 7; ++s) ks[i].push(DiscreteGrid::kAbsent);
      }
    }
    return make_joint_key(ks);
  };

  bool crash_so_far = false;
  const int budget = cfg.episode_step_budget(setup.last_arrival);
  int k = 0;
  for (; k < budget; ++k) {
    const double t = k * sc.dt;
    for (int i = 0; i < n; ++i) {
      if (states[i].phase != Phase::NotArrived || t_start[i] > t + 1e-9) continue;
      bool blocked = false;
      for (int j = 0; j < n; ++j) {
        if (j == i || !states[j].active()) continue;
        if (states[j].approach == states[i].approach && states[j].p < sc.d_safe)
          blocked = true;
      }
      if (blocked) {
        t_start[i] = t + sc.dt;
        continue;
      }
      states[i].phase = Phase::InControlZone;
      states[i].p = 0.0;
      states[i].v = states[i].v0;
      states[i].t0 = t;
      res.vehicles[i].t_entry = t;
    }

    bool any_active = false, any_pending = false;
    for (int i = 0; i < n; ++i) {
      if (states[i].active()) any_active = true;
      if (states[i].phase == Phase::NotArrived) any_pending = true;
    }
    if (!any_active) {
      if (!any_pending) break;
      continue;
    }

    const JointKey s = joint_key_now(states);
    const long joint = select_action(table, s, epsilon, rng);
    const auto per_agent_actions = unflatten_joint_action(joint, per_agent, n);
    std::vector<double> actions(n, 0.0);
    for (int i = 0; i < n; ++i) {
      // idle agents hold a zero-control placeholder inside the joint action
      actions[i] = states[i].active() ? sc.action_value(per_agent_actions[i]) : 0.0;
    }

    StepOutcome outcome = step(states, actions, sc, ic);
    const bool crashed_now = outcome.episode_crashed;
    const double t_next = (k + 1) * sc.dt;

    double r_total = 0.0;
    bool all_exited_after = true;
    for (int i = 0; i < n; ++i) {
      if (!states[i].active()) {
        if (states[i].phase == Phase::NotArrived) all_exited_after = false;
        continue;
      }
      const StepFlags& fl = outcome.flags[i];
      const CavState& nx = outcome.next[i];
      VehicleStats& vs = res.vehicles[i];
      RewardBreakdown b;
      b.fuel = r_fuel(actions[i], sc);
      const long k_rel = std::lround((t_next - states[i].t0) / sc.dt);
      b.delay = r_delay(k_rel, nx.p, states[i].v0, sc);
      b.speed = r_speed(fl.speed_violation);
      b.rear = r_rear(fl.rear_violation);
      b.lateral = r_lateral(fl.lateral_case1);
      if (fl.exited_control_zone) {
        b.terminal = r_terminal(n, !crash_so_far && !crashed_now);
        vs.t_exit = t + crossing_time(states[i].p, states[i].v, actions[i],
                                      ic.road_length(), sc.dt);
      } else if (nx.phase != Phase::Exited) {
        all_exited_after = false;
      }
      compose(b, cfg.weights, Framework::Standalone);
      vs.fuel += actions[i] * actions[i] * sc.dt;
      vs.reward_sum += b.total;
      if (fl.rear_violation) res.rear_violations += 1;
      res.lateral_violations += fl.lateral_case1;
      r_total += b.total;
    }

    if (learn) {
      const bool terminal = crashed_now || all_exited_after;
      JointKey next_key;
      const JointKey* next_ptr = nullptr;
      if (!terminal) {
        next_key = joint_key_now(outcome.next);
        next_ptr = &next_key;
      }
      update_centralized(table, s, joint, r_total, next_ptr, cfg.learner);
    }

    states = std::move(outcome.next);
    if (crashed_now) {
      res.crashed = true;
      k += 1;
      break;
    }
  }
  res.steps = k;
  res.completed = true;
  for (const auto& vs : res.vehicles)
    if (!vs.exited()) res.completed = false;
  return res;
}

// ---------------------------------------------------------------------------
// Training

struct NormRecord {
  long episode = 0;  // episodes completed when the record was taken
  std::vector<double> per_vehicle;
  double average = 0.0;
};

struct TrainResult {
  std::vector<QTable> tables;
  std::optional<JointQTable> joint;
  std::vector<NormRecord> norm_history;
  long episodes = 0;
  long crashes = 0;
};

using ProgressFn = std::function<void(long episode, long total, long crashes)>;

/// Algorithm-style training loop: per episode, reset entry times and speeds
/// randomly, run to completion or crash, and record the per-vehicle Q-table
/// norms every 100 episodes.
inline TrainResult train(const Config& cfg, std::uint64_t seed,
                         const ProgressFn& progress = nullptr) {
  cfg.validate();
  const long total = cfg.learner.total_episodes;
  const int n = cfg.scenario.n_vehicles;
  const bool centralized = cfg.learner.mode == UpdateMode::Centralized;

  TrainResult out;
  if (centralized) {
    const long joint_actions =
        joint_action_count(cfg.sim.action_count(), n, cfg.learner.max_joint_actions);
    out.joint.emplace(static_cast<int>(joint_actions));
  } else {
    out.tables.assign(n, QTable(cfg.sim.action_count()));
  }

  auto record_norms = [&](long episodes_done) {
    NormRecord rec;
    rec.episode = episodes_done;
    if (centralized) {
      rec.per_vehicle.assign(1, out.joint->norm());
    } else {
      for (const auto& q : out.tables) rec.per_vehicle.push_back(q.norm());
    }
    double sum = 0.0;
    for (double v : rec.per_vehicle) sum += v;
    rec.average = sum / rec.per_vehicle.size();
    out.norm_history.push_back(std::move(rec));
  };

  for (long ep = 0; ep < total; ++ep) {
    auto setup_rng = episode_rng(seed, RngStream::Setup, ep);
    auto policy_rng = episode_rng(seed, RngStream::Policy, ep);
    const EpisodeSetup setup = sample_episode_setup(cfg, setup_rng);
    const double eps = epsilon_at(ep, cfg.learner);

    EpisodeResult res;
    if (centralized) {
      res = run_episode_centralized(cfg, setup, *out.joint, true, eps, policy_rng);
    } else {
      res = run_episode(cfg, setup, out.tables, true, eps, policy_rng);
    }
    if (res.crashed) out.crashes += 1;
    out.episodes += 1;

    if ((ep + 1) % 100 == 0) record_norms(ep + 1);
    if (progress && (ep + 1) % 10000 == 0) progress(ep + 1, total, out.crashes);
  }
  if (total % 100 != 0) record_norms(total);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalSummary {
  long episodes = 0;
  long crashes = 0;
  long rear_violations = 0;
  long lateral_violations = 0;
  long completed_episodes = 0;
  long fifo_respected_episodes = 0;  // among crash-free completed
  double mean_travel_time = 0.0;
  double mean_delay = 0.0;
  double mean_fuel = 0.0;
  double fifo_respected_fraction = 0.0;
  double mean_merge_abs_err = 0.0;  // combined framework
  std::vector<EpisodeResult> per_episode;
};

/// Greedy (epsilon = 0) evaluation of frozen tables over freshly sampled
/// episodes. Never writes to the tables.
inline EvalSummary evaluate(const Config& cfg, const std::vector<QTable>& tables,
                            long episodes, std::uint64_t seed,
                            std::vector<StepRecord>* first_episode_trace = nullptr,
                            bool keep_per_episode = true) {
  cfg.validate();
  EvalSummary sum;
  double travel = 0.0, delay = 0.0, fuel = 0.0;
  long vehicles_done = 0;
  double merge_err = 0.0;
  long merges = 0;
  auto& mutable_tables = const_cast<std::vector<QTable>&>(tables);  // learn=false

  for (long ep = 0; ep < episodes; ++ep) {
    auto setup_rng = episode_rng(seed, RngStream::Setup, ep);
    auto policy_rng = episode_rng(seed, RngStream::Policy, ep);
    const EpisodeSetup setup = sample_episode_setup(cfg, setup_rng);
    std::vector<StepRecord>* trace = (ep == 0) ? first_episode_trace : nullptr;
    EpisodeResult res =
        run_episode(cfg, setup, mutable_tables, false, 0.0, policy_rng, trace);

    sum.episodes += 1;
    if (res.crashed) sum.crashes += 1;
    sum.rear_violations += res.rear_violations;
    sum.lateral_violations += res.lateral_violations;
    if (res.completed && !res.crashed) {
      sum.completed_episodes += 1;
      if (res.fifo_respected) sum.fifo_respected_episodes += 1;
    }
    for (const auto& vs : res.vehicles) {
      if (!vs.exited()) continue;
      travel += vs.t_exit - vs.t_entry;
      delay += (vs.t_exit - vs.t_entry) - cfg.intersection.road_length() / vs.v0;
      fuel += vs.fuel;
      vehicles_done += 1;
    }
    merge_err += res.merge_abs_err_sum;
    merges += res.merge_count;
    if (keep_per_episode) sum.per_episode.push_back(std::move(res));
  }

  if (vehicles_done > 0) {
    sum.mean_travel_time = travel / vehicles_done;
    sum.mean_delay = delay / vehicles_done;
    sum.mean_fuel = fuel / vehicles_done;
  }
  if (sum.completed_episodes > 0)
    sum.fifo_respected_fraction =
        static_cast<double>(sum.fifo_respected_episodes) / sum.completed_episodes;
  if (merges > 0) sum.mean_merge_abs_err = merge_err / merges;
  return sum;
}

// ---------------------------------------------------------------------------
// Baseline suite and paired comparison

struct BaselineEpisode {
  BaselineResult result;
  double mean_travel_time = 0.0;
  double mean_fuel = 0.0;
  long bound_warnings = 0;
};

/// Runs the optimal-control comparator on the same episode stream the RL
/// evaluation uses (same seed, same setups).
inline BaselineEpisode run_baseline_episode(const Config& cfg,
                                            const EpisodeSetup& setup) {
  BaselineEpisode out;
  out.result = run_baseline(setup.plans, cfg.intersection, cfg.sim, cfg.time_headway);
  double travel = 0.0, fuel = 0.0;
  for (const auto& tr : out.result.trajectories) {
    travel += tr.t_exit - tr.t0;
    fuel += baseline_fuel_proxy(tr, cfg.sim);
    out.bound_warnings += static_cast<long>(tr.warnings.size());
  }
  const auto count = static_cast<double>(out.result.trajectories.size());
  out.mean_travel_time = travel / count;
  out.mean_fuel = fuel / count;
  return out;
}

struct CompareRow {
  long episode = 0;
  bool rl_crashed = false;
  double rl_travel = 0.0, baseline_travel = 0.0;
  double rl_fuel = 0.0, baseline_fuel = 0.0;
  long baseline_warnings = 0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double mean_travel_delta = 0.0;  // RL minus baseline, crash-free rows
  double mean_fuel_delta = 0.0;
  long rl_crashes = 0;
};

inline CompareReport compare(const Config& cfg, const std::vector<QTable>& tables,
                             long episodes, std::uint64_t seed) {
  CompareReport rep;
  auto& mutable_tables = const_cast<std::vector<QTable>&>(tables);
  double dt_sum = 0.0, df_sum = 0.0;
  long counted = 0;

  for (long ep = 0; ep < episodes; ++ep) {
    auto setup_rng = episode_rng(seed, RngStream::Setup, ep);
    auto policy_rng = episode_rng(seed, RngStream::Policy, ep);
    const EpisodeSetup setup = sample_episode_setup(cfg, setup_rng);

    EpisodeResult rl = run_episode(cfg, setup, mutable_tables, false, 0.0, policy_rng);
    BaselineEpisode base = run_baseline_episode(cfg, setup);

    CompareRow row;
    row.episode = ep;
    row.rl_crashed = rl.crashed;
    row.baseline_travel = base.mean_travel_time;
    row.baseline_fuel = base.mean_fuel;
    row.baseline_warnings = base.bound_warnings;
    if (!rl.crashed && rl.completed) {
      double travel = 0.0, fuel = 0.0;
      for (const auto& vs : rl.vehicles) {
        travel += vs.t_exit - vs.t_entry;
        fuel += vs.fuel;
      }
      row.rl_travel = travel / rl.vehicles.size();
      row.rl_fuel = fuel / rl.vehicles.size();
      dt_sum += row.rl_travel - row.baseline_travel;
      df_sum += row.rl_fuel - row.baseline_fuel;
      counted += 1;
    } else {
      rep.rl_crashes += 1;
    }
    rep.rows.push_back(row);
  }
  if (counted > 0) {
    rep.mean_travel_delta = dt_sum / counted;
    rep.mean_fuel_delta = df_sum / counted;
  }
  return rep;
}

}  // namespace crossq
