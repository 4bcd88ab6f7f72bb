#pragma once

// Run configuration: one JSON document with nested sections mirroring the
// core value types, plus the two built-in scenario presets.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossq/domain.hpp"
#include "crossq/learner.hpp"
#include "crossq/rewards.hpp"

namespace crossq {

struct ScenarioSpec {
  std::string name = "custom";
  int n_vehicles = 4;
  Framework framework = Framework::Standalone;
  std::vector<Approach> approach_sequence = {Approach::SB, Approach::EB, Approach::NB,
                                             Approach::WB};
  bool randomize_approaches = false;

  Approach approach_for(int vehicle_index) const {
    return approach_sequence[vehicle_index % approach_sequence.size()];
  }

  void validate() const {
    if (n_vehicles < 1) throw std::invalid_argument("n_vehicles must be >= 1");
    if (approach_sequence.empty() && !randomize_approaches)
      throw std::invalid_argument("approach_sequence must not be empty");
  }
};

struct Config {
  IntersectionConfig intersection;
  SimConfig sim;
  RewardWeights weights;
  LearnerConfig learner;
  double time_headway = 2.0;
  ScenarioSpec scenario;

  void validate() const {
    intersection.validate();
    sim.validate();
    weights.validate();
    learner.validate();
    scenario.validate();
    if (!(time_headway > 0.0))
      throw std::invalid_argument("time_headway must be > 0");
  }

  /// Non-fatal consistency notes surfaced at load time.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    const double transit = intersection.merging_zone_length / sim.v_min;
    if (time_headway < transit) {
      w.push_back("time_headway " + std::to_string(time_headway) +
                  " s is below D/v_min = " + std::to_string(transit) +
                  " s; scheduled arrivals may overlap inside the merging zone");
    }
    return w;
  }

  /// Step budget for one episode: the arrival span plus four worst-case
  /// crossings at v_min, unless the config pins max_steps explicitly.
  int episode_step_budget(double last_arrival) const {
    if (sim.max_steps > 0) return sim.max_steps;
    const double horizon = last_arrival + 4.0 * intersection.road_length() / sim.v_min;
    return static_cast<int>(std::ceil(horizon / sim.dt)) + 1;
  }
};

// ---------------------------------------------------------------------------
// Presets

/// Four vehicles on the short intersection, standalone framework.
inline Config preset_scenario1() {
  Config c;
  c.scenario.name = "scenario1";
  c.scenario.n_vehicles = 4;
  c.scenario.framework = Framework::Standalone;
  c.intersection.control_zone_length = 32.0;
  c.intersection.merging_zone_length = 18.0;
  c.learner.total_episodes = 2000000;
  c.time_headway = 4.0;  // >= D/v_min so scheduled occupancies cannot overlap
  return c;
}

/// Eight vehicles on the long intersection, combined framework.
inline Config preset_scenario2() {
  Config c;
  c.scenario.name = "scenario2";
  c.scenario.n_vehicles = 8;
  c.scenario.framework = Framework::Combined;
  c.intersection.control_zone_length = 100.0;
  c.intersection.merging_zone_length = 18.0;
  c.learner.total_episodes = 400000;
  c.time_headway = 4.0;
  return c;
}

inline Config preset_by_name(const std::string& name) {
  if (name == "scenario1") return preset_scenario1();
  if (name == "scenario2") return preset_scenario2();
  throw std::invalid_argument("unknown preset: " + name);
}

// ---------------------------------------------------------------------------
// JSON round-trip

inline nlohmann::json to_json(const Config& c) {
  nlohmann::json j;
  j["intersection"] = {
      {"control_zone_length", c.intersection.control_zone_length},
      {"merging_zone_length", c.intersection.merging_zone_length},
  };
  j["sim"] = {
      {"dt", c.sim.dt},
      {"d_safe", c.sim.d_safe},
      {"v_min", c.sim.v_min},
      {"v_max", c.sim.v_max},
      {"u_min", c.sim.u_min},
      {"u_max", c.sim.u_max},
      {"max_steps", c.sim.max_steps},
      {"dp", c.sim.dp},
      {"dv", c.sim.dv},
      {"du", c.sim.du},
      {"mean_interarrival", c.sim.mean_interarrival},
      {"headway_slack", c.sim.headway_slack},
  };
  j["weights"] = {
      {"w1", c.weights.w1}, {"w2", c.weights.w2},   {"w3", c.weights.w3},
      {"w4", c.weights.w4}, {"w5", c.weights.w5},   {"w1p", c.weights.w1p},
      {"w2p", c.weights.w2p}, {"w3p", c.weights.w3p}, {"w4p", c.weights.w4p},
  };
  j["learner"] = {
      {"alpha", c.learner.alpha},
      {"beta", c.learner.beta},
      {"gamma", c.learner.gamma},
      {"epsilon_init", c.learner.epsilon_init},
      {"epsilon_final", c.learner.epsilon_final},
      {"total_episodes", c.learner.total_episodes},
      {"mode", to_string(c.learner.mode)},
      {"max_joint_actions", c.learner.max_joint_actions},
  };
  j["fifo"] = {{"time_headway", c.time_headway}};
  std::vector<std::string> seq;
  for (Approach a : c.scenario.approach_sequence) seq.push_back(to_string(a));
  j["scenario"] = {
      {"name", c.scenario.name},
      {"n_vehicles", c.scenario.n_vehicles},
      {"framework", to_string(c.scenario.framework)},
      {"approach_sequence", seq},
      {"randomize_approaches", c.scenario.randomize_approaches},
  };
  return j;
}

namespace detail {
template <class T>
void get_if_present(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}
}  // namespace detail

/// Parses a config document. Missing keys keep their defaults, so partial
/// files can override a preset.
inline Config config_from_json(const nlohmann::json& j, Config base = Config{}) {
  Config c = std::move(base);
  using detail::get_if_present;
  if (j.contains("intersection")) {
    const auto& ji = j.at("intersection");
    get_if_present(ji, "control_zone_length", c.intersection.control_zone_length);
    get_if_present(ji, "merging_zone_length", c.intersection.merging_zone_length);
  }
  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    get_if_present(js, "dt", c.sim.dt);
    get_if_present(js, "d_safe", c.sim.d_safe);
    get_if_present(js, "v_min", c.sim.v_min);
    get_if_present(js, "v_max", c.sim.v_max);
    get_if_present(js, "u_min", c.sim.u_min);
    get_if_present(js, "u_max", c.sim.u_max);
    get_if_present(js, "max_steps", c.sim.max_steps);
    get_if_present(js, "dp", c.sim.dp);
    get_if_present(js, "dv", c.sim.dv);
    get_if_present(js, "du", c.sim.du);
    get_if_present(js, "mean_interarrival", c.sim.mean_interarrival);
    get_if_present(js, "headway_slack", c.sim.headway_slack);
  }
  if (j.contains("weights")) {
    const auto& jw = j.at("weights");
    get_if_present(jw, "w1", c.weights.w1);
    get_if_present(jw, "w2", c.weights.w2);
    get_if_present(jw, "w3", c.weights.w3);
    get_if_present(jw, "w4", c.weights.w4);
    get_if_present(jw, "w5", c.weights.w5);
    get_if_present(jw, "w1p", c.weights.w1p);
    get_if_present(jw, "w2p", c.weights.w2p);
    get_if_present(jw, "w3p", c.weights.w3p);
    get_if_present(jw, "w4p", c.weights.w4p);
  }
  if (j.contains("learner")) {
    const auto& jl = j.at("learner");
    get_if_present(jl, "alpha", c.learner.alpha);
    get_if_present(jl, "beta", c.learner.beta);
    get_if_present(jl, "gamma", c.learner.gamma);
    get_if_present(jl, "epsilon_init", c.learner.epsilon_init);
    get_if_present(jl, "epsilon_final", c.learner.epsilon_final);
    get_if_present(jl, "total_episodes", c.learner.total_episodes);
    get_if_present(jl, "max_joint_actions", c.learner.max_joint_actions);
    if (jl.contains("mode")) {
      auto mode = update_mode_from_string(jl.at("mode").get<std::string>());
      if (!mode) throw std::invalid_argument("unknown learner mode in config");
      c.learner.mode = *mode;
    }
  }
  if (j.contains("fifo")) {
    get_if_present(j.at("fifo"), "time_headway", c.time_headway);
  }
  if (j.contains("scenario")) {
    const auto& js = j.at("scenario");
    get_if_present(js, "name", c.scenario.name);
    get_if_present(js, "n_vehicles", c.scenario.n_vehicles);
    get_if_present(js, "randomize_approaches", c.scenario.randomize_approaches);
    if (js.contains("framework")) {
      const std::string f = js.at("framework").get<std::string>();
      if (f == "standalone") c.scenario.framework = Framework::Standalone;
      else if (f == "combined") c.scenario.framework = Framework::Combined;
      else throw std::invalid_argument("unknown framework in config: " + f);
    }
    if (js.contains("approach_sequence")) {
      c.scenario.approach_sequence.clear();
      for (const auto& s : js.at("approach_sequence")) {
        auto a = approach_from_string(s.get<std::string>());
        if (!a) throw std::invalid_argument("unknown approach in config");
        c.scenario.approach_sequence.push_back(*a);
      }
    }
  }
  return c;
}

inline Config load_config(const std::string& path, Config base = Config{}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  Config c = config_from_json(j, std::move(base));
  c.validate();
  return c;
}

inline void save_config(const Config& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << to_json(c).dump(2) << "\n";
}

}  // namespace crossq
