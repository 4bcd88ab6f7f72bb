#pragma once

// Tabular Q-learning: sparse value tables with implicit-zero reads, the
// hysteretic / independent / centralized update rules, epsilon-greedy action
// selection with linear decay, and a text snapshot format that round-trips
// values at full precision.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossq/domain.hpp"

namespace crossq {

enum class UpdateMode { Hysteretic, Independent, Centralized };

inline const char* to_string(UpdateMode m) {
  switch (m) {
    case UpdateMode::Hysteretic: return "hysteretic";
    case UpdateMode::Independent: return "independent";
    case UpdateMode::Centralized: return "centralized";
  }
  return "??";
}

inline std::optional<UpdateMode> update_mode_from_string(const std::string& s) {
  if (s == "hysteretic") return UpdateMode::Hysteretic;
  if (s == "independent") return UpdateMode::Independent;
  if (s == "centralized") return UpdateMode::Centralized;
  return std::nullopt;
}

struct LearnerConfig {
  double alpha = 0.4;
  double beta = 0.05;
  double gamma = 0.95;
  double epsilon_init = 0.6;
  double epsilon_final = 0.01;
  long total_episodes = 2000000;
  UpdateMode mode = UpdateMode::Hysteretic;
  long max_joint_actions = 100000;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("alpha must be in (0, 1]");
    if (!(beta > 0.0 && beta <= 1.0))
      throw std::invalid_argument("beta must be in (0, 1]");
    if (mode == UpdateMode::Hysteretic && !(beta < alpha))
      throw std::invalid_argument("hysteretic mode requires beta < alpha");
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("gamma must be in [0, 1]");
    for (double e : {epsilon_init, epsilon_final})
      if (!(e >= 0.0 && e <= 1.0))
        throw std::invalid_argument("exploration ratios must be in [0, 1]");
    if (total_episodes < 0) throw std::invalid_argument("total_episodes must be >= 0");
    if (max_joint_actions < 1)
      throw std::invalid_argument("max_joint_actions must be >= 1");
  }
};

// ---------------------------------------------------------------------------

/// Sparse action-value table. Rows materialize on first write; reads of
/// unseen (state, action) pairs are exactly zero.
template <class Key, class Hash>
class QTableT {
 public:
  using Map = std::unordered_map<Key, std::vector<double>, Hash>;

  explicit QTableT(int action_count) : actions_(action_count) {
    if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
  }

  int action_count() const { return actions_; }

  double value(const Key& s, int a) const {
    auto it = rows_.find(s);
    return it == rows_.end() ? 0.0 : it->second[a];
  }

  double max_value(const Key& s) const {
    auto it = rows_.find(s);
    if (it == rows_.end()) return 0.0;
    double best = it->second[0];
    for (double v : it->second) best = std::max(best, v);
    return best;
  }

  /// Greedy action with exact ties broken uniformly at random.
  int greedy_action(const Key& s, std::mt19937_64& rng) const {
    auto it = rows_.find(s);
    if (it == rows_.end())
      return std::uniform_int_distribution<int>(0, actions_ - 1)(rng);
    const auto& row = it->second;
    double best = row[0];
    for (double v : row) best = std::max(best, v);
    int ties = 0;
    int pick = 0;
    for (int a = 0; a < actions_; ++a) {
      if (row[a] == best) ++ties;
    }
    if (ties == 1) {
      for (int a = 0; a < actions_; ++a)
        if (row[a] == best) return a;
    }
    int which = std::uniform_int_distribution<int>(0, ties - 1)(rng);
    for (int a = 0; a < actions_; ++a) {
      if (row[a] == best && pick++ == which) return a;
    }
    return 0;  // unreachable
  }

  /// One temporal-difference update. alpha_pos applies when the TD error is
  /// nonnegative, alpha_neg otherwise; a null s_next means the transition
  /// was terminal and the bootstrap term is dropped.
  double update(const Key& s, int a, double r, const Key* s_next, double gamma,
                double alpha_pos, double alpha_neg) {
    const double target = r + (s_next ? gamma * max_value(*s_next) : 0.0);
    auto& row = row_mut(s);
    const double delta = target - row[a];
    row[a] += (delta >= 0.0 ? alpha_pos : alpha_neg) * delta;
    return row[a];
  }

  void set_value(const Key& s, int a, double v) { row_mut(s)[a] = v; }

  std::size_t row_count() const { return rows_.size(); }
  std::size_t entry_count() const { return rows_.size() * actions_; }

  /// Cartesian (Frobenius) norm over all stored entries.
  double norm() const {
    double ss = 0.0;
    for (const auto& [key, row] : rows_)
      for (double v : row) ss += v * v;
    return std::sqrt(ss);
  }

  const Map& rows() const { return rows_; }

 private:
  std::vector<double>& row_mut(const Key& s) {
    auto it = rows_.find(s);
    if (it == rows_.end())
      it = rows_.emplace(s, std::vector<double>(actions_, 0.0)).first;
    return it->second;
  }

  int actions_;
  Map rows_;
};

using QTable = QTableT<StateKey, StateKeyHash>;
using JointQTable = QTableT<JointKey, JointKeyHash>;

template <class Key, class Hash>
inline double q_norm(const QTableT<Key, Hash>& q) {
  return q.norm();
}

// ---------------------------------------------------------------------------
// Exploration

/// Linearly decayed exploration ratio: epsilon_init at episode 0 down to
/// epsilon_final at total_episodes and beyond.
inline double epsilon_at(long episode, const LearnerConfig& cfg) {
  if (episode < 0) throw std::invalid_argument("episode must be >= 0");
  if (cfg.total_episodes == 0) return cfg.epsilon_final;
  double rho = std::max(
      static_cast<double>(cfg.total_episodes - episode) / cfg.total_episodes, 0.0);
  return (cfg.epsilon_init - cfg.epsilon_final) * rho + cfg.epsilon_final;
}

template <class Key, class Hash>
inline int select_action(const QTableT<Key, Hash>& q, const Key& s, double epsilon,
                         std::mt19937_64& rng) {
  if (epsilon > 0.0 &&
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
    return std::uniform_int_distribution<int>(0, q.action_count() - 1)(rng);
  return q.greedy_action(s, rng);
}

// ---------------------------------------------------------------------------
// Update rules

/// Two-rate update: the slow rate beta damps negative TD errors so penalties
/// caused by teammates' exploration degrade learned values more slowly.
inline double update_hysteretic(QTable& q, const StateKey& s, int u, double r,
                                const StateKey* s_next, const LearnerConfig& cfg) {
  return q.update(s, u, r, s_next, cfg.gamma, cfg.alpha, cfg.beta);
}

/// Standard single-rate independent-learner update.
inline double update_independent(QTable& q, const StateKey& s, int u, double r,
                                 const StateKey* s_next, const LearnerConfig& cfg) {
  return q.update(s, u, r, s_next, cfg.gamma, cfg.alpha, cfg.alpha);
}

/// Centralized update over the joint state and joint action. The joint
/// action space must stay under the configured cap; it grows as A^n and is
/// rejected otherwise.
inline double update_centralized(JointQTable& q, const JointKey& s, long joint_action,
                                 double r_total, const JointKey* s_next,
                                 const LearnerConfig& cfg) {
  if (q.action_count() > cfg.max_joint_actions)
    throw std::invalid_argument("joint action space exceeds max_joint_actions");
  return q.update(s, static_cast<int>(joint_action), r_total, s_next, cfg.gamma,
                  cfg.alpha, cfg.alpha);
}

/// Concatenates per-agent keys into one joint key.
inline JointKey make_joint_key(const std::vector<StateKey>& keys) {
  JointKey jk;
  for (const auto& k : keys)
    for (int i = 0; i < k.len; ++i) jk.slots.push_back(k.slots[i]);
  return jk;
}

inline long joint_action_count(int per_agent_actions, int n_agents, long cap) {
  long total = 1;
  for (int i = 0; i < n_agents; ++i) {
    total *= per_agent_actions;
    if (total > cap)
      throw std::invalid_argument("joint action space exceeds max_joint_actions");
  }
  return total;
}

inline long flatten_joint_action(const std::vector<int>& actions, int per_agent) {
  long idx = 0;
  for (int a : actions) idx = idx * per_agent + a;
  return idx;
}

inline std::vector<int> unflatten_joint_action(long idx, int per_agent, int n_agents) {
  std::vector<int> actions(n_agents, 0);
  for (int i = n_agents - 1; i >= 0; --i) {
    actions[i] = static_cast<int>(idx % per_agent);
    idx /= per_agent;
  }
  return actions;
}

// ---------------------------------------------------------------------------
// Snapshots

struct SnapshotMeta {
  UpdateMode mode = UpdateMode::Hysteretic;
  long episode = 0;
  DiscreteGrid grid;
};

namespace detail {
inline void write_axis(std::FILE* f, const char* name, const Axis& ax) {
  std::fprintf(f, "axis %s %.17g %.17g %.17g\n", name, ax.lo, ax.hi, ax.width);
}
}  // namespace detail

/// Writes a table as line-based text: a fixed header followed by one record
/// per stored entry. Entries are sorted so identical tables produce
/// identical bytes; values use %.17g and round-trip exactly.
inline void save_qtable(const QTable& q, const SnapshotMeta& meta,
                        const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(f, "crossq-qtable 1\n");
  std::fprintf(f, "mode %s\n", to_string(meta.mode));
  std::fprintf(f, "episode %ld\n", meta.episode);
  std::fprintf(f, "actions %d\n", q.action_count());
  detail::write_axis(f, "pos", meta.grid.pos);
  detail::write_axis(f, "speed", meta.grid.speed);
  detail::write_axis(f, "ctrl", meta.grid.ctrl);
  detail::write_axis(f, "headway", meta.grid.headway);

  std::vector<const StateKey*> keys;
  keys.reserve(q.rows().size());
  for (const auto& [key, row] : q.rows()) keys.push_back(&key);
  std::sort(keys.begin(), keys.end(), [](const StateKey* a, const StateKey* b) {
    if (a->len != b->len) return a->len < b->len;
    return a->slots < b->slots;
  });

  std::fprintf(f, "entries %zu\n", q.rows().size() * q.action_count());
  for (const StateKey* key : keys) {
    const auto& row = q.rows().at(*key);
    for (int a = 0; a < q.action_count(); ++a) {
      std::fprintf(f, "%d", static_cast<int>(key->len));
      for (int i = 0; i < key->len; ++i) std::fprintf(f, " %d", key->slots[i]);
      std::fprintf(f, " %d %.17g\n", a, row[a]);
    }
  }
  std::fclose(f);
}

inline QTable load_qtable(const std::string& path, SnapshotMeta* meta_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "crossq-qtable" || version != 1)
    throw std::runtime_error("not a crossq-qtable file: " + path);

  SnapshotMeta meta;
  std::string tok;
  int actions = 0;
  long entries = 0;
  while (in >> tok) {
    if (tok == "mode") {
      std::string m;
      in >> m;
      auto mode = update_mode_from_string(m);
      if (!mode) throw std::runtime_error("unknown mode in snapshot: " + m);
      meta.mode = *mode;
    } else if (tok == "episode") {
      in >> meta.episode;
    } else if (tok == "actions") {
      in >> actions;
    } else if (tok == "axis") {
      std::string name;
      Axis ax;
      in >> name >> ax.lo >> ax.hi >> ax.width;
      if (name == "pos") meta.grid.pos = ax;
      else if (name == "speed") meta.grid.speed = ax;
      else if (name == "ctrl") meta.grid.ctrl = ax;
      else if (name == "headway") meta.grid.headway = ax;
      else throw std::runtime_error("unknown axis in snapshot: " + name);
    } else if (tok == "entries") {
      in >> entries;
      break;
    } else {
      throw std::runtime_error("unexpected token in snapshot: " + tok);
    }
  }
  if (actions < 1) throw std::runtime_error("snapshot missing action count");

  QTable q(actions);
  for (long e = 0; e < entries; ++e) {
    int len = 0;
    if (!(in >> len)) throw std::runtime_error("truncated snapshot: " + path);
    StateKey key;
    for (int i = 0; i < len; ++i) {
      int slot;
      in >> slot;
      key.push(static_cast<std::int16_t>(slot));
    }
    int action;
    double value;
    in >> action >> value;
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    q.set_value(key, action, value);
  }
  if (meta_out) *meta_out = meta;
  return q;
}

}  // namespace crossq
