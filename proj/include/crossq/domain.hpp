#pragma once

// Core value types shared across the intersection simulator: geometry and
// run configuration, vehicle kinematic state, the discretization grid that
// turns continuous observations into Q-table keys, and the arrival-time
// sampler used to reset episodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace crossq {

// ---------------------------------------------------------------------------
// Approaches and conflicts

enum class Approach : std::uint8_t { SB = 0, EB = 1, NB = 2, WB = 3 };

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::SB: return "SB";
    case Approach::EB: return "EB";
    case Approach::NB: return "NB";
    case Approach::WB: return "WB";
  }
  return "??";
}

inline std::optional<Approach> approach_from_string(const std::string& s) {
  if (s == "SB") return Approach::SB;
  if (s == "EB") return Approach::EB;
  if (s == "NB") return Approach::NB;
  if (s == "WB") return Approach::WB;
  return std::nullopt;
}

// SB/NB run on the vertical axis, EB/WB on the horizontal one. Turns are not
// modeled, so only perpendicular paths can meet inside the merging zone.
inline bool same_axis(Approach a, Approach b) {
  auto vertical = [](Approach x) { return x == Approach::SB || x == Approach::NB; };
  return vertical(a) == vertical(b);
}

inline bool conflicts(Approach a, Approach b) { return !same_axis(a, b); }

// ---------------------------------------------------------------------------
// Configuration

/// Geometry of the intersection: per-approach control zone of length L
/// feeding a central merging square of side D.
struct IntersectionConfig {
  double control_zone_length = 32.0;  // L, meters
  double merging_zone_length = 18.0;  // D, meters
  std::array<Approach, 4> approaches = {Approach::SB, Approach::EB, Approach::NB,
                                        Approach::WB};

  double road_length() const { return control_zone_length + merging_zone_length; }

  void validate() const {
    if (!(control_zone_length > 0.0))
      throw std::invalid_argument("control_zone_length must be > 0");
    if (!(merging_zone_length > 0.0))
      throw std::invalid_argument("merging_zone_length must be > 0");
  }
};

/// Time step, kinematic bounds, discretization widths, and the arrival
/// process mean. Every quantity is in SI units (m, s, m/s, m/s^2).
struct SimConfig {
  double dt = 0.5;
  double d_safe = 4.0;
  double v_min = 5.0;
  double v_max = 15.0;
  double u_min = -3.0;
  double u_max = 3.0;
  int max_steps = 0;  // 0: derived per episode from geometry and arrivals
  double dp = 2.0;
  double dv = 5.0;
  double du = 1.0;
  double mean_interarrival = 2.0;
  double headway_slack = 10.0;  // extra range on the scheduled-headway axis, s

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(d_safe > 0.0)) throw std::invalid_argument("d_safe must be > 0");
    if (!(0.0 <= v_min && v_min < v_max))
      throw std::invalid_argument("require 0 <= v_min < v_max");
    if (!(u_min < 0.0 && 0.0 < u_max))
      throw std::invalid_argument("require u_min < 0 < u_max");
    if (!(dp > 0.0 && dv > 0.0 && du > 0.0))
      throw std::invalid_argument("discretization widths must be > 0");
    if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
    if (!(mean_interarrival > 0.0))
      throw std::invalid_argument("mean_interarrival must be > 0");
    if (!(headway_slack >= 0.0))
      throw std::invalid_argument("headway_slack must be >= 0");
    // the control set must close under the du lattice
    double span = (u_max - u_min) / du;
    if (std::abs(span - std::round(span)) > 1e-9)
      throw std::invalid_argument("u_max - u_min must be a multiple of du");
  }

  int action_count() const {
    return static_cast<int>(std::llround((u_max - u_min) / du)) + 1;
  }

  double action_value(int index) const { return u_min + index * du; }

  /// Maps a control value back to its lattice index; throws when the value
  /// is off-grid or out of bounds (a caller bug, not a runtime condition).
  int action_index(double u) const {
    double idx = (u - u_min) / du;
    long rounded = std::lround(idx);
    if (std::abs(idx - rounded) > 1e-6 || rounded < 0 || rounded >= action_count())
      throw std::invalid_argument("control value off the du grid: " + std::to_string(u));
    return static_cast<int>(rounded);
  }
};

/// Weights for the multi-objective reward. w1..w5 drive the standalone
/// framework, w1p..w4p the FIFO-combined one.
struct RewardWeights {
  double w1 = 1.0, w2 = 1.0, w3 = 1.0, w4 = 1.0, w5 = 1.0;
  double w1p = 1.0, w2p = 1.0, w3p = 1.0, w4p = 1.0;

  void validate() const {
    for (double w : {w1, w2, w3, w4, w5, w1p, w2p, w3p, w4p})
      if (w < 0.0) throw std::invalid_argument("reward weights must be >= 0");
  }
};

// ---------------------------------------------------------------------------
// Vehicle state

enum class Phase : std::uint8_t { NotArrived, InControlZone, InMergingZone, Exited };

inline const char* to_string(Phase ph) {
  switch (ph) {
    case Phase::NotArrived: return "not-arrived";
    case Phase::InControlZone: return "in-control-zone";
    case Phase::InMergingZone: return "in-merging-zone";
    case Phase::Exited: return "exited";
  }
  return "??";
}

/// Kinematic state of one vehicle. Position p is distance traveled from the
/// control-zone entry along its own approach; the merging zone spans
/// [L, L + D) in that coordinate.
struct CavState {
  int id = 0;
  Approach approach = Approach::SB;
  double p = 0.0;
  double v = 0.0;
  double t0 = 0.0;  // control-zone entry time, s
  double v0 = 0.0;  // entry speed, m/s
  Phase phase = Phase::NotArrived;

  bool active() const {
    return phase == Phase::InControlZone || phase == Phase::InMergingZone;
  }
};

inline Phase phase_for_position(double p, const IntersectionConfig& ic) {
  if (p >= ic.road_length()) return Phase::Exited;
  if (p >= ic.control_zone_length) return Phase::InMergingZone;
  return Phase::InControlZone;
}

// ---------------------------------------------------------------------------
// Observation (the partial state each learner sees)

/// What vehicle i observes: its own kinematics, the vehicle immediately
/// ahead on the same approach (if any), and the positions of up to three
/// conflicting vehicles closest to the merging-zone exit.
struct ObservedState {
  double p = 0.0;
  double v = 0.0;
  std::optional<std::pair<double, double>> rear;  // (p_j, v_j) of the leader
  std::array<std::optional<double>, 3> lateral{};
};

// ---------------------------------------------------------------------------
// Discretization

/// One binned axis: floor(x / width) semantics with clamping at both ends,
/// so every real input maps to exactly one bin.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double width = 1.0;

  int num_bins() const {
    return static_cast<int>(std::floor((hi - lo) / width)) + 1;
  }

  int bin(double x) const {
    if (x <= lo) return 0;
    int b = static_cast<int>(std::floor((x - lo) / width));
    return std::min(b, num_bins() - 1);
  }

  /// Center of a bin, clamped into [lo, hi] so decode(encode(x)) stays in
  /// the same bin even for the truncated top bin.
  double center(int b) const {
    double c = lo + (b + 0.5) * width;
    return std::clamp(c, lo, hi);
  }
};

struct DiscreteGrid {
  Axis pos;      // distance from control-zone entry, [0, L + D]
  Axis speed;    // [v_min, v_max]
  Axis ctrl;     // [u_min, u_max]
  Axis headway;  // scheduled merging-zone headway Delta t_i^{m*}

  static constexpr std::int16_t kAbsent = -1;  // sentinel bin for missing slots
};

inline DiscreteGrid make_grid(const SimConfig& sc, const IntersectionConfig& ic) {
  DiscreteGrid g;
  g.pos = {0.0, ic.road_length(), sc.dp};
  g.speed = {sc.v_min, sc.v_max, sc.dv};
  g.ctrl = {sc.u_min, sc.u_max, sc.du};
  double lo = ic.control_zone_length / sc.v_max;
  double hi = ic.control_zone_length / sc.v_min + sc.headway_slack;
  g.headway = {lo, hi, sc.dt};
  return g;
}

// ---------------------------------------------------------------------------
// Q-table keys

/// Discretized state key: a short tuple of bin indices. Standalone
/// observations use 7 slots (p, v, rear p, rear v, 3 lateral positions);
/// the combined framework uses 5 (p, v, rear p, rear v, headway bin).
struct StateKey {
  std::array<std::int16_t, 8> slots{};
  std::uint8_t len = 0;

  void push(std::int16_t v) { slots[len++] = v; }
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept {
    // FNV-1a over the full slot array (unused slots are zero-filled).
    std::uint64_t h = 1469598103934665603ull;
    for (std::int16_t s : k.slots) {
      h ^= static_cast<std::uint16_t>(s);
      h *= 1099511628211ull;
    }
    h ^= k.len;
    h *= 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

/// Concatenation key for the centralized (joint) learner, which needs one
/// slot group per agent and so outgrows the fixed-size key.
struct JointKey {
  std::vector<std::int16_t> slots;
  bool operator==(const JointKey&) const = default;
};

struct JointKeyHash {
  std::size_t operator()(const JointKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int16_t s : k.slots) {
      h ^= static_cast<std::uint16_t>(s);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// ---------------------------------------------------------------------------
// Encoding

/// Bins an observation into a Q-table key. Total and deterministic: values
/// outside the declared ranges clamp to the boundary bins, absent neighbor
/// slots map to the reserved sentinel bin.
inline StateKey encode_state(const ObservedState& obs, const DiscreteGrid& grid) {
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
  for (const auto& lat : obs.lateral) {
    key.push(lat ? static_cast<std::int16_t>(grid.pos.bin(*lat))
                 : DiscreteGrid::kAbsent);
  }
  return key;
}

// ---------------------------------------------------------------------------
// Arrival process

/// Control-zone entry times as cumulative sums of iid exponential gaps.
/// Nondecreasing by construction and reproducible under a fixed seed.
inline std::vector<double> sample_arrivals(int n, double mean, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample_arrivals: n must be >= 1");
  if (!(mean > 0.0)) throw std::invalid_argument("sample_arrivals: mean must be > 0");
  std::exponential_distribution<double> gap(1.0 / mean);
  std::vector<double> times(n);
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += gap(rng);
    times[i] = t;
  }
  return times;
}

}  // namespace crossq
