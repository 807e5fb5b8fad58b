// SPDX-License-Identifier: Apache-2.0
//
// The control MDP. Each active gNB is one agent whose state is the
// (power, tilt) pair of its sectors and whose action picks one of nine
// (tilt, power) nudges per sector. The reward is the network-wide penalised
// throughput, zeroed whenever fewer than the minimum number of users are
// served.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/association.hpp"
#include "istn/scenario.hpp"

namespace istn {

using ActionIndex = std::size_t;

inline constexpr std::size_t kActionsPerSector = 9;
inline constexpr double kTiltStepDeg = 1.0;
inline constexpr double kPowerStepDb = 5.0;

struct SectorDelta {
  double tilt_deg = 0.0;
  double power_db = 0.0;

  friend bool operator==(const SectorDelta&, const SectorDelta&) = default;
};

inline constexpr std::size_t action_space_size(std::size_t sectors) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < sectors; ++i) n *= kActionsPerSector;
  return n;
}

/// Mixed-radix decode, sector 0 in the least significant base-9 digit.
/// Digit d maps to tilt (d / 3 - 1) degrees and power (d % 3 - 1) * 5 dB.
inline std::vector<SectorDelta> decode_action(ActionIndex index, std::size_t sectors) {
  if (index >= action_space_size(sectors))
    throw std::out_of_range("decode_action: index " + std::to_string(index) + " out of range");
  std::vector<SectorDelta> out(sectors);
  for (std::size_t i = 0; i < sectors; ++i) {
    const auto d = static_cast<int>(index % kActionsPerSector);
    index /= kActionsPerSector;
    out[i] = {(d / 3 - 1) * kTiltStepDeg, (d % 3 - 1) * kPowerStepDb};
  }
  return out;
}

inline ActionIndex encode_action(std::span<const SectorDelta> deltas) {
  ActionIndex index = 0;
  for (std::size_t i = deltas.size(); i-- > 0;) {
    const int t = static_cast<int>(std::lround(deltas[i].tilt_deg / kTiltStepDeg)) + 1;
    const int p = static_cast<int>(std::lround(deltas[i].power_db / kPowerStepDb)) + 1;
    if (t < 0 || t > 2 || p < 0 || p > 2)
      throw std::invalid_argument("encode_action: delta not on the action grid");
    index = index * kActionsPerSector + static_cast<ActionIndex>(t * 3 + p);
  }
  return index;
}

/// Aggregates logged once per step.
struct StepMetrics {
  double reward = 0.0;
  double objective = 0.0;
  int served = 0;
  int leo_served = 0;
  bool feasible = false;
  std::array<int, 4> rsrp_categories{};  ///< good, fair, poor, nosignal
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
  StepMetrics metrics;
};

/// Controls of every active gNB, with the normalised view fed to learners.
struct EnvState {
  std::vector<std::size_t> gnb_ids;  ///< active gNBs, in agent order
  std::vector<std::array<SectorControl, kSectorsPerGnb>> controls;
  PowerTiltBounds bounds;

  std::vector<double> normalized(std::size_t agent) const {
    std::vector<double> v;
    v.reserve(2 * kSectorsPerGnb);
    for (const auto& c : controls.at(agent)) {
      v.push_back((c.power_dbm - bounds.power_min_dbm) / (bounds.power_max_dbm - bounds.power_min_dbm));
      v.push_back((c.tilt_deg - bounds.tilt_min_deg) / (bounds.tilt_max_deg - bounds.tilt_min_deg));
    }
    return v;
  }

  static std::array<SectorControl, kSectorsPerGnb> denormalize(std::span<const double> v,
                                                               const PowerTiltBounds& b) {
    std::array<SectorControl, kSectorsPerGnb> out{};
    for (std::size_t i = 0; i < kSectorsPerGnb; ++i) {
      out[i].power_dbm = b.power_min_dbm + v[2 * i] * (b.power_max_dbm - b.power_min_dbm);
      out[i].tilt_deg = b.tilt_min_deg + v[2 * i + 1] * (b.tilt_max_deg - b.tilt_min_deg);
    }
    return out;
  }

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// Tabular key of one agent's controls: power in 5 dB bins, tilt in 1 degree bins.
inline std::uint64_t discretize_controls(std::span<const SectorControl> sectors,
                                         const PowerTiltBounds& b) {
  const int power_levels =
      static_cast<int>(std::floor((b.power_max_dbm - b.power_min_dbm) / kPowerStepDb)) + 1;
  const int tilt_levels = static_cast<int>(std::lround(b.tilt_max_deg - b.tilt_min_deg)) + 1;
  std::uint64_t key = 0;
  for (std::size_t i = sectors.size(); i-- > 0;) {
    const int p = std::clamp(
        static_cast<int>(std::floor((sectors[i].power_dbm - b.power_min_dbm) / kPowerStepDb)), 0,
        power_levels - 1);
    const int t = std::clamp(static_cast<int>(std::lround(sectors[i].tilt_deg - b.tilt_min_deg)), 0,
                             tilt_levels - 1);
    key = key * static_cast<std::uint64_t>(power_levels * tilt_levels) +
          static_cast<std::uint64_t>(p * tilt_levels + t);
  }
  return key;
}

class NetworkEnv {
 public:
  explicit NetworkEnv(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    rebuild_agents();
  }

  const Scenario& scenario() const { return scenario_; }
  std::size_t num_agents() const { return state_.gnb_ids.size(); }
  std::size_t observation_size() const { return 2 * kSectorsPerGnb; }
  std::size_t action_count() const { return action_space_size(kSectorsPerGnb); }
  int episode_length() const { return scenario_.episode.length; }
  int step_in_episode() const { return step_; }
  const EnvState& state() const { return state_; }
  std::span<const User> users() const { return users_; }
  const AssociationOutcome& last_outcome() const { return outcome_; }
  const Eligibility& last_eligibility() const { return eligibility_; }

  /// Switches the listed gNBs off; takes effect at the next reset.
  void set_outage(std::span<const std::size_t> gnb_ids) {
    Scenario s = scenario_;
    std::fill(s.active.begin(), s.active.end(), std::uint8_t{1});
    scenario_ = apply_outage(s, gnb_ids);
    rebuild_agents();
  }

  /// New episode: users (if configured to) and demands re-drawn from
  /// `episode_seed`, every sector back at the initial power and tilt.
  const EnvState& reset(std::uint64_t episode_seed) {
    rebuild_agents();
    episode_seed_ = episode_seed;
    users_ = scenario_.user_drop.redraw_per_episode ? draw_users(scenario_.user_drop, episode_seed)
                                                    : scenario_.users;
    geometry_ = compute_link_geometry(scenario_, users_);
    for (auto& g : state_.controls)
      g.fill({scenario_.episode.initial_power_dbm, scenario_.episode.initial_tilt_deg});
    step_ = 0;
    evaluate();
    return state_;
  }

  /// Restores a mid-episode position; used by checkpoint resume.
  void restore(std::uint64_t episode_seed, int step, const EnvState& state) {
    reset(episode_seed);
    if (state.gnb_ids != state_.gnb_ids)
      throw std::invalid_argument("NetworkEnv::restore: active gNB set differs");
    state_.controls = state.controls;
    step_ = step;
    evaluate();
  }

  std::uint64_t episode_seed() const { return episode_seed_; }

  std::vector<double> observation(std::size_t agent) const { return state_.normalized(agent); }
  std::uint64_t state_key(std::size_t agent) const {
    return discretize_controls(state_.controls.at(agent), state_.bounds);
  }

  /// Applies one action per active gNB, clamps to the power/tilt box and
  /// re-evaluates association and reward.
  StepResult step(std::span<const ActionIndex> actions) {
    if (actions.size() != num_agents())
      throw std::invalid_argument("NetworkEnv::step: expected one action per active gNB");
    const auto& b = scenario_.bounds;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const auto deltas = decode_action(actions[a], kSectorsPerGnb);
      for (std::size_t i = 0; i < kSectorsPerGnb; ++i) {
        auto& c = state_.controls[a][i];
        c.power_dbm = b.clamp_power(c.power_dbm + deltas[i].power_db);
        c.tilt_deg = b.clamp_tilt(c.tilt_deg + deltas[i].tilt_deg);
      }
    }
    ++step_;
    StepResult r;
    r.metrics = evaluate();
    r.reward = r.metrics.reward;
    r.terminal = step_ >= scenario_.episode.length;
    return r;
  }

  /// Metrics of the current controls without acting.
  const StepMetrics& current_metrics() const { return metrics_; }

  /// Flat per-sector controls; inactive sectors keep their scenario setting.
  std::vector<SectorControl> sector_controls() const {
    auto c = controls_from(scenario_);
    for (std::size_t a = 0; a < state_.gnb_ids.size(); ++a)
      for (std::size_t i = 0; i < kSectorsPerGnb; ++i)
        c[state_.gnb_ids[a] * kSectorsPerGnb + i] = state_.controls[a][i];
    return c;
  }

 private:
  void rebuild_agents() {
    state_.gnb_ids.clear();
    for (std::size_t g = 0; g < scenario_.gnbs.size(); ++g)
      if (scenario_.active[g]) state_.gnb_ids.push_back(g);
    state_.controls.assign(state_.gnb_ids.size(), {});
    state_.bounds = scenario_.bounds;
  }

  const StepMetrics& evaluate() {
    const auto controls = sector_controls();
    eligibility_ = eligibility(scenario_, users_, controls, geometry_);
    outcome_ = associate(eligibility_, scenario_.capacity.min_served, scenario_.penalty_lambda,
                         scenario_.association);
    metrics_ = {};
    metrics_.objective = outcome_.objective;
    metrics_.feasible = outcome_.meets_min_served;
    metrics_.reward = outcome_.meets_min_served ? outcome_.objective : 0.0;
    metrics_.served = outcome_.served_count;
    metrics_.leo_served = outcome_.leo_served_count;
    const std::size_t ns = scenario_.sector_count();
    for (std::size_t u = 0; u < users_.size(); ++u) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ns; ++j)
        if (eligibility_.server_active[j]) best = std::max(best, eligibility_.links(u, j).rsrp_dbm);
      ++metrics_.rsrp_categories[static_cast<std::size_t>(categorize_rsrp(best))];
    }
    return metrics_;
  }

  Scenario scenario_;
  EnvState state_;
  std::vector<User> users_;
  LinkGeometry geometry_;
  Eligibility eligibility_;
  AssociationOutcome outcome_;
  StepMetrics metrics_;
  std::uint64_t episode_seed_ = 0;
  int step_ = 0;
};

}  // namespace istn
