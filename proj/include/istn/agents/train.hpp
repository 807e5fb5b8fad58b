// SPDX-License-Identifier: Apache-2.0
//
// The interaction loop shared by the DQN and tabular learners. Every agent
// of a multi-agent environment acts from one shared learner (network or
// table) on its own observation, and every agent's transition carries the
// same global reward.

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/agents/dqn.hpp"
#include "istn/agents/qtable.hpp"
#include "istn/agents/serialize.hpp"
#include "istn/env.hpp"
#include "istn/random.hpp"

namespace istn {

enum class AgentKind : std::uint8_t { Dqn = 0, QLearning = 1 };

inline std::string_view to_string(AgentKind k) { return k == AgentKind::Dqn ? "dqn" : "ql"; }

struct TrainConfig {
  AgentKind agent = AgentKind::Dqn;
  std::size_t total_iterations = 20'000;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.01;
  std::size_t eps_decay_steps = 10'000;
  std::size_t target_sync_period = 200;
  std::size_t replay_capacity = 10'000;
  std::size_t learning_starts = 500;
  std::vector<std::size_t> hidden{128, 128};
  OptimizerKind optimizer = OptimizerKind::Sgd;
  double ql_alpha = 0.1;
  /// Multiplier applied to rewards before learning; logged rewards are unscaled.
  /// Unset means 1 / user count for the network environment.
  std::optional<double> reward_scale;

  DqnSettings dqn() const {
    return {hidden, learning_rate, optimizer, batch_size, gamma, replay_capacity, learning_starts,
            target_sync_period};
  }

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("TrainConfig: gamma must lie in (0, 1]");
    if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= eps_start))
      throw std::invalid_argument("TrainConfig: need 0 <= eps_end <= eps_start <= 1");
    if (eps_decay_steps == 0 || target_sync_period == 0 || replay_capacity == 0)
      throw std::invalid_argument("TrainConfig: decay, sync and replay sizes must be > 0");
    if (replay_capacity < batch_size)
      throw std::invalid_argument("TrainConfig: replay capacity below batch size");
    if (!(ql_alpha > 0.0 && ql_alpha <= 1.0)) throw std::invalid_argument("TrainConfig: ql_alpha must lie in (0, 1]");
    if (reward_scale && !(*reward_scale > 0.0))
      throw std::invalid_argument("TrainConfig: reward_scale must be > 0");
    for (auto h : hidden)
      if (h == 0) throw std::invalid_argument("TrainConfig: hidden layer of width 0");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Linear decay from eps_start to eps_end over eps_decay_steps, then flat.
inline double epsilon_at(std::size_t step, const TrainConfig& cfg) {
  if (step >= cfg.eps_decay_steps) return cfg.eps_end;
  const double f = static_cast<double>(step) / static_cast<double>(cfg.eps_decay_steps);
  return cfg.eps_start + f * (cfg.eps_end - cfg.eps_start);
}

template <class E>
concept Environment = requires(E& e, const E& ce, std::uint64_t seed,
                               std::span<const ActionIndex> actions, std::size_t agent) {
  { ce.num_agents() } -> std::convertible_to<std::size_t>;
  { ce.observation_size() } -> std::convertible_to<std::size_t>;
  { ce.action_count() } -> std::convertible_to<std::size_t>;
  e.reset(seed);
  { e.step(actions) } -> std::same_as<StepResult>;
  { ce.observation(agent) } -> std::convertible_to<std::vector<double>>;
  { ce.state_key(agent) } -> std::convertible_to<std::uint64_t>;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double reward = 0.0;
  double loss = 0.0;
  double epsilon = 0.0;
  bool terminal = false;
  StepMetrics metrics;
};

inline constexpr std::uint64_t kEpisodeStream = 1'000'000;
inline constexpr std::uint64_t kEvalStream = 2'000'000'000;

template <Environment Env>
class Trainer {
 public:
  Trainer(Env& env, TrainConfig cfg, std::uint64_t seed)
      : env_(env), cfg_(std::move(cfg)), seed_(seed), rng_(derive_seed(seed, 1)),
        table_(env.action_count()) {
    cfg_.validate();
    if (cfg_.agent == AgentKind::Dqn) {
      Rng init(derive_seed(seed, 2));
      dqn_.emplace(env.observation_size(), env.action_count(), cfg_.dqn(), init);
    }
  }

  const TrainConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t iteration() const { return iteration_; }
  std::size_t episode() const { return episode_; }
  const DqnAgent* dqn() const { return dqn_ ? &*dqn_ : nullptr; }
  const QTable& qtable() const { return table_; }
  double reward_scale() const { return cfg_.reward_scale.value_or(1.0); }

  std::uint64_t episode_seed(std::size_t episode) const {
    return derive_seed(seed_, kEpisodeStream + episode);
  }

  IterationRecord step() {
    if (need_reset_) {
      env_.reset(episode_seed(episode_));
      need_reset_ = false;
    }
    const std::size_t n = env_.num_agents();
    const double eps = epsilon_at(iteration_, cfg_);
    std::vector<std::vector<double>> obs(n);
    std::vector<std::uint64_t> keys(n);
    std::vector<ActionIndex> actions(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (dqn_) {
        obs[a] = env_.observation(a);
        actions[a] = dqn_->act(obs[a], eps, rng_);
      } else {
        keys[a] = env_.state_key(a);
        actions[a] = select_action(table_, keys[a], eps, rng_);
      }
    }
    const StepResult res = env_.step(actions);
    const double r = res.reward * reward_scale();

    IterationRecord rec;
    rec.iteration = iteration_;
    rec.reward = res.reward;
    rec.epsilon = eps;
    rec.terminal = res.terminal;
    rec.metrics = res.metrics;
    if (dqn_) {
      for (std::size_t a = 0; a < n; ++a)
        dqn_->remember({std::move(obs[a]), actions[a], r, env_.observation(a), res.terminal});
      rec.loss = dqn_->learn(rng_).value_or(0.0);
    } else {
      double sq = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const std::uint64_t next = env_.state_key(a);
        const double before = table_.value(keys[a], actions[a]);
        const double target =
            r + (res.terminal ? 0.0 : cfg_.gamma * table_.max_value(next));
        sq += (target - before) * (target - before);
        ql_update(table_, keys[a], actions[a], r, next, cfg_.ql_alpha, cfg_.gamma, res.terminal);
      }
      rec.loss = n ? sq / static_cast<double>(n) : 0.0;
    }
    if (res.terminal) {
      ++episode_;
      need_reset_ = true;
    }
    ++iteration_;
    return rec;
  }

  std::vector<IterationRecord> run(std::size_t iterations) {
    std::vector<IterationRecord> out;
    out.reserve(iterations);
    for (std::size_t i = 0; i < iterations; ++i) out.push_back(step());
    return out;
  }

  /// Greedy rollouts without learning; episodes drawn from a separate seed stream.
  std::vector<IterationRecord> evaluate(std::size_t episodes) {
    std::vector<IterationRecord> out;
    Rng unused(0);
    std::size_t it = 0;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
      env_.reset(derive_seed(seed_, kEvalStream + ep));
      for (bool done = false; !done;) {
        const std::size_t n = env_.num_agents();
        std::vector<ActionIndex> actions(n);
        for (std::size_t a = 0; a < n; ++a)
          actions[a] = dqn_ ? dqn_->act(env_.observation(a), 0.0, unused)
                            : select_action(table_, env_.state_key(a), 0.0, unused);
        const StepResult res = env_.step(actions);
        IterationRecord rec;
        rec.iteration = it++;
        rec.reward = res.reward;
        rec.terminal = res.terminal;
        rec.metrics = res.metrics;
        out.push_back(rec);
        done = res.terminal;
      }
    }
    need_reset_ = true;
    return out;
  }

  // ------------------------------------------------------------------------
  // Checkpointing: networks, optimiser moments, replay ring and cursor, the
  // tabular entries, RNG state, loop counters and (for environments that
  // expose it) the position inside the current episode.
  // ------------------------------------------------------------------------

  void save_checkpoint(std::ostream& os) const {
    BinaryWriter w;
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.agent));
    w.put<std::uint64_t>(env_.observation_size());
    w.put<std::uint64_t>(env_.action_count());
    w.put<std::uint64_t>(seed_);
    w.put<std::uint64_t>(iteration_);
    w.put<std::uint64_t>(episode_);
    w.put_bool(need_reset_);
    std::ostringstream rs;
    rs << rng_;
    w.put_string(rs.str());
    if (dqn_) {
      const auto& sizes = dqn_->online().sizes();
      w.put<std::uint64_t>(sizes.size());
      for (auto s : sizes) w.put<std::uint64_t>(s);
      put_layers(w, dqn_->online().layers());
      put_layers(w, dqn_->target().layers());
      const auto& opt = dqn_->optimizer();
      w.put<std::uint8_t>(static_cast<std::uint8_t>(opt.kind()));
      w.put(opt.learning_rate());
      w.put<std::uint64_t>(opt.steps());
      w.put_bool(!opt.first_moment().layers.empty());
      if (!opt.first_moment().layers.empty()) {
        put_layers(w, opt.first_moment().layers);
        put_layers(w, opt.second_moment().layers);
      }
      w.put<std::uint64_t>(dqn_->train_steps());
      const auto& mem = dqn_->memory();
      w.put<std::uint64_t>(mem.capacity());
      w.put<std::uint64_t>(mem.cursor());
      w.put<std::uint64_t>(mem.slots().size());
      for (const auto& t : mem.slots()) {
        w.put_doubles(t.state);
        w.put<std::uint64_t>(t.action);
        w.put(t.reward);
        w.put_doubles(t.next_state);
        w.put_bool(t.terminal);
      }
    } else {
      const auto entries = table_.entries();
      w.put<std::uint64_t>(table_.action_count());
      w.put<std::uint64_t>(entries.size());
      for (const auto& [k, a, v] : entries) {
        w.put<std::uint64_t>(k);
        w.put<std::uint32_t>(a);
        w.put(v);
      }
    }
    if constexpr (requires(const Env& e) { e.state().controls; e.episode_seed(); e.step_in_episode(); }) {
      w.put_bool(true);
      w.put<std::uint64_t>(env_.episode_seed());
      w.put<std::int64_t>(env_.step_in_episode());
      const auto& st = env_.state();
      w.put<std::uint64_t>(st.gnb_ids.size());
      for (std::size_t a = 0; a < st.gnb_ids.size(); ++a) {
        w.put<std::uint64_t>(st.gnb_ids[a]);
        for (const auto& c : st.controls[a]) {
          w.put(c.power_dbm);
          w.put(c.tilt_deg);
        }
      }
    } else {
      w.put_bool(false);
    }
    write_framed(os, w.bytes());
  }

  /// Restores a checkpoint written by save_checkpoint with a compatible
  /// configuration; throws CheckpointError on corruption or shape mismatch.
  void load_checkpoint(std::istream& is) {
    BinaryReader r(read_framed(is));
    const auto kind = r.get<std::uint8_t>();
    if (kind != static_cast<std::uint8_t>(cfg_.agent))
      throw CheckpointError("checkpoint: agent kind differs from configuration");
    if (r.get<std::uint64_t>() != env_.observation_size() ||
        r.get<std::uint64_t>() != env_.action_count())
      throw CheckpointError("checkpoint: observation/action shape differs from configuration");
    seed_ = r.get<std::uint64_t>();
    iteration_ = r.get<std::uint64_t>();
    episode_ = r.get<std::uint64_t>();
    need_reset_ = r.get_bool();
    {
      std::istringstream rs(r.get_string());
      rs >> rng_;
      if (!rs) throw CheckpointError("checkpoint: bad RNG state");
    }
    if (dqn_) {
      std::vector<std::size_t> sizes(r.get<std::uint64_t>());
      for (auto& s : sizes) s = r.get<std::uint64_t>();
      if (sizes != dqn_->online().sizes())
        throw CheckpointError("checkpoint: network layer sizes differ from configuration");
      QNetwork online(get_layers(r, sizes.size() - 1));
      QNetwork target(get_layers(r, sizes.size() - 1));
      if (online.sizes() != sizes || target.sizes() != sizes)
        throw CheckpointError("checkpoint: inconsistent network shapes");
      const auto opt_kind = static_cast<OptimizerKind>(r.get<std::uint8_t>());
      const double lr = r.get<double>();
      Optimizer opt(opt_kind, lr);
      const auto steps = r.get<std::uint64_t>();
      NetworkParams m, v;
      if (r.get_bool()) {
        m.layers = get_layers(r, sizes.size() - 1);
        v.layers = get_layers(r, sizes.size() - 1);
      }
      opt.restore(steps, std::move(m), std::move(v));
      const auto train_steps = r.get<std::uint64_t>();
      const auto capacity = r.get<std::uint64_t>();
      const auto cursor = r.get<std::uint64_t>();
      const auto count = r.get<std::uint64_t>();
      if (count > capacity || count > r.remaining()) throw CheckpointError("checkpoint: bad replay size");
      std::vector<Transition> slots(count);
      for (auto& t : slots) {
        t.state = r.get_doubles();
        t.action = r.get<std::uint64_t>();
        t.reward = r.get<double>();
        t.next_state = r.get_doubles();
        t.terminal = r.get_bool();
      }
      try {
        dqn_->restore(std::move(online), std::move(target), std::move(opt),
                      ReplayMemory::restore(capacity, cursor, std::move(slots)), train_steps);
      } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
      }
    } else {
      const auto actions = r.get<std::uint64_t>();
      if (actions != env_.action_count()) throw CheckpointError("checkpoint: action count differs");
      QTable t(actions);
      const auto n = r.get<std::uint64_t>();
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto k = r.get<std::uint64_t>();
        const auto a = r.get<std::uint32_t>();
        const auto val = r.get<double>();
        if (a >= actions) throw CheckpointError("checkpoint: action out of range");
        t.set(k, a, val);
      }
      table_ = std::move(t);
    }
    if (r.get_bool()) {
      if constexpr (requires(Env& e, const EnvState& s) { e.restore(std::uint64_t{}, 0, s); }) {
        const auto ep_seed = r.get<std::uint64_t>();
        const auto step = r.get<std::int64_t>();
        EnvState st;
        st.gnb_ids.resize(r.get<std::uint64_t>());
        st.controls.resize(st.gnb_ids.size());
        for (std::size_t a = 0; a < st.gnb_ids.size(); ++a) {
          st.gnb_ids[a] = r.get<std::uint64_t>();
          for (auto& c : st.controls[a]) {
            c.power_dbm = r.get<double>();
            c.tilt_deg = r.get<double>();
          }
        }
        st.bounds = env_.state().bounds;
        if (!need_reset_) {
          try {
            env_.restore(ep_seed, static_cast<int>(step), st);
          } catch (const std::invalid_argument& e) {
            throw CheckpointError(std::string("checkpoint: ") + e.what());
          }
        }
      } else {
        throw CheckpointError("checkpoint: environment position not restorable here");
      }
    }
    if (r.remaining() != 0) throw CheckpointError("checkpoint: trailing bytes");
  }

 private:
  static void put_layers(BinaryWriter& w, const std::vector<DenseLayer>& layers) {
    w.put<std::uint64_t>(layers.size());
    for (const auto& l : layers) {
      w.put_matrix(l.weights);
      w.put_vector(l.bias);
    }
  }
  static std::vector<DenseLayer> get_layers(BinaryReader& r, std::size_t expected) {
    const auto n = r.get<std::uint64_t>();
    if (n != expected) throw CheckpointError("checkpoint: layer count mismatch");
    std::vector<DenseLayer> out(n);
    for (auto& l : out) {
      l.weights = r.get_matrix();
      l.bias = r.get_vector();
    }
    try {
      QNetwork check(out);
    } catch (const std::invalid_argument&) {
      throw CheckpointError("checkpoint: inconsistent layer shapes");
    }
    return out;
  }

  Env& env_;
  TrainConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  std::optional<DqnAgent> dqn_;
  QTable table_;
  std::size_t iteration_ = 0;
  std::size_t episode_ = 0;
  bool need_reset_ = true;
};

/// Runs `cfg.total_iterations` iterations of the chosen learner from scratch.
template <Environment Env>
std::vector<IterationRecord> train(Env& env, const TrainConfig& cfg, std::uint64_t seed) {
  Trainer<Env> t(env, cfg, seed);
  return t.run(cfg.total_iterations);
}

}  // namespace istn
