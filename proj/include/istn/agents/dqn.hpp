// SPDX-License-Identifier: Apache-2.0
//
// Deep Q-learning pieces: TD targets from a frozen target network,
// epsilon-greedy selection, and the agent that ties them to replay.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "istn/agents/qnetwork.hpp"
#include "istn/agents/replay.hpp"

namespace istn {

/// y_i = r_i + gamma * max_a' Q_target(s'_i, a'), or r_i on terminal records.
inline std::vector<double> td_targets(const QNetwork& target, std::span<const Transition> batch,
                                      double gamma) {
  std::vector<double> y(batch.size());
  Eigen::MatrixXd next(static_cast<Eigen::Index>(target.input_size()),
                       static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    next.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(batch[i].next_state.data(),
                                          static_cast<Eigen::Index>(batch[i].next_state.size()));
  const Eigen::MatrixXd q_next = gamma != 0.0 ? target.forward_batch(next) : Eigen::MatrixXd();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch[i].reward;
    if (!batch[i].terminal && gamma != 0.0)
      y[i] += gamma * q_next.col(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return y;
}

/// One gradient step of the online network on a batch; returns the pre-update loss.
inline double td_train_step(QNetwork& online, const QNetwork& target,
                            std::span<const Transition> batch, double gamma, Optimizer& opt) {
  if (batch.empty()) throw std::invalid_argument("td_train_step: empty batch");
  const auto y = td_targets(target, batch, gamma);
  Eigen::MatrixXd states(static_cast<Eigen::Index>(online.input_size()),
                         static_cast<Eigen::Index>(batch.size()));
  std::vector<std::size_t> actions(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].state.size() != online.input_size())
      throw std::invalid_argument("td_train_step: state width mismatch");
    states.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(
        batch[i].state.data(), static_cast<Eigen::Index>(batch[i].state.size()));
    actions[i] = batch[i].action;
  }
  NetworkParams grad;
  const double loss = online.loss(states, actions, y, &grad);
  opt.apply(online, grad);
  return loss;
}

inline double td_train_step(QNetwork& online, const QNetwork& target,
                            std::span<const Transition> batch, double gamma, double learning_rate) {
  Optimizer sgd(OptimizerKind::Sgd, learning_rate);
  return td_train_step(online, target, batch, gamma, sgd);
}

/// Uniform random action with probability epsilon, else the greedy one.
/// No random numbers are drawn when epsilon is zero.
template <class RngT>
std::size_t select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                          RngT& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, net.output_size() - 1);
      return pick(rng);
    }
  }
  return argmax_lowest(net.forward(state));
}

struct DqnSettings {
  std::vector<std::size_t> hidden{128, 128};
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  std::size_t batch_size = 32;
  double gamma = 0.95;
  std::size_t replay_capacity = 10'000;
  std::size_t learning_starts = 500;
  std::size_t target_sync_period = 200;
};

class DqnAgent {
 public:
  template <class RngT>
  DqnAgent(std::size_t observation_size, std::size_t action_count, const DqnSettings& cfg,
           RngT& init_rng)
      : cfg_(cfg),
        online_(layer_sizes(observation_size, action_count, cfg.hidden), init_rng),
        target_(online_),
        opt_(cfg.optimizer, cfg.learning_rate),
        memory_(cfg.replay_capacity) {}

  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayMemory& memory() const { return memory_; }
  const Optimizer& optimizer() const { return opt_; }
  std::uint64_t train_steps() const { return train_steps_; }
  const DqnSettings& settings() const { return cfg_; }

  template <class RngT>
  std::size_t act(std::span<const double> state, double epsilon, RngT& rng) const {
    return select_action(online_, state, epsilon, rng);
  }

  void remember(Transition t) { memory_.push(std::move(t)); }

  /// One TD update once enough experience is stored; syncs the target every
  /// `target_sync_period` updates.
  template <class RngT>
  std::optional<double> learn(RngT& rng) {
    if (memory_.size() < std::max(cfg_.learning_starts, cfg_.batch_size)) return std::nullopt;
    const auto batch = memory_.sample(cfg_.batch_size, rng);
    const double loss = td_train_step(online_, target_, batch, cfg_.gamma, opt_);
    ++train_steps_;
    if (cfg_.target_sync_period > 0 && train_steps_ % cfg_.target_sync_period == 0) sync_target();
    return loss;
  }

  void sync_target() { target_ = online_; }

  void restore(QNetwork online, QNetwork target, Optimizer opt, ReplayMemory memory,
               std::uint64_t train_steps) {
    if (online.sizes() != online_.sizes() || target.sizes() != online_.sizes())
      throw std::invalid_argument("DqnAgent::restore: network shape mismatch");
    online_ = std::move(online);
    target_ = std::move(target);
    opt_ = std::move(opt);
    memory_ = std::move(memory);
    train_steps_ = train_steps;
  }

 private:
  static std::vector<std::size_t> layer_sizes(std::size_t in, std::size_t out,
                                              const std::vector<std::size_t>& hidden) {
    std::vector<std::size_t> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
  }

  DqnSettings cfg_;
  QNetwork online_;
  QNetwork target_;
  Optimizer opt_;
  ReplayMemory memory_;
  std::uint64_t train_steps_ = 0;
};

}  // namespace istn
