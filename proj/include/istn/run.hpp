// SPDX-License-Identifier: Apache-2.0
//
// Multi-seed training and checkpoint evaluation on the network environment,
// plus writing the report files to an output directory.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "istn/agents/train.hpp"
#include "istn/config.hpp"
#include "istn/env.hpp"
#include "istn/report.hpp"

namespace istn {

struct RunOptions {
  std::vector<std::uint64_t> seeds{1};
  std::optional<std::size_t> iterations;  ///< overrides training.total_iterations
  std::size_t workers = 0;                ///< 0 = hardware concurrency
  std::string checkpoint_dir;             ///< empty = no checkpoints
  std::size_t smoothing_window = 50;
};

/// Learners see rewards divided by the user count unless a scale is configured.
inline TrainConfig effective_train_config(const ExperimentConfig& cfg) {
  TrainConfig t = cfg.train;
  if (!t.reward_scale) t.reward_scale = 1.0 / std::max(1, cfg.scenario.user_drop.count);
  return t;
}

inline std::string checkpoint_path(const std::string& dir, std::uint64_t seed) {
  return (std::filesystem::path(dir) / ("checkpoint_seed" + std::to_string(seed) + ".bin")).string();
}

/// Trains one learner per seed on a bounded pool of threads. Results are
/// placed by seed position, so the report never depends on scheduling.
inline RunReport run_seeds(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (opt.seeds.empty()) throw std::invalid_argument("run_seeds: need at least one seed");
  TrainConfig tc = effective_train_config(cfg);
  if (opt.iterations) tc.total_iterations = *opt.iterations;
  tc.validate();

  std::vector<SeedSeries> out(opt.seeds.size());
  std::vector<std::exception_ptr> errors(opt.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < opt.seeds.size();) {
      try {
        NetworkEnv env(cfg.scenario);
        Trainer<NetworkEnv> trainer(env, tc, opt.seeds[k]);
        out[k] = {opt.seeds[k], trainer.run(tc.total_iterations)};
        if (!opt.checkpoint_dir.empty()) {
          std::ofstream os(checkpoint_path(opt.checkpoint_dir, opt.seeds[k]), std::ios::binary);
          if (!os) throw std::runtime_error("cannot write checkpoint in " + opt.checkpoint_dir);
          trainer.save_checkpoint(os);
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t n = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, opt.seeds.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return build_report(std::string(to_string(tc.agent)), std::move(out), cfg.scenario.user_drop.count,
                      opt.smoothing_window);
}

/// Greedy rollouts of a saved learner. The agent kind and seed come from the
/// checkpoint; shapes must agree with `cfg`.
inline RunReport evaluate_checkpoint(const std::string& path, const ExperimentConfig& cfg,
                                     std::size_t episodes, AgentKind agent) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint '" + path + "'");
  TrainConfig tc = effective_train_config(cfg);
  tc.agent = agent;
  NetworkEnv env(cfg.scenario);
  Trainer<NetworkEnv> trainer(env, tc, 0);
  trainer.load_checkpoint(is);
  std::vector<SeedSeries> series{{trainer.seed(), trainer.evaluate(episodes)}};
  return build_report(std::string(to_string(agent)), std::move(series), cfg.scenario.user_drop.count);
}

/// metrics.csv, ci.csv, episodes.csv and summary.json under `dir` (created if missing).
inline void write_report(const RunReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory '" + dir + "'");
  auto open = [&](const char* name) {
    std::ofstream os(fs::path(dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + (fs::path(dir) / name).string() + "'");
    return os;
  };
  {
    auto os = open("metrics.csv");
    write_metrics_csv(os, rep);
    if (!os) throw std::runtime_error("write failed: metrics.csv");
  }
  {
    auto os = open("ci.csv");
    write_ci_csv(os, rep);
  }
  {
    auto os = open("episodes.csv");
    write_episodes_csv(os, rep);
  }
  {
    auto os = open("summary.json");
    os << summary_json(rep).dump(2) << '\n';
  }
}

}  // namespace istn
