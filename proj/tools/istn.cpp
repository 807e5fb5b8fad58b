// SPDX-License-Identifier: Apache-2.0
//
// istn run       train over seeds and write metrics.csv, ci.csv, summary.json
// istn evaluate  greedy rollouts of a saved checkpoint
// istn config    print the fully resolved configuration
//
// Log verbosity: ISTN_LOG_LEVEL=trace|debug|info|warn|error|off (default info).

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include "istn/config.hpp"
#include "istn/run.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kBadConfig = 2, kIo = 3, kBadCheckpoint = 4 };

void setup_logging() {
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  if (const char* lvl = std::getenv("ISTN_LOG_LEVEL")) {
    const auto l = spdlog::level::from_str(lvl);
    spdlog::set_level(l);
  }
}

istn::ExperimentConfig load(const std::string& path) {
  if (path.empty()) return istn::parse_config_string("");
  return istn::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Power and downtilt control for integrated satellite-terrestrial networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, agent_name, checkpoint;
  std::vector<std::uint64_t> seeds{1};
  std::size_t iterations = 0, episodes = 1, workers = 0;
  bool no_checkpoints = false;
  const std::map<std::string, istn::AgentKind> agents{{"dqn", istn::AgentKind::Dqn},
                                                      {"ql", istn::AgentKind::QLearning}};

  auto* run = app.add_subcommand("run", "train over one or more seeds");
  run->add_option("--config", config_path, "experiment YAML file")->check(CLI::ExistingFile);
  auto* run_agent =
      run->add_option("--agent", agent_name, "dqn or ql (default: training.agent)")
          ->check(CLI::IsMember({"dqn", "ql"}));
  run->add_option("--seeds", seeds, "seed list, e.g. 1,2,3")->delimiter(',');
  auto* iter_opt = run->add_option("--iterations", iterations, "override training.total_iterations")
                       ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--workers", workers, "parallel seeds (0 = hardware threads)");
  run->add_flag("--no-checkpoints", no_checkpoints, "skip writing per-seed checkpoints");

  auto* eval = app.add_subcommand("evaluate", "greedy rollouts of a checkpoint");
  eval->add_option("--config", config_path, "experiment YAML file")->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  auto* eval_agent =
      eval->add_option("--agent", agent_name, "dqn or ql (default: training.agent)")
          ->check(CLI::IsMember({"dqn", "ql"}));
  eval->add_option("--episodes", episodes, "number of episodes");
  eval->add_option("--out", out_dir, "output directory")->required();

  auto* show = app.add_subcommand("config", "print the resolved configuration as YAML");
  show->add_option("--config", config_path, "experiment YAML file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  istn::ExperimentConfig cfg;
  try {
    cfg = load(config_path);
    if (run_agent->count() || eval_agent->count()) cfg.train.agent = agents.at(agent_name);
    agent_name = std::string(istn::to_string(cfg.train.agent));
  } catch (const istn::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kBadConfig;
  }

  try {
    if (show->parsed()) {
      std::cout << istn::to_yaml(cfg);
      return kOk;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
      spdlog::error("cannot create output directory '{}'", out_dir);
      return kIo;
    }
    if (run->parsed()) {
      istn::RunOptions opt;
      opt.seeds = seeds;
      if (iter_opt->count()) opt.iterations = iterations;
      opt.workers = workers;
      if (!no_checkpoints) opt.checkpoint_dir = out_dir;
      spdlog::info("training {} on {} seed(s), {} iterations each", agent_name, seeds.size(),
                   opt.iterations.value_or(cfg.train.total_iterations));
      const auto rep = istn::run_seeds(cfg, opt);
      istn::write_report(rep, out_dir);
      spdlog::info("mean reward {:.3f}, final 10% {:.3f}, served {:.3f}, LEO-served {:.3f}",
                   rep.summary.mean_reward, rep.summary.final_mean_reward,
                   rep.summary.served_fraction, rep.summary.leo_served_fraction);
    } else {
      const auto rep = istn::evaluate_checkpoint(checkpoint, cfg, episodes, cfg.train.agent);
      istn::write_report(rep, out_dir);
      spdlog::info("evaluated {} episode(s): mean reward {:.3f}", episodes, rep.summary.mean_reward);
    }
    spdlog::debug("wrote {}", out_dir);
  } catch (const istn::CheckpointError& e) {
    spdlog::error("{}", e.what());
    return kBadCheckpoint;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kOk;
}
