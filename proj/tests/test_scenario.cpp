// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "istn/config.hpp"
#include "istn/scenario.hpp"
#include "support.hpp"

using namespace istn;

TEST(Layout, SiteCounts) {
  EXPECT_EQ(build_hex_layout(0, 500.0).size(), 1u);
  EXPECT_EQ(build_hex_layout(1, 500.0).size(), 7u);
  EXPECT_EQ(build_hex_layout(2, 500.0).size(), 19u);
  EXPECT_THROW(build_hex_layout(-1, 500.0), std::invalid_argument);
  EXPECT_THROW(build_hex_layout(1, 0.0), std::invalid_argument);
}

TEST(Layout, OrderingAndSpacing) {
  const auto s = build_hex_layout(2, 500.0, 10.0);
  EXPECT_DOUBLE_EQ(s[0].x, 0.0);
  EXPECT_DOUBLE_EQ(s[0].y, 0.0);
  EXPECT_NEAR(s[1].x, 500.0, 1e-9);  // ring 1 starts east
  EXPECT_NEAR(s[1].y, 0.0, 1e-9);
  EXPECT_GT(s[2].y, 0.0);  // counter-clockwise
  EXPECT_NEAR(s[7].x, 1000.0, 1e-9);
  for (std::size_t i = 1; i < 7; ++i) EXPECT_NEAR(std::hypot(s[i].x, s[i].y), 500.0, 1e-9);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_DOUBLE_EQ(s[i].altitude, 10.0);
    for (std::size_t j = i + 1; j < s.size(); ++j)
      EXPECT_GE(std::hypot(s[i].x - s[j].x, s[i].y - s[j].y), 500.0 - 1e-6);
  }
  EXPECT_EQ(build_hex_layout(2, 500.0), s);
}

TEST(UserDrop, Basics) {
  Rng rng(1);
  Region r{-100, 300, 0, 50};
  EXPECT_TRUE(drop_users(0, r, 1.5, rng).empty());
  Rng a(42), b(42);
  const auto ua = drop_users(1000, r, 1.5, a);
  EXPECT_EQ(ua, drop_users(1000, r, 1.5, b));
  for (const auto& p : ua) {
    EXPECT_GE(p.x, r.x_min);
    EXPECT_LT(p.x, r.x_max);
    EXPECT_DOUBLE_EQ(p.altitude, 1.5);
  }
}

TEST(UserDrop, UniformMean) {
  Rng rng(7);
  Region r{-1000, 3000, -500, 500};
  const auto u = drop_users(100'000, r, 1.5, rng);
  double mx = 0.0;
  for (const auto& p : u) mx += p.x;
  mx /= u.size();
  EXPECT_NEAR(mx, r.center_x(), 0.01 * (r.x_max - r.x_min));
}

TEST(Demands, Sampling) {
  Rng rng(3);
  for (double d : sample_demands(50, 1.0, 1.0, rng)) EXPECT_EQ(d, 1.0);
  const auto d = sample_demands(100'000, 0.5, 2.0, rng);
  double m = 0.0;
  for (double x : d) {
    EXPECT_GE(x, 0.5);
    EXPECT_LE(x, 2.0);
    m += x;
  }
  EXPECT_NEAR(m / d.size(), 1.25, 0.0125);
  EXPECT_THROW(sample_demands(1, 2.0, 1.0, rng), std::invalid_argument);
}

TEST(Scenario, DefaultsAndOutage) {
  ScenarioParams p;
  const Scenario s = make_scenario(p, 1);
  EXPECT_EQ(s.gnbs.size(), 19u);
  EXPECT_EQ(s.leos.size(), 5u);
  EXPECT_EQ(s.users.size(), 1000u);
  EXPECT_EQ(s.capacity.min_served, 600);
  for (const auto& g : s.gnbs) {
    EXPECT_DOUBLE_EQ(g.sectors[0].boresight_deg, 0.0);
    EXPECT_DOUBLE_EQ(g.sectors[1].boresight_deg, 120.0);
    EXPECT_DOUBLE_EQ(g.sectors[2].boresight_deg, -120.0);
  }

  const Scenario small = test::small_outage_scenario();
  EXPECT_EQ(small.active_gnb_count(), 6u);
  const std::size_t none[] = {0};
  EXPECT_EQ(apply_outage(small, none), small);  // idempotent
  EXPECT_EQ(apply_outage(s, std::span<const std::size_t>{}).active_gnb_count(), 19u);
  const std::size_t bad[] = {19};
  EXPECT_THROW(apply_outage(s, bad), std::out_of_range);
}

TEST(Scenario, ValidationRejectsBrokenInvariants) {
  Scenario s = test::small_outage_scenario();
  auto broken = s;
  broken.active.pop_back();
  EXPECT_THROW(broken.validate(), std::invalid_argument);
  broken = s;
  broken.gnbs[1].sectors[0].tx_power_dbm = 40.0;
  EXPECT_THROW(broken.validate(), std::invalid_argument);
  broken = s;
  broken.users[0].demand = 10.0;
  EXPECT_THROW(broken.validate(), std::invalid_argument);
  broken = s;
  broken.capacity.min_served = 100'000;
  EXPECT_THROW(broken.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------- config

TEST(Config, EmptyFileGivesDefaults) {
  const auto cfg = parse_config_string("");
  EXPECT_EQ(cfg.scenario, make_scenario(ScenarioParams{}, 1));
  EXPECT_EQ(cfg.train, TrainConfig{});
}

TEST(Config, RoundTripIsBitExact) {
  auto cfg = parse_config_string(R"(
seed: 99
layout: {rings: 1, isd_m: 733.3}
outage: [0, 3]
user_drop: {count: 37, demand_min: 0.1, demand_max: 2.9}
leo_fleet: {count: 3, tx_power_dbm: 41.7}
radio: {noise_figure_db: 5.5, rssi_mode: signal_only}
training: {agent: ql, optimizer: adam, hidden: [7, 5], reward_scale: 0.0123}
)");
  EXPECT_EQ(cfg.scenario.active, (std::vector<std::uint8_t>{0, 1, 1, 0, 1, 1, 1}));
  EXPECT_EQ(cfg.scenario.capacity.min_served, 23);
  EXPECT_EQ(cfg.scenario.radio.rssi_mode, RssiMode::SignalOnly);
  EXPECT_EQ(cfg.train.agent, AgentKind::QLearning);
  const auto text = to_yaml(cfg);
  const auto back = parse_config_string(text);
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(to_yaml(back), text);
}

TEST(Config, RoundTripRandomScenarios) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    ScenarioParams p;
    p.layout.rings = i % 3;
    p.layout.isd_m = 200.0 + 1000.0 * u(rng);
    p.leo_count = i % 4;
    p.user_drop.count = 5 + i;
    p.user_drop.demand_max = 0.5 + 3.0 * u(rng);
    ExperimentConfig cfg{make_scenario(p, 1000 + i), TrainConfig{}};
    cfg.scenario.penalty_lambda = u(rng);
    cfg.train.learning_rate = u(rng) * 1e-2 + 1e-9;
    const auto back = parse_config_string(to_yaml(cfg));
    EXPECT_EQ(back, cfg) << i;
  }
}

TEST(Config, ExplicitListsOverrideGenerators) {
  const auto cfg = parse_config_string(R"(
gnbs:
  - position: {x: 0, y: 0, altitude: 12}
    sectors:
      - {tx_power_dbm: 20, elec_tilt_deg: 3, boresight_deg: 0}
      - {tx_power_dbm: 21, elec_tilt_deg: 4, boresight_deg: 120}
      - {tx_power_dbm: 22, elec_tilt_deg: 5, boresight_deg: -120}
leos:
  - {altitude_m: 600000, nadir: {x: 1000, y: 0}, tx_power_dbm: 45}
users:
  - {x: 10, y: 20, demand: 1.0}
  - {x: -10, y: 5, demand: 0.7}
capacity: {min_served: 1}
)");
  const auto& s = cfg.scenario;
  ASSERT_EQ(s.gnbs.size(), 1u);
  EXPECT_DOUBLE_EQ(s.gnbs[0].position.altitude, 12.0);
  EXPECT_DOUBLE_EQ(s.gnbs[0].sectors[2].tx_power_dbm, 22.0);
  ASSERT_EQ(s.leos.size(), 1u);
  EXPECT_DOUBLE_EQ(s.leos[0].geometry.altitude_m, 600000.0);
  ASSERT_EQ(s.users.size(), 2u);
  EXPECT_DOUBLE_EQ(s.users[1].position.altitude, 1.5);
  EXPECT_EQ(s.capacity.min_served, 1);
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config_string("seed: 1\nlayout:\n  rings: 1\n  isd: 500\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("layout.isd"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  }
}

TEST(Config, MalformedValuesAreErrors) {
  EXPECT_THROW(parse_config_string("layout: {rings: many}"), ConfigError);
  EXPECT_THROW(parse_config_string("training: {agent: ppo}"), ConfigError);
  EXPECT_THROW(parse_config_string("outage: [42]"), ConfigError);
  EXPECT_THROW(parse_config_string("bounds: {power_max_dbm: -1}"), ConfigError);
  EXPECT_THROW(parse_config_string("radio: {noise_figure_db: 7, noise_power_dbm: -90}"), ConfigError);
  EXPECT_THROW(parse_config_string("layout: [1, 2]"), ConfigError);
  EXPECT_THROW(parse_config_string("layout: {rings: -4}"), ConfigError);
  EXPECT_THROW(parse_config_string("user_drop: {demand_min: 3, demand_max: 1}"), ConfigError);
  EXPECT_THROW(parse_config_string("seed: [unclosed"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/istn.yaml"), ConfigError);
}

TEST(Config, ShippedFilesLoad) {
  for (const char* name : {"default.yaml", "acceptance.yaml"}) {
    const auto cfg = load_config(std::string(ISTN_SOURCE_DIR) + "/configs/" + name);
    EXPECT_NO_THROW(cfg.scenario.validate()) << name;
  }
  EXPECT_EQ(load_config(std::string(ISTN_SOURCE_DIR) + "/configs/default.yaml"),
            parse_config_string(""));
}

TEST(Config, SaveAndLoadFile) {
  const auto dir = test::scratch_dir("config_file");
  const auto cfg = parse_config_string("layout: {rings: 1}\nuser_drop: {count: 10}");
  save_config(cfg, (dir / "c.yaml").string());
  EXPECT_EQ(load_config((dir / "c.yaml").string()), cfg);
}
