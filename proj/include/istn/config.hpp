// SPDX-License-Identifier: Apache-2.0
//
// YAML experiment files: a scenario plus the training settings. Loading is
// strict (unknown keys and malformed values are reported with their line),
// saving writes every field explicitly so that load(save(x)) == x bit for bit.

#pragma once

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/agents/train.hpp"
#include "istn/scenario.hpp"

namespace istn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Scenario scenario;
  TrainConfig train;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

/// A mapping whose keys are tracked so leftovers can be reported.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(path_ + ": expected a mapping" + where(node_));
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }

  Section sub(const std::string& key) { return {raw(key), child(key)}; }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = as<T>(raw(key), child(key));
  }

  template <class T>
  static T as(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path + ": expected a scalar" + where(n));
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(path + ": cannot parse '" + n.Scalar() + "'" + where(n));
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!seen_.count(key))
        throw ConfigError("unknown key '" + child(key) + "'" + where(it->first));
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline double as_double(const YAML::Node& n, const std::string& path) {
  return Section::as<double>(n, path);
}

inline GroundPosition read_position(Section s) {
  GroundPosition p;
  s.get("x", p.x);
  s.get("y", p.y);
  s.get("altitude", p.altitude);
  s.finish();
  return p;
}

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline std::string agent_name(AgentKind k) { return std::string(to_string(k)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace detail {

inline ExperimentConfig parse_node(const YAML::Node& root) {
  using detail::Section;
  ExperimentConfig cfg;
  Scenario& s = cfg.scenario;
  if (!root || root.IsNull()) {
    ScenarioParams p;
    s = make_scenario(p, 1);
    return cfg;
  }
  Section top(root, "");
  top.get("seed", s.seed);

  if (top.has("layout")) {
    auto l = top.sub("layout");
    l.get("rings", s.layout.rings);
    l.get("isd_m", s.layout.isd_m);
    l.get("gnb_height_m", s.layout.gnb_height_m);
    l.finish();
  }
  if (top.has("antenna")) {
    auto a = top.sub("antenna");
    a.get("max_gain_dbi", s.pattern.max_gain_dbi);
    a.get("front_back_db", s.pattern.front_back_db);
    a.get("sidelobe_db", s.pattern.sidelobe_db);
    a.get("azimuth_hpbw_deg", s.pattern.azimuth_hpbw_deg);
    a.get("elevation_hpbw_deg", s.pattern.elevation_hpbw_deg);
    a.finish();
  }
  if (top.has("radio")) {
    auto r = top.sub("radio");
    auto& c = s.radio;
    r.get("carrier_freq_tn_ghz", c.carrier_freq_tn_ghz);
    r.get("carrier_freq_ntn_ghz", c.carrier_freq_ntn_ghz);
    r.get("pathloss_exponent", c.pathloss_exponent);
    r.get("resource_blocks", c.resource_blocks);
    r.get("residual_interference", c.residual_interference);
    r.get("rician_k_db", c.rician_k_db);
    r.get("user_gain_dbi", c.user_gain_dbi);
    if (r.has("noise_power_dbm") && r.has("noise_figure_db"))
      throw ConfigError("radio: give noise_power_dbm or noise_figure_db, not both" +
                        detail::where(r.raw("noise_figure_db")));
    double nf = 7.0;
    c.noise_power_dbm = thermal_noise_dbm(c.resource_blocks, nf);
    if (r.has("noise_figure_db")) {
      r.get("noise_figure_db", nf);
      c.noise_power_dbm = thermal_noise_dbm(c.resource_blocks, nf);
    }
    r.get("noise_power_dbm", c.noise_power_dbm);
    if (r.has("rssi_mode")) {
      const auto node = r.raw("rssi_mode");
      const auto m = Section::as<std::string>(node, "radio.rssi_mode");
      if (m == "total") c.rssi_mode = RssiMode::Total;
      else if (m == "signal_only") c.rssi_mode = RssiMode::SignalOnly;
      else throw ConfigError("radio.rssi_mode: expected total or signal_only" + detail::where(node));
    }
    r.finish();
  }
  if (top.has("bounds")) {
    auto b = top.sub("bounds");
    b.get("power_min_dbm", s.bounds.power_min_dbm);
    b.get("power_max_dbm", s.bounds.power_max_dbm);
    b.get("tilt_min_deg", s.bounds.tilt_min_deg);
    b.get("tilt_max_deg", s.bounds.tilt_max_deg);
    b.finish();
  }
  if (top.has("episode")) {
    auto e = top.sub("episode");
    e.get("length", s.episode.length);
    e.get("initial_power_dbm", s.episode.initial_power_dbm);
    e.get("initial_tilt_deg", s.episode.initial_tilt_deg);
    e.finish();
  }

  double sector_threshold = -115.0;
  if (top.has("sector_rsrp_threshold_dbm")) top.get("sector_rsrp_threshold_dbm", sector_threshold);

  // gNBs: explicit list, or the hex layout.
  if (top.has("gnbs")) {
    const auto list = top.raw("gnbs");
    if (!list.IsSequence()) throw ConfigError("gnbs: expected a sequence" + detail::where(list));
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "gnbs[" + std::to_string(i) + "]";
      Section g(list[i], path);
      Gnb gnb;
      gnb.position.altitude = s.layout.gnb_height_m;
      if (g.has("position")) gnb.position = detail::read_position(g.sub("position"));
      gnb.sectors = default_sectors(s.episode, sector_threshold);
      if (g.has("sectors")) {
        const auto secs = g.raw("sectors");
        if (!secs.IsSequence() || secs.size() != kSectorsPerGnb)
          throw ConfigError(path + ".sectors: expected exactly 3 sectors" + detail::where(secs));
        for (std::size_t k = 0; k < kSectorsPerGnb; ++k) {
          Section sc(secs[k], path + ".sectors[" + std::to_string(k) + "]");
          auto& out = gnb.sectors[k];
          sc.get("tx_power_dbm", out.tx_power_dbm);
          sc.get("mech_tilt_deg", out.downtilt.mech_deg);
          sc.get("elec_tilt_deg", out.downtilt.elec_deg);
          sc.get("boresight_deg", out.boresight_deg);
          sc.get("rsrp_threshold_dbm", out.rsrp_threshold_dbm);
          sc.finish();
        }
      }
      g.finish();
      s.gnbs.push_back(gnb);
    }
  } else {
    for (const auto& pos : build_hex_layout(s.layout.rings, s.layout.isd_m, s.layout.gnb_height_m))
      s.gnbs.push_back({pos, default_sectors(s.episode, sector_threshold)});
  }

  // Outage: explicit mask or a list of failed ids.
  s.active.assign(s.gnbs.size(), 1);
  if (top.has("active") && top.has("outage"))
    throw ConfigError("give either 'active' or 'outage', not both" + detail::where(top.raw("outage")));
  if (top.has("active")) {
    const auto mask = top.raw("active");
    if (!mask.IsSequence() || mask.size() != s.gnbs.size())
      throw ConfigError("active: expected one flag per gNB" + detail::where(mask));
    for (std::size_t i = 0; i < mask.size(); ++i)
      s.active[i] = Section::as<bool>(mask[i], "active[" + std::to_string(i) + "]") ? 1 : 0;
  }
  if (top.has("outage")) {
    const auto ids = top.raw("outage");
    if (!ids.IsSequence()) throw ConfigError("outage: expected a sequence of gNB ids" + detail::where(ids));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto id = Section::as<std::size_t>(ids[i], "outage[" + std::to_string(i) + "]");
      if (id >= s.gnbs.size())
        throw ConfigError("outage: unknown gNB id " + std::to_string(id) + detail::where(ids[i]));
      s.active[id] = 0;
    }
  }

  // LEOs: explicit list, or a generated fleet.
  if (top.has("leos")) {
    const auto list = top.raw("leos");
    if (!list.IsSequence()) throw ConfigError("leos: expected a sequence" + detail::where(list));
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section l(list[i], "leos[" + std::to_string(i) + "]");
      Leo leo;
      l.get("altitude_m", leo.geometry.altitude_m);
      if (l.has("nadir")) leo.geometry.nadir = detail::read_position(l.sub("nadir"));
      l.get("boresight_gain_dbi", leo.beam.boresight_gain_dbi);
      l.get("footprint_radius_m", leo.beam.footprint_radius_m);
      l.get("tx_power_dbm", leo.tx_power_dbm);
      l.get("rsrp_threshold_dbm", leo.rsrp_threshold_dbm);
      l.finish();
      s.leos.push_back(leo);
    }
  } else {
    int count = 5;
    double altitude = 550'000.0, spacing = 20'000.0;
    Leo proto;
    if (top.has("leo_fleet")) {
      auto f = top.sub("leo_fleet");
      f.get("count", count);
      f.get("altitude_m", altitude);
      f.get("spacing_m", spacing);
      f.get("boresight_gain_dbi", proto.beam.boresight_gain_dbi);
      f.get("footprint_radius_m", proto.beam.footprint_radius_m);
      f.get("tx_power_dbm", proto.tx_power_dbm);
      f.get("rsrp_threshold_dbm", proto.rsrp_threshold_dbm);
      f.finish();
      if (count < 0) throw ConfigError("leo_fleet.count: must be >= 0");
    }
    s.leos = default_leos(count, altitude, spacing);
    for (auto& l : s.leos) {
      l.beam = proto.beam;
      l.tx_power_dbm = proto.tx_power_dbm;
      l.rsrp_threshold_dbm = proto.rsrp_threshold_dbm;
    }
  }

  // Users: drop settings, then an optional explicit list.
  std::vector<GroundPosition> sites;
  for (const auto& g : s.gnbs) sites.push_back(g.position);
  s.user_drop.region = layout_region(sites, s.layout.isd_m);
  if (top.has("user_drop")) {
    auto u = top.sub("user_drop");
    u.get("count", s.user_drop.count);
    u.get("height_m", s.user_drop.height_m);
    u.get("demand_min", s.user_drop.demand_min);
    u.get("demand_max", s.user_drop.demand_max);
    u.get("redraw_per_episode", s.user_drop.redraw_per_episode);
    if (u.has("region")) {
      auto r = u.sub("region");
      r.get("x_min", s.user_drop.region.x_min);
      r.get("x_max", s.user_drop.region.x_max);
      r.get("y_min", s.user_drop.region.y_min);
      r.get("y_max", s.user_drop.region.y_max);
      r.finish();
    }
    u.finish();
  }
  if (s.user_drop.count < 0) throw ConfigError("user_drop.count: must be >= 0");
  if (top.has("users")) {
    const auto list = top.raw("users");
    if (!list.IsSequence()) throw ConfigError("users: expected a sequence" + detail::where(list));
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section u(list[i], "users[" + std::to_string(i) + "]");
      User user;
      user.position.altitude = s.user_drop.height_m;
      u.get("x", user.position.x);
      u.get("y", user.position.y);
      u.get("altitude", user.position.altitude);
      u.get("demand", user.demand);
      u.finish();
      s.users.push_back(user);
    }
  } else {
    if (!(s.user_drop.demand_min >= 0.0 && s.user_drop.demand_min <= s.user_drop.demand_max))
      throw ConfigError("user_drop: need 0 <= demand_min <= demand_max");
    s.users = draw_users(s.user_drop, s.seed);
  }

  if (top.has("capacity")) {
    auto c = top.sub("capacity");
    c.get("per_cell", s.capacity.per_cell);
    c.get("per_satellite", s.capacity.per_satellite);
    if (c.has("min_served") && c.has("min_served_fraction"))
      throw ConfigError("capacity: give min_served or min_served_fraction, not both" +
                        detail::where(c.raw("min_served_fraction")));
    if (c.has("min_served")) {
      c.get("min_served", s.capacity.min_served);
    } else {
      double frac = 0.6;
      c.get("min_served_fraction", frac);
      if (!(frac >= 0.0 && frac <= 1.0))
        throw ConfigError("capacity.min_served_fraction: must lie in [0, 1]");
      s.capacity.min_served = static_cast<int>(std::ceil(frac * s.user_drop.count - 1e-9));
    }
    c.finish();
  } else {
    s.capacity.min_served = static_cast<int>(std::ceil(0.6 * s.user_drop.count - 1e-9));
  }

  top.get("penalty_lambda", s.penalty_lambda);
  if (top.has("association")) {
    const auto node = top.raw("association");
    const auto rule = Section::as<std::string>(node, "association");
    if (rule == "optimal") s.association = AssociationRule::Optimal;
    else if (rule == "greedy") s.association = AssociationRule::Greedy;
    else throw ConfigError("association: expected optimal or greedy" + detail::where(node));
  }

  if (top.has("training")) {
    auto t = top.sub("training");
    auto& c = cfg.train;
    if (t.has("agent")) {
      const auto node = t.raw("agent");
      const auto a = Section::as<std::string>(node, "training.agent");
      if (a == "dqn") c.agent = AgentKind::Dqn;
      else if (a == "ql") c.agent = AgentKind::QLearning;
      else throw ConfigError("training.agent: expected dqn or ql" + detail::where(node));
    }
    t.get("total_iterations", c.total_iterations);
    t.get("learning_rate", c.learning_rate);
    t.get("batch_size", c.batch_size);
    t.get("gamma", c.gamma);
    t.get("eps_start", c.eps_start);
    t.get("eps_end", c.eps_end);
    t.get("eps_decay_steps", c.eps_decay_steps);
    t.get("target_sync_period", c.target_sync_period);
    t.get("replay_capacity", c.replay_capacity);
    t.get("learning_starts", c.learning_starts);
    t.get("ql_alpha", c.ql_alpha);
    if (t.has("hidden")) {
      const auto h = t.raw("hidden");
      if (!h.IsSequence()) throw ConfigError("training.hidden: expected a sequence" + detail::where(h));
      c.hidden.clear();
      for (std::size_t i = 0; i < h.size(); ++i)
        c.hidden.push_back(Section::as<std::size_t>(h[i], "training.hidden"));
    }
    if (t.has("optimizer")) {
      const auto node = t.raw("optimizer");
      const auto o = Section::as<std::string>(node, "training.optimizer");
      if (o == "sgd") c.optimizer = OptimizerKind::Sgd;
      else if (o == "adam") c.optimizer = OptimizerKind::Adam;
      else throw ConfigError("training.optimizer: expected sgd or adam" + detail::where(node));
    }
    if (t.has("reward_scale")) {
      double v = 0.0;
      t.get("reward_scale", v);
      c.reward_scale = v;
    }
    t.finish();
  }
  top.finish();

  try {
    s.validate();
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace detail

/// Builds the experiment from a parsed document. Every problem, including
/// values the scenario generators reject, surfaces as ConfigError.
inline ExperimentConfig parse_config(const YAML::Node& root) {
  try {
    return detail::parse_node(root);
  } catch (const std::logic_error& e) {
    throw ConfigError(e.what());
  }
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("yaml: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Saving
// ---------------------------------------------------------------------------

inline std::string to_yaml(const ExperimentConfig& cfg) {
  using detail::fmt_double;
  const Scenario& s = cfg.scenario;
  YAML::Emitter out;
  auto kv = [&](const char* k, double v) { out << YAML::Key << k << YAML::Value << fmt_double(v); };
  auto ki = [&](const char* k, auto v) { out << YAML::Key << k << YAML::Value << v; };
  auto pos = [&](const char* k, const GroundPosition& p) {
    out << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv("x", p.x);
    kv("y", p.y);
    kv("altitude", p.altitude);
    out << YAML::EndMap;
  };

  out << YAML::BeginMap;
  ki("seed", s.seed);
  out << YAML::Key << "layout" << YAML::Value << YAML::BeginMap;
  ki("rings", s.layout.rings);
  kv("isd_m", s.layout.isd_m);
  kv("gnb_height_m", s.layout.gnb_height_m);
  out << YAML::EndMap;

  out << YAML::Key << "antenna" << YAML::Value << YAML::BeginMap;
  kv("max_gain_dbi", s.pattern.max_gain_dbi);
  kv("front_back_db", s.pattern.front_back_db);
  kv("sidelobe_db", s.pattern.sidelobe_db);
  kv("azimuth_hpbw_deg", s.pattern.azimuth_hpbw_deg);
  kv("elevation_hpbw_deg", s.pattern.elevation_hpbw_deg);
  out << YAML::EndMap;

  out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
  kv("carrier_freq_tn_ghz", s.radio.carrier_freq_tn_ghz);
  kv("carrier_freq_ntn_ghz", s.radio.carrier_freq_ntn_ghz);
  kv("pathloss_exponent", s.radio.pathloss_exponent);
  ki("resource_blocks", s.radio.resource_blocks);
  kv("noise_power_dbm", s.radio.noise_power_dbm);
  kv("residual_interference", s.radio.residual_interference);
  kv("rician_k_db", s.radio.rician_k_db);
  kv("user_gain_dbi", s.radio.user_gain_dbi);
  ki("rssi_mode", std::string(to_string(s.radio.rssi_mode)));
  out << YAML::EndMap;

  out << YAML::Key << "bounds" << YAML::Value << YAML::BeginMap;
  kv("power_min_dbm", s.bounds.power_min_dbm);
  kv("power_max_dbm", s.bounds.power_max_dbm);
  kv("tilt_min_deg", s.bounds.tilt_min_deg);
  kv("tilt_max_deg", s.bounds.tilt_max_deg);
  out << YAML::EndMap;

  out << YAML::Key << "episode" << YAML::Value << YAML::BeginMap;
  ki("length", s.episode.length);
  kv("initial_power_dbm", s.episode.initial_power_dbm);
  kv("initial_tilt_deg", s.episode.initial_tilt_deg);
  out << YAML::EndMap;

  out << YAML::Key << "gnbs" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.gnbs) {
    out << YAML::BeginMap;
    pos("position", g.position);
    out << YAML::Key << "sectors" << YAML::Value << YAML::BeginSeq;
    for (const auto& sc : g.sectors) {
      out << YAML::Flow << YAML::BeginMap;
      kv("tx_power_dbm", sc.tx_power_dbm);
      kv("mech_tilt_deg", sc.downtilt.mech_deg);
      kv("elec_tilt_deg", sc.downtilt.elec_deg);
      kv("boresight_deg", sc.boresight_deg);
      kv("rsrp_threshold_dbm", sc.rsrp_threshold_dbm);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "active" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto a : s.active) out << (a != 0);
  out << YAML::EndSeq;

  out << YAML::Key << "leos" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : s.leos) {
    out << YAML::BeginMap;
    kv("altitude_m", l.geometry.altitude_m);
    pos("nadir", l.geometry.nadir);
    kv("boresight_gain_dbi", l.beam.boresight_gain_dbi);
    kv("footprint_radius_m", l.beam.footprint_radius_m);
    kv("tx_power_dbm", l.tx_power_dbm);
    kv("rsrp_threshold_dbm", l.rsrp_threshold_dbm);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "user_drop" << YAML::Value << YAML::BeginMap;
  ki("count", s.user_drop.count);
  kv("height_m", s.user_drop.height_m);
  kv("demand_min", s.user_drop.demand_min);
  kv("demand_max", s.user_drop.demand_max);
  ki("redraw_per_episode", s.user_drop.redraw_per_episode);
  out << YAML::Key << "region" << YAML::Value << YAML::Flow << YAML::BeginMap;
  kv("x_min", s.user_drop.region.x_min);
  kv("x_max", s.user_drop.region.x_max);
  kv("y_min", s.user_drop.region.y_min);
  kv("y_max", s.user_drop.region.y_max);
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "users" << YAML::Value << YAML::BeginSeq;
  for (const auto& u : s.users) {
    out << YAML::Flow << YAML::BeginMap;
    kv("x", u.position.x);
    kv("y", u.position.y);
    kv("altitude", u.position.altitude);
    kv("demand", u.demand);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "capacity" << YAML::Value << YAML::BeginMap;
  ki("per_cell", s.capacity.per_cell);
  ki("per_satellite", s.capacity.per_satellite);
  ki("min_served", s.capacity.min_served);
  out << YAML::EndMap;

  kv("penalty_lambda", s.penalty_lambda);
  ki("association", std::string(s.association == AssociationRule::Optimal ? "optimal" : "greedy"));

  const auto& t = cfg.train;
  out << YAML::Key << "training" << YAML::Value << YAML::BeginMap;
  ki("agent", detail::agent_name(t.agent));
  ki("total_iterations", t.total_iterations);
  kv("learning_rate", t.learning_rate);
  ki("batch_size", t.batch_size);
  kv("gamma", t.gamma);
  kv("eps_start", t.eps_start);
  kv("eps_end", t.eps_end);
  ki("eps_decay_steps", t.eps_decay_steps);
  ki("target_sync_period", t.target_sync_period);
  ki("replay_capacity", t.replay_capacity);
  ki("learning_starts", t.learning_starts);
  out << YAML::Key << "hidden" << YAML::Value << YAML::Flow << t.hidden;
  ki("optimizer", std::string(t.optimizer == OptimizerKind::Sgd ? "sgd" : "adam"));
  kv("ql_alpha", t.ql_alpha);
  if (t.reward_scale) kv("reward_scale", *t.reward_scale);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write config file '" + path + "'");
  os << to_yaml(cfg);
  if (!os) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace istn
