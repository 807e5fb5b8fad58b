// SPDX-License-Identifier: Apache-2.0
//
// The simulated world: hexagonal gNB layout with three sectors per site, the
// LEO fleet, the user drop with per-user rate demands, the outage mask and
// the radio constants. A Scenario is built once and then treated as
// read-only; everything that varies per episode lives in the environment.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/antenna.hpp"
#include "istn/channel.hpp"
#include "istn/geometry.hpp"
#include "istn/random.hpp"

namespace istn {

inline constexpr std::size_t kSectorsPerGnb = 3;
inline constexpr std::array<double, kSectorsPerGnb> kSectorBoresightsDeg{0.0, 120.0, -120.0};

struct PowerTiltBounds {
  double power_min_dbm = 0.0;
  double power_max_dbm = 37.0;
  double tilt_min_deg = 0.0;
  double tilt_max_deg = 14.0;

  double clamp_power(double p) const { return std::clamp(p, power_min_dbm, power_max_dbm); }
  double clamp_tilt(double t) const { return std::clamp(t, tilt_min_deg, tilt_max_deg); }
  bool contains(double power, double tilt) const {
    return power >= power_min_dbm && power <= power_max_dbm && tilt >= tilt_min_deg &&
           tilt <= tilt_max_deg;
  }

  friend bool operator==(const PowerTiltBounds&, const PowerTiltBounds&) = default;
};

struct SectorConfig {
  double tx_power_dbm = 30.0;
  Downtilt downtilt{0.0, 7.0};
  double boresight_deg = 0.0;
  double rsrp_threshold_dbm = -115.0;

  friend bool operator==(const SectorConfig&, const SectorConfig&) = default;
};

struct Gnb {
  GroundPosition position;
  std::array<SectorConfig, kSectorsPerGnb> sectors;

  friend bool operator==(const Gnb&, const Gnb&) = default;
};

struct Leo {
  SatelliteGeometry geometry;
  SatelliteBeam beam;
  double tx_power_dbm = 40.0;
  double rsrp_threshold_dbm = -125.0;

  friend bool operator==(const Leo&, const Leo&) = default;
};

struct User {
  GroundPosition position;
  double demand = 1.0;  ///< rate threshold, bits/s/Hz

  friend bool operator==(const User&, const User&) = default;
};

struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  friend bool operator==(const Region&, const Region&) = default;
};

struct LayoutConfig {
  int rings = 2;
  double isd_m = 500.0;
  double gnb_height_m = 10.0;

  friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

struct UserDropConfig {
  int count = 1000;
  double height_m = 1.5;
  double demand_min = 0.5;
  double demand_max = 2.0;
  Region region;
  bool redraw_per_episode = true;

  friend bool operator==(const UserDropConfig&, const UserDropConfig&) = default;
};

struct Capacities {
  int per_cell = 50;
  int per_satellite = 200;
  int min_served = 600;  ///< pi^min

  friend bool operator==(const Capacities&, const Capacities&) = default;
};

struct EpisodeConfig {
  int length = 50;
  double initial_power_dbm = 30.0;
  double initial_tilt_deg = 7.0;

  friend bool operator==(const EpisodeConfig&, const EpisodeConfig&) = default;
};

enum class AssociationRule : std::uint8_t {
  Optimal,  ///< exact P1 assignment via min-cost flow
  Greedy,   ///< rate-descending, terrestrial first
};

struct Scenario {
  LayoutConfig layout;
  std::vector<Gnb> gnbs;
  std::vector<std::uint8_t> active;  ///< outage mask psi, one entry per gNB
  std::vector<Leo> leos;
  UserDropConfig user_drop;
  std::vector<User> users;
  SectorPattern pattern;
  RadioConstants radio;
  PowerTiltBounds bounds;
  Capacities capacity;
  EpisodeConfig episode;
  AssociationRule association = AssociationRule::Optimal;
  double penalty_lambda = 0.5;
  std::uint64_t seed = 1;

  std::size_t sector_count() const { return gnbs.size() * kSectorsPerGnb; }
  std::size_t server_count() const { return sector_count() + leos.size(); }
  std::size_t active_gnb_count() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
  }

  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Center site followed by hexagonal rings, each ring counter-clockwise from
/// its east-most site.
inline std::vector<GroundPosition> build_hex_layout(int rings, double isd_m,
                                                    double height_m = 10.0) {
  if (rings < 0) throw std::invalid_argument("build_hex_layout: rings must be >= 0");
  if (!(isd_m > 0.0)) throw std::invalid_argument("build_hex_layout: isd must be positive");
  std::vector<GroundPosition> out;
  out.reserve(1 + 3 * static_cast<std::size_t>(rings) * (rings + 1));
  out.push_back({0.0, 0.0, height_m});
  for (int k = 1; k <= rings; ++k) {
    for (int side = 0; side < 6; ++side) {
      const double a0 = side * std::numbers::pi / 3.0;
      const double a1 = (side + 1) * std::numbers::pi / 3.0;
      const double cx0 = k * isd_m * std::cos(a0), cy0 = k * isd_m * std::sin(a0);
      const double cx1 = k * isd_m * std::cos(a1), cy1 = k * isd_m * std::sin(a1);
      for (int t = 0; t < k; ++t) {
        const double f = static_cast<double>(t) / k;
        out.push_back({cx0 + f * (cx1 - cx0), cy0 + f * (cy1 - cy0), height_m});
      }
    }
  }
  return out;
}

/// Bounding box of the sites padded by half an inter-site distance.
inline Region layout_region(std::span<const GroundPosition> sites, double isd_m) {
  if (sites.empty()) return {};
  Region r{sites[0].x, sites[0].x, sites[0].y, sites[0].y};
  for (const auto& s : sites) {
    r.x_min = std::min(r.x_min, s.x);
    r.x_max = std::max(r.x_max, s.x);
    r.y_min = std::min(r.y_min, s.y);
    r.y_max = std::max(r.y_max, s.y);
  }
  const double pad = 0.5 * isd_m;
  return {r.x_min - pad, r.x_max + pad, r.y_min - pad, r.y_max + pad};
}

template <class RngT>
std::vector<GroundPosition> drop_users(int count, const Region& region, double height_m,
                                       RngT& rng) {
  if (count < 0) throw std::invalid_argument("drop_users: count must be >= 0");
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
  std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
  std::vector<GroundPosition> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.push_back({x, y, height_m});
  }
  return out;
}

template <class RngT>
std::vector<double> sample_demands(int count, double r_min, double r_max, RngT& rng) {
  if (!(r_min >= 0.0 && r_min <= r_max))
    throw std::invalid_argument("sample_demands: need 0 <= r_min <= r_max");
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  if (r_min == r_max) {
    std::fill(out.begin(), out.end(), r_min);
    return out;
  }
  std::uniform_real_distribution<double> u(r_min, r_max);
  for (auto& d : out) d = u(rng);
  return out;
}

/// Users and demands for one draw; positions first, then demands, from one stream.
inline std::vector<User> draw_users(const UserDropConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const auto pos = drop_users(cfg.count, cfg.region, cfg.height_m, rng);
  const auto dem = sample_demands(cfg.count, cfg.demand_min, cfg.demand_max, rng);
  std::vector<User> users(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) users[i] = {pos[i], dem[i]};
  return users;
}

/// Three sectors at the standard boresights with a shared initial setting.
inline std::array<SectorConfig, kSectorsPerGnb> default_sectors(const EpisodeConfig& ep,
                                                                double rsrp_threshold_dbm) {
  std::array<SectorConfig, kSectorsPerGnb> s{};
  for (std::size_t i = 0; i < kSectorsPerGnb; ++i) {
    s[i].tx_power_dbm = ep.initial_power_dbm;
    s[i].downtilt = {0.0, ep.initial_tilt_deg};
    s[i].boresight_deg = kSectorBoresightsDeg[i];
    s[i].rsrp_threshold_dbm = rsrp_threshold_dbm;
  }
  return s;
}

/// Default fleet: `count` satellites at `altitude_m` with nadir points on a
/// small circle around the layout center.
inline std::vector<Leo> default_leos(int count, double altitude_m = 550'000.0,
                                     double spacing_m = 20'000.0) {
  std::vector<Leo> out;
  for (int i = 0; i < count; ++i) {
    Leo l;
    l.geometry.altitude_m = altitude_m;
    const double a = 2.0 * std::numbers::pi * i / std::max(count, 1);
    l.geometry.nadir = {spacing_m * std::cos(a), spacing_m * std::sin(a), 0.0};
    out.push_back(l);
  }
  return out;
}

struct ScenarioParams {
  LayoutConfig layout;
  int leo_count = 5;
  UserDropConfig user_drop;
  double rsrp_threshold_dbm = -115.0;
  double min_served_fraction = 0.6;
};

/// Full scenario from generator parameters; users drawn from `seed`.
inline Scenario make_scenario(const ScenarioParams& p, std::uint64_t seed = 1) {
  Scenario s;
  s.layout = p.layout;
  s.seed = seed;
  const auto sites = build_hex_layout(p.layout.rings, p.layout.isd_m, p.layout.gnb_height_m);
  for (const auto& pos : sites) s.gnbs.push_back({pos, default_sectors(s.episode, p.rsrp_threshold_dbm)});
  s.active.assign(s.gnbs.size(), 1);
  s.leos = default_leos(p.leo_count);
  s.user_drop = p.user_drop;
  s.user_drop.region = layout_region(sites, p.layout.isd_m);
  s.users = draw_users(s.user_drop, seed);
  s.capacity.min_served =
      static_cast<int>(std::ceil(p.min_served_fraction * p.user_drop.count - 1e-9));
  s.validate();
  return s;
}

/// Copy of `s` with the listed gNBs switched off; already-off sites stay off.
inline Scenario apply_outage(const Scenario& s, std::span<const std::size_t> gnb_ids) {
  Scenario out = s;
  for (auto id : gnb_ids) {
    if (id >= out.gnbs.size())
      throw std::out_of_range("apply_outage: unknown gNB id " + std::to_string(id));
    out.active[id] = 0;
  }
  return out;
}

inline void Scenario::validate() const {
  pattern.validate();
  radio.validate();
  if (active.size() != gnbs.size())
    throw std::invalid_argument("Scenario: outage mask length differs from gNB count");
  if (!(bounds.power_min_dbm <= bounds.power_max_dbm && bounds.tilt_min_deg <= bounds.tilt_max_deg))
    throw std::invalid_argument("Scenario: empty power or tilt range");
  for (std::size_t g = 0; g < gnbs.size(); ++g) {
    if (!(gnbs[g].position.altitude >= 0.0))
      throw std::invalid_argument("Scenario: gNB " + std::to_string(g) + " below ground");
    for (const auto& sec : gnbs[g].sectors)
      if (!bounds.contains(sec.tx_power_dbm, sec.downtilt.total()))
        throw std::invalid_argument("Scenario: gNB " + std::to_string(g) +
                                    " sector outside power/tilt bounds");
  }
  for (std::size_t i = 0; i < leos.size(); ++i) {
    if (!(leos[i].geometry.altitude_m > 0.0))
      throw std::invalid_argument("Scenario: LEO " + std::to_string(i) + " altitude must be > 0");
    if (leos[i].geometry.earth_radius_m != kEarthRadiusM)
      throw std::invalid_argument("Scenario: Earth radius is fixed");
    if (!(leos[i].beam.footprint_radius_m > 0.0) || !std::isfinite(leos[i].beam.boresight_gain_dbi))
      throw std::invalid_argument("Scenario: LEO " + std::to_string(i) + " beam invalid");
  }
  if (!(user_drop.demand_min >= 0.0 && user_drop.demand_min <= user_drop.demand_max))
    throw std::invalid_argument("Scenario: demand range invalid");
  if (user_drop.count < 0) throw std::invalid_argument("Scenario: negative user count");
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (users[u].demand < user_drop.demand_min || users[u].demand > user_drop.demand_max)
      throw std::invalid_argument("Scenario: user " + std::to_string(u) +
                                  " demand outside [demand_min, demand_max]");
    if (!(users[u].position.altitude >= 0.0))
      throw std::invalid_argument("Scenario: user " + std::to_string(u) + " below ground");
  }
  if (capacity.per_cell < 0 || capacity.per_satellite < 0 || capacity.min_served < 0)
    throw std::invalid_argument("Scenario: capacities must be non-negative");
  const long long total = static_cast<long long>(capacity.per_cell) * sector_count() +
                          static_cast<long long>(capacity.per_satellite) * leos.size();
  if (capacity.min_served > total)
    throw std::invalid_argument("Scenario: min_served exceeds total capacity");
  if (episode.length < 1) throw std::invalid_argument("Scenario: episode length must be >= 1");
  if (!bounds.contains(episode.initial_power_dbm, episode.initial_tilt_deg))
    throw std::invalid_argument("Scenario: initial power/tilt outside bounds");
  if (!(penalty_lambda >= 0.0) || !std::isfinite(penalty_lambda))
    throw std::invalid_argument("Scenario: penalty_lambda must be finite and >= 0");
}

}  // namespace istn
