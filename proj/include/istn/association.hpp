// SPDX-License-Identifier: Apache-2.0
//
// Per-pair link budgets and eligibility flags, capacity-constrained user
// association, and the penalised throughput objective.
//
// Servers are indexed sectors first (gNB g, sector i -> 3g + i), then
// satellites (sector_count + s).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "istn/antenna.hpp"
#include "istn/channel.hpp"
#include "istn/geometry.hpp"
#include "istn/grid.hpp"
#include "istn/scenario.hpp"

namespace istn {

/// The controllable pair of one sector.
struct SectorControl {
  double power_dbm = 30.0;
  double tilt_deg = 7.0;

  friend bool operator==(const SectorControl&, const SectorControl&) = default;
};

inline std::vector<SectorControl> controls_from(const Scenario& s) {
  std::vector<SectorControl> c;
  c.reserve(s.sector_count());
  for (const auto& g : s.gnbs)
    for (const auto& sec : g.sectors) c.push_back({sec.tx_power_dbm, sec.downtilt.total()});
  return c;
}

/// Control-independent part of every link: distances, look angles, and the
/// complete satellite budget (satellites do not move within an episode).
struct LinkGeometry {
  Grid<double> tn_path_gain_db;     ///< users x sectors
  Grid<double> tn_vertical_deg;     ///< users x sectors
  Grid<double> tn_azimuth_gain_dbi; ///< users x sectors
  Grid<double> leo_path_gain_db;    ///< users x satellites, -FSPL
  Grid<double> leo_gain_dbi;        ///< users x satellites, -inf when not covered

  std::size_t users() const { return tn_path_gain_db.rows(); }
};

// Distances are floored at 1 m so that d^-alpha never turns into a gain.
inline constexpr double kMinLinkDistanceM = 1.0;

inline LinkGeometry compute_link_geometry(const Scenario& s, std::span<const User> users) {
  const std::size_t nu = users.size(), ns = s.sector_count(), nl = s.leos.size();
  LinkGeometry g{Grid<double>(nu, ns), Grid<double>(nu, ns), Grid<double>(nu, ns),
                 Grid<double>(nu, nl), Grid<double>(nu, nl)};
  for (std::size_t u = 0; u < nu; ++u) {
    const auto& up = users[u].position;
    for (std::size_t b = 0; b < s.gnbs.size(); ++b) {
      const auto& site = s.gnbs[b];
      const double d = std::max(distance_3d(site.position, up), kMinLinkDistanceM);
      const double pg = tn_path_gain_db(d, s.radio.pathloss_exponent);
      const double vert = vertical_angle_to_user(site.position, up);
      const double bearing = bearing_deg(site.position, up);
      for (std::size_t i = 0; i < kSectorsPerGnb; ++i) {
        const std::size_t j = b * kSectorsPerGnb + i;
        g.tn_path_gain_db(u, j) = pg;
        g.tn_vertical_deg(u, j) = vert;
        g.tn_azimuth_gain_dbi(u, j) =
            azimuth_gain(s.pattern, azimuth_offset(site.sectors[i].boresight_deg, bearing));
      }
    }
    for (std::size_t l = 0; l < nl; ++l) {
      const auto& leo = s.leos[l];
      const auto elev = try_satellite_elevation(up, leo.geometry);
      if (!elev) {
        g.leo_path_gain_db(u, l) = -std::numeric_limits<double>::infinity();
        g.leo_gain_dbi(u, l) = kNoCoverageDbi;
        continue;
      }
      g.leo_path_gain_db(u, l) =
          -fspl_db(s.radio.carrier_freq_ntn_ghz, slant_range(leo.geometry, *elev));
      g.leo_gain_dbi(u, l) = satellite_gain(leo.beam, up, leo.geometry);
    }
  }
  return g;
}

/// Link budgets plus the two per-pair eligibility flags.
struct Eligibility {
  Grid<LinkBudgetReport> links;    ///< users x servers
  Grid<std::uint8_t> rsrp_ok;      ///< RSRP at or above the server's threshold
  Grid<std::uint8_t> rate_ok;      ///< approximate rate at or above the user's demand
  std::vector<double> demand;
  std::vector<std::uint8_t> server_active;
  std::vector<int> capacity;
  std::size_t sector_count = 0;

  std::size_t users() const { return links.rows(); }
  std::size_t servers() const { return links.cols(); }
  bool is_satellite(std::size_t k) const { return k >= sector_count; }
  bool feasible(std::size_t u, std::size_t k) const {
    return server_active[k] && rsrp_ok(u, k) && rate_ok(u, k) && capacity[k] > 0;
  }
};

namespace detail {

inline void fill_pair(LinkBudgetReport& r, double signal_mw, double interference_mw,
                      const RadioConstants& radio, double noise_mw) {
  const double nu = radio.residual_interference * interference_mw + noise_mw;
  r.sinr_linear = signal_mw / nu;
  r.rate_exact = rate_exact(r.sinr_linear);
  r.rate_approx = rate_approx(signal_mw, nu, radio.euler_constant);
  const double rssi_mw = radio.rssi_mode == RssiMode::Total ? signal_mw + radio.residual_interference *
                                                                              interference_mw + noise_mw
                                                            : signal_mw;
  r.rssi_dbm = mw_to_dbm(rssi_mw);
  r.rsrp_dbm = rsrp_from_rssi(r.rssi_dbm, radio.resource_blocks);
}

}  // namespace detail

/// Fading-free link budgets for every user and server under `controls`.
/// Interference on a sector link is the residual of all sectors of the
/// other active gNBs; on a satellite link, that of the other satellites.
inline Eligibility eligibility(const Scenario& s, std::span<const User> users,
                               std::span<const SectorControl> controls, const LinkGeometry& geo) {
  const std::size_t nu = users.size(), ns = s.sector_count(), nl = s.leos.size(), nk = ns + nl;
  if (controls.size() != ns) throw std::invalid_argument("eligibility: one control per sector");
  if (geo.users() != nu) throw std::invalid_argument("eligibility: geometry/user mismatch");

  Eligibility e;
  e.links = Grid<LinkBudgetReport>(nu, nk);
  e.rsrp_ok = Grid<std::uint8_t>(nu, nk, 0);
  e.rate_ok = Grid<std::uint8_t>(nu, nk, 0);
  e.sector_count = ns;
  e.demand.resize(nu);
  e.server_active.assign(nk, 1);
  e.capacity.assign(nk, s.capacity.per_cell);
  for (std::size_t k = 0; k < ns; ++k) e.server_active[k] = s.active[k / kSectorsPerGnb];
  for (std::size_t k = ns; k < nk; ++k) e.capacity[k] = s.capacity.per_satellite;

  const auto& radio = s.radio;
  const double noise_mw = dbm_to_mw(radio.noise_power_dbm);
  const double gu = radio.user_gain_dbi;
  const std::size_t ng = s.gnbs.size();
  std::vector<double> rx(ns), per_gnb(ng), leo_rx(nl);

  for (std::size_t u = 0; u < nu; ++u) {
    e.demand[u] = users[u].demand;
    std::fill(per_gnb.begin(), per_gnb.end(), 0.0);
    for (std::size_t j = 0; j < ns; ++j) {
      auto& r = e.links(u, j);
      const auto& c = controls[j];
      r.tx_power_dbm = c.power_dbm;
      r.path_gain_db = geo.tn_path_gain_db(u, j);
      r.server_gain_dbi = geo.tn_azimuth_gain_dbi(u, j) +
                          elevation_gain(s.pattern, geo.tn_vertical_deg(u, j), {0.0, c.tilt_deg});
      r.user_gain_dbi = gu;
      r.fading_power = 1.0;
      rx[j] = e.server_active[j]
                  ? dbm_to_mw(c.power_dbm + r.path_gain_db + r.server_gain_dbi + gu)
                  : 0.0;
      per_gnb[j / kSectorsPerGnb] += rx[j];
    }
    const double total = std::accumulate(per_gnb.begin(), per_gnb.end(), 0.0);
    for (std::size_t j = 0; j < ns; ++j) {
      auto& r = e.links(u, j);
      if (!e.server_active[j]) {
        r.tx_power_dbm = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double interference = std::max(0.0, total - per_gnb[j / kSectorsPerGnb]);
      detail::fill_pair(r, rx[j], interference, radio, noise_mw);
      e.rsrp_ok(u, j) = rx[j] > 0.0 && r.rsrp_dbm >= s.gnbs[j / kSectorsPerGnb].sectors[j % kSectorsPerGnb].rsrp_threshold_dbm;
      e.rate_ok(u, j) = r.rate_approx >= users[u].demand;
    }

    double leo_total = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      const double g = geo.leo_gain_dbi(u, l);
      leo_rx[l] = std::isfinite(g) ? dbm_to_mw(s.leos[l].tx_power_dbm + geo.leo_path_gain_db(u, l) + g + gu)
                                   : 0.0;
      leo_total += leo_rx[l];
    }
    for (std::size_t l = 0; l < nl; ++l) {
      const std::size_t k = ns + l;
      auto& r = e.links(u, k);
      r.tx_power_dbm = s.leos[l].tx_power_dbm;
      r.path_gain_db = geo.leo_path_gain_db(u, l);
      r.server_gain_dbi = geo.leo_gain_dbi(u, l);
      r.user_gain_dbi = gu;
      r.fading_power = 1.0;
      detail::fill_pair(r, leo_rx[l], std::max(0.0, leo_total - leo_rx[l]), radio, noise_mw);
      e.rsrp_ok(u, k) = leo_rx[l] > 0.0 && r.rsrp_dbm >= s.leos[l].rsrp_threshold_dbm;
      e.rate_ok(u, k) = leo_rx[l] > 0.0 && r.rate_approx >= users[u].demand;
    }
  }
  return e;
}

inline Eligibility eligibility(const Scenario& s, std::span<const User> users,
                               std::span<const SectorControl> controls) {
  return eligibility(s, users, controls, compute_link_geometry(s, users));
}

inline Eligibility eligibility(const Scenario& s, std::span<const SectorControl> controls) {
  return eligibility(s, s.users, controls);
}

struct AssociationOutcome {
  Grid<std::uint8_t> kappa;         ///< selected association (at most one per user)
  Grid<std::uint8_t> zeta_rate_ok;  ///< rate requirement met, per pair
  Grid<std::uint8_t> pi;            ///< successfully served
  std::vector<std::optional<std::size_t>> server_of;
  std::vector<int> per_server_load;
  double objective = 0.0;
  int served_count = 0;
  int leo_served_count = 0;
  bool meets_min_served = false;  ///< C4 holds
};

/// Penalised throughput of the served pairs.
inline double objective_value(const AssociationOutcome& o, const Eligibility& e, double lambda) {
  double sum = 0.0;
  int leo = 0;
  for (std::size_t u = 0; u < o.server_of.size(); ++u) {
    if (!o.server_of[u]) continue;
    const std::size_t k = *o.server_of[u];
    sum += e.links(u, k).rate_approx;
    if (e.is_satellite(k)) ++leo;
  }
  return sum - lambda * leo;
}

/// Association weight of a feasible pair: its rate, less lambda on satellites.
inline double association_weight(const Eligibility& e, std::size_t u, std::size_t k,
                                 double lambda) {
  return e.links(u, k).rate_approx - (e.is_satellite(k) ? lambda : 0.0);
}

namespace detail {

inline AssociationOutcome finish_outcome(const Eligibility& e,
                                         std::vector<std::optional<std::size_t>> server_of,
                                         int min_served, double lambda) {
  const std::size_t nu = e.users(), nk = e.servers();
  AssociationOutcome o;
  o.kappa = Grid<std::uint8_t>(nu, nk, 0);
  o.pi = Grid<std::uint8_t>(nu, nk, 0);
  o.zeta_rate_ok = e.rate_ok;
  o.per_server_load.assign(nk, 0);
  for (std::size_t u = 0; u < nu; ++u) {
    if (!server_of[u]) continue;
    const std::size_t k = *server_of[u];
    o.kappa(u, k) = 1;
    o.pi(u, k) = 1;
    ++o.per_server_load[k];
    ++o.served_count;
    if (e.is_satellite(k)) ++o.leo_served_count;
  }
  o.server_of = std::move(server_of);
  o.objective = objective_value(o, e, lambda);
  o.meets_min_served = o.served_count >= min_served;
  return o;
}

}  // namespace detail

/// Rate-descending greedy pass. Users are ordered by their best feasible
/// approximate rate (ties by id); each takes the best terrestrial sector with
/// room left, else the best satellite, else stays unserved.
inline AssociationOutcome associate_greedy(const Eligibility& e, int min_served, double lambda) {
  const std::size_t nu = e.users(), nk = e.servers();
  std::vector<double> best(nu, -std::numeric_limits<double>::infinity());
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t k = 0; k < nk; ++k)
      if (e.feasible(u, k)) best[u] = std::max(best[u], e.links(u, k).rate_approx);
  std::vector<std::size_t> order(nu);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });

  std::vector<int> load(nk, 0);
  std::vector<std::optional<std::size_t>> server_of(nu);
  auto pick = [&](std::size_t u, std::size_t lo, std::size_t hi) -> std::optional<std::size_t> {
    std::optional<std::size_t> arg;
    for (std::size_t k = lo; k < hi; ++k) {
      if (!e.feasible(u, k) || load[k] >= e.capacity[k]) continue;
      if (!arg || e.links(u, k).rate_approx > e.links(u, *arg).rate_approx) arg = k;
    }
    return arg;
  };
  for (std::size_t u : order) {
    if (!std::isfinite(best[u])) continue;
    auto k = pick(u, 0, e.sector_count);
    if (!k) k = pick(u, e.sector_count, nk);
    if (k) {
      server_of[u] = *k;
      ++load[*k];
    }
  }
  return detail::finish_outcome(e, std::move(server_of), min_served, lambda);
}

/// Exact maximiser of the penalised objective subject to one server per
/// user and per-server capacity. Successive shortest paths over a
/// min-cost-flow network (source -> user -> server -> sink, cost = -weight),
/// with paths contracted onto server nodes: an augmenting path enters at an
/// unassigned user and may shift already-assigned users between servers.
///
/// Augmentation continues while a path exists and either fewer than
/// `min_served` users are served or the path still increases the objective.
/// Because the optimal cost is convex in the flow value, this yields the best
/// objective over all assignments serving at least `min_served` users, or the
/// best maximum-cardinality assignment when that many cannot be served.
inline AssociationOutcome associate(const Eligibility& e, int min_served, double lambda) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-12;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  const std::size_t nu = e.users(), nk = e.servers();

  Grid<double> w(nu, nk, kInf);  // kInf marks infeasible pairs
  std::vector<std::vector<std::size_t>> candidates(nk);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t k = 0; k < nk; ++k)
      if (e.feasible(u, k)) {
        w(u, k) = association_weight(e, u, k, lambda);
        candidates[k].push_back(u);
      }
  for (std::size_t k = 0; k < nk; ++k)
    std::stable_sort(candidates[k].begin(), candidates[k].end(),
                     [&](std::size_t a, std::size_t b) { return w(a, k) > w(b, k); });

  std::vector<std::size_t> head(nk, 0);
  std::vector<std::size_t> assign(nu, kNone);
  std::vector<std::vector<std::size_t>> members(nk);
  std::vector<int> load(nk, 0);

  // Contracted residual edge a -> b: cheapest way to move one of a's users to b.
  Grid<double> edge_cost(nk, nk, kInf);
  Grid<std::size_t> edge_user(nk, nk, kNone);
  auto rebuild_row = [&](std::size_t a) {
    for (std::size_t b = 0; b < nk; ++b) {
      edge_cost(a, b) = kInf;
      edge_user(a, b) = kNone;
    }
    for (std::size_t v : members[a])
      for (std::size_t b = 0; b < nk; ++b) {
        if (b == a || w(v, b) == kInf) continue;
        const double c = w(v, a) - w(v, b);
        if (c < edge_cost(a, b)) {
          edge_cost(a, b) = c;
          edge_user(a, b) = v;
        }
      }
  };

  std::vector<double> dist(nk);
  std::vector<std::size_t> pred_server(nk), pred_user(nk);
  int flow = 0;
  for (;;) {
    for (std::size_t k = 0; k < nk; ++k) {
      while (head[k] < candidates[k].size() && assign[candidates[k][head[k]]] != kNone) ++head[k];
      pred_server[k] = kNone;
      pred_user[k] = kNone;
      dist[k] = kInf;
      if (head[k] < candidates[k].size()) {
        pred_user[k] = candidates[k][head[k]];
        dist[k] = -w(pred_user[k], k);
      }
    }
    // Bellman-Ford; the residual graph has no negative cycles.
    for (std::size_t pass = 0; pass < nk; ++pass) {
      bool changed = false;
      for (std::size_t a = 0; a < nk; ++a) {
        if (dist[a] == kInf || members[a].empty()) continue;
        for (std::size_t b = 0; b < nk; ++b) {
          const double c = edge_cost(a, b);
          if (c == kInf) continue;
          if (dist[a] + c < dist[b] - kEps) {
            dist[b] = dist[a] + c;
            pred_server[b] = a;
            pred_user[b] = edge_user(a, b);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    std::size_t sink = kNone;
    for (std::size_t k = 0; k < nk; ++k)
      if (load[k] < e.capacity[k] && dist[k] < kInf && (sink == kNone || dist[k] < dist[sink] - kEps))
        sink = k;
    if (sink == kNone) break;
    if (flow >= min_served && !(-dist[sink] > kEps)) break;

    std::vector<std::size_t> touched;
    std::size_t cur = sink;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > nk) throw std::logic_error("associate: cyclic augmenting path");
      const std::size_t v = pred_user[cur];
      const std::size_t from = pred_server[cur];
      if (from != kNone) {
        auto& m = members[from];
        m.erase(std::find(m.begin(), m.end(), v));
        touched.push_back(from);
      }
      assign[v] = cur;
      members[cur].push_back(v);
      touched.push_back(cur);
      if (from == kNone) break;
      cur = from;
    }
    ++load[sink];
    ++flow;
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t k : touched) rebuild_row(k);
  }

  std::vector<std::optional<std::size_t>> server_of(nu);
  for (std::size_t u = 0; u < nu; ++u)
    if (assign[u] != kNone) server_of[u] = assign[u];
  return detail::finish_outcome(e, std::move(server_of), min_served, lambda);
}

inline AssociationOutcome associate(const Eligibility& e, int min_served, double lambda,
                                    AssociationRule rule) {
  return rule == AssociationRule::Greedy ? associate_greedy(e, min_served, lambda)
                                         : associate(e, min_served, lambda);
}

}  // namespace istn
