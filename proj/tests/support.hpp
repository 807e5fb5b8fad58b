// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent oracles for the test suite.

#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "istn/agents/qnetwork.hpp"
#include "istn/association.hpp"
#include "istn/scenario.hpp"

namespace istn::test {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Hand-built eligibility: rates(u, k) is the approximate rate of a feasible
/// pair, NaN marks a pair failing the RSRP check.
inline Eligibility make_eligibility(const std::vector<std::vector<double>>& rates,
                                    std::size_t sector_count, std::vector<int> capacity,
                                    std::vector<std::uint8_t> active = {}) {
  const std::size_t nu = rates.size(), nk = nu ? rates[0].size() : capacity.size();
  Eligibility e;
  e.links = Grid<LinkBudgetReport>(nu, nk);
  e.rsrp_ok = Grid<std::uint8_t>(nu, nk, 0);
  e.rate_ok = Grid<std::uint8_t>(nu, nk, 0);
  e.demand.assign(nu, 0.0);
  e.server_active = active.empty() ? std::vector<std::uint8_t>(nk, 1) : active;
  e.capacity = std::move(capacity);
  e.sector_count = sector_count;
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t k = 0; k < nk; ++k) {
      const double r = rates[u][k];
      if (std::isnan(r)) continue;
      e.links(u, k).rate_approx = r;
      e.rsrp_ok(u, k) = 1;
      e.rate_ok(u, k) = 1;
    }
  return e;
}

struct BruteForce {
  double objective = 0.0;
  int served = 0;
};

/// Exhaustive search over every assignment (each user: unserved or any
/// feasible server, capacities respected). Among assignments serving at
/// least `min_served` users the best objective wins; if none exists, the
/// largest served count wins, then the objective.
inline BruteForce brute_force_association(const Eligibility& e, int min_served, double lambda) {
  const std::size_t nu = e.users(), nk = e.servers();
  std::vector<int> choice(nu, -1), load(nk, 0);
  BruteForce best{-std::numeric_limits<double>::infinity(), -1};
  bool best_feasible = false;
  auto visit = [&](auto&& self, std::size_t u, double obj, int served) -> void {
    if (u == nu) {
      const bool feas = served >= min_served;
      const bool better =
          feas ? (!best_feasible || obj > best.objective + 1e-12)
               : (!best_feasible && (served > best.served ||
                                     (served == best.served && obj > best.objective + 1e-12)));
      if (better) {
        best = {obj, served};
        best_feasible = feas;
      }
      return;
    }
    self(self, u + 1, obj, served);
    for (std::size_t k = 0; k < nk; ++k) {
      if (!e.feasible(u, k) || load[k] >= e.capacity[k]) continue;
      ++load[k];
      const double w = e.links(u, k).rate_approx - (e.is_satellite(k) ? lambda : 0.0);
      self(self, u + 1, obj + w, served + 1);
      --load[k];
    }
  };
  visit(visit, 0, 0.0, 0);
  return best;
}

/// First violated association constraint, or empty when the outcome is sound:
/// at most one server per user, capacities respected, service only on
/// selected, RSRP-passing, rate-passing links of active servers.
inline std::string association_violation(const AssociationOutcome& o, const Eligibility& e) {
  const std::size_t nu = e.users(), nk = e.servers();
  std::vector<int> load(nk, 0);
  int served = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    int picked = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      picked += o.kappa(u, k);
      if (o.kappa(u, k) && !e.server_active[k]) return "user selects an inactive server";
      if (!o.pi(u, k)) continue;
      if (!o.kappa(u, k)) return "served without selection";
      if (!e.rsrp_ok(u, k)) return "served below RSRP threshold";
      if (!o.zeta_rate_ok(u, k) || e.links(u, k).rate_approx < e.demand[u])
        return "served below demanded rate";
      ++load[k];
      ++served;
    }
    if (picked > 1) return "user selects more than one server";
  }
  for (std::size_t k = 0; k < nk; ++k) {
    if (load[k] > e.capacity[k]) return "server over capacity";
    if (load[k] != o.per_server_load[k]) return "load bookkeeping mismatch";
  }
  if (served != o.served_count) return "served count mismatch";
  return {};
}

/// Largest relative error ||g_analytic - g_fd|| / max(||g_analytic|| + ||g_fd||, tiny)
/// taken per layer tensor, central differences with step h.
inline double gradient_check(const QNetwork& net, const Eigen::MatrixXd& states,
                             const std::vector<std::size_t>& actions,
                             const std::vector<double>& targets, double h = 1e-6) {
  NetworkParams g;
  net.loss(states, actions, targets, &g);
  QNetwork probe = net;
  double worst = 0.0;
  auto check = [&](auto& param, const auto& analytic) {
    Eigen::MatrixXd fd(param.rows(), param.cols());
    for (Eigen::Index r = 0; r < param.rows(); ++r)
      for (Eigen::Index c = 0; c < param.cols(); ++c) {
        const double keep = param(r, c);
        param(r, c) = keep + h;
        const double up = probe.loss(states, actions, targets);
        param(r, c) = keep - h;
        const double down = probe.loss(states, actions, targets);
        param(r, c) = keep;
        fd(r, c) = (up - down) / (2.0 * h);
      }
    const Eigen::MatrixXd a = analytic;
    const double denom = std::max(a.norm() + fd.norm(), 1e-12);
    worst = std::max(worst, (a - fd).norm() / denom);
  };
  for (std::size_t l = 0; l < probe.layers().size(); ++l) {
    check(probe.layers()[l].weights, g.layers[l].weights);
    check(probe.layers()[l].bias, g.layers[l].bias);
  }
  return worst;
}

/// Random network and batch for gradient checks; inputs and outputs O(1).
struct GradientCase {
  QNetwork net;
  Eigen::MatrixXd states;
  std::vector<std::size_t> actions;
  std::vector<double> targets;
};

inline GradientCase random_gradient_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> width(1, 8), depth(0, 2), batch(1, 8);
  std::uniform_real_distribution<double> x(-1.0, 1.0), y(-2.0, 2.0);
  std::vector<std::size_t> sizes{width(rng)};
  for (std::size_t d = depth(rng); d-- > 0;) sizes.push_back(width(rng));
  sizes.push_back(width(rng));
  GradientCase c{QNetwork(sizes, rng), {}, {}, {}};
  for (auto& l : c.net.layers())
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * x(rng);
  const auto n = static_cast<Eigen::Index>(batch(rng));
  c.states.resize(static_cast<Eigen::Index>(sizes.front()), n);
  for (Eigen::Index i = 0; i < c.states.size(); ++i) c.states.data()[i] = x(rng);
  std::uniform_int_distribution<std::size_t> act(0, sizes.back() - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.actions.push_back(act(rng));
    c.targets.push_back(y(rng));
  }
  return c;
}

/// The 7-site, 200-user, 2-LEO layout with the center site failed.
inline Scenario small_outage_scenario(std::uint64_t seed = 7, int users = 200) {
  ScenarioParams p;
  p.layout.rings = 1;
  p.layout.isd_m = 1000.0;
  p.leo_count = 2;
  p.user_drop.count = users;
  Scenario s = make_scenario(p, seed);
  const std::size_t off[] = {0};
  return apply_outage(s, off);
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("istn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace istn::test
