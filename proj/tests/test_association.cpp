// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "istn/association.hpp"
#include "support.hpp"

using namespace istn;
using test::kNaN;
using test::make_eligibility;

namespace {

void expect_sound(const AssociationOutcome& o, const Eligibility& e) {
  EXPECT_EQ(test::association_violation(o, e), "");
}

}  // namespace

TEST(Association, TwoUsersOneCell) {
  const auto e = make_eligibility({{3.0}, {2.0}}, 1, {1});
  const auto o = associate(e, 0, 0.5);
  EXPECT_EQ(o.server_of[0], 0u);
  EXPECT_FALSE(o.server_of[1].has_value());
  EXPECT_DOUBLE_EQ(o.objective, 3.0);
  EXPECT_EQ(test::brute_force_association(e, 0, 0.5).objective, 3.0);
}

TEST(Association, SatelliteOnlyUser) {
  const auto e = make_eligibility({{kNaN, 1.5}}, 1, {5, 5});
  const auto o = associate(e, 1, 0.5);
  EXPECT_EQ(o.server_of[0], 1u);
  EXPECT_EQ(o.leo_served_count, 1);
  EXPECT_DOUBLE_EQ(o.objective, 1.0);
  EXPECT_TRUE(o.meets_min_served);
}

TEST(Association, NobodyPasses) {
  const auto e = make_eligibility({{kNaN, kNaN}, {kNaN, kNaN}}, 1, {5, 5});
  for (auto rule : {AssociationRule::Optimal, AssociationRule::Greedy}) {
    const auto o = associate(e, 1, 0.5, rule);
    EXPECT_EQ(o.served_count, 0);
    EXPECT_DOUBLE_EQ(o.objective, 0.0);
    EXPECT_FALSE(o.meets_min_served);
  }
}

TEST(Association, ObjectiveValue) {
  const auto e = make_eligibility({{2.0, kNaN}, {kNaN, 1.5}}, 1, {5, 5});
  const auto o = associate(e, 0, 0.5);
  EXPECT_DOUBLE_EQ(objective_value(o, e, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(objective_value(o, e, 0.0), 3.5);
  EXPECT_LT(objective_value(o, e, 0.9), objective_value(o, e, 0.5));
  const auto none = associate(make_eligibility({{kNaN, kNaN}}, 1, {5, 5}), 0, 0.5);
  EXPECT_DOUBLE_EQ(objective_value(none, e, 0.5), 0.0);
}

TEST(Association, ObjectiveConstantInLambdaWithoutSatelliteUsers) {
  const auto e = make_eligibility({{2.0, kNaN}, {1.0, kNaN}}, 1, {5, 5});
  const auto o = associate(e, 0, 0.5);
  EXPECT_EQ(o.leo_served_count, 0);
  EXPECT_DOUBLE_EQ(objective_value(o, e, 0.0), objective_value(o, e, 7.0));
}

TEST(Association, InactiveServersNeverUsed) {
  const auto e = make_eligibility({{5.0, 1.0}}, 2, {5, 5}, {0, 1});
  const auto o = associate(e, 0, 0.0);
  EXPECT_EQ(o.server_of[0], 1u);
}

// The rate-descending greedy rule is not optimal in general: user 0 grabs
// the shared cell and user 1, which can only use that cell, is dropped.
TEST(Association, GreedyCounterexample) {
  const auto e = make_eligibility({{3.0, 2.9}, {2.95, kNaN}}, 2, {1, 1});
  const auto g = associate_greedy(e, 0, 0.0);
  const auto x = associate(e, 0, 0.0);
  EXPECT_DOUBLE_EQ(g.objective, 3.0);
  EXPECT_DOUBLE_EQ(x.objective, 2.9 + 2.95);
  EXPECT_DOUBLE_EQ(test::brute_force_association(e, 0, 0.0).objective, 2.9 + 2.95);
}

// Serving an extra user can lower the objective (a satellite user with a
// rate below lambda); the minimum-served constraint forces it anyway.
TEST(Association, MinimumServedForcesLossyAssignments) {
  const auto e = make_eligibility({{2.0, kNaN}, {kNaN, 0.3}}, 1, {5, 5});
  const auto free = associate(e, 0, 0.5);
  EXPECT_EQ(free.served_count, 1);
  EXPECT_DOUBLE_EQ(free.objective, 2.0);
  const auto forced = associate(e, 2, 0.5);
  EXPECT_EQ(forced.served_count, 2);
  EXPECT_NEAR(forced.objective, 1.8, 1e-12);
  EXPECT_TRUE(forced.meets_min_served);
}

TEST(Association, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nu_d(1, 6), nk_d(1, 3), cap_d(0, 2), coin(0, 3);
  std::uniform_real_distribution<double> rate(0.0, 4.0), lam(0.0, 1.5);
  int checked = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const int nu = nu_d(rng), nk = nk_d(rng);
    std::uniform_int_distribution<int> sc(0, nk);
    const std::size_t ns = static_cast<std::size_t>(sc(rng));
    std::vector<std::vector<double>> r(nu, std::vector<double>(nk));
    for (auto& row : r)
      for (auto& v : row) v = coin(rng) == 0 ? kNaN : rate(rng);
    std::vector<int> cap(nk);
    for (auto& c : cap) c = cap_d(rng);
    const auto e = make_eligibility(r, ns, cap);
    const double lambda = lam(rng);
    std::uniform_int_distribution<int> md(0, nu);
    const int min_served = md(rng);
    const auto o = associate(e, min_served, lambda);
    const auto bf = test::brute_force_association(e, min_served, lambda);
    ASSERT_NEAR(o.objective, bf.objective, 1e-9) << "trial " << trial;
    ASSERT_EQ(o.served_count >= min_served, bf.served >= min_served) << "trial " << trial;
    if (bf.served < min_served) ASSERT_EQ(o.served_count, bf.served) << "trial " << trial;
    expect_sound(o, e);
    expect_sound(associate_greedy(e, min_served, lambda), e);
    ++checked;
  }
  EXPECT_GE(checked, 500);
}

TEST(Eligibility, ScenarioFlags) {
  Scenario s = test::small_outage_scenario(3, 60);
  const auto controls = controls_from(s);
  const auto e = eligibility(s, controls);
  ASSERT_EQ(e.servers(), s.sector_count() + s.leos.size());
  for (std::size_t u = 0; u < e.users(); ++u) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_FALSE(e.server_active[k]);
      EXPECT_FALSE(e.feasible(u, k));
    }
    for (std::size_t k = 0; k < e.servers(); ++k) {
      const auto& r = e.links(u, k);
      if (!e.server_active[k]) continue;
      EXPECT_LE(r.rsrp_dbm, r.rssi_dbm);
      EXPECT_GE(r.sinr_linear, 0.0);
      EXPECT_GE(r.rate_approx, 0.0);
      EXPECT_LE(r.rate_approx, r.rate_exact);
    }
  }
}

TEST(Eligibility, ThresholdIsInclusive) {
  Scenario s = test::small_outage_scenario(3, 5);
  const auto controls = controls_from(s);
  auto e = eligibility(s, controls);
  const std::size_t k = 4;  // gNB 1, sector 1
  const double rsrp = e.links(0, k).rsrp_dbm;
  s.gnbs[1].sectors[1].rsrp_threshold_dbm = rsrp;
  EXPECT_TRUE(eligibility(s, controls).rsrp_ok(0, k));
  s.gnbs[1].sectors[1].rsrp_threshold_dbm = std::nextafter(rsrp, 0.0);
  EXPECT_FALSE(eligibility(s, controls).rsrp_ok(0, k));
}

TEST(Eligibility, OutsideFootprintFailsSatellite) {
  Scenario s = test::small_outage_scenario(3, 2);
  s.users[0].position = {900'000.0, 0.0, 1.5};
  const auto e = eligibility(s, controls_from(s));
  for (std::size_t k = s.sector_count(); k < e.servers(); ++k) EXPECT_FALSE(e.rsrp_ok(0, k));
}

TEST(Association, ScenarioOutcomesAreSound) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> p(0.0, 37.0), t(0.0, 14.0);
  for (int i = 0; i < 30; ++i) {
    Scenario s = test::small_outage_scenario(100 + i, 80);
    s.capacity.per_cell = 6;
    s.capacity.per_satellite = 10;
    s.capacity.min_served = 30;
    auto c = controls_from(s);
    for (auto& x : c) x = {p(rng), t(rng)};
    const auto e = eligibility(s, c);
    expect_sound(associate(e, 30, 0.5), e);
    expect_sound(associate_greedy(e, 30, 0.5), e);
  }
}
