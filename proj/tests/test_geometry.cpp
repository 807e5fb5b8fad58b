// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "istn/geometry.hpp"

using namespace istn;

namespace {

constexpr double kRe = 6'378'000.0;
constexpr double kH = 550'000.0;

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double d) { return d * std::numbers::pi / 180.0; }

// Law of cosines in the Earth-center / user / satellite triangle.
double slant_by_triangle(double elev_deg) {
  const double e = rad(elev_deg);
  const double gamma = std::acos(kRe * std::cos(e) / (kRe + kH)) - e;
  return std::sqrt(kRe * kRe + (kRe + kH) * (kRe + kH) - 2.0 * kRe * (kRe + kH) * std::cos(gamma));
}

// Elevation from explicit 2-D vectors: user on the circle, satellite above
// the point at central angle gamma.
double elevation_by_vectors(double gamma_rad) {
  const double ux = kRe, uy = 0.0;
  const double sx = (kRe + kH) * std::cos(gamma_rad), sy = (kRe + kH) * std::sin(gamma_rad);
  const double dx = sx - ux, dy = sy - uy;
  const double up_dot = dx * 1.0 + dy * 0.0;  // local up is +x at the user
  return deg(std::asin(up_dot / std::hypot(dx, dy)));
}

}  // namespace

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance_3d({0, 0, 10}, {0, 0, 1.5}), 8.5);
  EXPECT_NEAR(distance_3d({0, 0, 10}, {100, 0, 1.5}), 100.3606, 1e-4);
  EXPECT_DOUBLE_EQ(distance_3d({3, 4, 2}, {3, 4, 2}), 0.0);
}

TEST(Distance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-1e4, 1e4), h(0, 100);
  for (int i = 0; i < 2000; ++i) {
    GroundPosition a{c(rng), c(rng), h(rng)}, b{c(rng), c(rng), h(rng)}, m{c(rng), c(rng), h(rng)};
    EXPECT_DOUBLE_EQ(distance_3d(a, b), distance_3d(b, a));
    EXPECT_LE(distance_3d(a, b), distance_3d(a, m) + distance_3d(m, b) + 1e-9);
  }
}

TEST(SlantRange, Zenith) {
  SatelliteGeometry sat;
  EXPECT_NEAR(slant_range(sat, 90.0) / kH, 1.0, 1e-9);
}

TEST(SlantRange, Horizon) {
  SatelliteGeometry sat;
  EXPECT_NEAR(slant_range(sat, 0.0) / 1000.0, 2705.235, 0.01);
  EXPECT_NEAR(slant_range(sat, 0.0), std::sqrt(kH * kH + 2 * kH * kRe), 1e-6);
}

TEST(SlantRange, MatchesTriangleOracle) {
  SatelliteGeometry sat;
  EXPECT_NEAR(slant_range(sat, 45.0), slant_by_triangle(45.0), 1e-6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(0.0, 90.0);
  for (int i = 0; i < 1000; ++i) {
    const double el = e(rng);
    EXPECT_NEAR(slant_range(sat, el), slant_by_triangle(el), 1e-5) << el;
  }
}

TEST(SlantRange, StrictlyDecreasing) {
  SatelliteGeometry sat;
  double prev = slant_range(sat, 0.0);
  for (double e = 0.05; e <= 90.0; e += 0.05) {
    const double d = slant_range(sat, e);
    EXPECT_LT(d, prev) << e;
    prev = d;
  }
}

TEST(SlantRange, RejectsOutOfRange) {
  SatelliteGeometry sat;
  EXPECT_THROW(slant_range(sat, -0.1), std::domain_error);
  EXPECT_THROW(slant_range(sat, 90.1), std::domain_error);
  EXPECT_THROW(slant_range(sat, std::nan("")), std::domain_error);
}

TEST(Elevation, NadirIsZenith) {
  SatelliteGeometry sat;
  sat.nadir = {1000.0, -2000.0, 0.0};
  EXPECT_NEAR(satellite_elevation({1000.0, -2000.0, 1.5}, sat), 90.0, 1e-6);
}

TEST(Elevation, TenDegreeCentralAngle) {
  SatelliteGeometry sat;
  const double gamma = rad(10.0);
  const GroundPosition user{gamma * kRe, 0.0, 1.5};
  EXPECT_NEAR(satellite_elevation(user, sat), elevation_by_vectors(gamma), 1e-9);
}

TEST(Elevation, MatchesVectorOracleAcrossVisibility) {
  SatelliteGeometry sat;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(1e-4, 0.35);
  for (int i = 0; i < 1000; ++i) {
    const double gamma = g(rng);
    const auto e = try_satellite_elevation({0.0, gamma * kRe, 0.0}, sat);
    const double oracle = elevation_by_vectors(gamma);
    if (oracle < 0.0) {
      EXPECT_FALSE(e.has_value());
    } else {
      ASSERT_TRUE(e.has_value());
      EXPECT_NEAR(*e, oracle, 1e-8);
    }
  }
}

TEST(Elevation, BelowHorizonSignals) {
  SatelliteGeometry sat;
  const GroundPosition far{rad(30.0) * kRe, 0.0, 0.0};
  EXPECT_FALSE(try_satellite_elevation(far, sat).has_value());
  try {
    satellite_elevation(far, sat);
    FAIL() << "expected BelowHorizonError";
  } catch (const BelowHorizonError& e) {
    EXPECT_LT(e.elevation_deg(), 0.0);
  }
}

TEST(VerticalAngle, Examples) {
  EXPECT_NEAR(vertical_angle_to_user({0, 0, 10}, {100, 0, 1.5}), 4.859, 1e-3);
  EXPECT_DOUBLE_EQ(vertical_angle_to_user({0, 0, 5}, {100, 0, 5}), 0.0);
  EXPECT_DOUBLE_EQ(vertical_angle_to_user({7, 7, 10}, {7, 7, 1.5}), 90.0);
}

TEST(Azimuth, Examples) {
  EXPECT_DOUBLE_EQ(azimuth_offset(120.0, 120.0), 0.0);
  EXPECT_DOUBLE_EQ(azimuth_offset(120.0, -170.0), 70.0);
  EXPECT_DOUBLE_EQ(azimuth_offset(0.0, 30.0), 30.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(540.0), 180.0);
}

TEST(Azimuth, WrapRange) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a(-2000.0, 2000.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = a(rng), y = a(rng);
    const double w = azimuth_offset(x, y);
    EXPECT_GT(w, -180.0);
    EXPECT_LE(w, 180.0);
    EXPECT_NEAR(std::remainder(w - (y - x), 360.0), 0.0, 1e-9);
    EXPECT_EQ(azimuth_offset(x, x), 0.0);
  }
}

TEST(Bearing, Quadrants) {
  EXPECT_DOUBLE_EQ(bearing_deg({0, 0, 0}, {1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(bearing_deg({0, 0, 0}, {0, 1, 0}), 90.0);
  EXPECT_DOUBLE_EQ(bearing_deg({0, 0, 0}, {-1, 0, 0}), 180.0);
  EXPECT_DOUBLE_EQ(bearing_deg({0, 0, 0}, {0, -1, 0}), -90.0);
}
