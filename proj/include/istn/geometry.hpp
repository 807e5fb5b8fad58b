// SPDX-License-Identifier: Apache-2.0
//
// Positions, distances and look angles for the terrestrial and satellite
// segments. The terrestrial plane is flat; Earth curvature only enters
// through the satellite slant range and elevation.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace istn {

inline constexpr double kEarthRadiusM = 6'378'000.0;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Point on (or above) the flat ground plane, all in meters.
struct GroundPosition {
  double x = 0.0;
  double y = 0.0;
  double altitude = 0.0;

  friend bool operator==(const GroundPosition&, const GroundPosition&) = default;
};

struct SatelliteGeometry {
  double altitude_m = 550'000.0;
  GroundPosition nadir{};  ///< sub-satellite point on the ground plane
  double earth_radius_m = kEarthRadiusM;

  friend bool operator==(const SatelliteGeometry&, const SatelliteGeometry&) = default;
};

class BelowHorizonError : public std::domain_error {
 public:
  explicit BelowHorizonError(double elevation_deg)
      : std::domain_error("satellite below horizon (elevation " +
                          std::to_string(elevation_deg) + " deg)"),
        elevation_deg_(elevation_deg) {}
  double elevation_deg() const noexcept { return elevation_deg_; }

 private:
  double elevation_deg_;
};

inline double distance_2d(const GroundPosition& a, const GroundPosition& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const GroundPosition& gnb, const GroundPosition& user) {
  const double dh = gnb.altitude - user.altitude;
  const double d2 = distance_2d(gnb, user);
  return std::sqrt(dh * dh + d2 * d2);
}

/// User-to-satellite distance through a spherical Earth for a given
/// elevation angle in degrees, valid on [0, 90].
inline double slant_range(const SatelliteGeometry& sat, double elevation_deg) {
  if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0))
    throw std::domain_error("slant_range: elevation must lie in [0, 90] degrees");
  const double re = sat.earth_radius_m;
  const double hs = sat.altitude_m;
  const double s = std::sin(deg_to_rad(elevation_deg));
  return std::sqrt(re * re * s * s + hs * hs + 2.0 * hs * re) - re * s;
}

/// Elevation of the satellite seen from `user`, or nullopt when the
/// satellite sits below the local horizon. The central angle is the ground
/// arc to the nadir point divided by the Earth radius.
inline std::optional<double> try_satellite_elevation(const GroundPosition& user,
                                                     const SatelliteGeometry& sat) {
  const double re = sat.earth_radius_m;
  const double gamma = distance_2d(user, sat.nadir) / re;
  const double num = std::cos(gamma) - re / (re + sat.altitude_m);
  const double elev = rad_to_deg(std::atan2(num, std::sin(gamma)));
  if (elev < 0.0) return std::nullopt;
  return elev;
}

inline double satellite_elevation(const GroundPosition& user, const SatelliteGeometry& sat) {
  if (auto e = try_satellite_elevation(user, sat)) return *e;
  const double re = sat.earth_radius_m;
  const double gamma = distance_2d(user, sat.nadir) / re;
  throw BelowHorizonError(
      rad_to_deg(std::atan2(std::cos(gamma) - re / (re + sat.altitude_m), std::sin(gamma))));
}

/// Angle below the mast's horizontal at which the user is seen; positive
/// when looking down. A user directly beneath the mast reads 90 degrees.
inline double vertical_angle_to_user(const GroundPosition& gnb, const GroundPosition& user) {
  const double d2 = distance_2d(gnb, user);
  if (d2 == 0.0) return 90.0;
  return rad_to_deg(std::atan((gnb.altitude - user.altitude) / d2));
}

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  else if (r > 180.0) r -= 360.0;
  return r;
}

/// Horizontal bearing from the x-axis to `to`, seen from `from`, in degrees.
inline double bearing_deg(const GroundPosition& from, const GroundPosition& to) {
  return rad_to_deg(std::atan2(to.y - from.y, to.x - from.x));
}

/// Horizontal offset of a user bearing from the sector boresight.
inline double azimuth_offset(double boresight_deg, double bearing_to_user_deg) {
  return wrap_degrees(bearing_to_user_deg - boresight_deg);
}

}  // namespace istn
