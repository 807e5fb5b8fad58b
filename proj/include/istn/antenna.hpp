// SPDX-License-Identifier: Apache-2.0
//
// Three-sector gNB antenna pattern (azimuth and elevation cuts summed in dB)
// and a flat-top satellite beam.

#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "istn/geometry.hpp"

namespace istn {

struct SectorPattern {
  double max_gain_dbi = 14.0;
  double front_back_db = 20.0;
  double sidelobe_db = 20.0;
  double azimuth_hpbw_deg = 70.0;
  double elevation_hpbw_deg = 65.0;

  void validate() const {
    if (!(max_gain_dbi > 0 && front_back_db > 0 && sidelobe_db > 0))
      throw std::invalid_argument("SectorPattern: gains and attenuations must be positive");
    auto hpbw_ok = [](double v) { return v > 0.0 && v < 180.0; };
    if (!hpbw_ok(azimuth_hpbw_deg) || !hpbw_ok(elevation_hpbw_deg))
      throw std::invalid_argument("SectorPattern: beamwidths must lie in (0, 180) degrees");
  }

  friend bool operator==(const SectorPattern&, const SectorPattern&) = default;
};

/// Total downtilt is mechanical plus electrical.
struct Downtilt {
  double mech_deg = 0.0;
  double elec_deg = 0.0;

  double total() const { return mech_deg + elec_deg; }
  friend bool operator==(const Downtilt&, const Downtilt&) = default;
};

struct SatelliteBeam {
  double boresight_gain_dbi = 40.0;
  double footprint_radius_m = 500'000.0;

  friend bool operator==(const SatelliteBeam&, const SatelliteBeam&) = default;
};

inline constexpr double kNoCoverageDbi = -std::numeric_limits<double>::infinity();

inline double azimuth_gain(const SectorPattern& p, double alpha_deg) {
  const double r = alpha_deg / p.azimuth_hpbw_deg;
  return -std::min(12.0 * r * r, p.front_back_db) + p.max_gain_dbi;
}

inline double elevation_gain(const SectorPattern& p, double beta_deg, const Downtilt& tilt) {
  const double r = (beta_deg - tilt.total()) / p.elevation_hpbw_deg;
  return -std::min(12.0 * r * r, p.sidelobe_db);
}

// Plain dB sum, no extra floor.
inline double gain_3d(const SectorPattern& p, double alpha_deg, double beta_deg,
                      const Downtilt& tilt) {
  return azimuth_gain(p, alpha_deg) + elevation_gain(p, beta_deg, tilt);
}

/// Boresight gain inside the footprint (edge inclusive), kNoCoverageDbi outside.
inline double satellite_gain(const SatelliteBeam& beam, const GroundPosition& user,
                             const SatelliteGeometry& sat) {
  return distance_2d(user, sat.nadir) <= beam.footprint_radius_m ? beam.boresight_gain_dbi
                                                                 : kNoCoverageDbi;
}

}  // namespace istn
