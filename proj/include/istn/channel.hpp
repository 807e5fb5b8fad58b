// SPDX-License-Identifier: Apache-2.0
//
// Link budget arithmetic: path loss, Rician fading, received power, RSRP,
// SINR with residual interference, exact and approximate rates.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace istn {

inline constexpr double kEulerGamma = 0.5772156649;
inline constexpr double kResourceBlockHz = 180e3;

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) {
  return mw > 0.0 ? 10.0 * std::log10(mw) : -std::numeric_limits<double>::infinity();
}

/// Thermal noise over `resource_blocks` RBs with the given receiver noise figure.
inline double thermal_noise_dbm(int resource_blocks, double noise_figure_db) {
  return -174.0 + noise_figure_db + 10.0 * std::log10(resource_blocks * kResourceBlockHz);
}

/// How RSSI is formed before the RSRP offset is removed.
enum class RssiMode : std::uint8_t {
  Total,       ///< serving signal + residual interference + noise
  SignalOnly,  ///< serving signal alone
};

inline std::string_view to_string(RssiMode m) {
  return m == RssiMode::Total ? "total" : "signal_only";
}

struct RadioConstants {
  double carrier_freq_tn_ghz = 3.5;
  double carrier_freq_ntn_ghz = 24.25;
  double pathloss_exponent = 3.5;
  int resource_blocks = 100;
  double noise_power_dbm = thermal_noise_dbm(100, 7.0);
  double residual_interference = 0.1;  // phi^RIC
  double rician_k_db = 10.0;
  double user_gain_dbi = 0.0;
  double euler_constant = kEulerGamma;
  RssiMode rssi_mode = RssiMode::Total;

  void validate() const {
    if (!(residual_interference >= 0.0 && residual_interference <= 1.0))
      throw std::invalid_argument("RadioConstants: residual interference must lie in [0, 1]");
    if (resource_blocks < 1) throw std::invalid_argument("RadioConstants: resource_blocks < 1");
    if (!(carrier_freq_tn_ghz > 0.0 && carrier_freq_ntn_ghz > 0.0))
      throw std::invalid_argument("RadioConstants: carrier frequencies must be positive");
    if (!(pathloss_exponent > 0.0))
      throw std::invalid_argument("RadioConstants: path-loss exponent must be positive");
    if (!std::isfinite(noise_power_dbm))
      throw std::invalid_argument("RadioConstants: noise power must be finite");
    if (euler_constant != kEulerGamma)
      throw std::invalid_argument("RadioConstants: euler_constant is fixed");
  }

  friend bool operator==(const RadioConstants&, const RadioConstants&) = default;
};

/// Everything computed for one user-server pair.
struct LinkBudgetReport {
  double tx_power_dbm = 0.0;
  double path_gain_db = 0.0;  ///< negative; -FSPL or -10 alpha log10(d)
  double server_gain_dbi = 0.0;
  double user_gain_dbi = 0.0;
  double fading_power = 1.0;
  double rssi_dbm = -std::numeric_limits<double>::infinity();
  double rsrp_dbm = -std::numeric_limits<double>::infinity();
  double sinr_linear = 0.0;
  double rate_exact = 0.0;
  double rate_approx = 0.0;
};

enum class RsrpCategory : std::uint8_t { Good = 0, Fair = 1, Poor = 2, NoSignal = 3 };

inline std::string_view to_string(RsrpCategory c) {
  switch (c) {
    case RsrpCategory::Good: return "good";
    case RsrpCategory::Fair: return "fair";
    case RsrpCategory::Poor: return "poor";
    case RsrpCategory::NoSignal: return "nosignal";
  }
  return "?";
}

/// Free-space path loss with f in GHz and d in meters.
inline double fspl_db(double freq_ghz, double dist_m) {
  if (!(freq_ghz > 0.0) || !(dist_m > 0.0))
    throw std::domain_error("fspl_db: frequency and distance must be positive");
  return 32.45 + 20.0 * std::log10(freq_ghz) + 20.0 * std::log10(dist_m);
}

/// |h|^2 of a unit-power Rician channel with K-factor `k_db`. K = +inf is the
/// pure line-of-sight limit and returns exactly 1.
template <class Rng>
double sample_rician_power(double k_db, Rng& rng) {
  if (k_db == std::numeric_limits<double>::infinity()) return 1.0;
  const double k = std::pow(10.0, k_db / 10.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double theta = phase(rng);
  const std::complex<double> los = std::sqrt(k / (k + 1.0)) * std::polar(1.0, theta);
  const std::complex<double> scatter =
      std::sqrt(1.0 / (k + 1.0)) * std::complex<double>(normal(rng), normal(rng));
  return std::norm(los + scatter);
}

inline double leo_received_power(double tx_dbm, double fspl, double sat_gain_dbi,
                                 double user_gain_dbi, double fading_power) {
  if (fading_power < 0.0) throw std::domain_error("leo_received_power: negative fading power");
  if (fading_power == 0.0) return -std::numeric_limits<double>::infinity();
  return tx_dbm + 10.0 * std::log10(fading_power) - fspl + sat_gain_dbi + user_gain_dbi;
}

inline double tn_path_gain_db(double dist3d_m, double alpha) {
  if (!(dist3d_m > 0.0)) throw std::domain_error("tn path gain: distance must be positive");
  return -10.0 * alpha * std::log10(dist3d_m);
}

inline double tn_received_power(double tx_dbm, double dist3d_m, double alpha, double gain3d_dbi,
                                double user_gain_dbi, double fading_power) {
  const double pg = tn_path_gain_db(dist3d_m, alpha);
  if (fading_power < 0.0) throw std::domain_error("tn_received_power: negative fading power");
  if (fading_power == 0.0) return -std::numeric_limits<double>::infinity();
  return tx_dbm + 10.0 * std::log10(fading_power) + pg + gain3d_dbi + user_gain_dbi;
}

inline double rsrp_from_rssi(double rssi_dbm, int resource_blocks) {
  if (resource_blocks < 1) throw std::domain_error("rsrp_from_rssi: need at least one RB");
  return rssi_dbm - 10.0 * std::log10(12.0 * resource_blocks);
}

inline double sinr(double signal_mw, std::span<const double> interferers_mw, double phi_ric,
                   double noise_mw) {
  const double interference = std::accumulate(interferers_mw.begin(), interferers_mw.end(), 0.0);
  return signal_mw / (phi_ric * interference + noise_mw);
}

inline double rate_exact(double sinr_linear) { return std::log2(1.0 + sinr_linear); }

/// Fading-averaged rate from the fading-free received power and the
/// interference-plus-noise denominator.
inline double rate_approx(double mean_signal_mw, double nu_mw, double euler = kEulerGamma) {
  return std::log2(1.0 + std::exp(-euler) * mean_signal_mw / nu_mw);
}

/// Good from -105 up, Fair [-115, -105), Poor [-124, -115), NoSignal below.
inline RsrpCategory categorize_rsrp(double rsrp_dbm) {
  if (rsrp_dbm >= -105.0) return RsrpCategory::Good;
  if (rsrp_dbm >= -115.0) return RsrpCategory::Fair;
  if (rsrp_dbm >= -124.0) return RsrpCategory::Poor;
  return RsrpCategory::NoSignal;
}

}  // namespace istn
