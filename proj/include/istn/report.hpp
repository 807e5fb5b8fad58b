// SPDX-License-Identifier: Apache-2.0
//
// Per-seed training traces, their across-seed bands, and the files written
// for them:
//   metrics.csv  iteration,seed,reward,loss,epsilon,good,fair,poor,nosignal,served,leo_served
//   ci.csv       iteration,mean,lower,upper,smoothed_mean,smoothed_lower,smoothed_upper,
//                good,fair,poor,nosignal
//   episodes.csv seed,episode,steps,mean_reward
//   summary.json aggregate figures per run

#pragma once

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/agents/train.hpp"
#include "istn/stats.hpp"

namespace istn {

struct SeedSeries {
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
};

struct BandPoint {
  Interval raw;       ///< across seeds, per iteration
  Interval smoothed;  ///< across seeds, of each seed's trailing mean
  std::array<double, 4> categories{};  ///< mean counts across seeds
};

struct RunSummary {
  std::size_t seeds = 0;
  std::size_t iterations = 0;
  int users = 0;
  double mean_reward = 0.0;
  double final_mean_reward = 0.0;  ///< last 10% of iterations
  double served_fraction = 0.0;
  double leo_served_fraction = 0.0;
};

struct RunReport {
  std::string agent;
  std::vector<SeedSeries> series;
  std::vector<BandPoint> band;
  RunSummary summary;
};

inline constexpr const char* kMetricsHeader =
    "iteration,seed,reward,loss,epsilon,good,fair,poor,nosignal,served,leo_served";

/// Builds bands and the summary. Series shorter than the longest contribute
/// only where they have data; a single contributing seed gives a zero-width band.
inline RunReport build_report(std::string agent, std::vector<SeedSeries> series, int users,
                              std::size_t smoothing_window = 50, double level = 0.90) {
  RunReport rep;
  rep.agent = std::move(agent);
  rep.series = std::move(series);
  std::size_t len = 0;
  for (const auto& s : rep.series) len = std::max(len, s.records.size());

  std::vector<std::vector<double>> smooth;
  for (const auto& s : rep.series) {
    std::vector<double> r;
    for (const auto& rec : s.records) r.push_back(rec.reward);
    smooth.push_back(moving_average(r, std::max<std::size_t>(smoothing_window, 1)));
  }
  auto band_of = [&](const std::vector<double>& xs) {
    if (xs.size() >= 2) return confidence_interval(xs, level);
    const double m = xs.empty() ? 0.0 : xs[0];
    return Interval{m, m, m};
  };
  rep.band.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<double> raw, sm;
    std::array<double, 4> cat{};
    for (std::size_t k = 0; k < rep.series.size(); ++k) {
      if (i >= rep.series[k].records.size()) continue;
      const auto& rec = rep.series[k].records[i];
      raw.push_back(rec.reward);
      sm.push_back(smooth[k][i]);
      for (std::size_t c = 0; c < 4; ++c) cat[c] += rec.metrics.rsrp_categories[c];
    }
    for (auto& c : cat) c /= static_cast<double>(raw.size());
    rep.band[i] = {band_of(raw), band_of(sm), cat};
  }

  auto& sum = rep.summary;
  sum.seeds = rep.series.size();
  sum.iterations = len;
  sum.users = users;
  double reward = 0.0, fin = 0.0, served = 0.0, leo = 0.0;
  std::size_t n = 0, nf = 0;
  const std::size_t tail = len - len / 10;
  for (const auto& s : rep.series)
    for (std::size_t i = 0; i < s.records.size(); ++i) {
      const auto& rec = s.records[i];
      reward += rec.reward;
      served += rec.metrics.served;
      leo += rec.metrics.leo_served;
      ++n;
      if (i >= tail || len < 10) {
        fin += rec.reward;
        ++nf;
      }
    }
  if (n) {
    sum.mean_reward = reward / static_cast<double>(n);
    if (users > 0) {
      sum.served_fraction = served / static_cast<double>(n) / users;
      sum.leo_served_fraction = leo / static_cast<double>(n) / users;
    }
  }
  if (nf) sum.final_mean_reward = fin / static_cast<double>(nf);
  return rep;
}

namespace detail {
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// One row per iteration, seeds in report order.
inline void write_metrics_csv(std::ostream& os, const RunReport& rep) {
  os << kMetricsHeader << '\n';
  for (const auto& s : rep.series)
    for (const auto& r : s.records) {
      const auto& c = r.metrics.rsrp_categories;
      os << r.iteration << ',' << s.seed << ',' << detail::g17(r.reward) << ','
         << detail::g17(r.loss) << ',' << detail::g17(r.epsilon) << ',' << c[0] << ',' << c[1]
         << ',' << c[2] << ',' << c[3] << ',' << r.metrics.served << ',' << r.metrics.leo_served
         << '\n';
    }
}

/// Inverse of write_metrics_csv; records come back grouped by seed in file
/// order. Fields not stored in the file (objective, feasibility, terminal)
/// are left at their defaults.
inline std::vector<SeedSeries> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader)
    throw std::runtime_error("metrics csv: unexpected header");
  std::vector<SeedSeries> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11)
      throw std::runtime_error("metrics csv: row " + std::to_string(row) + " has " +
                               std::to_string(f.size()) + " fields");
    auto u64 = [&](const std::string& s) {
      char* end = nullptr;
      const auto v = std::strtoull(s.c_str(), &end, 10);
      if (end == s.c_str() || *end) throw std::runtime_error("metrics csv: bad integer on row " + std::to_string(row));
      return v;
    };
    auto dbl = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end) throw std::runtime_error("metrics csv: bad number on row " + std::to_string(row));
      return v;
    };
    IterationRecord r;
    r.iteration = u64(f[0]);
    const std::uint64_t seed = u64(f[1]);
    r.reward = dbl(f[2]);
    r.loss = dbl(f[3]);
    r.epsilon = dbl(f[4]);
    for (std::size_t c = 0; c < 4; ++c) r.metrics.rsrp_categories[c] = static_cast<int>(u64(f[5 + c]));
    r.metrics.served = static_cast<int>(u64(f[9]));
    r.metrics.leo_served = static_cast<int>(u64(f[10]));
    r.metrics.reward = r.reward;
    if (out.empty() || out.back().seed != seed) out.push_back({seed, {}});
    out.back().records.push_back(r);
  }
  return out;
}

inline void write_ci_csv(std::ostream& os, const RunReport& rep) {
  os << "iteration,mean,lower,upper,smoothed_mean,smoothed_lower,smoothed_upper,good,fair,poor,"
        "nosignal\n";
  for (std::size_t i = 0; i < rep.band.size(); ++i) {
    const auto& b = rep.band[i];
    os << i << ',' << detail::g17(b.raw.mean) << ',' << detail::g17(b.raw.lower) << ','
       << detail::g17(b.raw.upper) << ',' << detail::g17(b.smoothed.mean) << ','
       << detail::g17(b.smoothed.lower) << ',' << detail::g17(b.smoothed.upper);
    for (double c : b.categories) os << ',' << detail::g17(c);
    os << '\n';
  }
}

inline nlohmann::json summary_json(const RunReport& rep) {
  const auto& s = rep.summary;
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& ser : rep.series) seeds.push_back(ser.seed);
  return {{"agent", rep.agent},
          {"seeds", seeds},
          {"iterations", s.iterations},
          {"users", s.users},
          {"mean_reward", s.mean_reward},
          {"final_mean_reward", s.final_mean_reward},
          {"served_fraction", s.served_fraction},
          {"leo_served_fraction", s.leo_served_fraction}};
}

struct EpisodeMean {
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  std::size_t steps = 0;
  double mean_reward = 0.0;
};

/// Mean logged reward of each episode, split on terminal records. A trailing
/// partial episode is included with however many steps it has.
inline std::vector<EpisodeMean> episode_means(const RunReport& rep) {
  std::vector<EpisodeMean> out;
  for (const auto& s : rep.series) {
    EpisodeMean cur{s.seed, 0, 0, 0.0};
    for (const auto& r : s.records) {
      cur.mean_reward += r.reward;
      ++cur.steps;
      if (r.terminal) {
        cur.mean_reward /= static_cast<double>(cur.steps);
        out.push_back(cur);
        cur = {s.seed, cur.episode + 1, 0, 0.0};
      }
    }
    if (cur.steps) {
      cur.mean_reward /= static_cast<double>(cur.steps);
      out.push_back(cur);
    }
  }
  return out;
}

inline void write_episodes_csv(std::ostream& os, const RunReport& rep) {
  os << "seed,episode,steps,mean_reward\n";
  for (const auto& e : episode_means(rep))
    os << e.seed << ',' << e.episode << ',' << e.steps << ',' << detail::g17(e.mean_reward) << '\n';
}

/// Mean band width over iterations [from, to).
inline double mean_band_width(const RunReport& rep, std::size_t from, std::size_t to,
                              bool smoothed = true) {
  to = std::min(to, rep.band.size());
  if (from >= to) return 0.0;
  double w = 0.0;
  for (std::size_t i = from; i < to; ++i)
    w += smoothed ? rep.band[i].smoothed.width() : rep.band[i].raw.width();
  return w / static_cast<double>(to - from);
}

}  // namespace istn
