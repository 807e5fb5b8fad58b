// SPDX-License-Identifier: Apache-2.0
//
// Tabular Q-learning baseline over discretised states.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace istn {

/// Sparse action-value table; entries never written read as zero.
class QTable {
 public:
  explicit QTable(std::size_t action_count = 0) : actions_(action_count) {}

  std::size_t action_count() const { return actions_; }
  std::size_t state_count() const { return rows_.size(); }

  double value(std::uint64_t key, std::size_t action) const {
    auto it = rows_.find(key);
    if (it == rows_.end()) return 0.0;
    auto jt = it->second.find(static_cast<std::uint32_t>(action));
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  void set(std::uint64_t key, std::size_t action, double v) {
    if (action >= actions_) throw std::out_of_range("QTable::set: action out of range");
    rows_[key][static_cast<std::uint32_t>(action)] = v;
  }

  double max_value(std::uint64_t key) const {
    auto it = rows_.find(key);
    if (it == rows_.end() || it->second.empty()) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [a, v] : it->second) best = std::max(best, v);
    if (it->second.size() < actions_) best = std::max(best, 0.0);
    return best;
  }

  /// Greedy action, lowest index on ties.
  std::size_t argmax(std::uint64_t key) const {
    auto it = rows_.find(key);
    if (it == rows_.end()) return 0;
    const double best = max_value(key);
    for (std::size_t a = 0; a < actions_; ++a)
      if (value(key, a) == best) return a;
    return 0;
  }

  /// All stored entries ordered by (key, action).
  std::vector<std::tuple<std::uint64_t, std::uint32_t, double>> entries() const {
    std::map<std::uint64_t, std::map<std::uint32_t, double>> sorted;
    for (const auto& [k, row] : rows_)
      for (const auto& [a, v] : row) sorted[k][a] = v;
    std::vector<std::tuple<std::uint64_t, std::uint32_t, double>> out;
    for (const auto& [k, row] : sorted)
      for (const auto& [a, v] : row) out.emplace_back(k, a, v);
    return out;
  }

  friend bool operator==(const QTable& a, const QTable& b) {
    return a.actions_ == b.actions_ && a.entries() == b.entries();
  }

 private:
  std::size_t actions_;
  std::unordered_map<std::uint64_t, std::unordered_map<std::uint32_t, double>> rows_;
};

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); the bootstrap
/// term is dropped on terminal transitions. Returns the new value.
inline double ql_update(QTable& table, std::uint64_t state_key, std::size_t action, double reward,
                        std::uint64_t next_key, double alpha, double gamma, bool terminal = false) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ql_update: alpha must lie in (0, 1]");
  const double q = table.value(state_key, action);
  const double target = reward + (terminal ? 0.0 : gamma * table.max_value(next_key));
  const double updated = q + alpha * (target - q);
  table.set(state_key, action, updated);
  return updated;
}

template <class RngT>
std::size_t select_action(const QTable& table, std::uint64_t key, double epsilon, RngT& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, table.action_count() - 1);
      return pick(rng);
    }
  }
  return table.argmax(key);
}

}  // namespace istn
