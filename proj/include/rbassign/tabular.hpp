#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rbassign/assignment.hpp"
#include "rbassign/ddqn.hpp"

namespace rbassign {

// Sparse Q-table over integer state keys. Rows are created on first write;
// anything never written reads as 0.
class QTable {
 public:
  QTable(int num_actions, double learning_rate, double discount);

  int num_actions() const { return num_actions_; }
  double learning_rate() const { return learning_rate_; }
  double discount() const { return discount_; }

  double value(std::uint64_t state, int action) const;
  double max_value(std::uint64_t state) const;
  // Lowest action index among the maximizers.
  int greedy_action(std::uint64_t state) const;

  // Q(s,a) <- (1 - alpha) Q(s,a) + alpha (reward + gamma max_a' Q(s',a'))
  void bellman_update(std::uint64_t state, int action, double reward, std::uint64_t next_state);

  std::size_t stored_states() const { return rows_.size(); }
  std::size_t stored_entries() const { return rows_.size() * static_cast<std::size_t>(num_actions_); }

 private:
  int num_actions_;
  double learning_rate_;
  double discount_;
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
};

struct TabularConfig {
  int episodes = 3000;
  double learning_rate = 0.1;
  double discount = 0.0;
  EpsilonSchedule epsilon{};

  void validate() const;
};

struct TabularResult {
  std::optional<Assignment> best;
  double best_throughput = 0.0;
  std::vector<double> reward_trace;
  std::vector<double> best_throughput_trace;
  std::size_t visited_states = 0;
  std::size_t table_entries = 0;
};

// Single-agent Q-learning whose state is the whole assignment and whose
// action reassigns one RB: action k moves RB k / J to UE k % J.
TabularResult run_tabular(const Instance& instance, const TabularConfig& config, std::uint64_t seed,
                          const std::function<void(const EpisodeRecord&)>& on_episode = {});

}  // namespace rbassign
