#include "rbassign/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "rbassign/errors.hpp"

namespace rbassign {

QTable::QTable(int num_actions, double learning_rate, double discount)
    : num_actions_(num_actions), learning_rate_(learning_rate), discount_(discount) {
  if (num_actions < 1) throw InvalidParameter("QTable: need at least one action");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw InvalidParameter("QTable: learning rate must be in (0, 1]");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw InvalidParameter("QTable: discount must be in [0, 1)");
  }
}

double QTable::value(std::uint64_t state, int action) const {
  if (action < 0 || action >= num_actions_) throw InvalidParameter("QTable: action out of range");
  auto it = rows_.find(state);
  return it == rows_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
}

double QTable::max_value(std::uint64_t state) const {
  auto it = rows_.find(state);
  if (it == rows_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

int QTable::greedy_action(std::uint64_t state) const {
  auto it = rows_.find(state);
  if (it == rows_.end()) return 0;
  return static_cast<int>(std::max_element(it->second.begin(), it->second.end()) - it->second.begin());
}

void QTable::bellman_update(std::uint64_t state, int action, double reward,
                            std::uint64_t next_state) {
  if (action < 0 || action >= num_actions_) throw InvalidParameter("QTable: action out of range");
  const double future = max_value(next_state);
  auto& row = rows_.try_emplace(state, static_cast<std::size_t>(num_actions_), 0.0).first->second;
  double& q = row[static_cast<std::size_t>(action)];
  q = (1.0 - learning_rate_) * q + learning_rate_ * (reward + discount_ * future);
}

void TabularConfig::validate() const {
  if (episodes < 0) throw ConfigError("tabular: episodes must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("tabular: learning rate must be in (0, 1]");
  }
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("tabular: discount must be in [0, 1)");
  epsilon.validate();
}

TabularResult run_tabular(const Instance& instance, const TabularConfig& config, std::uint64_t seed,
                          const std::function<void(const EpisodeRecord&)>& on_episode) {
  instance.validate();
  config.validate();
  const int ues = instance.num_ues();
  const int rbs = instance.num_rbs();
  if (static_cast<double>(rbs) * std::log2(static_cast<double>(std::max(ues, 2))) > 63.0) {
    throw ResourceLimit("run_tabular: J^N does not fit a 64-bit state key");
  }

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x51524131u};
  Rng rng(seq);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, rbs * ues - 1);
  std::uniform_int_distribution<int> any_ue(0, ues - 1);

  QTable table(rbs * ues, config.learning_rate, config.discount);
  Assignment current;
  current.rb_owner.resize(static_cast<std::size_t>(rbs));
  for (auto& owner : current.rb_owner) owner = any_ue(rng);

  TabularResult result;
  std::unordered_set<std::uint64_t> visited;
  std::uint64_t state = assignment_index(current, ues);
  visited.insert(state);

  for (int episode = 0; episode < config.episodes; ++episode) {
    const double epsilon = config.epsilon.value(episode);
    const int action = coin(rng) < epsilon ? any_action(rng) : table.greedy_action(state);

    Assignment next = current;
    next.rb_owner[static_cast<std::size_t>(action / ues)] = action % ues;
    const SatisfactionReport report = evaluate(instance, next);
    const double phi = reward(instance, report);
    const double throughput = report.system_throughput();
    if (report.feasible && (!result.best || throughput > result.best_throughput)) {
      result.best = next;
      result.best_throughput = throughput;
    }

    const std::uint64_t next_state = assignment_index(next, ues);
    table.bellman_update(state, action, phi, next_state);
    visited.insert(next_state);

    result.reward_trace.push_back(phi);
    result.best_throughput_trace.push_back(result.best ? result.best_throughput
                                                       : std::numeric_limits<double>::quiet_NaN());
    if (on_episode) {
      EpisodeRecord record;
      record.episode = episode;
      record.epsilon = epsilon;
      record.reward = phi;
      record.feasible = report.feasible;
      record.throughput = throughput;
      if (result.best) record.best_throughput = result.best_throughput;
      on_episode(record);
    }

    current = std::move(next);
    state = next_state;
  }
  result.visited_states = visited.size();
  result.table_entries = table.stored_entries();
  return result;
}

}  // namespace rbassign
