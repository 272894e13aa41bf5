#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rbassign/assignment.hpp"
#include "rbassign/neural.hpp"

namespace rbassign {

// epsilon(t) = floor + (initial - floor) * exp(-decay * t)
struct EpsilonSchedule {
  double initial = 0.8;
  double decay = 0.001;
  double floor = 0.01;

  double value(std::int64_t episode) const;
  void validate() const;
};

struct TrainerConfig {
  int episodes = 3000;
  int batch_size = 256;
  int target_update_period = 5;
  double discount = 0.0;
  std::size_t memory_capacity = 1000;
  int hidden_units = 64;
  AdamConfig adam{};
  EpsilonSchedule epsilon{};
  // Return the final joint action (if feasible) instead of the best
  // feasible assignment seen during training.
  bool return_last_action = false;

  void validate() const;
};

struct ExperienceTuple {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

// Bounded FIFO; once full, each push overwrites the oldest tuple.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(ExperienceTuple experience);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }
  bool empty() const { return size_ == 0; }

  // Index 0 is the oldest retained tuple.
  const ExperienceTuple& operator[](std::size_t i) const;

  // `count` distinct indices, uniformly at random.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::vector<ExperienceTuple> slots_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

// Per-agent observation: the shared assignment scaled to [0, 1] followed by
// the agent's SNR column. SNRs enter as log10(1 + snr), standardized over
// all J*N entries of the instance.
class StateEncoder {
 public:
  explicit StateEncoder(const Instance& instance);

  int state_size() const { return rbs_ + ues_; }
  int num_agents() const { return rbs_; }

  void encode(const Assignment& assignment, int rb, std::span<double> out) const;
  std::vector<double> encode(const Assignment& assignment, int rb) const;
  // Column n is agent n's state.
  Eigen::MatrixXd encode_all(const Assignment& assignment) const;

 private:
  int ues_;
  int rbs_;
  Eigen::MatrixXd snr_features_;  // J x N
};

// Each agent (column of `states`) explores uniformly with probability
// epsilon, otherwise takes the argmax of the target network's Q-values,
// lowest UE index on ties.
Assignment select_actions(const ValueNetwork& target, const Eigen::Ref<const Eigen::MatrixXd>& states,
                          double epsilon, Rng& rng);

// y = reward + discount * max_a' Q_target(s', a'); exactly the reward when
// discount is 0.
double build_target(const ExperienceTuple& experience, const ValueNetwork& target,
                    double discount);

struct TrainStepResult {
  bool trained = false;  // false when the memory was empty
  double loss = 0.0;
  std::vector<double> rewards;
  std::vector<double> targets;
};

// One Adam step on min(B, |memory|) tuples drawn without replacement.
TrainStepResult train_step(ValueNetwork& train, AdamState& adam, const ValueNetwork& target,
                           const ReplayMemory& memory, const TrainerConfig& config, Rng& rng);

struct EpisodeRecord {
  int episode = 0;
  double epsilon = 0.0;
  double reward = 0.0;
  bool feasible = false;
  double throughput = 0.0;
  std::optional<double> best_throughput;  // best feasible so far
  double loss = 0.0;
};

struct TrainingHooks {
  std::function<void(const EpisodeRecord&)> on_episode;
  std::function<void(std::span<const double> rewards, std::span<const double> targets)> on_batch;
};

struct TrainingResult {
  std::optional<Assignment> best;
  double best_throughput = 0.0;
  std::vector<double> reward_trace;
  // Best feasible throughput after each episode, NaN until the first one.
  std::vector<double> best_throughput_trace;
  Assignment last_action;
};

// Multi-agent double deep Q-learning: one agent per RB acting on a shared
// target network, one centrally trained network, common reward.
TrainingResult run_training(const Instance& instance, const TrainerConfig& config,
                            std::uint64_t seed, const TrainingHooks& hooks = {});

}  // namespace rbassign
