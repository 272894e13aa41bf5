#include "rbassign/ddqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbassign/errors.hpp"

namespace rbassign {

double EpsilonSchedule::value(std::int64_t episode) const {
  return floor + (initial - floor) * std::exp(-decay * static_cast<double>(episode));
}

void EpsilonSchedule::validate() const {
  if (!(initial >= 0.0 && initial <= 1.0) || !(floor >= 0.0 && floor <= initial) ||
      !(decay >= 0.0) || !std::isfinite(decay)) {
    throw ConfigError("epsilon schedule: require 0 <= floor <= initial <= 1 and decay >= 0");
  }
}

void TrainerConfig::validate() const {
  if (episodes < 0) throw ConfigError("trainer: episodes must be >= 0");
  if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
  if (target_update_period < 1) throw ConfigError("trainer: target_update_period must be >= 1");
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("trainer: discount must be in [0, 1)");
  if (memory_capacity < 1) throw ConfigError("trainer: memory_capacity must be >= 1");
  if (hidden_units < 1) throw ConfigError("trainer: hidden_units must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("trainer: learning rate must be > 0");
  epsilon.validate();
}

ReplayMemory::ReplayMemory(std::size_t capacity) : slots_(capacity) {
  if (capacity == 0) throw InvalidParameter("replay memory capacity must be >= 1");
}

void ReplayMemory::push(ExperienceTuple experience) {
  slots_[next_] = std::move(experience);
  next_ = (next_ + 1) % slots_.size();
  if (size_ < slots_.size()) ++size_;
}

const ExperienceTuple& ReplayMemory::operator[](std::size_t i) const {
  if (i >= size_) throw InvalidParameter("replay memory index out of range");
  const std::size_t oldest = size_ < slots_.size() ? 0 : next_;
  return slots_[(oldest + i) % slots_.size()];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count, Rng& rng) const {
  count = std::min(count, size_);
  std::vector<std::size_t> pool(size_);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size_ - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

StateEncoder::StateEncoder(const Instance& instance)
    : ues_(instance.num_ues()), rbs_(instance.num_rbs()) {
  snr_features_ = (instance.snr.array() + 1.0).log10().matrix();
  const double mean = snr_features_.mean();
  const double var = (snr_features_.array() - mean).square().mean();
  snr_features_.array() -= mean;
  if (var > 0.0) snr_features_ /= std::sqrt(var);
}

void StateEncoder::encode(const Assignment& assignment, int rb, std::span<double> out) const {
  if (static_cast<int>(out.size()) != state_size() || assignment.num_rbs() != rbs_ || rb < 0 ||
      rb >= rbs_) {
    throw InvalidParameter("StateEncoder::encode: shape mismatch");
  }
  const double scale = ues_ > 1 ? 1.0 / (ues_ - 1) : 0.0;
  for (int n = 0; n < rbs_; ++n) {
    out[static_cast<std::size_t>(n)] = assignment.rb_owner[static_cast<std::size_t>(n)] * scale;
  }
  for (int j = 0; j < ues_; ++j) out[static_cast<std::size_t>(rbs_ + j)] = snr_features_(j, rb);
}

std::vector<double> StateEncoder::encode(const Assignment& assignment, int rb) const {
  std::vector<double> out(static_cast<std::size_t>(state_size()));
  encode(assignment, rb, out);
  return out;
}

Eigen::MatrixXd StateEncoder::encode_all(const Assignment& assignment) const {
  Eigen::MatrixXd states(state_size(), rbs_);
  for (int n = 0; n < rbs_; ++n) {
    encode(assignment, n, std::span<double>(states.col(n).data(), static_cast<std::size_t>(state_size())));
  }
  return states;
}

Assignment select_actions(const ValueNetwork& target, const Eigen::Ref<const Eigen::MatrixXd>& states,
                          double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidParameter("select_actions: epsilon must be in [0, 1]");
  }
  const int agents = static_cast<int>(states.cols());
  const int actions = target.output_size();
  const Eigen::MatrixXd q = target.forward_batch(states);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, actions - 1);
  Assignment joint;
  joint.rb_owner.resize(static_cast<std::size_t>(agents));
  for (int n = 0; n < agents; ++n) {
    int choice;
    if (coin(rng) < epsilon) {
      choice = any_action(rng);
    } else {
      Eigen::Index best = 0;
      q.col(n).maxCoeff(&best);  // first maximal index
      choice = static_cast<int>(best);
    }
    joint.rb_owner[static_cast<std::size_t>(n)] = choice;
  }
  return joint;
}

double build_target(const ExperienceTuple& experience, const ValueNetwork& target,
                    double discount) {
  if (!std::isfinite(experience.reward)) throw TrainingError("build_target: non-finite reward");
  if (discount == 0.0) return experience.reward;
  return experience.reward + discount * target.forward(experience.next_state).maxCoeff();
}

TrainStepResult train_step(ValueNetwork& train, AdamState& adam, const ValueNetwork& target,
                           const ReplayMemory& memory, const TrainerConfig& config, Rng& rng) {
  TrainStepResult result;
  if (memory.empty()) return result;

  const auto picks = memory.sample_indices(static_cast<std::size_t>(config.batch_size), rng);
  TrainingBatch batch;
  batch.states.resize(train.input_size(), static_cast<Eigen::Index>(picks.size()));
  batch.actions.reserve(picks.size());
  batch.targets.reserve(picks.size());
  result.rewards.reserve(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& e = memory[picks[i]];
    batch.states.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(e.state.data(), static_cast<Eigen::Index>(e.state.size()));
    batch.actions.push_back(e.action);
    batch.targets.push_back(build_target(e, target, config.discount));
    result.rewards.push_back(e.reward);
  }

  auto [loss, gradient] = loss_and_gradient(train, batch);
  adam_step(train, gradient, adam);
  result.trained = true;
  result.loss = loss;
  result.targets = std::move(batch.targets);
  return result;
}

TrainingResult run_training(const Instance& instance, const TrainerConfig& config,
                            std::uint64_t seed, const TrainingHooks& hooks) {
  instance.validate();
  config.validate();

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x44514e41u};
  Rng rng(seq);

  const int ues = instance.num_ues();
  const int rbs = instance.num_rbs();
  const StateEncoder encoder(instance);

  ValueNetwork train = ValueNetwork::for_problem(rbs, ues, config.hidden_units, rng);
  ValueNetwork target = train;
  AdamState adam = AdamState::for_network(train, config.adam);
  ReplayMemory memory(config.memory_capacity);

  Assignment current;
  current.rb_owner.resize(static_cast<std::size_t>(rbs));
  std::uniform_int_distribution<int> any_ue(0, ues - 1);
  for (auto& owner : current.rb_owner) owner = any_ue(rng);

  TrainingResult result;
  result.reward_trace.reserve(static_cast<std::size_t>(config.episodes));
  result.best_throughput_trace.reserve(static_cast<std::size_t>(config.episodes));
  result.last_action = current;

  Eigen::MatrixXd states = encoder.encode_all(current);
  for (int episode = 0; episode < config.episodes; ++episode) {
    const double epsilon = config.epsilon.value(episode);
    Assignment joint = select_actions(target, states, epsilon, rng);

    const SatisfactionReport report = evaluate(instance, joint);
    const double phi = reward(instance, report);
    const double throughput = report.system_throughput();
    if (report.feasible && (!result.best || throughput > result.best_throughput)) {
      result.best = joint;
      result.best_throughput = throughput;
    }

    Eigen::MatrixXd next_states = encoder.encode_all(joint);
    for (int n = 0; n < rbs; ++n) {
      ExperienceTuple e;
      e.state.assign(states.col(n).data(), states.col(n).data() + states.rows());
      e.action = joint.rb_owner[static_cast<std::size_t>(n)];
      e.reward = phi;
      e.next_state.assign(next_states.col(n).data(), next_states.col(n).data() + next_states.rows());
      memory.push(std::move(e));
    }

    const TrainStepResult step = train_step(train, adam, target, memory, config, rng);
    if (hooks.on_batch && step.trained) hooks.on_batch(step.rewards, step.targets);
    if ((episode + 1) % config.target_update_period == 0) copy_parameters(train, target);

    result.reward_trace.push_back(phi);
    result.best_throughput_trace.push_back(result.best ? result.best_throughput
                                                       : std::numeric_limits<double>::quiet_NaN());
    if (hooks.on_episode) {
      EpisodeRecord record;
      record.episode = episode;
      record.epsilon = epsilon;
      record.reward = phi;
      record.feasible = report.feasible;
      record.throughput = throughput;
      if (result.best) record.best_throughput = result.best_throughput;
      record.loss = step.loss;
      hooks.on_episode(record);
    }

    states = std::move(next_states);
    result.last_action = std::move(joint);
  }

  if (!train.all_finite()) throw TrainingError("run_training: network parameters diverged");

  if (config.return_last_action) {
    result.best.reset();
    result.best_throughput = 0.0;
    if (config.episodes > 0) {
      const auto report = evaluate(instance, result.last_action);
      if (report.feasible) {
        result.best = result.last_action;
        result.best_throughput = report.system_throughput();
      }
    }
  }
  return result;
}

}  // namespace rbassign
