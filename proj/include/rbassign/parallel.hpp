#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbassign/ddqn.hpp"

namespace rbassign {

struct RunOutcome {
  int core = 0;
  std::uint64_t seed = 0;
  std::optional<Assignment> assignment;
  double throughput = 0.0;  // meaningful only when assignment is present
  int episodes = 0;
  double wall_seconds = 0.0;
};

struct ParallelResult {
  std::optional<std::size_t> selected;  // index into outcomes
  std::vector<RunOutcome> outcomes;

  bool outage() const { return !selected.has_value(); }
  const RunOutcome* selection() const { return selected ? &outcomes[*selected] : nullptr; }
};

struct ParallelOptions {
  // Worker threads; 0 uses the hardware concurrency. Does not affect results.
  int workers = 0;
  // When set, core k writes its episode log to <log_dir>/<log_prefix>core<k>.jsonl.
  std::optional<std::filesystem::path> log_dir;
  std::string log_prefix;
};

// Feasible outcome with the largest throughput, lowest core id on ties.
std::optional<std::size_t> select_best(std::span<const RunOutcome> outcomes);

// Seed for core k (0-based) of a restart group.
inline std::uint64_t core_seed(std::uint64_t seed_base, int core) {
  return seed_base + 1 + static_cast<std::uint64_t>(core);
}

// K independent trainings seeded seed_base+1 .. seed_base+K, then a
// best-of-K reduction.
ParallelResult run_parallel(const Instance& instance, const TrainerConfig& config, int cores,
                            std::uint64_t seed_base, const ParallelOptions& options = {});

// Runs `count` independent jobs on a small thread pool; job(i) must only
// touch state owned by index i. Rethrows the first exception.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

}  // namespace rbassign
