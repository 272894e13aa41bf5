#include "rbassign/parallel.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "rbassign/errors.hpp"
#include "rbassign/run_log.hpp"

namespace rbassign {

std::optional<std::size_t> select_best(std::span<const RunOutcome> outcomes) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.assignment) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = outcomes[*best];
    if (o.throughput > b.throughput || (o.throughput == b.throughput && o.core < b.core)) best = i;
  }
  return best;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ParallelResult run_parallel(const Instance& instance, const TrainerConfig& config, int cores,
                            std::uint64_t seed_base, const ParallelOptions& options) {
  if (cores < 1) throw InvalidParameter("run_parallel: need at least one core");
  if (options.log_dir) std::filesystem::create_directories(*options.log_dir);

  ParallelResult result;
  result.outcomes.resize(static_cast<std::size_t>(cores));
  parallel_for(result.outcomes.size(), options.workers, [&](std::size_t k) {
    RunOutcome& outcome = result.outcomes[k];
    outcome.core = static_cast<int>(k);
    outcome.seed = core_seed(seed_base, outcome.core);

    TrainingHooks hooks;
    std::ofstream log;
    if (options.log_dir) {
      const auto path =
          *options.log_dir / (options.log_prefix + "core" + std::to_string(k) + ".jsonl");
      log.open(path);
      if (!log) throw ConfigError("run_parallel: cannot open " + path.string());
      hooks.on_episode = [&log](const EpisodeRecord& r) { write_episode_jsonl(log, r); };
    }

    const auto start = std::chrono::steady_clock::now();
    TrainingResult run = run_training(instance, config, outcome.seed, hooks);
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcome.episodes = config.episodes;
    outcome.assignment = std::move(run.best);
    outcome.throughput = outcome.assignment ? run.best_throughput : 0.0;
  });
  result.selected = select_best(result.outcomes);
  return result;
}

}  // namespace rbassign
