#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbassign/ddqn.hpp"
#include "rbassign/parallel.hpp"
#include "rbassign/radio.hpp"
#include "rbassign/tabular.hpp"

namespace rbassign {

// QoS level k (1-based) asks 150 + 70 (k - 1) kbps of service-0 UEs; each
// further service asks service_offset_bps more than the previous one.
struct QosSweep {
  int levels = 11;
  double base_bps = 150e3;
  double step_bps = 70e3;
  double service_offset_bps = 150e3;

  double target(int level, int service) const;
  std::vector<double> ue_targets(int level, const std::vector<int>& service_of_ue) const;
  ScenarioConfig apply(ScenarioConfig config, int level) const;
};

struct FeasibleInstanceSet {
  std::vector<Instance> instances;
  std::uint64_t draws = 0;
  std::uint64_t rejected = 0;

  double rejection_rate() const {
    return draws == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(draws);
  }
};

// Seed of draw i of a master seed. Draw i uses the same channel realization
// at every QoS level, so higher levels keep a subset of the lower levels'
// channels.
std::uint64_t draw_seed(std::uint64_t master_seed, std::uint64_t draw);

// Draws instances (ids = draw index) and keeps the certified-feasible ones
// until `count` are collected. Throws ResourceLimit once at least 100 draws
// have been made and more than `max_rejection` of them were infeasible.
FeasibleInstanceSet generate_feasible_instances(const ScenarioConfig& config, std::size_t count,
                                                std::uint64_t master_seed,
                                                double max_rejection = 0.99);

enum class Algorithm { kOpt, kDeep, kTabular, kRandom };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct BenchmarkConfig {
  TrainerConfig trainer;
  TabularConfig tabular;
  int cores = 10;
  std::uint64_t master_seed = 1;
  int workers = 0;  // instance-level threads; 0 = hardware concurrency
  std::optional<std::filesystem::path> log_dir;
};

// Result of one algorithm on one instance.
struct InstanceOutcome {
  Algorithm algorithm = Algorithm::kOpt;
  int level = 0;
  std::uint64_t instance_id = 0;
  bool feasible = false;
  double throughput = 0.0;
  double opt_throughput = 0.0;
  std::vector<RunOutcome> cores;  // deep method only
};

// Seed base for (algorithm, level, instance); independent of thread layout.
std::uint64_t run_seed(std::uint64_t master_seed, Algorithm algorithm, int level,
                       std::uint64_t instance_id);

std::vector<InstanceOutcome> run_algorithm(Algorithm algorithm, int level,
                                           const std::vector<Instance>& instances,
                                           const BenchmarkConfig& config);

struct MetricRow {
  std::string algorithm;
  int qos_level = 0;
  int cores = 0;
  int episodes = 0;
  std::size_t instances = 0;
  std::size_t outages = 0;
  double outage_rate = 0.0;
  double outage_ci95 = 0.0;
  // Mean over non-outage instances only.
  double mean_throughput = 0.0;
  double throughput_ci95 = 0.0;
};

// 1.96 * sample standard deviation / sqrt(n); 0 for n < 2.
double ci95_half_width(const std::vector<double>& samples);

MetricRow aggregate(std::string algorithm, int level, int cores, int episodes,
                    const std::vector<InstanceOutcome>& outcomes);

struct LevelInstances {
  int level = 0;
  std::vector<Instance> instances;
};

struct BenchmarkResult {
  std::vector<MetricRow> rows;
  std::vector<InstanceOutcome> outcomes;
};

// Every algorithm on every level's instances. The same instances are used
// for all algorithms.
BenchmarkResult run_benchmark(const std::vector<LevelInstances>& levels,
                              const std::vector<Algorithm>& algorithms,
                              const BenchmarkConfig& config);

// Best-of-K for nested seed sets: trains max(cores_list) replicas once per
// instance and selects over the first K of them for each K.
std::vector<MetricRow> sweep_cores(const std::vector<Instance>& instances, int level,
                                   const std::vector<int>& cores_list,
                                   const BenchmarkConfig& config);

// Best-so-far throughput after each episode count in `checkpoints`, with a
// run of max(checkpoints) episodes. A shorter run is an exact prefix of a
// longer one, so each checkpoint equals an independent run of that length.
struct EpisodeSweep {
  std::vector<MetricRow> rows;
  // Per-episode mean (over instances) of the best-of-K best-so-far
  // throughput, counting episodes before the first feasible as 0; plus the
  // mean OPT throughput.
  std::vector<double> mean_best_trace;
  double mean_opt_throughput = 0.0;
};

EpisodeSweep sweep_episodes(const std::vector<Instance>& instances, int level,
                            const std::vector<int>& checkpoints, const BenchmarkConfig& config);

inline constexpr std::string_view kMetricCsvHeader =
    "algorithm,qos_level,cores,episodes,instances,outages,outage_rate,outage_ci95,"
    "mean_throughput_bps,throughput_ci95_bps";

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

enum class PlotAxis { kQosLevel, kCores, kEpisodes };
PlotAxis parse_plot_axis(std::string_view name);

// For each algorithm, writes throughput_vs_<axis>_<algorithm>.dat and
// outage_vs_<axis>_<algorithm>.dat with "x y ci95" rows. Returns the files.
std::vector<std::filesystem::path> write_plot_data(const std::vector<MetricRow>& rows,
                                                   PlotAxis axis,
                                                   const std::filesystem::path& out_dir);

}  // namespace rbassign
