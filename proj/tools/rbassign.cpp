// Command line front end: instance generation, exact solving, training and
// the benchmark sweeps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbassign/errors.hpp"
#include "rbassign/exact_solver.hpp"
#include "rbassign/experiment.hpp"
#include "rbassign/io.hpp"
#include "rbassign/parallel.hpp"
#include "rbassign/run_log.hpp"
#include "rbassign/tabular.hpp"
#include "rbassign/text_format.hpp"

namespace fs = std::filesystem;
using namespace rbassign;

namespace {

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> episodes;
  std::optional<int> cores;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool learning) {
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--config", o.config_path, "INI file with [scenario], [trainer], [tabular]")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all hardware threads)");
  if (learning) {
    cmd->add_option("--episodes", o.episodes, "Episodes per training run (default 3000)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cores", o.cores, "Independent replicas per instance (default 10)")
        ->check(CLI::PositiveNumber);
  }
}

RunConfig load_config(const CommonOptions& o) {
  RunConfig config = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.episodes) {
    config.trainer.episodes = *o.episodes;
    config.tabular.episodes = *o.episodes;
  }
  return config;
}

BenchmarkConfig benchmark_config(const CommonOptions& o, const RunConfig& run) {
  BenchmarkConfig b;
  b.trainer = run.trainer;
  b.tabular = run.tabular;
  if (o.cores) b.cores = *o.cores;
  b.master_seed = o.seed;
  b.workers = o.workers;
  return b;
}

std::vector<Instance> level_instances(const RunConfig& run, int level, std::size_t count,
                                      std::uint64_t seed) {
  const QosSweep sweep;
  const auto set = generate_feasible_instances(sweep.apply(run.scenario, level), count, seed);
  std::cerr << "level " << level << ": kept " << set.instances.size() << " of " << set.draws
            << " draws (rejection " << format_fixed(set.rejection_rate(), 4) << ")\n";
  return set.instances;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_rows(const fs::path& path, const std::vector<MetricRow>& rows) {
  auto out = open_output(path);
  write_metrics_csv(out, rows);
  std::cerr << "wrote " << path.string() << '\n';
}

const Instance& pick_instance(const std::vector<Instance>& instances, std::optional<std::uint64_t> id) {
  if (instances.empty()) throw ConfigError("instance file holds no instances");
  if (!id) return instances.front();
  for (const auto& inst : instances) {
    if (inst.id == *id) return inst;
  }
  throw ConfigError("no instance with id " + std::to_string(*id));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource block assignment: exact solver, deep and tabular Q-learning"};
  app.require_subcommand(1);

  // gen-instances
  CommonOptions gen_opts;
  int gen_level = 1;
  std::size_t gen_count = 1000;
  std::string gen_file;
  auto* gen = app.add_subcommand("gen-instances", "Draw certified-feasible instances");
  add_common(gen, gen_opts, false);
  gen->add_option("--qos-level", gen_level, "QoS level 1..11")->check(CLI::Range(1, 11));
  gen->add_option("--count", gen_count, "Instances to keep")->check(CLI::PositiveNumber);
  gen->add_option("--output", gen_file, "Output file (default <out-dir>/instances_level<k>.txt)");

  // solve
  std::string solve_file;
  bool solve_header = false;
  auto* solve = app.add_subcommand("solve", "Solve every instance of a file exactly");
  solve->add_option("instances", solve_file, "Instance file")->required()->check(CLI::ExistingFile);
  solve->add_flag("--header", solve_header, "Print the CSV header first");

  // train
  CommonOptions train_opts;
  std::string train_file;
  std::optional<std::uint64_t> train_id;
  std::string train_algo = "deep-qra";
  auto* train = app.add_subcommand("train", "Train on one instance and report the best assignment");
  add_common(train, train_opts, true);
  train->add_option("instances", train_file, "Instance file")->required()->check(CLI::ExistingFile);
  train->add_option("--id", train_id, "Instance id (default: first in file)");
  train->add_option("--algorithm", train_algo, "deep-qra or q-ra")->capture_default_str();

  // benchmark
  CommonOptions bench_opts;
  std::vector<int> bench_levels{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  std::size_t bench_count = 1000;
  std::vector<std::string> bench_algos{"opt", "deep-qra", "q-ra", "random"};
  bool bench_logs = false;
  auto* bench = app.add_subcommand("benchmark", "Compare algorithms across QoS levels");
  add_common(bench, bench_opts, true);
  bench->add_option("--qos-level", bench_levels, "QoS levels")->check(CLI::Range(1, 11));
  bench->add_option("--instances", bench_count, "Feasible instances per level")
      ->check(CLI::PositiveNumber);
  bench->add_option("--algorithms", bench_algos, "opt, deep-qra, q-ra, random");
  bench->add_flag("--logs", bench_logs, "Write per-run JSON-lines logs under <out-dir>/logs");

  // sweep-cores
  CommonOptions cores_opts;
  int cores_level = 11;
  std::size_t cores_count = 100;
  std::vector<int> cores_list{1, 2, 5, 10};
  auto* sweep_k = app.add_subcommand("sweep-cores", "Best-of-K metrics for nested seed sets");
  add_common(sweep_k, cores_opts, false);
  sweep_k->add_option("--episodes", cores_opts.episodes, "Episodes per run")
      ->check(CLI::PositiveNumber);
  sweep_k->add_option("--qos-level", cores_level, "QoS level")->check(CLI::Range(1, 11));
  sweep_k->add_option("--instances", cores_count, "Feasible instances")->check(CLI::PositiveNumber);
  sweep_k->add_option("--cores-list", cores_list, "Core counts")->check(CLI::PositiveNumber);

  // sweep-episodes
  CommonOptions ep_opts;
  int ep_level = 1;
  std::size_t ep_count = 50;
  std::vector<int> ep_checkpoints{100, 250, 500, 1000, 1500, 2000, 2500, 3000};
  auto* sweep_e = app.add_subcommand("sweep-episodes", "Best-so-far metrics per episode budget");
  add_common(sweep_e, ep_opts, false);
  sweep_e->add_option("--cores", ep_opts.cores, "Replicas per instance")->check(CLI::PositiveNumber);
  sweep_e->add_option("--qos-level", ep_level, "QoS level")->check(CLI::Range(1, 11));
  sweep_e->add_option("--instances", ep_count, "Feasible instances")->check(CLI::PositiveNumber);
  sweep_e->add_option("--checkpoints", ep_checkpoints, "Episode counts")->check(CLI::PositiveNumber);

  // plot-data
  std::string plot_metrics;
  std::string plot_axis = "qos";
  std::string plot_dir = "plots";
  auto* plot = app.add_subcommand("plot-data", "Turn a metrics CSV into x/y/ci series files");
  plot->add_option("metrics", plot_metrics, "Metrics CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--axis", plot_axis, "qos, cores or episodes")->capture_default_str();
  plot->add_option("--out-dir", plot_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const RunConfig run = load_config(gen_opts);
      const auto instances = level_instances(run, gen_level, gen_count, gen_opts.seed);
      const fs::path path = gen_file.empty()
                                ? fs::path(gen_opts.out_dir) /
                                      ("instances_level" + std::to_string(gen_level) + ".txt")
                                : fs::path(gen_file);
      auto out = open_output(path);
      write_instances(out, instances);
      std::cerr << "wrote " << path.string() << '\n';
    } else if (*solve) {
      if (solve_header) std::cout << kOptResultCsvHeader << '\n';
      for (const auto& inst : load_instances(solve_file)) {
        write_opt_result_csv(std::cout, inst.id, solve_pruned(inst));
      }
    } else if (*train) {
      const RunConfig run = load_config(train_opts);
      const Algorithm algorithm = parse_algorithm(train_algo);
      const auto instances = load_instances(train_file);
      const Instance& inst = pick_instance(instances, train_id);
      const OptResult opt = solve_pruned(inst);
      const fs::path log_dir(train_opts.out_dir);
      const std::string tag = "inst" + std::to_string(inst.id) + "_";

      int cores = 1;
      int episodes = 0;
      std::optional<Assignment> best;
      double throughput = 0.0;
      if (algorithm == Algorithm::kDeep) {
        cores = train_opts.cores.value_or(10);
        episodes = run.trainer.episodes;
        ParallelOptions options;
        options.workers = train_opts.workers;
        options.log_dir = log_dir;
        options.log_prefix = "deep_" + tag;
        const ParallelResult result = run_parallel(inst, run.trainer, cores, train_opts.seed, options);
        if (const RunOutcome* sel = result.selection()) {
          best = sel->assignment;
          throughput = sel->throughput;
        }
      } else if (algorithm == Algorithm::kTabular) {
        episodes = run.tabular.episodes;
        fs::create_directories(log_dir);
        auto log = open_output(log_dir / ("qra_" + tag + "run.jsonl"));
        const TabularResult result = run_tabular(
            inst, run.tabular, train_opts.seed, [&log](const EpisodeRecord& r) { write_episode_jsonl(log, r); });
        best = result.best;
        throughput = result.best_throughput;
      } else {
        throw ConfigError("train supports deep-qra and q-ra");
      }
      std::cout << "instance_id,algorithm,cores,episodes,feasible,throughput_bps,opt_bps,assignment\n"
                << inst.id << ',' << to_string(algorithm) << ',' << cores << ',' << episodes << ','
                << (best ? 1 : 0) << ',' << format_double(best ? throughput : 0.0) << ','
                << format_double(opt.objective) << ','
                << (best ? join_ints(best->rb_owner, ';') : std::string()) << '\n';
    } else if (*bench) {
      const RunConfig run = load_config(bench_opts);
      BenchmarkConfig config = benchmark_config(bench_opts, run);
      const fs::path out_dir(bench_opts.out_dir);
      if (bench_logs) config.log_dir = out_dir / "logs";
      std::vector<Algorithm> algorithms;
      for (const auto& name : bench_algos) algorithms.push_back(parse_algorithm(name));
      std::vector<LevelInstances> levels;
      for (int level : bench_levels) {
        levels.push_back({level, level_instances(run, level, bench_count, bench_opts.seed)});
      }
      const BenchmarkResult result = run_benchmark(levels, algorithms, config);
      write_rows(out_dir / "metrics.csv", result.rows);
      auto outcomes = open_output(out_dir / "outcomes.csv");
      outcomes << "algorithm,qos_level,instance_id,feasible,throughput_bps,opt_throughput_bps\n";
      for (const auto& o : result.outcomes) {
        outcomes << to_string(o.algorithm) << ',' << o.level << ',' << o.instance_id << ','
                 << (o.feasible ? 1 : 0) << ',' << format_double(o.throughput) << ','
                 << format_double(o.opt_throughput) << '\n';
      }
    } else if (*sweep_k) {
      const RunConfig run = load_config(cores_opts);
      const BenchmarkConfig config = benchmark_config(cores_opts, run);
      const auto instances = level_instances(run, cores_level, cores_count, cores_opts.seed);
      write_rows(fs::path(cores_opts.out_dir) / "cores_metrics.csv",
                 sweep_cores(instances, cores_level, cores_list, config));
    } else if (*sweep_e) {
      const RunConfig run = load_config(ep_opts);
      const BenchmarkConfig config = benchmark_config(ep_opts, run);
      const auto instances = level_instances(run, ep_level, ep_count, ep_opts.seed);
      const EpisodeSweep sweep = sweep_episodes(instances, ep_level, ep_checkpoints, config);
      const fs::path out_dir(ep_opts.out_dir);
      write_rows(out_dir / "episodes_metrics.csv", sweep.rows);
      auto trace = open_output(out_dir / "episodes_trace.csv");
      trace << "episode,mean_best_throughput_bps,mean_opt_throughput_bps\n";
      for (std::size_t e = 0; e < sweep.mean_best_trace.size(); ++e) {
        trace << e + 1 << ',' << format_fixed(sweep.mean_best_trace[e], 3) << ','
              << format_fixed(sweep.mean_opt_throughput, 3) << '\n';
      }
    } else if (*plot) {
      std::ifstream in(plot_metrics);
      const auto rows = read_metrics_csv(in);
      for (const auto& path : write_plot_data(rows, parse_plot_axis(plot_axis), plot_dir)) {
        std::cout << path.string() << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "rbassign: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
