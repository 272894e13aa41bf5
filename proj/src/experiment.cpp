#include "rbassign/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "rbassign/errors.hpp"
#include "rbassign/exact_solver.hpp"
#include "rbassign/run_log.hpp"
#include "rbassign/text_format.hpp"

namespace rbassign {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

double QosSweep::target(int level, int service) const {
  if (level < 1 || level > levels) throw InvalidParameter("QoS level out of range");
  if (service < 0) throw InvalidParameter("service index must be >= 0");
  return base_bps + step_bps * (level - 1) + service_offset_bps * service;
}

std::vector<double> QosSweep::ue_targets(int level, const std::vector<int>& service_of_ue) const {
  std::vector<double> targets;
  targets.reserve(service_of_ue.size());
  for (int s : service_of_ue) targets.push_back(target(level, s));
  return targets;
}

ScenarioConfig QosSweep::apply(ScenarioConfig config, int level) const {
  config.qos_targets = ue_targets(level, config.service_of_ue());
  return config;
}

std::uint64_t draw_seed(std::uint64_t master_seed, std::uint64_t draw) {
  return splitmix64(splitmix64(master_seed) ^ draw);
}

FeasibleInstanceSet generate_feasible_instances(const ScenarioConfig& config, std::size_t count,
                                                std::uint64_t master_seed, double max_rejection) {
  if (count < 1) throw InvalidParameter("generate_feasible_instances: count must be >= 1");
  config.validate();
  const McsTable table = config.mcs_table();

  FeasibleInstanceSet set;
  while (set.instances.size() < count) {
    Rng rng(draw_seed(master_seed, set.draws));
    Instance inst = generate_instance(config, table, rng, set.draws);
    ++set.draws;
    if (is_feasible(inst)) {
      set.instances.push_back(std::move(inst));
    } else {
      ++set.rejected;
      if (set.draws >= 100 && set.rejection_rate() > max_rejection) {
        throw ResourceLimit("generate_feasible_instances: " + std::to_string(set.rejected) +
                            " of " + std::to_string(set.draws) +
                            " draws infeasible; the QoS targets are likely unattainable "
                            "under this scenario");
      }
    }
  }
  return set;
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kOpt: return "opt";
    case Algorithm::kDeep: return "deep-qra";
    case Algorithm::kTabular: return "q-ra";
    case Algorithm::kRandom: return "random";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kOpt, Algorithm::kDeep, Algorithm::kTabular, Algorithm::kRandom}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (opt, deep-qra, q-ra, random)");
}

std::uint64_t run_seed(std::uint64_t master_seed, Algorithm algorithm, int level,
                       std::uint64_t instance_id) {
  const std::uint64_t key = (static_cast<std::uint64_t>(algorithm) << 56) ^
                            (static_cast<std::uint64_t>(level) << 40) ^ instance_id;
  // Leave room below for core offsets.
  return splitmix64(splitmix64(master_seed) ^ splitmix64(key)) & ~0xffffull;
}

std::vector<InstanceOutcome> run_algorithm(Algorithm algorithm, int level,
                                           const std::vector<Instance>& instances,
                                           const BenchmarkConfig& config) {
  std::vector<InstanceOutcome> outcomes(instances.size());
  parallel_for(instances.size(), config.workers, [&](std::size_t i) {
    const Instance& inst = instances[i];
    InstanceOutcome& out = outcomes[i];
    out.algorithm = algorithm;
    out.level = level;
    out.instance_id = inst.id;

    const OptResult opt = solve_pruned(inst);
    out.opt_throughput = opt.objective;
    const std::uint64_t seed = run_seed(config.master_seed, algorithm, level, inst.id);
    const std::string tag = "level" + std::to_string(level) + "_inst" + std::to_string(inst.id) + "_";

    switch (algorithm) {
      case Algorithm::kOpt:
        out.feasible = opt.feasible();
        out.throughput = opt.objective;
        break;
      case Algorithm::kDeep: {
        ParallelOptions options;
        options.workers = 1;
        if (config.log_dir) {
          options.log_dir = *config.log_dir;
          options.log_prefix = "deep_" + tag;
        }
        ParallelResult run = run_parallel(inst, config.trainer, config.cores, seed, options);
        if (const RunOutcome* best = run.selection()) {
          out.feasible = true;
          out.throughput = best->throughput;
        }
        out.cores = std::move(run.outcomes);
        break;
      }
      case Algorithm::kTabular: {
        std::ofstream log;
        std::function<void(const EpisodeRecord&)> on_episode;
        if (config.log_dir) {
          std::filesystem::create_directories(*config.log_dir);
          const auto path = *config.log_dir / ("qra_" + tag + "run.jsonl");
          log.open(path);
          if (!log) throw ConfigError("cannot open " + path.string());
          on_episode = [&log](const EpisodeRecord& r) { write_episode_jsonl(log, r); };
        }
        const TabularResult run = run_tabular(inst, config.tabular, seed, on_episode);
        out.feasible = run.best.has_value();
        out.throughput = run.best ? run.best_throughput : 0.0;
        break;
      }
      case Algorithm::kRandom: {
        Rng rng(seed);
        std::uniform_int_distribution<int> any_ue(0, inst.num_ues() - 1);
        Assignment a;
        a.rb_owner.resize(static_cast<std::size_t>(inst.num_rbs()));
        for (auto& owner : a.rb_owner) owner = any_ue(rng);
        const auto report = evaluate(inst, a);
        out.feasible = report.feasible;
        out.throughput = report.feasible ? report.system_throughput() : 0.0;
        break;
      }
    }
  });
  return outcomes;
}

double ci95_half_width(const std::vector<double>& samples) {
  const auto n = samples.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(n));
}

MetricRow aggregate(std::string algorithm, int level, int cores, int episodes,
                    const std::vector<InstanceOutcome>& outcomes) {
  MetricRow row;
  row.algorithm = std::move(algorithm);
  row.qos_level = level;
  row.cores = cores;
  row.episodes = episodes;
  row.instances = outcomes.size();
  std::vector<double> served;
  for (const auto& o : outcomes) {
    if (o.feasible) {
      served.push_back(o.throughput);
    } else {
      ++row.outages;
    }
  }
  if (row.instances > 0) {
    const double n = static_cast<double>(row.instances);
    row.outage_rate = static_cast<double>(row.outages) / n;
    row.outage_ci95 = 1.96 * std::sqrt(row.outage_rate * (1.0 - row.outage_rate) / n);
  }
  if (!served.empty()) {
    double sum = 0.0;
    for (double x : served) sum += x;
    row.mean_throughput = sum / static_cast<double>(served.size());
    row.throughput_ci95 = ci95_half_width(served);
  }
  return row;
}

namespace {

std::pair<int, int> budget_of(Algorithm algorithm, const BenchmarkConfig& config) {
  switch (algorithm) {
    case Algorithm::kDeep: return {config.cores, config.trainer.episodes};
    case Algorithm::kTabular: return {1, config.tabular.episodes};
    default: return {1, 0};
  }
}

}  // namespace

BenchmarkResult run_benchmark(const std::vector<LevelInstances>& levels,
                              const std::vector<Algorithm>& algorithms,
                              const BenchmarkConfig& config) {
  if (levels.empty() || algorithms.empty()) {
    throw InvalidParameter("run_benchmark: need at least one level and one algorithm");
  }
  BenchmarkResult result;
  for (const auto& level : levels) {
    for (Algorithm algorithm : algorithms) {
      auto outcomes = run_algorithm(algorithm, level.level, level.instances, config);
      const auto [cores, episodes] = budget_of(algorithm, config);
      result.rows.push_back(
          aggregate(std::string(to_string(algorithm)), level.level, cores, episodes, outcomes));
      std::move(outcomes.begin(), outcomes.end(), std::back_inserter(result.outcomes));
    }
  }
  return result;
}

std::vector<MetricRow> sweep_cores(const std::vector<Instance>& instances, int level,
                                   const std::vector<int>& cores_list,
                                   const BenchmarkConfig& config) {
  if (cores_list.empty()) throw InvalidParameter("sweep_cores: empty core list");
  const int max_cores = *std::max_element(cores_list.begin(), cores_list.end());
  if (*std::min_element(cores_list.begin(), cores_list.end()) < 1) {
    throw InvalidParameter("sweep_cores: core counts must be >= 1");
  }
  BenchmarkConfig cfg = config;
  cfg.cores = max_cores;
  const auto full = run_algorithm(Algorithm::kDeep, level, instances, cfg);

  std::vector<MetricRow> rows;
  for (int k : cores_list) {
    std::vector<InstanceOutcome> nested = full;
    for (auto& o : nested) {
      const std::span<const RunOutcome> prefix(o.cores.data(), static_cast<std::size_t>(k));
      const auto pick = select_best(prefix);
      o.feasible = pick.has_value();
      o.throughput = pick ? prefix[*pick].throughput : 0.0;
    }
    rows.push_back(aggregate(std::string(to_string(Algorithm::kDeep)), level, k,
                             config.trainer.episodes, nested));
  }
  return rows;
}

EpisodeSweep sweep_episodes(const std::vector<Instance>& instances, int level,
                            const std::vector<int>& checkpoints, const BenchmarkConfig& config) {
  if (checkpoints.empty() || instances.empty()) {
    throw InvalidParameter("sweep_episodes: need instances and checkpoints");
  }
  const int horizon = *std::max_element(checkpoints.begin(), checkpoints.end());
  if (*std::min_element(checkpoints.begin(), checkpoints.end()) < 1) {
    throw InvalidParameter("sweep_episodes: checkpoints must be >= 1");
  }
  TrainerConfig trainer = config.trainer;
  trainer.episodes = horizon;
  trainer.return_last_action = false;

  const auto cores = static_cast<std::size_t>(config.cores);
  std::vector<std::vector<double>> traces(instances.size() * cores);
  parallel_for(traces.size(), config.workers, [&](std::size_t idx) {
    const std::size_t i = idx / cores;
    const int core = static_cast<int>(idx % cores);
    const std::uint64_t base = run_seed(config.master_seed, Algorithm::kDeep, level, instances[i].id);
    traces[idx] = run_training(instances[i], trainer, core_seed(base, core)).best_throughput_trace;
  });

  // Best over cores per episode; NaN while no core has a feasible point.
  std::vector<std::vector<double>> combined(instances.size(),
                                            std::vector<double>(static_cast<std::size_t>(horizon),
                                                                std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t c = 0; c < cores; ++c) {
      const auto& t = traces[i * cores + c];
      for (std::size_t e = 0; e < t.size(); ++e) {
        if (!std::isnan(t[e]) && (std::isnan(combined[i][e]) || t[e] > combined[i][e])) {
          combined[i][e] = t[e];
        }
      }
    }
  }

  EpisodeSweep sweep;
  for (int checkpoint : checkpoints) {
    std::vector<InstanceOutcome> outcomes(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const double v = combined[i][static_cast<std::size_t>(checkpoint) - 1];
      outcomes[i].instance_id = instances[i].id;
      outcomes[i].feasible = !std::isnan(v);
      outcomes[i].throughput = std::isnan(v) ? 0.0 : v;
    }
    sweep.rows.push_back(aggregate(std::string(to_string(Algorithm::kDeep)), level, config.cores,
                                   checkpoint, outcomes));
  }
  sweep.mean_best_trace.assign(static_cast<std::size_t>(horizon), 0.0);
  for (std::size_t e = 0; e < sweep.mean_best_trace.size(); ++e) {
    double sum = 0.0;
    for (const auto& c : combined) sum += std::isnan(c[e]) ? 0.0 : c[e];
    sweep.mean_best_trace[e] = sum / static_cast<double>(instances.size());
  }
  double opt_sum = 0.0;
  for (const auto& inst : instances) opt_sum += solve_pruned(inst).objective;
  sweep.mean_opt_throughput = opt_sum / static_cast<double>(instances.size());
  return sweep;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.qos_level << ',' << r.cores << ',' << r.episodes << ','
        << r.instances << ',' << r.outages << ',' << format_fixed(r.outage_rate, 6) << ','
        << format_fixed(r.outage_ci95, 6) << ',' << format_fixed(r.mean_throughput, 3) << ','
        << format_fixed(r.throughput_ci95, 3) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("metrics CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricCsvHeader) throw ConfigError("metrics CSV: unexpected header");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ConfigError("metrics CSV: expected 10 fields");
    MetricRow r;
    r.algorithm = std::string(f[0]);
    r.qos_level = static_cast<int>(parse_double(f[1]));
    r.cores = static_cast<int>(parse_double(f[2]));
    r.episodes = static_cast<int>(parse_double(f[3]));
    r.instances = static_cast<std::size_t>(parse_double(f[4]));
    r.outages = static_cast<std::size_t>(parse_double(f[5]));
    r.outage_rate = parse_double(f[6]);
    r.outage_ci95 = parse_double(f[7]);
    r.mean_throughput = parse_double(f[8]);
    r.throughput_ci95 = parse_double(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

PlotAxis parse_plot_axis(std::string_view name) {
  if (name == "qos") return PlotAxis::kQosLevel;
  if (name == "cores") return PlotAxis::kCores;
  if (name == "episodes") return PlotAxis::kEpisodes;
  throw ConfigError("unknown plot axis '" + std::string(name) + "' (qos, cores, episodes)");
}

std::vector<std::filesystem::path> write_plot_data(const std::vector<MetricRow>& rows,
                                                   PlotAxis axis,
                                                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const char* axis_name = axis == PlotAxis::kQosLevel ? "qos" : axis == PlotAxis::kCores ? "cores" : "episodes";

  std::vector<std::string> order;
  std::map<std::string, std::vector<const MetricRow*>> by_algorithm;
  for (const auto& r : rows) {
    if (!by_algorithm.count(r.algorithm)) order.push_back(r.algorithm);
    by_algorithm[r.algorithm].push_back(&r);
  }

  std::vector<std::filesystem::path> written;
  for (const auto& name : order) {
    auto series = by_algorithm[name];
    auto x_of = [axis](const MetricRow& r) {
      return axis == PlotAxis::kQosLevel ? r.qos_level : axis == PlotAxis::kCores ? r.cores : r.episodes;
    };
    std::stable_sort(series.begin(), series.end(),
                     [&](const MetricRow* a, const MetricRow* b) { return x_of(*a) < x_of(*b); });
    const auto tput = out_dir / ("throughput_vs_" + std::string(axis_name) + "_" + name + ".dat");
    const auto outage = out_dir / ("outage_vs_" + std::string(axis_name) + "_" + name + ".dat");
    std::ofstream t(tput);
    std::ofstream o(outage);
    if (!t || !o) throw ConfigError("cannot write plot data in " + out_dir.string());
    t << "# " << axis_name << " mean_throughput_bps ci95_bps\n";
    o << "# " << axis_name << " outage_rate ci95\n";
    for (const MetricRow* r : series) {
      t << x_of(*r) << ' ' << format_fixed(r->mean_throughput, 3) << ' '
        << format_fixed(r->throughput_ci95, 3) << '\n';
      o << x_of(*r) << ' ' << format_fixed(r->outage_rate, 6) << ' '
        << format_fixed(r->outage_ci95, 6) << '\n';
    }
    written.push_back(tput);
    written.push_back(outage);
  }
  return written;
}

}  // namespace rbassign
