// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   rbassign_acceptance --criteria 1,2,3 [--cli path/to/rbassign] [--work-dir dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "rbassign/ddqn.hpp"
#include "rbassign/exact_solver.hpp"
#include "rbassign/experiment.hpp"
#include "rbassign/neural.hpp"
#include "rbassign/parallel.hpp"
#include "rbassign/text_format.hpp"

namespace fs = std::filesystem;
using namespace rbassign;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string pct(double x) { return format_fixed(100.0 * x, 2) + "%"; }

// Random default-scale instance at a random QoS level.
Instance random_default_instance(std::mt19937_64& rng, std::uint64_t id) {
  const QosSweep sweep;
  const int level = std::uniform_int_distribution<int>(1, sweep.levels)(rng);
  return generate_instance(sweep.apply(ScenarioConfig{}, level), rng(), id);
}

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  int feasible = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Instance inst = random_default_instance(rng, i);
    const OptResult brute = solve_brute_force(inst);
    const OptResult pruned = solve_pruned(inst);
    if (brute.status != pruned.status || brute.objective != pruned.objective) ++mismatches;
    feasible += brute.feasible();
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 60.0,
          "1000 instances (" + std::to_string(feasible) + " feasible), " +
              std::to_string(mismatches) + " mismatches, " + format_fixed(elapsed, 2) + " s"};
}

Verdict gradient_correctness() {
  Rng rng(2002);
  const double h = 1e-5;
  double worst = 0.0;
  std::size_t coordinates = 0;
  std::size_t violations = 0;
  for (int config = 0; config < 20; ++config) {
    // Half the configurations use the trainer's own architecture.
    const std::vector<int> sizes = config % 2 == 0
                                       ? std::vector<int>{10, 64, 64, 4}
                                       : std::vector<int>{2 + config % 5, 3 + config % 7, 4, 2 + config % 3};
    ValueNetwork net(sizes, rng);
    const int batch_size = 1 + config % 4;
    TrainingBatch batch;
    batch.states.resize(sizes.front(), batch_size);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> action(0, sizes.back() - 1);
    for (int i = 0; i < batch_size; ++i) {
      for (int k = 0; k < sizes.front(); ++k) batch.states(k, i) = g(rng);
      batch.actions.push_back(action(rng));
      batch.targets.push_back(3.0 * g(rng));
    }
    const auto analytic = loss_and_gradient(net, batch).gradient;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      auto check = [&](double& param, double expected) {
        const double saved = param;
        param = saved + h;
        const double up = oracle::loss(net, batch);
        param = saved - h;
        const double down = oracle::loss(net, batch);
        param = saved;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(expected), std::abs(numeric), 1e-6});
        const double err = std::abs(expected - numeric) / scale;
        worst = std::max(worst, err);
        ++coordinates;
        if (err > 1e-4) ++violations;
      };
      auto& layer = net.layers()[l];
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) check(layer.weight(r, c), analytic[l].weight(r, c));
        check(layer.bias(r), analytic[l].bias(r));
      }
    }
  }
  std::ostringstream detail;
  detail << "20 configurations, " << coordinates << " coordinates, " << violations
         << " above 1e-4, worst relative error " << worst;
  return {violations == 0, detail.str()};
}

Verdict reward_sign() {
  std::mt19937_64 rng(3003);
  std::size_t checked = 0;
  std::size_t feasible = 0;
  std::size_t violations = 0;
  int instances = 0;
  while (instances < 50) {
    const Instance inst = random_default_instance(rng, static_cast<std::uint64_t>(instances));
    if (inst.rate.sum() <= 0.0) continue;
    ++instances;
    oracle::for_each_assignment(4, 6, [&](const std::vector<int>& owner) {
      const Assignment a{owner};
      const auto report = evaluate(inst, a);
      const double phi = reward(inst, report);
      ++checked;
      feasible += report.feasible;
      if ((phi > 0.0) != report.feasible) ++violations;
    });
  }
  return {violations == 0 && checked == 50u * 4096u,
          std::to_string(checked) + " assignments (" + std::to_string(feasible) + " feasible), " +
              std::to_string(violations) + " violations"};
}

Verdict target_collapse() {
  ScenarioConfig scenario;
  const Instance inst = generate_instance(scenario, 4004);
  TrainerConfig config;  // discount 0, 3000 episodes
  std::size_t batches = 0;
  std::size_t targets = 0;
  std::size_t mismatches = 0;
  TrainingHooks hooks;
  hooks.on_batch = [&](std::span<const double> rewards, std::span<const double> ys) {
    ++batches;
    if (rewards.size() != ys.size()) ++mismatches;
    for (std::size_t i = 0; i < std::min(rewards.size(), ys.size()); ++i) {
      ++targets;
      if (ys[i] != rewards[i]) ++mismatches;
    }
  };
  run_training(inst, config, 4004, hooks);
  return {mismatches == 0 && batches == 3000,
          std::to_string(batches) + " batches, " + std::to_string(targets) + " targets, " +
              std::to_string(mismatches) + " differ from the stored reward"};
}

struct BenchmarkCache {
  std::vector<Instance> instances;
  std::vector<InstanceOutcome> deep;
  std::vector<InstanceOutcome> tabular;
  std::vector<InstanceOutcome> random;
};

BenchmarkConfig default_benchmark(int workers) {
  BenchmarkConfig config;  // 3000 episodes, 10 cores
  config.master_seed = 2024;
  config.workers = workers;
  return config;
}

Verdict near_optimal(int workers) {
  const auto start = Clock::now();
  const int level = 1;
  const auto set = generate_feasible_instances(QosSweep{}.apply(ScenarioConfig{}, level), 50, 5005);
  const auto outcomes = run_algorithm(Algorithm::kDeep, level, set.instances, default_benchmark(workers));
  int feasible = 0;
  int near = 0;
  double worst = 1.0;
  for (const auto& o : outcomes) {
    if (!o.feasible) continue;
    ++feasible;
    const double ratio = o.throughput / o.opt_throughput;
    worst = std::min(worst, ratio);
    if (ratio >= 0.95) ++near;
  }
  const double elapsed = seconds_since(start);
  const double feasible_rate = feasible / 50.0;
  const double near_rate = feasible ? static_cast<double>(near) / feasible : 0.0;
  return {feasible_rate >= 0.99 && near_rate >= 0.90 && elapsed <= 1800.0,
          "feasible " + std::to_string(feasible) + "/50 (" + pct(feasible_rate) + "), within 95% of OPT " +
              std::to_string(near) + "/" + std::to_string(feasible) + " (" + pct(near_rate) +
              "), worst ratio " + format_fixed(worst, 4) + ", " + format_fixed(elapsed, 1) + " s"};
}

BenchmarkCache run_highest_level(std::size_t count, bool baselines, int workers) {
  const int level = QosSweep{}.levels;
  BenchmarkCache cache;
  const auto set =
      generate_feasible_instances(QosSweep{}.apply(ScenarioConfig{}, level), count, 7007);
  std::cout << "# level " << level << ": " << set.instances.size() << " feasible instances from "
            << set.draws << " draws" << std::endl;
  cache.instances = set.instances;
  const BenchmarkConfig config = default_benchmark(workers);
  auto start = Clock::now();
  cache.deep = run_algorithm(Algorithm::kDeep, level, cache.instances, config);
  std::cout << "# deep runs: " << format_fixed(seconds_since(start), 1) << " s" << std::endl;
  if (baselines) {
    start = Clock::now();
    cache.tabular = run_algorithm(Algorithm::kTabular, level, cache.instances, config);
    cache.random = run_algorithm(Algorithm::kRandom, level, cache.instances, config);
    std::cout << "# baseline runs: " << format_fixed(seconds_since(start), 1) << " s" << std::endl;
  }
  return cache;
}

Verdict cores_monotonicity(const BenchmarkCache& cache) {
  const std::vector<int> ks{1, 2, 5, 10};
  const std::size_t n = std::min<std::size_t>(100, cache.deep.size());
  int per_instance_violations = 0;
  std::vector<double> mean_all(ks.size(), 0.0);   // outage counted as 0
  std::vector<double> mean_served(ks.size(), 0.0);
  std::vector<double> outage(ks.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double previous = -1.0;
    std::vector<double> served_sum(ks.size(), 0.0);
    for (std::size_t k = 0; k < ks.size(); ++k) {
      const std::span<const RunOutcome> prefix(cache.deep[i].cores.data(), static_cast<std::size_t>(ks[k]));
      const auto pick = select_best(prefix);
      const double value = pick ? prefix[*pick].throughput : 0.0;
      if (pick) {
        if (value < previous) ++per_instance_violations;
        previous = value;
        mean_served[k] += value;
      } else {
        if (previous >= 0.0) ++per_instance_violations;
        outage[k] += 1.0;
      }
      mean_all[k] += value;
    }
  }
  bool monotone = per_instance_violations == 0;
  std::ostringstream detail;
  detail << n << " instances;";
  for (std::size_t k = 0; k < ks.size(); ++k) {
    const double served = static_cast<double>(n) - outage[k];
    const double all = mean_all[k] / static_cast<double>(n);
    detail << " K=" << ks[k] << ": mean " << format_fixed(all / 1e6, 4) << " Mbps (served-only "
           << format_fixed(served > 0 ? mean_served[k] / served / 1e6 : 0.0, 4) << "), outage "
           << pct(outage[k] / static_cast<double>(n)) << ";";
    if (k > 0) {
      if (mean_all[k] < mean_all[k - 1]) monotone = false;
      if (outage[k] > outage[k - 1]) monotone = false;
    }
  }
  detail << " per-instance violations " << per_instance_violations;
  return {monotone && n == 100, detail.str()};
}

Verdict outage_ordering(const BenchmarkCache& cache) {
  const int level = QosSweep{}.levels;
  const MetricRow deep = aggregate("deep-qra", level, 10, 3000, cache.deep);
  const MetricRow tab = aggregate("q-ra", level, 1, 3000, cache.tabular);
  const MetricRow rnd = aggregate("random", level, 1, 0, cache.random);
  auto show = [](const MetricRow& r) {
    return r.algorithm + " " + pct(r.outage_rate) + " +/- " + pct(r.outage_ci95) + " (" +
           std::to_string(r.outages) + "/" + std::to_string(r.instances) + ")";
  };
  // "Well below" the random baseline: the confidence intervals do not touch.
  const double random_low = rnd.outage_rate - rnd.outage_ci95;
  const bool ordered = deep.outage_rate <= tab.outage_rate;
  const bool below_random = deep.outage_rate + deep.outage_ci95 < random_low &&
                            tab.outage_rate + tab.outage_ci95 < random_low;
  return {ordered && below_random && cache.deep.size() == 1000,
          show(deep) + "; " + show(tab) + "; " + show(rnd)};
}

Verdict replay_fifo() {
  std::mt19937_64 rng(8008);
  int sequences = 0;
  std::size_t violations = 0;
  for (; sequences < 200; ++sequences) {
    ReplayMemory memory(1000);
    std::vector<double> shadow;  // every reward pushed, in order
    const int inserts = std::uniform_int_distribution<int>(0, 5000)(rng);
    std::uniform_real_distribution<double> value(-1e6, 1e6);
    for (int i = 0; i < inserts; ++i) {
      ExperienceTuple e;
      e.reward = value(rng);
      e.action = i % 4;
      shadow.push_back(e.reward);
      memory.push(std::move(e));
      // Spot checks while filling.
      if (std::uniform_int_distribution<int>(0, 99)(rng) == 0) {
        const std::size_t kept = std::min<std::size_t>(shadow.size(), 1000);
        if (memory.size() != kept) ++violations;
        if (memory[0].reward != shadow[shadow.size() - kept]) ++violations;
        if (memory[kept - 1].reward != shadow.back()) ++violations;
      }
    }
    const std::size_t kept = std::min<std::size_t>(shadow.size(), 1000);
    if (memory.size() != kept) ++violations;
    for (std::size_t i = 0; i < kept; ++i) {
      if (memory[i].reward != shadow[shadow.size() - kept + i]) ++violations;
    }
  }
  return {violations == 0, std::to_string(sequences) + " random insertion sequences, capacity 1000, " +
                               std::to_string(violations) + " violations"};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism(const std::string& cli, const fs::path& work_dir) {
  if (cli.empty()) return {false, "no --cli given"};
  const fs::path a = work_dir / "determinism_a";
  const fs::path b = work_dir / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string common = " benchmark --seed 99 --qos-level 1 11 --instances 10 --cores 2";
  const std::string run_a = "\"" + cli + "\"" + common + " --workers 1 --out-dir \"" + a.string() + "\" 2>/dev/null";
  const std::string run_b = "\"" + cli + "\"" + common + " --workers 4 --out-dir \"" + b.string() + "\" 2>/dev/null";
  if (std::system(run_a.c_str()) != 0 || std::system(run_b.c_str()) != 0) {
    return {false, "benchmark command failed"};
  }
  const std::string csv_a = read_file(a / "metrics.csv");
  const std::string csv_b = read_file(b / "metrics.csv");
  const bool same_metrics = !csv_a.empty() && csv_a == csv_b;
  const bool same_outcomes = read_file(a / "outcomes.csv") == read_file(b / "outcomes.csv");
  return {same_metrics && same_outcomes,
          std::string("metrics.csv ") + (same_metrics ? "identical" : "DIFFERS") + " (" +
              std::to_string(csv_a.size()) + " bytes), outcomes.csv " +
              (same_outcomes ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string cli;
  std::string work_dir = (fs::temp_directory_path() / "rbassign_acceptance").string();
  int workers = 0;
  app.add_option("--criteria", criteria, "Criteria to check")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--cli", cli, "Path to the rbassign executable (criterion 9)");
  app.add_option("--work-dir", work_dir, "Scratch directory");
  app.add_option("--workers", workers, "Worker threads (0 = all hardware threads)");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(criteria.begin(), criteria.end());
  fs::create_directories(work_dir);

  std::optional<BenchmarkCache> cache;
  if (selected.count(6) || selected.count(7)) {
    cache = run_highest_level(selected.count(7) ? 1000 : 100, selected.count(7) > 0, workers);
  }

  static const std::map<int, std::string> names{
      {1, "oracle equivalence"},     {2, "gradient correctness"}, {3, "reward sign"},
      {4, "target collapse"},        {5, "near-optimal convergence"},
      {6, "cores monotonicity"},     {7, "outage ordering"},      {8, "replay memory FIFO"},
      {9, "determinism"}};

  bool all_pass = true;
  for (int c : selected) {
    Verdict v;
    const auto start = Clock::now();
    try {
      switch (c) {
        case 1: v = oracle_equivalence(); break;
        case 2: v = gradient_correctness(); break;
        case 3: v = reward_sign(); break;
        case 4: v = target_collapse(); break;
        case 5: v = near_optimal(workers); break;
        case 6: v = cores_monotonicity(*cache); break;
        case 7: v = outage_ordering(*cache); break;
        case 8: v = replay_fifo(); break;
        case 9: v = determinism(cli, work_dir); break;
      }
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && v.pass;
    std::cout << "criterion " << c << " (" << names.at(c) << "): " << (v.pass ? "PASS" : "FAIL")
              << " - " << v.detail << " [" << format_fixed(seconds_since(start), 1) << " s]"
              << std::endl;
  }
  return all_pass ? 0 : 1;
}
