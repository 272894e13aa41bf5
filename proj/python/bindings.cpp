#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rbassign/assignment.hpp"
#include "rbassign/ddqn.hpp"
#include "rbassign/errors.hpp"
#include "rbassign/exact_solver.hpp"
#include "rbassign/experiment.hpp"
#include "rbassign/io.hpp"
#include "rbassign/parallel.hpp"
#include "rbassign/radio.hpp"
#include "rbassign/tabular.hpp"

namespace py = pybind11;
using namespace rbassign;

namespace {

Assignment to_assignment(const std::vector<int>& owner) { return Assignment{owner}; }

std::optional<std::vector<int>> owners(const std::optional<Assignment>& a) {
  if (!a) return std::nullopt;
  return a->rb_owner;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resource block assignment: channel model, exact solver, deep and tabular Q-learning";

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_RuntimeError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::class_<McsTable>(m, "McsTable")
      .def_static("truncated_shannon", &McsTable::truncated_shannon, py::arg("bandwidth_hz"),
                  py::arg("num_levels"), py::arg("min_db"), py::arg("max_db"))
      .def_property_readonly("thresholds",
                             [](const McsTable& t) {
                               std::vector<double> v;
                               for (const auto& l : t.levels()) v.push_back(l.snr_threshold);
                               return v;
                             })
      .def_property_readonly("rates",
                             [](const McsTable& t) {
                               std::vector<double> v;
                               for (const auto& l : t.levels()) v.push_back(l.rate);
                               return v;
                             })
      .def_property_readonly("max_rate", &McsTable::max_rate);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("num_rbs", &ScenarioConfig::num_rbs)
      .def_readwrite("num_ues", &ScenarioConfig::num_ues)
      .def_readwrite("ues_per_service", &ScenarioConfig::ues_per_service)
      .def_readwrite("min_satisfied_per_service", &ScenarioConfig::min_satisfied_per_service)
      .def_readwrite("qos_targets", &ScenarioConfig::qos_targets)
      .def_readwrite("power_per_rb", &ScenarioConfig::power_per_rb)
      .def_readwrite("cell_radius", &ScenarioConfig::cell_radius)
      .def_readwrite("min_distance", &ScenarioConfig::min_distance)
      .def_readwrite("fixed_distance", &ScenarioConfig::fixed_distance)
      .def_readwrite("shadowing_stddev_db", &ScenarioConfig::shadowing_stddev_db)
      .def_readwrite("noise_spectral_density", &ScenarioConfig::noise_spectral_density)
      .def_readwrite("mcs_levels", &ScenarioConfig::mcs_levels)
      .def_readwrite("mcs_min_db", &ScenarioConfig::mcs_min_db)
      .def_readwrite("mcs_max_db", &ScenarioConfig::mcs_max_db)
      .def_property_readonly("noise_power", &ScenarioConfig::noise_power)
      .def_property_readonly("rb_bandwidth", &ScenarioConfig::rb_bandwidth)
      .def("mcs_table", &ScenarioConfig::mcs_table)
      .def("validate", &ScenarioConfig::validate);

  py::class_<QosSweep>(m, "QosSweep")
      .def(py::init<>())
      .def_readwrite("levels", &QosSweep::levels)
      .def("target", &QosSweep::target, py::arg("level"), py::arg("service"))
      .def("apply", &QosSweep::apply, py::arg("config"), py::arg("level"));

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("id", &Instance::id)
      .def_readwrite("snr", &Instance::snr)
      .def_readwrite("rate", &Instance::rate)
      .def_readwrite("qos", &Instance::qos)
      .def_readwrite("service", &Instance::service)
      .def_readwrite("min_satisfied", &Instance::min_satisfied)
      .def_readwrite("path_gain", &Instance::path_gain)
      .def_property_readonly("num_ues", &Instance::num_ues)
      .def_property_readonly("num_rbs", &Instance::num_rbs)
      .def("validate", &Instance::validate)
      .def("with_qos", [](const Instance& i, std::vector<double> qos) { return with_qos(i, std::move(qos)); });

  m.def("compute_snr", &compute_snr, py::arg("power"), py::arg("path_gain"),
        py::arg("channel_magnitude"), py::arg("noise_power"));
  m.def("link_adaptation", &link_adaptation, py::arg("snr"), py::arg("table"));
  m.def("generate_instance",
        py::overload_cast<const ScenarioConfig&, std::uint64_t, std::uint64_t>(&generate_instance),
        py::arg("config"), py::arg("seed"), py::arg("instance_id") = 0);
  m.def(
      "generate_feasible_instances",
      [](const ScenarioConfig& c, std::size_t count, std::uint64_t seed) {
        return generate_feasible_instances(c, count, seed).instances;
      },
      py::arg("config"), py::arg("count"), py::arg("seed"));

  py::class_<SatisfactionReport>(m, "SatisfactionReport")
      .def_readonly("ue_throughput", &SatisfactionReport::ue_throughput)
      .def_readonly("ue_satisfied", &SatisfactionReport::ue_satisfied)
      .def_readonly("service_satisfied", &SatisfactionReport::service_satisfied)
      .def_readonly("feasible", &SatisfactionReport::feasible)
      .def_property_readonly("system_throughput", &SatisfactionReport::system_throughput);

  m.def(
      "evaluate",
      [](const Instance& i, const std::vector<int>& owner) { return evaluate(i, to_assignment(owner)); },
      py::arg("instance"), py::arg("rb_owner"));
  m.def(
      "reward",
      [](const Instance& i, const std::vector<int>& owner) {
        return reward(i, to_assignment(owner));
      },
      py::arg("instance"), py::arg("rb_owner"));

  py::class_<OptResult>(m, "OptResult")
      .def_property_readonly("status", [](const OptResult& r) { return std::string(to_string(r.status)); })
      .def_property_readonly("feasible", &OptResult::feasible)
      .def_property_readonly("best", [](const OptResult& r) { return r.best.rb_owner; })
      .def_readonly("objective", &OptResult::objective)
      .def_readonly("nodes_explored", &OptResult::nodes_explored);
  m.def("solve_brute_force", &solve_brute_force, py::arg("instance"),
        py::arg("budget") = kDefaultEnumerationBudget, py::call_guard<py::gil_scoped_release>());
  m.def("solve_pruned", &solve_pruned, py::arg("instance"), py::call_guard<py::gil_scoped_release>());
  m.def("is_feasible", &is_feasible, py::arg("instance"));

  py::class_<EpsilonSchedule>(m, "EpsilonSchedule")
      .def(py::init<>())
      .def_readwrite("initial", &EpsilonSchedule::initial)
      .def_readwrite("decay", &EpsilonSchedule::decay)
      .def_readwrite("floor", &EpsilonSchedule::floor)
      .def("value", &EpsilonSchedule::value);

  py::class_<TrainerConfig>(m, "TrainerConfig")
      .def(py::init<>())
      .def_readwrite("episodes", &TrainerConfig::episodes)
      .def_readwrite("batch_size", &TrainerConfig::batch_size)
      .def_readwrite("target_update_period", &TrainerConfig::target_update_period)
      .def_readwrite("discount", &TrainerConfig::discount)
      .def_readwrite("memory_capacity", &TrainerConfig::memory_capacity)
      .def_readwrite("hidden_units", &TrainerConfig::hidden_units)
      .def_readwrite("epsilon", &TrainerConfig::epsilon)
      .def_readwrite("return_last_action", &TrainerConfig::return_last_action)
      .def_property(
          "learning_rate", [](const TrainerConfig& c) { return c.adam.learning_rate; },
          [](TrainerConfig& c, double v) { c.adam.learning_rate = v; });

  py::class_<TabularConfig>(m, "TabularConfig")
      .def(py::init<>())
      .def_readwrite("episodes", &TabularConfig::episodes)
      .def_readwrite("learning_rate", &TabularConfig::learning_rate)
      .def_readwrite("discount", &TabularConfig::discount)
      .def_readwrite("epsilon", &TabularConfig::epsilon);

  py::class_<TrainingResult>(m, "TrainingResult")
      .def_property_readonly("best", [](const TrainingResult& r) { return owners(r.best); })
      .def_readonly("best_throughput", &TrainingResult::best_throughput)
      .def_readonly("reward_trace", &TrainingResult::reward_trace)
      .def_readonly("best_throughput_trace", &TrainingResult::best_throughput_trace)
      .def_property_readonly("last_action", [](const TrainingResult& r) { return r.last_action.rb_owner; });
  m.def(
      "run_training",
      [](const Instance& i, const TrainerConfig& c, std::uint64_t seed) { return run_training(i, c, seed); },
      py::arg("instance"), py::arg("config"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  py::class_<TabularResult>(m, "TabularResult")
      .def_property_readonly("best", [](const TabularResult& r) { return owners(r.best); })
      .def_readonly("best_throughput", &TabularResult::best_throughput)
      .def_readonly("reward_trace", &TabularResult::reward_trace)
      .def_readonly("visited_states", &TabularResult::visited_states)
      .def_readonly("table_entries", &TabularResult::table_entries);
  m.def(
      "run_tabular",
      [](const Instance& i, const TabularConfig& c, std::uint64_t seed) { return run_tabular(i, c, seed); },
      py::arg("instance"), py::arg("config"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  py::class_<RunOutcome>(m, "RunOutcome")
      .def_readonly("core", &RunOutcome::core)
      .def_readonly("seed", &RunOutcome::seed)
      .def_property_readonly("assignment", [](const RunOutcome& o) { return owners(o.assignment); })
      .def_readonly("throughput", &RunOutcome::throughput)
      .def_readonly("wall_seconds", &RunOutcome::wall_seconds);
  py::class_<ParallelResult>(m, "ParallelResult")
      .def_readonly("selected", &ParallelResult::selected)
      .def_readonly("outcomes", &ParallelResult::outcomes)
      .def_property_readonly("outage", &ParallelResult::outage);
  m.def(
      "run_parallel",
      [](const Instance& i, const TrainerConfig& c, int cores, std::uint64_t seed_base, int workers) {
        ParallelOptions options;
        options.workers = workers;
        return run_parallel(i, c, cores, seed_base, options);
      },
      py::arg("instance"), py::arg("config"), py::arg("cores"), py::arg("seed_base"),
      py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

  py::enum_<Algorithm>(m, "Algorithm")
      .value("OPT", Algorithm::kOpt)
      .value("DEEP", Algorithm::kDeep)
      .value("TABULAR", Algorithm::kTabular)
      .value("RANDOM", Algorithm::kRandom);

  py::class_<MetricRow>(m, "MetricRow")
      .def_readonly("algorithm", &MetricRow::algorithm)
      .def_readonly("qos_level", &MetricRow::qos_level)
      .def_readonly("cores", &MetricRow::cores)
      .def_readonly("episodes", &MetricRow::episodes)
      .def_readonly("instances", &MetricRow::instances)
      .def_readonly("outages", &MetricRow::outages)
      .def_readonly("outage_rate", &MetricRow::outage_rate)
      .def_readonly("outage_ci95", &MetricRow::outage_ci95)
      .def_readonly("mean_throughput", &MetricRow::mean_throughput)
      .def_readonly("throughput_ci95", &MetricRow::throughput_ci95);
  m.def(
      "run_benchmark",
      [](const std::vector<std::pair<int, std::vector<Instance>>>& levels,
         const std::vector<Algorithm>& algorithms, const TrainerConfig& trainer,
         const TabularConfig& tabular, int cores, std::uint64_t master_seed, int workers) {
        std::vector<LevelInstances> li;
        for (const auto& [level, instances] : levels) li.push_back({level, instances});
        BenchmarkConfig config;
        config.trainer = trainer;
        config.tabular = tabular;
        config.cores = cores;
        config.master_seed = master_seed;
        config.workers = workers;
        py::gil_scoped_release release;
        return run_benchmark(li, algorithms, config).rows;
      },
      py::arg("levels"), py::arg("algorithms"), py::arg("trainer") = TrainerConfig{},
      py::arg("tabular") = TabularConfig{}, py::arg("cores") = 10, py::arg("master_seed") = 1,
      py::arg("workers") = 0);
  m.def("metrics_csv", [](const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    write_metrics_csv(out, rows);
    return out.str();
  });

  m.def("write_instances", [](const std::vector<Instance>& instances) {
    std::ostringstream out;
    write_instances(out, instances);
    return out.str();
  });
  m.def("read_instances", [](const std::string& text) {
    std::istringstream in(text);
    return read_instances(in);
  });
  m.def(
      "load_run_config",
      [](const std::filesystem::path& path) {
        const RunConfig c = load_run_config(path);
        return py::make_tuple(c.scenario, c.trainer, c.tabular);
      },
      py::arg("path"));
}
