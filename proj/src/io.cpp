#include "rbassign/io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rbassign/errors.hpp"
#include "rbassign/text_format.hpp"

namespace rbassign {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_double(part));
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (auto part : split(text, ',')) {
    const double v = parse_double(part);
    if (v != static_cast<int>(v)) throw ConfigError("expected an integer, got '" + std::string(part) + "'");
    values.push_back(static_cast<int>(v));
  }
  return values;
}

int parse_int(const std::string& text) {
  const auto values = parse_int_list(text);
  if (values.size() != 1) throw ConfigError("expected a single integer, got '" + text + "'");
  return values.front();
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("expected a boolean, got '" + text + "'");
}

using Setter = std::function<void(const std::string&)>;

std::map<std::string, Setter> scenario_keys(ScenarioConfig& s) {
  return {
      {"num_rbs", [&](const std::string& v) { s.num_rbs = parse_int(v); }},
      {"num_ues", [&](const std::string& v) { s.num_ues = parse_int(v); }},
      {"ues_per_service", [&](const std::string& v) { s.ues_per_service = parse_int_list(v); }},
      {"min_satisfied_per_service",
       [&](const std::string& v) { s.min_satisfied_per_service = parse_int_list(v); }},
      {"qos_targets", [&](const std::string& v) { s.qos_targets = parse_double_list(v); }},
      {"power_per_rb", [&](const std::string& v) { s.power_per_rb = parse_double(v); }},
      {"cell_radius", [&](const std::string& v) { s.cell_radius = parse_double(v); }},
      {"min_distance", [&](const std::string& v) { s.min_distance = parse_double(v); }},
      {"fixed_distance", [&](const std::string& v) { s.fixed_distance = parse_double(v); }},
      {"shadowing_stddev_db", [&](const std::string& v) { s.shadowing_stddev_db = parse_double(v); }},
      {"pathloss_offset_db", [&](const std::string& v) { s.pathloss_offset_db = parse_double(v); }},
      {"pathloss_slope_db", [&](const std::string& v) { s.pathloss_slope_db = parse_double(v); }},
      {"noise_spectral_density",
       [&](const std::string& v) { s.noise_spectral_density = parse_double(v); }},
      {"subcarriers_per_rb", [&](const std::string& v) { s.subcarriers_per_rb = parse_int(v); }},
      {"subcarrier_spacing", [&](const std::string& v) { s.subcarrier_spacing = parse_double(v); }},
      {"mcs_levels", [&](const std::string& v) { s.mcs_levels = parse_int(v); }},
      {"mcs_min_db", [&](const std::string& v) { s.mcs_min_db = parse_double(v); }},
      {"mcs_max_db", [&](const std::string& v) { s.mcs_max_db = parse_double(v); }},
      {"rng_seed",
       [&](const std::string& v) { s.rng_seed = std::stoull(v); }},
  };
}

std::map<std::string, Setter> epsilon_keys(EpsilonSchedule& e) {
  return {
      {"epsilon_initial", [&](const std::string& v) { e.initial = parse_double(v); }},
      {"epsilon_decay", [&](const std::string& v) { e.decay = parse_double(v); }},
      {"epsilon_floor", [&](const std::string& v) { e.floor = parse_double(v); }},
  };
}

std::map<std::string, Setter> trainer_keys(TrainerConfig& t) {
  auto keys = epsilon_keys(t.epsilon);
  keys.merge(std::map<std::string, Setter>{
      {"episodes", [&](const std::string& v) { t.episodes = parse_int(v); }},
      {"batch_size", [&](const std::string& v) { t.batch_size = parse_int(v); }},
      {"target_update_period", [&](const std::string& v) { t.target_update_period = parse_int(v); }},
      {"discount", [&](const std::string& v) { t.discount = parse_double(v); }},
      {"memory_capacity",
       [&](const std::string& v) { t.memory_capacity = static_cast<std::size_t>(parse_int(v)); }},
      {"hidden_units", [&](const std::string& v) { t.hidden_units = parse_int(v); }},
      {"learning_rate", [&](const std::string& v) { t.adam.learning_rate = parse_double(v); }},
      {"adam_beta1", [&](const std::string& v) { t.adam.beta1 = parse_double(v); }},
      {"adam_beta2", [&](const std::string& v) { t.adam.beta2 = parse_double(v); }},
      {"adam_epsilon", [&](const std::string& v) { t.adam.epsilon = parse_double(v); }},
      {"return_last_action", [&](const std::string& v) { t.return_last_action = parse_bool(v); }},
  });
  return keys;
}

std::map<std::string, Setter> tabular_keys(TabularConfig& t) {
  auto keys = epsilon_keys(t.epsilon);
  keys.merge(std::map<std::string, Setter>{
      {"episodes", [&](const std::string& v) { t.episodes = parse_int(v); }},
      {"learning_rate", [&](const std::string& v) { t.learning_rate = parse_double(v); }},
      {"discount", [&](const std::string& v) { t.discount = parse_double(v); }},
  });
  return keys;
}

void apply_section(const pt::ptree& section, const std::string& name,
                   const std::map<std::string, Setter>& keys) {
  for (const auto& [key, node] : section) {
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("config: unknown key '" + name + "." + key + "'");
    try {
      it->second(node.get_value<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("config: " + name + "." + key + ": " + e.what());
    } catch (const std::logic_error&) {
      throw ConfigError("config: " + name + "." + key + ": malformed value");
    }
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig config;
  for (const auto& [section, node] : tree) {
    if (section == "scenario") {
      apply_section(node, section, scenario_keys(config.scenario));
    } else if (section == "trainer") {
      apply_section(node, section, trainer_keys(config.trainer));
    } else if (section == "tabular") {
      apply_section(node, section, tabular_keys(config.tabular));
    } else {
      throw ConfigError("config: unknown section or top-level key '" + section + "'");
    }
  }
  config.scenario.validate();
  config.trainer.validate();
  config.tabular.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& config) {
  auto list = [](const auto& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        s += format_double(values[i]);
      } else {
        s += std::to_string(values[i]);
      }
    }
    return s;
  };
  const auto& s = config.scenario;
  out << "[scenario]\n"
      << "num_rbs = " << s.num_rbs << '\n'
      << "num_ues = " << s.num_ues << '\n'
      << "ues_per_service = " << list(s.ues_per_service) << '\n'
      << "min_satisfied_per_service = " << list(s.min_satisfied_per_service) << '\n'
      << "qos_targets = " << list(s.qos_targets) << '\n'
      << "power_per_rb = " << format_double(s.power_per_rb) << '\n'
      << "cell_radius = " << format_double(s.cell_radius) << '\n'
      << "min_distance = " << format_double(s.min_distance) << '\n';
  if (s.fixed_distance) out << "fixed_distance = " << format_double(*s.fixed_distance) << '\n';
  out << "shadowing_stddev_db = " << format_double(s.shadowing_stddev_db) << '\n'
      << "pathloss_offset_db = " << format_double(s.pathloss_offset_db) << '\n'
      << "pathloss_slope_db = " << format_double(s.pathloss_slope_db) << '\n'
      << "noise_spectral_density = " << format_double(s.noise_spectral_density) << '\n'
      << "subcarriers_per_rb = " << s.subcarriers_per_rb << '\n'
      << "subcarrier_spacing = " << format_double(s.subcarrier_spacing) << '\n'
      << "mcs_levels = " << s.mcs_levels << '\n'
      << "mcs_min_db = " << format_double(s.mcs_min_db) << '\n'
      << "mcs_max_db = " << format_double(s.mcs_max_db) << '\n'
      << "rng_seed = " << s.rng_seed << '\n';

  const auto& t = config.trainer;
  out << "\n[trainer]\n"
      << "episodes = " << t.episodes << '\n'
      << "batch_size = " << t.batch_size << '\n'
      << "target_update_period = " << t.target_update_period << '\n'
      << "discount = " << format_double(t.discount) << '\n'
      << "memory_capacity = " << t.memory_capacity << '\n'
      << "hidden_units = " << t.hidden_units << '\n'
      << "learning_rate = " << format_double(t.adam.learning_rate) << '\n'
      << "adam_beta1 = " << format_double(t.adam.beta1) << '\n'
      << "adam_beta2 = " << format_double(t.adam.beta2) << '\n'
      << "adam_epsilon = " << format_double(t.adam.epsilon) << '\n'
      << "epsilon_initial = " << format_double(t.epsilon.initial) << '\n'
      << "epsilon_decay = " << format_double(t.epsilon.decay) << '\n'
      << "epsilon_floor = " << format_double(t.epsilon.floor) << '\n'
      << "return_last_action = " << (t.return_last_action ? "true" : "false") << '\n';

  const auto& q = config.tabular;
  out << "\n[tabular]\n"
      << "episodes = " << q.episodes << '\n'
      << "learning_rate = " << format_double(q.learning_rate) << '\n'
      << "discount = " << format_double(q.discount) << '\n'
      << "epsilon_initial = " << format_double(q.epsilon.initial) << '\n'
      << "epsilon_decay = " << format_double(q.epsilon.decay) << '\n'
      << "epsilon_floor = " << format_double(q.epsilon.floor) << '\n';
}

void write_instance(std::ostream& out, const Instance& inst) {
  auto doubles = [&](const char* tag, const std::vector<double>& values) {
    out << tag;
    for (double v : values) out << ',' << format_double(v);
    out << '\n';
  };
  out << "instance," << inst.id << '\n';
  out << "dims," << inst.num_ues() << ',' << inst.num_rbs() << '\n';
  out << "service," << join_ints(inst.service, ',') << '\n';
  out << "min_satisfied," << join_ints(inst.min_satisfied, ',') << '\n';
  doubles("qos", inst.qos);
  doubles("path_gain", inst.path_gain);
  for (const auto& [tag, m] : {std::pair{"snr", &inst.snr}, std::pair{"rate", &inst.rate}}) {
    for (Eigen::Index j = 0; j < m->rows(); ++j) {
      out << tag << ',' << j;
      for (Eigen::Index n = 0; n < m->cols(); ++n) out << ',' << format_double((*m)(j, n));
      out << '\n';
    }
  }
  out << "end\n";
}

void write_instances(std::ostream& out, const std::vector<Instance>& instances) {
  for (const auto& inst : instances) write_instance(out, inst);
}

std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> result;
  std::string line;
  std::size_t line_no = 0;
  std::optional<Instance> current;
  int ues = 0;
  int rbs = 0;

  auto fail = [&](const std::string& msg) {
    throw ConfigError("instance file line " + std::to_string(line_no) + ": " + msg);
  };
  auto numbers = [&](const std::vector<std::string_view>& fields, std::size_t from) {
    std::vector<double> values;
    for (std::size_t i = from; i < fields.size(); ++i) values.push_back(parse_double(fields[i]));
    return values;
  };
  auto ints = [&](const std::vector<std::string_view>& fields) {
    std::vector<int> values;
    for (double v : numbers(fields, 1)) values.push_back(static_cast<int>(v));
    return values;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    const std::string_view tag = fields.front();
    try {
      if (tag == "instance") {
        if (current) fail("missing 'end' before new instance");
        if (fields.size() != 2) fail("expected instance,<id>");
        current.emplace();
        current->id = std::stoull(std::string(fields[1]));
        ues = rbs = 0;
        continue;
      }
      if (!current) fail("record outside an instance block");
      if (tag == "dims") {
        if (fields.size() != 3) fail("expected dims,<J>,<N>");
        ues = static_cast<int>(parse_double(fields[1]));
        rbs = static_cast<int>(parse_double(fields[2]));
        if (ues < 1 || rbs < 1) fail("dimensions must be >= 1");
        current->snr = UeRbMatrix::Constant(ues, rbs, -1.0);
        current->rate = UeRbMatrix::Constant(ues, rbs, -1.0);
      } else if (tag == "service") {
        current->service = ints(fields);
      } else if (tag == "min_satisfied") {
        current->min_satisfied = ints(fields);
      } else if (tag == "qos") {
        current->qos = numbers(fields, 1);
      } else if (tag == "path_gain") {
        current->path_gain = numbers(fields, 1);
      } else if (tag == "snr" || tag == "rate") {
        if (ues == 0) fail("matrix row before dims");
        if (fields.size() != static_cast<std::size_t>(rbs) + 2) fail("matrix row has wrong length");
        const int j = static_cast<int>(parse_double(fields[1]));
        if (j < 0 || j >= ues) fail("UE index out of range");
        auto& m = tag == "snr" ? current->snr : current->rate;
        const auto values = numbers(fields, 2);
        for (int n = 0; n < rbs; ++n) m(j, n) = values[static_cast<std::size_t>(n)];
      } else if (tag == "end") {
        current->validate();
        result.push_back(std::move(*current));
        current.reset();
      } else {
        fail("unknown record '" + std::string(tag) + "'");
      }
    } catch (const InvalidParameter& e) {
      fail(e.what());
    } catch (const std::logic_error&) {
      fail("malformed number");
    }
  }
  if (current) throw ConfigError("instance file: missing final 'end'");
  return result;
}

std::vector<Instance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file " + path.string());
  return read_instances(in);
}

void write_matrix_csv(std::ostream& out, const UeRbMatrix& matrix) {
  for (Eigen::Index j = 0; j < matrix.rows(); ++j) {
    for (Eigen::Index n = 0; n < matrix.cols(); ++n) {
      if (n) out << ',';
      out << format_double(matrix(j, n));
    }
    out << '\n';
  }
}

}  // namespace rbassign
