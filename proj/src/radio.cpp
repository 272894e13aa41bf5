#include "rbassign/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rbassign/errors.hpp"

namespace rbassign {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

McsTable::McsTable(std::vector<McsLevel> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) return;
  if (levels_.front().rate != 0.0) {
    throw ConfigError("MCS table: first level must map to rate 0");
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& level = levels_[i];
    if (!std::isfinite(level.snr_threshold) || !std::isfinite(level.rate) ||
        level.snr_threshold < 0.0 || level.rate < 0.0) {
      throw ConfigError("MCS table: thresholds and rates must be finite and non-negative");
    }
    if (i > 0) {
      if (level.snr_threshold <= levels_[i - 1].snr_threshold) {
        throw ConfigError("MCS table: thresholds must be strictly increasing");
      }
      if (level.rate < levels_[i - 1].rate) {
        throw ConfigError("MCS table: rates must be nondecreasing");
      }
    }
  }
}

McsTable McsTable::truncated_shannon(double bandwidth_hz, int num_levels, double min_db,
                                     double max_db) {
  if (num_levels < 1 || !(bandwidth_hz > 0.0) || !(max_db >= min_db)) {
    throw ConfigError("MCS table: invalid Shannon table parameters");
  }
  std::vector<McsLevel> levels;
  levels.reserve(static_cast<std::size_t>(num_levels) + 1);
  levels.push_back({0.0, 0.0});
  for (int k = 0; k < num_levels; ++k) {
    const double db =
        num_levels == 1 ? min_db : min_db + (max_db - min_db) * k / (num_levels - 1);
    const double snr = db_to_linear(db);
    levels.push_back({snr, std::floor(bandwidth_hz * std::log2(1.0 + snr))});
  }
  return McsTable(std::move(levels));
}

double McsTable::max_rate() const { return levels_.empty() ? 0.0 : levels_.back().rate; }

std::vector<int> ScenarioConfig::service_of_ue() const {
  std::vector<int> service;
  service.reserve(static_cast<std::size_t>(num_ues));
  for (int l = 0; l < num_services(); ++l) {
    service.insert(service.end(), static_cast<std::size_t>(std::max(ues_per_service[l], 0)), l);
  }
  return service;
}

McsTable ScenarioConfig::mcs_table() const {
  return McsTable::truncated_shannon(rb_bandwidth(), mcs_levels, mcs_min_db, mcs_max_db);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (num_rbs < 1) fail("num_rbs must be >= 1");
  if (num_ues < 1) fail("num_ues must be >= 1");
  if (ues_per_service.empty()) fail("at least one service is required");
  if (min_satisfied_per_service.size() != ues_per_service.size()) {
    fail("min_satisfied_per_service must have one entry per service");
  }
  int total = 0;
  for (std::size_t l = 0; l < ues_per_service.size(); ++l) {
    if (ues_per_service[l] < 0) fail("ues_per_service entries must be >= 0");
    if (min_satisfied_per_service[l] < 0 || min_satisfied_per_service[l] > ues_per_service[l]) {
      fail("min_satisfied_per_service[l] must lie in [0, ues_per_service[l]]");
    }
    total += ues_per_service[l];
  }
  if (total != num_ues) fail("ues_per_service must sum to num_ues");
  if (qos_targets.size() != static_cast<std::size_t>(num_ues)) {
    fail("qos_targets must have one entry per UE");
  }
  for (double xi : qos_targets) {
    if (!(xi > 0.0) || !std::isfinite(xi)) fail("qos targets must be positive and finite");
  }
  if (!(power_per_rb > 0.0) || !std::isfinite(power_per_rb)) fail("power_per_rb must be > 0");
  if (!(min_distance > 0.0) || !(cell_radius >= min_distance)) {
    fail("require 0 < min_distance <= cell_radius");
  }
  if (fixed_distance && !(*fixed_distance > 0.0)) fail("fixed_distance must be > 0");
  if (!(shadowing_stddev_db >= 0.0)) fail("shadowing_stddev_db must be >= 0");
  if (!(noise_spectral_density > 0.0)) fail("noise_spectral_density must be > 0");
  if (subcarriers_per_rb < 1 || !(subcarrier_spacing > 0.0)) fail("RB bandwidth must be > 0");
  if (mcs_levels < 1) fail("mcs_levels must be >= 1");
}

void Instance::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidParameter("instance: " + msg); };
  if (rate.rows() < 1 || rate.cols() < 1) fail("empty rate matrix");
  if (snr.rows() != rate.rows() || snr.cols() != rate.cols()) fail("snr/rate shape mismatch");
  const auto ues = static_cast<std::size_t>(rate.rows());
  if (qos.size() != ues || service.size() != ues) fail("per-UE vectors must have J entries");
  if (!path_gain.empty() && path_gain.size() != ues) fail("path_gain must have J entries");
  if (min_satisfied.empty()) fail("at least one service is required");
  std::vector<int> members(min_satisfied.size(), 0);
  for (int s : service) {
    if (s < 0 || s >= num_services()) fail("service index out of range");
    ++members[static_cast<std::size_t>(s)];
  }
  for (std::size_t l = 0; l < min_satisfied.size(); ++l) {
    if (min_satisfied[l] < 0 || min_satisfied[l] > members[l]) {
      fail("min_satisfied must lie in [0, service size]");
    }
  }
  for (double xi : qos) {
    if (!(xi > 0.0) || !std::isfinite(xi)) fail("qos targets must be positive and finite");
  }
  if (!rate.allFinite() || !snr.allFinite() || (rate.array() < 0.0).any() ||
      (snr.array() < 0.0).any()) {
    fail("snr and rate entries must be finite and non-negative");
  }
}

double compute_snr(double power, double path_gain, double channel_magnitude,
                   double noise_power) {
  if (!std::isfinite(power) || !std::isfinite(path_gain) || !std::isfinite(channel_magnitude) ||
      !std::isfinite(noise_power)) {
    throw InvalidParameter("compute_snr: non-finite input");
  }
  if (power < 0.0 || path_gain < 0.0 || channel_magnitude < 0.0 || !(noise_power > 0.0)) {
    throw InvalidParameter("compute_snr: inputs must be >= 0 and noise power > 0");
  }
  return power * path_gain * channel_magnitude * channel_magnitude / noise_power;
}

double link_adaptation(double snr, const McsTable& table) {
  if (table.empty()) throw ConfigError("link_adaptation: empty MCS table");
  if (std::isnan(snr) || snr < 0.0) throw InvalidParameter("link_adaptation: snr must be >= 0");
  const auto& levels = table.levels();
  auto it = std::upper_bound(levels.begin(), levels.end(), snr,
                             [](double s, const McsLevel& l) { return s < l.snr_threshold; });
  if (it == levels.begin()) return 0.0;
  return std::prev(it)->rate;
}

double draw_channel_magnitude(Rng& rng) {
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));
  const double re = component(rng);
  const double im = component(rng);
  return std::hypot(re, im);
}

double path_loss_db(const ScenarioConfig& config, double distance_m) {
  return config.pathloss_offset_db + config.pathloss_slope_db * std::log10(distance_m);
}

Instance generate_instance(const ScenarioConfig& config, const McsTable& table, Rng& rng,
                           std::uint64_t instance_id) {
  config.validate();
  if (table.empty()) throw ConfigError("generate_instance: empty MCS table");

  const int ues = config.num_ues;
  const int rbs = config.num_rbs;
  const double noise = config.noise_power();

  Instance inst;
  inst.id = instance_id;
  inst.snr.resize(ues, rbs);
  inst.rate.resize(ues, rbs);
  inst.qos = config.qos_targets;
  inst.service = config.service_of_ue();
  inst.min_satisfied = config.min_satisfied_per_service;
  inst.path_gain.resize(static_cast<std::size_t>(ues));

  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double r_min2 = config.min_distance * config.min_distance;
  const double r_max2 = config.cell_radius * config.cell_radius;
  for (int j = 0; j < ues; ++j) {
    // Uniform over the annulus area.
    const double distance = config.fixed_distance
                                ? *config.fixed_distance
                                : std::sqrt(r_min2 + unit(rng) * (r_max2 - r_min2));
    double loss_db = path_loss_db(config, distance);
    if (config.shadowing_stddev_db > 0.0) {
      loss_db += std::normal_distribution<double>(0.0, config.shadowing_stddev_db)(rng);
    }
    inst.path_gain[static_cast<std::size_t>(j)] = db_to_linear(-loss_db);
  }
  for (int j = 0; j < ues; ++j) {
    for (int n = 0; n < rbs; ++n) {
      const double h = draw_channel_magnitude(rng);
      const double snr =
          compute_snr(config.power_per_rb, inst.path_gain[static_cast<std::size_t>(j)], h, noise);
      inst.snr(j, n) = snr;
      inst.rate(j, n) = link_adaptation(snr, table);
    }
  }
  return inst;
}

Instance generate_instance(const ScenarioConfig& config, std::uint64_t seed,
                           std::uint64_t instance_id) {
  Rng rng(seed);
  return generate_instance(config, config.mcs_table(), rng, instance_id);
}

Instance with_qos(Instance instance, std::vector<double> qos) {
  if (qos.size() != static_cast<std::size_t>(instance.num_ues())) {
    throw InvalidParameter("with_qos: one target per UE required");
  }
  instance.qos = std::move(qos);
  instance.validate();
  return instance;
}

}  // namespace rbassign
