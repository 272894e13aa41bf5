#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace rbassign {

using Rng = std::mt19937_64;

// Row = UE, column = RB.
using UeRbMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct McsLevel {
  double snr_threshold;  // linear
  double rate;           // bits/s on one RB
};

// Discrete, monotone SNR-to-rate map. The first level must carry rate 0 so
// that SNRs below the lowest usable MCS produce no transmission.
class McsTable {
 public:
  McsTable() = default;
  explicit McsTable(std::vector<McsLevel> levels);

  // Truncated Shannon capacity sampled at `num_levels` thresholds spaced
  // evenly in dB over [min_db, max_db], each rate floored to whole bits/s.
  // A leading (0, 0) entry is prepended.
  static McsTable truncated_shannon(double bandwidth_hz, int num_levels, double min_db,
                                    double max_db);

  const std::vector<McsLevel>& levels() const { return levels_; }
  bool empty() const { return levels_.empty(); }
  double max_rate() const;

 private:
  std::vector<McsLevel> levels_;
};

struct ScenarioConfig {
  int num_rbs = 6;
  int num_ues = 4;
  // UEs are grouped contiguously: the first ues_per_service[0] UEs belong to
  // service 0, and so on.
  std::vector<int> ues_per_service{2, 2};
  std::vector<int> min_satisfied_per_service{2, 1};
  std::vector<double> qos_targets{150e3, 150e3, 300e3, 300e3};  // bits/s per UE

  double power_per_rb = 0.35;  // W
  double cell_radius = 334.0;  // m
  double min_distance = 10.0;  // m
  std::optional<double> fixed_distance;
  double shadowing_stddev_db = 8.0;
  double pathloss_offset_db = 35.3;
  double pathloss_slope_db = 37.6;          // per decade of distance in meters
  double noise_spectral_density = 3.16e-20;  // W/Hz
  int subcarriers_per_rb = 12;
  double subcarrier_spacing = 15e3;  // Hz

  int mcs_levels = 15;
  double mcs_min_db = -6.5;
  double mcs_max_db = 19.5;

  std::uint64_t rng_seed = 1;

  int num_services() const { return static_cast<int>(ues_per_service.size()); }
  double rb_bandwidth() const { return subcarriers_per_rb * subcarrier_spacing; }
  double noise_power() const { return noise_spectral_density * rb_bandwidth(); }
  std::vector<int> service_of_ue() const;
  McsTable mcs_table() const;

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

struct Instance {
  std::uint64_t id = 0;
  UeRbMatrix snr;   // linear
  UeRbMatrix rate;  // bits/s
  std::vector<double> qos;          // per UE, bits/s
  std::vector<int> service;         // per UE
  std::vector<int> min_satisfied;   // per service
  std::vector<double> path_gain;    // per UE, linear (path loss and shadowing)

  int num_ues() const { return static_cast<int>(rate.rows()); }
  int num_rbs() const { return static_cast<int>(rate.cols()); }
  int num_services() const { return static_cast<int>(min_satisfied.size()); }

  void validate() const;
};

// p * alpha * |h|^2 / noise.
double compute_snr(double power, double path_gain, double channel_magnitude, double noise_power);

// Rate of the highest threshold not above `snr`.
double link_adaptation(double snr, const McsTable& table);

// Rayleigh magnitude with E[|h|^2] = 1.
double draw_channel_magnitude(Rng& rng);

// 35.3 + 37.6 log10(d) style loss in dB.
double path_loss_db(const ScenarioConfig& config, double distance_m);

Instance generate_instance(const ScenarioConfig& config, const McsTable& table, Rng& rng,
                           std::uint64_t instance_id = 0);
Instance generate_instance(const ScenarioConfig& config, std::uint64_t seed,
                           std::uint64_t instance_id = 0);

// Replaces QoS targets, keeping channels. Used to evaluate the same
// realization across QoS levels.
Instance with_qos(Instance instance, std::vector<double> qos);

}  // namespace rbassign
