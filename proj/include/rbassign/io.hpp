#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rbassign/ddqn.hpp"
#include "rbassign/radio.hpp"
#include "rbassign/tabular.hpp"

namespace rbassign {

// Everything a run needs, read from one INI-style key = value file with
// [scenario], [trainer] and [tabular] sections. Absent keys keep their
// defaults; unknown keys are rejected.
struct RunConfig {
  ScenarioConfig scenario;
  TrainerConfig trainer;
  TabularConfig tabular;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);
void write_run_config(std::ostream& out, const RunConfig& config);

// Text instance format, one or more records:
//   instance,<id>
//   dims,<J>,<N>
//   service,<s_0>,...,<s_{J-1}>
//   min_satisfied,<eta_0>,...,<eta_{L-1}>
//   qos,<xi_0>,...
//   path_gain,<alpha_0>,...
//   snr,<j>,<gamma_j0>,...,<gamma_j(N-1)>     (J lines)
//   rate,<j>,<r_j0>,...,<r_j(N-1)>            (J lines)
//   end
// Numbers round-trip exactly.
void write_instance(std::ostream& out, const Instance& instance);
void write_instances(std::ostream& out, const std::vector<Instance>& instances);
std::vector<Instance> read_instances(std::istream& in);
std::vector<Instance> load_instances(const std::filesystem::path& path);

// Plain matrix dump, row = UE, column = RB.
void write_matrix_csv(std::ostream& out, const UeRbMatrix& matrix);

}  // namespace rbassign
