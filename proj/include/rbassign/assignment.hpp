#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rbassign/radio.hpp"

namespace rbassign {

// rb_owner[n] is the UE that receives RB n. One owner per RB is enforced by
// construction, so only the index range needs validating.
struct Assignment {
  std::vector<int> rb_owner;

  int num_rbs() const { return static_cast<int>(rb_owner.size()); }
  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;
};

// Throws InvalidParameter when the assignment does not fit the instance.
void check_assignment(const Instance& instance, const Assignment& assignment);

struct SatisfactionReport {
  std::vector<double> ue_throughput;    // R_j
  std::vector<bool> ue_satisfied;       // R_j >= xi_j
  std::vector<int> service_satisfied;   // satisfied UEs per service
  bool feasible = false;

  double system_throughput() const;
};

SatisfactionReport evaluate(const Instance& instance, const Assignment& assignment);

// Penalty returned when an infeasible assignment has zero system throughput,
// where the shaped reward would divide by zero: -(sum of eta_l).
double zero_throughput_penalty(const Instance& instance);

// Shaped reward: the system throughput for feasible assignments, otherwise
// theta / throughput where theta sums the normalized shortfalls
// (R_j - xi_j) / xi_j of unsatisfied UEs in services that miss their quota.
double reward(const Instance& instance, const Assignment& assignment);
double reward(const Instance& instance, const SatisfactionReport& report);

// One CSV row per UE: ue,service,throughput,target,satisfied.
void write_report_csv(std::ostream& out, const Instance& instance,
                      const SatisfactionReport& report);

// Base-J digits of `index`, least significant digit on RB N-1. Index 0 is
// the all-zeros vector and indices increase lexicographically.
Assignment assignment_from_index(std::uint64_t index, int num_ues, int num_rbs);
std::uint64_t assignment_index(const Assignment& assignment, int num_ues);

}  // namespace rbassign
