#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "rbassign/assignment.hpp"

namespace rbassign {

enum class SolveStatus { kOptimal, kInfeasible };

std::string_view to_string(SolveStatus status);

struct OptResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Assignment best;         // empty when infeasible
  double objective = 0.0;  // system throughput of `best`, bits/s
  std::uint64_t nodes_explored = 0;

  bool feasible() const { return status == SolveStatus::kOptimal; }
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

// Exhaustive enumeration of all J^N assignments. Ties go to the
// lexicographically smallest rb_owner vector. Throws ResourceLimit when
// J^N exceeds `budget`; use solve_pruned for those.
OptResult solve_brute_force(const Instance& instance,
                            std::uint64_t budget = kDefaultEnumerationBudget);

// Depth-first branch and bound over RBs in index order. Prunes on
//  - throughput: partial sum plus the best rate of every remaining RB, and
//  - satisfaction: the cheapest UEs still able to reach their targets must
//    fit into the remaining RBs for every service quota.
// Returns the same status and objective as solve_brute_force.
OptResult solve_pruned(const Instance& instance);

bool is_feasible(const Instance& instance);

// instance_id,status,objective_bps,nodes_explored,assignment
void write_opt_result_csv(std::ostream& out, std::uint64_t instance_id, const OptResult& result);
inline constexpr std::string_view kOptResultCsvHeader =
    "instance_id,status,objective_bps,nodes_explored,assignment";

}  // namespace rbassign
