#include "rbassign/exact_solver.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "rbassign/errors.hpp"
#include "rbassign/text_format.hpp"

namespace rbassign {

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::kOptimal ? "optimal" : "infeasible";
}

namespace {

OptResult finish(const Instance& instance, Assignment best, bool found, std::uint64_t nodes) {
  OptResult result;
  result.nodes_explored = nodes;
  if (found) {
    result.status = SolveStatus::kOptimal;
    result.objective = evaluate(instance, best).system_throughput();
    result.best = std::move(best);
  }
  return result;
}

bool quotas_met(const Instance& instance, const std::vector<double>& ue_rate) {
  std::vector<int> satisfied(instance.min_satisfied.size(), 0);
  for (std::size_t j = 0; j < ue_rate.size(); ++j) {
    if (ue_rate[j] >= instance.qos[j]) ++satisfied[static_cast<std::size_t>(instance.service[j])];
  }
  for (std::size_t l = 0; l < satisfied.size(); ++l) {
    if (satisfied[l] < instance.min_satisfied[l]) return false;
  }
  return true;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const Instance& instance)
      : inst_(instance),
        ues_(instance.num_ues()),
        rbs_(instance.num_rbs()),
        suffix_best_(static_cast<std::size_t>(rbs_) + 1, 0.0),
        ue_rate_(static_cast<std::size_t>(ues_), 0.0),
        owner_(static_cast<std::size_t>(rbs_), 0) {
    for (int n = rbs_ - 1; n >= 0; --n) {
      suffix_best_[static_cast<std::size_t>(n)] =
          suffix_best_[static_cast<std::size_t>(n) + 1] + instance.rate.col(n).maxCoeff();
    }
  }

  OptResult run() {
    search(0, 0.0);
    return finish(inst_, Assignment{best_owner_}, found_, nodes_);
  }

 private:
  void search(int rb, double partial) {
    ++nodes_;
    if (rb == rbs_) {
      if (quotas_met(inst_, ue_rate_) && (!found_ || partial > best_value_)) {
        found_ = true;
        best_value_ = partial;
        best_owner_ = owner_;
      }
      return;
    }
    if (found_ && partial + suffix_best_[static_cast<std::size_t>(rb)] <= best_value_) return;
    if (!quotas_reachable(rb)) return;

    for (int j = 0; j < ues_; ++j) {
      const double r = inst_.rate(j, rb);
      owner_[static_cast<std::size_t>(rb)] = j;
      ue_rate_[static_cast<std::size_t>(j)] += r;
      search(rb + 1, partial + r);
      ue_rate_[static_cast<std::size_t>(j)] -= r;
    }
  }

  // Minimum number of still-free RBs UE j needs to reach its target, or
  // int max when even all of them fall short.
  int rbs_needed(int j, int first_free) {
    const double deficit = inst_.qos[static_cast<std::size_t>(j)] - ue_rate_[static_cast<std::size_t>(j)];
    if (deficit <= 0.0) return 0;
    scratch_.clear();
    for (int n = first_free; n < rbs_; ++n) scratch_.push_back(inst_.rate(j, n));
    std::sort(scratch_.begin(), scratch_.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t t = 0; t < scratch_.size(); ++t) {
      acc += scratch_[t];
      if (acc >= deficit) return static_cast<int>(t) + 1;
    }
    return std::numeric_limits<int>::max();
  }

  bool quotas_reachable(int first_free) {
    const int free_rbs = rbs_ - first_free;
    int total_needed = 0;
    for (int l = 0; l < inst_.num_services(); ++l) {
      costs_.clear();
      int already = 0;
      for (int j = 0; j < ues_; ++j) {
        if (inst_.service[static_cast<std::size_t>(j)] != l) continue;
        const int need = rbs_needed(j, first_free);
        if (need == 0) {
          ++already;
        } else {
          costs_.push_back(need);
        }
      }
      const int missing = inst_.min_satisfied[static_cast<std::size_t>(l)] - already;
      if (missing <= 0) continue;
      if (static_cast<int>(costs_.size()) < missing) return false;
      std::partial_sort(costs_.begin(), costs_.begin() + missing, costs_.end());
      for (int k = 0; k < missing; ++k) {
        if (costs_[static_cast<std::size_t>(k)] > free_rbs) return false;
        total_needed += costs_[static_cast<std::size_t>(k)];
        if (total_needed > free_rbs) return false;
      }
    }
    return true;
  }

  const Instance& inst_;
  int ues_;
  int rbs_;
  std::vector<double> suffix_best_;
  std::vector<double> ue_rate_;
  std::vector<int> owner_;
  std::vector<int> best_owner_;
  std::vector<double> scratch_;
  std::vector<int> costs_;
  double best_value_ = 0.0;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace

OptResult solve_brute_force(const Instance& instance, std::uint64_t budget) {
  instance.validate();
  const int ues = instance.num_ues();
  const int rbs = instance.num_rbs();

  std::uint64_t total = 1;
  for (int n = 0; n < rbs; ++n) {
    if (total > budget / static_cast<std::uint64_t>(ues)) {
      throw ResourceLimit("solve_brute_force: J^N exceeds the enumeration budget of " +
                          std::to_string(budget) + "; use solve_pruned");
    }
    total *= static_cast<std::uint64_t>(ues);
  }

  std::vector<int> owner(static_cast<std::size_t>(rbs), 0);
  std::vector<double> ue_rate(static_cast<std::size_t>(ues));
  std::vector<int> best_owner;
  double best_value = 0.0;
  bool found = false;

  for (std::uint64_t count = 0; count < total; ++count) {
    std::fill(ue_rate.begin(), ue_rate.end(), 0.0);
    double value = 0.0;
    for (int n = 0; n < rbs; ++n) {
      const int j = owner[static_cast<std::size_t>(n)];
      const double r = instance.rate(j, n);
      ue_rate[static_cast<std::size_t>(j)] += r;
      value += r;
    }
    if ((!found || value > best_value) && quotas_met(instance, ue_rate)) {
      found = true;
      best_value = value;
      best_owner = owner;
    }
    // Odometer increment, last RB fastest, so visiting order is lexicographic.
    for (int n = rbs - 1; n >= 0; --n) {
      if (++owner[static_cast<std::size_t>(n)] < ues) break;
      owner[static_cast<std::size_t>(n)] = 0;
    }
  }
  return finish(instance, Assignment{best_owner}, found, total);
}

OptResult solve_pruned(const Instance& instance) {
  instance.validate();
  return BranchAndBound(instance).run();
}

bool is_feasible(const Instance& instance) { return solve_pruned(instance).feasible(); }

void write_opt_result_csv(std::ostream& out, std::uint64_t instance_id, const OptResult& result) {
  out << instance_id << ',' << to_string(result.status) << ',' << format_double(result.objective)
      << ',' << result.nodes_explored << ',' << join_ints(result.best.rb_owner, ';') << '\n';
}

}  // namespace rbassign
