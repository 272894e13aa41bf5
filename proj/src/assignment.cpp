#include "rbassign/assignment.hpp"

#include <numeric>
#include <ostream>
#include <string>

#include "rbassign/errors.hpp"

namespace rbassign {

void check_assignment(const Instance& instance, const Assignment& assignment) {
  if (assignment.num_rbs() != instance.num_rbs()) {
    throw InvalidParameter("assignment length " + std::to_string(assignment.num_rbs()) +
                           " does not match N = " + std::to_string(instance.num_rbs()));
  }
  for (int owner : assignment.rb_owner) {
    if (owner < 0 || owner >= instance.num_ues()) {
      throw InvalidParameter("assignment entry " + std::to_string(owner) + " outside [0, J)");
    }
  }
}

double SatisfactionReport::system_throughput() const {
  return std::accumulate(ue_throughput.begin(), ue_throughput.end(), 0.0);
}

SatisfactionReport evaluate(const Instance& instance, const Assignment& assignment) {
  check_assignment(instance, assignment);
  const auto ues = static_cast<std::size_t>(instance.num_ues());

  SatisfactionReport report;
  report.ue_throughput.assign(ues, 0.0);
  for (int n = 0; n < instance.num_rbs(); ++n) {
    const int j = assignment.rb_owner[static_cast<std::size_t>(n)];
    report.ue_throughput[static_cast<std::size_t>(j)] += instance.rate(j, n);
  }
  report.ue_satisfied.assign(ues, false);
  report.service_satisfied.assign(instance.min_satisfied.size(), 0);
  for (std::size_t j = 0; j < ues; ++j) {
    // Heaviside step with u(a, b) = 1 at a == b.
    if (report.ue_throughput[j] >= instance.qos[j]) {
      report.ue_satisfied[j] = true;
      ++report.service_satisfied[static_cast<std::size_t>(instance.service[j])];
    }
  }
  report.feasible = true;
  for (std::size_t l = 0; l < instance.min_satisfied.size(); ++l) {
    if (report.service_satisfied[l] < instance.min_satisfied[l]) report.feasible = false;
  }
  return report;
}

double zero_throughput_penalty(const Instance& instance) {
  return -static_cast<double>(
      std::accumulate(instance.min_satisfied.begin(), instance.min_satisfied.end(), 0));
}

double reward(const Instance& instance, const SatisfactionReport& report) {
  const double throughput = report.system_throughput();
  double shortfall = 0.0;
  for (std::size_t l = 0; l < instance.min_satisfied.size(); ++l) {
    if (report.service_satisfied[l] >= instance.min_satisfied[l]) continue;
    for (std::size_t j = 0; j < report.ue_throughput.size(); ++j) {
      if (static_cast<std::size_t>(instance.service[j]) != l || report.ue_satisfied[j]) continue;
      shortfall += (report.ue_throughput[j] - instance.qos[j]) / instance.qos[j];
    }
  }
  if (shortfall < 0.0) {
    if (throughput == 0.0) return zero_throughput_penalty(instance);
    return shortfall / throughput;
  }
  return throughput;
}

double reward(const Instance& instance, const Assignment& assignment) {
  return reward(instance, evaluate(instance, assignment));
}

void write_report_csv(std::ostream& out, const Instance& instance,
                      const SatisfactionReport& report) {
  out << "ue,service,throughput_bps,target_bps,satisfied\n";
  for (std::size_t j = 0; j < report.ue_throughput.size(); ++j) {
    out << j << ',' << instance.service[j] << ',' << report.ue_throughput[j] << ','
        << instance.qos[j] << ',' << (report.ue_satisfied[j] ? 1 : 0) << '\n';
  }
}

Assignment assignment_from_index(std::uint64_t index, int num_ues, int num_rbs) {
  Assignment a;
  a.rb_owner.assign(static_cast<std::size_t>(num_rbs), 0);
  const auto base = static_cast<std::uint64_t>(num_ues);
  for (int n = num_rbs - 1; n >= 0; --n) {
    a.rb_owner[static_cast<std::size_t>(n)] = static_cast<int>(index % base);
    index /= base;
  }
  return a;
}

std::uint64_t assignment_index(const Assignment& assignment, int num_ues) {
  std::uint64_t index = 0;
  for (int owner : assignment.rb_owner) {
    index = index * static_cast<std::uint64_t>(num_ues) + static_cast<std::uint64_t>(owner);
  }
  return index;
}

}  // namespace rbassign
