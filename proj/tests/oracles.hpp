#pragma once

// Independent re-implementations used only by tests. Nothing here calls
// into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "rbassign/assignment.hpp"
#include "rbassign/neural.hpp"
#include "rbassign/radio.hpp"

namespace rbassign::oracle {

struct Evaluation {
  std::vector<double> throughput;
  std::vector<int> satisfied;
  std::vector<int> per_service;
  bool feasible = true;
  double total = 0.0;
};

// Loops over every (j, n) pair with an explicit indicator.
inline Evaluation evaluate(const Instance& inst, const std::vector<int>& owner) {
  const int J = static_cast<int>(inst.rate.rows());
  const int N = static_cast<int>(inst.rate.cols());
  Evaluation e;
  e.throughput.assign(J, 0.0);
  e.satisfied.assign(J, 0);
  e.per_service.assign(inst.min_satisfied.size(), 0);
  for (int j = 0; j < J; ++j) {
    for (int n = 0; n < N; ++n) {
      const double x = owner[n] == j ? 1.0 : 0.0;
      e.throughput[j] += inst.rate(j, n) * x;
    }
  }
  for (int j = 0; j < J; ++j) {
    e.satisfied[j] = e.throughput[j] >= inst.qos[j] ? 1 : 0;
    e.per_service[inst.service[j]] += e.satisfied[j];
    e.total += e.throughput[j];
  }
  for (std::size_t l = 0; l < inst.min_satisfied.size(); ++l) {
    if (e.per_service[l] < inst.min_satisfied[l]) e.feasible = false;
  }
  return e;
}

// Straight-line transcription of the reward procedure.
inline double reward(const Instance& inst, const std::vector<int>& owner) {
  const Evaluation e = evaluate(inst, owner);
  double phi = e.total;
  double theta = 0.0;
  for (std::size_t l = 0; l < inst.min_satisfied.size(); ++l) {
    int count = 0;
    for (std::size_t j = 0; j < inst.qos.size(); ++j) {
      if (inst.service[j] == static_cast<int>(l) && e.throughput[j] >= inst.qos[j]) ++count;
    }
    if (count < inst.min_satisfied[l]) {
      for (std::size_t j = 0; j < inst.qos.size(); ++j) {
        if (inst.service[j] == static_cast<int>(l) && e.throughput[j] < inst.qos[j]) {
          theta = theta + (e.throughput[j] - inst.qos[j]) / inst.qos[j];
        }
      }
    }
  }
  if (theta < 0) phi = theta / phi;
  return phi;
}

// Linearized feasibility: is there rho in {0,1}^J with R_j >= xi_j rho_j and
// sum_{j in service l} rho_j >= eta_l? Enumerates all rho.
inline bool linearized_feasible(const Instance& inst, const std::vector<int>& owner) {
  const Evaluation e = evaluate(inst, owner);
  const int J = static_cast<int>(inst.qos.size());
  for (std::uint32_t mask = 0; mask < (1u << J); ++mask) {
    bool ok = true;
    std::vector<int> chosen(inst.min_satisfied.size(), 0);
    for (int j = 0; j < J && ok; ++j) {
      const int rho = (mask >> j) & 1u;
      if (e.throughput[j] < inst.qos[j] * rho) ok = false;
      chosen[inst.service[j]] += rho;
    }
    for (std::size_t l = 0; l < chosen.size() && ok; ++l) {
      if (chosen[l] < inst.min_satisfied[l]) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

// Every rb_owner vector in lexicographic order.
template <typename Fn>
void for_each_assignment(int J, int N, Fn&& fn) {
  std::vector<int> owner(N, 0);
  while (true) {
    fn(owner);
    int n = N - 1;
    while (n >= 0 && ++owner[n] == J) owner[n--] = 0;
    if (n < 0) return;
  }
}

struct Optimum {
  bool feasible = false;
  double objective = 0.0;
};

inline Optimum enumerate_optimum(const Instance& inst) {
  Optimum best;
  for_each_assignment(inst.num_ues(), inst.num_rbs(), [&](const std::vector<int>& owner) {
    const Evaluation e = evaluate(inst, owner);
    if (e.feasible && (!best.feasible || e.total > best.objective)) {
      best.feasible = true;
      best.objective = e.total;
    }
  });
  return best;
}

// Instance from a row-per-UE rate table; SNR mirrors the rates.
inline Instance make_instance(const std::vector<std::vector<double>>& rates,
                              std::vector<double> qos, std::vector<int> service,
                              std::vector<int> eta) {
  Instance inst;
  const auto J = static_cast<Eigen::Index>(rates.size());
  const auto N = static_cast<Eigen::Index>(rates.front().size());
  inst.rate.resize(J, N);
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index n = 0; n < N; ++n) inst.rate(j, n) = rates[j][n];
  }
  inst.snr = inst.rate;
  inst.qos = std::move(qos);
  inst.service = std::move(service);
  inst.min_satisfied = std::move(eta);
  inst.path_gain.assign(J, 1.0);
  return inst;
}

// Random instance with integer rates in [0, max_rate], for exact
// comparisons of sums.
inline Instance random_integer_instance(std::mt19937_64& rng, int J, int N,
                                        std::vector<int> service, std::vector<int> eta,
                                        std::vector<double> qos, int max_rate) {
  Instance inst;
  inst.snr.resize(J, N);
  inst.rate.resize(J, N);
  std::uniform_int_distribution<int> r(0, max_rate);
  for (int j = 0; j < J; ++j) {
    for (int n = 0; n < N; ++n) {
      inst.rate(j, n) = r(rng);
      inst.snr(j, n) = inst.rate(j, n);
    }
  }
  inst.service = std::move(service);
  inst.min_satisfied = std::move(eta);
  inst.qos = std::move(qos);
  inst.path_gain.assign(J, 1.0);
  return inst;
}

// Element-by-element forward pass with explicit loops.
inline std::vector<double> forward(const ValueNetwork& net, const std::vector<double>& input) {
  std::vector<double> a = input;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& W = layers[l].weight;
    std::vector<double> z(W.rows(), 0.0);
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      double s = layers[l].bias(r);
      for (Eigen::Index c = 0; c < W.cols(); ++c) s += W(r, c) * a[c];
      z[r] = (l + 1 < layers.size()) ? (s > 0 ? s : 0.0) : s;
    }
    a = std::move(z);
  }
  return a;
}

inline double loss(const ValueNetwork& net, const TrainingBatch& batch) {
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> s(batch.states.rows());
    for (Eigen::Index k = 0; k < batch.states.rows(); ++k) s[k] = batch.states(k, i);
    const double r = batch.targets[i] - forward(net, s)[batch.actions[i]];
    total += r * r;
  }
  return total;
}

}  // namespace rbassign::oracle
