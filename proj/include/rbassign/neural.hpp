#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rbassign/radio.hpp"

namespace rbassign {

struct DenseLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;
};

// Same shapes as the network's layers.
using Gradient = std::vector<DenseLayer>;

// Fully connected Q-function approximator. Hidden layers use the rectifier,
// the output layer is affine. Double precision throughout.
class ValueNetwork {
 public:
  ValueNetwork() = default;

  // Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  ValueNetwork(std::vector<int> layer_sizes, Rng& rng);

  // All parameters zero.
  static ValueNetwork zeros(std::vector<int> layer_sizes);

  // Input N + J, two hidden layers, one output per UE.
  static ValueNetwork for_problem(int num_rbs, int num_ues, int hidden_units, Rng& rng);

  int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t parameter_count() const;
  bool same_architecture(const ValueNetwork& other) const { return sizes_ == other.sizes_; }
  bool all_finite() const;

  Eigen::VectorXd forward(std::span<const double> state) const;
  // Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& states) const;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

Gradient zero_gradient(const ValueNetwork& net);

struct TrainingBatch {
  Eigen::MatrixXd states;  // input_size x batch
  std::vector<int> actions;
  std::vector<double> targets;

  std::size_t size() const { return actions.size(); }
};

struct LossAndGradient {
  double loss = 0.0;
  Gradient gradient;
};

// Summed squared error on the taken actions only:
//   loss = sum_i (y_i - Q(s_i, a_i))^2
// Outputs of the other actions receive zero gradient.
LossAndGradient loss_and_gradient(const ValueNetwork& net, const TrainingBatch& batch);
double batch_loss(const ValueNetwork& net, const TrainingBatch& batch);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;
  std::int64_t step = 0;

  static AdamState for_network(const ValueNetwork& net, AdamConfig config = {});
};

// Bias-corrected Adam update of every parameter.
void adam_step(ValueNetwork& net, const Gradient& gradient, AdamState& adam);

// dst <- src. Architectures must match.
void copy_parameters(const ValueNetwork& src, ValueNetwork& dst);

// Little-endian binary: "RBQNET01", u32 layer-size count, u32 sizes, then per
// layer the row-major weight matrix and the bias as f64.
void save_parameters(const ValueNetwork& net, std::ostream& out);
ValueNetwork load_parameters(std::istream& in);

}  // namespace rbassign
