#include "rbassign/neural.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "rbassign/errors.hpp"

namespace rbassign {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw InvalidParameter("network needs at least input and output sizes");
  for (int s : sizes) {
    if (s < 1) throw InvalidParameter("layer sizes must be >= 1");
  }
}

std::vector<DenseLayer> zero_layers(const std::vector<int>& sizes) {
  std::vector<DenseLayer> layers;
  layers.reserve(sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    layers.push_back({Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]),
                      Eigen::VectorXd::Zero(sizes[i + 1])});
  }
  return layers;
}

}  // namespace

ValueNetwork::ValueNetwork(std::vector<int> layer_sizes, Rng& rng) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  layers_ = zero_layers(sizes_);
  for (auto& layer : layers_) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = dist(rng);
  }
}

ValueNetwork ValueNetwork::zeros(std::vector<int> layer_sizes) {
  check_sizes(layer_sizes);
  ValueNetwork net;
  net.layers_ = zero_layers(layer_sizes);
  net.sizes_ = std::move(layer_sizes);
  return net;
}

ValueNetwork ValueNetwork::for_problem(int num_rbs, int num_ues, int hidden_units, Rng& rng) {
  return ValueNetwork({num_rbs + num_ues, hidden_units, hidden_units, num_ues}, rng);
}

std::size_t ValueNetwork::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return count;
}

bool ValueNetwork::all_finite() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

Eigen::VectorXd ValueNetwork::forward(std::span<const double> state) const {
  if (static_cast<int>(state.size()) != input_size()) {
    throw InvalidParameter("forward: state length " + std::to_string(state.size()) +
                           " != input size " + std::to_string(input_size()));
  }
  Eigen::Map<const Eigen::VectorXd> x(state.data(), static_cast<Eigen::Index>(state.size()));
  return forward_batch(x);
}

Eigen::MatrixXd ValueNetwork::forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& states) const {
  if (states.rows() != input_size()) {
    throw InvalidParameter("forward: state rows != input size");
  }
  Eigen::MatrixXd activation = states;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * activation;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    activation = std::move(z);
  }
  return activation;
}

Gradient zero_gradient(const ValueNetwork& net) { return zero_layers(net.layer_sizes()); }

namespace {

void check_batch(const ValueNetwork& net, const TrainingBatch& batch) {
  const auto n = batch.size();
  if (n == 0) throw InvalidParameter("loss_and_gradient: empty batch");
  if (batch.targets.size() != n || static_cast<std::size_t>(batch.states.cols()) != n) {
    throw InvalidParameter("loss_and_gradient: batch fields disagree in length");
  }
  if (batch.states.rows() != net.input_size()) {
    throw InvalidParameter("loss_and_gradient: state rows != input size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (batch.actions[i] < 0 || batch.actions[i] >= net.output_size()) {
      throw InvalidParameter("loss_and_gradient: action out of range");
    }
    if (!std::isfinite(batch.targets[i])) {
      throw TrainingError("loss_and_gradient: non-finite target");
    }
  }
}

}  // namespace

double batch_loss(const ValueNetwork& net, const TrainingBatch& batch) {
  check_batch(net, batch);
  const Eigen::MatrixXd q = net.forward_batch(batch.states);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double residual = batch.targets[i] - q(batch.actions[i], static_cast<Eigen::Index>(i));
    loss += residual * residual;
  }
  return loss;
}

LossAndGradient loss_and_gradient(const ValueNetwork& net, const TrainingBatch& batch) {
  check_batch(net, batch);
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();
  const auto samples = static_cast<Eigen::Index>(batch.size());

  // activations[0] is the input; pre[i] is layer i's affine output. The
  // buffers are reused across calls on the same thread; batch-sized matrices
  // are large enough that fresh allocations would go through mmap.
  struct Workspace {
    std::vector<Eigen::MatrixXd> activations;
    std::vector<Eigen::MatrixXd> pre;
    Eigen::MatrixXd delta;
    Eigen::MatrixXd back;
  };
  thread_local Workspace ws;
  auto& activations = ws.activations;
  auto& pre = ws.pre;
  activations.resize(depth + 1);
  pre.resize(depth);
  activations[0] = batch.states;
  for (std::size_t i = 0; i < depth; ++i) {
    pre[i].resize(layers[i].weight.rows(), samples);
    pre[i].noalias() = layers[i].weight * activations[i];
    pre[i].colwise() += layers[i].bias;
    if (i + 1 < depth) {
      activations[i + 1] = pre[i].cwiseMax(0.0);
    } else {
      activations[i + 1] = pre[i];
    }
  }

  LossAndGradient out;
  Eigen::MatrixXd& delta = ws.delta;
  delta.setZero(net.output_size(), samples);
  for (Eigen::Index s = 0; s < samples; ++s) {
    const int a = batch.actions[static_cast<std::size_t>(s)];
    const double residual = batch.targets[static_cast<std::size_t>(s)] - activations[depth](a, s);
    out.loss += residual * residual;
    delta(a, s) = -2.0 * residual;
  }

  out.gradient.resize(depth);
  for (std::size_t i = depth; i-- > 0;) {
    out.gradient[i].weight.noalias() = delta * activations[i].transpose();
    out.gradient[i].bias = delta.rowwise().sum();
    if (i == 0) break;
    ws.back.resize(layers[i].weight.cols(), samples);
    ws.back.noalias() = layers[i].weight.transpose() * delta;
    delta = ws.back.cwiseProduct((pre[i - 1].array() > 0.0).cast<double>().matrix());
  }
  return out;
}

AdamState AdamState::for_network(const ValueNetwork& net, AdamConfig config) {
  AdamState state;
  state.config = config;
  state.first_moment = zero_layers(net.layer_sizes());
  state.second_moment = zero_layers(net.layer_sizes());
  return state;
}

void adam_step(ValueNetwork& net, const Gradient& gradient, AdamState& adam) {
  auto& layers = net.layers();
  if (gradient.size() != layers.size() || adam.first_moment.size() != layers.size() ||
      adam.second_moment.size() != layers.size()) {
    throw InvalidParameter("adam_step: gradient/moment shapes do not match the network");
  }
  const auto& cfg = adam.config;
  ++adam.step;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols() || m.rows() != grad.rows() ||
        m.cols() != grad.cols()) {
      throw InvalidParameter("adam_step: parameter shape mismatch");
    }
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param.array() -= cfg.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + cfg.epsilon);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, gradient[i].weight, adam.first_moment[i].weight,
           adam.second_moment[i].weight);
    update(layers[i].bias, gradient[i].bias, adam.first_moment[i].bias,
           adam.second_moment[i].bias);
  }
}

void copy_parameters(const ValueNetwork& src, ValueNetwork& dst) {
  if (!src.same_architecture(dst)) {
    throw InvalidParameter("copy_parameters: architecture mismatch");
  }
  dst.layers() = src.layers();
}

namespace {

constexpr std::array<char, 8> kMagic{'R', 'B', 'Q', 'N', 'E', 'T', '0', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ConfigError("load_parameters: truncated file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void save_parameters(const ValueNetwork& net, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  for (const auto& layer : net.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) write_le<double>(out, layer.weight(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) write_le<double>(out, layer.bias(r));
  }
  if (!out) throw ConfigError("save_parameters: write failed");
}

ValueNetwork load_parameters(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ConfigError("load_parameters: bad magic header");
  }
  const auto count = read_le<std::uint32_t>(in);
  if (count < 2 || count > 64) throw ConfigError("load_parameters: implausible layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = read_le<std::uint32_t>(in);
    if (s < 1 || s > (1u << 20)) throw ConfigError("load_parameters: implausible layer size");
    sizes.push_back(static_cast<int>(s));
  }
  ValueNetwork net = ValueNetwork::zeros(sizes);
  for (auto& layer : net.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = read_le<double>(in);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = read_le<double>(in);
  }
  return net;
}

}  // namespace rbassign
