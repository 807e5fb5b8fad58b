// SPDX-License-Identifier: Apache-2.0
//
// Fully connected action-value network: affine layers with ReLU on the
// hidden layers and a linear output, trained on the squared TD error of the
// chosen actions.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace istn {

struct DenseLayer {
  Eigen::MatrixXd weights;  ///< out x in
  Eigen::VectorXd bias;     ///< out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weights.rows() == b.weights.rows() && a.weights.cols() == b.weights.cols() &&
           a.weights == b.weights && a.bias == b.bias;
  }
};

/// Parameter-shaped container, used for gradients and optimiser moments.
struct NetworkParams {
  std::vector<DenseLayer> layers;

  static NetworkParams zeros_like(const std::vector<DenseLayer>& shape) {
    NetworkParams p;
    for (const auto& l : shape)
      p.layers.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                          Eigen::VectorXd::Zero(l.bias.size())});
    return p;
  }
  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

class QNetwork {
 public:
  QNetwork() = default;

  /// `sizes` = {input, hidden..., output}. Weights He-uniform, biases zero.
  template <class RngT>
  QNetwork(std::vector<std::size_t> sizes, RngT& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("QNetwork: need input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(sizes_[l]);
      const auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
      const double bound = std::sqrt(6.0 / static_cast<double>(in));
      std::uniform_real_distribution<double> u(-bound, bound);
      DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
      for (Eigen::Index c = 0; c < in; ++c)
        for (Eigen::Index r = 0; r < out; ++r) layer.weights(r, c) = u(rng);
      layers_.push_back(std::move(layer));
    }
  }

  explicit QNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("QNetwork: no layers");
    sizes_.push_back(static_cast<std::size_t>(layers_.front().weights.cols()));
    for (const auto& l : layers_) {
      if (static_cast<std::size_t>(l.weights.cols()) != sizes_.back() ||
          l.bias.size() != l.weights.rows())
        throw std::invalid_argument("QNetwork: inconsistent layer shapes");
      sizes_.push_back(static_cast<std::size_t>(l.weights.rows()));
    }
  }

  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Action values for one state.
  Eigen::VectorXd forward(std::span<const double> state) const {
    if (state.size() != input_size())
      throw std::invalid_argument("QNetwork::forward: state width " + std::to_string(state.size()) +
                                  " != input size " + std::to_string(input_size()));
    Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(state.data(),
                                                          static_cast<Eigen::Index>(state.size()));
    return forward_batch(x).col(0);
  }

  /// Column-per-sample batch forward pass.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.rows()) != input_size())
      throw std::invalid_argument("QNetwork::forward_batch: input rows mismatch");
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Eigen::MatrixXd z = layers_[l].weights * a;
      z.colwise() += layers_[l].bias;
      if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
      a = std::move(z);
    }
    return a;
  }

  /// Mean over the batch of (Q(s_i, a_i) - y_i)^2, with its gradient in `grad`
  /// when non-null.
  double loss(const Eigen::MatrixXd& states, std::span<const std::size_t> actions,
              std::span<const double> targets, NetworkParams* grad = nullptr) const {
    const auto n = states.cols();
    if (static_cast<std::size_t>(n) != actions.size() || actions.size() != targets.size() || n == 0)
      throw std::invalid_argument("QNetwork::loss: batch shape mismatch");
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(layers_.size() + 1);
    acts.push_back(states);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Eigen::MatrixXd z = layers_[l].weights * acts.back();
      z.colwise() += layers_[l].bias;
      if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
      acts.push_back(std::move(z));
    }
    const Eigen::MatrixXd& q = acts.back();
    Eigen::VectorXd err(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(i)]);
      if (a >= q.rows()) throw std::out_of_range("QNetwork::loss: action index out of range");
      err(i) = q(a, i) - targets[static_cast<std::size_t>(i)];
      sum += err(i) * err(i);
    }
    const double mean = sum / static_cast<double>(n);
    if (!grad) return mean;

    *grad = NetworkParams::zeros_like(layers_);
    const std::size_t last = layers_.size() - 1;
    // Output layer: only the chosen action rows carry error.
    Eigen::MatrixXd delta_prev(layers_[last].weights.cols(), n);
    {
      auto& g = grad->layers[last];
      const auto& prev = acts[last];
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(i)]);
        const double d = 2.0 * err(i) / static_cast<double>(n);
        g.weights.row(a) += d * prev.col(i).transpose();
        g.bias(a) += d;
        delta_prev.col(i) = d * layers_[last].weights.row(a).transpose();
      }
    }
    for (std::size_t l = last; l-- > 0;) {
      // acts[l + 1] is the ReLU output of layer l.
      Eigen::MatrixXd delta = delta_prev.cwiseProduct(
          (acts[l + 1].array() > 0.0).cast<double>().matrix());
      auto& g = grad->layers[l];
      g.weights.noalias() = delta * acts[l].transpose();
      g.bias = delta.rowwise().sum();
      if (l > 0) delta_prev.noalias() = layers_[l].weights.transpose() * delta;
    }
    return mean;
  }

  friend bool operator==(const QNetwork& a, const QNetwork& b) {
    return a.sizes_ == b.sizes_ && a.layers_ == b.layers_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
};

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax_lowest(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  return best;
}

enum class OptimizerKind : std::uint8_t { Sgd, Adam };

/// Plain gradient descent, or Adam with the usual constants.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double learning_rate) : kind_(kind), lr_(learning_rate) {}

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  std::uint64_t steps() const { return t_; }
  const NetworkParams& first_moment() const { return m_; }
  const NetworkParams& second_moment() const { return v_; }

  void restore(std::uint64_t steps, NetworkParams m, NetworkParams v) {
    t_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
  }

  void apply(QNetwork& net, const NetworkParams& grad) {
    auto& layers = net.layers();
    ++t_;
    if (kind_ == OptimizerKind::Sgd) {
      for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].weights -= lr_ * grad.layers[l].weights;
        layers[l].bias -= lr_ * grad.layers[l].bias;
      }
      return;
    }
    if (m_.layers.empty()) {
      m_ = NetworkParams::zeros_like(layers);
      v_ = NetworkParams::zeros_like(layers);
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
      param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, grad.layers[l].weights, m_.layers[l].weights, v_.layers[l].weights);
      update(layers[l].bias, grad.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias);
    }
  }

 private:
  OptimizerKind kind_ = OptimizerKind::Sgd;
  double lr_ = 1e-3;
  std::uint64_t t_ = 0;
  NetworkParams m_, v_;
};

}  // namespace istn
