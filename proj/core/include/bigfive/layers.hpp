// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bigfive/rng.hpp"

namespace bigfive {

/// A named trainable tensor with its gradient accumulator. Optimizer state
/// is allocated on first use.
struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd moment1;
  Eigen::MatrixXd moment2;

  Parameter() = default;
  Parameter(std::string n, Eigen::MatrixXd v)
      : name(std::move(n)), value(std::move(v)), grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(value.size()); }
  void zero_grad() { grad.setZero(); }
};

enum class OptimizerKind { SGD, ADAM };

std::string_view to_string(OptimizerKind k) noexcept;
std::optional<OptimizerKind> parse_optimizer(std::string_view s) noexcept;

/// Applies accumulated gradients, scaled by `grad_scale` (1 / batch size),
/// then clears them.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate) : kind_(kind), lr_(learning_rate) {}
  void step(std::span<Parameter* const> params, double grad_scale);

 private:
  OptimizerKind kind_;
  double lr_;
  long step_ = 0;
};

/// y = W x + b.
class LinearLayer {
 public:
  LinearLayer() = default;
  /// Weights ~ N(0, init_std^2), bias zero.
  LinearLayer(std::string name, std::size_t in, std::size_t out, double init_std, Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  /// Accumulates dW, db and returns dL/dx.
  Eigen::VectorXd backward(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_out);

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(weight.value.cols()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weight.value.rows()); }
  std::size_t parameter_count() const noexcept { return weight.size() + bias.size(); }

  Parameter weight;
  Parameter bias;
};

/// Bottleneck adapter with a residual connection:
///   z = h + up(relu(down(h)))
/// `up` starts at zero, so an untrained adapter is the identity.
class Adapter {
 public:
  struct Cache {
    Eigen::VectorXd input;
    Eigen::VectorXd pre_activation;
    Eigen::VectorXd activation;
  };

  Adapter() = default;
  Adapter(std::string name, std::size_t dim, std::size_t bottleneck, Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& h, Cache* cache = nullptr) const;
  void backward(const Cache& cache, const Eigen::VectorXd& grad_out);

  std::size_t bottleneck() const noexcept { return down.out_dim(); }
  std::size_t parameter_count() const noexcept {
    return down.parameter_count() + up.parameter_count();
  }

  LinearLayer down;
  LinearLayer up;
};

/// Softmax cross-entropy on raw logits. Writes dL/dlogits into `grad` and
/// returns the loss.
double softmax_cross_entropy(const Eigen::VectorXd& logits, std::size_t target,
                             Eigen::VectorXd& grad);

}  // namespace bigfive
