// SPDX-License-Identifier: Apache-2.0

#include "bigfive/layers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace bigfive {

std::string_view to_string(OptimizerKind k) noexcept {
  return k == OptimizerKind::SGD ? "sgd" : "adam";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view s) noexcept {
  auto is = [s](std::string_view name) {
    return s.size() == name.size() &&
           std::equal(s.begin(), s.end(), name.begin(), [](char a, char b) {
             return std::tolower(static_cast<unsigned char>(a)) == b;
           });
  };
  if (is("sgd")) return OptimizerKind::SGD;
  if (is("adam")) return OptimizerKind::ADAM;
  return std::nullopt;
}

void Optimizer::step(std::span<Parameter* const> params, double grad_scale) {
  ++step_;
  for (Parameter* p : params) {
    if (kind_ == OptimizerKind::SGD) {
      p->value.noalias() -= (lr_ * grad_scale) * p->grad;
    } else {
      constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
      if (p->moment1.size() != p->value.size()) {
        p->moment1 = Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols());
        p->moment2 = Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols());
      }
      const Eigen::MatrixXd g = grad_scale * p->grad;
      p->moment1 = beta1 * p->moment1 + (1.0 - beta1) * g;
      p->moment2 = beta2 * p->moment2 + (1.0 - beta2) * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
      p->value.array() -=
          lr_ * (p->moment1.array() / c1) / ((p->moment2.array() / c2).sqrt() + eps);
    }
    p->zero_grad();
  }
}

LinearLayer::LinearLayer(std::string name, std::size_t in, std::size_t out, double init_std,
                         Rng& rng) {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = init_std == 0.0 ? 0.0 : rng.normal(0.0, init_std);
  }
  weight = Parameter(name + "/weight", std::move(w));
  bias = Parameter(name + "/bias", Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out), 1));
}

Eigen::VectorXd LinearLayer::forward(const Eigen::VectorXd& x) const {
  return weight.value * x + bias.value.col(0);
}

Eigen::VectorXd LinearLayer::backward(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_out) {
  weight.grad.noalias() += grad_out * x.transpose();
  bias.grad.col(0) += grad_out;
  return weight.value.transpose() * grad_out;
}

Adapter::Adapter(std::string name, std::size_t dim, std::size_t bottleneck, Rng& rng)
    : down(name + "/down", dim, bottleneck, 1.0 / std::sqrt(static_cast<double>(dim)), rng),
      up(name + "/up", bottleneck, dim, 0.0, rng) {}

Eigen::VectorXd Adapter::forward(const Eigen::VectorXd& h, Cache* cache) const {
  Eigen::VectorXd pre = down.forward(h);
  Eigen::VectorXd act = pre.cwiseMax(0.0);
  Eigen::VectorXd z = h + up.forward(act);
  if (cache) {
    cache->input = h;
    cache->pre_activation = std::move(pre);
    cache->activation = std::move(act);
  }
  return z;
}

void Adapter::backward(const Cache& cache, const Eigen::VectorXd& grad_out) {
  Eigen::VectorXd g_act = up.backward(cache.activation, grad_out);
  for (Eigen::Index i = 0; i < g_act.size(); ++i) {
    if (cache.pre_activation[i] <= 0.0) g_act[i] = 0.0;
  }
  down.backward(cache.input, g_act);
}

double softmax_cross_entropy(const Eigen::VectorXd& logits, std::size_t target,
                             Eigen::VectorXd& grad) {
  const double max = logits.maxCoeff();
  grad = (logits.array() - max).exp();
  const double sum = grad.sum();
  grad /= sum;
  const auto t = static_cast<Eigen::Index>(target);
  const double loss = -std::log(std::max(grad[t], 1e-300));
  grad[t] -= 1.0;
  return loss;
}

}  // namespace bigfive
