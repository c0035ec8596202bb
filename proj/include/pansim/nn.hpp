#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pansim/rng.hpp"

namespace pansim {

using Matrix = Eigen::MatrixXf;
using Vector = Eigen::VectorXf;

/// Fully connected ReLU network with a linear output layer. Inputs are
/// column vectors; a batch is one column per sample.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, const std::vector<int>& hidden, int output_dim, SeededRng& rng);

  int input_dim() const { return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols()); }
  int output_dim() const { return weights_.empty() ? 0 : static_cast<int>(weights_.back().rows()); }
  std::size_t layer_count() const { return weights_.size(); }

  // Forward pass that keeps activations for backward().
  const Matrix& forward(const Matrix& x);
  // Forward pass without side effects.
  Matrix predict(const Matrix& x) const;
  // Accumulates parameter gradients for d(loss)/d(output) of the last
  // forward(); returns d(loss)/d(input).
  Matrix backward(const Matrix& grad_output);
  void zero_grad();

  // this <- tau * source + (1 - tau) * this
  void soft_update(const Mlp& source, float tau);

  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  const std::vector<Matrix>& weight_grads() const { return grad_w_; }
  const std::vector<Vector>& bias_grads() const { return grad_b_; }

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);
  bool operator==(const Mlp& other) const;

 private:
  friend class Adam;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  std::vector<Matrix> grad_w_;
  std::vector<Vector> grad_b_;
  std::vector<Matrix> activations_;  // input, then post-ReLU hidden, then output
};

class Adam {
 public:
  explicit Adam(Mlp& net, float lr, float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f);
  void step();
  float learning_rate() const { return lr_; }

 private:
  Mlp* net_;
  float lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_w_, v_w_;
  std::vector<Vector> m_b_, v_b_;
};

/// Row-wise softmax over a (actions x batch) matrix, column by column.
Matrix softmax_columns(const Matrix& logits);

}  // namespace pansim
