#include "pansim/nn.hpp"

#include <cmath>

#include "pansim/types.hpp"

namespace pansim {

Mlp::Mlp(int input_dim, const std::vector<int>& hidden, int output_dim, SeededRng& rng) {
  std::vector<int> dims{input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l];
    const int out = dims[l + 1];
    const float bound = 1.0f / std::sqrt(static_cast<float>(in));
    Matrix w(out, in);
    Vector b(out);
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r) w(r, c) = static_cast<float>(rng.uniform() * 2.0 - 1.0) * bound;
    for (int r = 0; r < out; ++r) b(r) = static_cast<float>(rng.uniform() * 2.0 - 1.0) * bound;
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
  zero_grad();
}

const Matrix& Mlp::forward(const Matrix& x) {
  if (x.rows() != input_dim()) throw ContractViolation("Mlp::forward: input dimension mismatch");
  activations_.resize(weights_.size() + 1);
  activations_[0] = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = weights_[l] * activations_[l];
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0f);
    activations_[l + 1] = std::move(z);
  }
  return activations_.back();
}

Matrix Mlp::predict(const Matrix& x) const {
  if (x.rows() != input_dim()) throw ContractViolation("Mlp::predict: input dimension mismatch");
  Matrix a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0f);
    a = std::move(z);
  }
  return a;
}

Matrix Mlp::backward(const Matrix& grad_output) {
  Matrix g = grad_output;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l + 1 < weights_.size()) {
      // ReLU derivative from the stored post-activation.
      g = g.cwiseProduct((activations_[l + 1].array() > 0.0f).cast<float>().matrix());
    }
    grad_w_[l].noalias() += g * activations_[l].transpose();
    grad_b_[l] += g.rowwise().sum();
    g = weights_[l].transpose() * g;
  }
  return g;
}

void Mlp::zero_grad() {
  grad_w_.resize(weights_.size());
  grad_b_.resize(biases_.size());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    grad_w_[l] = Matrix::Zero(weights_[l].rows(), weights_[l].cols());
    grad_b_[l] = Vector::Zero(biases_[l].size());
  }
}

void Mlp::soft_update(const Mlp& source, float tau) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = tau * source.weights_[l] + (1.0f - tau) * weights_[l];
    biases_[l] = tau * source.biases_[l] + (1.0f - tau) * biases_[l];
  }
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Matrix& w = weights_[l];
    std::vector<float> wv(w.data(), w.data() + w.size());
    std::vector<float> bv(biases_[l].data(), biases_[l].data() + biases_[l].size());
    layers.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"w", wv}, {"b", bv}});
  }
  return {{"layers", layers}};
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp net;
  for (const auto& layer : j.at("layers")) {
    const int rows = layer.at("rows").get<int>();
    const int cols = layer.at("cols").get<int>();
    auto wv = layer.at("w").get<std::vector<float>>();
    auto bv = layer.at("b").get<std::vector<float>>();
    if (static_cast<int>(wv.size()) != rows * cols || static_cast<int>(bv.size()) != rows)
      throw ConfigError("checkpoint layer has inconsistent sizes");
    if (!net.weights_.empty() && net.weights_.back().rows() != cols)
      throw ConfigError("checkpoint layers do not chain");
    net.weights_.push_back(Eigen::Map<Matrix>(wv.data(), rows, cols));
    net.biases_.push_back(Eigen::Map<Vector>(bv.data(), rows));
  }
  if (net.weights_.empty()) throw ConfigError("checkpoint network has no layers");
  net.zero_grad();
  return net;
}

bool Mlp::operator==(const Mlp& other) const {
  if (weights_.size() != other.weights_.size()) return false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != other.weights_[l].rows() ||
        weights_[l].cols() != other.weights_[l].cols())
      return false;
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  }
  return true;
}

Adam::Adam(Mlp& net, float lr, float beta1, float beta2, float eps)
    : net_(&net), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    m_w_.push_back(Matrix::Zero(net.weights_[l].rows(), net.weights_[l].cols()));
    v_w_.push_back(Matrix::Zero(net.weights_[l].rows(), net.weights_[l].cols()));
    m_b_.push_back(Vector::Zero(net.biases_[l].size()));
    v_b_.push_back(Vector::Zero(net.biases_[l].size()));
  }
}

void Adam::step() {
  ++t_;
  const float c1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
  const float c2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
  const float step = lr_ * std::sqrt(c2) / c1;
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1_ * m + (1.0f - beta1_) * grad;
    v = beta2_ * v + (1.0f - beta2_) * grad.cwiseProduct(grad);
    param.array() -= step * m.array() / (v.array().sqrt() + eps_);
  };
  for (std::size_t l = 0; l < net_->weights_.size(); ++l) {
    update(net_->weights_[l], net_->grad_w_[l], m_w_[l], v_w_[l]);
    update(net_->biases_[l], net_->grad_b_[l], m_b_[l], v_b_[l]);
  }
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const float mx = logits.col(c).maxCoeff();
    Vector e = (logits.col(c).array() - mx).exp();
    out.col(c) = e / e.sum();
  }
  return out;
}

}  // namespace pansim
