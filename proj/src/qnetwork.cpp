#include "amcoedge/qnetwork.hpp"

#include <cmath>
#include <stdexcept>

namespace amcoedge {

QNetwork::QNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes))
{
  if (sizes_.size() < 2) throw std::invalid_argument("QNetwork needs at least input and output layers");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("QNetwork layer widths must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

QNetwork QNetwork::initialized(std::vector<int> layer_sizes, Rng& rng)
{
  QNetwork net(std::move(layer_sizes));
  for (int l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[static_cast<std::size_t>(l)]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const Eigen::Index begin = net.offsets_[static_cast<std::size_t>(l)];
    const Eigen::Index count =
        static_cast<Eigen::Index>(net.sizes_[static_cast<std::size_t>(l) + 1]) * (net.sizes_[static_cast<std::size_t>(l)] + 1);
    for (Eigen::Index i = begin; i < begin + count; ++i) net.params_(i) = dist(rng);
  }
  return net;
}

Eigen::Map<const Eigen::MatrixXd> QNetwork::weight(int layer) const
{
  const auto l = static_cast<std::size_t>(layer);
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> QNetwork::bias(int layer) const
{
  const auto l = static_cast<std::size_t>(layer);
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const
{
  if (input.size() != input_size()) throw std::invalid_argument("QNetwork::forward: input size mismatch");
  Eigen::VectorXd a = input;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::VectorXd z = weight(l) * a + bias(l);
    a = (l + 1 < num_layers()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const
{
  if (inputs.rows() != input_size()) throw std::invalid_argument("QNetwork::forward_batch: input size mismatch");
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = (weight(l) * a).colwise() + bias(l);
    a = (l + 1 < num_layers()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::VectorXd QNetwork::backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& output_grad) const
{
  const int layers = num_layers();
  std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input to layer l
  acts.reserve(static_cast<std::size_t>(layers));
  acts.push_back(inputs);
  for (int l = 0; l + 1 < layers; ++l) {
    Eigen::MatrixXd z = (weight(l) * acts.back()).colwise() + bias(l);
    acts.push_back(z.cwiseMax(0.0));
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = output_grad;  // dL/dz for the current layer
  for (int l = layers - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const Eigen::MatrixXd& a_in = acts[ul];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[ul], sizes_[ul + 1], sizes_[ul]);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[ul] + static_cast<Eigen::Index>(sizes_[ul + 1]) * sizes_[ul],
                                   sizes_[ul + 1]);
    gw.noalias() = delta * a_in.transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd upstream = weight(l).transpose() * delta;
      // rectifier derivative: active units are exactly the positive activations
      delta = upstream.cwiseProduct((a_in.array() > 0.0).cast<double>().matrix());
    }
  }
  return grad;
}

}  // namespace amcoedge
