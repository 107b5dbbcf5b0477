#ifndef AMCOEDGE_QNETWORK_HPP_
#define AMCOEDGE_QNETWORK_HPP_

#include <vector>

#include <Eigen/Dense>

#include "amcoedge/random.hpp"

namespace amcoedge {

/// Fully connected network with rectifier hidden layers and a linear output.
///
/// All weights and biases live in one flat parameter vector; layer l occupies
/// an (out x in) column-major weight block followed by its bias. Keeping the
/// parameters flat makes target syncing, Adam updates and checkpoints plain
/// vector operations.
class QNetwork
{
 public:
  QNetwork() = default;

  /// Zero-initialised network with the given layer widths (input first).
  explicit QNetwork(std::vector<int> layer_sizes);

  /// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static QNetwork initialized(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  /// Column i of the result is the output for column i of `inputs`.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Gradient of a scalar loss w.r.t. the flat parameters, given the loss
  /// gradient w.r.t. each output column.
  Eigen::VectorXd backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& output_grad) const;

  bool same_shape(const QNetwork& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weight block
  Eigen::VectorXd params_;
};

}  // namespace amcoedge

#endif  // AMCOEDGE_QNETWORK_HPP_
