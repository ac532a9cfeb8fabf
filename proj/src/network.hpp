#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "core_math.hpp"
#include "dense.hpp"
#include "generative_layer.hpp"

namespace selfonn {

enum class LossKind { cross_entropy, mse };

std::string loss_name(LossKind k);
LossKind loss_from_name(const std::string& name);

struct NetworkConfig {
  std::size_t input_channels = 2;
  std::size_t input_length = 128;
  std::vector<std::size_t> layer_neurons = {16, 8};
  std::size_t kernel = 15;
  std::vector<std::size_t> subsample = {6, 5};
  int q_order = 7;
  std::size_t dense_hidden = 10;
  std::size_t classes = 5;
  LossKind loss = LossKind::cross_entropy;
  std::uint64_t seed = 1;
};

// Map lengths through the operational layers.  map_len[0] is the input
// length; for each layer the response length (valid windowing) and the
// pooled length follow in order.
struct DimTrace {
  std::vector<std::size_t> map_len;
  std::size_t flatten_width = 0;
  std::string to_string() const;
};

// Throws a config error carrying the partial trace when any stage collapses.
DimTrace derive_dims(const NetworkConfig& cfg);

struct TrainMeta {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  double final_train_error = -1.0;  // fraction in [0,1]; -1 before training
};

struct ModelCache {
  std::vector<LayerCache> op;
  std::vector<DenseCache> dense;
  std::vector<std::size_t> pooled_len;  // per op-layer output signal length
};

struct GradBuffers {
  std::vector<std::vector<double>> op_w, op_b;
  std::vector<std::vector<double>> dense_w, dense_b;
  void zero();
  void scale(double s);
  void add(const GradBuffers& other);
};

// Two operational layers followed by two dense layers.  The output head is
// linear under cross-entropy (softmax applied inside the loss) and tanh
// under mean-squared error.
class Model {
 public:
  explicit Model(const NetworkConfig& cfg);

  // fresh model with parameters drawn from cfg.seed
  static Model build(const NetworkConfig& cfg);

  const NetworkConfig& config() const { return cfg_; }
  const DimTrace& dims() const { return dims_; }
  std::vector<OperationalLayer>& op_layers() { return op_; }
  const std::vector<OperationalLayer>& op_layers() const { return op_; }
  std::vector<DenseLayer>& dense_layers() { return dense_; }
  const std::vector<DenseLayer>& dense_layers() const { return dense_; }
  TrainMeta& meta() { return meta_; }
  const TrainMeta& meta() const { return meta_; }

  void init_params(Rng& rng);

  // channels: input_channels signals of input_length samples
  std::vector<double> forward(const std::vector<Signal>& channels,
                              ModelCache* cache) const;

  // grad_out is dL/d(head output); accumulates parameter grads into bufs
  void backward(const std::vector<double>& grad_out, ModelCache& cache,
                GradBuffers& bufs) const;

  GradBuffers make_grad_buffers() const;
  void apply_gradients(const GradBuffers& bufs, double lr);

  std::size_t predict(const std::vector<Signal>& channels) const;

  std::size_t param_count() const;
  std::size_t mac_count() const;
  // multiply-accumulate cost of one neuron of the given operational layer,
  // counted at the pre-subsample response length
  std::size_t op_neuron_macs(std::size_t layer_idx) const;

 private:
  NetworkConfig cfg_;
  DimTrace dims_;
  std::vector<OperationalLayer> op_;
  std::vector<DenseLayer> dense_;
  TrainMeta meta_;
};

// softmax cross-entropy over logits; optionally fills dL/dlogits
double softmax_cross_entropy(const std::vector<double>& logits,
                             std::size_t target, std::vector<double>* grad);

// squared error against a one-hot +1/-1 target on tanh outputs, averaged as
// (1/2C) * sum (a - t)^2; optionally fills dL/da
double squared_error_loss(const std::vector<double>& outputs,
                          std::size_t target, std::vector<double>* grad);

double loss_value(LossKind kind, const std::vector<double>& outputs,
                  std::size_t target, std::vector<double>* grad);

}  // namespace selfonn
