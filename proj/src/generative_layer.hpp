#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"
#include "core_math.hpp"

namespace selfonn {

enum class Activation { tanh, linear };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Per-call scratch kept by forward so backward can reuse the exact
// intermediate values.  A cache is single use: backward marks it consumed.
struct LayerCache {
  std::vector<Matrix> unfolded;                       // per input: M x K*Q power stack
  std::vector<Signal> activated;                      // per neuron: length M
  std::vector<std::vector<std::size_t>> pool_argmax;  // per neuron: index into pre-pool signal
  std::size_t in_len = 0;
  bool valid = false;
};

// Operational layer of generative neurons.  Each output neuron k forms, for
// every input signal i, a polynomial response in the windowed input
//
//   x_k(m) = b_k + sum_i sum_q sum_r w_kiqr * y_i(m+r)^q
//
// evaluated as one dot product per (k, i) pair against the shared power
// stack of input i.  The response passes through the activation and then a
// non-overlapping max subsampler of the configured factor.
class OperationalLayer {
 public:
  OperationalLayer(std::string name, std::size_t n_in, std::size_t n_out,
                   std::size_t kernel, int q_order, std::size_t pool,
                   Activation act);

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  std::size_t kernel() const { return kernel_; }
  int q_order() const { return q_order_; }
  std::size_t pool() const { return pool_; }
  Activation activation() const { return act_; }
  const std::string& name() const { return name_; }

  std::size_t weight_count() const { return weights_.size(); }
  std::size_t param_count() const { return weights_.size() + biases_.size(); }

  // contiguous K*Q block for the (neuron, input) pair, power block outer,
  // kernel position inner
  double* kernel_block(std::size_t k, std::size_t i);
  const double* kernel_block(std::size_t k, std::size_t i) const;

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& biases() { return biases_; }
  const std::vector<double>& biases() const { return biases_; }

  // uniform in (-a, a) with a = (n_in * kernel * q_order)^(-1/2); biases zero
  void init_params(Rng& rng);

  std::size_t out_len(std::size_t in_len) const;

  // inputs: n_in signals of equal length; returns n_out pooled signals.
  // cache may be null for inference.
  std::vector<Signal> forward(const std::vector<Signal>& inputs,
                              LayerCache* cache) const;

  // grad_out: n_out signals matching forward's output lengths.  Adds this
  // call's parameter gradients into grad_w / grad_b (sized like weights /
  // biases) and returns the gradient with respect to the inputs.
  std::vector<Signal> backward(const std::vector<Signal>& grad_out,
                               LayerCache& cache, std::vector<double>& grad_w,
                               std::vector<double>& grad_b) const;

 private:
  std::string name_;
  std::size_t n_in_;
  std::size_t n_out_;
  std::size_t kernel_;
  int q_order_;
  std::size_t pool_;
  Activation act_;
  std::vector<double> weights_;  // n_out * n_in * q_order * kernel
  std::vector<double> biases_;   // n_out
};

}  // namespace selfonn
