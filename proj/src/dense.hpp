#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"
#include "generative_layer.hpp"

namespace selfonn {

struct DenseCache {
  std::vector<double> input;
  std::vector<double> activated;
  bool valid = false;
};

// Fully connected layer: a = act(W x + b), W stored row-major out x in.
class DenseLayer {
 public:
  DenseLayer(std::string name, std::size_t n_in, std::size_t n_out, Activation act);

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  Activation activation() const { return act_; }
  const std::string& name() const { return name_; }
  std::size_t param_count() const { return weights_.size() + biases_.size(); }

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& biases() { return biases_; }
  const std::vector<double>& biases() const { return biases_; }

  void init_params(Rng& rng);

  std::vector<double> forward(const std::vector<double>& x, DenseCache* cache) const;

  std::vector<double> backward(const std::vector<double>& grad_out,
                               DenseCache& cache, std::vector<double>& grad_w,
                               std::vector<double>& grad_b) const;

 private:
  std::string name_;
  std::size_t n_in_;
  std::size_t n_out_;
  Activation act_;
  std::vector<double> weights_;  // n_out * n_in
  std::vector<double> biases_;   // n_out
};

}  // namespace selfonn
