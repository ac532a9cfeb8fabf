#include "dense.hpp"

#include <cmath>

namespace selfonn {

DenseLayer::DenseLayer(std::string name, std::size_t n_in, std::size_t n_out,
                       Activation act)
    : name_(std::move(name)), n_in_(n_in), n_out_(n_out), act_(act) {
  if (n_in_ < 1 || n_out_ < 1)
    throw Error::config(strfmt("%s: need at least one input and one unit", name_.c_str()));
  weights_.assign(n_out_ * n_in_, 0.0);
  biases_.assign(n_out_, 0.0);
}

void DenseLayer::init_params(Rng& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(n_in_));
  for (auto& w : weights_) w = rng.uniform(-a, a);
  for (auto& b : biases_) b = 0.0;
}

std::vector<double> DenseLayer::forward(const std::vector<double>& x,
                                        DenseCache* cache) const {
  if (x.size() != n_in_)
    throw Error::config(strfmt("%s: got %zu inputs, expected %zu", name_.c_str(),
                               x.size(), n_in_));
  std::vector<double> a(n_out_);
  for (std::size_t k = 0; k < n_out_; ++k) {
    const double* row = weights_.data() + k * n_in_;
    double z = biases_[k];
    for (std::size_t j = 0; j < n_in_; ++j) z += row[j] * x[j];
    a[k] = act_ == Activation::tanh ? std::tanh(z) : z;
    if (!std::isfinite(a[k]))
      throw Error::numeric(strfmt("%s: non-finite response at unit %zu", name_.c_str(), k));
  }
  if (cache) {
    cache->input = x;
    cache->activated = a;
    cache->valid = true;
  }
  return a;
}

std::vector<double> DenseLayer::backward(const std::vector<double>& grad_out,
                                         DenseCache& cache,
                                         std::vector<double>& grad_w,
                                         std::vector<double>& grad_b) const {
  if (!cache.valid)
    throw Error::config(strfmt("%s: backward needs a fresh forward cache", name_.c_str()));
  cache.valid = false;
  if (grad_out.size() != n_out_)
    throw Error::config(strfmt("%s: got %zu output gradients, expected %zu",
                               name_.c_str(), grad_out.size(), n_out_));
  if (grad_w.size() != weights_.size() || grad_b.size() != biases_.size())
    throw Error::config(strfmt("%s: gradient buffers do not match parameter shapes",
                               name_.c_str()));

  std::vector<double> dz(n_out_);
  for (std::size_t k = 0; k < n_out_; ++k) {
    double g = grad_out[k];
    if (act_ == Activation::tanh) {
      const double a = cache.activated[k];
      g *= 1.0 - a * a;
    }
    dz[k] = g;
  }

  for (std::size_t k = 0; k < n_out_; ++k) {
    double* gw = grad_w.data() + k * n_in_;
    for (std::size_t j = 0; j < n_in_; ++j) gw[j] += dz[k] * cache.input[j];
    grad_b[k] += dz[k];
  }

  std::vector<double> dx(n_in_, 0.0);
  for (std::size_t k = 0; k < n_out_; ++k) {
    const double* row = weights_.data() + k * n_in_;
    for (std::size_t j = 0; j < n_in_; ++j) dx[j] += row[j] * dz[k];
  }
  return dx;
}

}  // namespace selfonn
