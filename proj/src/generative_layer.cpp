#include "generative_layer.hpp"

#include <cmath>

namespace selfonn {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  throw Error::config("unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw Error::config(strfmt("unknown activation '%s'", name.c_str()));
}

OperationalLayer::OperationalLayer(std::string name, std::size_t n_in,
                                   std::size_t n_out, std::size_t kernel,
                                   int q_order, std::size_t pool,
                                   Activation act)
    : name_(std::move(name)),
      n_in_(n_in),
      n_out_(n_out),
      kernel_(kernel),
      q_order_(q_order),
      pool_(pool),
      act_(act) {
  if (n_in_ < 1 || n_out_ < 1)
    throw Error::config(strfmt("%s: need at least one input and one neuron", name_.c_str()));
  if (kernel_ < 1) throw Error::config(strfmt("%s: kernel length must be >= 1", name_.c_str()));
  if (q_order_ < 1)
    throw Error::config(strfmt("%s: polynomial order %d must be >= 1", name_.c_str(), q_order_));
  if (pool_ < 1) throw Error::config(strfmt("%s: subsample factor must be >= 1", name_.c_str()));
  weights_.assign(n_out_ * n_in_ * static_cast<std::size_t>(q_order_) * kernel_, 0.0);
  biases_.assign(n_out_, 0.0);
}

double* OperationalLayer::kernel_block(std::size_t k, std::size_t i) {
  return weights_.data() +
         (k * n_in_ + i) * static_cast<std::size_t>(q_order_) * kernel_;
}

const double* OperationalLayer::kernel_block(std::size_t k, std::size_t i) const {
  return weights_.data() +
         (k * n_in_ + i) * static_cast<std::size_t>(q_order_) * kernel_;
}

void OperationalLayer::init_params(Rng& rng) {
  const double a =
      1.0 / std::sqrt(static_cast<double>(n_in_ * kernel_) * q_order_);
  for (auto& w : weights_) w = rng.uniform(-a, a);
  for (auto& b : biases_) b = 0.0;
}

std::size_t OperationalLayer::out_len(std::size_t in_len) const {
  if (in_len < kernel_)
    throw Error::config(strfmt("%s: input length %zu shorter than kernel %zu",
                               name_.c_str(), in_len, kernel_));
  const std::size_t m = in_len - kernel_ + 1;
  const std::size_t pooled = m / pool_;
  if (pooled == 0)
    throw Error::config(strfmt("%s: response length %zu collapses under subsample factor %zu",
                               name_.c_str(), m, pool_));
  return pooled;
}

std::vector<Signal> OperationalLayer::forward(const std::vector<Signal>& inputs,
                                              LayerCache* cache) const {
  if (inputs.size() != n_in_)
    throw Error::config(strfmt("%s: got %zu inputs, expected %zu", name_.c_str(),
                               inputs.size(), n_in_));
  const std::size_t in_len = inputs[0].size();
  for (std::size_t i = 1; i < n_in_; ++i) {
    if (inputs[i].size() != in_len)
      throw Error::config(strfmt("%s: input %zu has length %zu, input 0 has %zu",
                                 name_.c_str(), i, inputs[i].size(), in_len));
  }
  const std::size_t pooled_len = out_len(in_len);
  const std::size_t m_len = in_len - kernel_ + 1;
  const std::size_t block = static_cast<std::size_t>(q_order_) * kernel_;

  std::vector<Matrix> unfolded;
  unfolded.reserve(n_in_);
  for (std::size_t i = 0; i < n_in_; ++i)
    unfolded.push_back(unfold_powers(inputs[i], kernel_, q_order_));

  std::vector<Signal> activated(n_out_);
  std::vector<std::vector<std::size_t>> argmax(n_out_);
  std::vector<Signal> pooled(n_out_);

  std::vector<double> w(block);
  for (std::size_t k = 0; k < n_out_; ++k) {
    Signal x(m_len, biases_[k]);
    for (std::size_t i = 0; i < n_in_; ++i) {
      const double* chunk = kernel_block(k, i);
      w.assign(chunk, chunk + block);
      Signal part = matvec(unfolded[i], w);
      for (std::size_t m = 0; m < m_len; ++m) x[m] += part[m];
    }

    Signal a(m_len);
    if (act_ == Activation::tanh) {
      for (std::size_t m = 0; m < m_len; ++m) a[m] = std::tanh(x[m]);
    } else {
      a = x;
    }
    for (std::size_t m = 0; m < m_len; ++m) {
      if (!std::isfinite(a[m]))
        throw Error::numeric(strfmt("%s: non-finite response at neuron %zu sample %zu",
                                    name_.c_str(), k, m));
    }

    std::vector<std::size_t> amax(pooled_len);
    Signal p(pooled_len);
    for (std::size_t j = 0; j < pooled_len; ++j) {
      std::size_t best = j * pool_;
      double best_v = a[best];
      for (std::size_t t = 1; t < pool_; ++t) {
        const std::size_t idx = j * pool_ + t;
        if (a[idx] > best_v) {
          best_v = a[idx];
          best = idx;
        }
      }
      amax[j] = best;
      p[j] = best_v;
    }

    activated[k] = std::move(a);
    argmax[k] = std::move(amax);
    pooled[k] = std::move(p);
  }

  if (cache) {
    cache->unfolded = std::move(unfolded);
    cache->activated = std::move(activated);
    cache->pool_argmax = std::move(argmax);
    cache->in_len = in_len;
    cache->valid = true;
  }
  return pooled;
}

std::vector<Signal> OperationalLayer::backward(
    const std::vector<Signal>& grad_out, LayerCache& cache,
    std::vector<double>& grad_w, std::vector<double>& grad_b) const {
  if (!cache.valid)
    throw Error::config(strfmt("%s: backward needs a fresh forward cache", name_.c_str()));
  cache.valid = false;
  if (grad_out.size() != n_out_)
    throw Error::config(strfmt("%s: got %zu output gradients, expected %zu",
                               name_.c_str(), grad_out.size(), n_out_));
  if (grad_w.size() != weights_.size() || grad_b.size() != biases_.size())
    throw Error::config(strfmt("%s: gradient buffers do not match parameter shapes",
                               name_.c_str()));

  const std::size_t in_len = cache.in_len;
  const std::size_t m_len = in_len - kernel_ + 1;
  const std::size_t block = static_cast<std::size_t>(q_order_) * kernel_;
  const std::size_t pooled_len = m_len / pool_;

  // route pool then activation to recover dL/dx per neuron
  std::vector<Signal> dx(n_out_);
  for (std::size_t k = 0; k < n_out_; ++k) {
    if (grad_out[k].size() != pooled_len)
      throw Error::config(strfmt("%s: output gradient %zu has length %zu, expected %zu",
                                 name_.c_str(), k, grad_out[k].size(), pooled_len));
    Signal g(m_len, 0.0);
    for (std::size_t j = 0; j < pooled_len; ++j)
      g[cache.pool_argmax[k][j]] += grad_out[k][j];
    if (act_ == Activation::tanh) {
      const Signal& a = cache.activated[k];
      for (std::size_t m = 0; m < m_len; ++m) g[m] *= 1.0 - a[m] * a[m];
    }
    dx[k] = std::move(g);
  }

  std::vector<Signal> grad_in(n_in_);
  Matrix dwin(m_len, kernel_);
  for (std::size_t i = 0; i < n_in_; ++i) {
    const Matrix& u = cache.unfolded[i];
    for (std::size_t m = 0; m < m_len; ++m) {
      double* row = dwin.row(m);
      for (std::size_t r = 0; r < kernel_; ++r) row[r] = 0.0;
    }

    for (std::size_t k = 0; k < n_out_; ++k) {
      const Signal& d = dx[k];
      const double* w = kernel_block(k, i);
      double* gw = grad_w.data() + (w - weights_.data());

      for (std::size_t m = 0; m < m_len; ++m) {
        const double dm = d[m];
        const double* urow = u.row(m);
        for (std::size_t c = 0; c < block; ++c) gw[c] += dm * urow[c];
      }

      // dL/dy(m+r) picks up d[m] times the derivative of the polynomial in
      // the window value: sum_q q * w_q,r * y^(q-1), with y^(q-1) read from
      // the power stack (block q-2) for q >= 2
      for (std::size_t m = 0; m < m_len; ++m) {
        const double dm = d[m];
        const double* urow = u.row(m);
        double* drow = dwin.row(m);
        for (std::size_t r = 0; r < kernel_; ++r) {
          double s = w[r];
          for (int q = 2; q <= q_order_; ++q) {
            s += q * w[(static_cast<std::size_t>(q) - 1) * kernel_ + r] *
                 urow[(static_cast<std::size_t>(q) - 2) * kernel_ + r];
          }
          drow[r] += dm * s;
        }
      }
    }
    grad_in[i] = fold_adjoint(dwin, in_len);
  }

  for (std::size_t k = 0; k < n_out_; ++k) {
    const Signal& d = dx[k];
    double acc = 0.0;
    for (std::size_t m = 0; m < m_len; ++m) acc += d[m];
    grad_b[k] += acc;
  }
  return grad_in;
}

}  // namespace selfonn
