#include "network.hpp"

#include <cmath>

namespace selfonn {

std::string loss_name(LossKind k) {
  switch (k) {
    case LossKind::cross_entropy: return "cross_entropy";
    case LossKind::mse: return "mse";
  }
  throw Error::config("unknown loss kind");
}

LossKind loss_from_name(const std::string& name) {
  if (name == "cross_entropy") return LossKind::cross_entropy;
  if (name == "mse") return LossKind::mse;
  throw Error::config(strfmt("unknown loss '%s'", name.c_str()));
}

std::string DimTrace::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < map_len.size(); ++i) {
    if (i) s += " -> ";
    s += strfmt("%zu", map_len[i]);
  }
  s += strfmt(" | flatten %zu", flatten_width);
  return s;
}

DimTrace derive_dims(const NetworkConfig& cfg) {
  if (cfg.input_channels < 1) throw Error::config("need at least one input channel");
  if (cfg.layer_neurons.empty()) throw Error::config("need at least one operational layer");
  if (cfg.layer_neurons.size() != cfg.subsample.size())
    throw Error::config(strfmt("%zu layers but %zu subsample factors",
                               cfg.layer_neurons.size(), cfg.subsample.size()));
  if (cfg.classes < 2) throw Error::config("need at least two classes");
  if (cfg.q_order < 1) throw Error::config("polynomial order must be >= 1");

  DimTrace t;
  t.map_len.push_back(cfg.input_length);
  std::size_t len = cfg.input_length;
  for (std::size_t l = 0; l < cfg.layer_neurons.size(); ++l) {
    if (len < cfg.kernel)
      throw Error::config(strfmt("map length trace %s: layer %zu input %zu shorter than kernel %zu",
                                 t.to_string().c_str(), l + 1, len, cfg.kernel));
    const std::size_t m = len - cfg.kernel + 1;
    t.map_len.push_back(m);
    const std::size_t pooled = m / cfg.subsample[l];
    if (pooled == 0)
      throw Error::config(strfmt("map length trace %s: layer %zu response %zu collapses"
                                 " under subsample factor %zu",
                                 t.to_string().c_str(), l + 1, m, cfg.subsample[l]));
    t.map_len.push_back(pooled);
    len = pooled;
  }
  t.flatten_width = cfg.layer_neurons.back() * len;
  return t;
}

Model::Model(const NetworkConfig& cfg) : cfg_(cfg), dims_(derive_dims(cfg)) {
  std::size_t n_in = cfg_.input_channels;
  for (std::size_t l = 0; l < cfg_.layer_neurons.size(); ++l) {
    op_.emplace_back(strfmt("op%zu", l + 1), n_in, cfg_.layer_neurons[l],
                     cfg_.kernel, cfg_.q_order, cfg_.subsample[l],
                     Activation::tanh);
    n_in = cfg_.layer_neurons[l];
  }
  dense_.emplace_back("fc1", dims_.flatten_width, cfg_.dense_hidden, Activation::tanh);
  const Activation head = cfg_.loss == LossKind::cross_entropy
                              ? Activation::linear
                              : Activation::tanh;
  dense_.emplace_back("fc2", cfg_.dense_hidden, cfg_.classes, head);
  meta_.seed = cfg_.seed;
}

Model Model::build(const NetworkConfig& cfg) {
  Model m(cfg);
  Rng rng(cfg.seed);
  m.init_params(rng);
  return m;
}

void Model::init_params(Rng& rng) {
  for (auto& l : op_) l.init_params(rng);
  for (auto& d : dense_) d.init_params(rng);
}

std::vector<double> Model::forward(const std::vector<Signal>& channels,
                                   ModelCache* cache) const {
  if (channels.size() != cfg_.input_channels)
    throw Error::config(strfmt("got %zu input channels, expected %zu",
                               channels.size(), cfg_.input_channels));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].size() != cfg_.input_length)
      throw Error::config(strfmt("channel %zu has %zu samples, expected %zu", c,
                                 channels[c].size(), cfg_.input_length));
  }
  if (cache) {
    cache->op.assign(op_.size(), LayerCache{});
    cache->dense.assign(dense_.size(), DenseCache{});
    cache->pooled_len.assign(op_.size(), 0);
  }

  std::vector<Signal> maps = channels;
  for (std::size_t l = 0; l < op_.size(); ++l) {
    maps = op_[l].forward(maps, cache ? &cache->op[l] : nullptr);
    if (cache) cache->pooled_len[l] = maps[0].size();
  }

  std::vector<double> flat;
  flat.reserve(dims_.flatten_width);
  for (const auto& m : maps) flat.insert(flat.end(), m.begin(), m.end());

  std::vector<double> h = dense_[0].forward(flat, cache ? &cache->dense[0] : nullptr);
  return dense_[1].forward(h, cache ? &cache->dense[1] : nullptr);
}

void Model::backward(const std::vector<double>& grad_out, ModelCache& cache,
                     GradBuffers& bufs) const {
  std::vector<double> g = dense_[1].backward(grad_out, cache.dense[1],
                                             bufs.dense_w[1], bufs.dense_b[1]);
  g = dense_[0].backward(g, cache.dense[0], bufs.dense_w[0], bufs.dense_b[0]);

  // unflatten into the last operational layer's output signals
  const std::size_t last = op_.size() - 1;
  const std::size_t n_maps = op_[last].n_out();
  const std::size_t seg = cache.pooled_len[last];
  std::vector<Signal> gmaps(n_maps, Signal(seg));
  for (std::size_t k = 0; k < n_maps; ++k)
    for (std::size_t j = 0; j < seg; ++j) gmaps[k][j] = g[k * seg + j];

  for (std::size_t l = op_.size(); l-- > 0;) {
    gmaps = op_[l].backward(gmaps, cache.op[l], bufs.op_w[l], bufs.op_b[l]);
  }
}

GradBuffers Model::make_grad_buffers() const {
  GradBuffers b;
  for (const auto& l : op_) {
    b.op_w.emplace_back(l.weights().size(), 0.0);
    b.op_b.emplace_back(l.biases().size(), 0.0);
  }
  for (const auto& d : dense_) {
    b.dense_w.emplace_back(d.weights().size(), 0.0);
    b.dense_b.emplace_back(d.biases().size(), 0.0);
  }
  return b;
}

void GradBuffers::zero() {
  for (auto& v : op_w) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : op_b) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : dense_w) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : dense_b) std::fill(v.begin(), v.end(), 0.0);
}

void GradBuffers::scale(double s) {
  for (auto& v : op_w)
    for (auto& x : v) x *= s;
  for (auto& v : op_b)
    for (auto& x : v) x *= s;
  for (auto& v : dense_w)
    for (auto& x : v) x *= s;
  for (auto& v : dense_b)
    for (auto& x : v) x *= s;
}

void GradBuffers::add(const GradBuffers& other) {
  for (std::size_t l = 0; l < op_w.size(); ++l) {
    for (std::size_t i = 0; i < op_w[l].size(); ++i) op_w[l][i] += other.op_w[l][i];
    for (std::size_t i = 0; i < op_b[l].size(); ++i) op_b[l][i] += other.op_b[l][i];
  }
  for (std::size_t l = 0; l < dense_w.size(); ++l) {
    for (std::size_t i = 0; i < dense_w[l].size(); ++i) dense_w[l][i] += other.dense_w[l][i];
    for (std::size_t i = 0; i < dense_b[l].size(); ++i) dense_b[l][i] += other.dense_b[l][i];
  }
}

void Model::apply_gradients(const GradBuffers& bufs, double lr) {
  for (std::size_t l = 0; l < op_.size(); ++l) {
    auto& w = op_[l].weights();
    auto& b = op_[l].biases();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * bufs.op_w[l][i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * bufs.op_b[l][i];
  }
  for (std::size_t l = 0; l < dense_.size(); ++l) {
    auto& w = dense_[l].weights();
    auto& b = dense_[l].biases();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * bufs.dense_w[l][i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * bufs.dense_b[l][i];
  }
}

std::size_t Model::predict(const std::vector<Signal>& channels) const {
  const std::vector<double> out = forward(channels, nullptr);
  std::size_t best = 0;
  for (std::size_t j = 1; j < out.size(); ++j)
    if (out[j] > out[best]) best = j;
  return best;
}

std::size_t Model::param_count() const {
  std::size_t n = 0;
  for (const auto& l : op_) n += l.param_count();
  for (const auto& d : dense_) n += d.param_count();
  return n;
}

std::size_t Model::op_neuron_macs(std::size_t layer_idx) const {
  if (layer_idx >= op_.size())
    throw Error::config(strfmt("layer index %zu out of range", layer_idx));
  // map_len holds (input, response, pooled) per layer; response of layer l
  // sits at index 2l + 1
  const std::size_t response_len = dims_.map_len[2 * layer_idx + 1];
  const auto& l = op_[layer_idx];
  return l.n_in() * response_len * l.kernel() * static_cast<std::size_t>(l.q_order());
}

std::size_t Model::mac_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < op_.size(); ++l)
    n += op_[l].n_out() * op_neuron_macs(l);
  for (const auto& d : dense_) n += d.n_out() * d.n_in();
  return n;
}

double softmax_cross_entropy(const std::vector<double>& logits,
                             std::size_t target, std::vector<double>* grad) {
  if (target >= logits.size())
    throw Error::config(strfmt("target class %zu out of range %zu", target, logits.size()));
  double zmax = logits[0];
  for (double z : logits) zmax = std::max(zmax, z);
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - zmax);
  const double log_denom = std::log(denom);
  const double loss = log_denom - (logits[target] - zmax);
  if (grad) {
    grad->assign(logits.size(), 0.0);
    for (std::size_t j = 0; j < logits.size(); ++j)
      (*grad)[j] = std::exp(logits[j] - zmax) / denom;
    (*grad)[target] -= 1.0;
  }
  return loss;
}

double squared_error_loss(const std::vector<double>& outputs,
                          std::size_t target, std::vector<double>* grad) {
  if (target >= outputs.size())
    throw Error::config(strfmt("target class %zu out of range %zu", target, outputs.size()));
  const double c = static_cast<double>(outputs.size());
  double loss = 0.0;
  if (grad) grad->assign(outputs.size(), 0.0);
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const double t = j == target ? 1.0 : -1.0;
    const double d = outputs[j] - t;
    loss += d * d;
    if (grad) (*grad)[j] = d / c;
  }
  return loss / (2.0 * c);
}

double loss_value(LossKind kind, const std::vector<double>& outputs,
                  std::size_t target, std::vector<double>* grad) {
  return kind == LossKind::cross_entropy
             ? softmax_cross_entropy(outputs, target, grad)
             : squared_error_loss(outputs, target, grad);
}

}  // namespace selfonn
