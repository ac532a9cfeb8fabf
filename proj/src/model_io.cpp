#include "model_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

namespace selfonn {

namespace {

using nlohmann::json;

json config_to_json(const NetworkConfig& cfg) {
  return json{{"input_channels", cfg.input_channels},
              {"input_length", cfg.input_length},
              {"layer_neurons", cfg.layer_neurons},
              {"kernel", cfg.kernel},
              {"subsample", cfg.subsample},
              {"q_order", cfg.q_order},
              {"dense_hidden", cfg.dense_hidden},
              {"classes", cfg.classes},
              {"loss", loss_name(cfg.loss)},
              {"seed", cfg.seed}};
}

NetworkConfig config_from_json(const json& j) {
  NetworkConfig cfg;
  try {
    cfg.input_channels = j.at("input_channels").get<std::size_t>();
    cfg.input_length = j.at("input_length").get<std::size_t>();
    cfg.layer_neurons = j.at("layer_neurons").get<std::vector<std::size_t>>();
    cfg.kernel = j.at("kernel").get<std::size_t>();
    cfg.subsample = j.at("subsample").get<std::vector<std::size_t>>();
    cfg.q_order = j.at("q_order").get<int>();
    cfg.dense_hidden = j.at("dense_hidden").get<std::size_t>();
    cfg.classes = j.at("classes").get<std::size_t>();
    cfg.loss = loss_from_name(j.at("loss").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error::data(strfmt("bad model config: %s", e.what()));
  }
  return cfg;
}

// canonical op-layer weight walk: neuron, input, kernel position, power
json op_weights_to_json(const OperationalLayer& l) {
  json arr = json::array();
  const std::size_t k_len = l.kernel();
  const int q_ord = l.q_order();
  for (std::size_t k = 0; k < l.n_out(); ++k) {
    for (std::size_t i = 0; i < l.n_in(); ++i) {
      const double* block = l.kernel_block(k, i);
      for (std::size_t r = 0; r < k_len; ++r)
        for (int q = 1; q <= q_ord; ++q)
          arr.push_back(block[(static_cast<std::size_t>(q) - 1) * k_len + r]);
    }
  }
  return arr;
}

void op_weights_from_json(const json& arr, OperationalLayer& l) {
  if (!arr.is_array() || arr.size() != l.weight_count())
    throw Error::data(strfmt("%s: weight array has %zu entries, expected %zu",
                             l.name().c_str(), arr.size(), l.weight_count()));
  const std::size_t k_len = l.kernel();
  const int q_ord = l.q_order();
  std::size_t pos = 0;
  for (std::size_t k = 0; k < l.n_out(); ++k) {
    for (std::size_t i = 0; i < l.n_in(); ++i) {
      double* block = l.kernel_block(k, i);
      for (std::size_t r = 0; r < k_len; ++r)
        for (int q = 1; q <= q_ord; ++q)
          block[(static_cast<std::size_t>(q) - 1) * k_len + r] =
              arr[pos++].get<double>();
    }
  }
}

std::vector<double> doubles_from_json(const json& arr, std::size_t want,
                                      const char* what) {
  if (!arr.is_array() || arr.size() != want)
    throw Error::data(strfmt("%s: array has %zu entries, expected %zu", what,
                             arr.size(), want));
  std::vector<double> out(want);
  for (std::size_t i = 0; i < want; ++i) {
    if (!arr[i].is_number())
      throw Error::data(strfmt("%s: entry %zu is not a finite number", what, i));
    out[i] = arr[i].get<double>();
  }
  return out;
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw Error::numeric(strfmt("%s: parameter %zu is not finite, refusing to save",
                                  what, i));
  }
}

}  // namespace

std::uint64_t config_hash(const NetworkConfig& cfg) {
  return fnv1a64(config_to_json(cfg).dump());
}

std::string config_hash_hex(const NetworkConfig& cfg) {
  return strfmt("%016llx", static_cast<unsigned long long>(config_hash(cfg)));
}

std::string model_to_json(const Model& model) {
  json j;
  j["format"] = "selfonn1d-model";
  j["version"] = 1;
  j["config"] = config_to_json(model.config());
  j["config_hash"] = config_hash_hex(model.config());
  j["meta"] = json{{"seed", model.meta().seed},
                   {"epochs_run", model.meta().epochs_run},
                   {"final_train_error", model.meta().final_train_error}};
  json layers = json::array();
  for (const auto& l : model.op_layers()) {
    require_finite(l.weights(), l.name().c_str());
    require_finite(l.biases(), l.name().c_str());
    layers.push_back(json{{"name", l.name()},
                          {"weights", op_weights_to_json(l)},
                          {"biases", l.biases()}});
  }
  for (const auto& d : model.dense_layers()) {
    require_finite(d.weights(), d.name().c_str());
    require_finite(d.biases(), d.name().c_str());
    layers.push_back(json{{"name", d.name()},
                          {"weights", d.weights()},
                          {"biases", d.biases()}});
  }
  j["layers"] = layers;
  return j.dump(2);
}

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error::data(strfmt("model file is not valid JSON: %s", e.what()));
  }
  if (!j.is_object() || j.value("format", "") != "selfonn1d-model")
    throw Error::data("not a model file (missing format tag)");
  if (j.value("version", 0) != 1)
    throw Error::data(strfmt("unsupported model version %d", j.value("version", 0)));

  NetworkConfig cfg = config_from_json(j.at("config"));
  const std::string stored_hash = j.value("config_hash", "");
  if (stored_hash != config_hash_hex(cfg))
    throw Error::data("model config hash mismatch, file may be corrupted");

  Model m(cfg);
  try {
    const json& meta = j.at("meta");
    m.meta().seed = meta.at("seed").get<std::uint64_t>();
    m.meta().epochs_run = meta.at("epochs_run").get<std::size_t>();
    m.meta().final_train_error = meta.at("final_train_error").get<double>();
  } catch (const json::exception& e) {
    throw Error::data(strfmt("bad model metadata: %s", e.what()));
  }

  const json& layers = j.at("layers");
  const std::size_t want = m.op_layers().size() + m.dense_layers().size();
  if (!layers.is_array() || layers.size() != want)
    throw Error::data(strfmt("model has %zu layer entries, expected %zu",
                             layers.size(), want));
  std::size_t pos = 0;
  for (auto& l : m.op_layers()) {
    const json& entry = layers[pos++];
    if (entry.value("name", "") != l.name())
      throw Error::data(strfmt("layer %zu is named '%s', expected '%s'", pos - 1,
                               entry.value("name", "").c_str(), l.name().c_str()));
    op_weights_from_json(entry.at("weights"), l);
    l.biases() = doubles_from_json(entry.at("biases"), l.biases().size(),
                                   l.name().c_str());
  }
  for (auto& d : m.dense_layers()) {
    const json& entry = layers[pos++];
    if (entry.value("name", "") != d.name())
      throw Error::data(strfmt("layer %zu is named '%s', expected '%s'", pos - 1,
                               entry.value("name", "").c_str(), d.name().c_str()));
    d.weights() = doubles_from_json(entry.at("weights"), d.weights().size(),
                                    d.name().c_str());
    d.biases() = doubles_from_json(entry.at("biases"), d.biases().size(),
                                   d.name().c_str());
  }
  return m;
}

void save_model(const Model& model, const std::string& path) {
  const std::string text = model_to_json(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data(strfmt("cannot open '%s' for writing", path.c_str()));
  out << text << '\n';
  if (!out) throw Error::data(strfmt("failed writing model to '%s'", path.c_str()));
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data(strfmt("cannot open model file '%s'", path.c_str()));
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace selfonn
