#pragma once

#include <cstdint>
#include <string>

#include "network.hpp"

namespace selfonn {

// Stable fingerprint of a network configuration, used to refuse evaluating a
// model against a differently-configured run.
std::uint64_t config_hash(const NetworkConfig& cfg);
std::string config_hash_hex(const NetworkConfig& cfg);

// JSON container, version tag 1.  Weight arrays are written in a canonical
// walk: layer, then output neuron, then input, then kernel position, then
// power; biases follow the weights of their layer.  Values survive a
// save/load cycle bit for bit.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace selfonn
