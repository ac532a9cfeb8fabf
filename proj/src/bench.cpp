#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "common.hpp"

namespace selfonn {

double percentile(std::vector<double> values, double frac) {
  if (values.empty()) throw Error::config("percentile of an empty sample");
  if (!(frac > 0.0) || frac > 1.0)
    throw Error::config(strfmt("percentile fraction must be in (0,1], got %g", frac));
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(frac * double(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

BenchResult bench_model(const NetworkConfig& cfg, std::size_t reps,
                        std::uint64_t seed) {
  if (reps == 0) throw Error::config("benchmark needs at least one repetition");
  Model model = Model::build(cfg);

  Rng rng(seed);
  std::vector<Signal> beat(cfg.input_channels, Signal(cfg.input_length));
  for (auto& channel : beat)
    for (auto& v : channel) v = rng.uniform(-1.0, 1.0);

  using clock = std::chrono::steady_clock;
  auto elapsed_us = [](clock::time_point t0, clock::time_point t1) {
    return std::chrono::duration<double, std::micro>(t1 - t0).count();
  };

  GradBuffers grads = model.make_grad_buffers();
  std::vector<double> grad_out;

  for (int warm = 0; warm < 16; ++warm) {
    ModelCache cache;
    auto out = model.forward(beat, &cache);
    softmax_cross_entropy(out, 0, &grad_out);
    model.backward(grad_out, cache, grads);
  }

  std::vector<double> fwd_us(reps), bwd_us(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = clock::now();
    auto out = model.forward(beat, nullptr);
    const auto t1 = clock::now();
    fwd_us[i] = elapsed_us(t0, t1);
    if (!std::isfinite(out[0])) throw Error::numeric("benchmark forward diverged");
  }

  for (std::size_t i = 0; i < reps; ++i) {
    ModelCache cache;
    auto out = model.forward(beat, &cache);
    softmax_cross_entropy(out, 0, &grad_out);
    grads.zero();
    const auto t0 = clock::now();
    model.backward(grad_out, cache, grads);
    const auto t1 = clock::now();
    bwd_us[i] = elapsed_us(t0, t1);
  }

  BenchResult result;
  result.reps = reps;
  result.forward_median_us = percentile(fwd_us, 0.5);
  result.forward_p95_us = percentile(fwd_us, 0.95);
  result.backward_median_us = percentile(bwd_us, 0.5);
  result.backward_p95_us = percentile(bwd_us, 0.95);
  return result;
}

std::string machine_info() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        cpu = line.substr(colon + 1);
        const auto start = cpu.find_first_not_of(' ');
        if (start != std::string::npos) cpu = cpu.substr(start);
      }
      break;
    }
  }
  return strfmt("%s, %u hardware threads", cpu.c_str(),
                std::thread::hardware_concurrency());
}

}  // namespace selfonn
