#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "network.hpp"

namespace selfonn {

struct BenchResult {
  std::size_t reps = 0;
  double forward_median_us = 0.0;
  double forward_p95_us = 0.0;
  double backward_median_us = 0.0;
  double backward_p95_us = 0.0;
};

// nearest-rank percentile of per-rep latencies; frac in (0, 1]
double percentile(std::vector<double> values, double frac);

// Times single-beat forward and backward passes on one fixed random input.
// Every backward rep replays an untimed forward to refill the cache.
BenchResult bench_model(const NetworkConfig& cfg, std::size_t reps,
                        std::uint64_t seed);

// cpu model and core count, best effort
std::string machine_info();

}  // namespace selfonn
