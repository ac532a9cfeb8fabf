#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core_math.hpp"

namespace selfonn {

// AAMI heartbeat classes, in the fixed reporting order.
enum class AamiClass { N = 0, S = 1, V = 2, F = 3, Q = 4 };

inline constexpr std::size_t kAamiClasses = 5;

char aami_letter(AamiClass c);
AamiClass aami_from_index(std::size_t idx);

struct EcgRecord {
  std::string patient_id;
  double sampling_rate = 360.0;
  Signal samples;
  // (sample_index, annotation symbol), sorted by sample index
  std::vector<std::pair<std::size_t, char>> annotations;
};

struct BeatRecord {
  std::string patient_id;
  std::size_t beat_index = 0;  // position in the record's mappable-beat list
  std::size_t r_sample = 0;    // annotated R sample in the source record
  AamiClass aami_class = AamiClass::N;
  Signal channel_beat;  // 128 samples
  Signal channel_trio;  // 128 samples
};

}  // namespace selfonn
