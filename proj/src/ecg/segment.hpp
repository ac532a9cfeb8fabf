#pragma once

#include "types.hpp"

namespace selfonn {

// linear interpolation of src onto a uniform grid of out_len points spanning
// the same extent
Signal resample_linear(const double* src, std::size_t n, std::size_t out_len);

// mean removal then scaling by 1/max|value|; an all-zero result is left as
// zeros rather than divided
void normalize_channel(Signal& s);

struct SegmentCounts {
  std::size_t total_annotations = 0;
  std::size_t non_beat = 0;       // annotation symbols outside the beat mapping
  std::size_t edge_dropped = 0;   // first/last beats, no neighbor for the trio
  std::size_t bounds_dropped = 0; // window would leave the record
  std::size_t kept = 0;
};

struct SegmentResult {
  std::vector<BeatRecord> beats;
  SegmentCounts counts;
};

// Cuts every mappable beat into the two-channel representation: a window
// around the R sample and the span across both neighbor beats, each
// resampled to beat_samples points and normalized per channel.
SegmentResult segment_record(const EcgRecord& record,
                             std::size_t beat_samples = 128,
                             double window_before_s = 0.25,
                             double window_after_s = 0.40);

}  // namespace selfonn
