#include "segment.hpp"

#include <cmath>

#include "aami.hpp"
#include "common.hpp"

namespace selfonn {

Signal resample_linear(const double* src, std::size_t n, std::size_t out_len) {
  if (n == 0 || out_len == 0) throw Error::config("resample: empty signal");
  Signal out(out_len);
  if (n == 1) {
    for (auto& v : out) v = src[0];
    return out;
  }
  const double step = static_cast<double>(n - 1) / static_cast<double>(out_len - 1);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double pos = static_cast<double>(j) * step;
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= n - 1) lo = n - 2;
    const double frac = pos - static_cast<double>(lo);
    out[j] = src[lo] + frac * (src[lo + 1] - src[lo]);
  }
  return out;
}

void normalize_channel(Signal& s) {
  if (s.empty()) return;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double peak = 0.0;
  for (auto& v : s) {
    v -= mean;
    peak = std::max(peak, std::fabs(v));
  }
  if (peak == 0.0) return;
  for (auto& v : s) v /= peak;
}

SegmentResult segment_record(const EcgRecord& record, std::size_t beat_samples,
                             double window_before_s, double window_after_s) {
  if (beat_samples < 2) throw Error::config("segment: need at least two output samples");
  const double fs = record.sampling_rate;
  if (!(fs > 0.0)) throw Error::config("segment: sampling rate must be positive");
  const std::size_t before = static_cast<std::size_t>(std::lround(window_before_s * fs));
  const std::size_t after = static_cast<std::size_t>(std::lround(window_after_s * fs));
  if (before + after < 2) throw Error::config("segment: window too short");

  SegmentResult res;
  res.counts.total_annotations = record.annotations.size();

  // mappable beats only; everything else is bookkept, never relabeled
  std::vector<std::pair<std::size_t, AamiClass>> beats;
  for (const auto& [idx, sym] : record.annotations) {
    const auto cls = try_map_to_aami(sym);
    if (cls)
      beats.emplace_back(idx, *cls);
    else
      ++res.counts.non_beat;
  }

  const std::size_t len = record.samples.size();
  // half-open beat window [r - before, r + after)
  const auto window_start = [&](std::size_t r) -> long long {
    return static_cast<long long>(r) - static_cast<long long>(before);
  };
  const auto window_end = [&](std::size_t r) -> long long {
    return static_cast<long long>(r) + static_cast<long long>(after);
  };

  for (std::size_t b = 0; b < beats.size(); ++b) {
    if (b == 0 || b + 1 == beats.size()) {
      ++res.counts.edge_dropped;  // trio needs both neighbors
      continue;
    }
    const std::size_t r = beats[b].first;
    const long long beat_lo = window_start(r);
    const long long beat_hi = window_end(r);
    const long long trio_lo = window_start(beats[b - 1].first);
    const long long trio_hi = window_end(beats[b + 1].first);
    if (beat_lo < 0 || trio_lo < 0 || beat_hi > static_cast<long long>(len) ||
        trio_hi > static_cast<long long>(len)) {
      ++res.counts.bounds_dropped;
      log_debug(strfmt("%s: beat at sample %zu window leaves the record, dropped",
                       record.patient_id.c_str(), r));
      continue;
    }

    BeatRecord beat;
    beat.patient_id = record.patient_id;
    beat.beat_index = b;
    beat.r_sample = r;
    beat.aami_class = beats[b].second;
    beat.channel_beat = resample_linear(record.samples.data() + beat_lo,
                                        static_cast<std::size_t>(beat_hi - beat_lo),
                                        beat_samples);
    beat.channel_trio = resample_linear(record.samples.data() + trio_lo,
                                        static_cast<std::size_t>(trio_hi - trio_lo),
                                        beat_samples);
    normalize_channel(beat.channel_beat);
    normalize_channel(beat.channel_trio);
    res.beats.push_back(std::move(beat));
  }
  res.counts.kept = res.beats.size();
  return res;
}

}  // namespace selfonn
