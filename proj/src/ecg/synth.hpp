#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace selfonn {

// Synthetic single-lead record: one Gaussian-bump mixture per beat class laid
// onto a flat baseline.  Classes stay separable at noise 0 because the
// templates are mutually distinct.
struct SynthRecordSpec {
  std::string patient_id = "100";
  // total annotations per class; the first and last beats are always normal
  // so the segmenter's edge drops never touch the rarer classes
  std::size_t normal_beats = 10;
  std::size_t s_beats = 0;
  std::size_t v_beats = 0;
  std::size_t f_beats = 0;
  std::size_t q_beats = 0;
  double rr_seconds = 0.75;
  double premature_rr_seconds = 0.55;  // interval preceding each S beat
  double jitter_seconds = 0.0;         // uniform timing wobble, +-
  double noise = 0.0;                  // additive Gaussian amplitude
  int sampling_rate = 360;
  std::uint64_t seed = 1;
};

// annotation symbol the generator emits per class: N A V F /
char synth_symbol(AamiClass c);

EcgRecord synth_record(const SynthRecordSpec& spec);

// one record per id; record i runs with seed splitmix64(seed + i)
std::vector<EcgRecord> synth_corpus(const std::vector<std::string>& ids,
                                    const SynthRecordSpec& base,
                                    std::uint64_t seed);

// writes <dir>/<id>.rec.csv and <dir>/<id>.ann.csv, creating the directory
void write_corpus_csv(const std::vector<EcgRecord>& corpus,
                      const std::string& dir);

}  // namespace selfonn
