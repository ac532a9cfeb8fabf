#include "synth.hpp"

#include <cmath>
#include <filesystem>

#include "../common.hpp"
#include "csv_io.hpp"

namespace selfonn {

char synth_symbol(AamiClass c) {
  switch (c) {
    case AamiClass::N: return 'N';
    case AamiClass::S: return 'A';
    case AamiClass::V: return 'V';
    case AamiClass::F: return 'F';
    case AamiClass::Q: return '/';
  }
  throw Error::config("unknown beat class");
}

namespace {

struct Bump {
  double center_s;  // offset from the R sample
  double sigma_s;
  double amplitude;
};

// per-class morphologies; centers/widths chosen so neighboring beats at the
// shortest generated interval never reach into each other's main complex
const std::vector<Bump>& class_bumps(AamiClass c) {
  static const std::vector<Bump> n = {{0.0, 0.017, 1.0}, {0.153, 0.039, 0.30}};
  static const std::vector<Bump> s = {
      {-0.083, 0.014, 0.45}, {0.0, 0.017, 0.90}, {0.139, 0.033, 0.25}};
  static const std::vector<Bump> v = {{0.0, 0.044, 1.0}, {0.097, 0.033, -0.60}};
  static const std::vector<Bump> f = {
      {0.0, 0.031, 0.80}, {0.111, 0.028, -0.30}, {0.167, 0.025, 0.20}};
  static const std::vector<Bump> q = {{-0.033, 0.011, -0.80},
                                      {0.022, 0.014, 1.0}};
  switch (c) {
    case AamiClass::N: return n;
    case AamiClass::S: return s;
    case AamiClass::V: return v;
    case AamiClass::F: return f;
    case AamiClass::Q: return q;
  }
  throw Error::config("unknown beat class");
}

void validate(const SynthRecordSpec& spec) {
  if (spec.patient_id.empty()) throw Error::config("synthetic record needs an id");
  if (spec.normal_beats < 2)
    throw Error::config(strfmt(
        "record %s needs at least 2 normal beats to bracket the sequence, got %zu",
        spec.patient_id.c_str(), spec.normal_beats));
  if (spec.sampling_rate <= 0)
    throw Error::config(strfmt("sampling rate must be positive, got %d",
                               spec.sampling_rate));
  if (spec.rr_seconds <= 0.0 || spec.premature_rr_seconds <= 0.0)
    throw Error::config("beat intervals must be positive");
  if (spec.jitter_seconds < 0.0 || spec.noise < 0.0)
    throw Error::config("jitter and noise amplitudes cannot be negative");
  if (spec.jitter_seconds >= 0.5 * spec.premature_rr_seconds)
    throw Error::config(strfmt(
        "jitter %.3fs would not keep beats ordered at the premature interval %.3fs",
        spec.jitter_seconds, spec.premature_rr_seconds));
}

}  // namespace

EcgRecord synth_record(const SynthRecordSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  std::vector<AamiClass> body(spec.normal_beats - 2, AamiClass::N);
  body.insert(body.end(), spec.s_beats, AamiClass::S);
  body.insert(body.end(), spec.v_beats, AamiClass::V);
  body.insert(body.end(), spec.f_beats, AamiClass::F);
  body.insert(body.end(), spec.q_beats, AamiClass::Q);
  rng.shuffle(body);

  std::vector<AamiClass> labels;
  labels.reserve(body.size() + 2);
  labels.push_back(AamiClass::N);
  labels.insert(labels.end(), body.begin(), body.end());
  labels.push_back(AamiClass::N);

  const double fs = spec.sampling_rate;
  std::vector<std::size_t> r_samples(labels.size());
  r_samples[0] = static_cast<std::size_t>(std::lround(0.375 * fs));
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const double base = labels[i] == AamiClass::S ? spec.premature_rr_seconds
                                                  : spec.rr_seconds;
    double wobble = 0.0;
    if (spec.jitter_seconds > 0.0)
      wobble = rng.uniform(-spec.jitter_seconds, spec.jitter_seconds);
    r_samples[i] =
        r_samples[i - 1] + static_cast<std::size_t>(std::lround((base + wobble) * fs));
  }

  EcgRecord record;
  record.patient_id = spec.patient_id;
  record.sampling_rate = fs;
  record.samples.assign(r_samples.back() +
                            static_cast<std::size_t>(std::lround(0.775 * fs)),
                        0.0);

  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (const Bump& bump : class_bumps(labels[i])) {
      const double center = double(r_samples[i]) + bump.center_s * fs;
      const double width = bump.sigma_s * fs;
      // hard 6-sigma support keeps noiseless beats bit-identical
      const long lo = std::max(0L, std::lround(center - 6.0 * width));
      const long hi = std::min(long(record.samples.size()) - 1,
                               std::lround(center + 6.0 * width));
      for (long t = lo; t <= hi; ++t) {
        const double z = (double(t) - center) / width;
        record.samples[std::size_t(t)] += bump.amplitude * std::exp(-0.5 * z * z);
      }
    }
  }
  if (spec.noise > 0.0)
    for (double& v : record.samples) v += spec.noise * rng.gauss();

  record.annotations.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    record.annotations.emplace_back(r_samples[i], synth_symbol(labels[i]));
  return record;
}

std::vector<EcgRecord> synth_corpus(const std::vector<std::string>& ids,
                                    const SynthRecordSpec& base,
                                    std::uint64_t seed) {
  std::vector<EcgRecord> corpus;
  corpus.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    SynthRecordSpec spec = base;
    spec.patient_id = ids[i];
    spec.seed = splitmix64(seed + i);
    corpus.push_back(synth_record(spec));
  }
  return corpus;
}

void write_corpus_csv(const std::vector<EcgRecord>& corpus,
                      const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error::data("cannot create output directory " + dir + ": " + ec.message());
  for (const EcgRecord& record : corpus) {
    const std::string stem = dir + "/" + record.patient_id;
    write_record_csv(stem + ".rec.csv", record.samples);
    write_annotation_csv(stem + ".ann.csv", record.annotations);
  }
}

}  // namespace selfonn
