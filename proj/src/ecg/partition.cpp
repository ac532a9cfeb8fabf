#include "partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aami.hpp"
#include "common.hpp"
#include "csv_io.hpp"

namespace selfonn {

PartitionPlan PartitionPlan::aami_mitbih() {
  PartitionPlan plan;
  // 100-series minus the paced records 102, 104 and 107
  plan.pool_ids = {"100", "101", "103", "105", "106", "108", "109",
                   "111", "112", "113", "114", "115", "116", "117",
                   "118", "119", "121", "122", "123", "124"};
  // 200-series minus the paced record 217
  const std::vector<std::string> second = {
      "200", "201", "202", "203", "205", "207", "208", "209",
      "210", "212", "213", "214", "215", "219", "220", "221",
      "222", "223", "228", "230", "231", "232", "233", "234"};
  plan.test_ids = plan.pool_ids;
  plan.test_ids.insert(plan.test_ids.end(), second.begin(), second.end());
  return plan;
}

namespace {

struct BeatRef {
  std::string patient_id;
  std::size_t beat_index;
  bool operator<(const BeatRef& o) const {
    return patient_id != o.patient_id ? patient_id < o.patient_id
                                      : beat_index < o.beat_index;
  }
};

}  // namespace

Partitions build_partitions(const std::vector<EcgRecord>& records,
                            const PartitionPlan& plan, std::uint64_t seed) {
  if (plan.pool_ids.empty() || plan.test_ids.empty())
    throw Error::config("partition plan needs pool and test record ids");
  if (!(plan.boundary_seconds > 0.0))
    throw Error::config("patient-specific boundary must be positive");

  std::map<std::string, const EcgRecord*> by_id;
  for (const auto& r : records) by_id[r.patient_id] = &r;

  std::vector<std::string> missing;
  std::set<std::string> needed(plan.pool_ids.begin(), plan.pool_ids.end());
  needed.insert(plan.test_ids.begin(), plan.test_ids.end());
  for (const auto& id : needed)
    if (!by_id.count(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error::data(strfmt("records missing from the dataset: %s", list.c_str()));
  }

  std::map<std::string, SegmentResult> segmented;
  for (const auto& id : needed) segmented[id] = segment_record(*by_id.at(id));

  // candidate beats per class, walked in the plan's pool order
  std::vector<std::vector<const BeatRecord*>> candidates(kAamiClasses);
  for (const auto& id : plan.pool_ids)
    for (const auto& beat : segmented.at(id).beats)
      candidates[static_cast<std::size_t>(beat.aami_class)].push_back(&beat);

  Partitions parts;
  std::set<BeatRef> drawn;
  Rng rng(seed);
  for (AamiClass cls : {AamiClass::N, AamiClass::S, AamiClass::V}) {
    auto& pool = candidates[static_cast<std::size_t>(cls)];
    if (pool.size() < plan.common_per_class)
      throw Error::data(strfmt("shared pool has only %zu beats of class %c,"
                               " need %zu",
                               pool.size(), aami_letter(cls), plan.common_per_class));
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    order.resize(plan.common_per_class);
    std::sort(order.begin(), order.end());
    for (std::size_t i : order) {
      parts.common.push_back(*pool[i]);
      drawn.insert(BeatRef{pool[i]->patient_id, pool[i]->beat_index});
    }
  }
  for (AamiClass cls : {AamiClass::F, AamiClass::Q}) {
    for (const BeatRecord* beat : candidates[static_cast<std::size_t>(cls)]) {
      parts.common.push_back(*beat);
      drawn.insert(BeatRef{beat->patient_id, beat->beat_index});
    }
  }

  for (const auto& id : plan.test_ids) {
    const EcgRecord& rec = *by_id.at(id);
    const auto boundary = static_cast<std::size_t>(
        std::llround(plan.boundary_seconds * rec.sampling_rate));
    PatientSplit split;
    split.counts = segmented.at(id).counts;
    for (const auto& beat : segmented.at(id).beats) {
      if (drawn.count(BeatRef{beat.patient_id, beat.beat_index})) {
        ++split.moved_to_common;
        continue;
      }
      if (beat.r_sample < boundary)
        split.train_specific.push_back(beat);
      else
        split.test.push_back(beat);
    }
    parts.patients.emplace(id, std::move(split));
  }
  return parts;
}

TrainSample to_train_sample(const BeatRecord& beat) {
  TrainSample s;
  s.channels = {beat.channel_beat, beat.channel_trio};
  s.label = static_cast<std::size_t>(beat.aami_class);
  s.id = strfmt("%s:%zu", beat.patient_id.c_str(), beat.beat_index);
  return s;
}

std::vector<TrainSample> to_train_samples(const std::vector<BeatRecord>& beats) {
  std::vector<TrainSample> out;
  out.reserve(beats.size());
  for (const auto& b : beats) out.push_back(to_train_sample(b));
  return out;
}

std::vector<EcgRecord> load_dataset_dir(const std::string& dir,
                                        const PartitionPlan& plan,
                                        double sampling_rate) {
  std::set<std::string> needed(plan.pool_ids.begin(), plan.pool_ids.end());
  needed.insert(plan.test_ids.begin(), plan.test_ids.end());
  std::vector<EcgRecord> records;
  for (const auto& id : needed) {
    const std::string rec_path = dir + "/" + id + ".rec.csv";
    const std::string ann_path = dir + "/" + id + ".ann.csv";
    records.push_back(ingest_csv(rec_path, ann_path, id, sampling_rate));
    log_info(strfmt("loaded record %s: %zu samples, %zu annotations", id.c_str(),
                    records.back().samples.size(), records.back().annotations.size()));
  }
  return records;
}

}  // namespace selfonn
