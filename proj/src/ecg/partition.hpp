#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segment.hpp"
#include "trainer.hpp"

namespace selfonn {

// Which records feed the shared training pool, which are evaluated, and
// where each patient's own training data ends.
struct PartitionPlan {
  std::vector<std::string> pool_ids;
  std::vector<std::string> test_ids;
  double boundary_seconds = 300.0;
  std::size_t common_per_class = 75;  // N, S and V draw size

  // MIT-BIH arrhythmia database ids: pool 100..124, evaluation over all 44
  // usable records; the four paced records 102/104/107/217 are excluded.
  static PartitionPlan aami_mitbih();
};

struct PatientSplit {
  std::vector<BeatRecord> train_specific;  // beats before the boundary
  std::vector<BeatRecord> test;            // beats after it
  std::size_t moved_to_common = 0;  // drawn into the shared pool, so removed here
  SegmentCounts counts;
};

struct Partitions {
  std::vector<BeatRecord> common;
  std::map<std::string, PatientSplit> patients;  // keyed by test_ids
};

// Draws the shared set (common_per_class each of N/S/V, all F and Q) from
// the pool records under the given seed, then splits every evaluation
// record at the boundary.  A beat drawn into the shared set never appears
// in its source patient's train or test lists again.
Partitions build_partitions(const std::vector<EcgRecord>& records,
                            const PartitionPlan& plan, std::uint64_t seed);

TrainSample to_train_sample(const BeatRecord& beat);
std::vector<TrainSample> to_train_samples(const std::vector<BeatRecord>& beats);

// reads <dir>/<id>.rec.csv and <dir>/<id>.ann.csv for every id the plan uses
std::vector<EcgRecord> load_dataset_dir(const std::string& dir,
                                        const PartitionPlan& plan,
                                        double sampling_rate);

}  // namespace selfonn
