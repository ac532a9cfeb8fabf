#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecg/types.hpp"

namespace selfonn {

// 5x5 beat counts, rows ground truth, columns prediction, both in N,S,V,F,Q
// order.
struct Confusion5 {
  std::array<std::array<std::uint64_t, kAamiClasses>, kAamiClasses> counts{};

  void add(AamiClass truth, AamiClass pred) {
    ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
  }
  std::uint64_t at(AamiClass truth, AamiClass pred) const {
    return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
  }
  std::uint64_t row_sum(AamiClass truth) const;
  std::uint64_t total() const;
  Confusion5& operator+=(const Confusion5& o);
};

Confusion5 confusion(const std::vector<AamiClass>& truth,
                     const std::vector<AamiClass>& predicted);

// One-vs-rest counts and rates.  A rate whose denominator is zero stays
// unset and renders as "-", never as 0.
struct BinaryMetrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> acc, sen, spe, ppr, f1;
};

BinaryMetrics one_vs_rest(const Confusion5& cm, AamiClass positive);

// Record ids pooled per evaluation set.  Set 1 covers the records common to
// prior studies (11 for the VEB task, 14 for SVEB), set 2 the 24 test-only
// records, set 3 all 44.
const std::vector<std::string>& dataset_ids(int dataset, AamiClass task);

// elementwise sum over the listed patients; missing ids are an error
Confusion5 sum_confusions(const std::map<std::string, Confusion5>& by_patient,
                          const std::vector<std::string>& ids);

struct TaskAggregate {
  std::string name;  // dataset1 / dataset2 / dataset3
  AamiClass task = AamiClass::S;
  std::size_t records = 0;
  Confusion5 cm;
  BinaryMetrics metrics;
};

struct PatientEval {
  Confusion5 cm;
  BinaryMetrics sveb, veb;
};

struct EvalReport {
  std::map<std::string, PatientEval> patients;
  std::vector<TaskAggregate> aggregates;
};

// per-patient one-vs-rest metrics plus every dataset aggregate whose member
// records are all present
EvalReport evaluate_patients(const std::map<std::string, Confusion5>& by_patient);

// percent with one decimal, rounding half up; "-" when absent
std::string render_percent(const std::optional<double>& fraction);

std::string render_text(const EvalReport& report);
std::string render_csv(const EvalReport& report);
void write_report_csv(const EvalReport& report, const std::string& path);

}  // namespace selfonn
