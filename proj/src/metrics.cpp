#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace selfonn {

std::uint64_t Confusion5::row_sum(AamiClass truth) const {
  const auto& row = counts[static_cast<std::size_t>(truth)];
  std::uint64_t s = 0;
  for (auto v : row) s += v;
  return s;
}

std::uint64_t Confusion5::total() const {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < kAamiClasses; ++t) s += row_sum(aami_from_index(t));
  return s;
}

Confusion5& Confusion5::operator+=(const Confusion5& o) {
  for (std::size_t t = 0; t < kAamiClasses; ++t)
    for (std::size_t p = 0; p < kAamiClasses; ++p) counts[t][p] += o.counts[t][p];
  return *this;
}

Confusion5 confusion(const std::vector<AamiClass>& truth,
                     const std::vector<AamiClass>& predicted) {
  if (truth.size() != predicted.size())
    throw Error::data(strfmt("label count mismatch: %zu truth vs %zu predicted",
                             truth.size(), predicted.size()));
  Confusion5 cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

BinaryMetrics one_vs_rest(const Confusion5& cm, AamiClass positive) {
  const std::size_t pos = static_cast<std::size_t>(positive);
  BinaryMetrics m;
  m.tp = cm.counts[pos][pos];
  for (std::size_t t = 0; t < kAamiClasses; ++t)
    if (t != pos) m.fp += cm.counts[t][pos];
  for (std::size_t p = 0; p < kAamiClasses; ++p)
    if (p != pos) m.fn += cm.counts[pos][p];
  const std::uint64_t total = cm.total();
  m.tn = total - m.tp - m.fp - m.fn;

  if (total > 0) m.acc = double(m.tp + m.tn) / double(total);
  if (m.tp + m.fn > 0) m.sen = double(m.tp) / double(m.tp + m.fn);
  if (m.tn + m.fp > 0) m.spe = double(m.tn) / double(m.tn + m.fp);
  if (m.tp + m.fp > 0) m.ppr = double(m.tp) / double(m.tp + m.fp);
  if (m.sen && m.ppr && *m.sen + *m.ppr > 0.0)
    m.f1 = 2.0 * *m.sen * *m.ppr / (*m.sen + *m.ppr);
  return m;
}

namespace {

std::vector<std::string> range_ids(std::initializer_list<int> ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(std::to_string(id));
  return out;
}

}  // namespace

const std::vector<std::string>& dataset_ids(int dataset, AamiClass task) {
  static const std::vector<std::string> d1_veb = range_ids(
      {200, 202, 210, 213, 214, 219, 221, 228, 231, 233, 234});
  static const std::vector<std::string> d1_sveb = range_ids(
      {200, 202, 210, 212, 213, 214, 219, 221, 222, 228, 231, 232, 233, 234});
  static const std::vector<std::string> d2 = range_ids(
      {200, 201, 202, 203, 205, 207, 208, 209, 210, 212, 213, 214,
       215, 219, 220, 221, 222, 223, 228, 230, 231, 232, 233, 234});
  static const std::vector<std::string> d3 = range_ids(
      {100, 101, 103, 105, 106, 108, 109, 111, 112, 113, 114, 115, 116, 117,
       118, 119, 121, 122, 123, 124, 200, 201, 202, 203, 205, 207, 208, 209,
       210, 212, 213, 214, 215, 219, 220, 221, 222, 223, 228, 230, 231, 232,
       233, 234});
  switch (dataset) {
    case 1:
      return task == AamiClass::S ? d1_sveb : d1_veb;
    case 2:
      return d2;
    case 3:
      return d3;
    default:
      throw Error::config(strfmt("dataset must be 1, 2, or 3, got %d", dataset));
  }
}

Confusion5 sum_confusions(const std::map<std::string, Confusion5>& by_patient,
                          const std::vector<std::string>& ids) {
  Confusion5 sum;
  std::string missing;
  for (const auto& id : ids) {
    auto it = by_patient.find(id);
    if (it == by_patient.end()) {
      if (!missing.empty()) missing += ", ";
      missing += id;
      continue;
    }
    sum += it->second;
  }
  if (!missing.empty())
    throw Error::data("aggregate is missing records: " + missing);
  return sum;
}

EvalReport evaluate_patients(const std::map<std::string, Confusion5>& by_patient) {
  EvalReport report;
  for (const auto& [id, cm] : by_patient) {
    PatientEval pe;
    pe.cm = cm;
    pe.sveb = one_vs_rest(cm, AamiClass::S);
    pe.veb = one_vs_rest(cm, AamiClass::V);
    report.patients.emplace(id, std::move(pe));
  }
  for (int dataset : {1, 2, 3}) {
    for (AamiClass task : {AamiClass::S, AamiClass::V}) {
      const auto& ids = dataset_ids(dataset, task);
      const bool complete = std::all_of(ids.begin(), ids.end(), [&](const auto& id) {
        return by_patient.count(id) > 0;
      });
      if (!complete) continue;
      TaskAggregate agg;
      agg.name = strfmt("dataset%d", dataset);
      agg.task = task;
      agg.records = ids.size();
      agg.cm = sum_confusions(by_patient, ids);
      agg.metrics = one_vs_rest(agg.cm, task);
      report.aggregates.push_back(std::move(agg));
    }
  }
  return report;
}

std::string render_percent(const std::optional<double>& fraction) {
  if (!fraction) return "-";
  // half-up at one decimal: 16.15 -> 16.2
  const double tenths = std::floor(*fraction * 1000.0 + 0.5) / 10.0;
  return strfmt("%.1f", tenths);
}

namespace {

const char* task_name(AamiClass task) { return task == AamiClass::S ? "SVEB" : "VEB"; }

void append_metric_block(std::string& line, const BinaryMetrics& m) {
  for (const auto& v : {m.acc, m.sen, m.spe, m.ppr, m.f1})
    line += strfmt(" %6s", render_percent(v).c_str());
}

std::string count_cells(const Confusion5& cm) {
  std::string s;
  for (std::size_t t = 0; t < kAamiClasses; ++t)
    s += strfmt(" %6llu",
                static_cast<unsigned long long>(cm.row_sum(aami_from_index(t))));
  return s;
}

}  // namespace

std::string render_text(const EvalReport& report) {
  std::string out;
  out += strfmt("%-10s %6s %6s %6s %6s %6s |%s|%s\n", "record", "n", "s", "v",
                "f", "q",
                "  SVEB: acc    sen    spe    ppr     f1 ",
                "  VEB:  acc    sen    spe    ppr     f1");
  for (const auto& [id, pe] : report.patients) {
    std::string line = strfmt("%-10s", id.c_str());
    line += count_cells(pe.cm);
    line += " |      ";
    append_metric_block(line, pe.sveb);
    line += " |      ";
    append_metric_block(line, pe.veb);
    out += line + "\n";
  }
  for (const auto& agg : report.aggregates) {
    std::string line = strfmt("%-10s", strfmt("%s/%s", agg.name.c_str(),
                                              task_name(agg.task)).c_str());
    line += count_cells(agg.cm);
    line += strfmt(" | %-4s ", task_name(agg.task));
    append_metric_block(line, agg.metrics);
    line += strfmt("  (%zu records)", agg.records);
    out += line + "\n";
  }
  return out;
}

namespace {

std::string csv_row(const std::string& id, const Confusion5& cm, AamiClass task,
                    const BinaryMetrics& m) {
  std::string row = id;
  for (std::size_t t = 0; t < kAamiClasses; ++t)
    row += strfmt(",%llu",
                  static_cast<unsigned long long>(cm.row_sum(aami_from_index(t))));
  row += std::string(",") + task_name(task);
  for (const auto& v : {m.acc, m.sen, m.spe, m.ppr, m.f1})
    row += "," + (v ? render_percent(v) : std::string());
  return row + "\n";
}

}  // namespace

std::string render_csv(const EvalReport& report) {
  std::string out = "patient_id,n,s,v,f,q,task,acc,sen,spe,ppr,f1\n";
  for (const auto& [id, pe] : report.patients) {
    out += csv_row(id, pe.cm, AamiClass::S, pe.sveb);
    out += csv_row(id, pe.cm, AamiClass::V, pe.veb);
  }
  for (const auto& agg : report.aggregates)
    out += csv_row(agg.name, agg.cm, agg.task, agg.metrics);
  return out;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error::data("cannot open report file " + path);
  f << render_csv(report);
  if (!f) throw Error::data("failed writing report file " + path);
}

}  // namespace selfonn
