#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "metrics.hpp"

using selfonn::AamiClass;
using selfonn::BinaryMetrics;
using selfonn::Confusion5;
using selfonn::Error;
using selfonn::EvalReport;

namespace {

Confusion5 from_rows(const std::array<std::array<std::uint64_t, 5>, 5>& rows) {
  Confusion5 cm;
  cm.counts = rows;
  return cm;
}

// patient-202 test-section confusion matrix
Confusion5 patient202() {
  return from_rows({{{1493, 203, 6, 0, 0},
                     {20, 23, 12, 0, 0},
                     {1, 3, 11, 0, 0},
                     {1, 0, 0, 0, 0},
                     {0, 0, 0, 0, 0}}});
}

Confusion5 diagonal(std::uint64_t n) {
  Confusion5 cm;
  for (std::size_t c = 0; c < 5; ++c) cm.counts[c][c] = n;
  return cm;
}

}  // namespace

TEST_CASE("confusion matrix from label vectors") {
  std::vector<AamiClass> truth = {AamiClass::N, AamiClass::S, AamiClass::V,
                                  AamiClass::N, AamiClass::F};
  auto perfect = selfonn::confusion(truth, truth);
  CHECK(perfect.at(AamiClass::N, AamiClass::N) == 2);
  CHECK(perfect.at(AamiClass::S, AamiClass::S) == 1);
  CHECK(perfect.at(AamiClass::V, AamiClass::V) == 1);
  CHECK(perfect.at(AamiClass::F, AamiClass::F) == 1);
  CHECK(perfect.total() == 5);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t p = 0; p < 5; ++p)
      if (t != p)
        CHECK(perfect.counts[t][p] == 0);

  auto empty = selfonn::confusion({}, {});
  CHECK(empty.total() == 0);

  std::vector<AamiClass> mixed_pred = {AamiClass::S, AamiClass::S, AamiClass::N,
                                       AamiClass::N, AamiClass::F};
  auto cm = selfonn::confusion(truth, mixed_pred);
  CHECK(cm.at(AamiClass::N, AamiClass::S) == 1);
  CHECK(cm.at(AamiClass::V, AamiClass::N) == 1);
  CHECK(cm.row_sum(AamiClass::N) == 2);

  CHECK_THROWS_AS(selfonn::confusion(truth, {AamiClass::N}), Error);
}

TEST_CASE("patient fixture row sums") {
  auto cm = patient202();
  CHECK(cm.row_sum(AamiClass::N) == 1702);
  CHECK(cm.row_sum(AamiClass::S) == 55);
  CHECK(cm.row_sum(AamiClass::V) == 15);
  CHECK(cm.row_sum(AamiClass::F) == 1);
  CHECK(cm.row_sum(AamiClass::Q) == 0);
  CHECK(cm.total() == 1773);
}

TEST_CASE("supraventricular one-vs-rest on the patient fixture") {
  auto m = selfonn::one_vs_rest(patient202(), AamiClass::S);
  CHECK(m.tp == 23);
  CHECK(m.fp == 206);
  CHECK(m.fn == 32);
  CHECK(m.tn == 1512);

  REQUIRE(m.sen);
  REQUIRE(m.ppr);
  REQUIRE(m.f1);
  // published per-patient values, one decimal
  CHECK(std::abs(*m.sen * 100.0 - 41.8) <= 0.1);
  CHECK(std::abs(*m.ppr * 100.0 - 10.0) <= 0.1);
  CHECK(std::abs(*m.f1 * 100.0 - 16.1) <= 0.1);
  CHECK(selfonn::render_percent(m.sen) == "41.8");
  CHECK(selfonn::render_percent(m.ppr) == "10.0");
}

TEST_CASE("count identity holds for every positive class") {
  for (auto cm : {patient202(), diagonal(7), Confusion5{}}) {
    for (std::size_t c = 0; c < 5; ++c) {
      auto m = selfonn::one_vs_rest(cm, selfonn::aami_from_index(c));
      CHECK(m.tp + m.fp + m.fn + m.tn == cm.total());
    }
  }
}

TEST_CASE("ventricular one-vs-rest on the patient fixture") {
  auto m = selfonn::one_vs_rest(patient202(), AamiClass::V);
  CHECK(m.tp == 11);
  CHECK(m.fp == 18);
  CHECK(m.fn == 4);
  CHECK(m.tn == 1740);
  REQUIRE(m.f1);
  CHECK(*m.f1 == doctest::Approx(22.0 / 44.0).epsilon(1e-12));
}

TEST_CASE("zero denominators leave metrics absent, never zero or NaN") {
  Confusion5 empty;
  auto m = selfonn::one_vs_rest(empty, AamiClass::S);
  CHECK(!m.acc);
  CHECK(!m.sen);
  CHECK(!m.spe);
  CHECK(!m.ppr);
  CHECK(!m.f1);

  // only normals, all predicted normal: no S truth, no S predictions
  Confusion5 normals;
  normals.counts[0][0] = 10;
  m = selfonn::one_vs_rest(normals, AamiClass::S);
  CHECK(!m.sen);
  CHECK(!m.ppr);
  CHECK(!m.f1);
  REQUIRE(m.acc);
  CHECK(*m.acc == 1.0);
  REQUIRE(m.spe);
  CHECK(*m.spe == 1.0);

  // tp == 0 with nonzero denominators: sen and ppr are defined zeros but the
  // harmonic mean has no value
  Confusion5 wrong;
  wrong.counts[1][0] = 4;  // S called N
  wrong.counts[0][1] = 3;  // N called S
  m = selfonn::one_vs_rest(wrong, AamiClass::S);
  REQUIRE(m.sen);
  CHECK(*m.sen == 0.0);
  REQUIRE(m.ppr);
  CHECK(*m.ppr == 0.0);
  CHECK(!m.f1);
}

TEST_CASE("micro-average of two identical patients doubles counts, keeps rates") {
  auto single = patient202();
  auto m1 = selfonn::one_vs_rest(single, AamiClass::S);

  std::map<std::string, Confusion5> two = {{"202", single}, {"202b", single}};
  auto summed = selfonn::sum_confusions(two, {"202", "202b"});
  CHECK(summed.total() == 2 * single.total());
  auto m2 = selfonn::one_vs_rest(summed, AamiClass::S);
  CHECK(m2.tp == 2 * m1.tp);
  CHECK(m2.fp == 2 * m1.fp);
  CHECK(*m2.sen == doctest::Approx(*m1.sen).epsilon(1e-15));
  CHECK(*m2.ppr == doctest::Approx(*m1.ppr).epsilon(1e-15));
  CHECK(*m2.f1 == doctest::Approx(*m1.f1).epsilon(1e-15));
}

TEST_CASE("dataset memberships") {
  const auto& d1s = selfonn::dataset_ids(1, AamiClass::S);
  const auto& d1v = selfonn::dataset_ids(1, AamiClass::V);
  const auto& d2 = selfonn::dataset_ids(2, AamiClass::S);
  const auto& d3 = selfonn::dataset_ids(3, AamiClass::V);
  CHECK(d1s.size() == 14);
  CHECK(d1v.size() == 11);
  CHECK(d2.size() == 24);
  CHECK(d3.size() == 44);
  CHECK(selfonn::dataset_ids(2, AamiClass::V) == d2);

  // the supraventricular set is the ventricular set plus three records
  std::set<std::string> extra(d1s.begin(), d1s.end());
  for (const auto& id : d1v) {
    CHECK(extra.count(id) == 1);
    extra.erase(id);
  }
  CHECK(extra == std::set<std::string>{"212", "222", "232"});

  // nesting: dataset 1 within 2 within 3
  std::set<std::string> s2(d2.begin(), d2.end()), s3(d3.begin(), d3.end());
  for (const auto& id : d1s) CHECK(s2.count(id) == 1);
  for (const auto& id : d2) CHECK(s3.count(id) == 1);

  CHECK_THROWS_AS(selfonn::dataset_ids(4, AamiClass::S), Error);
}

TEST_CASE("aggregate of one patient equals that patient") {
  std::map<std::string, Confusion5> one = {{"202", patient202()}};
  auto sum = selfonn::sum_confusions(one, {"202"});
  CHECK(sum.counts == patient202().counts);
  auto ma = selfonn::one_vs_rest(sum, AamiClass::V);
  auto mp = selfonn::one_vs_rest(patient202(), AamiClass::V);
  CHECK(ma.tp == mp.tp);
  CHECK(*ma.f1 == *mp.f1);
}

TEST_CASE("missing aggregate members are listed") {
  std::map<std::string, Confusion5> partial = {{"200", diagonal(1)},
                                               {"202", diagonal(1)}};
  try {
    selfonn::sum_confusions(partial, selfonn::dataset_ids(1, AamiClass::V));
    FAIL("expected a data error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("missing records") != std::string::npos);
    CHECK(msg.find("210") != std::string::npos);
    CHECK(msg.find("234") != std::string::npos);
    CHECK(msg.find("200") == std::string::npos);
  }
}

TEST_CASE("evaluation report aggregates only complete datasets") {
  std::map<std::string, Confusion5> by_patient;
  for (const auto& id : selfonn::dataset_ids(3, AamiClass::S))
    by_patient[id] = diagonal(2);

  auto report = selfonn::evaluate_patients(by_patient);
  CHECK(report.patients.size() == 44);
  REQUIRE(report.aggregates.size() == 6);
  CHECK(report.aggregates[0].name == "dataset1");
  CHECK(report.aggregates[0].task == AamiClass::S);
  CHECK(report.aggregates[0].records == 14);
  CHECK(report.aggregates[1].records == 11);
  CHECK(report.aggregates[2].records == 24);
  CHECK(report.aggregates[3].records == 24);
  CHECK(report.aggregates[4].name == "dataset3");
  CHECK(report.aggregates[4].records == 44);
  CHECK(report.aggregates[5].task == AamiClass::V);
  CHECK(report.aggregates[4].cm.total() == 44 * 10);
  CHECK(*report.aggregates[4].metrics.acc == 1.0);

  // dropping record 212 breaks every aggregate that references it
  by_patient.erase("212");
  report = selfonn::evaluate_patients(by_patient);
  REQUIRE(report.aggregates.size() == 1);
  CHECK(report.aggregates[0].name == "dataset1");
  CHECK(report.aggregates[0].task == AamiClass::V);
}

TEST_CASE("percent rendering rounds half up to one decimal") {
  CHECK(selfonn::render_percent(std::nullopt) == "-");
  CHECK(selfonn::render_percent(0.0) == "0.0");
  CHECK(selfonn::render_percent(1.0) == "100.0");
  CHECK(selfonn::render_percent(0.5) == "50.0");
  // exact dyadic halves demonstrate the tie direction
  CHECK(selfonn::render_percent(0.0625) == "6.3");
  CHECK(selfonn::render_percent(0.1875) == "18.8");
  CHECK(selfonn::render_percent(1.0 / 3.0) == "33.3");
  CHECK(selfonn::render_percent(2.0 / 3.0) == "66.7");
  CHECK(selfonn::render_percent(0.984375) == "98.4");
}

TEST_CASE("report CSV golden fixtures") {
  std::map<std::string, Confusion5> by_patient;
  by_patient["101"] = from_rows({{{3, 0, 0, 0, 0},
                                  {0, 1, 0, 0, 0},
                                  {0, 0, 2, 0, 0},
                                  {0, 0, 0, 0, 0},
                                  {0, 0, 0, 0, 0}}});
  by_patient["109"] = from_rows({{{2, 1, 0, 0, 0},
                                  {0, 1, 0, 0, 0},
                                  {0, 0, 0, 0, 0},
                                  {0, 0, 0, 0, 0},
                                  {0, 0, 0, 0, 0}}});
  by_patient["200"] = Confusion5{};

  auto report = selfonn::evaluate_patients(by_patient);
  CHECK(report.aggregates.empty());
  const std::string expected =
      "patient_id,n,s,v,f,q,task,acc,sen,spe,ppr,f1\n"
      "101,3,1,2,0,0,SVEB,100.0,100.0,100.0,100.0,100.0\n"
      "101,3,1,2,0,0,VEB,100.0,100.0,100.0,100.0,100.0\n"
      "109,3,1,0,0,0,SVEB,75.0,100.0,66.7,50.0,66.7\n"
      "109,3,1,0,0,0,VEB,100.0,,100.0,,\n"
      "200,0,0,0,0,0,SVEB,,,,,\n"
      "200,0,0,0,0,0,VEB,,,,,\n";
  CHECK(selfonn::render_csv(report) == expected);
}

TEST_CASE("text table marks absent metrics with a dash") {
  std::map<std::string, Confusion5> by_patient = {{"200", Confusion5{}}};
  auto report = selfonn::evaluate_patients(by_patient);
  auto text = selfonn::render_text(report);

  std::vector<std::string> lines;
  std::istringstream stream(text);
  for (std::string line; std::getline(stream, line);) lines.push_back(line);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find("record") == 0);
  CHECK(lines[1].find("200") == 0);
  CHECK(std::count(lines[1].begin(), lines[1].end(), '-') == 10);
}

TEST_CASE("aggregate rows appear in the rendered report") {
  std::map<std::string, Confusion5> by_patient;
  for (const auto& id : selfonn::dataset_ids(3, AamiClass::S))
    by_patient[id] = diagonal(1);
  auto report = selfonn::evaluate_patients(by_patient);

  auto text = selfonn::render_text(report);
  CHECK(text.find("dataset1/SVEB") != std::string::npos);
  CHECK(text.find("dataset3/VEB") != std::string::npos);
  CHECK(text.find("(44 records)") != std::string::npos);

  auto csv = selfonn::render_csv(report);
  CHECK(csv.find("dataset1,14,14,14,14,14,SVEB,100.0") != std::string::npos);
  CHECK(csv.find("dataset3,44,44,44,44,44,VEB,100.0") != std::string::npos);
}

TEST_CASE("report CSV writes to disk") {
  std::map<std::string, Confusion5> by_patient = {{"202", patient202()}};
  auto report = selfonn::evaluate_patients(by_patient);
  const std::string path = "metrics_report_tmp.csv";
  selfonn::write_report_csv(report, path);
  std::ifstream f(path, std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == selfonn::render_csv(report));
  std::remove(path.c_str());

  CHECK_THROWS_AS(selfonn::write_report_csv(report, "no_such_dir/x.csv"), Error);
}
