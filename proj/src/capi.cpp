#include "selfonn1d.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "bench.hpp"
#include "common.hpp"
#include "ecg/partition.hpp"
#include "ecg/synth.hpp"
#include "metrics.hpp"
#include "model_io.hpp"
#include "network.hpp"
#include "trainer.hpp"

struct so1d_dataset {
  std::vector<selfonn::EcgRecord> records;
};

struct so1d_partitions {
  selfonn::Partitions value;
};

struct so1d_model {
  selfonn::Model value;
};

struct so1d_report {
  std::map<std::string, selfonn::Confusion5> by_patient;
};

namespace {

thread_local std::string t_last_error;

template <typename F>
so1d_status guarded(F&& body) noexcept {
  try {
    body();
    return SO1D_OK;
  } catch (const selfonn::Error& e) {
    t_last_error = e.what();
    switch (e.kind()) {
      case selfonn::ErrKind::config: return SO1D_ERR_CONFIG;
      case selfonn::ErrKind::data: return SO1D_ERR_DATA;
      case selfonn::ErrKind::numeric: return SO1D_ERR_NUMERIC;
    }
    return SO1D_ERR_NUMERIC;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SO1D_ERR_NUMERIC;
  } catch (...) {
    t_last_error = "unknown failure";
    return SO1D_ERR_NUMERIC;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr)
    throw selfonn::Error::config(std::string("null argument: ") + name);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

selfonn::NetworkConfig to_cpp(const so1d_network_config& c) {
  if (c.layer_count < 1 || c.layer_count > SO1D_MAX_LAYERS)
    throw selfonn::Error::config(selfonn::strfmt(
        "layer_count must be 1..%d, got %zu", SO1D_MAX_LAYERS, c.layer_count));
  if (c.loss != SO1D_LOSS_CROSS_ENTROPY && c.loss != SO1D_LOSS_MSE)
    throw selfonn::Error::config(selfonn::strfmt("unknown loss code %d", c.loss));
  selfonn::NetworkConfig cfg;
  cfg.input_channels = c.input_channels;
  cfg.input_length = c.input_length;
  cfg.layer_neurons.assign(c.layer_neurons, c.layer_neurons + c.layer_count);
  cfg.subsample.assign(c.subsample, c.subsample + c.layer_count);
  cfg.kernel = c.kernel;
  cfg.q_order = c.q_order;
  cfg.dense_hidden = c.dense_hidden;
  cfg.classes = c.classes;
  cfg.loss = c.loss == SO1D_LOSS_MSE ? selfonn::LossKind::mse
                                     : selfonn::LossKind::cross_entropy;
  cfg.seed = c.seed;
  return cfg;
}

selfonn::TrainSchedule to_cpp(const so1d_train_schedule& s) {
  selfonn::TrainSchedule sched;
  sched.max_epochs = s.max_epochs;
  sched.target_train_error = s.target_train_error;
  sched.lr0 = s.lr0;
  sched.lr_up = s.lr_up;
  sched.lr_down = s.lr_down;
  sched.runs = s.runs;
  sched.batch_size = s.batch_size;
  return sched;
}

selfonn::PartitionPlan to_cpp(const so1d_partition_plan& p) {
  selfonn::PartitionPlan plan = selfonn::PartitionPlan::aami_mitbih();
  if (p.pool_ids != nullptr)
    plan.pool_ids.assign(p.pool_ids, p.pool_ids + p.pool_count);
  if (p.test_ids != nullptr)
    plan.test_ids.assign(p.test_ids, p.test_ids + p.test_count);
  plan.boundary_seconds = p.boundary_seconds;
  plan.common_per_class = p.common_per_class;
  return plan;
}

selfonn::SynthRecordSpec to_cpp(const so1d_synth_spec& s) {
  selfonn::SynthRecordSpec spec;
  spec.normal_beats = s.normal_beats;
  spec.s_beats = s.s_beats;
  spec.v_beats = s.v_beats;
  spec.f_beats = s.f_beats;
  spec.q_beats = s.q_beats;
  spec.rr_seconds = s.rr_seconds;
  spec.premature_rr_seconds = s.premature_rr_seconds;
  spec.jitter_seconds = s.jitter_seconds;
  spec.noise = s.noise;
  spec.sampling_rate = s.sampling_rate;
  return spec;
}

const selfonn::PatientSplit& find_patient(const so1d_partitions& parts,
                                          const char* patient_id) {
  auto it = parts.value.patients.find(patient_id);
  if (it == parts.value.patients.end())
    throw selfonn::Error::data(
        selfonn::strfmt("patient %s is not in the evaluation set", patient_id));
  return it->second;
}

}  // namespace

extern "C" {

const char* so1d_last_error(void) { return t_last_error.c_str(); }

void so1d_string_free(char* s) { std::free(s); }

void so1d_network_config_default(so1d_network_config* cfg) {
  if (cfg == nullptr) return;
  const selfonn::NetworkConfig d;
  *cfg = so1d_network_config{};
  cfg->input_channels = d.input_channels;
  cfg->input_length = d.input_length;
  cfg->layer_count = d.layer_neurons.size();
  for (std::size_t i = 0; i < d.layer_neurons.size(); ++i) {
    cfg->layer_neurons[i] = d.layer_neurons[i];
    cfg->subsample[i] = d.subsample[i];
  }
  cfg->kernel = d.kernel;
  cfg->q_order = d.q_order;
  cfg->dense_hidden = d.dense_hidden;
  cfg->classes = d.classes;
  cfg->loss = SO1D_LOSS_CROSS_ENTROPY;
  cfg->seed = d.seed;
}

void so1d_train_schedule_default(so1d_train_schedule* sched) {
  if (sched == nullptr) return;
  const selfonn::TrainSchedule d;
  sched->max_epochs = d.max_epochs;
  sched->target_train_error = d.target_train_error;
  sched->lr0 = d.lr0;
  sched->lr_up = d.lr_up;
  sched->lr_down = d.lr_down;
  sched->runs = d.runs;
  sched->batch_size = d.batch_size;
}

void so1d_partition_plan_default(so1d_partition_plan* plan) {
  if (plan == nullptr) return;
  plan->pool_ids = nullptr;
  plan->pool_count = 0;
  plan->test_ids = nullptr;
  plan->test_count = 0;
  const selfonn::PartitionPlan d;
  plan->boundary_seconds = d.boundary_seconds;
  plan->common_per_class = d.common_per_class;
}

void so1d_synth_spec_default(so1d_synth_spec* spec) {
  if (spec == nullptr) return;
  spec->normal_beats = 10;
  spec->s_beats = 5;
  spec->v_beats = 5;
  spec->f_beats = 2;
  spec->q_beats = 2;
  const selfonn::SynthRecordSpec d;
  spec->rr_seconds = d.rr_seconds;
  spec->premature_rr_seconds = d.premature_rr_seconds;
  spec->jitter_seconds = 0.02;
  spec->noise = 0.05;
  spec->sampling_rate = d.sampling_rate;
}

so1d_status so1d_dataset_load_dir(const char* dir,
                                  const so1d_partition_plan* plan,
                                  double sampling_rate, so1d_dataset** out) {
  return guarded([&] {
    require(dir, "dir");
    require(plan, "plan");
    require(out, "out");
    auto records = selfonn::load_dataset_dir(dir, to_cpp(*plan), sampling_rate);
    *out = new so1d_dataset{std::move(records)};
  });
}

void so1d_dataset_free(so1d_dataset* dataset) { delete dataset; }

so1d_status so1d_dataset_record_count(const so1d_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = dataset->records.size();
  });
}

so1d_status so1d_partitions_build(const so1d_dataset* dataset,
                                  const so1d_partition_plan* plan,
                                  uint64_t seed, so1d_partitions** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(plan, "plan");
    require(out, "out");
    auto parts = selfonn::build_partitions(dataset->records, to_cpp(*plan), seed);
    *out = new so1d_partitions{std::move(parts)};
  });
}

void so1d_partitions_free(so1d_partitions* parts) { delete parts; }

so1d_status so1d_partitions_common_count(const so1d_partitions* parts,
                                         size_t* out) {
  return guarded([&] {
    require(parts, "parts");
    require(out, "out");
    *out = parts->value.common.size();
  });
}

so1d_status so1d_partitions_patient_count(const so1d_partitions* parts,
                                          size_t* out) {
  return guarded([&] {
    require(parts, "parts");
    require(out, "out");
    *out = parts->value.patients.size();
  });
}

so1d_status so1d_partitions_patient_id(const so1d_partitions* parts,
                                       size_t index, char** out) {
  return guarded([&] {
    require(parts, "parts");
    require(out, "out");
    if (index >= parts->value.patients.size())
      throw selfonn::Error::config(
          selfonn::strfmt("patient index %zu out of range, have %zu", index,
                          parts->value.patients.size()));
    auto it = parts->value.patients.begin();
    std::advance(it, index);
    *out = dup_string(it->first);
  });
}

so1d_status so1d_partitions_patient_counts(const so1d_partitions* parts,
                                           const char* patient_id,
                                           size_t* train_specific,
                                           size_t* test) {
  return guarded([&] {
    require(parts, "parts");
    require(patient_id, "patient_id");
    const auto& split = find_patient(*parts, patient_id);
    if (train_specific != nullptr) *train_specific = split.train_specific.size();
    if (test != nullptr) *test = split.test.size();
  });
}

so1d_status so1d_train_patient(const so1d_partitions* parts,
                               const char* patient_id,
                               const so1d_network_config* cfg,
                               const so1d_train_schedule* sched,
                               uint64_t master_seed, so1d_model** out_model,
                               so1d_run_summary* run_summaries,
                               size_t* runs_filled) {
  return guarded([&] {
    require(parts, "parts");
    require(patient_id, "patient_id");
    require(cfg, "cfg");
    require(sched, "sched");
    require(out_model, "out_model");
    const auto& split = find_patient(*parts, patient_id);
    auto common = selfonn::to_train_samples(parts->value.common);
    auto specific = selfonn::to_train_samples(split.train_specific);
    auto outcome = selfonn::train_patient(common, specific, to_cpp(*cfg),
                                          to_cpp(*sched), master_seed);
    if (run_summaries != nullptr) {
      for (std::size_t i = 0; i < outcome.runs.size(); ++i) {
        run_summaries[i].seed = outcome.runs[i].seed;
        run_summaries[i].epochs_run = outcome.runs[i].epochs_run;
        run_summaries[i].final_train_error = outcome.runs[i].final_train_error;
        run_summaries[i].selected = i == outcome.selected_run ? 1 : 0;
      }
    }
    if (runs_filled != nullptr) *runs_filled = outcome.runs.size();
    *out_model = new so1d_model{std::move(outcome.model)};
  });
}

void so1d_model_free(so1d_model* model) { delete model; }

so1d_status so1d_model_save(const so1d_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    selfonn::save_model(model->value, path);
  });
}

so1d_status so1d_model_load(const char* path, so1d_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new so1d_model{selfonn::load_model(path)};
  });
}

so1d_status so1d_model_param_count(const so1d_model* model, uint64_t* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = model->value.param_count();
  });
}

so1d_status so1d_model_mac_count(const so1d_model* model, uint64_t* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = model->value.mac_count();
  });
}

so1d_status so1d_model_q_order(const so1d_model* model, int* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = model->value.config().q_order;
  });
}

so1d_status so1d_model_config_hash_hex(const so1d_model* model, char out[17]) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const std::string hex = selfonn::config_hash_hex(model->value.config());
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

so1d_status so1d_model_predict(const so1d_model* model, const double* samples,
                               size_t channels, size_t length,
                               size_t* class_index) {
  return guarded([&] {
    require(model, "model");
    require(samples, "samples");
    require(class_index, "class_index");
    std::vector<selfonn::Signal> input(channels);
    for (size_t c = 0; c < channels; ++c)
      input[c].assign(samples + c * length, samples + (c + 1) * length);
    *class_index = model->value.predict(input);
  });
}

so1d_status so1d_eval_patient(const so1d_partitions* parts,
                              const char* patient_id, const so1d_model* model,
                              uint64_t confusion[25]) {
  return guarded([&] {
    require(parts, "parts");
    require(patient_id, "patient_id");
    require(model, "model");
    require(confusion, "confusion");
    const auto& split = find_patient(*parts, patient_id);
    std::memset(confusion, 0, 25 * sizeof(uint64_t));
    for (const auto& beat : split.test) {
      const auto sample = selfonn::to_train_sample(beat);
      const size_t pred = model->value.predict(sample.channels);
      confusion[static_cast<size_t>(beat.aami_class) * 5 + pred] += 1;
    }
  });
}

so1d_status so1d_report_create(so1d_report** out) {
  return guarded([&] {
    require(out, "out");
    *out = new so1d_report{};
  });
}

void so1d_report_free(so1d_report* report) { delete report; }

so1d_status so1d_report_add(so1d_report* report, const char* patient_id,
                            const uint64_t confusion[25]) {
  return guarded([&] {
    require(report, "report");
    require(patient_id, "patient_id");
    require(confusion, "confusion");
    selfonn::Confusion5 cm;
    for (size_t t = 0; t < 5; ++t)
      for (size_t p = 0; p < 5; ++p) cm.counts[t][p] = confusion[t * 5 + p];
    report->by_patient[patient_id] = cm;
  });
}

so1d_status so1d_report_text(const so1d_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(
        selfonn::render_text(selfonn::evaluate_patients(report->by_patient)));
  });
}

so1d_status so1d_report_csv(const so1d_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(
        selfonn::render_csv(selfonn::evaluate_patients(report->by_patient)));
  });
}

so1d_status so1d_complexity(const so1d_network_config* cfg, uint64_t* params,
                            uint64_t* macs) {
  return guarded([&] {
    require(cfg, "cfg");
    const selfonn::Model model(to_cpp(*cfg));
    if (params != nullptr) *params = model.param_count();
    if (macs != nullptr) *macs = model.mac_count();
  });
}

so1d_status so1d_layer_neuron_macs(const so1d_network_config* cfg,
                                   size_t layer_index, uint64_t* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const selfonn::Model model(to_cpp(*cfg));
    *out = model.op_neuron_macs(layer_index);
  });
}

so1d_status so1d_dim_trace(const so1d_network_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup_string(selfonn::derive_dims(to_cpp(*cfg)).to_string());
  });
}

so1d_status so1d_bench_run(const so1d_network_config* cfg, size_t reps,
                           uint64_t seed, so1d_bench_result* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const auto r = selfonn::bench_model(to_cpp(*cfg), reps, seed);
    out->reps = r.reps;
    out->forward_median_us = r.forward_median_us;
    out->forward_p95_us = r.forward_p95_us;
    out->backward_median_us = r.backward_median_us;
    out->backward_p95_us = r.backward_p95_us;
  });
}

so1d_status so1d_machine_info(char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(selfonn::machine_info());
  });
}

so1d_status so1d_synth_write(const so1d_synth_spec* spec,
                             const char* const* ids, size_t id_count,
                             uint64_t corpus_seed, const char* out_dir) {
  return guarded([&] {
    require(spec, "spec");
    require(out_dir, "out_dir");
    std::vector<std::string> id_list;
    if (ids != nullptr) {
      if (id_count == 0)
        throw selfonn::Error::config("id list given without a count");
      id_list.assign(ids, ids + id_count);
    } else {
      id_list = selfonn::PartitionPlan::aami_mitbih().test_ids;
    }
    const auto corpus = selfonn::synth_corpus(id_list, to_cpp(*spec), corpus_seed);
    selfonn::write_corpus_csv(corpus, out_dir);
  });
}

}  // extern "C"
