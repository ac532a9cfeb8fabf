/* C interface to the 1D self-organized operational network library.
 *
 * Every function returns a so1d_status; non-zero values match the process
 * exit codes the command-line tool uses.  On failure a human-readable
 * message is available from so1d_last_error() until the next failing call
 * on the same thread.  Objects returned through ** out-parameters are owned
 * by the caller and released with the matching _free function.  Handles are
 * safe to share across threads for read-only use; mutation or destruction
 * needs external ordering.
 */
#ifndef SELFONN1D_H
#define SELFONN1D_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum so1d_status {
  SO1D_OK = 0,
  SO1D_ERR_CONFIG = 2, /* invalid parameters or malformed configuration */
  SO1D_ERR_DATA = 3,   /* unreadable, inconsistent or missing input data */
  SO1D_ERR_NUMERIC = 4 /* non-finite values or other numeric failure */
} so1d_status;

const char* so1d_last_error(void);

/* frees strings returned through char** out-parameters */
void so1d_string_free(char* s);

enum { SO1D_MAX_LAYERS = 8 };

typedef enum so1d_loss {
  SO1D_LOSS_CROSS_ENTROPY = 0, /* linear head, softmax inside the loss */
  SO1D_LOSS_MSE = 1            /* tanh head against +-1 targets */
} so1d_loss;

typedef struct so1d_network_config {
  size_t input_channels;
  size_t input_length;
  size_t layer_count; /* operational layers in use, 1..SO1D_MAX_LAYERS */
  size_t layer_neurons[SO1D_MAX_LAYERS];
  size_t subsample[SO1D_MAX_LAYERS];
  size_t kernel;
  int q_order;
  size_t dense_hidden;
  size_t classes;
  int loss; /* so1d_loss */
  uint64_t seed;
} so1d_network_config;

/* two channels x 128 samples -> [16, 8] order-7 layers -> 10 -> 5 */
void so1d_network_config_default(so1d_network_config* cfg);

typedef struct so1d_train_schedule {
  size_t max_epochs;
  double target_train_error; /* stop once train error <= this fraction */
  double lr0;
  double lr_up;   /* rate multiplier after an epoch whose mean loss improved */
  double lr_down; /* multiplier otherwise */
  size_t runs;    /* independent restarts; the best final error wins */
  size_t batch_size;
} so1d_train_schedule;

void so1d_train_schedule_default(so1d_train_schedule* sched);

typedef struct so1d_partition_plan {
  const char* const* pool_ids; /* NULL: the 20 standard shared-pool records */
  size_t pool_count;
  const char* const* test_ids; /* NULL: the 44 standard evaluation records */
  size_t test_count;
  double boundary_seconds;  /* patient-specific training ends here */
  size_t common_per_class;  /* N, S and V draw size for the shared pool */
} so1d_partition_plan;

void so1d_partition_plan_default(so1d_partition_plan* plan);

typedef struct so1d_synth_spec {
  size_t normal_beats; /* per record, includes the two bracketing normals */
  size_t s_beats;
  size_t v_beats;
  size_t f_beats;
  size_t q_beats;
  double rr_seconds;
  double premature_rr_seconds;
  double jitter_seconds;
  double noise;
  int sampling_rate;
} so1d_synth_spec;

void so1d_synth_spec_default(so1d_synth_spec* spec);

typedef struct so1d_dataset so1d_dataset;
typedef struct so1d_partitions so1d_partitions;
typedef struct so1d_model so1d_model;
typedef struct so1d_report so1d_report;

/* --- dataset ----------------------------------------------------------- */

/* reads <dir>/<id>.rec.csv and <dir>/<id>.ann.csv for every id the plan
 * references */
so1d_status so1d_dataset_load_dir(const char* dir,
                                  const so1d_partition_plan* plan,
                                  double sampling_rate, so1d_dataset** out);
void so1d_dataset_free(so1d_dataset* dataset);
so1d_status so1d_dataset_record_count(const so1d_dataset* dataset, size_t* out);

/* --- partitions -------------------------------------------------------- */

so1d_status so1d_partitions_build(const so1d_dataset* dataset,
                                  const so1d_partition_plan* plan,
                                  uint64_t seed, so1d_partitions** out);
void so1d_partitions_free(so1d_partitions* parts);
so1d_status so1d_partitions_common_count(const so1d_partitions* parts,
                                         size_t* out);
so1d_status so1d_partitions_patient_count(const so1d_partitions* parts,
                                          size_t* out);
/* id of the index-th evaluation patient, ascending order */
so1d_status so1d_partitions_patient_id(const so1d_partitions* parts,
                                       size_t index, char** out);
so1d_status so1d_partitions_patient_counts(const so1d_partitions* parts,
                                           const char* patient_id,
                                           size_t* train_specific,
                                           size_t* test);

/* --- training ---------------------------------------------------------- */

typedef struct so1d_run_summary {
  uint64_t seed;
  size_t epochs_run;
  double final_train_error;
  int selected; /* 1 on the run whose model was kept */
} so1d_run_summary;

/* Trains one evaluation patient on the shared pool plus its own early
 * beats.  run_summaries, when non-NULL, must hold sched->runs entries;
 * runs_filled receives the count written. */
so1d_status so1d_train_patient(const so1d_partitions* parts,
                               const char* patient_id,
                               const so1d_network_config* cfg,
                               const so1d_train_schedule* sched,
                               uint64_t master_seed, so1d_model** out_model,
                               so1d_run_summary* run_summaries,
                               size_t* runs_filled);

/* --- models ------------------------------------------------------------ */

void so1d_model_free(so1d_model* model);
so1d_status so1d_model_save(const so1d_model* model, const char* path);
so1d_status so1d_model_load(const char* path, so1d_model** out);
so1d_status so1d_model_param_count(const so1d_model* model, uint64_t* out);
so1d_status so1d_model_mac_count(const so1d_model* model, uint64_t* out);
so1d_status so1d_model_q_order(const so1d_model* model, int* out);
/* 16 hex digits + NUL identifying the architecture configuration */
so1d_status so1d_model_config_hash_hex(const so1d_model* model, char out[17]);
/* samples holds channels x length values, channel-major */
so1d_status so1d_model_predict(const so1d_model* model, const double* samples,
                               size_t channels, size_t length,
                               size_t* class_index);

/* --- evaluation -------------------------------------------------------- */

/* confusion is a 5x5 row-major count matrix, rows ground truth, columns
 * prediction, class order N,S,V,F,Q */
so1d_status so1d_eval_patient(const so1d_partitions* parts,
                              const char* patient_id, const so1d_model* model,
                              uint64_t confusion[25]);

so1d_status so1d_report_create(so1d_report** out);
void so1d_report_free(so1d_report* report);
so1d_status so1d_report_add(so1d_report* report, const char* patient_id,
                            const uint64_t confusion[25]);
/* per-patient rows plus every complete dataset aggregate */
so1d_status so1d_report_text(const so1d_report* report, char** out);
so1d_status so1d_report_csv(const so1d_report* report, char** out);

/* --- complexity -------------------------------------------------------- */

so1d_status so1d_complexity(const so1d_network_config* cfg, uint64_t* params,
                            uint64_t* macs);
/* multiply-accumulates of one neuron in the given operational layer */
so1d_status so1d_layer_neuron_macs(const so1d_network_config* cfg,
                                   size_t layer_index, uint64_t* out);
/* feature-map length trace, e.g. "128 -> 114 -> 19 -> 5 -> 1 | flatten 8" */
so1d_status so1d_dim_trace(const so1d_network_config* cfg, char** out);

/* --- benchmark --------------------------------------------------------- */

typedef struct so1d_bench_result {
  size_t reps;
  double forward_median_us;
  double forward_p95_us;
  double backward_median_us;
  double backward_p95_us;
} so1d_bench_result;

so1d_status so1d_bench_run(const so1d_network_config* cfg, size_t reps,
                           uint64_t seed, so1d_bench_result* out);
/* cpu description for benchmark reports */
so1d_status so1d_machine_info(char** out);

/* --- synthetic data ---------------------------------------------------- */

/* Writes <id>.rec.csv/.ann.csv per id under out_dir.  ids NULL: the 44
 * standard evaluation ids.  Record i derives its seed from corpus_seed and
 * i, so a fixed seed reproduces files byte for byte. */
so1d_status so1d_synth_write(const so1d_synth_spec* spec,
                             const char* const* ids, size_t id_count,
                             uint64_t corpus_seed, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SELFONN1D_H */
