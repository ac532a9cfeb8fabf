#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "network.hpp"

namespace selfonn {

struct TrainSchedule {
  std::size_t max_epochs = 50;
  double target_train_error = 0.03;
  double lr0 = 0.01;
  double lr_up = 1.05;
  double lr_down = 0.7;
  std::size_t runs = 5;
  std::size_t batch_size = 32;
};

void validate_schedule(const TrainSchedule& s);

// one labeled example as the network consumes it
struct TrainSample {
  std::vector<Signal> channels;
  std::size_t label = 0;
  std::string id;  // carried into step diagnostics
};

struct EpochStats {
  double lr = 0.0;         // rate in effect during the epoch
  double mean_loss = 0.0;  // sample-weighted mean over the epoch
  double train_error = 0.0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  double final_train_error = 0.0;
  std::vector<EpochStats> epochs;
};

struct TrainOutcome {
  Model model;
  std::size_t selected_run = 0;
  std::vector<RunSummary> runs;
};

// One descent step on a mini-batch: gradients averaged over the batch, then
// every parameter moves by -lr times its gradient.  Returns the mean loss.
double sgd_step(Model& model, const std::vector<const TrainSample*>& batch,
                double lr);

// argmax misclassification fraction over the set, model frozen
double classification_error(const Model& model,
                            const std::vector<TrainSample>& samples);

// Full training run from a fresh seed: shuffled mini-batches, the learning
// rate multiplied up after an epoch whose mean loss improved and down
// otherwise, stopping at the first of max_epochs or the target error.
RunSummary train_run(Model& model, const TrainSchedule& sched,
                     const std::vector<TrainSample>& train, std::uint64_t seed);

// Training set is the shared beats plus the patient's own early beats.
TrainOutcome train_patient(const std::vector<TrainSample>& common,
                           const std::vector<TrainSample>& patient_specific,
                           const NetworkConfig& cfg, const TrainSchedule& sched,
                           std::uint64_t master_seed);

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

}  // namespace selfonn
