#include "trainer.hpp"

#include <cmath>
#include <numeric>

namespace selfonn {

void validate_schedule(const TrainSchedule& s) {
  if (s.max_epochs < 1) throw Error::config("max_epochs must be >= 1");
  if (!(s.target_train_error > 0.0) || s.target_train_error > 1.0)
    throw Error::config(strfmt("target_train_error %g must be in (0, 1]",
                               s.target_train_error));
  if (!(s.lr0 > 0.0)) throw Error::config(strfmt("lr0 %g must be positive", s.lr0));
  if (!(s.lr_up > 0.0) || !(s.lr_down > 0.0))
    throw Error::config("learning-rate factors must be positive");
  if (s.runs < 1) throw Error::config("runs must be >= 1");
  if (s.batch_size < 1) throw Error::config("batch_size must be >= 1");
}

double sgd_step(Model& model, const std::vector<const TrainSample*>& batch,
                double lr) {
  if (batch.empty()) throw Error::config("sgd_step: empty batch");
  if (lr < 0.0) throw Error::config(strfmt("sgd_step: negative learning rate %g", lr));

  GradBuffers grads = model.make_grad_buffers();
  double loss_sum = 0.0;
  ModelCache cache;
  std::vector<double> grad_out;
  for (const TrainSample* s : batch) {
    const std::vector<double> out = model.forward(s->channels, &cache);
    const double loss =
        loss_value(model.config().loss, out, s->label, &grad_out);
    if (!std::isfinite(loss))
      throw Error::numeric(strfmt("sgd_step: non-finite loss on sample '%s'",
                                  s->id.c_str()));
    loss_sum += loss;
    model.backward(grad_out, cache, grads);
  }
  grads.scale(1.0 / static_cast<double>(batch.size()));
  model.apply_gradients(grads, lr);
  return loss_sum / static_cast<double>(batch.size());
}

double classification_error(const Model& model,
                            const std::vector<TrainSample>& samples) {
  if (samples.empty()) throw Error::data("classification_error: empty sample set");
  std::size_t wrong = 0;
  for (const auto& s : samples)
    if (model.predict(s.channels) != s.label) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(samples.size());
}

RunSummary train_run(Model& model, const TrainSchedule& sched,
                     const std::vector<TrainSample>& train, std::uint64_t seed) {
  validate_schedule(sched);
  if (train.empty()) throw Error::data("train_run: empty training set");

  Rng rng(seed);
  model.init_params(rng);
  model.meta().seed = seed;

  RunSummary summary;
  summary.seed = seed;

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  double lr = sched.lr0;
  double prev_mean_loss = 0.0;
  for (std::size_t epoch = 0; epoch < sched.max_epochs; ++epoch) {
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::vector<const TrainSample*> batch;
    for (std::size_t start = 0; start < n; start += sched.batch_size) {
      const std::size_t stop = std::min(start + sched.batch_size, n);
      batch.clear();
      for (std::size_t j = start; j < stop; ++j) batch.push_back(&train[order[j]]);
      const double batch_loss = sgd_step(model, batch, lr);
      loss_sum += batch_loss * static_cast<double>(batch.size());
    }
    const double mean_loss = loss_sum / static_cast<double>(n);
    const double err = classification_error(model, train);
    summary.epochs.push_back(EpochStats{lr, mean_loss, err});

    if (epoch > 0) lr *= mean_loss < prev_mean_loss ? sched.lr_up : sched.lr_down;
    prev_mean_loss = mean_loss;

    if (err <= sched.target_train_error) break;
  }

  summary.epochs_run = summary.epochs.size();
  summary.final_train_error = summary.epochs.back().train_error;
  model.meta().epochs_run = summary.epochs_run;
  model.meta().final_train_error = summary.final_train_error;
  return summary;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
  return splitmix64(master_seed + static_cast<std::uint64_t>(run_index));
}

TrainOutcome train_patient(const std::vector<TrainSample>& common,
                           const std::vector<TrainSample>& patient_specific,
                           const NetworkConfig& cfg, const TrainSchedule& sched,
                           std::uint64_t master_seed) {
  validate_schedule(sched);
  std::vector<TrainSample> train;
  train.reserve(common.size() + patient_specific.size());
  train.insert(train.end(), common.begin(), common.end());
  train.insert(train.end(), patient_specific.begin(), patient_specific.end());
  if (train.empty()) throw Error::data("train_patient: no training beats");

  TrainOutcome out{Model(cfg), 0, {}};
  bool have_best = false;
  for (std::size_t r = 0; r < sched.runs; ++r) {
    const std::uint64_t seed = run_seed(master_seed, r);
    Model candidate(cfg);
    RunSummary summary = train_run(candidate, sched, train, seed);
    const bool better =
        !have_best ||
        summary.final_train_error < out.runs[out.selected_run].final_train_error ||
        (summary.final_train_error == out.runs[out.selected_run].final_train_error &&
         (summary.epochs_run < out.runs[out.selected_run].epochs_run ||
          (summary.epochs_run == out.runs[out.selected_run].epochs_run &&
           summary.seed < out.runs[out.selected_run].seed)));
    out.runs.push_back(std::move(summary));
    if (better) {
      out.model = std::move(candidate);
      out.selected_run = r;
      have_best = true;
    }
  }
  return out;
}

}  // namespace selfonn
