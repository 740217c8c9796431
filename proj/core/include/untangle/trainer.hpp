#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "untangle/baselines.hpp"
#include "untangle/dataset.hpp"
#include "untangle/model_config.hpp"

namespace untangle {

struct TrainConfig {
  double learning_rate = 1e-3;  // toy scale; 2e-5 is the full-size fine-tuning rate
  std::size_t batch_size = 4;   // targets per optimizer step
  std::size_t epochs = 10;
  double alpha = 0.1;
  double epsilon = 1e-12;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double clip_norm = 1.0;
  bool linear_decay = false;  // anneal the rate linearly to zero over all steps
  std::uint64_t shuffle_seed = 1;  // example order and dropout masks
  double divergence_threshold = 1e3;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double dev_accuracy = 0.0;
};

template <class Params>
struct TrainResult {
  Params best;
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_dev_accuracy = -1.0;
};

/// Mini-batch Adam over `train`, evaluating parent accuracy on `dev` after each
/// epoch and keeping the best-dev parameters (the last epoch when `dev` is
/// empty). Each epoch is appended to `log` as one JSON object per line.
///
/// Throws TrainingError when a batch's mean loss exceeds the divergence
/// threshold or becomes non-finite.
TrainResult<ModelParams> train_model(ModelParams init, std::span<const Example> train,
                                     std::span<const Example> dev, const TrainConfig& config,
                                     std::ostream* log = nullptr);

TrainResult<BaselineModel> train_baseline(BaselineModel init, std::span<const Example> train,
                                          std::span<const Example> dev,
                                          const TrainConfig& config,
                                          std::ostream* log = nullptr);

void write_epoch_record(std::ostream& out, const EpochRecord& record);

}  // namespace untangle
