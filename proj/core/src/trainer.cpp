#include "untangle/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "untangle/error.hpp"
#include "untangle/inference.hpp"
#include "untangle/model.hpp"
#include "untangle/optimizer.hpp"

namespace untangle {

namespace {

using StepFn = std::function<LossValues(const Example&, ParamSet&, std::mt19937_64&)>;
using AccuracyFn = std::function<double(std::span<const Example>)>;

// Trains `params` in place; `tensors` exposes the learnable ParamSet and the
// step/accuracy callbacks read `params` by reference.
template <class Params>
TrainResult<Params> run_training(Params& params, ParamSet& tensors,
                                 std::span<const Example> train,
                                 std::span<const Example> dev, const TrainConfig& config,
                                 const StepFn& step, const AccuracyFn& accuracy,
                                 std::ostream* log) {
  config.validate();
  if (train.empty()) {
    throw TrainingError("no training examples");
  }
  std::mt19937_64 order_rng(config.shuffle_seed);
  std::mt19937_64 dropout_rng(config.shuffle_seed ^ 0x9e3779b97f4a7c15ULL);
  const AdamConfig adam_config{config.learning_rate, config.beta1, config.beta2, 1e-8,
                               config.clip_norm};
  Adam adam(tensors, adam_config);
  ParamSet grads = tensors.zeros_like();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t steps_per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const double total_steps = static_cast<double>(steps_per_epoch * config.epochs);

  TrainResult<Params> result;
  result.best = params;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      grads.set_zero();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss += step(train[order[i]], grads, dropout_rng).total;
      }
      const auto count = static_cast<double>(end - start);
      batch_loss /= count;
      if (!std::isfinite(batch_loss) || batch_loss > config.divergence_threshold) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", step " << start / config.batch_size
            << ": mean loss " << batch_loss << " (first target "
            << train[order[start]].batch.target_index << ")";
        throw TrainingError(msg.str());
      }
      grads.scale(1.0 / count);
      if (config.linear_decay) {
        adam.set_learning_rate(config.learning_rate *
                               (1.0 - static_cast<double>(adam.steps()) / total_steps));
      }
      adam.step(tensors, grads);
      epoch_loss += batch_loss * count;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = epoch_loss / static_cast<double>(train.size());
    rec.dev_accuracy = dev.empty() ? 0.0 : accuracy(dev);
    result.log.push_back(rec);
    if (log != nullptr) {
      write_epoch_record(*log, rec);
      log->flush();
    }
    if (dev.empty() || rec.dev_accuracy > result.best_dev_accuracy) {
      result.best = params;
      result.best_epoch = epoch;
      result.best_dev_accuracy = rec.dev_accuracy;
    }
  }
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (alpha < 0.0) {
    throw TrainingError("alpha must be non-negative");
  }
  if (!(epsilon > 0.0)) {
    throw TrainingError("probability floor must be positive");
  }
  if (batch_size == 0) {
    throw TrainingError("batch size must be positive");
  }
  if (!(learning_rate > 0.0)) {
    throw TrainingError("learning rate must be positive");
  }
}

void write_epoch_record(std::ostream& out, const EpochRecord& r) {
  const auto flags = out.flags();
  out << "{\"epoch\": " << r.epoch << std::setprecision(6) << ", \"loss\": " << r.loss
      << ", \"dev_accuracy\": " << r.dev_accuracy << "}\n";
  out.flags(flags);
}

TrainResult<ModelParams> train_model(ModelParams init, std::span<const Example> train,
                                     std::span<const Example> dev, const TrainConfig& config,
                                     std::ostream* log) {
  const LossConfig loss{config.alpha, config.epsilon};
  ModelParams params = std::move(init);
  const StepFn step = [&](const Example& ex, ParamSet& grads, std::mt19937_64& rng) {
    return forward_backward(params, ex.batch, &ex.features, loss, &grads, &rng);
  };
  const AccuracyFn accuracy = [&](std::span<const Example> examples) {
    return parent_accuracy(ModelRanker(params), examples);
  };
  return run_training(params, params.tensors, train, dev, config, step, accuracy, log);
}

TrainResult<BaselineModel> train_baseline(BaselineModel init, std::span<const Example> train,
                                          std::span<const Example> dev,
                                          const TrainConfig& config, std::ostream* log) {
  const LossConfig loss{config.alpha, config.epsilon};
  BaselineModel params = std::move(init);
  const StepFn step = [&](const Example& ex, ParamSet& grads, std::mt19937_64&) {
    return baseline_forward_backward(params, ex.features, ex.batch, loss, &grads);
  };
  const AccuracyFn accuracy = [&](std::span<const Example> examples) {
    return parent_accuracy(BaselineRanker(params), examples);
  };
  return run_training(params, params.tensors, train, dev, config, step, accuracy, log);
}

}  // namespace untangle
