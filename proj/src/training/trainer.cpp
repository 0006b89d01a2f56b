#include "ctnet/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "ctnet/data/series.hpp"
#include "ctnet/numerics/errors.hpp"
#include "ctnet/training/loss.hpp"

namespace ctnet {

namespace {

void check_dataset(const Model& model, const WindowedDataset& dataset) {
  if (dataset.size() == 0) throw DataError("dataset is empty");
  if (dataset.window_length != model.config().window_length) {
    throw DataError("dataset window " + std::to_string(dataset.window_length) +
                    " does not match model window " +
                    std::to_string(model.config().window_length));
  }
}

}  // namespace

TrainResult train(Model& model, const WindowedDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  if (cfg.epochs == 0) return result;
  check_dataset(model, dataset);

  Rng rng(cfg.seed);
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::vector<NamedParam> params = model.parameters();
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    double weighted_loss = 0.0;
    for (std::size_t first = 0; first < n; first += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - first);
      const WindowedDataset batch =
          dataset.gather(std::span<const std::size_t>(order).subspan(first, count));
      Model::Trace trace;
      const Tensor pred = model.forward(batch.inputs, trace, ForwardMode{true, &rng});
      const LossResult loss = mse_loss(pred, batch.targets);
      if (!std::isfinite(loss.value)) {
        throw NumericError("training diverged: non-finite loss in epoch " +
                           std::to_string(epoch + 1));
      }
      const ModelGradients grads = model.backward(trace, loss.gradient);
      adam_step(params, grads.params, result.optimizer, cfg);
      weighted_loss += loss.value * static_cast<double>(count);
    }
    const double mean_loss = weighted_loss / static_cast<double>(n);
    result.epoch_losses.push_back(mean_loss);
    if (cfg.patience > 0) {
      if (mean_loss < best) {
        best = mean_loss;
        stale = 0;
      } else if (++stale >= cfg.patience) {
        break;
      }
    }
  }
  return result;
}

void write_loss_history_csv(std::ostream& out, const std::vector<double>& epoch_losses) {
  out << "epoch,mean_train_loss\n";
  for (std::size_t i = 0; i < epoch_losses.size(); ++i) {
    out << (i + 1) << ',' << format_real(epoch_losses[i]) << '\n';
  }
}

Tensor predict_dataset(const Model& model, const WindowedDataset& dataset,
                       std::size_t batch_size) {
  check_dataset(model, dataset);
  if (batch_size == 0) throw ConfigError("prediction batch size must be positive");
  const std::size_t n = dataset.size();
  Tensor out({n, 1});
  for (std::size_t first = 0; first < n; first += batch_size) {
    const std::size_t count = std::min(batch_size, n - first);
    const Tensor pred = model.predict(dataset.slice(first, count).inputs);
    std::copy_n(pred.raw(), count, out.raw() + first);
  }
  return out;
}

EvaluationReport evaluate(const Model& model, const WindowedDataset& dataset,
                          const ScalerParams& scaler, std::size_t batch_size) {
  const Tensor pred = predict_dataset(model, dataset, batch_size);
  EvaluationReport report;
  report.normalized = compute_metrics(pred.data(), dataset.targets.data());
  const std::vector<double> pred_bps = inverse(pred.data(), scaler);
  const std::vector<double> actual_bps = inverse(dataset.targets.data(), scaler);
  report.bps = compute_metrics(pred_bps, actual_bps);
  return report;
}

MetricsReport evaluate_model(const Model& model, const WindowedDataset& dataset,
                             const ScalerParams& scaler, std::size_t batch_size) {
  const Tensor pred = predict_dataset(model, dataset, batch_size);
  return compute_metrics(inverse(pred.data(), scaler), inverse(dataset.targets.data(), scaler));
}

}  // namespace ctnet
