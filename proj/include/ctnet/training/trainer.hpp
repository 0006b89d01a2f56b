#pragma once

#include <iosfwd>
#include <vector>

#include "ctnet/data/scaler.hpp"
#include "ctnet/data/windows.hpp"
#include "ctnet/interface/metrics.hpp"
#include "ctnet/models/model.hpp"
#include "ctnet/training/adam.hpp"

namespace ctnet {

struct TrainResult {
  std::vector<double> epoch_losses;  // mean training loss per epoch
  AdamState optimizer;
};

/// Mini-batch Adam training with dropout active. Windows are shuffled as
/// whole pairs (never inside a window) with a generator seeded from
/// `cfg.seed`, which also drives dropout. Deterministic for fixed
/// (model seed, cfg, data).
TrainResult train(Model& model, const WindowedDataset& dataset, const TrainConfig& cfg);

/// Loss history as CSV `epoch,mean_train_loss`, epochs numbered from 1.
void write_loss_history_csv(std::ostream& out, const std::vector<double>& epoch_losses);

/// Eval-mode predictions [N, 1] computed in chunks of `batch_size` windows.
Tensor predict_dataset(const Model& model, const WindowedDataset& dataset,
                       std::size_t batch_size = 256);

struct EvaluationReport {
  MetricsReport bps;         // inverse-scaled to traffic units
  MetricsReport normalized;  // in [0,1] scaler space
};

EvaluationReport evaluate(const Model& model, const WindowedDataset& dataset,
                          const ScalerParams& scaler, std::size_t batch_size = 256);

/// Metrics on inverse-scaled predictions and targets.
MetricsReport evaluate_model(const Model& model, const WindowedDataset& dataset,
                             const ScalerParams& scaler, std::size_t batch_size = 256);

}  // namespace ctnet
