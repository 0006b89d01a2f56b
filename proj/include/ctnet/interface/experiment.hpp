#pragma once

#include <iosfwd>
#include <string>

#include "ctnet/data/pipeline.hpp"
#include "ctnet/interface/run_config.hpp"
#include "ctnet/training/trainer.hpp"

namespace ctnet {

struct ExperimentResult {
  Model model;
  ScalerParams scaler;
  TrainResult training;
  EvaluationReport test;
};

/// Fill, split, scale, train on the train side and evaluate on the test side.
ExperimentResult run_experiment(const TimeSeries& series, const RunConfig& config);

/// Test-split metrics of an already trained model, using its own scaler.
EvaluationReport evaluate_on_series(const Model& model, const ScalerParams& scaler,
                                    const TimeSeries& series, double train_fraction);

/// Metrics in both spaces plus {seed, config, dataset_sha256} metadata.
std::string evaluation_json(const EvaluationReport& report, const RunConfig& config,
                            const std::string& dataset_sha256);
std::string evaluation_csv(const EvaluationReport& report);
std::string evaluation_table(const EvaluationReport& report);

/// CSV `timestamp,actual_bps,predicted_bps`, one row per test-span target.
/// `test_series` holds bps values; the actual column repeats them verbatim.
void write_predictions_csv(std::ostream& out, const Model& model, const TimeSeries& test_series,
                           const ScalerParams& scaler);
void export_predictions(const Model& model, const TimeSeries& test_series,
                        const ScalerParams& scaler, const std::string& path);

}  // namespace ctnet
