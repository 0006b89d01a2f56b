#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctnet/data/series.hpp"
#include "ctnet/interface/run_config.hpp"
#include "ctnet/training/trainer.hpp"

namespace ctnet {

struct BenchmarkOptions {
  std::vector<std::size_t> windows{6, 12};
  std::vector<Architecture> models = all_architectures();
  /// Architecture and window length are overridden per cell.
  RunConfig config;
  std::string dataset_sha256;  // recorded in the metadata only
};

/// One (model, window) run. A failed cell keeps its error message and has
/// no metrics.
struct BenchmarkCell {
  Architecture architecture = Architecture::rnn;
  std::size_t window = 0;
  std::optional<EvaluationReport> metrics;
  std::string error;
  double final_train_loss = 0.0;
  bool ok() const { return metrics.has_value(); }
};

struct BenchmarkMetadata {
  std::uint64_t seed = 0;
  std::string config_json;
  std::string dataset_sha256;
  std::size_t train_points = 0;
  std::size_t test_points = 0;
};

struct BenchmarkTable {
  BenchmarkMetadata metadata;
  std::vector<std::size_t> windows;
  std::vector<Architecture> models;
  std::vector<BenchmarkCell> cells;  // model-major, windows in order

  const BenchmarkCell& cell(Architecture architecture, std::size_t window) const;
  bool complete() const;
};

/// For each (model, window): fresh seeded build, training on the
/// chronological train split, evaluation on the test split. Errors inside a
/// cell mark that cell failed and the grid continues. `on_cell` is invoked
/// after every cell.
BenchmarkTable run_benchmark(const TimeSeries& series, const BenchmarkOptions& options,
                             const std::function<void(const BenchmarkCell&)>& on_cell = {});

/// Model rows against "<L> input" column blocks of MAE, RMSE and WAPE.
std::string render_benchmark_table(const BenchmarkTable& table);
std::string benchmark_csv(const BenchmarkTable& table);
std::string benchmark_json(const BenchmarkTable& table);

/// Display name used in tables, e.g. "ConvLSTMTransNet".
std::string display_name(Architecture architecture);

}  // namespace ctnet
