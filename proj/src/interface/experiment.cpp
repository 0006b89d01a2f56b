#include "ctnet/interface/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

using json = nlohmann::ordered_json;

namespace {

json metrics_json(const MetricsReport& m) {
  json out;
  out["mae"] = m.mae;
  out["rmse"] = m.rmse;
  out["wape"] = m.wape;
  out["n"] = m.n;
  return out;
}

}  // namespace

ExperimentResult run_experiment(const TimeSeries& series, const RunConfig& config) {
  config.model.validate();
  config.train.validate();
  const std::size_t L = config.model.window_length;
  const PreparedSeries data = prepare_series(series, config.train_fraction, L);
  ExperimentResult result{build_model(config.model), data.scaler, {}, {}};
  result.training = train(result.model, data.train_windows(L), config.train);
  result.test = evaluate(result.model, data.test_windows(L), data.scaler);
  return result;
}

EvaluationReport evaluate_on_series(const Model& model, const ScalerParams& scaler,
                                    const TimeSeries& series, double train_fraction) {
  const std::size_t L = model.config().window_length;
  const PreparedSeries data = prepare_series(series, train_fraction, L, scaler);
  return evaluate(model, data.test_windows(L), scaler);
}

std::string evaluation_json(const EvaluationReport& report, const RunConfig& config,
                            const std::string& dataset_sha256) {
  json doc;
  doc["metadata"]["seed"] = config.model.seed;
  doc["metadata"]["config"] = json::parse(run_config_json(config));
  doc["metadata"]["dataset_sha256"] = dataset_sha256;
  doc["bps"] = metrics_json(report.bps);
  doc["normalized"] = metrics_json(report.normalized);
  return doc.dump(2) + "\n";
}

std::string evaluation_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "space,n,mae,rmse,wape\n";
  for (const auto& [space, m] : {std::pair{"bps", report.bps}, {"normalized", report.normalized}}) {
    out << space << "," << m.n << "," << format_real(m.mae) << "," << format_real(m.rmse) << ","
        << format_real(m.wape) << "\n";
  }
  return out.str();
}

std::string evaluation_table(const EvaluationReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %8s %16s %16s %10s\n", "space", "n", "MAE", "RMSE",
                "WAPE(%)");
  out << line;
  for (const auto& [space, m] : {std::pair{"bps", report.bps}, {"normalized", report.normalized}}) {
    std::snprintf(line, sizeof line, "%-12s %8zu %16.6g %16.6g %10.4f\n", space, m.n, m.mae,
                  m.rmse, m.wape);
    out << line;
  }
  return out.str();
}

void write_predictions_csv(std::ostream& out, const Model& model, const TimeSeries& test_series,
                           const ScalerParams& scaler) {
  const std::size_t L = model.config().window_length;
  const std::vector<double> actual = test_series.dense_values();
  const WindowedDataset ds = make_windows(transform(actual, scaler), L, test_series.timestamps);
  const std::vector<double> predicted = inverse(predict_dataset(model, ds).data(), scaler);
  out << "timestamp,actual_bps,predicted_bps\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.target_timestamps[i] << "," << format_real(actual[i + L]) << ","
        << format_real(predicted[i]) << "\n";
  }
}

void export_predictions(const Model& model, const TimeSeries& test_series,
                        const ScalerParams& scaler, const std::string& path) {
  std::ostringstream buf;
  write_predictions_csv(buf, model, test_series, scaler);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write predictions '" + path + "'");
  out << buf.str();
  if (!out) throw DataError("write failed for predictions '" + path + "'");
}

}  // namespace ctnet
