#include "ctnet/interface/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "ctnet/data/pipeline.hpp"
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

std::string fixed_cell(double v, int width) {
  char buf[64];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) {
    std::snprintf(buf, sizeof buf, "%*.4e", width, v);
  } else {
    std::snprintf(buf, sizeof buf, "%*.4f", width, v);
  }
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string centered(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  const std::size_t left = (width - s.size()) / 2;
  return std::string(left, ' ') + s + std::string(width - s.size() - left, ' ');
}

void render_block(std::ostringstream& out, const BenchmarkTable& table, bool normalized) {
  constexpr int kCol = 12;
  constexpr std::size_t kName = 18;
  const std::size_t block = 3 * (kCol + 1);
  out << pad("", kName);
  for (std::size_t w : table.windows) out << "|" << centered(std::to_string(w) + " input", block - 1);
  out << "\n" << pad("Model", kName);
  for (std::size_t i = 0; i < table.windows.size(); ++i) {
    out << "|";
    for (const char* h : {"MAE", "RMSE", "WAPE"}) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%*s ", kCol, h);
      out << buf;
    }
  }
  out << "\n" << std::string(kName + table.windows.size() * block, '-') << "\n";
  for (Architecture a : table.models) {
    out << pad(display_name(a), kName);
    for (std::size_t w : table.windows) {
      const BenchmarkCell& c = table.cell(a, w);
      out << "|";
      if (!c.ok()) {
        out << centered("failed", block - 1);
        continue;
      }
      const MetricsReport& m = normalized ? c.metrics->normalized : c.metrics->bps;
      out << fixed_cell(m.mae, kCol) << " " << fixed_cell(m.rmse, kCol) << " "
          << fixed_cell(m.wape, kCol) << " ";
    }
    out << "\n";
  }
}

}  // namespace

std::string display_name(Architecture architecture) {
  switch (architecture) {
    case Architecture::rnn: return "RNN";
    case Architecture::lstm: return "LSTM";
    case Architecture::gru: return "GRU";
    case Architecture::convlstmtransnet: return "ConvLSTMTransNet";
  }
  return "?";
}

const BenchmarkCell& BenchmarkTable::cell(Architecture architecture, std::size_t window) const {
  for (const BenchmarkCell& c : cells) {
    if (c.architecture == architecture && c.window == window) return c;
  }
  throw std::out_of_range("benchmark: no cell for " + to_string(architecture) + " window " +
                          std::to_string(window));
}

bool BenchmarkTable::complete() const {
  if (cells.size() != models.size() * windows.size()) return false;
  return std::all_of(cells.begin(), cells.end(), [](const BenchmarkCell& c) { return c.ok(); });
}

BenchmarkTable run_benchmark(const TimeSeries& series, const BenchmarkOptions& options,
                             const std::function<void(const BenchmarkCell&)>& on_cell) {
  if (options.windows.empty() || options.models.empty()) {
    throw ConfigError("benchmark: need at least one model and one window");
  }
  const std::size_t max_window = *std::max_element(options.windows.begin(), options.windows.end());
  const PreparedSeries data = prepare_series(series, options.config.train_fraction, max_window);

  BenchmarkTable table;
  table.windows = options.windows;
  table.models = options.models;
  table.metadata.seed = options.config.model.seed;
  table.metadata.config_json = run_config_json(options.config);
  table.metadata.dataset_sha256 = options.dataset_sha256;
  table.metadata.train_points = data.train.size();
  table.metadata.test_points = data.test.size();

  for (Architecture arch : options.models) {
    for (std::size_t window : options.windows) {
      BenchmarkCell cell;
      cell.architecture = arch;
      cell.window = window;
      try {
        ModelConfig mc = options.config.model;
        mc.architecture = arch;
        mc.window_length = window;
        Model model = build_model(mc);
        const TrainResult trained = train(model, data.train_windows(window), options.config.train);
        if (!trained.epoch_losses.empty()) cell.final_train_loss = trained.epoch_losses.back();
        cell.metrics = evaluate(model, data.test_windows(window), data.scaler);
      } catch (const std::exception& e) {
        cell.metrics.reset();
        cell.error = e.what();
      }
      table.cells.push_back(cell);
      if (on_cell) on_cell(table.cells.back());
    }
  }
  return table;
}

std::string render_benchmark_table(const BenchmarkTable& table) {
  std::ostringstream out;
  out << "Traffic units (bps); WAPE in percent\n";
  render_block(out, table, false);
  out << "\nNormalized [0,1] scaler space; WAPE in percent\n";
  render_block(out, table, true);
  for (const BenchmarkCell& c : table.cells) {
    if (!c.ok()) out << "\n" << display_name(c.architecture) << " @ " << c.window << ": " << c.error;
  }
  return out.str();
}

std::string benchmark_csv(const BenchmarkTable& table) {
  std::ostringstream out;
  out << "model,window,status,n,mae_bps,rmse_bps,wape_bps,mae_normalized,rmse_normalized,"
         "wape_normalized,final_train_loss\n";
  for (const BenchmarkCell& c : table.cells) {
    out << to_string(c.architecture) << "," << c.window << "," << (c.ok() ? "ok" : "failed");
    if (c.ok()) {
      const auto& b = c.metrics->bps;
      const auto& n = c.metrics->normalized;
      out << "," << b.n << "," << format_real(b.mae) << "," << format_real(b.rmse) << ","
          << format_real(b.wape) << "," << format_real(n.mae) << "," << format_real(n.rmse) << ","
          << format_real(n.wape) << "," << format_real(c.final_train_loss);
    } else {
      out << ",,,,,,,,";
    }
    out << "\n";
  }
  return out.str();
}

std::string benchmark_json(const BenchmarkTable& table) {
  json doc;
  json& meta = doc["metadata"];
  meta["seed"] = table.metadata.seed;
  meta["config"] = json::parse(table.metadata.config_json);
  meta["dataset_sha256"] = table.metadata.dataset_sha256;
  meta["train_points"] = table.metadata.train_points;
  meta["test_points"] = table.metadata.test_points;
  doc["windows"] = table.windows;
  doc["models"] = json::array();
  for (Architecture a : table.models) doc["models"].push_back(to_string(a));
  doc["rows"] = json::array();
  for (const BenchmarkCell& c : table.cells) {
    json row;
    row["model"] = to_string(c.architecture);
    row["window"] = c.window;
    row["status"] = c.ok() ? "ok" : "failed";
    if (c.ok()) {
      row["bps"] = metrics_json(c.metrics->bps);
      row["normalized"] = metrics_json(c.metrics->normalized);
      row["final_train_loss"] = c.final_train_loss;
    } else {
      row["error"] = c.error;
    }
    doc["rows"].push_back(row);
  }
  return doc.dump(2) + "\n";
}

}  // namespace ctnet
