#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ctnet/data/pipeline.hpp"
#include "ctnet/data/synth.hpp"
#include "ctnet/interface/benchmark.hpp"
#include "ctnet/interface/cli.hpp"
#include "ctnet/interface/digest.hpp"
#include "ctnet/interface/experiment.hpp"
#include "ctnet/interface/metrics.hpp"
#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/rng.hpp"

using namespace ctnet;
namespace fs = std::filesystem;

namespace {

struct NaiveMetrics {
  double mae, rmse, wape;
};

// Straight loops over the defining sums, sharing nothing with compute_metrics.
NaiveMetrics naive_metrics(const std::vector<double>& p, const std::vector<double>& o) {
  long double abs_total = 0, sq_total = 0, denom = 0;
  for (std::size_t i = 0; i < p.size(); i++) {
    long double d = (long double)p[i] - (long double)o[i];
    abs_total += d < 0 ? -d : d;
    sq_total += d * d;
    denom += o[i] < 0 ? -(long double)o[i] : (long double)o[i];
  }
  const long double n = (long double)p.size();
  return {double(abs_total / n), double(std::sqrt(sq_total / n)), double(abs_total / denom * 100)};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ctnet_interface_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  args.insert(args.begin(), "ctnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TimeSeries short_series(std::size_t days = 3, std::uint64_t seed = 4) {
  SynthOptions opt;
  opt.days = days;
  opt.samples_per_day = 48;
  opt.seed = seed;
  return synth_generate(opt);
}

BenchmarkOptions tiny_benchmark() {
  BenchmarkOptions opt;
  opt.config.model.conv_filters = 4;
  opt.config.model.recurrent_units = 4;
  opt.config.model.heads = 2;
  opt.config.model.d_ff = 8;
  opt.config.train.epochs = 2;
  return opt;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

// ---- metrics ----

TEST(Metrics, HandCase) {
  const std::vector<double> p{1, 2, 3}, o{2, 2, 4};
  const MetricsReport r = compute_metrics(p, o);
  EXPECT_NEAR(r.mae, 0.6667, 1e-4);
  EXPECT_NEAR(r.rmse, 0.8165, 1e-4);
  EXPECT_NEAR(r.wape, 25.0, 1e-4);
  EXPECT_EQ(r.n, 3u);
  const MetricsReport zero = compute_metrics(o, o);
  EXPECT_EQ(zero.mae, 0.0);
  EXPECT_EQ(zero.rmse, 0.0);
  EXPECT_EQ(zero.wape, 0.0);
}

TEST(Metrics, Errors) {
  const std::vector<double> a{1, 2}, b{1}, zeros{0, 0};
  EXPECT_THROW(compute_metrics(a, b), DataError);
  EXPECT_THROW(compute_metrics(std::vector<double>{}, std::vector<double>{}), DataError);
  EXPECT_THROW(compute_metrics(a, zeros), DataError);
}

TEST(Metrics, MatchesNaiveImplementationOnRandomInstances) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    const double scale = std::pow(10.0, rng.uniform(-3, 10));
    std::vector<double> p(n), o(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform(-0.2, 1.2) * scale;
      o[i] = rng.uniform(0.01, 1.0) * scale;
    }
    const MetricsReport r = compute_metrics(p, o);
    const NaiveMetrics ref = naive_metrics(p, o);
    EXPECT_LE(std::abs(r.mae - ref.mae), 1e-12 * std::max(1.0, ref.mae));
    EXPECT_LE(std::abs(r.rmse - ref.rmse), 1e-12 * std::max(1.0, ref.rmse));
    EXPECT_LE(std::abs(r.wape - ref.wape), 1e-12 * std::max(1.0, ref.wape));
    EXPECT_GE(r.rmse, r.mae * (1 - 1e-15));
  }
}

TEST(Metrics, WapeInvariantUnderUniformScaling) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(50), o(50), ps(50), os(50);
    for (std::size_t i = 0; i < 50; ++i) {
      p[i] = rng.uniform(0, 1);
      o[i] = rng.uniform(0.1, 1);
      ps[i] = 7.3 * p[i];
      os[i] = 7.3 * o[i];
    }
    EXPECT_NEAR(compute_metrics(ps, os).wape, compute_metrics(p, o).wape, 1e-12);
  }
}

// ---- config and digest ----

TEST(RunConfig, ParsesOverridesAndRejectsUnknownKeys) {
  const RunConfig c = parse_run_config(
      R"({"architecture": "lstm", "epochs": 3, "seed": 9, "learning_rate": 0.01, "conv_padding": "valid"})");
  EXPECT_EQ(c.model.architecture, Architecture::lstm);
  EXPECT_EQ(c.train.epochs, 3u);
  EXPECT_EQ(c.model.seed, 9u);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.train.learning_rate, 0.01);
  EXPECT_EQ(c.model.conv_padding, Padding::valid);
  EXPECT_THROW(parse_run_config(R"({"epoch": 3})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"epochs": -3})"), ConfigError);
  EXPECT_THROW(parse_run_config("[1]"), ConfigError);

  const RunConfig round = parse_run_config(run_config_json(c));
  EXPECT_EQ(run_config_json(round), run_config_json(c));
}

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// ---- benchmark ----

TEST(Benchmark, CompleteGridInTableLayout) {
  const BenchmarkTable table = run_benchmark(short_series(), tiny_benchmark());
  EXPECT_TRUE(table.complete());
  EXPECT_EQ(table.cells.size(), 8u);
  for (Architecture a : all_architectures()) {
    for (std::size_t w : {6, 12}) {
      const BenchmarkCell& c = table.cell(a, w);
      ASSERT_TRUE(c.ok()) << c.error;
      EXPECT_EQ(c.metrics->bps.n, table.metadata.test_points - w);
    }
  }
  const std::string text = render_benchmark_table(table);
  EXPECT_NE(text.find("6 input"), std::string::npos);
  EXPECT_NE(text.find("12 input"), std::string::npos);
  EXPECT_LT(text.find("6 input"), text.find("12 input"));
  for (const char* name : {"RNN", "LSTM", "GRU", "ConvLSTMTransNet", "MAE", "RMSE", "WAPE"}) {
    EXPECT_NE(text.find(name), std::string::npos) << name;
  }

  std::istringstream csv(benchmark_csv(table));
  std::string line;
  std::size_t rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 8u);

  const auto doc = nlohmann::json::parse(benchmark_json(table));
  EXPECT_EQ(doc["rows"].size(), 8u);
  EXPECT_TRUE(doc["metadata"].contains("seed"));
  EXPECT_TRUE(doc["metadata"].contains("config"));
  EXPECT_TRUE(doc["metadata"].contains("dataset_sha256"));
}

TEST(Benchmark, DeterministicForSameSeed) {
  const TimeSeries s = short_series();
  EXPECT_EQ(benchmark_json(run_benchmark(s, tiny_benchmark())),
            benchmark_json(run_benchmark(s, tiny_benchmark())));
}

TEST(Benchmark, FailedCellDoesNotAbortGrid) {
  BenchmarkOptions opt = tiny_benchmark();
  opt.config.model.conv_padding = Padding::valid;
  opt.windows = {2, 6};
  const BenchmarkTable table = run_benchmark(short_series(), opt);
  EXPECT_EQ(table.cells.size(), 8u);
  EXPECT_FALSE(table.complete());
  EXPECT_FALSE(table.cell(Architecture::convlstmtransnet, 2).ok());
  EXPECT_FALSE(table.cell(Architecture::convlstmtransnet, 2).error.empty());
  EXPECT_TRUE(table.cell(Architecture::convlstmtransnet, 6).ok());
  EXPECT_TRUE(table.cell(Architecture::rnn, 2).ok());
  EXPECT_NE(render_benchmark_table(table).find("failed"), std::string::npos);
}

// ---- prediction export ----

TEST(ExportPredictions, RowsHeaderAndActualColumn) {
  RunConfig cfg;
  cfg.model.architecture = Architecture::gru;
  cfg.model.recurrent_units = 4;
  cfg.train.epochs = 1;
  const TimeSeries series = short_series();
  const ExperimentResult r = run_experiment(series, cfg);
  const PreparedSeries data = prepare_series(series, 0.8, 6, r.scaler);

  const fs::path dir = scratch_dir("export");
  export_predictions(r.model, data.test, r.scaler, (dir / "p.csv").string());
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "timestamp,actual_bps,predicted_bps");
  const std::vector<double> actual = data.test.dense_values();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string ts, a, p;
    std::getline(fields, ts, ',');
    std::getline(fields, a, ',');
    std::getline(fields, p, ',');
    EXPECT_EQ(std::stoll(ts), data.test.timestamps[row + 6]);
    EXPECT_EQ(std::stod(a), actual[row + 6]);
    ++row;
  }
  EXPECT_EQ(row, data.test.size() - 6);
  fs::remove_all(dir);
}

// ---- command line ----

TEST(Cli, SynthWritesExpectedRows) {
  const fs::path dir = scratch_dir("synth");
  EXPECT_EQ(run_cli({"synth", "--days", "29", "--seed", "1", "--output", (dir / "s.csv").string()}), 0);
  EXPECT_EQ(count_lines(dir / "s.csv"), 8353u);
  fs::remove_all(dir);
}

TEST(Cli, UsageErrorsExitOneWithoutFiles) {
  const fs::path dir = scratch_dir("usage");
  std::string err;
  EXPECT_EQ(run_cli({"synth", "--days", "2", "--bogus", "--output", (dir / "s.csv").string()},
                    nullptr, &err),
            1);
  EXPECT_FALSE(err.empty());
  EXPECT_FALSE(fs::exists(dir / "s.csv"));
  EXPECT_EQ(run_cli({"frobnicate"}), 1);
  EXPECT_EQ(run_cli({}), 1);
  EXPECT_EQ(run_cli({"benchmark", "--data", "x.csv", "--format", "xml"}), 1);
  EXPECT_EQ(run_cli({"--help"}), 0);
  EXPECT_TRUE(fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST(Cli, DataErrorsExitTwo) {
  const fs::path dir = scratch_dir("data_error");
  std::ofstream(dir / "bad.csv") << "timestamp,bps\n0,notanumber\n";
  EXPECT_EQ(run_cli({"train", "--data", (dir / "bad.csv").string(), "--output",
                     (dir / "c.json").string()}),
            2);
  EXPECT_EQ(run_cli({"train", "--data", (dir / "missing.csv").string(), "--output",
                     (dir / "c.json").string()}),
            2);
  fs::remove_all(dir);
}

TEST(Cli, IngestCounters) {
  const fs::path dir = scratch_dir("ingest");
  std::ofstream(dir / "t.json") << R"([{"ts": 0, "octets": 0}, {"ts": 300, "octets": 3750000000},
                                       {"ts": 600, "octets": 7500000000}])";
  ASSERT_EQ(run_cli({"ingest", "--input", (dir / "t.json").string(), "--output",
                     (dir / "s.csv").string()}),
            0);
  const TimeSeries s = read_series_csv_file((dir / "s.csv").string());
  EXPECT_EQ(s.dense_values(), (std::vector<double>{1e8, 1e8}));
  ASSERT_EQ(run_cli({"ingest", "--input", (dir / "t.json").string(), "--output",
                     (dir / "raw.csv").string(), "--no-interval-divide"}),
            0);
  EXPECT_EQ(read_series_csv_file((dir / "raw.csv").string()).dense_values(),
            (std::vector<double>{3e10, 3e10}));
  fs::remove_all(dir);
}

TEST(Cli, TrainEvaluatePredictBenchmarkRoundTrip) {
  const fs::path dir = scratch_dir("flow");
  const std::string data = (dir / "s.csv").string();
  write_series_csv_file(data, short_series());
  std::ofstream(dir / "cfg.json") << R"({"recurrent_units": 4, "conv_filters": 4, "heads": 2,
                                         "d_ff": 8, "epochs": 1})";
  const std::string cfg = (dir / "cfg.json").string();
  const std::string ckpt = (dir / "c.json").string();

  std::string train_out, eval_out;
  ASSERT_EQ(run_cli({"train", "--data", data, "--model", "lstm", "--window", "6", "--config", cfg,
                     "--output", ckpt, "--format", "json"},
                    &train_out),
            0);
  ASSERT_EQ(run_cli({"evaluate", "--data", data, "--checkpoint", ckpt, "--config", cfg, "--format",
                     "json"},
                    &eval_out),
            0);
  const auto t = nlohmann::json::parse(train_out), e = nlohmann::json::parse(eval_out);
  EXPECT_EQ(t["bps"], e["bps"]);
  EXPECT_EQ(t["normalized"], e["normalized"]);
  EXPECT_EQ(e["metadata"]["dataset_sha256"], sha256_file(data));

  ASSERT_EQ(run_cli({"predict", "--data", data, "--checkpoint", ckpt, "--output",
                     (dir / "p.csv").string()}),
            0);
  EXPECT_EQ(count_lines(dir / "p.csv"), 1u + e["bps"]["n"].get<std::size_t>());

  std::string fgsm_out;
  ASSERT_EQ(run_cli({"fgsm", "--data", data, "--checkpoint", ckpt, "--epsilon", "0.01", "--format",
                     "json"},
                    &fgsm_out),
            0);
  EXPECT_TRUE(nlohmann::json::parse(fgsm_out).contains("fgsm"));

  std::string bench_out;
  ASSERT_EQ(run_cli({"benchmark", "--data", data, "--windows", "6,12", "--config", cfg, "--format",
                     "csv"},
                    &bench_out),
            0);
  std::istringstream rows(bench_out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(rows, line)) ++n;
  EXPECT_EQ(n, 9u);
  fs::remove_all(dir);
}

TEST(Cli, GradcheckPasses) {
  std::string out;
  EXPECT_EQ(run_cli({"gradcheck", "--format", "csv"}, &out), 0);
  EXPECT_NE(out.find("convlstmtransnet"), std::string::npos);
  EXPECT_EQ(out.find("false"), std::string::npos);
}
