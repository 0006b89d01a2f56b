#include "ctnet/interface/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "ctnet/data/synth.hpp"
#include "ctnet/data/telemetry.hpp"
#include "ctnet/interface/benchmark.hpp"
#include "ctnet/interface/digest.hpp"
#include "ctnet/interface/experiment.hpp"
#include "ctnet/interface/gradient_suite.hpp"
#include "ctnet/models/checkpoint.hpp"
#include "ctnet/models/fgsm.hpp"
#include "ctnet/numerics/errors.hpp"

namespace ctnet {

namespace {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> window;
  std::optional<std::string> model;
  std::optional<std::size_t> epochs;
  std::string config_path;
  std::string format = "table";
};

const std::vector<std::string> kModelNames{"rnn", "lstm", "gru", "convlstmtransnet"};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--seed", o.seed, "Seed for initialization, shuffling and dropout");
  sub->add_option("--window", o.window, "Sliding window length L")->check(CLI::PositiveNumber);
  sub->add_option("--model", o.model, "Architecture")->check(CLI::IsMember(kModelNames));
  sub->add_option("--config", o.config_path, "JSON file overriding model/training settings");
  sub->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "table"}));
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig c;
  if (!o.config_path.empty()) c = read_run_config_file(o.config_path);
  if (o.seed) c.model.seed = c.train.seed = *o.seed;
  if (o.window) c.model.window_length = *o.window;
  if (o.model) c.model.architecture = parse_architecture(*o.model);
  if (o.epochs) c.train.epochs = *o.epochs;
  c.model.validate();
  c.train.validate();
  return c;
}

/// A checkpoint-driven command may repeat --model/--window, but only to confirm.
void check_matches_checkpoint(const CommonOptions& o, const ModelConfig& ckpt) {
  if (o.window && *o.window != ckpt.window_length) {
    throw ConfigError("--window " + std::to_string(*o.window) + " differs from checkpoint window " +
                      std::to_string(ckpt.window_length));
  }
  if (o.model && parse_architecture(*o.model) != ckpt.architecture) {
    throw ConfigError("--model " + *o.model + " differs from checkpoint architecture " +
                      to_string(ckpt.architecture));
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << text;
  if (!f) throw DataError("write failed for '" + path + "'");
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::string format_evaluation(const EvaluationReport& r, const RunConfig& c,
                              const std::string& sha, const std::string& format) {
  if (format == "json") return evaluation_json(r, c, sha);
  if (format == "csv") return evaluation_csv(r);
  return evaluation_table(r);
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic forecasting with ConvLSTMTransNet and recurrent baselines", "ctnet"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_in, ingest_out;
  CounterOptions counter_opt;
  bool no_divide = false;
  auto* ingest = app.add_subcommand("ingest", "Convert telemetry JSON into a bps series CSV");
  ingest->add_option("--input", ingest_in, "Telemetry JSON document")->required();
  ingest->add_option("--output", ingest_out, "Series CSV to write")->required();
  ingest->add_option("--interval", counter_opt.interval_seconds, "Nominal polling interval (s)")
      ->check(CLI::PositiveNumber);
  ingest->add_flag("--no-interval-divide", no_divide, "Report bits per interval, not per second");
  ingest->add_option("--counter-bits", counter_opt.counter_bits, "Counter width for wrap-around")
      ->check(CLI::IsMember({32u, 64u}));

  // synth
  SynthOptions synth_opt;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic traffic series");
  synth->add_option("--days", synth_opt.days, "Number of days")->check(CLI::PositiveNumber);
  synth->add_option("--samples-per-day", synth_opt.samples_per_day, "Samples per day")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_opt.seed, "Generator seed");
  synth->add_option("--capacity", synth_opt.capacity_bps, "Interface capacity (bps)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--start", synth_opt.start_timestamp, "First timestamp (epoch seconds)");
  synth->add_option("--output", synth_out, "Series CSV to write")->required();

  // train
  CommonOptions train_c;
  std::string train_data, train_ckpt, train_losses, train_preds, train_report;
  auto* train_cmd = app.add_subcommand("train", "Train one model and evaluate on the test split");
  add_common(train_cmd, train_c);
  train_cmd->add_option("--epochs", train_c.epochs, "Training epochs");
  train_cmd->add_option("--data", train_data, "Series CSV")->required();
  train_cmd->add_option("--output", train_ckpt, "Checkpoint to write")->required();
  train_cmd->add_option("--loss-history", train_losses, "Write epoch,mean_train_loss CSV");
  train_cmd->add_option("--predictions", train_preds, "Write test-span predictions CSV");
  train_cmd->add_option("--report", train_report, "Write the metrics report here");

  // evaluate
  CommonOptions eval_c;
  std::string eval_data, eval_ckpt, eval_report;
  auto* eval_cmd = app.add_subcommand("evaluate", "Test-split metrics of a checkpoint");
  add_common(eval_cmd, eval_c);
  eval_cmd->add_option("--data", eval_data, "Series CSV")->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--output", eval_report, "Write the metrics report here");

  // predict
  CommonOptions pred_c;
  std::string pred_data, pred_ckpt, pred_out;
  auto* pred_cmd = app.add_subcommand("predict", "Export test-span predictions as CSV");
  add_common(pred_cmd, pred_c);
  pred_cmd->add_option("--data", pred_data, "Series CSV")->required();
  pred_cmd->add_option("--checkpoint", pred_ckpt, "Checkpoint file")->required();
  pred_cmd->add_option("--output", pred_out, "Predictions CSV to write")->required();

  // benchmark
  CommonOptions bench_c;
  std::string bench_data, bench_out;
  std::vector<std::size_t> bench_windows{6, 12};
  std::vector<std::string> bench_models = kModelNames;
  auto* bench_cmd = app.add_subcommand("benchmark", "Train and evaluate the model x window grid");
  add_common(bench_cmd, bench_c);
  bench_cmd->add_option("--epochs", bench_c.epochs, "Training epochs per cell");
  bench_cmd->add_option("--data", bench_data, "Series CSV")->required();
  bench_cmd->add_option("--windows", bench_windows, "Window lengths, comma separated")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--models", bench_models, "Architectures, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember(kModelNames));
  bench_cmd->add_option("--output", bench_out, "Write the table here instead of stdout");

  // gradcheck
  CommonOptions grad_c;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every layer");
  add_common(grad_cmd, grad_c);

  // fgsm
  CommonOptions fgsm_c;
  std::string fgsm_data, fgsm_ckpt, fgsm_out;
  double epsilon = 0.01;
  auto* fgsm_cmd = app.add_subcommand("fgsm", "Test-split metrics under FGSM perturbation");
  add_common(fgsm_cmd, fgsm_c);
  fgsm_cmd->add_option("--data", fgsm_data, "Series CSV")->required();
  fgsm_cmd->add_option("--checkpoint", fgsm_ckpt, "Checkpoint file")->required();
  fgsm_cmd->add_option("--epsilon", epsilon, "Perturbation size in normalized units")
      ->check(CLI::NonNegativeNumber);
  fgsm_cmd->add_option("--output", fgsm_out, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      counter_opt.divide_by_interval = !no_divide;
      const TimeSeries s = telemetry_to_series(read_telemetry_file(ingest_in), counter_opt);
      write_series_csv_file(ingest_out, s);
      std::size_t missing = 0;
      for (const auto& v : s.values) missing += !v.has_value();
      err << "ingest: " << s.size() << " points, " << missing << " missing\n";
    } else if (synth->parsed()) {
      const TimeSeries s = synth_generate(synth_opt);
      write_series_csv_file(synth_out, s);
      err << "synth: " << s.size() << " points\n";
    } else if (train_cmd->parsed()) {
      const RunConfig cfg = resolve_config(train_c);
      const TimeSeries series = read_series_csv_file(train_data);
      const std::string sha = sha256_file(train_data);
      const ExperimentResult r = run_experiment(series, cfg);
      save_checkpoint(r.model, r.scaler, train_ckpt);
      if (!train_losses.empty()) {
        std::ostringstream csv;
        write_loss_history_csv(csv, r.training.epoch_losses);
        write_text(train_losses, csv.str());
      }
      if (!train_preds.empty()) {
        const PreparedSeries data =
            prepare_series(series, cfg.train_fraction, cfg.model.window_length, r.scaler);
        export_predictions(r.model, data.test, r.scaler, train_preds);
      }
      emit(out, train_report, format_evaluation(r.test, cfg, sha, train_c.format));
    } else if (eval_cmd->parsed() || fgsm_cmd->parsed() || pred_cmd->parsed()) {
      const bool is_eval = eval_cmd->parsed(), is_fgsm = fgsm_cmd->parsed();
      const CommonOptions& c = is_eval ? eval_c : (is_fgsm ? fgsm_c : pred_c);
      const std::string& data_path = is_eval ? eval_data : (is_fgsm ? fgsm_data : pred_data);
      const std::string& ckpt_path = is_eval ? eval_ckpt : (is_fgsm ? fgsm_ckpt : pred_ckpt);
      RunConfig cfg = resolve_config(c);
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      check_matches_checkpoint(c, ckpt.model.config());
      cfg.model = ckpt.model.config();
      const TimeSeries series = read_series_csv_file(data_path);
      const std::size_t L = cfg.model.window_length;
      const PreparedSeries data = prepare_series(series, cfg.train_fraction, L, ckpt.scaler);
      if (pred_cmd->parsed()) {
        export_predictions(ckpt.model, data.test, ckpt.scaler, pred_out);
      } else if (is_eval) {
        const EvaluationReport r = evaluate(ckpt.model, data.test_windows(L), ckpt.scaler);
        emit(out, eval_report, format_evaluation(r, cfg, sha256_file(data_path), c.format));
      } else {
        WindowedDataset test = data.test_windows(L);
        const EvaluationReport clean = evaluate(ckpt.model, test, ckpt.scaler);
        test.inputs = fgsm_perturb(ckpt.model, test.inputs, test.targets, epsilon);
        const EvaluationReport adv = evaluate(ckpt.model, test, ckpt.scaler);
        std::string text;
        if (c.format == "json") {
          const std::string sha = sha256_file(data_path);
          auto doc = nlohmann::ordered_json::parse(evaluation_json(clean, cfg, sha));
          doc["epsilon"] = epsilon;
          doc["fgsm"] = nlohmann::ordered_json::parse(evaluation_json(adv, cfg, sha));
          doc["fgsm"].erase("metadata");
          text = doc.dump(2) + "\n";
        } else if (c.format == "csv") {
          std::istringstream a(evaluation_csv(clean)), b(evaluation_csv(adv));
          std::string line;
          std::getline(a, line);
          text = "condition," + line + "\n";
          while (std::getline(a, line)) text += "clean," + line + "\n";
          std::getline(b, line);
          while (std::getline(b, line)) text += "fgsm," + line + "\n";
        } else {
          text = "clean\n" + evaluation_table(clean) + "\nfgsm epsilon=" + format_real(epsilon) +
                 "\n" + evaluation_table(adv);
        }
        emit(out, fgsm_out, text);
      }
    } else if (bench_cmd->parsed()) {
      BenchmarkOptions opt;
      opt.config = resolve_config(bench_c);
      opt.windows = bench_windows;
      opt.models.clear();
      for (const auto& m : bench_models) opt.models.push_back(parse_architecture(m));
      opt.dataset_sha256 = sha256_file(bench_data);
      const TimeSeries series = read_series_csv_file(bench_data);
      const BenchmarkTable table = run_benchmark(series, opt, [&](const BenchmarkCell& cell) {
        err << "benchmark: " << to_string(cell.architecture) << " L=" << cell.window << " "
            << (cell.ok() ? "ok" : "failed: " + cell.error) << "\n";
      });
      std::string text;
      if (bench_c.format == "json") {
        text = benchmark_json(table);
      } else if (bench_c.format == "csv") {
        text = benchmark_csv(table);
      } else {
        text = render_benchmark_table(table) + "\n";
      }
      emit(out, bench_out, text);
      if (!table.complete()) return kExitDataError;
    } else if (grad_cmd->parsed()) {
      const auto entries = run_gradient_suite(grad_c.seed.value_or(0));
      bool all_passed = true;
      std::ostringstream text;
      if (grad_c.format == "csv") text << "layer,shape,max_abs_error,max_rel_error,passed\n";
      if (grad_c.format == "json") text << "[";
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        all_passed &= e.report.passed;
        if (grad_c.format == "csv") {
          text << e.layer << ",\"" << e.shape << "\"," << format_real(e.report.max_abs_error) << ","
               << format_real(e.report.max_rel_error) << "," << (e.report.passed ? "true" : "false")
               << "\n";
        } else if (grad_c.format == "json") {
          text << (i ? ",\n " : "\n ") << "{\"layer\": \"" << e.layer << "\", \"shape\": \""
               << e.shape << "\", \"max_abs_error\": " << format_real(e.report.max_abs_error)
               << ", \"max_rel_error\": " << format_real(e.report.max_rel_error)
               << ", \"passed\": " << (e.report.passed ? "true" : "false") << "}";
        } else {
          char line[160];
          std::snprintf(line, sizeof line, "%-22s %-12s max_abs %.3e  max_rel %.3e  %s\n",
                        e.layer.c_str(), e.shape.c_str(), e.report.max_abs_error,
                        e.report.max_rel_error, e.report.passed ? "ok" : "FAIL");
          text << line;
        }
      }
      if (grad_c.format == "json") text << "\n]\n";
      out << text.str();
      if (!all_passed) return kExitDataError;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace ctnet
