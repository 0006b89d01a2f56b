#include "ctnet/interface/run_config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

using json = nlohmann::ordered_json;

namespace {

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: invalid value for '" + key + "'");
  }
}

std::size_t get_size(const json& value, const std::string& key) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "architecture") {
      c.model.architecture = parse_architecture(get_as<std::string>(value, key));
    } else if (key == "window_length") {
      c.model.window_length = get_size(value, key);
    } else if (key == "conv_filters") {
      c.model.conv_filters = get_size(value, key);
    } else if (key == "conv_kernel") {
      c.model.conv_kernel = get_size(value, key);
    } else if (key == "conv_padding") {
      const auto p = get_as<std::string>(value, key);
      if (p != "same" && p != "valid") throw ConfigError("config: conv_padding must be same or valid");
      c.model.conv_padding = p == "same" ? Padding::same : Padding::valid;
    } else if (key == "recurrent_units") {
      c.model.recurrent_units = get_size(value, key);
    } else if (key == "heads") {
      c.model.heads = get_size(value, key);
    } else if (key == "d_ff") {
      c.model.d_ff = get_size(value, key);
    } else if (key == "dropout_rate") {
      c.model.dropout_rate = get_as<double>(value, key);
    } else if (key == "seed") {
      c.model.seed = c.train.seed = get_size(value, key);
    } else if (key == "model_seed") {
      c.model.seed = get_size(value, key);
    } else if (key == "train_seed") {
      c.train.seed = get_size(value, key);
    } else if (key == "learning_rate") {
      c.train.learning_rate = get_as<double>(value, key);
    } else if (key == "beta1") {
      c.train.beta1 = get_as<double>(value, key);
    } else if (key == "beta2") {
      c.train.beta2 = get_as<double>(value, key);
    } else if (key == "eps_adam") {
      c.train.eps_adam = get_as<double>(value, key);
    } else if (key == "batch_size") {
      c.train.batch_size = get_size(value, key);
    } else if (key == "epochs") {
      c.train.epochs = get_size(value, key);
    } else if (key == "shuffle_each_epoch") {
      c.train.shuffle_each_epoch = get_as<bool>(value, key);
    } else if (key == "patience") {
      c.train.patience = get_size(value, key);
    } else if (key == "train_fraction") {
      c.train_fraction = get_as<double>(value, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig read_run_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), std::move(base));
}

std::string run_config_json(const RunConfig& c) {
  json doc;
  doc["architecture"] = to_string(c.model.architecture);
  doc["window_length"] = c.model.window_length;
  doc["conv_filters"] = c.model.conv_filters;
  doc["conv_kernel"] = c.model.conv_kernel;
  doc["conv_padding"] = c.model.conv_padding == Padding::same ? "same" : "valid";
  doc["recurrent_units"] = c.model.recurrent_units;
  doc["heads"] = c.model.heads;
  doc["d_ff"] = c.model.d_ff;
  doc["dropout_rate"] = c.model.dropout_rate;
  doc["model_seed"] = c.model.seed;
  doc["learning_rate"] = c.train.learning_rate;
  doc["beta1"] = c.train.beta1;
  doc["beta2"] = c.train.beta2;
  doc["eps_adam"] = c.train.eps_adam;
  doc["batch_size"] = c.train.batch_size;
  doc["epochs"] = c.train.epochs;
  doc["train_seed"] = c.train.seed;
  doc["shuffle_each_epoch"] = c.train.shuffle_each_epoch;
  doc["patience"] = c.train.patience;
  doc["train_fraction"] = c.train_fraction;
  return doc.dump();
}

}  // namespace ctnet
