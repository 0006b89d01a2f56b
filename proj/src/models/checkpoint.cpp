#include "ctnet/models/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

using json = nlohmann::json;

namespace {

std::string real17(double v) {
  if (!std::isfinite(v)) throw NumericError("checkpoint: cannot serialize a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string padding_name(Padding p) { return p == Padding::same ? "same" : "valid"; }

std::string quoted(const std::string& s) { return json(s).dump(); }

template <typename T>
T require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("checkpoint: missing '") + key + "' in " + where);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("checkpoint: invalid '") + key + "' in " + where);
  }
}

const json& require_object(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_object()) {
    throw ParseError(std::string("checkpoint: missing object '") + key + "'");
  }
  return *it;
}

ModelConfig parse_config(const json& doc) {
  const json& cfg = require_object(doc, "config");
  ModelConfig config;
  config.architecture = parse_architecture(require<std::string>(cfg, "architecture", "config"));
  if (config.architecture != parse_architecture(require<std::string>(doc, "architecture", "root"))) {
    throw ParseError("checkpoint: architecture differs between root and config");
  }
  config.window_length = require<std::size_t>(cfg, "window_length", "config");
  config.conv_filters = require<std::size_t>(cfg, "conv_filters", "config");
  config.conv_kernel = require<std::size_t>(cfg, "conv_kernel", "config");
  const auto padding = require<std::string>(cfg, "conv_padding", "config");
  if (padding != "same" && padding != "valid") {
    throw ParseError("checkpoint: unknown conv_padding '" + padding + "'");
  }
  config.conv_padding = padding == "same" ? Padding::same : Padding::valid;
  config.recurrent_units = require<std::size_t>(cfg, "recurrent_units", "config");
  config.heads = require<std::size_t>(cfg, "heads", "config");
  config.d_ff = require<std::size_t>(cfg, "d_ff", "config");
  config.dropout_rate = require<double>(cfg, "dropout_rate", "config");
  config.seed = require<std::uint64_t>(cfg, "seed", "config");
  return config;
}

}  // namespace

std::string serialize_checkpoint(const Model& model, const ScalerParams& scaler) {
  const ModelConfig& c = model.config();
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": " << kCheckpointFormatVersion << ",\n";
  out << "  \"architecture\": " << quoted(to_string(c.architecture)) << ",\n";
  out << "  \"config\": {\"architecture\": " << quoted(to_string(c.architecture))
      << ", \"window_length\": " << c.window_length << ", \"conv_filters\": " << c.conv_filters
      << ", \"conv_kernel\": " << c.conv_kernel
      << ", \"conv_padding\": " << quoted(padding_name(c.conv_padding))
      << ", \"recurrent_units\": " << c.recurrent_units << ", \"heads\": " << c.heads
      << ", \"d_ff\": " << c.d_ff << ", \"dropout_rate\": " << real17(c.dropout_rate)
      << ", \"seed\": " << c.seed << "},\n";
  out << "  \"scaler\": {\"min\": " << real17(scaler.min) << ", \"max\": " << real17(scaler.max)
      << "},\n";
  out << "  \"params\": {";
  const auto params = model.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor& t = *params[p].value;
    out << (p ? ",\n    " : "\n    ") << quoted(params[p].name) << ": {\"shape\": [";
    for (std::size_t i = 0; i < t.rank(); ++i) out << (i ? ", " : "") << t.dim(i);
    out << "], \"data\": [";
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? ", " : "") << real17(t[i]);
    out << "]}";
  }
  out << "\n  }\n}\n";
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("checkpoint: expected a JSON object");
  const int version = require<int>(doc, "format_version", "root");
  if (version != kCheckpointFormatVersion) {
    throw ParseError("checkpoint: unsupported format_version " + std::to_string(version));
  }

  ModelConfig config;
  try {
    config = parse_config(doc);
    config.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint: invalid config: ") + e.what());
  }
  const json& scaler_obj = require_object(doc, "scaler");
  ScalerParams scaler{require<double>(scaler_obj, "min", "scaler"),
                      require<double>(scaler_obj, "max", "scaler")};
  if (!(scaler.max >= scaler.min)) throw ParseError("checkpoint: scaler max < min");

  Checkpoint ckpt{Model(config), scaler};
  const json& params = require_object(doc, "params");
  std::set<std::string> expected;
  for (const auto& p : ckpt.model.parameters()) {
    expected.insert(p.name);
    auto it = params.find(p.name);
    if (it == params.end()) throw ParseError("checkpoint: missing parameter '" + p.name + "'");
    const std::string where = "parameter '" + p.name + "'";
    const auto shape = require<std::vector<std::size_t>>(*it, "shape", where.c_str());
    if (shape != p.value->shape()) {
      throw ParseError("checkpoint: " + where + " has shape " + shape_to_string(shape) +
                       ", expected " + shape_to_string(p.value->shape()));
    }
    auto data = require<std::vector<double>>(*it, "data", where.c_str());
    if (data.size() != p.value->size()) {
      throw ParseError("checkpoint: " + where + " has " + std::to_string(data.size()) +
                       " values, expected " + std::to_string(p.value->size()));
    }
    *p.value = Tensor(shape, std::move(data));
  }
  for (const auto& [name, value] : params.items()) {
    if (!expected.count(name)) throw ParseError("checkpoint: unexpected parameter '" + name + "'");
  }
  return ckpt;
}

void save_checkpoint(const Model& model, const ScalerParams& scaler, const std::string& path) {
  const std::string text = serialize_checkpoint(model, scaler);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace ctnet
