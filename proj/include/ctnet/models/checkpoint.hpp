#pragma once

#include <string>

#include "ctnet/data/scaler.hpp"
#include "ctnet/models/model.hpp"

namespace ctnet {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  Model model;
  ScalerParams scaler;
};

/// Checkpoint document: a JSON object with keys format_version,
/// architecture, config, scaler {min, max} and params (name -> {shape,
/// data}), in that order. Reals are written with 17 significant digits,
/// so save -> load -> save reproduces the text byte for byte.
std::string serialize_checkpoint(const Model& model, const ScalerParams& scaler);

/// Rejects malformed or truncated text, unknown format versions, missing or
/// unexpected parameter names and shape mismatches with ParseError. Nothing
/// is returned unless the whole document validates.
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const Model& model, const ScalerParams& scaler, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ctnet
