#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gnconvert/model.hpp"

namespace gnc {

// Model file: a JSON document
//   {"version": 1, "input_shape": [...], "L": int, "metadata": {...},
//    "layers": [{"kind", "shape", "weights", "bias", "act"?, "lambda"?,
//                "stride"?, "padding"?, "theta"?, "tau"?,
//                "theta_gn"?, "member_thresholds"?}]}
// Weights are flat row-major decimal numbers printed with round-trip
// precision. theta appears after conversion; tau, theta_gn and
// member_thresholds after Group Neuron replacement. theta_gn and
// member_thresholds are informational: they are recomputed from theta/tau.
inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const ModelSpec& model);
ModelSpec model_from_json(std::string_view text);

void save_model(const ModelSpec& model, const std::filesystem::path& path);
ModelSpec load_model(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON form, as 16 lowercase hex digits.
std::string model_hash(const ModelSpec& model);

}  // namespace gnc
