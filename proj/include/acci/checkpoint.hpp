#pragma once

#include <string>

#include "acci/config.hpp"
#include "acci/training.hpp"

namespace acci {

struct Checkpoint {
  Model model;
  PipelineConfig config;
};

// JSON: config text, seed, head arrays and, for the toy backend, the
// vocabulary and encoder arrays. Doubles round-trip exactly.
void save_checkpoint(const std::string& path, const Model& model, const PipelineConfig& config);
Checkpoint load_checkpoint(const std::string& path);

std::string checkpoint_json(const Model& model, const PipelineConfig& config);
Checkpoint parse_checkpoint(const std::string& text);

}  // namespace acci
