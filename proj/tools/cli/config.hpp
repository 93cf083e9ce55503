#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "jointtag/model.hpp"
#include "jointtag/synth.hpp"
#include "jointtag/trainer.hpp"

namespace jointtag::cli {

struct Paths {
  std::string train;
  std::string test;
  std::string validation;  // optional; otherwise split off the test file
  std::string relations;
  std::string embeddings;
  std::string checkpoint;
  std::string report_dir = ".";
};

struct RunControls {
  std::uint64_t seed = 1;
  std::size_t n_repeats = 1;
  std::vector<double> alphas = {1.0, 5.0, 10.0, 20.0};
  double validation_fraction = 0.1;
};

// Settings from a JSON config file, overridden by flags. The effective value
// of every field is echoed into reports.
struct Config {
  Hyperparameters hyper;
  TrainOptions training;
  GeneratorConfig synth;
  Paths paths;
  RunControls run;
};

void to_json(nlohmann::json& j, const Config& c);
void from_json(const nlohmann::json& j, Config& c);

// Throws ConfigError on unreadable or malformed files and unknown sections.
Config load_config(const std::string& path);

}  // namespace jointtag::cli
