#include "config.hpp"

#include <fstream>

#include "jointtag/errors.hpp"
#include "jointtag/json_io.hpp"

namespace jointtag::cli {

using nlohmann::json;

void to_json(json& j, const Config& c) {
  j = json{{"hyper", c.hyper},
           {"training", c.training},
           {"synth", c.synth},
           {"paths",
            {{"train", c.paths.train},
             {"test", c.paths.test},
             {"validation", c.paths.validation},
             {"relations", c.paths.relations},
             {"embeddings", c.paths.embeddings},
             {"checkpoint", c.paths.checkpoint},
             {"report_dir", c.paths.report_dir}}},
           {"run",
            {{"seed", c.run.seed},
             {"n_repeats", c.run.n_repeats},
             {"alphas", c.run.alphas},
             {"validation_fraction", c.run.validation_fraction}}}};
}

void from_json(const json& j, Config& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "hyper" && key != "training" && key != "synth" && key != "paths" && key != "run") {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  if (j.contains("hyper")) from_json(j.at("hyper"), c.hyper);
  if (j.contains("training")) from_json(j.at("training"), c.training);
  if (j.contains("synth")) from_json(j.at("synth"), c.synth);
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    c.paths.train = p.value("train", c.paths.train);
    c.paths.test = p.value("test", c.paths.test);
    c.paths.validation = p.value("validation", c.paths.validation);
    c.paths.relations = p.value("relations", c.paths.relations);
    c.paths.embeddings = p.value("embeddings", c.paths.embeddings);
    c.paths.checkpoint = p.value("checkpoint", c.paths.checkpoint);
    c.paths.report_dir = p.value("report_dir", c.paths.report_dir);
  }
  if (j.contains("run")) {
    const json& r = j.at("run");
    c.run.seed = r.value("seed", c.run.seed);
    c.run.n_repeats = r.value("n_repeats", c.run.n_repeats);
    c.run.alphas = r.value("alphas", c.run.alphas);
    c.run.validation_fraction = r.value("validation_fraction", c.run.validation_fraction);
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in).get<Config>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace jointtag::cli
