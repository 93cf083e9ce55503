#pragma once

#include <json.hpp>

#include "jointtag/model.hpp"
#include "jointtag/scoring.hpp"
#include "jointtag/stats.hpp"
#include "jointtag/synth.hpp"
#include "jointtag/trainer.hpp"

namespace jointtag {

// Missing keys keep their current value, so partial objects act as overrides.
void to_json(nlohmann::json& j, const RmspropConfig& c);
void from_json(const nlohmann::json& j, RmspropConfig& c);
void to_json(nlohmann::json& j, const Hyperparameters& h);
void from_json(const nlohmann::json& j, Hyperparameters& h);

void to_json(nlohmann::json& j, const TrainOptions& o);
void from_json(const nlohmann::json& j, TrainOptions& o);
void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

void to_json(nlohmann::json& j, const EpochRecord& e);
void to_json(nlohmann::json& j, const SweepRow& r);
void to_json(nlohmann::json& j, const PrfCounts& c);
void to_json(nlohmann::json& j, const EvalReport& r);
void to_json(nlohmann::json& j, const MeanStd& m);
void to_json(nlohmann::json& j, const RunStatistics& s);

nlohmann::json triplet_json(const Triplet& t, const RelationSet& relations);

}  // namespace jointtag
