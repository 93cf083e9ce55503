#pragma once

// Binary checkpoint container; byte layout in docs/checkpoint_format.md.

#include <iosfwd>
#include <optional>
#include <string>

#include "jointtag/corpus.hpp"
#include "jointtag/model.hpp"
#include "jointtag/optimizer.hpp"

namespace jointtag {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Hyperparameters hyper;
  WordVocabulary words;
  RelationSet relations;
  Parameters params;
  std::optional<RmspropState> optimizer;

  TagVocabulary tag_vocabulary() const { return TagVocabulary(relations); }
  ModelShape shape() const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Validates magic, version and every tensor shape against the stored
// hyperparameters. Throws ValidationError or ShapeError.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace jointtag
