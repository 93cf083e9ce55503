#pragma once

// Template-sentence generator with known triplets. Each triplet is laid out
// as  <e1> [filler] <trigger> [filler] <e2>, where the trigger word names
// the relation. Role-1 entities, role-2 entities and filler words are drawn
// from disjoint word pools. Two triplets of one sentence never interleave,
// and every sentence decodes back to its gold triplets under nearest pairing.

#include <cstdint>
#include <string>
#include <vector>

#include "jointtag/corpus.hpp"

namespace jointtag {

struct GeneratorConfig {
  std::size_t n_sentences = 2000;
  std::vector<std::string> relations = {"Country-President", "Company-Founder", "Person-Birthplace",
                                        "Person-Employer"};
  std::size_t vocab_size = 400;            // filler + entity pools, triggers excluded
  std::size_t max_entities_per_sentence = 4;
  std::size_t max_entity_len = 3;          // at most 3
  std::size_t min_sentence_len = 8;
  std::size_t max_sentence_len = 20;
  double distractor_prob = 0.15;           // chance of an unrelated entity-pool word
  std::uint64_t seed = 7;

  // Throws ConfigError when no sentence could satisfy the settings.
  void validate() const;
};

Corpus generate(const GeneratorConfig& config);

}  // namespace jointtag
