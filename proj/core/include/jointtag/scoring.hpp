#pragma once

// Triplet and element scoring. Entities are identified by head offset (the
// start token); a triplet is correct when relation and both heads match.
// Counts are micro-aggregated across sentences.

#include <cstddef>
#include <span>
#include <vector>

#include "jointtag/tag_codec.hpp"

namespace jointtag {

struct PrfCounts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  // Zero when the denominator is zero.
  double precision() const;
  double recall() const;
  double f1() const;

  PrfCounts& operator+=(const PrfCounts& o) {
    gold += o.gold;
    predicted += o.predicted;
    correct += o.correct;
    return *this;
  }
  friend bool operator==(const PrfCounts&, const PrfCounts&) = default;
};

double f1_score(double precision, double recall);

PrfCounts score_triplets(std::span<const Triplet> gold, std::span<const Triplet> predicted);

struct ElementCounts {
  PrfCounts e1;    // head of the first entity
  PrfCounts e2;    // head of the second entity
  PrfCounts pair;  // both heads, relation ignored
};

// Role-1 and role-2 predictions include unpaired entities; pairs come from
// the predicted triplets only.
ElementCounts score_elements(std::span<const Triplet> gold, const DecodeResult& predicted);
ElementCounts score_elements(std::span<const Triplet> gold, std::span<const Triplet> predicted);

struct EvalReport {
  std::size_t sentences = 0;
  PrfCounts triplet;
  PrfCounts e1;
  PrfCounts e2;
  PrfCounts pair;
  SingleCounts singles;

  // Fraction of predicted role-1 (role-2, all) entities left unpaired.
  double single_ratio_e1() const;
  double single_ratio_e2() const;
  double single_ratio() const;

  void add(std::span<const Triplet> gold, std::span<const Tag> predicted_tags);
  EvalReport& operator+=(const EvalReport& o);
};

}  // namespace jointtag
