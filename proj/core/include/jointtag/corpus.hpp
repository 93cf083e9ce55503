#pragma once

// JSON Lines corpora, one sentence per line:
//   {"tokens": ["United", "States", ...],
//    "triplets": [{"e1": [0, 1], "rel": "Country-President", "e2": [3, 3]}]}
// Spans are inclusive token-index pairs.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jointtag/model.hpp"
#include "jointtag/tag_codec.hpp"

namespace jointtag {

// Lowercased word types; id 0 is the shared unknown-word row.
class WordVocabulary {
 public:
  static constexpr WordId kUnknown = 0;
  static constexpr std::string_view kUnknownText = "<unk>";

  WordVocabulary();
  // Words must be unique; index 0 must be "<unk>". Throws ValidationError.
  explicit WordVocabulary(std::vector<std::string> words);

  static WordVocabulary build(std::span<const AnnotatedSentence> sentences);

  WordId id(std::string_view word) const;
  std::vector<WordId> ids(std::span<const std::string> tokens) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  friend bool operator==(const WordVocabulary& a, const WordVocabulary& b) { return a.words_ == b.words_; }

 private:
  void add(std::string word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Corpus {
  std::vector<AnnotatedSentence> sentences;
  RelationSet relations;
  WordVocabulary words;
  std::size_t rejected_overlapping = 0;

  std::size_t triplet_count() const;
};

// Parses one JSON line. Throws ValidationError (unknown relation, bad
// structure, bad span) or OverlappingEntities.
AnnotatedSentence parse_sentence(std::string_view line, const RelationSet& relations);
std::string format_sentence(const AnnotatedSentence& sentence, const RelationSet& relations);

// Reads a whole corpus. Sentences with overlapping gold entities are dropped
// and counted; any other problem throws ValidationError with the line number.
// The word vocabulary is built from the sentences read.
Corpus read_corpus(std::istream& in, const RelationSet& relations, const std::string& source = "<stream>");
Corpus load_corpus(const std::string& path, const RelationSet& relations);

void write_corpus(std::ostream& out, std::span<const AnnotatedSentence> sentences, const RelationSet& relations);

struct CorpusSplit {
  std::vector<AnnotatedSentence> evaluation;
  std::vector<AnnotatedSentence> validation;
};

// Random validation split of round-half-up(fraction * n) sentences; both
// parts keep the original sentence order. Throws ConfigError unless
// 0 < fraction < 1.
CorpusSplit split_validation(std::span<const AnnotatedSentence> sentences, double fraction, std::uint64_t seed);

}  // namespace jointtag
