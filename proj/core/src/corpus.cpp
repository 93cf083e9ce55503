#include "jointtag/corpus.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "jointtag/embedding_file.hpp"
#include "jointtag/errors.hpp"
#include "jointtag/random.hpp"

namespace jointtag {

using nlohmann::json;

WordVocabulary::WordVocabulary() { add(std::string(kUnknownText)); }

WordVocabulary::WordVocabulary(std::vector<std::string> words) {
  if (words.empty() || words.front() != kUnknownText) {
    throw ValidationError("word vocabulary must start with " + std::string(kUnknownText));
  }
  for (auto& w : words) {
    if (index_.count(w) != 0) throw ValidationError("duplicate word '" + w + "' in vocabulary");
    add(std::move(w));
  }
}

void WordVocabulary::add(std::string word) {
  index_.emplace(word, static_cast<WordId>(words_.size()));
  words_.push_back(std::move(word));
}

WordVocabulary WordVocabulary::build(std::span<const AnnotatedSentence> sentences) {
  WordVocabulary v;
  for (const auto& s : sentences) {
    for (const auto& tok : s.tokens) {
      std::string w = lowercase(tok);
      if (v.index_.count(w) == 0) v.add(std::move(w));
    }
  }
  return v;
}

WordId WordVocabulary::id(std::string_view word) const {
  auto it = index_.find(lowercase(std::string(word)));
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<WordId> WordVocabulary::ids(std::span<const std::string> tokens) const {
  std::vector<WordId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::size_t Corpus::triplet_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.triplets.size();
  return n;
}

namespace {

EntityMention parse_span(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ValidationError(std::string("field '") + field + "' must be a [start, end] integer pair");
  }
  const auto start = j[0].get<long long>();
  const auto end = j[1].get<long long>();
  if (start < 0 || end < 0) throw ValidationError(std::string("negative index in '") + field + "'");
  return {static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
}

}  // namespace

AnnotatedSentence parse_sentence(std::string_view line, const RelationSet& relations) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
    throw ValidationError("missing 'tokens' array");
  }
  AnnotatedSentence s;
  for (const auto& tok : j["tokens"]) {
    if (!tok.is_string()) throw ValidationError("tokens must be strings");
    s.tokens.push_back(tok.get<std::string>());
  }
  if (j.contains("triplets")) {
    if (!j["triplets"].is_array()) throw ValidationError("'triplets' must be an array");
    for (const auto& t : j["triplets"]) {
      if (!t.is_object() || !t.contains("rel") || !t["rel"].is_string() || !t.contains("e1") || !t.contains("e2")) {
        throw ValidationError("triplet needs 'e1', 'rel' and 'e2'");
      }
      const auto rel_name = t["rel"].get<std::string>();
      auto rel = relations.find(rel_name);
      if (!rel) throw ValidationError("unknown relation '" + rel_name + "'");
      s.triplets.push_back({parse_span(t["e1"], "e1"), *rel, parse_span(t["e2"], "e2")});
    }
  }
  validate(s, relations);
  return s;
}

std::string format_sentence(const AnnotatedSentence& sentence, const RelationSet& relations) {
  json triplets = json::array();
  for (const auto& t : sentence.triplets) {
    triplets.push_back({{"e1", {t.e1.start, t.e1.end}}, {"rel", relations.name(t.relation)}, {"e2", {t.e2.start, t.e2.end}}});
  }
  json j;
  j["tokens"] = sentence.tokens;
  j["triplets"] = std::move(triplets);
  return j.dump();
}

Corpus read_corpus(std::istream& in, const RelationSet& relations, const std::string& source) {
  Corpus c;
  c.relations = relations;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      c.sentences.push_back(parse_sentence(line, relations));
    } catch (const OverlappingEntities&) {
      ++c.rejected_overlapping;
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (c.sentences.empty() && c.rejected_overlapping == 0) throw ValidationError("empty corpus");
  c.words = WordVocabulary::build(c.sentences);
  return c;
}

Corpus load_corpus(const std::string& path, const RelationSet& relations) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path);
  return read_corpus(in, relations, path);
}

void write_corpus(std::ostream& out, std::span<const AnnotatedSentence> sentences, const RelationSet& relations) {
  for (const auto& s : sentences) out << format_sentence(s, relations) << '\n';
}

CorpusSplit split_validation(std::span<const AnnotatedSentence> sentences, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  const std::size_t n = sentences.size();
  const auto n_val = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> is_val(n, false);
  for (std::size_t k = 0; k < n_val; ++k) is_val[order[k]] = true;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? split.validation : split.evaluation).push_back(sentences[i]);
  return split;
}

}  // namespace jointtag
