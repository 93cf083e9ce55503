#include "jointtag/synth.hpp"

#include <algorithm>
#include <map>

#include "jointtag/embedding_file.hpp"
#include "jointtag/errors.hpp"
#include "jointtag/random.hpp"

namespace jointtag {

namespace {

constexpr int kTriggersPerRelation = 2;
constexpr int kMaxAttempts = 1000;

struct Pools {
  std::vector<std::string> filler;
  std::vector<std::string> first;
  std::vector<std::string> second;
  std::vector<std::vector<std::string>> triggers;
};

Pools make_pools(const GeneratorConfig& c) {
  Pools p;
  const std::size_t n_filler = c.vocab_size / 2;
  const std::size_t n_first = (c.vocab_size - n_filler) / 2;
  const std::size_t n_second = c.vocab_size - n_filler - n_first;
  for (std::size_t i = 0; i < n_filler; ++i) p.filler.push_back("w" + std::to_string(i));
  for (std::size_t i = 0; i < n_first; ++i) p.first.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < n_second; ++i) p.second.push_back("y" + std::to_string(i));
  for (const auto& rel : c.relations) {
    std::vector<std::string> t;
    for (int k = 0; k < kTriggersPerRelation; ++k) t.push_back("~" + lowercase(rel) + "~" + std::to_string(k));
    p.triggers.push_back(std::move(t));
  }
  return p;
}

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) { return pool[rng.below(pool.size())]; }

struct Segment {
  RelationId relation;
  std::size_t len1, gap1, gap2, len2;
  std::size_t size() const { return len1 + gap1 + 1 + gap2 + len2; }
};

std::vector<Segment> draw_segments(const GeneratorConfig& c, std::size_t length, Rng& rng) {
  const std::size_t max_triplets = std::min<std::size_t>(2, c.max_entities_per_sentence / 2);
  const double u = rng.uniform();
  std::size_t k = u < 0.1 ? 0 : (u < 0.55 ? 1 : 2);
  k = std::min(k, max_triplets);
  for (; k > 0; --k) {
    std::vector<Segment> segs;
    std::size_t total = k - 1;  // separators between segments
    for (std::size_t i = 0; i < k; ++i) {
      Segment s{static_cast<RelationId>(rng.below(c.relations.size())),
                static_cast<std::size_t>(rng.between(1, static_cast<int>(c.max_entity_len))),
                rng.bernoulli(0.3) ? 1u : 0u, rng.bernoulli(0.3) ? 1u : 0u,
                static_cast<std::size_t>(rng.between(1, static_cast<int>(c.max_entity_len)))};
      total += s.size();
      segs.push_back(s);
    }
    if (total <= length) return segs;
  }
  return {};
}

AnnotatedSentence draw_sentence(const GeneratorConfig& c, const Pools& pools, Rng& rng) {
  const auto length = static_cast<std::size_t>(
      rng.between(static_cast<int>(c.min_sentence_len), static_cast<int>(c.max_sentence_len)));
  const std::vector<Segment> segs = draw_segments(c, length, rng);

  std::size_t used = segs.empty() ? 0 : segs.size() - 1;
  for (const auto& s : segs) used += s.size();
  // Spread the spare filler over the slots around the segments.
  std::vector<std::size_t> slots(segs.size() + 1, 0);
  for (std::size_t i = 1; i + 1 < slots.size(); ++i) slots[i] = 1;
  for (std::size_t spare = length - used; spare > 0; --spare) slots[rng.below(slots.size())] += 1;

  AnnotatedSentence s;
  std::vector<bool> is_filler;
  auto add_filler = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      s.tokens.push_back(pick(pools.filler, rng));
      is_filler.push_back(true);
    }
  };
  auto add_entity = [&](std::size_t n, const std::vector<std::string>& pool) {
    const std::size_t start = s.tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
      s.tokens.push_back(pick(pool, rng));
      is_filler.push_back(false);
    }
    return EntityMention{start, start + n - 1};
  };

  add_filler(slots[0]);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& g = segs[i];
    Triplet t;
    t.relation = g.relation;
    t.e1 = add_entity(g.len1, pools.first);
    add_filler(g.gap1);
    s.tokens.push_back(pick(pools.triggers[g.relation], rng));
    is_filler.push_back(false);
    add_filler(g.gap2);
    t.e2 = add_entity(g.len2, pools.second);
    s.triplets.push_back(t);
    add_filler(slots[i + 1]);
  }

  if (rng.bernoulli(c.distractor_prob)) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const bool left_ok = i == 0 || is_filler[i - 1];
      const bool right_ok = i + 1 == s.tokens.size() || is_filler[i + 1];
      if (is_filler[i] && left_ok && right_ok) candidates.push_back(i);
    }
    if (!candidates.empty()) {
      const std::size_t pos = candidates[rng.below(candidates.size())];
      s.tokens[pos] = pick(rng.bernoulli(0.5) ? pools.first : pools.second, rng);
    }
  }
  return s;
}

bool recoverable(const AnnotatedSentence& s, const TagVocabulary& vocab) {
  const std::vector<Tag> tags = encode(s, vocab);
  std::vector<Triplet> decoded = decode(tags);
  std::vector<Triplet> gold = s.triplets;
  std::sort(decoded.begin(), decoded.end());
  std::sort(gold.begin(), gold.end());
  return decoded == gold;
}

bool balanced(const std::vector<AnnotatedSentence>& sentences, std::size_t n_relations) {
  std::vector<std::size_t> counts(n_relations, 0);
  std::size_t total = 0;
  for (const auto& s : sentences) {
    for (const auto& t : s.triplets) {
      ++counts[t.relation];
      ++total;
    }
  }
  if (total == 0) return true;
  return std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return 20 * c >= total; });
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_sentences < 1) throw ConfigError("n_sentences must be >= 1");
  if (relations.empty()) throw ConfigError("generator needs at least one relation");
  if (vocab_size < 4) throw ConfigError("vocab_size must be >= 4");
  if (max_entities_per_sentence < 1) throw ConfigError("max_entities_per_sentence must be >= 1");
  if (max_entity_len < 1 || max_entity_len > 3) throw ConfigError("max_entity_len must lie in [1, 3]");
  if (min_sentence_len < 1 || max_sentence_len < min_sentence_len) throw ConfigError("bad sentence length range");
  if (max_entities_per_sentence >= 2 && max_sentence_len < 3) {
    throw ConfigError("sentences of at most " + std::to_string(max_sentence_len) +
                      " tokens cannot hold an entity pair and its trigger");
  }
  if (!(distractor_prob >= 0.0 && distractor_prob <= 1.0)) throw ConfigError("distractor_prob must lie in [0, 1]");
}

Corpus generate(const GeneratorConfig& config) {
  config.validate();
  const RelationSet relations(config.relations);
  const TagVocabulary vocab(relations);
  const Pools pools = make_pools(config);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(attempt)));
    std::vector<AnnotatedSentence> sentences;
    sentences.reserve(config.n_sentences);
    while (sentences.size() < config.n_sentences) {
      AnnotatedSentence s = draw_sentence(config, pools, rng);
      if (recoverable(s, vocab)) sentences.push_back(std::move(s));
    }
    if (!balanced(sentences, relations.size())) continue;

    Corpus c;
    c.relations = relations;
    c.sentences = std::move(sentences);
    c.words = WordVocabulary::build(c.sentences);
    return c;
  }
  throw ConfigError("could not generate a relation-balanced corpus");
}

}  // namespace jointtag
