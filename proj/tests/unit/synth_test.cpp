#include <gtest/gtest.h>

#include <map>

#include "jointtag/errors.hpp"
#include "jointtag/synth.hpp"
#include "pairing.hpp"

namespace jointtag {
namespace {

GeneratorConfig small(std::size_t n, std::uint64_t seed) {
  GeneratorConfig c;
  c.n_sentences = n;
  c.seed = seed;
  return c;
}

TEST(Synth, Deterministic) {
  const Corpus a = generate(small(50, 3));
  const Corpus b = generate(small(50, 3));
  const Corpus c = generate(small(50, 4));
  ASSERT_EQ(a.sentences.size(), 50u);
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(a.sentences[i].tokens, b.sentences[i].tokens);
    EXPECT_EQ(a.sentences[i].triplets, b.sentences[i].triplets);
    differs = differs || a.sentences[i].tokens != c.sentences[i].tokens;
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, RoundTripsAndRespectsLimits) {
  const GeneratorConfig cfg = small(1500, 11);
  const Corpus corpus = generate(cfg);
  const TagVocabulary vocab(corpus.relations);
  EXPECT_EQ(corpus.relations.names(), cfg.relations);
  std::size_t with_distractor = 0;
  for (const auto& s : corpus.sentences) {
    EXPECT_GE(s.tokens.size(), cfg.min_sentence_len);
    EXPECT_LE(s.tokens.size(), cfg.max_sentence_len);
    EXPECT_LE(2 * s.triplets.size(), cfg.max_entities_per_sentence);
    for (const auto& t : s.triplets) {
      EXPECT_LE(t.e1.end - t.e1.start + 1, cfg.max_entity_len);
      EXPECT_LE(t.e2.end - t.e2.start + 1, cfg.max_entity_len);
    }
    const auto tags = encode(s, vocab);
    EXPECT_EQ(decode(tags), s.triplets);

    // Nearest pairing agrees with the minimum-total-distance matching here.
    EXPECT_EQ(oracle::best_pairing(extract_entities(tags), oracle::Objective::kTotalDistance), oracle::as_pairs(s.triplets));

    std::size_t entity_words = 0;
    for (const auto& w : s.tokens) entity_words += (w[0] == 'x' || w[0] == 'y') ? 1 : 0;
    std::size_t tagged = 0;
    for (const auto& t : tags) tagged += t.is_other() ? 0 : 1;
    if (entity_words > tagged) ++with_distractor;
  }
  EXPECT_GT(with_distractor, 0u);
}

TEST(Synth, RelationBalance) {
  const Corpus corpus = generate(small(2000, 7));
  std::map<RelationId, std::size_t> counts;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.triplets) ++counts[t.relation];
  }
  const double total = static_cast<double>(corpus.triplet_count());
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [rel, n] : counts) EXPECT_GE(static_cast<double>(n) / total, 0.05) << rel;
}

TEST(Synth, InfeasibleConfigurations) {
  GeneratorConfig c = small(10, 1);
  c.max_sentence_len = 2;
  c.min_sentence_len = 2;
  c.distractor_prob = 0.0;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(10, 1);
  c.max_entity_len = 4;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(10, 1);
  c.relations.clear();
  EXPECT_THROW(generate(c), ConfigError);
  c = small(10, 1);
  c.min_sentence_len = 30;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(10, 1);
  c.vocab_size = 2;
  EXPECT_THROW(generate(c), ConfigError);
}

}  // namespace
}  // namespace jointtag
