#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "jointtag/corpus.hpp"
#include "jointtag/errors.hpp"

namespace jointtag {
namespace {

RelationSet relations() { return RelationSet({"Country-President", "Company-Founder"}); }

const char* kGood =
    R"({"tokens": ["United", "States", "president", "Trump"], "triplets": [{"e1": [0, 1], "rel": "Country-President", "e2": [3, 3]}]})";

TEST(Corpus, ParseAndFormatRoundTrip) {
  const AnnotatedSentence s = parse_sentence(kGood, relations());
  ASSERT_EQ(s.tokens.size(), 4u);
  ASSERT_EQ(s.triplets.size(), 1u);
  EXPECT_EQ(s.triplets[0], (Triplet{{0, 1}, 0, {3, 3}}));
  EXPECT_EQ(parse_sentence(format_sentence(s, relations()), relations()).triplets, s.triplets);
  const AnnotatedSentence none = parse_sentence(R"({"tokens": ["a"]})", relations());
  EXPECT_TRUE(none.triplets.empty());
}

TEST(Corpus, ParseErrors) {
  const RelationSet r = relations();
  EXPECT_THROW(parse_sentence("{", r), ValidationError);
  EXPECT_THROW(parse_sentence(R"({"triplets": []})", r), ValidationError);
  EXPECT_THROW(parse_sentence(R"({"tokens": ["a", "b"], "triplets": [{"e1": [0, 0], "rel": "X", "e2": [1, 1]}]})", r),
               ValidationError);
  EXPECT_THROW(
      parse_sentence(R"({"tokens": ["a", "b"], "triplets": [{"e1": [0, 0], "rel": "Company-Founder", "e2": [1, 2]}]})", r),
      ValidationError);
  EXPECT_THROW(
      parse_sentence(R"({"tokens": ["a", "b"], "triplets": [{"e1": [0, 1], "rel": "Company-Founder", "e2": [1, 1]}]})", r),
      OverlappingEntities);
}

TEST(Corpus, ReadReportsLineNumbersAndDropsOverlaps) {
  std::istringstream in(std::string(kGood) + "\n\n" +
                        R"({"tokens": ["a", "b"], "triplets": [{"e1": [0, 1], "rel": "Company-Founder", "e2": [1, 1]}]})" +
                        "\n" + kGood + "\n");
  const Corpus c = read_corpus(in, relations());
  EXPECT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.rejected_overlapping, 1u);
  EXPECT_EQ(c.triplet_count(), 2u);
  EXPECT_EQ(c.words.id("united"), c.words.id("United"));
  EXPECT_EQ(c.words.id("never-seen"), WordVocabulary::kUnknown);

  std::istringstream bad(std::string(kGood) + "\n" + R"({"tokens": ["a"], "triplets": [{"e1": [0, 0], "rel": "Nope", "e2": [0, 0]}]})" + "\n");
  try {
    read_corpus(bad, relations(), "train.jsonl");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("train.jsonl:2"), std::string::npos) << e.what();
  }
  std::istringstream empty("\n\n");
  EXPECT_THROW(read_corpus(empty, relations()), ValidationError);
}

TEST(Corpus, WriteThenRead) {
  std::istringstream in(std::string(kGood) + "\n" + kGood + "\n");
  const Corpus c = read_corpus(in, relations());
  std::ostringstream out;
  write_corpus(out, c.sentences, relations());
  std::istringstream again(out.str());
  const Corpus d = read_corpus(again, relations());
  ASSERT_EQ(d.sentences.size(), 2u);
  EXPECT_EQ(d.sentences[1].tokens, c.sentences[1].tokens);
  EXPECT_EQ(d.sentences[1].triplets, c.sentences[1].triplets);
}

TEST(WordVocabulary, BuildAndValidate) {
  std::vector<AnnotatedSentence> s(2);
  s[0].tokens = {"The", "cat", "the"};
  s[1].tokens = {"dog"};
  const WordVocabulary v = WordVocabulary::build(s);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<unk>", "the", "cat", "dog"}));
  const std::vector<std::string> toks = {"DOG", "bird"};
  EXPECT_EQ(v.ids(toks), (std::vector<WordId>{3, 0}));
  EXPECT_THROW(WordVocabulary(std::vector<std::string>{"a"}), ValidationError);
  EXPECT_THROW(WordVocabulary(std::vector<std::string>{"<unk>", "a", "a"}), ValidationError);
}

std::vector<AnnotatedSentence> numbered(std::size_t n) {
  std::vector<AnnotatedSentence> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].tokens = {std::to_string(i)};
  return out;
}

TEST(Split, SizesAndPartition) {
  const auto s100 = numbered(100);
  const CorpusSplit a = split_validation(s100, 0.1, 5);
  EXPECT_EQ(a.validation.size(), 10u);
  EXPECT_EQ(a.evaluation.size(), 90u);
  std::set<std::string> seen;
  for (const auto* part : {&a.validation, &a.evaluation}) {
    std::size_t last = 0;
    bool first = true;
    for (const auto& s : *part) {
      const std::size_t k = std::stoul(s.tokens[0]);
      if (!first) {
        EXPECT_GT(k, last);
      }
      first = false;
      last = k;
      EXPECT_TRUE(seen.insert(s.tokens[0]).second);
    }
  }
  EXPECT_EQ(seen.size(), 100u);

  const auto s3 = numbered(3);
  EXPECT_EQ(split_validation(s3, 0.5, 1).validation.size(), 2u);
  const CorpusSplit b = split_validation(s100, 0.1, 5);
  EXPECT_EQ(b.validation[0].tokens, a.validation[0].tokens);
  EXPECT_THROW(split_validation(s100, 0.0, 1), ConfigError);
  EXPECT_THROW(split_validation(s100, 1.0, 1), ConfigError);
}

}  // namespace
}  // namespace jointtag
