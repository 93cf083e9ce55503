#include <gtest/gtest.h>

#include <limits>

#include "jointtag/errors.hpp"
#include "jointtag/synth.hpp"
#include "jointtag/trainer.hpp"

namespace jointtag {
namespace {

struct Fixture {
  Corpus corpus;
  TagVocabulary tags;
  Hyperparameters hyper;
};

Fixture tiny(std::size_t n) {
  GeneratorConfig g;
  g.n_sentences = n;
  g.relations = {"CP", "CF"};
  g.vocab_size = 40;
  g.min_sentence_len = 6;
  g.max_sentence_len = 9;
  g.seed = 21;
  Corpus c = generate(g);
  Fixture f{c, TagVocabulary(c.relations), {}};
  f.hyper.embedding_dim = 8;
  f.hyper.encoder_hidden = 8;
  f.hyper.decoder_hidden = 12;
  f.hyper.dropout = 0.0;
  f.hyper.rmsprop.learning_rate = 0.01;
  return f;
}

TEST(Trainer, PrepareEncodesWordsAndTags) {
  const Fixture f = tiny(3);
  const auto enc = prepare(f.corpus.sentences, f.corpus.words, f.tags);
  ASSERT_EQ(enc.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(enc[i].ids.size(), f.corpus.sentences[i].tokens.size());
    EXPECT_EQ(enc[i].tags, encode_indices(f.corpus.sentences[i], f.tags));
  }
}

TEST(Trainer, ZeroLearningRateKeepsParameters) {
  Fixture f = tiny(6);
  f.hyper.rmsprop.learning_rate = 0.0;
  Rng rng(3);
  const Parameters init = init_parameters(ModelShape::from(f.hyper, f.corpus.words.size(), f.tags.size()), f.hyper, rng);
  TrainOptions opt;
  opt.max_epochs = 2;
  opt.early_stopping = false;
  opt.batch_size = 2;
  const TrainResult r = train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, f.hyper, opt, {}, nullptr, &init);
  EXPECT_EQ(r.params.decoder.input_gate.input, init.decoder.input_gate.input);
  EXPECT_EQ(r.params.embedding, init.embedding);
  ASSERT_EQ(r.history.size(), 2u);
  EXPECT_DOUBLE_EQ(r.history[0].loss, r.history[1].loss);
}

TEST(Trainer, OverfitsTinyCorpus) {
  Fixture f = tiny(5);
  TrainOptions opt;
  opt.max_epochs = 300;
  opt.early_stopping = false;
  opt.batch_size = 5;
  opt.track_train_accuracy = true;
  int reached = 0;
  TrainCallbacks cb;
  cb.on_epoch = [&](const EpochRecord& e) {
    if (reached == 0 && e.train_token_accuracy >= 0.99) reached = e.epoch;
  };
  const TrainResult r = train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, f.hyper, opt, cb);
  EXPECT_GT(reached, 0);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
  const auto enc = prepare(f.corpus.sentences, f.corpus.words, f.tags);
  EXPECT_GE(token_accuracy(r.params, f.hyper, enc), 0.99);
}

TEST(Trainer, Deterministic) {
  const Fixture f = tiny(6);
  TrainOptions opt;
  opt.max_epochs = 2;
  opt.batch_size = 3;
  Hyperparameters h = f.hyper;
  h.dropout = 0.5;
  const TrainResult a = train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, h, opt);
  const TrainResult b = train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, h, opt);
  EXPECT_EQ(a.params.decoder.tag_projection, b.params.decoder.tag_projection);
  EXPECT_EQ(a.history.back().loss, b.history.back().loss);

  // Threads only regroup the gradient sum.
  opt.threads = 2;
  const TrainResult c = train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, h, opt);
  EXPECT_TRUE(c.params.decoder.tag_projection.isApprox(a.params.decoder.tag_projection, 1e-9));
  EXPECT_NEAR(c.history.back().loss, a.history.back().loss, 1e-9 * std::abs(a.history.back().loss));
}

TEST(Trainer, NonFiniteLossNamesEpochAndBatch) {
  Fixture f = tiny(4);
  Rng rng(1);
  Parameters init = init_parameters(ModelShape::from(f.hyper, f.corpus.words.size(), f.tags.size()), f.hyper, rng);
  init.softmax_bias(0) = std::numeric_limits<double>::quiet_NaN();
  TrainOptions opt;
  opt.max_epochs = 1;
  opt.batch_size = 4;
  try {
    train(f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags, f.hyper, opt, {}, nullptr, &init);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch 1"), std::string::npos) << msg;
  }
}

TEST(Trainer, EvaluateAndReportMetrics) {
  const Fixture f = tiny(8);
  Rng rng(2);
  const Parameters p = init_parameters(ModelShape::from(f.hyper, f.corpus.words.size(), f.tags.size()), f.hyper, rng);
  std::vector<std::vector<TagIndex>> preds;
  const EvalReport r = evaluate(p, f.hyper, f.corpus.sentences, f.corpus.words, f.tags, &preds);
  EXPECT_EQ(r.sentences, 8u);
  ASSERT_EQ(preds.size(), 8u);
  EXPECT_EQ(preds[3].size(), f.corpus.sentences[3].tokens.size());
  const RunMetrics m = report_metrics(r);
  for (const char* key : {"precision", "recall", "f1", "e1_f1", "e2_f1", "pair_f1", "single_ratio"}) {
    EXPECT_TRUE(m.count(key)) << key;
  }
}

TEST(Trainer, SweepSeeds) {
  const Fixture f = tiny(6);
  TrainOptions opt;
  opt.max_epochs = 1;
  const std::vector<double> alphas = {1.0, 1.0};
  const auto rows = alpha_sweep(f.corpus.sentences, f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags,
                                alphas, f.hyper, opt, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].seed, f.hyper.seed);
  EXPECT_EQ(rows[1].seed, f.hyper.seed + 1000);
  EXPECT_EQ(rows[0].stats.runs, 2u);
  const std::vector<double> negative = {-1.0};
  EXPECT_THROW(alpha_sweep(f.corpus.sentences, f.corpus.sentences, f.corpus.sentences, f.corpus.words, f.tags,
                           negative, f.hyper, opt),
               ConfigError);
}

}  // namespace
}  // namespace jointtag
