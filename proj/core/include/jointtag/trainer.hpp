#pragma once

// Training loop, evaluation and the alpha sweep.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jointtag/corpus.hpp"
#include "jointtag/embedding_file.hpp"
#include "jointtag/model.hpp"
#include "jointtag/optimizer.hpp"
#include "jointtag/scoring.hpp"
#include "jointtag/stats.hpp"

namespace jointtag {

struct TrainOptions {
  int max_epochs = 50;
  int patience = 5;            // epochs without improvement: higher validation F1, or equal F1 and lower validation loss
  bool early_stopping = true;  // off: run max_epochs and keep the last model
  int batch_size = 32;
  double clip_norm = 5.0;      // global-norm clip, <= 0 disables
  int threads = 1;
  bool track_train_accuracy = false;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;             // summed biased loss over the epoch
  double mean_token_loss = 0.0;  // reporting only
  double validation_f1 = 0.0;
  double validation_loss = 0.0;  // summed biased loss, eval mode
  double train_token_accuracy = 0.0;  // only when tracked
  bool improved = false;
};

struct TrainResult {
  Parameters params;  // best by validation F1 (or last, without early stopping)
  RmspropState optimizer;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_validation_f1 = 0.0;
};

struct TrainCallbacks {
  std::function<void(const EpochRecord&)> on_epoch;
};

// A sentence prepared for the network.
struct EncodedSentence {
  std::vector<WordId> ids;
  std::vector<TagIndex> tags;
};

std::vector<EncodedSentence> prepare(std::span<const AnnotatedSentence> sentences, const WordVocabulary& words,
                                     const TagVocabulary& tags);

// Greedy tags for one sentence (eval mode).
std::vector<TagIndex> predict(const Parameters& params, const Hyperparameters& hyper, std::span<const WordId> ids);

// Scores the model on gold sentences. When `predictions` is given it
// receives the predicted tag indices per sentence.
EvalReport evaluate(const Parameters& params, const Hyperparameters& hyper, std::span<const AnnotatedSentence> gold,
                    const WordVocabulary& words, const TagVocabulary& tags,
                    std::vector<std::vector<TagIndex>>* predictions = nullptr);

// Summed biased loss in eval mode.
double dataset_loss(const Parameters& params, const Hyperparameters& hyper, std::span<const EncodedSentence> data);

double token_accuracy(const Parameters& params, const Hyperparameters& hyper, std::span<const EncodedSentence> data);

// Trains from `initial` (or a fresh init seeded by hyper.seed). Throws
// NumericError naming epoch and batch when a loss turns non-finite.
TrainResult train(std::span<const AnnotatedSentence> train_set, std::span<const AnnotatedSentence> validation_set,
                  const WordVocabulary& words, const TagVocabulary& tags, const Hyperparameters& hyper,
                  const TrainOptions& options, const TrainCallbacks& callbacks = {},
                  const PretrainedEmbeddings* pretrained = nullptr, const Parameters* initial = nullptr);

struct SweepRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  RunStatistics stats;  // metrics: precision, recall, f1, single_ratio, ...
};

// Row r trains with seed hyper.seed + 1000*r (then +k per repeat) so that
// duplicate alphas give independent rows.
std::vector<SweepRow> alpha_sweep(std::span<const AnnotatedSentence> train_set,
                                  std::span<const AnnotatedSentence> validation_set,
                                  std::span<const AnnotatedSentence> evaluation_set, const WordVocabulary& words,
                                  const TagVocabulary& tags, std::span<const double> alphas,
                                  const Hyperparameters& hyper, const TrainOptions& options, std::size_t repeats = 1,
                                  const PretrainedEmbeddings* pretrained = nullptr);

// Metrics recorded per run by the sweep.
RunMetrics report_metrics(const EvalReport& report);

}  // namespace jointtag
