#include "jointtag/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "jointtag/errors.hpp"
#include "jointtag/random.hpp"

namespace jointtag {

std::vector<EncodedSentence> prepare(std::span<const AnnotatedSentence> sentences, const WordVocabulary& words,
                                     const TagVocabulary& tags) {
  std::vector<EncodedSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    if (s.tokens.empty()) continue;
    out.push_back({words.ids(s.tokens), encode_indices(s, tags)});
  }
  return out;
}

std::vector<TagIndex> predict(const Parameters& params, const Hyperparameters& hyper, std::span<const WordId> ids) {
  if (ids.empty()) return {};
  const ForwardResult r = forward(ids, std::nullopt, params, hyper, Mode::kEval, nullptr);
  return predict_tags(r.trace.probabilities);
}

EvalReport evaluate(const Parameters& params, const Hyperparameters& hyper, std::span<const AnnotatedSentence> gold,
                    const WordVocabulary& words, const TagVocabulary& tags,
                    std::vector<std::vector<TagIndex>>* predictions) {
  EvalReport report;
  if (predictions) predictions->clear();
  for (const auto& s : gold) {
    const std::vector<WordId> ids = words.ids(s.tokens);
    std::vector<TagIndex> pred = predict(params, hyper, ids);
    report.add(s.triplets, to_tags(pred, tags));
    if (predictions) predictions->push_back(std::move(pred));
  }
  return report;
}

double token_accuracy(const Parameters& params, const Hyperparameters& hyper, std::span<const EncodedSentence> data) {
  std::size_t right = 0, total = 0;
  for (const auto& s : data) {
    const auto pred = predict(params, hyper, s.ids);
    for (std::size_t t = 0; t < pred.size(); ++t) right += pred[t] == s.tags[t] ? 1 : 0;
    total += pred.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(right) / static_cast<double>(total);
}

double dataset_loss(const Parameters& params, const Hyperparameters& hyper, std::span<const EncodedSentence> data) {
  double total = 0.0;
  for (const auto& s : data) {
    total += *forward(s.ids, std::span<const TagIndex>(s.tags), params, hyper, Mode::kEval, nullptr).loss;
  }
  return total;
}

namespace {

struct BatchOutcome {
  double loss = 0.0;
  std::size_t tokens = 0;
  bool finite = true;
};

// Forward/backward over data[order[begin..end)] into grads.
BatchOutcome run_slice(std::span<const EncodedSentence> data, std::span<const std::size_t> order, std::size_t begin,
                       std::size_t end, const Parameters& params, const Hyperparameters& hyper, std::uint64_t epoch_seed,
                       Gradients& grads) {
  BatchOutcome out;
  for (std::size_t k = begin; k < end; ++k) {
    const std::size_t idx = order[k];
    const EncodedSentence& s = data[idx];
    Rng rng(mix_seed(epoch_seed, idx));
    ForwardResult r = forward(s.ids, std::span<const TagIndex>(s.tags), params, hyper, Mode::kTrain, &rng);
    if (!std::isfinite(*r.loss)) {
      out.finite = false;
      return out;
    }
    out.loss += *r.loss;
    out.tokens += s.ids.size();
    accumulate_backward(r.trace, s.tags, params, hyper, grads);
  }
  return out;
}

}  // namespace

TrainResult train(std::span<const AnnotatedSentence> train_set, std::span<const AnnotatedSentence> validation_set,
                  const WordVocabulary& words, const TagVocabulary& tags, const Hyperparameters& hyper,
                  const TrainOptions& options, const TrainCallbacks& callbacks, const PretrainedEmbeddings* pretrained,
                  const Parameters* initial) {
  hyper.validate();
  if (options.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (options.max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  const std::vector<EncodedSentence> data = prepare(train_set, words, tags);
  if (data.empty()) throw ValidationError("training set has no non-empty sentences");

  const ModelShape shape = ModelShape::from(hyper, words.size(), tags.size());
  TrainResult result;
  if (initial != nullptr) {
    check_shapes(*initial, shape);
    result.params = *initial;
  } else {
    Rng init_rng(mix_seed(hyper.seed, 0));
    result.params = init_parameters(shape, hyper, init_rng, pretrained, words.words());
  }
  Parameters params = result.params;
  RmspropState& opt = result.optimizer;

  const int threads = std::max(1, options.threads);
  std::vector<Gradients> partial(static_cast<std::size_t>(threads), Parameters::zeros(shape));
  Gradients grads = Parameters::zeros(shape);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const bool validate_each_epoch = !validation_set.empty();
  const std::vector<EncodedSentence> validation_data = prepare(validation_set, words, tags);
  result.best_validation_f1 = -1.0;
  double best_validation_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(hyper.seed, 1000000 + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    const std::uint64_t epoch_seed = mix_seed(hyper.seed, 2000000 + static_cast<std::uint64_t>(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t tokens = 0;
    const auto batch = static_cast<std::size_t>(options.batch_size);
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::size_t stop = std::min(order.size(), start + batch);
      std::vector<BatchOutcome> outcomes(static_cast<std::size_t>(threads));
      if (threads == 1) {
        grads.set_zero();
        outcomes[0] = run_slice(data, order, start, stop, params, hyper, epoch_seed, grads);
      } else {
        const std::size_t per = (stop - start + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
        std::vector<std::thread> workers;
        for (int w = 0; w < threads; ++w) {
          const std::size_t lo = std::min(stop, start + per * static_cast<std::size_t>(w));
          const std::size_t hi = std::min(stop, lo + per);
          partial[static_cast<std::size_t>(w)].set_zero();
          workers.emplace_back([&, w, lo, hi] {
            outcomes[static_cast<std::size_t>(w)] =
                run_slice(data, order, lo, hi, params, hyper, epoch_seed, partial[static_cast<std::size_t>(w)]);
          });
        }
        for (auto& t : workers) t.join();
        grads.set_zero();
        for (const auto& p : partial) grads += p;
      }
      for (const auto& o : outcomes) {
        if (!o.finite) {
          throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1));
        }
        rec.loss += o.loss;
        tokens += o.tokens;
      }
      clip_global_norm(grads, options.clip_norm);
      rmsprop_step(params, grads, opt, hyper.rmsprop);
    }
    rec.mean_token_loss = tokens == 0 ? 0.0 : rec.loss / static_cast<double>(tokens);
    if (options.track_train_accuracy) rec.train_token_accuracy = token_accuracy(params, hyper, data);

    if (validate_each_epoch) {
      rec.validation_f1 = evaluate(params, hyper, validation_set, words, tags).triplet.f1();
      rec.validation_loss = dataset_loss(params, hyper, validation_data);
    }
    if (!options.early_stopping || !validate_each_epoch) {
      rec.improved = true;
      result.params = params;
      result.best_epoch = epoch;
      result.best_validation_f1 = rec.validation_f1;
    } else if (rec.validation_f1 > result.best_validation_f1 ||
               (rec.validation_f1 == result.best_validation_f1 && rec.validation_loss < best_validation_loss)) {
      rec.improved = true;
      result.params = params;
      result.best_epoch = epoch;
      result.best_validation_f1 = rec.validation_f1;
      best_validation_loss = rec.validation_loss;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.history.push_back(rec);
    if (callbacks.on_epoch) callbacks.on_epoch(rec);
    if (options.early_stopping && validate_each_epoch && since_best >= options.patience) break;
  }
  if (result.best_validation_f1 < 0.0) result.best_validation_f1 = 0.0;
  return result;
}

RunMetrics report_metrics(const EvalReport& r) {
  return {{"precision", r.triplet.precision()}, {"recall", r.triplet.recall()},   {"f1", r.triplet.f1()},
          {"e1_f1", r.e1.f1()},                 {"e2_f1", r.e2.f1()},             {"pair_f1", r.pair.f1()},
          {"single_ratio", r.single_ratio()},   {"single_ratio_e1", r.single_ratio_e1()},
          {"single_ratio_e2", r.single_ratio_e2()}};
}

std::vector<SweepRow> alpha_sweep(std::span<const AnnotatedSentence> train_set,
                                  std::span<const AnnotatedSentence> validation_set,
                                  std::span<const AnnotatedSentence> evaluation_set, const WordVocabulary& words,
                                  const TagVocabulary& tags, std::span<const double> alphas,
                                  const Hyperparameters& hyper, const TrainOptions& options, std::size_t repeats,
                                  const PretrainedEmbeddings* pretrained) {
  if (alphas.empty()) throw ConfigError("alpha sweep needs at least one alpha");
  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < alphas.size(); ++r) {
    SweepRow row;
    row.alpha = alphas[r];
    row.seed = hyper.seed + 1000 * r;
    row.stats = repeat_runs(repeats, row.seed, [&](std::uint64_t seed) {
      Hyperparameters h = hyper;
      h.alpha = row.alpha;
      h.seed = seed;
      const TrainResult tr = train(train_set, validation_set, words, tags, h, options, {}, pretrained);
      return report_metrics(evaluate(tr.params, h, evaluation_set, words, tags));
    });
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace jointtag
