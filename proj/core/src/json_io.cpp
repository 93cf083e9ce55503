#include "jointtag/json_io.hpp"

namespace jointtag {

using nlohmann::json;

void to_json(json& j, const RmspropConfig& c) {
  j = json{{"learning_rate", c.learning_rate}, {"decay", c.decay}, {"epsilon", c.epsilon}};
}

void from_json(const json& j, RmspropConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.decay = j.value("decay", c.decay);
  c.epsilon = j.value("epsilon", c.epsilon);
}

void to_json(json& j, const Hyperparameters& h) {
  j = json{{"embedding_dim", h.embedding_dim},
           {"encoder_hidden", h.encoder_hidden},
           {"decoder_hidden", h.decoder_hidden},
           {"tag_dim", h.tag_dim},
           {"alpha", h.alpha},
           {"dropout", h.dropout},
           {"rmsprop", h.rmsprop},
           {"seed", h.seed},
           {"diagonal_peepholes", h.diagonal_peepholes},
           {"learn_start_tag", h.learn_start_tag}};
}

void from_json(const json& j, Hyperparameters& h) {
  h.embedding_dim = j.value("embedding_dim", h.embedding_dim);
  h.encoder_hidden = j.value("encoder_hidden", h.encoder_hidden);
  h.decoder_hidden = j.value("decoder_hidden", h.decoder_hidden);
  h.tag_dim = j.value("tag_dim", h.tag_dim);
  h.alpha = j.value("alpha", h.alpha);
  h.dropout = j.value("dropout", h.dropout);
  if (j.contains("rmsprop")) from_json(j.at("rmsprop"), h.rmsprop);
  h.seed = j.value("seed", h.seed);
  h.diagonal_peepholes = j.value("diagonal_peepholes", h.diagonal_peepholes);
  h.learn_start_tag = j.value("learn_start_tag", h.learn_start_tag);
}

void to_json(json& j, const TrainOptions& o) {
  j = json{{"max_epochs", o.max_epochs}, {"patience", o.patience},   {"early_stopping", o.early_stopping},
           {"batch_size", o.batch_size}, {"clip_norm", o.clip_norm}, {"threads", o.threads},
           {"track_train_accuracy", o.track_train_accuracy}};
}

void from_json(const json& j, TrainOptions& o) {
  o.max_epochs = j.value("max_epochs", o.max_epochs);
  o.patience = j.value("patience", o.patience);
  o.early_stopping = j.value("early_stopping", o.early_stopping);
  o.batch_size = j.value("batch_size", o.batch_size);
  o.clip_norm = j.value("clip_norm", o.clip_norm);
  o.threads = j.value("threads", o.threads);
  o.track_train_accuracy = j.value("track_train_accuracy", o.track_train_accuracy);
}

void to_json(json& j, const GeneratorConfig& c) {
  j = json{{"n_sentences", c.n_sentences},
           {"relations", c.relations},
           {"vocab_size", c.vocab_size},
           {"max_entities_per_sentence", c.max_entities_per_sentence},
           {"max_entity_len", c.max_entity_len},
           {"min_sentence_len", c.min_sentence_len},
           {"max_sentence_len", c.max_sentence_len},
           {"distractor_prob", c.distractor_prob},
           {"seed", c.seed}};
}

void from_json(const json& j, GeneratorConfig& c) {
  c.n_sentences = j.value("n_sentences", c.n_sentences);
  c.relations = j.value("relations", c.relations);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.max_entities_per_sentence = j.value("max_entities_per_sentence", c.max_entities_per_sentence);
  c.max_entity_len = j.value("max_entity_len", c.max_entity_len);
  c.min_sentence_len = j.value("min_sentence_len", c.min_sentence_len);
  c.max_sentence_len = j.value("max_sentence_len", c.max_sentence_len);
  c.distractor_prob = j.value("distractor_prob", c.distractor_prob);
  c.seed = j.value("seed", c.seed);
}

void to_json(json& j, const EpochRecord& e) {
  j = json{{"epoch", e.epoch},
           {"loss", e.loss},
           {"mean_token_loss", e.mean_token_loss},
           {"validation_f1", e.validation_f1},
           {"validation_loss", e.validation_loss},
           {"improved", e.improved}};
  if (e.train_token_accuracy > 0.0) j["train_token_accuracy"] = e.train_token_accuracy;
}

void to_json(json& j, const SweepRow& r) { j = json{{"alpha", r.alpha}, {"seed", r.seed}, {"stats", r.stats}}; }

void to_json(json& j, const PrfCounts& c) {
  j = json{{"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()},
           {"gold", c.gold},             {"predicted", c.predicted}, {"correct", c.correct}};
}

void to_json(json& j, const EvalReport& r) {
  j = json{{"sentences", r.sentences},
           {"triplet", r.triplet},
           {"e1", r.e1},
           {"e2", r.e2},
           {"pair", r.pair},
           {"single_entities",
            {{"single_e1", r.singles.single_e1},
             {"single_e2", r.singles.single_e2},
             {"paired", r.singles.paired},
             {"ratio_e1", r.single_ratio_e1()},
             {"ratio_e2", r.single_ratio_e2()},
             {"ratio", r.single_ratio()}}}};
}

void to_json(json& j, const MeanStd& m) { j = json{{"mean", m.mean}, {"std", m.std}}; }

void to_json(json& j, const RunStatistics& s) {
  j = json{{"runs", s.runs}, {"metrics", s.metrics}, {"samples", s.samples}};
}

json triplet_json(const Triplet& t, const RelationSet& relations) {
  return json{{"e1", {t.e1.start, t.e1.end}}, {"rel", relations.name(t.relation)}, {"e2", {t.e2.start, t.e2.end}}};
}

}  // namespace jointtag
