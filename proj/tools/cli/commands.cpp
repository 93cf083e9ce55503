#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "jointtag/checkpoint.hpp"
#include "jointtag/corpus.hpp"
#include "jointtag/embedding_file.hpp"
#include "jointtag/errors.hpp"
#include "jointtag/json_io.hpp"
#include "jointtag/scoring.hpp"
#include "jointtag/synth.hpp"
#include "jointtag/tag_codec.hpp"
#include "jointtag/trainer.hpp"

#ifndef JOINTTAG_BUILD_ID
#define JOINTTAG_BUILD_ID "unknown"
#endif

namespace jointtag::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files

std::ifstream open_input(const std::string& path) {
  if (path.empty()) throw ConfigError("missing input path");
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    file_.open(path, std::ios::binary);
    if (!file_) throw ConfigError("cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Everything except `timestamp` is a function of inputs and config.
void write_report(const std::string& dir, const std::string& name, const std::string& command, const json& config,
                  const json& body) {
  json doc{{"build_id", JOINTTAG_BUILD_ID}, {"command", command}, {"config", config}, {"report", body},
           {"timestamp", utc_timestamp()}};
  Output out((fs::path(dir.empty() ? "." : dir) / name).string(), std::cout);
  *out << doc.dump(2) << '\n';
}

RelationSet relations_from(const std::string& path) {
  if (path.empty()) throw ConfigError("a relations file is required (--relations)");
  return RelationSet::load(path);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream s(line);
  std::vector<std::string> out;
  for (std::string w; s >> w;) out.push_back(w);
  return out;
}

// Relation name of a tag text, or nothing for "O".
std::optional<std::string> tag_relation(const std::string& text) {
  if (text == "O" || text.size() < 5) return std::nullopt;
  return text.substr(2, text.size() - 4);
}

void remember(std::vector<std::string>& names, const std::string& name) {
  if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
}

// ---------------------------------------------------------------------------
// Predictions files: {"tokens": [...], "triplets": [gold], "pred_tags": ["O", ...]}

struct PredictionLine {
  std::vector<Triplet> gold;
  std::vector<Tag> predicted;
};

std::vector<PredictionLine> read_predictions(const std::string& path, std::optional<RelationSet> relations) {
  std::vector<json> lines;
  {
    std::ifstream in = open_input(path);
    std::size_t number = 0;
    for (std::string line; std::getline(in, line);) {
      ++number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        lines.push_back(json::parse(line));
        lines.back()["__line"] = number;
      } catch (const json::exception& e) {
        throw ValidationError(path + ":" + std::to_string(number) + ": " + e.what());
      }
    }
  }
  if (!relations) {
    std::vector<std::string> names;
    for (const json& j : lines) {
      for (const json& t : j.value("triplets", json::array())) {
        if (t.contains("rel") && t["rel"].is_string()) remember(names, t["rel"].get<std::string>());
      }
      for (const json& t : j.value("pred_tags", json::array())) {
        if (!t.is_string()) continue;
        if (auto rel = tag_relation(t.get<std::string>())) remember(names, *rel);
      }
    }
    if (names.empty()) names.push_back("none");
    relations = RelationSet(names);
  }
  const TagVocabulary vocab(*relations);
  std::vector<PredictionLine> out;
  for (const json& j : lines) {
    const std::string where = path + ":" + std::to_string(j["__line"].get<std::size_t>()) + ": ";
    try {
      json sentence = j;
      sentence.erase("__line");
      sentence.erase("pred_tags");
      PredictionLine p;
      p.gold = parse_sentence(sentence.dump(), *relations).triplets;
      if (!j.contains("pred_tags") || !j["pred_tags"].is_array()) throw ValidationError("missing pred_tags");
      for (const json& t : j["pred_tags"]) p.predicted.push_back(vocab.parse(t.get<std::string>()));
      if (p.predicted.size() != j["tokens"].size()) throw ValidationError("pred_tags length differs from tokens");
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ValidationError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return out;
}

EvalReport score_predictions(const std::vector<PredictionLine>& lines) {
  EvalReport r;
  for (const auto& l : lines) r.add(l.gold, l.predicted);
  return r;
}

// ---------------------------------------------------------------------------
// Shared corpus plumbing for train / eval / sweep

struct Splits {
  std::vector<AnnotatedSentence> validation;
  std::vector<AnnotatedSentence> evaluation;
};

Splits held_out(const Config& c, const RelationSet& relations, std::ostream& err) {
  Splits s;
  if (!c.paths.validation.empty()) {
    s.validation = load_corpus(c.paths.validation, relations).sentences;
    if (!c.paths.test.empty()) s.evaluation = load_corpus(c.paths.test, relations).sentences;
    return s;
  }
  if (c.paths.test.empty()) throw ConfigError("a test corpus (--test) or a validation corpus (--validation) is required");
  const Corpus test = load_corpus(c.paths.test, relations);
  if (test.rejected_overlapping > 0) {
    err << "dropped " << test.rejected_overlapping << " test sentences with overlapping entities\n";
  }
  CorpusSplit split = split_validation(test.sentences, c.run.validation_fraction, c.run.seed);
  s.validation = std::move(split.validation);
  s.evaluation = std::move(split.evaluation);
  return s;
}

std::optional<PretrainedEmbeddings> embeddings_from(const Config& c) {
  if (c.paths.embeddings.empty()) return std::nullopt;
  return PretrainedEmbeddings::load(c.paths.embeddings);
}

std::string metrics_line(const PrfCounts& c) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << "precision " << c.precision() << "  recall " << c.recall() << "  f1 "
    << c.f1();
  return s.str();
}

// ---------------------------------------------------------------------------
// Flag plumbing: every flag is optional and only overrides the config when given.

// One flag may be registered on several subcommands.
template <typename T>
struct Flag {
  T value{};
  std::vector<CLI::Option*> options;
  bool given() const {
    return std::any_of(options.begin(), options.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
  void apply(T& target) const {
    if (given()) target = value;
  }
};

struct CommonFlags {
  std::string config_path;
  Flag<std::string> relations, train, test, validation, embeddings, checkpoint, report_dir;
  Flag<std::uint64_t> seed;
  Flag<double> alpha, learning_rate, dropout, validation_fraction;
  Flag<int> epochs, patience, batch_size, threads, embedding_dim, encoder_hidden, decoder_hidden;
  Flag<std::size_t> repeats;
  Flag<std::vector<double>> alphas;
  bool no_early_stopping = false;

  Config resolve() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    relations.apply(c.paths.relations);
    train.apply(c.paths.train);
    test.apply(c.paths.test);
    validation.apply(c.paths.validation);
    embeddings.apply(c.paths.embeddings);
    checkpoint.apply(c.paths.checkpoint);
    report_dir.apply(c.paths.report_dir);
    if (seed.given()) {
      c.run.seed = seed.value;
      c.hyper.seed = seed.value;
    }
    alpha.apply(c.hyper.alpha);
    learning_rate.apply(c.hyper.rmsprop.learning_rate);
    dropout.apply(c.hyper.dropout);
    validation_fraction.apply(c.run.validation_fraction);
    epochs.apply(c.training.max_epochs);
    patience.apply(c.training.patience);
    batch_size.apply(c.training.batch_size);
    threads.apply(c.training.threads);
    embedding_dim.apply(c.hyper.embedding_dim);
    encoder_hidden.apply(c.hyper.encoder_hidden);
    decoder_hidden.apply(c.hyper.decoder_hidden);
    repeats.apply(c.run.n_repeats);
    alphas.apply(c.run.alphas);
    if (no_early_stopping) c.training.early_stopping = false;
    return c;
  }
};

template <typename T>
CLI::Option* add_flag(CLI::App* app, const std::string& name, Flag<T>& flag, const std::string& help) {
  flag.options.push_back(app->add_option(name, flag.value, help));
  return flag.options.back();
}

void add_config(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file; flags override its values");
}

void add_training_flags(CLI::App* app, CommonFlags& f) {
  add_config(app, f);
  add_flag(app, "--relations", f.relations, "relations file, one name per line");
  add_flag(app, "--train", f.train, "training corpus (JSONL)");
  add_flag(app, "--test", f.test, "test corpus (JSONL); a validation part is split off");
  add_flag(app, "--validation", f.validation, "explicit validation corpus; disables the split");
  add_flag(app, "--embeddings", f.embeddings, "pretrained word vectors (text format)");
  add_flag(app, "--report-dir", f.report_dir, "directory for reports and history");
  add_flag(app, "--seed", f.seed, "seed for initialization, shuffling and the split");
  add_flag(app, "--alpha", f.alpha, "bias weight of relational tags");
  add_flag(app, "--learning-rate", f.learning_rate, "RMSprop learning rate");
  add_flag(app, "--dropout", f.dropout, "embedding dropout");
  add_flag(app, "--validation-fraction", f.validation_fraction, "share of the test corpus used for validation");
  add_flag(app, "--epochs", f.epochs, "maximum epochs");
  add_flag(app, "--patience", f.patience, "early-stopping patience in epochs");
  add_flag(app, "--batch-size", f.batch_size, "sentences per update");
  add_flag(app, "--threads", f.threads, "worker threads per batch");
  add_flag(app, "--embedding-dim", f.embedding_dim, "word vector size");
  add_flag(app, "--encoder-hidden", f.encoder_hidden, "encoder units per direction");
  add_flag(app, "--decoder-hidden", f.decoder_hidden, "decoder units");
  app->add_flag("--no-early-stopping", f.no_early_stopping, "train for all epochs and keep the last model");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_vocab(const Config& c, const std::string& out_path, std::ostream& out) {
  const TagVocabulary vocab(relations_from(c.paths.relations));
  Output o(out_path, out);
  vocab.write(*o);
  return kSuccess;
}

int cmd_encode(const Config& c, const std::string& input, const std::string& out_path, std::ostream& out) {
  const RelationSet relations = relations_from(c.paths.relations);
  const TagVocabulary vocab(relations);
  std::ifstream in = open_input(input);
  Output o(out_path, out);
  std::size_t number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const std::vector<Tag> tags = encode(parse_sentence(line, relations), vocab);
      for (std::size_t i = 0; i < tags.size(); ++i) *o << (i ? " " : "") << vocab.text(tags[i]);
      *o << '\n';
    } catch (const ValidationError& e) {
      throw ValidationError(input + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return kSuccess;
}

int cmd_decode(const Config& c, const std::string& input, const std::string& out_path, std::ostream& out) {
  std::vector<std::string> lines;
  {
    std::ifstream in = open_input(input);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
  }
  RelationSet relations;
  if (!c.paths.relations.empty()) {
    relations = relations_from(c.paths.relations);
  } else {
    std::vector<std::string> names;
    for (const auto& line : lines) {
      for (const auto& t : split_ws(line)) {
        if (auto rel = tag_relation(t)) remember(names, *rel);
      }
    }
    if (names.empty()) names.push_back("none");
    relations = RelationSet(names);
  }
  const TagVocabulary vocab(relations);
  Output o(out_path, out);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    std::vector<Tag> tags;
    for (const auto& t : split_ws(lines[k])) {
      try {
        tags.push_back(vocab.parse(t));
      } catch (const ValidationError& e) {
        throw ValidationError(input + ":" + std::to_string(k + 1) + ": " + e.what());
      }
    }
    const DecodeResult r = decode_detailed(tags);
    json triplets = json::array();
    for (const auto& t : r.triplets) triplets.push_back(triplet_json(t, relations));
    json unpaired = json::array();
    for (const auto& e : r.unpaired) {
      unpaired.push_back({{"span", {e.span.start, e.span.end}},
                          {"rel", relations.name(e.relation)},
                          {"role", e.role == Role::kFirst ? 1 : 2}});
    }
    *o << json{{"triplets", triplets}, {"unpaired", unpaired}}.dump() << '\n';
  }
  return kSuccess;
}

int cmd_synth(Config c, std::size_t n_sentences, std::optional<std::uint64_t> seed, const std::string& out_path,
              const std::string& relations_out, std::ostream& out, std::ostream& err) {
  if (n_sentences > 0) c.synth.n_sentences = n_sentences;
  if (seed) c.synth.seed = *seed;
  const Corpus corpus = generate(c.synth);
  {
    Output o(out_path, out);
    write_corpus(*o, corpus.sentences, corpus.relations);
  }
  if (!relations_out.empty()) {
    Output o(relations_out, out);
    for (const auto& name : corpus.relations.names()) *o << name << '\n';
  }
  err << "generated " << corpus.sentences.size() << " sentences with " << corpus.triplet_count() << " triplets\n";
  return kSuccess;
}

int cmd_train(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.paths.train.empty()) throw ConfigError("a training corpus (--train) is required");
  if (c.paths.checkpoint.empty()) throw ConfigError("a checkpoint path (--checkpoint) is required");
  const RelationSet relations = relations_from(c.paths.relations);
  const TagVocabulary tags(relations);
  const Corpus train_corpus = load_corpus(c.paths.train, relations);
  if (train_corpus.rejected_overlapping > 0) {
    err << "dropped " << train_corpus.rejected_overlapping << " training sentences with overlapping entities\n";
  }
  const Splits held = held_out(c, relations, err);
  const auto pretrained = embeddings_from(c);

  Output history((fs::path(c.paths.report_dir.empty() ? "." : c.paths.report_dir) / "history.jsonl").string(), out);
  TrainCallbacks callbacks;
  callbacks.on_epoch = [&](const EpochRecord& e) {
    *history << json(e).dump() << '\n';
    (*history).flush();
    err << "epoch " << e.epoch << "  loss " << std::setprecision(6) << e.loss << "  validation f1 "
        << std::setprecision(4) << e.validation_f1 << (e.improved ? "  *" : "") << '\n';
  };
  const TrainResult result = train(train_corpus.sentences, held.validation, train_corpus.words, tags, c.hyper, c.training,
                                   callbacks, pretrained ? &*pretrained : nullptr);

  Checkpoint ckpt{c.hyper, train_corpus.words, relations, result.params, result.optimizer};
  save_checkpoint(c.paths.checkpoint, ckpt);

  json body{{"best_epoch", result.best_epoch},
            {"best_validation_f1", result.best_validation_f1},
            {"epochs_run", result.history.size()},
            {"train_sentences", train_corpus.sentences.size()},
            {"validation_sentences", held.validation.size()},
            {"rejected_overlapping", train_corpus.rejected_overlapping}};
  if (!held.evaluation.empty()) {
    const EvalReport r = evaluate(result.params, c.hyper, held.evaluation, train_corpus.words, tags);
    body["evaluation"] = r;
    out << "evaluation " << metrics_line(r.triplet) << '\n';
  }
  write_report(c.paths.report_dir, "train_report.json", "train", c, body);
  return kSuccess;
}

void write_prediction_lines(std::ostream& o, std::span<const AnnotatedSentence> sentences,
                            const std::vector<std::vector<TagIndex>>& predictions, const TagVocabulary& tags) {
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    json line = json::parse(format_sentence(sentences[i], tags.relations()));
    json pred = json::array();
    for (TagIndex t : predictions[i]) pred.push_back(tags.text(t));
    line["pred_tags"] = pred;
    o << line.dump() << '\n';
  }
}

int cmd_eval(const Config& c, const std::string& predictions_in, const std::string& predictions_out, bool whole_file,
             std::ostream& out, std::ostream& err) {
  EvalReport report;
  json body;
  if (!predictions_in.empty()) {
    std::optional<RelationSet> relations;
    if (!c.paths.relations.empty()) relations = relations_from(c.paths.relations);
    report = score_predictions(read_predictions(predictions_in, relations));
    body["source"] = "predictions";
  } else {
    if (c.paths.checkpoint.empty()) throw ConfigError("eval needs --checkpoint or --predictions");
    const Checkpoint ckpt = load_checkpoint(c.paths.checkpoint);
    const TagVocabulary tags = ckpt.tag_vocabulary();
    std::vector<AnnotatedSentence> sentences;
    if (whole_file || !c.paths.validation.empty()) {
      if (c.paths.test.empty()) throw ConfigError("a test corpus (--test) is required");
      sentences = load_corpus(c.paths.test, ckpt.relations).sentences;
    } else {
      sentences = held_out(c, ckpt.relations, err).evaluation;
    }
    std::vector<std::vector<TagIndex>> predictions;
    report = evaluate(ckpt.params, ckpt.hyper, sentences, ckpt.words, tags, &predictions);
    if (!predictions_out.empty()) {
      Output o(predictions_out, out);
      write_prediction_lines(*o, sentences, predictions, tags);
    }
    body["source"] = "checkpoint";
  }
  body["evaluation"] = report;
  out << "triplet " << metrics_line(report.triplet) << '\n';
  write_report(c.paths.report_dir, "eval_report.json", "eval", c, body);
  return kSuccess;
}

int cmd_sweep(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.paths.train.empty()) throw ConfigError("a training corpus (--train) is required");
  if (c.run.alphas.empty()) throw ConfigError("alphas must not be empty");
  const RelationSet relations = relations_from(c.paths.relations);
  const TagVocabulary tags(relations);
  const Corpus train_corpus = load_corpus(c.paths.train, relations);
  const Splits held = held_out(c, relations, err);
  if (held.evaluation.empty()) throw ConfigError("sweep needs a non-empty evaluation part");
  const auto pretrained = embeddings_from(c);
  const std::vector<SweepRow> rows =
      alpha_sweep(train_corpus.sentences, held.validation, held.evaluation, train_corpus.words, tags, c.run.alphas,
                  c.hyper, c.training, c.run.n_repeats, pretrained ? &*pretrained : nullptr);
  out << "alpha     precision  recall     f1         single_ratio\n";
  for (const auto& r : rows) {
    const auto& m = r.stats.metrics;
    out << std::fixed << std::setprecision(4) << std::left << std::setw(10) << r.alpha << std::setw(11)
        << m.at("precision").mean << std::setw(11) << m.at("recall").mean << std::setw(11) << m.at("f1").mean
        << m.at("single_ratio").mean << '\n';
  }
  write_report(c.paths.report_dir, "sweep_report.json", "sweep", c, json{{"rows", rows}});
  return kSuccess;
}

int cmd_analyze(const Config& c, const std::string& predictions_in, std::ostream& out) {
  if (predictions_in.empty()) throw ConfigError("analyze needs --predictions");
  std::optional<RelationSet> relations;
  if (!c.paths.relations.empty()) relations = relations_from(c.paths.relations);
  const EvalReport r = score_predictions(read_predictions(predictions_in, relations));
  out << "triplet " << metrics_line(r.triplet) << '\n'
      << "e1      " << metrics_line(r.e1) << '\n'
      << "e2      " << metrics_line(r.e2) << '\n'
      << "pair    " << metrics_line(r.pair) << '\n'
      << std::fixed << std::setprecision(4) << "single ratio " << r.single_ratio() << "  e1 " << r.single_ratio_e1()
      << "  e2 " << r.single_ratio_e2() << '\n';
  write_report(c.paths.report_dir, "analysis_report.json", "analyze", c, json{{"evaluation", r}});
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint entity and relation extraction as sequence tagging"};
  app.name("jointtag");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(JOINTTAG_BUILD_ID));

  CommonFlags f;
  std::string input, out_path, predictions_in, predictions_out, relations_out;
  std::size_t n_sentences = 0;
  std::uint64_t synth_seed = 0;
  bool whole_file = false;

  CLI::App* vocab = app.add_subcommand("vocab", "write the tag vocabulary for a relations file");
  add_config(vocab, f);
  add_flag(vocab, "--relations", f.relations, "relations file, one name per line");
  vocab->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* enc = app.add_subcommand("encode", "corpus JSONL -> one line of tags per sentence");
  add_config(enc, f);
  add_flag(enc, "--relations", f.relations, "relations file");
  enc->add_option("--input", input, "corpus file")->required();
  enc->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* dec = app.add_subcommand("decode", "tag lines -> triplet JSONL");
  add_config(dec, f);
  add_flag(dec, "--relations", f.relations, "relations file (inferred from the tags when omitted)");
  dec->add_option("--input", input, "tag file, whitespace-separated tags per line")->required();
  dec->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* syn = app.add_subcommand("synth", "generate a synthetic corpus");
  add_config(syn, f);
  CLI::Option* n_opt = syn->add_option("--n-sentences", n_sentences, "number of sentences");
  CLI::Option* seed_opt = syn->add_option("--seed", synth_seed, "generator seed");
  syn->add_option("--out", out_path, "corpus output file (default stdout)");
  syn->add_option("--relations-out", relations_out, "also write the relation names here");

  CLI::App* trn = app.add_subcommand("train", "train a model and save a checkpoint");
  add_training_flags(trn, f);
  add_flag(trn, "--checkpoint", f.checkpoint, "checkpoint output path");

  CLI::App* ev = app.add_subcommand("eval", "score a checkpoint or a predictions file");
  add_config(ev, f);
  add_flag(ev, "--checkpoint", f.checkpoint, "checkpoint to evaluate");
  add_flag(ev, "--test", f.test, "test corpus");
  add_flag(ev, "--validation", f.validation, "validation corpus used in training (scores the whole test file)");
  add_flag(ev, "--relations", f.relations, "relations file for --predictions");
  add_flag(ev, "--seed", f.seed, "seed of the validation split");
  add_flag(ev, "--validation-fraction", f.validation_fraction, "share of the test corpus held out for validation");
  add_flag(ev, "--report-dir", f.report_dir, "directory for the report");
  ev->add_option("--predictions", predictions_in, "score this predictions file instead of a checkpoint");
  ev->add_option("--predictions-out", predictions_out, "write predictions here");
  ev->add_flag("--all", whole_file, "score every test sentence instead of the evaluation part");

  CLI::App* sw = app.add_subcommand("sweep", "train and evaluate for several alpha values");
  add_training_flags(sw, f);
  add_flag(sw, "--alphas", f.alphas, "alpha values")->delimiter(',');
  add_flag(sw, "--repeats", f.repeats, "runs per alpha");

  CLI::App* an = app.add_subcommand("analyze", "element metrics and single-entity ratios of a predictions file");
  add_config(an, f);
  add_flag(an, "--relations", f.relations, "relations file (inferred when omitted)");
  add_flag(an, "--report-dir", f.report_dir, "directory for the report");
  an->add_option("--predictions", predictions_in, "predictions file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    const Config c = f.resolve();
    if (vocab->parsed()) return cmd_vocab(c, out_path, out);
    if (enc->parsed()) return cmd_encode(c, input, out_path, out);
    if (dec->parsed()) return cmd_decode(c, input, out_path, out);
    if (syn->parsed()) {
      return cmd_synth(c, n_opt->count() ? n_sentences : 0,
                       seed_opt->count() ? std::optional<std::uint64_t>(synth_seed) : std::nullopt, out_path,
                       relations_out, out, err);
    }
    if (trn->parsed()) return cmd_train(c, out, err);
    if (ev->parsed()) return cmd_eval(c, predictions_in, predictions_out, whole_file, out, err);
    if (sw->parsed()) return cmd_sweep(c, out, err);
    if (an->parsed()) return cmd_analyze(c, predictions_in, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace jointtag::cli
