#include "jointtag/model.hpp"

#include <algorithm>
#include <cmath>

#include "jointtag/embedding_file.hpp"
#include "jointtag/errors.hpp"

namespace jointtag {

void Hyperparameters::validate() const {
  if (embedding_dim < 1 || encoder_hidden < 1 || decoder_hidden < 1) {
    throw ConfigError("model dimensions must be >= 1");
  }
  if (tag_dim < 0) throw ConfigError("tag_dim must be >= 1 (or 0 for the tag count)");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(rmsprop.learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(rmsprop.decay >= 0.0 && rmsprop.decay < 1.0)) throw ConfigError("rmsprop decay must lie in [0, 1)");
  if (!(rmsprop.epsilon > 0.0)) throw ConfigError("rmsprop epsilon must be > 0");
}

ModelShape ModelShape::from(const Hyperparameters& hyper, std::size_t words, std::size_t tags) {
  hyper.validate();
  ModelShape s;
  s.words = words;
  s.tags = tags;
  s.embedding_dim = hyper.embedding_dim;
  s.encoder_hidden = hyper.encoder_hidden;
  s.decoder_hidden = hyper.decoder_hidden;
  s.tag_dim = hyper.tag_dim == 0 ? static_cast<int>(tags) : hyper.tag_dim;
  s.learn_start_tag = hyper.learn_start_tag;
  return s;
}

namespace {

LstmGate zero_gate(Eigen::Index out, Eigen::Index in, Eigen::Index extra) {
  return {Matrix::Zero(out, in), Matrix::Zero(out, out), Matrix::Zero(extra == 0 ? 0 : out, extra),
          Vector::Zero(out)};
}

template <typename Ref, typename Gate, typename Out>
void push_gate(Out& out, const std::string& prefix, Gate& g) {
  out.push_back(Ref{prefix + ".input", g.input.data(), g.input.rows(), g.input.cols()});
  out.push_back(Ref{prefix + ".recurrent", g.recurrent.data(), g.recurrent.rows(), g.recurrent.cols()});
  if (g.extra.size() > 0) {
    out.push_back(Ref{prefix + ".extra", g.extra.data(), g.extra.rows(), g.extra.cols()});
  }
  out.push_back(Ref{prefix + ".bias", g.bias.data(), g.bias.rows(), 1});
}

template <typename Ref, typename P>
std::vector<Ref> collect(P& p) {
  std::vector<Ref> out;
  out.push_back(Ref{"embedding", p.embedding.data(), p.embedding.rows(), p.embedding.cols()});
  for (auto [name, enc] : {std::pair{"encoder.forward", &p.forward_encoder},
                           std::pair{"encoder.backward", &p.backward_encoder}}) {
    const std::string prefix(name);
    push_gate<Ref>(out, prefix + ".input_gate", enc->input_gate);
    push_gate<Ref>(out, prefix + ".forget_gate", enc->forget_gate);
    push_gate<Ref>(out, prefix + ".candidate", enc->candidate);
    push_gate<Ref>(out, prefix + ".output_gate", enc->output_gate);
  }
  push_gate<Ref>(out, "decoder.input_gate", p.decoder.input_gate);
  push_gate<Ref>(out, "decoder.forget_gate", p.decoder.forget_gate);
  push_gate<Ref>(out, "decoder.candidate", p.decoder.candidate);
  push_gate<Ref>(out, "decoder.output_gate", p.decoder.output_gate);
  auto& d = p.decoder;
  out.push_back(Ref{"decoder.tag_projection", d.tag_projection.data(), d.tag_projection.rows(),
                    d.tag_projection.cols()});
  out.push_back(Ref{"decoder.tag_bias", d.tag_bias.data(), d.tag_bias.rows(), 1});
  out.push_back(Ref{"softmax.weights", p.softmax_weights.data(), p.softmax_weights.rows(),
                    p.softmax_weights.cols()});
  out.push_back(Ref{"softmax.bias", p.softmax_bias.data(), p.softmax_bias.rows(), 1});
  if (p.start_tag.size() > 0) {
    out.push_back(Ref{"start_tag", p.start_tag.data(), p.start_tag.rows(), 1});
  }
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vector sigmoid(const Vector& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }
Vector tanh_of(const Vector& x) { return x.array().tanh().matrix(); }

}  // namespace

Parameters Parameters::zeros(const ModelShape& s) {
  const Eigen::Index d = s.embedding_dim;
  const Eigen::Index h = s.encoder_hidden;
  const Eigen::Index hd = s.decoder_hidden;
  const Eigen::Index t = s.tag_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(s.tags);

  Parameters p;
  p.embedding = Matrix::Zero(static_cast<Eigen::Index>(s.words), d);
  for (EncoderLstm* enc : {&p.forward_encoder, &p.backward_encoder}) {
    enc->input_gate = zero_gate(h, d, h);
    enc->forget_gate = zero_gate(h, d, h);
    enc->candidate = zero_gate(h, d, 0);
    enc->output_gate = zero_gate(h, d, h);
  }
  p.decoder.input_gate = zero_gate(hd, 2 * h, t);
  p.decoder.forget_gate = zero_gate(hd, 2 * h, t);
  p.decoder.candidate = zero_gate(hd, 2 * h, t);
  p.decoder.output_gate = zero_gate(hd, 2 * h, hd);
  p.decoder.tag_projection = Matrix::Zero(t, hd);
  p.decoder.tag_bias = Vector::Zero(t);
  p.softmax_weights = Matrix::Zero(n, t);
  p.softmax_bias = Vector::Zero(n);
  p.start_tag = Vector::Zero(s.learn_start_tag ? t : 0);
  return p;
}

std::vector<TensorRef> Parameters::tensors() { return collect<TensorRef>(*this); }
std::vector<ConstTensorRef> Parameters::tensors() const { return collect<ConstTensorRef>(*this); }

std::size_t Parameters::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += static_cast<std::size_t>(t.size());
  return n;
}

void Parameters::set_zero() {
  for (auto& t : tensors()) std::fill(t.values().begin(), t.values().end(), 0.0);
}

Parameters& Parameters::operator+=(const Parameters& other) {
  auto mine = tensors();
  auto theirs = other.tensors();
  if (mine.size() != theirs.size()) throw ShapeError("parameter sets differ in tensor count");
  for (std::size_t k = 0; k < mine.size(); ++k) {
    if (mine[k].rows != theirs[k].rows || mine[k].cols != theirs[k].cols) {
      throw ShapeError("shape mismatch in " + mine[k].name);
    }
    auto dst = mine[k].values();
    auto src = theirs[k].values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return *this;
}

std::vector<TensorShape> describe_shapes(const ModelShape& shape) {
  std::vector<TensorShape> out;
  const Parameters p = Parameters::zeros(shape);
  for (const auto& t : p.tensors()) out.push_back({t.name, t.rows, t.cols});
  return out;
}

void check_shapes(const Parameters& params, const ModelShape& shape) {
  const auto expected = describe_shapes(shape);
  const auto actual = params.tensors();
  for (std::size_t k = 0; k < std::max(expected.size(), actual.size()); ++k) {
    if (k >= expected.size()) throw ShapeError("unexpected tensor " + actual[k].name);
    if (k >= actual.size()) throw ShapeError("missing tensor " + expected[k].name);
    if (expected[k].name != actual[k].name || expected[k].rows != actual[k].rows ||
        expected[k].cols != actual[k].cols) {
      throw ShapeError("tensor " + expected[k].name + " expected " + std::to_string(expected[k].rows) + "x" +
                       std::to_string(expected[k].cols) + ", found " + actual[k].name + " " +
                       std::to_string(actual[k].rows) + "x" + std::to_string(actual[k].cols));
    }
  }
}

Embedded embed(std::span<const WordId> ids, const Matrix& embedding, double dropout, Mode mode, Rng* rng) {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = embedding.cols();
  Embedded out{Matrix(d, n), Matrix::Ones(d, n)};
  for (Eigen::Index t = 0; t < n; ++t) {
    const WordId id = ids[static_cast<std::size_t>(t)];
    if (id >= embedding.rows()) {
      throw ValidationError("word id " + std::to_string(id) + " outside embedding table of " +
                            std::to_string(embedding.rows()) + " rows");
    }
    out.vectors.col(t) = embedding.row(id).transpose();
  }
  if (mode == Mode::kTrain && dropout > 0.0) {
    if (rng == nullptr) throw ConfigError("train-mode dropout needs a random generator");
    const double keep_scale = 1.0 / (1.0 - dropout);
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index k = 0; k < d; ++k) out.mask(k, t) = rng->bernoulli(dropout) ? 0.0 : keep_scale;
    }
    out.vectors.array() *= out.mask.array();
  }
  return out;
}

namespace {

void expect_size(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw ShapeError(std::string(what) + " has size " + std::to_string(v.size()) + ", expected " +
                     std::to_string(n));
  }
}

}  // namespace

LstmStep encoder_cell(const Vector& x, const Vector& h_prev, const Vector& c_prev, const EncoderLstm& lstm) {
  const Eigen::Index h = lstm.input_gate.bias.size();
  expect_size(x, lstm.input_gate.input.cols(), "encoder input");
  expect_size(h_prev, h, "encoder hidden state");
  expect_size(c_prev, h, "encoder cell state");

  LstmStep s;
  s.input_gate = sigmoid(lstm.input_gate.input * x + lstm.input_gate.recurrent * h_prev +
                         lstm.input_gate.extra * c_prev + lstm.input_gate.bias);
  s.forget_gate = sigmoid(lstm.forget_gate.input * x + lstm.forget_gate.recurrent * h_prev +
                          lstm.forget_gate.extra * c_prev + lstm.forget_gate.bias);
  s.candidate = tanh_of(lstm.candidate.input * x + lstm.candidate.recurrent * h_prev + lstm.candidate.bias);
  s.cell = s.forget_gate.cwiseProduct(c_prev) + s.input_gate.cwiseProduct(s.candidate);
  s.output_gate = sigmoid(lstm.output_gate.input * x + lstm.output_gate.recurrent * h_prev +
                          lstm.output_gate.extra * s.cell + lstm.output_gate.bias);
  s.cell_tanh = tanh_of(s.cell);
  s.hidden = s.output_gate.cwiseProduct(s.cell_tanh);
  return s;
}

BiEncoding bilstm_encode(const Matrix& embedded, const Parameters& params) {
  const Eigen::Index n = embedded.cols();
  if (n == 0) throw ValidationError("cannot encode an empty sentence");
  const Eigen::Index h = params.forward_encoder.input_gate.bias.size();

  BiEncoding out;
  out.forward_steps.resize(static_cast<std::size_t>(n));
  out.backward_steps.resize(static_cast<std::size_t>(n));
  out.states.resize(2 * h, n);

  Vector hidden = Vector::Zero(h);
  Vector cell = Vector::Zero(h);
  for (Eigen::Index t = 0; t < n; ++t) {
    auto& step = out.forward_steps[static_cast<std::size_t>(t)];
    step = encoder_cell(embedded.col(t), hidden, cell, params.forward_encoder);
    hidden = step.hidden;
    cell = step.cell;
    out.states.col(t).head(h) = hidden;
  }
  hidden.setZero();
  cell.setZero();
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    auto& step = out.backward_steps[static_cast<std::size_t>(t)];
    step = encoder_cell(embedded.col(t), hidden, cell, params.backward_encoder);
    hidden = step.hidden;
    cell = step.cell;
    out.states.col(t).tail(h) = hidden;
  }
  return out;
}

DecoderStep decoder_cell(const Vector& u, const Vector& h_prev, const Vector& c_prev, const Vector& tag_prev,
                         const DecoderLstm& lstm) {
  const Eigen::Index h = lstm.input_gate.bias.size();
  expect_size(u, lstm.input_gate.input.cols(), "decoder input");
  expect_size(h_prev, h, "decoder hidden state");
  expect_size(c_prev, h, "decoder cell state");
  expect_size(tag_prev, lstm.input_gate.extra.cols(), "previous tag vector");

  DecoderStep out;
  LstmStep& s = out.lstm;
  s.input_gate = sigmoid(lstm.input_gate.input * u + lstm.input_gate.recurrent * h_prev +
                         lstm.input_gate.extra * tag_prev + lstm.input_gate.bias);
  s.forget_gate = sigmoid(lstm.forget_gate.input * u + lstm.forget_gate.recurrent * h_prev +
                          lstm.forget_gate.extra * tag_prev + lstm.forget_gate.bias);
  s.candidate = tanh_of(lstm.candidate.input * u + lstm.candidate.recurrent * h_prev +
                        lstm.candidate.extra * tag_prev + lstm.candidate.bias);
  s.cell = s.forget_gate.cwiseProduct(c_prev) + s.input_gate.cwiseProduct(s.candidate);
  s.output_gate = sigmoid(lstm.output_gate.input * u + lstm.output_gate.recurrent * h_prev +
                          lstm.output_gate.extra * s.cell + lstm.output_gate.bias);
  s.cell_tanh = tanh_of(s.cell);
  s.hidden = s.output_gate.cwiseProduct(s.cell_tanh);
  out.tag_vector = lstm.tag_projection * s.hidden + lstm.tag_bias;
  return out;
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double m = logits.col(t).maxCoeff();
    p.col(t) = (logits.col(t).array() - m).exp().matrix();
    p.col(t) /= p.col(t).sum();
  }
  return p;
}

std::vector<TagIndex> predict_tags(const Matrix& probabilities) {
  std::vector<TagIndex> out(static_cast<std::size_t>(probabilities.cols()));
  for (Eigen::Index t = 0; t < probabilities.cols(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probabilities.rows(); ++k) {
      if (probabilities(k, t) > probabilities(best, t)) best = k;
    }
    out[static_cast<std::size_t>(t)] = static_cast<TagIndex>(best);
  }
  return out;
}

namespace {

ForwardResult run_forward(std::span<const WordId> ids, std::optional<std::span<const TagIndex>> gold,
                          const Parameters& params, const Hyperparameters& hyper, Embedded embedded) {
  const std::size_t n = ids.size();
  if (gold && gold->size() != n) {
    throw ValidationError("gold tag count " + std::to_string(gold->size()) + " differs from token count " +
                          std::to_string(n));
  }
  ForwardResult result;
  ForwardTrace& tr = result.trace;
  tr.tokens.assign(ids.begin(), ids.end());
  tr.embedded = std::move(embedded);
  tr.encoding = bilstm_encode(tr.embedded.vectors, params);

  const Eigen::Index hd = params.decoder.input_gate.bias.size();
  const Eigen::Index td = params.decoder.tag_projection.rows();
  tr.start_tag = params.start_tag.size() > 0 ? params.start_tag : Vector::Zero(td);
  tr.decoder_steps.resize(n);
  tr.tag_vectors.resize(td, static_cast<Eigen::Index>(n));

  Vector hidden = Vector::Zero(hd);
  Vector cell = Vector::Zero(hd);
  Vector tag_prev = tr.start_tag;
  for (std::size_t t = 0; t < n; ++t) {
    const auto col = static_cast<Eigen::Index>(t);
    DecoderStep step = decoder_cell(tr.encoding.states.col(col), hidden, cell, tag_prev, params.decoder);
    hidden = step.lstm.hidden;
    cell = step.lstm.cell;
    tag_prev = step.tag_vector;
    tr.tag_vectors.col(col) = step.tag_vector;
    tr.decoder_steps[t] = std::move(step.lstm);
  }
  tr.logits = (params.softmax_weights * tr.tag_vectors).colwise() + params.softmax_bias;
  tr.probabilities = softmax_columns(tr.logits);
  if (gold) result.loss = biased_loss(tr.probabilities, *gold, hyper.alpha);
  return result;
}

}  // namespace

ForwardResult forward(std::span<const WordId> ids, std::optional<std::span<const TagIndex>> gold,
                      const Parameters& params, const Hyperparameters& hyper, Mode mode, Rng* rng) {
  return run_forward(ids, gold, params, hyper, embed(ids, params.embedding, hyper.dropout, mode, rng));
}

ForwardResult forward_with_mask(std::span<const WordId> ids, std::optional<std::span<const TagIndex>> gold,
                                const Parameters& params, const Hyperparameters& hyper, const Matrix& mask) {
  Embedded e = embed(ids, params.embedding, 0.0, Mode::kEval, nullptr);
  if (mask.rows() != e.vectors.rows() || mask.cols() != e.vectors.cols()) {
    throw ShapeError("dropout mask shape does not match the embedded sentence");
  }
  e.mask = mask;
  e.vectors.array() *= mask.array();
  return run_forward(ids, gold, params, hyper, std::move(e));
}

LossParts loss_parts(const Matrix& probabilities, std::span<const TagIndex> gold) {
  if (static_cast<std::size_t>(probabilities.cols()) != gold.size()) {
    throw ValidationError("gold tag count differs from prediction count");
  }
  LossParts parts;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    if (gold[t] >= probabilities.rows()) throw ValidationError("gold tag index out of range");
    const double nll = -std::log(probabilities(gold[t], static_cast<Eigen::Index>(t)));
    if (gold[t] == 0) {
      parts.other += nll;
      ++parts.other_tokens;
    } else {
      parts.relational += nll;
      ++parts.relational_tokens;
    }
  }
  return parts;
}

double biased_loss(const Matrix& probabilities, std::span<const TagIndex> gold, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  return loss_parts(probabilities, gold).total(alpha);
}

double mean_token_loss(const Matrix& probabilities, std::span<const TagIndex> gold, double alpha) {
  if (gold.empty()) return 0.0;
  return biased_loss(probabilities, gold, alpha) / static_cast<double>(gold.size());
}

namespace {

struct GateDeltas {
  Vector input_gate;
  Vector forget_gate;
  Vector candidate;
  Vector output_gate;
};

// Pre-activation deltas of one memory block given dL/dh and the cell
// gradient arriving from the future. `cell_total` receives dL/dc_t.
GateDeltas lstm_deltas(const LstmStep& s, const Vector& cell_prev, const Vector& d_hidden,
                       const Vector& d_cell_future, const Matrix& output_peephole, Vector& cell_total) {
  GateDeltas g;
  const auto o = s.output_gate.array();
  const auto tc = s.cell_tanh.array();
  g.output_gate = (d_hidden.array() * tc * o * (1.0 - o)).matrix();
  cell_total = d_cell_future + (d_hidden.array() * o * (1.0 - tc * tc)).matrix() +
               output_peephole.transpose() * g.output_gate;
  const auto i = s.input_gate.array();
  const auto f = s.forget_gate.array();
  const auto z = s.candidate.array();
  g.input_gate = (cell_total.array() * z * i * (1.0 - i)).matrix();
  g.forget_gate = (cell_total.array() * cell_prev.array() * f * (1.0 - f)).matrix();
  g.candidate = (cell_total.array() * i * (1.0 - z * z)).matrix();
  return g;
}

void add_outer(Matrix& dst, const Vector& a, const Vector& b) {
  if (dst.size() > 0) dst.noalias() += a * b.transpose();
}

void restrict_to_diagonal(Matrix& m) {
  const Vector diag = m.diagonal();
  m.setZero();
  m.diagonal() = diag;
}

// Backpropagates one encoder direction. `d_states` holds dL/dh for each step
// from the decoder; order is the processing order of that direction.
void encoder_backward(const Matrix& inputs, const std::vector<LstmStep>& steps, const Matrix& d_states,
                      bool reverse, const EncoderLstm& lstm, EncoderLstm& grad, Matrix& d_inputs) {
  const Eigen::Index n = inputs.cols();
  const Eigen::Index h = lstm.input_gate.bias.size();
  Vector d_hidden_next = Vector::Zero(h);
  Vector d_cell_next = Vector::Zero(h);
  const Vector zero = Vector::Zero(h);
  Vector cell_total;
  // Walk against the processing order.
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index t = reverse ? k : n - 1 - k;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    const bool has_prev = reverse ? prev < n : prev >= 0;
    const LstmStep& s = steps[static_cast<std::size_t>(t)];
    const Vector& h_prev = has_prev ? steps[static_cast<std::size_t>(prev)].hidden : zero;
    const Vector& c_prev = has_prev ? steps[static_cast<std::size_t>(prev)].cell : zero;
    const Vector d_hidden = d_states.col(t) + d_hidden_next;

    GateDeltas g = lstm_deltas(s, c_prev, d_hidden, d_cell_next, lstm.output_gate.extra, cell_total);
    const auto x = inputs.col(t);

    add_outer(grad.input_gate.input, g.input_gate, x);
    add_outer(grad.forget_gate.input, g.forget_gate, x);
    add_outer(grad.candidate.input, g.candidate, x);
    add_outer(grad.output_gate.input, g.output_gate, x);
    add_outer(grad.input_gate.recurrent, g.input_gate, h_prev);
    add_outer(grad.forget_gate.recurrent, g.forget_gate, h_prev);
    add_outer(grad.candidate.recurrent, g.candidate, h_prev);
    add_outer(grad.output_gate.recurrent, g.output_gate, h_prev);
    add_outer(grad.input_gate.extra, g.input_gate, c_prev);
    add_outer(grad.forget_gate.extra, g.forget_gate, c_prev);
    add_outer(grad.output_gate.extra, g.output_gate, s.cell);
    grad.input_gate.bias += g.input_gate;
    grad.forget_gate.bias += g.forget_gate;
    grad.candidate.bias += g.candidate;
    grad.output_gate.bias += g.output_gate;

    d_inputs.col(t).noalias() += lstm.input_gate.input.transpose() * g.input_gate +
                                 lstm.forget_gate.input.transpose() * g.forget_gate +
                                 lstm.candidate.input.transpose() * g.candidate +
                                 lstm.output_gate.input.transpose() * g.output_gate;
    d_hidden_next = lstm.input_gate.recurrent.transpose() * g.input_gate +
                    lstm.forget_gate.recurrent.transpose() * g.forget_gate +
                    lstm.candidate.recurrent.transpose() * g.candidate +
                    lstm.output_gate.recurrent.transpose() * g.output_gate;
    d_cell_next = cell_total.cwiseProduct(s.forget_gate) + lstm.input_gate.extra.transpose() * g.input_gate +
                  lstm.forget_gate.extra.transpose() * g.forget_gate;
  }
}

void check_trace(const ForwardTrace& trace, std::span<const TagIndex> gold, const Parameters& params) {
  const auto n = static_cast<Eigen::Index>(trace.length());
  if (gold.size() != trace.length()) throw ShapeError("gold length differs from trace length");
  if (trace.decoder_steps.size() != trace.length() || trace.encoding.forward_steps.size() != trace.length() ||
      trace.encoding.backward_steps.size() != trace.length()) {
    throw ShapeError("incomplete forward trace");
  }
  if (trace.embedded.vectors.rows() != params.embedding.cols() || trace.embedded.vectors.cols() != n) {
    throw ShapeError("trace embedding width differs from parameters");
  }
  if (trace.encoding.states.rows() != params.decoder.input_gate.input.cols()) {
    throw ShapeError("trace encoder width differs from parameters");
  }
  if (trace.decoder_steps.front().hidden.size() != params.decoder.input_gate.bias.size()) {
    throw ShapeError("trace decoder width differs from parameters");
  }
  if (trace.tag_vectors.rows() != params.softmax_weights.cols() ||
      trace.probabilities.rows() != params.softmax_weights.rows()) {
    throw ShapeError("trace tag dimensions differ from parameters");
  }
  for (WordId id : trace.tokens) {
    if (id >= params.embedding.rows()) throw ShapeError("trace token outside embedding table");
  }
}

}  // namespace

void accumulate_backward(const ForwardTrace& trace, std::span<const TagIndex> gold, const Parameters& params,
                         const Hyperparameters& hyper, Gradients& grads) {
  if (trace.length() == 0) throw ShapeError("empty trace");
  check_trace(trace, gold, params);
  if (!(hyper.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");

  const auto n = static_cast<Eigen::Index>(trace.length());
  const DecoderLstm& dec = params.decoder;
  DecoderLstm& gdec = grads.decoder;
  const Eigen::Index hd = dec.input_gate.bias.size();
  const Eigen::Index td = dec.tag_projection.rows();
  const Eigen::Index he = params.forward_encoder.input_gate.bias.size();

  // Softmax + weighted NLL: dL/dy_t = w_t (p_t - onehot(gold_t)).
  Matrix d_logits = trace.probabilities;
  for (Eigen::Index t = 0; t < n; ++t) {
    const TagIndex g = gold[static_cast<std::size_t>(t)];
    const double w = g == 0 ? 1.0 : hyper.alpha;
    d_logits(g, t) -= 1.0;
    d_logits.col(t) *= w;
  }
  grads.softmax_weights.noalias() += d_logits * trace.tag_vectors.transpose();
  grads.softmax_bias += d_logits.rowwise().sum();
  const Matrix d_tags_out = params.softmax_weights.transpose() * d_logits;

  Matrix d_states = Matrix::Zero(2 * he, n);
  Vector d_tag_next = Vector::Zero(td);  // from step t+1's gates through T_t
  Vector d_hidden_next = Vector::Zero(hd);
  Vector d_cell_next = Vector::Zero(hd);
  const Vector zero = Vector::Zero(hd);
  Vector cell_total;

  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const LstmStep& s = trace.decoder_steps[static_cast<std::size_t>(t)];
    const Vector& h_prev = t > 0 ? trace.decoder_steps[static_cast<std::size_t>(t - 1)].hidden : zero;
    const Vector& c_prev = t > 0 ? trace.decoder_steps[static_cast<std::size_t>(t - 1)].cell : zero;
    const Vector tag_prev = t > 0 ? Vector(trace.tag_vectors.col(t - 1)) : trace.start_tag;

    const Vector d_tag = d_tags_out.col(t) + d_tag_next;
    add_outer(gdec.tag_projection, d_tag, s.hidden);
    gdec.tag_bias += d_tag;
    const Vector d_hidden = dec.tag_projection.transpose() * d_tag + d_hidden_next;

    GateDeltas g = lstm_deltas(s, c_prev, d_hidden, d_cell_next, dec.output_gate.extra, cell_total);
    const auto u = trace.encoding.states.col(t);

    add_outer(gdec.input_gate.input, g.input_gate, u);
    add_outer(gdec.forget_gate.input, g.forget_gate, u);
    add_outer(gdec.candidate.input, g.candidate, u);
    add_outer(gdec.output_gate.input, g.output_gate, u);
    add_outer(gdec.input_gate.recurrent, g.input_gate, h_prev);
    add_outer(gdec.forget_gate.recurrent, g.forget_gate, h_prev);
    add_outer(gdec.candidate.recurrent, g.candidate, h_prev);
    add_outer(gdec.output_gate.recurrent, g.output_gate, h_prev);
    add_outer(gdec.input_gate.extra, g.input_gate, tag_prev);
    add_outer(gdec.forget_gate.extra, g.forget_gate, tag_prev);
    add_outer(gdec.candidate.extra, g.candidate, tag_prev);
    add_outer(gdec.output_gate.extra, g.output_gate, s.cell);
    gdec.input_gate.bias += g.input_gate;
    gdec.forget_gate.bias += g.forget_gate;
    gdec.candidate.bias += g.candidate;
    gdec.output_gate.bias += g.output_gate;

    d_states.col(t).noalias() += dec.input_gate.input.transpose() * g.input_gate +
                                 dec.forget_gate.input.transpose() * g.forget_gate +
                                 dec.candidate.input.transpose() * g.candidate +
                                 dec.output_gate.input.transpose() * g.output_gate;
    d_hidden_next = dec.input_gate.recurrent.transpose() * g.input_gate +
                    dec.forget_gate.recurrent.transpose() * g.forget_gate +
                    dec.candidate.recurrent.transpose() * g.candidate +
                    dec.output_gate.recurrent.transpose() * g.output_gate;
    d_tag_next = dec.input_gate.extra.transpose() * g.input_gate + dec.forget_gate.extra.transpose() * g.forget_gate +
                 dec.candidate.extra.transpose() * g.candidate;
    d_cell_next = cell_total.cwiseProduct(s.forget_gate);
  }
  if (grads.start_tag.size() > 0) grads.start_tag += d_tag_next;

  Matrix d_inputs = Matrix::Zero(trace.embedded.vectors.rows(), n);
  encoder_backward(trace.embedded.vectors, trace.encoding.forward_steps, d_states.topRows(he), false,
                   params.forward_encoder, grads.forward_encoder, d_inputs);
  encoder_backward(trace.embedded.vectors, trace.encoding.backward_steps, d_states.bottomRows(he), true,
                   params.backward_encoder, grads.backward_encoder, d_inputs);

  d_inputs.array() *= trace.embedded.mask.array();
  for (Eigen::Index t = 0; t < n; ++t) {
    grads.embedding.row(trace.tokens[static_cast<std::size_t>(t)]) += d_inputs.col(t).transpose();
  }

  if (hyper.diagonal_peepholes) {
    for (EncoderLstm* enc : {&grads.forward_encoder, &grads.backward_encoder}) {
      restrict_to_diagonal(enc->input_gate.extra);
      restrict_to_diagonal(enc->forget_gate.extra);
      restrict_to_diagonal(enc->output_gate.extra);
    }
    restrict_to_diagonal(gdec.output_gate.extra);
  }
}

Gradients backward(const ForwardTrace& trace, std::span<const TagIndex> gold, const Parameters& params,
                   const Hyperparameters& hyper) {
  Gradients grads = params;
  grads.set_zero();
  accumulate_backward(trace, gold, params, hyper, grads);
  return grads;
}

namespace {

void glorot(Matrix& m, Rng& rng) {
  if (m.size() == 0) return;
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

void init_gate(LstmGate& g, Rng& rng) {
  glorot(g.input, rng);
  glorot(g.recurrent, rng);
  glorot(g.extra, rng);
  g.bias.setZero();
}

}  // namespace

Parameters init_parameters(const ModelShape& shape, const Hyperparameters& hyper, Rng& rng,
                           const PretrainedEmbeddings* pretrained, std::span<const std::string> words) {
  if (pretrained != nullptr && pretrained->dim != 0 && pretrained->dim != shape.embedding_dim) {
    throw ShapeError("pretrained embeddings have dimension " + std::to_string(pretrained->dim) +
                     ", model expects " + std::to_string(shape.embedding_dim));
  }
  Parameters p = Parameters::zeros(shape);
  for (Eigen::Index j = 0; j < p.embedding.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.embedding.rows(); ++i) p.embedding(i, j) = rng.uniform(-0.05, 0.05);
  }
  if (pretrained != nullptr) {
    for (std::size_t w = 0; w < words.size() && w < shape.words; ++w) {
      if (const auto* row = pretrained->find(words[w])) {
        for (int k = 0; k < shape.embedding_dim; ++k) {
          p.embedding(static_cast<Eigen::Index>(w), k) = (*row)[static_cast<std::size_t>(k)];
        }
      }
    }
  }
  for (EncoderLstm* enc : {&p.forward_encoder, &p.backward_encoder}) {
    init_gate(enc->input_gate, rng);
    init_gate(enc->forget_gate, rng);
    init_gate(enc->candidate, rng);
    init_gate(enc->output_gate, rng);
    enc->forget_gate.bias.setOnes();
    if (hyper.diagonal_peepholes) {
      restrict_to_diagonal(enc->input_gate.extra);
      restrict_to_diagonal(enc->forget_gate.extra);
      restrict_to_diagonal(enc->output_gate.extra);
    }
  }
  init_gate(p.decoder.input_gate, rng);
  init_gate(p.decoder.forget_gate, rng);
  init_gate(p.decoder.candidate, rng);
  init_gate(p.decoder.output_gate, rng);
  p.decoder.forget_gate.bias.setOnes();
  if (hyper.diagonal_peepholes) restrict_to_diagonal(p.decoder.output_gate.extra);
  glorot(p.decoder.tag_projection, rng);
  glorot(p.softmax_weights, rng);
  return p;
}

}  // namespace jointtag
