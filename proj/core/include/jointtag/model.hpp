#pragma once

// Bi-LSTM encoder / LSTM decoder tagger with tag-vector feedback.
//
//   embed -> forward and backward peephole LSTMs -> concat -> decoder LSTM
//   fed with the previous tag vector -> tag vector -> softmax
//
// Everything is double precision. Sentences are processed one at a time;
// column t of every per-sentence matrix belongs to token t.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointtag/random.hpp"
#include "jointtag/tag_codec.hpp"

namespace jointtag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using WordId = std::uint32_t;

struct RmspropConfig {
  double learning_rate = 0.001;
  double decay = 0.9;
  double epsilon = 1e-8;
};

struct Hyperparameters {
  int embedding_dim = 300;
  int encoder_hidden = 300;  // per direction
  int decoder_hidden = 600;
  int tag_dim = 0;           // 0 selects the number of tags
  double alpha = 10.0;       // weight of relational tags in the loss
  double dropout = 0.5;      // on the embedding layer only
  RmspropConfig rmsprop;
  std::uint64_t seed = 1;
  bool diagonal_peepholes = false;
  bool learn_start_tag = false;

  // Throws ConfigError.
  void validate() const;
};

// Everything that fixes tensor shapes.
struct ModelShape {
  std::size_t words = 0;
  std::size_t tags = 0;
  int embedding_dim = 0;
  int encoder_hidden = 0;
  int decoder_hidden = 0;
  int tag_dim = 0;
  bool learn_start_tag = false;

  static ModelShape from(const Hyperparameters& hyper, std::size_t words, std::size_t tags);
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// One gate: pre-activation = input * x + recurrent * h_prev + extra * aux + bias.
// `extra` is a cell peephole or the tag-vector feedback, empty when unused.
struct LstmGate {
  Matrix input;
  Matrix recurrent;
  Matrix extra;
  Vector bias;
};

// Encoder memory block. Input/forget gates peep at the previous cell, the
// output gate at the new cell, the candidate has no peephole.
struct EncoderLstm {
  LstmGate input_gate;
  LstmGate forget_gate;
  LstmGate candidate;
  LstmGate output_gate;
};

// Decoder memory block. Input/forget/candidate take the previous tag vector
// through `extra`; the output gate peeps at the new cell.
struct DecoderLstm {
  LstmGate input_gate;
  LstmGate forget_gate;
  LstmGate candidate;
  LstmGate output_gate;
  Matrix tag_projection;  // tag_dim x decoder_hidden
  Vector tag_bias;
};

struct TensorRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Index size() const { return rows * cols; }
  std::span<double> values() const { return {data, static_cast<std::size_t>(size())}; }
};

struct ConstTensorRef {
  std::string name;
  const double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Index size() const { return rows * cols; }
  std::span<const double> values() const { return {data, static_cast<std::size_t>(size())}; }
};

struct TensorShape {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

struct Parameters {
  Matrix embedding;  // words x embedding_dim
  EncoderLstm forward_encoder;
  EncoderLstm backward_encoder;
  DecoderLstm decoder;
  Matrix softmax_weights;  // tags x tag_dim
  Vector softmax_bias;
  Vector start_tag;        // tag_dim when learned, otherwise empty

  static Parameters zeros(const ModelShape& shape);

  // Stable order; names are used in checkpoints and error messages.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;

  std::size_t parameter_count() const;
  void set_zero();
  Parameters& operator+=(const Parameters& other);
};

using Gradients = Parameters;

std::vector<TensorShape> describe_shapes(const ModelShape& shape);

// Throws ShapeError naming the first tensor that disagrees with `shape`.
void check_shapes(const Parameters& params, const ModelShape& shape);

enum class Mode { kTrain, kEval };

struct Embedded {
  Matrix vectors;  // embedding_dim x n
  Matrix mask;     // embedding_dim x n; 0 or 1/(1-p); all ones in eval mode
};

// Throws ValidationError for ids outside the embedding table. `rng` is only
// consulted in train mode with dropout > 0.
Embedded embed(std::span<const WordId> ids, const Matrix& embedding, double dropout, Mode mode, Rng* rng);

struct LstmStep {
  Vector input_gate;
  Vector forget_gate;
  Vector candidate;
  Vector output_gate;
  Vector cell;
  Vector cell_tanh;
  Vector hidden;
};

LstmStep encoder_cell(const Vector& input, const Vector& hidden_prev, const Vector& cell_prev,
                      const EncoderLstm& lstm);

struct BiEncoding {
  std::vector<LstmStep> forward_steps;   // forward_steps[t] after reading tokens 0..t
  std::vector<LstmStep> backward_steps;  // backward_steps[t] after reading tokens n-1..t
  Matrix states;                         // 2*encoder_hidden x n, [forward; backward]
};

// Throws ValidationError on an empty sequence.
BiEncoding bilstm_encode(const Matrix& embedded, const Parameters& params);

struct DecoderStep {
  LstmStep lstm;
  Vector tag_vector;
};

DecoderStep decoder_cell(const Vector& encoded, const Vector& hidden_prev, const Vector& cell_prev,
                         const Vector& tag_prev, const DecoderLstm& lstm);

struct ForwardTrace {
  std::vector<WordId> tokens;
  Embedded embedded;
  BiEncoding encoding;
  std::vector<LstmStep> decoder_steps;
  Vector start_tag;     // tag vector fed to the first decoder step
  Matrix tag_vectors;   // tag_dim x n
  Matrix logits;        // tags x n
  Matrix probabilities; // tags x n

  std::size_t length() const { return tokens.size(); }
};

struct ForwardResult {
  ForwardTrace trace;
  std::optional<double> loss;
};

// Column-wise softmax with max subtraction.
Matrix softmax_columns(const Matrix& logits);

// Argmax per column, ties to the lowest index.
std::vector<TagIndex> predict_tags(const Matrix& probabilities);

// gold, when given, must have one entry per token (ValidationError otherwise).
ForwardResult forward(std::span<const WordId> ids, std::optional<std::span<const TagIndex>> gold,
                      const Parameters& params, const Hyperparameters& hyper, Mode mode, Rng* rng);

// Same as forward in train mode but with a caller-supplied dropout mask.
ForwardResult forward_with_mask(std::span<const WordId> ids, std::optional<std::span<const TagIndex>> gold,
                                const Parameters& params, const Hyperparameters& hyper, const Matrix& mask);

struct LossParts {
  double other = 0.0;       // NLL summed over gold-O tokens
  double relational = 0.0;  // NLL summed over relational gold tokens
  std::size_t other_tokens = 0;
  std::size_t relational_tokens = 0;

  double total(double alpha) const { return other + alpha * relational; }
};

// Tag index 0 is O.
LossParts loss_parts(const Matrix& probabilities, std::span<const TagIndex> gold);

// -sum_t w_t log p_t(gold_t), w = 1 for O and alpha otherwise. Throws
// ConfigError for alpha < 0 and ValidationError on a length mismatch.
double biased_loss(const Matrix& probabilities, std::span<const TagIndex> gold, double alpha);

// Reporting only: biased_loss divided by the token count.
double mean_token_loss(const Matrix& probabilities, std::span<const TagIndex> gold, double alpha);

// Exact gradient of biased_loss through the whole graph, dropout mask from
// the trace included. Throws ShapeError when trace and params disagree.
Gradients backward(const ForwardTrace& trace, std::span<const TagIndex> gold, const Parameters& params,
                   const Hyperparameters& hyper);

// Accumulating variant used by the trainer.
void accumulate_backward(const ForwardTrace& trace, std::span<const TagIndex> gold, const Parameters& params,
                         const Hyperparameters& hyper, Gradients& grads);

struct PretrainedEmbeddings;

// Glorot-uniform weights, zero biases except forget-gate biases of 1,
// embeddings uniform in +-0.05 or copied from `pretrained` where a row
// exists. Throws ShapeError on a pretrained dimension mismatch.
Parameters init_parameters(const ModelShape& shape, const Hyperparameters& hyper, Rng& rng,
                           const PretrainedEmbeddings* pretrained = nullptr,
                           std::span<const std::string> words = {});

}  // namespace jointtag
