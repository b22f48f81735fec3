#pragma once

// Siamese recurrent encoders with a bilinear scorer.
//
// Context and response go through the same embeddings and the same cell;
// their final hidden states c and r are scored as
//     p(flag = 1 | c, r) = sigmoid(c^T M r + b)
// and the model is trained on binary cross-entropy with Adam and global
// gradient-norm clipping. Gradients are exact (full backpropagation
// through time, embeddings included).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadic/common.hpp"
#include "dyadic/dense.hpp"

namespace dyadic {

enum class CellType { rnn, lstm };

std::string_view to_string(CellType cell);
CellType parse_cell_type(std::string_view name);

// h_t = tanh(recurrent * h_{t-1} + input * x_t)
struct RnnCell {
  Matrix recurrent;  // d x d
  Matrix input;      // d x e
  bool operator==(const RnnCell&) const = default;
};

// Gate pre-activations z = weights * [h_prev; x] + bias, stacked in row
// blocks of d: input gate, forget gate, output gate, candidate.
struct LstmCell {
  Matrix weights;  // 4d x (d + e)
  Matrix bias;     // 4d x 1
  bool operator==(const LstmCell&) const = default;
};

struct EncoderParams {
  Matrix embedding;  // V x e
  std::variant<RnnCell, LstmCell> cell;
  Matrix bilinear;  // d x d
  Matrix bias;      // 1 x 1

  CellType cell_type() const {
    return std::holds_alternative<RnnCell>(cell) ? CellType::rnn : CellType::lstm;
  }
  std::size_t hidden() const { return bilinear.rows(); }
  std::size_t embed_dim() const { return embedding.cols(); }
  std::size_t vocab_size() const { return embedding.rows(); }

  // Visits every learnable tensor with a stable name.
  template <typename F>
  void for_each_tensor(F&& f) {
    f(std::string_view("embedding"), embedding);
    if (auto* rnn = std::get_if<RnnCell>(&cell)) {
      f(std::string_view("rnn.recurrent"), rnn->recurrent);
      f(std::string_view("rnn.input"), rnn->input);
    } else {
      auto& lstm = std::get<LstmCell>(cell);
      f(std::string_view("lstm.weights"), lstm.weights);
      f(std::string_view("lstm.bias"), lstm.bias);
    }
    f(std::string_view("bilinear"), bilinear);
    f(std::string_view("bias"), bias);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<EncoderParams*>(this)->for_each_tensor(
        [&](std::string_view name, Matrix& m) { f(name, static_cast<const Matrix&>(m)); });
  }

  EncoderParams zeros_like() const;
  bool all_finite() const;

  bool operator==(const EncoderParams&) const = default;
};

/// Orthonormalizes a Gaussian matrix (modified Gram-Schmidt, one
/// re-orthogonalization pass). Columns are sign-flipped so the diagonal
/// is non-negative.
Matrix orthogonal_init(std::size_t d, Rng& rng);

/// Input weights ~ U[-0.01, 0.01]; recurrent blocks orthogonal; LSTM
/// forget-gate bias 1, other biases 0; embeddings ~ U[-0.1, 0.1]
/// (overwritten by pretrained vectors when loaded); M = I; b = 0.
EncoderParams init_params(CellType cell, std::size_t vocab_size, std::size_t embed_dim,
                          std::size_t hidden, Rng& rng);

Vector rnn_step(const RnnCell& cell, std::span<const double> h_prev, std::span<const double> x);

struct LstmState {
  Vector h;
  Vector c;
};
LstmState lstm_step(const LstmCell& cell, std::span<const double> h_prev,
                    std::span<const double> c_prev, std::span<const double> x);

// Final hidden state from a zero initial state; zero vector when empty.
Vector encode_sequence(const EncoderParams& params, std::span<const std::int32_t> ids);

double sigmoid(double x);
// c^T M r + b
double score_logit(const EncoderParams& params, std::span<const double> c,
                   std::span<const double> r);
double score_pair(const EncoderParams& params, std::span<const double> c,
                  std::span<const double> r);

struct Example {
  std::vector<std::int32_t> context;
  std::vector<std::int32_t> response;
  int flag = 0;
};

enum class Reduction { mean, sum };

struct LossOptions {
  Reduction reduction = Reduction::mean;
  double lambda = 0.0;  // (lambda/2) * (||M||_F^2 + b^2)
};

struct LossAndGrads {
  double loss = 0.0;
  EncoderParams grads;
};

/// Cross-entropy loss over the batch with analytic gradients for every
/// tensor. Throws NumericError when the loss is not finite.
LossAndGrads loss_and_grads(const EncoderParams& params, std::span<const Example> batch,
                            const LossOptions& opts = {}, std::size_t batch_id = 0);

// Loss only (used by finite-difference checks).
double batch_loss(const EncoderParams& params, std::span<const Example> batch,
                  const LossOptions& opts = {});

double global_norm(const EncoderParams& grads);

// Scales all gradients by threshold / norm when norm > threshold.
// Returns the pre-clip norm.
double clip_gradients(EncoderParams& grads, double threshold = 10.0);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  EncoderParams m;
  EncoderParams v;
  std::uint64_t step = 0;

  static AdamState for_params(const EncoderParams& params);
};

void adam_step(AdamState& state, EncoderParams& params, const EncoderParams& grads,
               const AdamConfig& cfg);

struct TrainConfig {
  CellType cell = CellType::lstm;
  std::size_t hidden = 200;
  std::size_t embed_dim = 50;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  double clip = 10.0;
  double lambda = 0.0;
  std::uint64_t seed = 1;
  std::size_t max_context_tokens = 160;
  std::size_t max_response_tokens = 80;
  std::size_t min_count = 1;
  Reduction reduction = Reduction::mean;

  static TrainConfig defaults_for(CellType cell);
  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> val_recall_at_1;
};

struct TrainResult {
  EncoderParams params;
  std::vector<EpochLog> history;
};

using Validator = std::function<double(const EncoderParams&)>;

/// Mini-batch training from `init`. Each epoch reshuffles the examples
/// with a stream derived from cfg.seed.
TrainResult train(EncoderParams init, std::span<const Example> examples, const TrainConfig& cfg,
                  const Validator& validate = {});

std::string format_training_log(std::span<const EpochLog> history);

struct ScoredIndex {
  std::size_t index = 0;
  double probability = 0.0;
  double logit = 0.0;
};

// Descending logit, ties by ascending index. Ordering on the logit keeps
// candidates apart when their probabilities both round to 1.
std::vector<ScoredIndex> predict(const EncoderParams& params, std::span<const std::int32_t> context,
                                 std::span<const std::vector<std::int32_t>> candidates);

}  // namespace dyadic
