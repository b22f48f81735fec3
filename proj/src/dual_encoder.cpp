#include "dyadic/dual_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dyadic {

std::string_view to_string(CellType cell) { return cell == CellType::rnn ? "rnn" : "lstm"; }

CellType parse_cell_type(std::string_view name) {
  if (name == "rnn") return CellType::rnn;
  if (name == "lstm") return CellType::lstm;
  throw ValidationError("unknown cell type: " + std::string(name));
}

namespace {

std::vector<Matrix*> tensors(EncoderParams& p) {
  std::vector<Matrix*> out;
  p.for_each_tensor([&](std::string_view, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> tensors(const EncoderParams& p) {
  std::vector<const Matrix*> out;
  p.for_each_tensor([&](std::string_view, const Matrix& m) { out.push_back(&m); });
  return out;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void fill_uniform(std::span<double> xs, double limit, Rng& rng) {
  for (double& x : xs) x = rng.uniform_closed(-limit, limit);
}

}  // namespace

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams out = *this;
  out.for_each_tensor([](std::string_view, Matrix& m) { m.fill(0.0); });
  return out;
}

bool EncoderParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::string_view, const Matrix& m) {
    for (double v : m.values())
      if (!std::isfinite(v)) ok = false;
  });
  return ok;
}

Matrix orthogonal_init(std::size_t d, Rng& rng) {
  Matrix q(d, d);
  for (double& v : q.values()) v = rng.normal();
  // Column-wise modified Gram-Schmidt, two passes for numerical safety.
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < d; ++i) proj += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < d; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) q(i, j) /= norm;
    if (q(j, j) < 0.0)
      for (std::size_t i = 0; i < d; ++i) q(i, j) = -q(i, j);
  }
  return q;
}

EncoderParams init_params(CellType cell, std::size_t vocab_size, std::size_t embed_dim,
                          std::size_t hidden, Rng& rng) {
  if (vocab_size == 0 || embed_dim == 0 || hidden == 0)
    throw ValidationError("encoder sizes must be positive");
  EncoderParams p;
  p.embedding = Matrix(vocab_size, embed_dim);
  fill_uniform(p.embedding.values(), 0.1, rng);

  const std::size_t d = hidden;
  if (cell == CellType::rnn) {
    RnnCell rnn{orthogonal_init(d, rng), Matrix(d, embed_dim)};
    fill_uniform(rnn.input.values(), 0.01, rng);
    p.cell = std::move(rnn);
  } else {
    LstmCell lstm{Matrix(4 * d, d + embed_dim), Matrix(4 * d, 1)};
    for (std::size_t gate = 0; gate < 4; ++gate) {
      Matrix block = orthogonal_init(d, rng);
      for (std::size_t r = 0; r < d; ++r) {
        auto row = lstm.weights.row(gate * d + r);
        for (std::size_t c = 0; c < d; ++c) row[c] = block(r, c);
        fill_uniform(row.subspan(d), 0.01, rng);
      }
    }
    for (std::size_t r = d; r < 2 * d; ++r) lstm.bias(r, 0) = 1.0;
    p.cell = std::move(lstm);
  }
  p.bilinear = Matrix::identity(d);
  p.bias = Matrix(1, 1);
  return p;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector rnn_step(const RnnCell& cell, std::span<const double> h_prev, std::span<const double> x) {
  Vector a(cell.recurrent.rows(), 0.0);
  matvec_add(cell.recurrent, h_prev, a);
  matvec_add(cell.input, x, a);
  for (double& v : a) v = std::tanh(v);
  return a;
}

namespace {

// Activated gates (i, f, o, g) from the stacked pre-activations.
void lstm_gates(const LstmCell& cell, std::span<const double> concat, Vector& gates) {
  const std::size_t d = cell.weights.rows() / 4;
  gates.assign(cell.bias.values().begin(), cell.bias.values().end());
  matvec_add(cell.weights, concat, gates);
  for (std::size_t k = 0; k < 3 * d; ++k) gates[k] = sigmoid(gates[k]);
  for (std::size_t k = 3 * d; k < 4 * d; ++k) gates[k] = std::tanh(gates[k]);
}

}  // namespace

LstmState lstm_step(const LstmCell& cell, std::span<const double> h_prev,
                    std::span<const double> c_prev, std::span<const double> x) {
  const std::size_t d = cell.weights.rows() / 4;
  Vector concat(h_prev.begin(), h_prev.end());
  concat.insert(concat.end(), x.begin(), x.end());
  Vector g;
  lstm_gates(cell, concat, g);
  LstmState s{Vector(d), Vector(d)};
  for (std::size_t k = 0; k < d; ++k) {
    s.c[k] = g[d + k] * c_prev[k] + g[k] * g[3 * d + k];
    s.h[k] = g[2 * d + k] * std::tanh(s.c[k]);
  }
  return s;
}

namespace {

// Forward activations kept for backpropagation through time.
struct Tape {
  std::span<const std::int32_t> ids;
  std::vector<Vector> h;       // h[0] = 0, h[t] after step t
  std::vector<Vector> c;       // LSTM cell states, same indexing
  std::vector<Vector> gates;   // LSTM activated gates per step
  std::vector<Vector> concat;  // LSTM [h_{t-1}; x_t] per step
};

const Vector& forward(const EncoderParams& p, std::span<const std::int32_t> ids, Tape& tape) {
  const std::size_t d = p.hidden();
  const std::size_t T = ids.size();
  tape.ids = ids;
  tape.h.assign(T + 1, Vector(d, 0.0));
  for (auto id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= p.vocab_size())
      throw ValidationError("token index out of range for embedding matrix");

  if (const auto* rnn = std::get_if<RnnCell>(&p.cell)) {
    for (std::size_t t = 0; t < T; ++t) {
      Vector& a = tape.h[t + 1];
      matvec_add(rnn->recurrent, tape.h[t], a);
      matvec_add(rnn->input, p.embedding.row(static_cast<std::size_t>(ids[t])), a);
      for (double& v : a) v = std::tanh(v);
    }
    return tape.h[T];
  }

  const auto& lstm = std::get<LstmCell>(p.cell);
  tape.c.assign(T + 1, Vector(d, 0.0));
  tape.gates.resize(T);
  tape.concat.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    Vector& concat = tape.concat[t];
    concat.assign(tape.h[t].begin(), tape.h[t].end());
    auto x = p.embedding.row(static_cast<std::size_t>(ids[t]));
    concat.insert(concat.end(), x.begin(), x.end());
    Vector& g = tape.gates[t];
    lstm_gates(lstm, concat, g);
    const Vector& c_prev = tape.c[t];
    Vector& c = tape.c[t + 1];
    Vector& h = tape.h[t + 1];
    for (std::size_t k = 0; k < d; ++k) {
      c[k] = g[d + k] * c_prev[k] + g[k] * g[3 * d + k];
      h[k] = g[2 * d + k] * std::tanh(c[k]);
    }
  }
  return tape.h[T];
}

void backward(const EncoderParams& p, const Tape& tape, std::span<const double> dh_final,
              EncoderParams& grads) {
  const std::size_t d = p.hidden();
  const std::size_t T = tape.ids.size();
  Vector dh(dh_final.begin(), dh_final.end());

  if (const auto* rnn = std::get_if<RnnCell>(&p.cell)) {
    auto& g = std::get<RnnCell>(grads.cell);
    Vector da(d);
    for (std::size_t t = T; t-- > 0;) {
      const Vector& h = tape.h[t + 1];
      for (std::size_t k = 0; k < d; ++k) da[k] = dh[k] * (1.0 - h[k] * h[k]);
      const auto row = static_cast<std::size_t>(tape.ids[t]);
      add_outer(g.recurrent, da, tape.h[t]);
      add_outer(g.input, da, p.embedding.row(row));
      matvec_t_add(rnn->input, da, grads.embedding.row(row));
      std::fill(dh.begin(), dh.end(), 0.0);
      matvec_t_add(rnn->recurrent, da, dh);
    }
    return;
  }

  const auto& lstm = std::get<LstmCell>(p.cell);
  auto& g = std::get<LstmCell>(grads.cell);
  Vector dc(d, 0.0), dz(4 * d), dconcat(d + p.embed_dim());
  for (std::size_t t = T; t-- > 0;) {
    const Vector& gate = tape.gates[t];
    const Vector& c_prev = tape.c[t];
    const Vector& c = tape.c[t + 1];
    for (std::size_t k = 0; k < d; ++k) {
      const double i = gate[k], f = gate[d + k], o = gate[2 * d + k], cand = gate[3 * d + k];
      const double tc = std::tanh(c[k]);
      const double dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
      dz[k] = dct * cand * i * (1.0 - i);
      dz[d + k] = dct * c_prev[k] * f * (1.0 - f);
      dz[2 * d + k] = dh[k] * tc * o * (1.0 - o);
      dz[3 * d + k] = dct * i * (1.0 - cand * cand);
      dc[k] = dct * f;
    }
    add_outer(g.weights, dz, tape.concat[t]);
    for (std::size_t k = 0; k < 4 * d; ++k) g.bias(k, 0) += dz[k];
    std::fill(dconcat.begin(), dconcat.end(), 0.0);
    matvec_t_add(lstm.weights, dz, dconcat);
    std::copy(dconcat.begin(), dconcat.begin() + static_cast<std::ptrdiff_t>(d), dh.begin());
    auto erow = grads.embedding.row(static_cast<std::size_t>(tape.ids[t]));
    for (std::size_t k = 0; k < erow.size(); ++k) erow[k] += dconcat[d + k];
  }
}

}  // namespace

Vector encode_sequence(const EncoderParams& params, std::span<const std::int32_t> ids) {
  Tape tape;
  return forward(params, ids, tape);
}

double score_logit(const EncoderParams& params, std::span<const double> c,
                   std::span<const double> r) {
  Vector mr(params.hidden(), 0.0);
  matvec_add(params.bilinear, r, mr);
  return dot(c, mr) + params.bias(0, 0);
}

double score_pair(const EncoderParams& params, std::span<const double> c,
                  std::span<const double> r) {
  return sigmoid(score_logit(params, c, r));
}

namespace {

double regularizer(const EncoderParams& p) {
  return squared_norm(p.bilinear.values()) + p.bias(0, 0) * p.bias(0, 0);
}

}  // namespace

LossAndGrads loss_and_grads(const EncoderParams& params, std::span<const Example> batch,
                            const LossOptions& opts, std::size_t batch_id) {
  LossAndGrads out{0.0, params.zeros_like()};
  if (batch.empty()) return out;
  const double scale =
      opts.reduction == Reduction::mean ? 1.0 / static_cast<double>(batch.size()) : 1.0;
  const std::size_t d = params.hidden();
  Tape ctx_tape, resp_tape;
  Vector mr(d), mtc(d), dc(d), dr(d);

  double total = 0.0;
  for (const auto& ex : batch) {
    const Vector& c = forward(params, ex.context, ctx_tape);
    const Vector& r = forward(params, ex.response, resp_tape);
    std::fill(mr.begin(), mr.end(), 0.0);
    matvec_add(params.bilinear, r, mr);
    const double s = dot(c, mr) + params.bias(0, 0);
    total += ex.flag ? softplus(-s) : softplus(s);

    const double ds = scale * (sigmoid(s) - (ex.flag ? 1.0 : 0.0));
    add_outer(out.grads.bilinear, c, r, ds);
    out.grads.bias(0, 0) += ds;
    std::fill(mtc.begin(), mtc.end(), 0.0);
    matvec_t_add(params.bilinear, c, mtc);
    for (std::size_t k = 0; k < d; ++k) {
      dc[k] = ds * mr[k];
      dr[k] = ds * mtc[k];
    }
    backward(params, ctx_tape, dc, out.grads);
    backward(params, resp_tape, dr, out.grads);
  }
  out.loss = total * scale;
  if (opts.lambda != 0.0) {
    out.loss += 0.5 * opts.lambda * regularizer(params);
    auto gm = out.grads.bilinear.values();
    auto m = params.bilinear.values();
    for (std::size_t k = 0; k < gm.size(); ++k) gm[k] += opts.lambda * m[k];
    out.grads.bias(0, 0) += opts.lambda * params.bias(0, 0);
  }
  if (!std::isfinite(out.loss))
    throw NumericError("non-finite loss in batch " + std::to_string(batch_id));
  return out;
}

double batch_loss(const EncoderParams& params, std::span<const Example> batch,
                  const LossOptions& opts) {
  if (batch.empty()) return 0.0;
  Tape ctx_tape, resp_tape;
  Vector mr(params.hidden());
  double total = 0.0;
  for (const auto& ex : batch) {
    const Vector& c = forward(params, ex.context, ctx_tape);
    const Vector& r = forward(params, ex.response, resp_tape);
    std::fill(mr.begin(), mr.end(), 0.0);
    matvec_add(params.bilinear, r, mr);
    const double s = dot(c, mr) + params.bias(0, 0);
    total += ex.flag ? softplus(-s) : softplus(s);
  }
  const double scale =
      opts.reduction == Reduction::mean ? 1.0 / static_cast<double>(batch.size()) : 1.0;
  double loss = total * scale;
  if (opts.lambda != 0.0) loss += 0.5 * opts.lambda * regularizer(params);
  return loss;
}

double global_norm(const EncoderParams& grads) {
  double sq = 0.0;
  grads.for_each_tensor([&](std::string_view, const Matrix& m) { sq += squared_norm(m.values()); });
  return std::sqrt(sq);
}

double clip_gradients(EncoderParams& grads, double threshold) {
  const double norm = global_norm(grads);
  if (norm > threshold) {
    const double s = threshold / norm;
    grads.for_each_tensor([&](std::string_view, Matrix& m) {
      for (double& v : m.values()) v *= s;
    });
  }
  return norm;
}

AdamState AdamState::for_params(const EncoderParams& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(AdamState& state, EncoderParams& params, const EncoderParams& grads,
               const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  auto ps = tensors(params);
  auto gs = tensors(grads);
  auto ms = tensors(state.m);
  auto vs = tensors(state.v);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto p = ps[k]->values();
    auto g = gs[k]->values();
    auto m = ms[k]->values();
    auto v = vs[k]->values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

TrainConfig TrainConfig::defaults_for(CellType cell) {
  TrainConfig cfg;
  cfg.cell = cell;
  cfg.hidden = cell == CellType::rnn ? 50 : 200;
  return cfg;
}

void TrainConfig::validate() const {
  if (hidden == 0 || embed_dim == 0) throw ValidationError("hidden and embedding sizes must be > 0");
  if (batch_size == 0) throw ValidationError("batch size must be > 0");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be > 0");
  if (!(clip > 0.0)) throw ValidationError("clip threshold must be > 0");
  if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
  if (max_context_tokens == 0 || max_response_tokens == 0)
    throw ValidationError("maximum sequence lengths must be > 0");
}

TrainResult train(EncoderParams init, std::span<const Example> examples, const TrainConfig& cfg,
                  const Validator& validate) {
  cfg.validate();
  TrainResult result{std::move(init), {}};
  if (cfg.epochs == 0 || examples.empty()) return result;

  AdamState adam = AdamState::for_params(result.params);
  const AdamConfig adam_cfg{cfg.lr};
  const LossOptions loss_opts{cfg.reduction, cfg.lambda};
  Rng rng(derive_seed(cfg.seed, 1));
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Example> batch;
  std::size_t batch_id = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(examples[order[k]]);
      LossAndGrads lg = loss_and_grads(result.params, batch, loss_opts, batch_id++);
      total += cfg.reduction == Reduction::mean ? lg.loss * static_cast<double>(batch.size())
                                                : lg.loss;
      clip_gradients(lg.grads, cfg.clip);
      adam_step(adam, result.params, lg.grads, adam_cfg);
    }
    if (!result.params.all_finite())
      throw NumericError("parameters became non-finite in epoch " + std::to_string(epoch));
    EpochLog log{epoch, total / static_cast<double>(examples.size()), std::nullopt};
    if (validate) log.val_recall_at_1 = validate(result.params);
    result.history.push_back(log);
  }
  return result;
}

std::string format_training_log(std::span<const EpochLog> history) {
  const bool with_val = !history.empty() && history.front().val_recall_at_1.has_value();
  std::string out = with_val ? "epoch,loss,val_recall_at_1\n" : "epoch,loss\n";
  for (const auto& e : history) {
    out += std::to_string(e.epoch) + "," + format_double(e.loss);
    if (with_val) out += "," + format_double(e.val_recall_at_1.value_or(0.0));
    out += '\n';
  }
  return out;
}

std::vector<ScoredIndex> predict(const EncoderParams& params, std::span<const std::int32_t> context,
                                 std::span<const std::vector<std::int32_t>> candidates) {
  const Vector c = encode_sequence(params, context);
  std::vector<ScoredIndex> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double z = score_logit(params, c, encode_sequence(params, candidates[i]));
    out.push_back({i, sigmoid(z), z});
  }
  std::sort(out.begin(), out.end(), [](const ScoredIndex& a, const ScoredIndex& b) {
    if (a.logit != b.logit) return a.logit > b.logit;
    return a.index < b.index;
  });
  return out;
}

}  // namespace dyadic
