#include "dyadic/models.hpp"

#include <set>

#include "dyadic/checkpoint.hpp"
#include "dyadic/eval.hpp"

namespace dyadic {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "tfidf") return ModelKind::tfidf;
  if (name == "rnn") return ModelKind::rnn;
  if (name == "lstm") return ModelKind::lstm;
  throw ValidationError("unknown model: " + std::string(name) + " (expected tfidf, rnn or lstm)");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::tfidf:
      return "tfidf";
    case ModelKind::rnn:
      return "rnn";
    case ModelKind::lstm:
      return "lstm";
  }
  return "?";
}

std::vector<std::int32_t> DualEncoderModel::encode_context(std::string_view text) const {
  return encode(preprocess(text), vocab, config.max_context_tokens, Truncate::keep_last);
}

std::vector<std::int32_t> DualEncoderModel::encode_response(std::string_view text) const {
  return encode(preprocess(text), vocab, config.max_response_tokens, Truncate::keep_first);
}

Example DualEncoderModel::make_example(const Triple& t) const {
  return {encode_context(t.context), encode_response(t.response), t.flag};
}

std::vector<ScoredCandidate> DualEncoderModel::rank(std::string_view context,
                                                    std::span<const std::string> candidates) const {
  const auto ctx = encode_context(context);
  std::vector<std::vector<std::int32_t>> cands;
  cands.reserve(candidates.size());
  for (const auto& c : candidates) cands.push_back(encode_response(c));
  std::vector<ScoredCandidate> out;
  for (const auto& s : predict(params, ctx, cands)) out.push_back({s.index, s.probability});
  return out;
}

std::vector<std::string> training_contexts(std::span<const Triple> triples) {
  std::vector<std::string> out;
  std::set<std::string_view> seen;
  for (const auto& t : triples)
    if (t.flag == 1 && seen.insert(t.context).second) out.push_back(t.context);
  return out;
}

TfidfRanker train_tfidf(std::span<const Triple> triples) {
  const auto contexts = training_contexts(triples);
  return TfidfRanker::fit(contexts);
}

DualEncoderTraining train_dual_encoder(std::span<const Triple> triples, const TrainConfig& cfg,
                                       const DualEncoderOptions& opts) {
  cfg.validate();
  if (triples.empty()) throw ValidationError("no training triples");
  std::vector<TokenSequence> streams;
  streams.reserve(triples.size() * 2);
  for (const auto& t : triples) {
    streams.push_back(preprocess(t.context));
    streams.push_back(preprocess(t.response));
  }

  DualEncoderModel model;
  model.config = cfg;
  model.vocab = build_vocab(streams, cfg.min_count);
  Rng init_rng(derive_seed(cfg.seed, 0));
  model.params = init_params(cfg.cell, model.vocab.size(), cfg.embed_dim, cfg.hidden, init_rng);
  if (opts.embeddings) load_word_vectors(*opts.embeddings, model.vocab, model.params);

  std::vector<Example> examples;
  examples.reserve(triples.size());
  for (const auto& t : triples) examples.push_back(model.make_example(t));

  Validator validator;
  if (!opts.validation.empty()) {
    validator = [&](const EncoderParams& params) {
      DualEncoderModel snapshot{model.vocab, model.config, params};
      Ranker ranker = [&](std::string_view c, std::span<const std::string> cands) {
        return snapshot.rank(c, cands);
      };
      EvalOptions eo;
      eo.ks = {1};
      eo.seed = opts.validation_seed;
      return evaluate_ranker(ranker, opts.validation, eo).at(1);
    };
  }

  TrainResult result = train(std::move(model.params), examples, cfg, validator);
  model.params = std::move(result.params);
  return {std::move(model), std::move(result.history)};
}

std::vector<ScoredCandidate> rank_with(const Model& model, std::string_view context,
                                       std::span<const std::string> candidates) {
  return std::visit([&](const auto& m) { return m.rank(context, candidates); }, model);
}

void save_model(const std::filesystem::path& path, const Model& model) {
  if (const auto* tfidf = std::get_if<TfidfRanker>(&model)) {
    tfidf->idf().save(path);
  } else {
    save_checkpoint(path, std::get<DualEncoderModel>(model));
  }
}

Model load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (looks_like_checkpoint(text)) return parse_checkpoint(text);
  return TfidfRanker(IdfTable::from_tsv(text));
}

}  // namespace dyadic
