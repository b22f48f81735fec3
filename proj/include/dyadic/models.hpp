#pragma once

// Text-level wrappers around the two ranker families, plus model files.
//
// A TF-IDF model file is its idf table (token<TAB>idf). A dual-encoder
// model file is a checkpoint (see checkpoint.hpp).

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadic/dual_encoder.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/tfidf.hpp"
#include "dyadic/triples.hpp"

namespace dyadic {

enum class ModelKind { tfidf, rnn, lstm };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

struct DualEncoderModel {
  Vocabulary vocab;
  TrainConfig config;
  EncoderParams params;

  std::vector<std::int32_t> encode_context(std::string_view text) const;
  std::vector<std::int32_t> encode_response(std::string_view text) const;
  Example make_example(const Triple& t) const;

  std::vector<ScoredCandidate> rank(std::string_view context,
                                    std::span<const std::string> candidates) const;
};

using Model = std::variant<TfidfRanker, DualEncoderModel>;

// Distinct contexts of the positive triples, in first-seen order.
std::vector<std::string> training_contexts(std::span<const Triple> triples);

TfidfRanker train_tfidf(std::span<const Triple> triples);

struct DualEncoderTraining {
  DualEncoderModel model;
  std::vector<EpochLog> history;
};

struct DualEncoderOptions {
  std::optional<std::filesystem::path> embeddings;  // word-vector text file
  std::span<const TestRecord> validation;           // 1-in-N R@1 per epoch
  std::uint64_t validation_seed = 0;
};

DualEncoderTraining train_dual_encoder(std::span<const Triple> triples, const TrainConfig& cfg,
                                       const DualEncoderOptions& opts = {});

std::vector<ScoredCandidate> rank_with(const Model& model, std::string_view context,
                                       std::span<const std::string> candidates);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace dyadic
