#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/preprocess.hpp"

namespace dyadic {

/// idf(w) = ln(N / df(w)) over the fitted documents. Tokens are indexed in
/// lexicographic order; tokens never seen at fit time have no entry.
class IdfTable {
 public:
  IdfTable() = default;

  static IdfTable fit(std::span<const TokenSequence> documents);

  std::optional<std::size_t> index_of(std::string_view token) const;
  double idf(std::string_view token) const;  // 0 for unknown tokens
  double weight(std::size_t index) const { return weights_.at(index); }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::size_t size() const { return tokens_.size(); }
  std::size_t documents() const { return documents_; }

  // token<TAB>idf, one per line.
  std::string to_tsv() const;
  static IdfTable from_tsv(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static IdfTable load(const std::filesystem::path& path);

 private:
  std::vector<std::string> tokens_;
  std::vector<double> weights_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t documents_ = 0;
};

// Token index -> weight. Never holds explicit zeros.
using SparseVector = std::map<std::size_t, double>;

SparseVector vectorize(std::span<const std::string> seq, const IdfTable& idf);

// Zero vectors score 0.
double cosine(const SparseVector& a, const SparseVector& b);

struct ScoredCandidate {
  std::size_t index = 0;
  double score = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

// Descending score, ties by ascending candidate index.
void sort_ranking(std::vector<ScoredCandidate>& ranking);

std::vector<ScoredCandidate> rank_responses(const SparseVector& context,
                                            std::span<const SparseVector> candidates);

class TfidfRanker {
 public:
  explicit TfidfRanker(IdfTable idf) : idf_(std::move(idf)) {}

  // Fits idf on the (preprocessed) training contexts.
  static TfidfRanker fit(std::span<const std::string> contexts);

  std::vector<ScoredCandidate> rank(std::string_view context,
                                    std::span<const std::string> candidates) const;
  const IdfTable& idf() const { return idf_; }

 private:
  IdfTable idf_;
};

}  // namespace dyadic
