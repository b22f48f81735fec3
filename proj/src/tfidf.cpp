#include "dyadic/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dyadic {

IdfTable IdfTable::fit(std::span<const TokenSequence> documents) {
  if (documents.empty()) throw ValidationError("cannot fit idf on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto tok : seen) ++df[std::string(tok)];
  }
  IdfTable table;
  table.documents_ = documents.size();
  const double n = static_cast<double>(documents.size());
  for (auto& [tok, count] : df) {
    table.index_.emplace(tok, table.tokens_.size());
    table.tokens_.push_back(tok);
    table.weights_.push_back(std::log(n / static_cast<double>(count)));
  }
  return table;
}

std::optional<std::size_t> IdfTable::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double IdfTable::idf(std::string_view token) const {
  auto idx = index_of(token);
  return idx ? weights_[*idx] : 0.0;
}

std::string IdfTable::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += format_double(weights_[i]);
    out += '\n';
  }
  return out;
}

IdfTable IdfTable::from_tsv(std::string_view text) {
  std::map<std::string, double> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw ValidationError("idf table line without token<TAB>idf");
    double w = parse_double(line.substr(tab + 1));
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("idf weights must be >= 0");
    rows[std::string(line.substr(0, tab))] = w;
  }
  IdfTable table;
  for (auto& [tok, w] : rows) {
    table.index_.emplace(tok, table.tokens_.size());
    table.tokens_.push_back(tok);
    table.weights_.push_back(w);
  }
  return table;
}

void IdfTable::save(const std::filesystem::path& path) const { write_file_atomic(path, to_tsv()); }

IdfTable IdfTable::load(const std::filesystem::path& path) { return from_tsv(read_file(path)); }

SparseVector vectorize(std::span<const std::string> seq, const IdfTable& idf) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tok : seq)
    if (auto idx = idf.index_of(tok)) ++counts[*idx];
  SparseVector v;
  for (auto [idx, count] : counts) {
    const double w = static_cast<double>(count) * idf.weight(idx);
    if (w != 0.0) v.emplace(idx, w);
  }
  return v;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (auto [i, w] : a) na += w * w;
  for (auto [i, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void sort_ranking(std::vector<ScoredCandidate>& ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const ScoredCandidate& x, const ScoredCandidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.index < y.index;
  });
}

std::vector<ScoredCandidate> rank_responses(const SparseVector& context,
                                            std::span<const SparseVector> candidates) {
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out.push_back({i, cosine(context, candidates[i])});
  sort_ranking(out);
  return out;
}

TfidfRanker TfidfRanker::fit(std::span<const std::string> contexts) {
  std::vector<TokenSequence> docs;
  docs.reserve(contexts.size());
  for (const auto& c : contexts) docs.push_back(preprocess(c));
  return TfidfRanker(IdfTable::fit(docs));
}

std::vector<ScoredCandidate> TfidfRanker::rank(std::string_view context,
                                               std::span<const std::string> candidates) const {
  const SparseVector ctx = vectorize(preprocess(context), idf_);
  std::vector<SparseVector> cands;
  cands.reserve(candidates.size());
  for (const auto& c : candidates) cands.push_back(vectorize(preprocess(c), idf_));
  return rank_responses(ctx, cands);
}

}  // namespace dyadic
