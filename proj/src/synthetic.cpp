#include "dyadic/synthetic.hpp"

#include <algorithm>

#include "dyadic/preprocess.hpp"

namespace dyadic {

namespace {

struct Generator {
  const KeywordTaskConfig& cfg;
  Rng rng;

  std::string word(char prefix, std::size_t i) { return std::string(1, prefix) + "w" + std::to_string(i); }

  std::string context(std::size_t keyword) {
    const std::size_t utterances = 1 + rng.uniform_index(3);
    std::vector<std::string> parts;
    for (std::size_t u = 0; u < utterances; ++u) {
      std::vector<std::string> toks;
      const std::size_t n = 3 + rng.uniform_index(4);
      for (std::size_t k = 0; k < n; ++k) toks.push_back(word('c', rng.uniform_index(cfg.context_fillers)));
      if (u + 1 == utterances)
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(n + 1)),
                    word('k', keyword));
      parts.push_back(join_tokens(toks));
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += kEos;
      out += parts[i];
    }
    return out;
  }

  std::string response(std::size_t keyword) {
    const std::size_t n = 2 + rng.uniform_index(3);
    std::vector<std::string> toks;
    for (std::size_t k = 0; k < n; ++k) toks.push_back(word('r', rng.uniform_index(cfg.response_fillers)));
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(n + 1)),
                word('k', keyword));
    return join_tokens(toks);
  }

  std::size_t other_keyword(std::size_t keyword) {
    std::size_t k = rng.uniform_index(cfg.keywords - 1);
    return k >= keyword ? k + 1 : k;
  }
};

}  // namespace

KeywordTask make_keyword_task(const KeywordTaskConfig& cfg) {
  if (cfg.keywords < cfg.negatives + 1)
    throw ValidationError("keyword task needs more keywords than candidates per record");
  if (cfg.train_positives < cfg.keywords)
    throw ValidationError("keyword task needs at least one training positive per keyword");
  if (cfg.context_fillers == 0 || cfg.response_fillers == 0)
    throw ValidationError("keyword task needs filler tokens");
  Generator gen{cfg, Rng(cfg.seed)};
  KeywordTask task;

  std::vector<std::size_t> keys;
  std::vector<Triple> positives;
  for (std::size_t i = 0; i < cfg.train_positives; ++i) {
    // Every keyword appears once before sampling starts, so each one is in the idf vocabulary.
    const std::size_t kw = i < cfg.keywords ? i : gen.rng.uniform_index(cfg.keywords);
    keys.push_back(kw);
    positives.push_back({gen.context(kw), gen.response(kw), 1});
  }
  for (std::size_t i = 0; i < positives.size(); ++i) {
    task.train.push_back(positives[i]);
    // Negative: another example's response with a different keyword.
    std::size_t j;
    do {
      j = gen.rng.uniform_index(positives.size());
    } while (keys[j] == keys[i]);
    task.train.push_back({positives[i].context, positives[j].response, 0});
  }
  gen.rng.shuffle(task.train);

  for (std::size_t i = 0; i < cfg.test_records; ++i) {
    const std::size_t kw = gen.rng.uniform_index(cfg.keywords);
    TestRecord rec{gen.context(kw), gen.response(kw), {}};
    std::vector<std::size_t> used{kw};
    while (rec.distractors.size() < cfg.negatives) {
      const std::size_t other = gen.other_keyword(kw);
      if (std::find(used.begin(), used.end(), other) != used.end()) continue;
      used.push_back(other);
      rec.distractors.push_back(gen.response(other));
    }
    task.test.push_back(std::move(rec));
  }
  return task;
}

}  // namespace dyadic
