#pragma once

// Keyword-copy task: every context carries one keyword and its true
// response repeats it. Context fillers, response fillers and keywords are
// disjoint token sets, so a distractor (built around a different keyword)
// shares no token with the context.

#include <cstdint>
#include <vector>

#include "dyadic/triples.hpp"

namespace dyadic {

struct KeywordTaskConfig {
  std::size_t keywords = 12;
  std::size_t context_fillers = 30;
  std::size_t response_fillers = 30;
  std::size_t train_positives = 1000;  // one negative each
  std::size_t test_records = 500;
  std::size_t negatives = 9;
  std::uint64_t seed = 1;
};

struct KeywordTask {
  std::vector<Triple> train;
  std::vector<TestRecord> test;
};

KeywordTask make_keyword_task(const KeywordTaskConfig& cfg);

}  // namespace dyadic
