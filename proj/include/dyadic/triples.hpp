#pragma once

// Next-utterance classification records.
//
// Train CSV:  context,response,flag
// Test CSV:   context,true_response,distractor_1,...,distractor_k
// Contexts join utterances with " __EOS__ ".

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/common.hpp"
#include "dyadic/disentangle.hpp"

namespace dyadic {

inline constexpr std::string_view kEos = " __EOS__ ";

struct Triple {
  std::string context;
  std::string response;
  int flag = 0;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;
};

struct TestRecord {
  std::string context;
  std::string true_response;
  std::vector<std::string> distractors;

  bool operator==(const TestRecord&) const = default;
};

struct SplitConfig {
  double test_fraction = 0.02;
  std::uint64_t seed = 1;
  std::size_t negatives_per_positive = 1;
  int max_context = 20;  // C

  void validate() const;
};

struct CorpusSplit {
  std::vector<Dialogue> train;
  std::vector<Dialogue> test;
};

/// Seeded uniform partition by whole dialogue. The test side receives
/// round(test_fraction * n) dialogues; both sides keep input order.
CorpusSplit split_corpus(std::span<const Dialogue> dialogues, double test_fraction,
                         std::uint64_t seed);

/// Context length for a dialogue of `turns` turns given a drawn eta:
///   n = round(10C / eta) + 2,  c = min(turns - 1, n - 1).
int context_length_for(int turns, int max_context, double eta);

/// Draws eta ~ U[C/2, 10C] and applies context_length_for.
/// Throws ValidationError when turns < 3.
int sample_context_length(int turns, int max_context, Rng& rng);

std::string join_context(std::span<const Turn> turns);

std::vector<TestRecord> make_test_records(std::span<const Dialogue> test_dialogues,
                                          const SplitConfig& cfg, Rng& rng);

std::vector<Triple> make_training_triples(std::span<const Dialogue> train_dialogues, Rng& rng);

std::string format_train_csv(std::span<const Triple> triples);
std::string format_test_csv(std::span<const TestRecord> records);
std::vector<Triple> parse_train_csv(std::string_view text);
std::vector<TestRecord> parse_test_csv(std::string_view text);

void write_train_csv(const std::filesystem::path& path, std::span<const Triple> triples);
void write_test_csv(const std::filesystem::path& path, std::span<const TestRecord> records);
std::vector<Triple> read_train_csv(const std::filesystem::path& path);
std::vector<TestRecord> read_test_csv(const std::filesystem::path& path);

}  // namespace dyadic
