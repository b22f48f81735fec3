#include "dyadic/triples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace dyadic {

void SplitConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("test fraction must lie strictly between 0 and 1");
  if (negatives_per_positive < 1) throw ValidationError("need at least one negative");
  if (max_context < 1) throw ValidationError("maximum context size must be >= 1");
}

CorpusSplit split_corpus(std::span<const Dialogue> dialogues, double test_fraction,
                         std::uint64_t seed) {
  const std::size_t n = dialogues.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test && i < n; ++i) is_test[order[i]] = true;

  CorpusSplit out;
  for (std::size_t i = 0; i < n; ++i)
    (is_test[i] ? out.test : out.train).push_back(dialogues[i]);
  return out;
}

int context_length_for(int turns, int max_context, double eta) {
  const double scaled = 10.0 * max_context / eta;
  const int n = static_cast<int>(std::floor(scaled + 0.5)) + 2;
  return std::min(turns - 1, n - 1);
}

int sample_context_length(int turns, int max_context, Rng& rng) {
  if (turns < 3)
    throw ValidationError("dialogue needs at least 3 turns, got " + std::to_string(turns));
  if (max_context < 1) throw ValidationError("maximum context size must be >= 1");
  const double eta = rng.uniform_closed(max_context / 2.0, 10.0 * max_context);
  return context_length_for(turns, max_context, eta);
}

std::string join_context(std::span<const Turn> turns) {
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i) out += kEos;
    out += turns[i].text;
  }
  return out;
}

namespace {

// Draws up to k distinct indices j != self with texts[j] != texts[self].
std::vector<std::size_t> sample_others(std::span<const std::string> texts, std::size_t self,
                                       std::size_t k, std::size_t available, Rng& rng) {
  const std::size_t n = texts.size();
  std::vector<std::size_t> picked;
  picked.reserve(k);
  if (available * 8 < n) {
    std::vector<std::size_t> pool;
    for (std::size_t j = 0; j < n; ++j)
      if (j != self && texts[j] != texts[self]) pool.push_back(j);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t r = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[r]);
      picked.push_back(pool[i]);
    }
    return picked;
  }
  while (picked.size() < k) {
    std::size_t j = rng.uniform_index(n);
    if (j == self || texts[j] == texts[self]) continue;
    if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
    picked.push_back(j);
  }
  return picked;
}

}  // namespace

std::vector<TestRecord> make_test_records(std::span<const Dialogue> test_dialogues,
                                          const SplitConfig& cfg, Rng& rng) {
  std::vector<TestRecord> records;
  std::vector<std::string> truths;
  records.reserve(test_dialogues.size());
  for (const auto& d : test_dialogues) {
    const int t = static_cast<int>(d.turns.size());
    if (t < 3) throw ValidationError("test dialogue " + d.id + " has fewer than 3 turns");
    const int c = sample_context_length(t, cfg.max_context, rng);
    TestRecord rec;
    rec.context = join_context(std::span<const Turn>(d.turns).first(static_cast<std::size_t>(c)));
    rec.true_response = d.turns[static_cast<std::size_t>(c)].text;
    truths.push_back(rec.true_response);
    records.push_back(std::move(rec));
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& s : truths) ++counts[s];
  const std::size_t k = cfg.negatives_per_positive;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t available = truths.size() - counts[truths[i]];
    if (available < k)
      throw ValidationError("not enough distinct responses in the test set for " +
                            std::to_string(k) + " distractors");
    for (std::size_t j : sample_others(truths, i, k, available, rng))
      records[i].distractors.push_back(truths[j]);
  }
  return records;
}

std::vector<Triple> make_training_triples(std::span<const Dialogue> train_dialogues, Rng& rng) {
  std::vector<Triple> positives;
  for (const auto& d : train_dialogues) {
    for (std::size_t i = 2; i < d.turns.size(); ++i) {
      positives.push_back(
          {join_context(std::span<const Turn>(d.turns).first(i)), d.turns[i].text, 1});
    }
  }
  std::vector<std::string> responses;
  responses.reserve(positives.size());
  for (const auto& p : positives) responses.push_back(p.response);
  std::map<std::string, std::size_t> counts;
  for (const auto& s : responses) ++counts[s];

  std::vector<Triple> out;
  out.reserve(positives.size() * 2);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const std::size_t available = responses.size() - counts[responses[i]];
    if (available == 0)
      throw ValidationError("cannot sample a negative response: all responses are identical");
    const std::size_t j = sample_others(responses, i, 1, available, rng).front();
    out.push_back(positives[i]);
    out.push_back({positives[i].context, responses[j], 0});
  }
  rng.shuffle(out);
  return out;
}

std::string format_train_csv(std::span<const Triple> triples) {
  std::string out = "context,response,flag\n";
  for (const auto& t : triples) {
    out += csv::quote(t.context);
    out += ',';
    out += csv::quote(t.response);
    out += ',';
    out += t.flag ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string format_test_csv(std::span<const TestRecord> records) {
  const std::size_t k = records.empty() ? 0 : records.front().distractors.size();
  std::string out = "context,true_response";
  for (std::size_t i = 1; i <= k; ++i) out += ",distractor_" + std::to_string(i);
  out += '\n';
  for (const auto& r : records) {
    if (r.distractors.size() != k) throw ValidationError("test records differ in distractor count");
    out += csv::quote(r.context);
    out += ',';
    out += csv::quote(r.true_response);
    for (const auto& d : r.distractors) {
      out += ',';
      out += csv::quote(d);
    }
    out += '\n';
  }
  return out;
}

std::vector<Triple> parse_train_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<Triple> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (i == 0 && !row.empty() && row[0] == "context") continue;
    if (row.size() != 3)
      throw ValidationError("train CSV row " + std::to_string(i + 1) + ": expected 3 fields");
    if (row[2] != "0" && row[2] != "1")
      throw ValidationError("train CSV row " + std::to_string(i + 1) + ": flag must be 0 or 1");
    out.push_back({std::move(row[0]), std::move(row[1]), row[2] == "1" ? 1 : 0});
  }
  return out;
}

std::vector<TestRecord> parse_test_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<TestRecord> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (i == 0 && !row.empty() && row[0] == "context") continue;
    if (row.size() < 3)
      throw ValidationError("test CSV row " + std::to_string(i + 1) +
                            ": expected context, true response and distractors");
    TestRecord rec{std::move(row[0]), std::move(row[1]), {}};
    for (std::size_t j = 2; j < row.size(); ++j) rec.distractors.push_back(std::move(row[j]));
    out.push_back(std::move(rec));
  }
  return out;
}

void write_train_csv(const std::filesystem::path& path, std::span<const Triple> triples) {
  write_file_atomic(path, format_train_csv(triples));
}

void write_test_csv(const std::filesystem::path& path, std::span<const TestRecord> records) {
  write_file_atomic(path, format_test_csv(records));
}

std::vector<Triple> read_train_csv(const std::filesystem::path& path) {
  return parse_train_csv(read_file(path));
}

std::vector<TestRecord> read_test_csv(const std::filesystem::path& path) {
  return parse_test_csv(read_file(path));
}

}  // namespace dyadic
