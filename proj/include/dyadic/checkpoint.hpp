#pragma once

// Dual-encoder checkpoint, plain text:
//
//   dyadic-dual-encoder 1
//   cell lstm
//   hidden 200
//   ...                      one "key value" line per config field
//   vocab <n>
//   <token>                  n lines, index order (reserved entries included)
//   tensor <name> <rows> <cols>
//   <v v v ...>              rows lines, row-major, shortest round-trip decimals
//   ...
//   end
//
// Reloading reproduces every parameter bit for bit.
//
// Word vectors: "token v1 ... vd" per line; an optional leading
// "count dim" header line is skipped.

#include <filesystem>
#include <string>
#include <string_view>

#include "dyadic/models.hpp"

namespace dyadic {

std::string format_checkpoint(const DualEncoderModel& model);
DualEncoderModel parse_checkpoint(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const DualEncoderModel& model);
DualEncoderModel load_checkpoint(const std::filesystem::path& path);

bool looks_like_checkpoint(std::string_view text);

/// Overwrites embedding rows of in-vocabulary tokens with pretrained
/// vectors. Returns the number of rows replaced. Throws ValidationError on
/// a dimension mismatch.
std::size_t load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                              EncoderParams& params);

}  // namespace dyadic
