#pragma once

// Corpus TSV: one row per turn, header
//   dialogue_id  turn_index  date  time  sender  recipient  text
// Tabs and line breaks inside text are written as single spaces.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dyadic/disentangle.hpp"

namespace dyadic {

std::string format_corpus(std::span<const Dialogue> dialogues);
void write_corpus(const std::filesystem::path& path, std::span<const Dialogue> dialogues);

// Rows sharing a dialogue_id must be contiguous and ordered by turn_index.
std::vector<Dialogue> parse_corpus(std::string_view text);
std::vector<Dialogue> read_corpus(const std::filesystem::path& path);

}  // namespace dyadic
