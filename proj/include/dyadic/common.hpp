#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dyadic {

// Error hierarchy. The CLI maps each kind onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input or configuration (exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unreadable / unwritable files (exit code 2).
class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training or scoring (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A log line that looks like a message but has a malformed timestamp.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string line)
      : Error(what), line_(std::move(line)) {}
  const std::string& line() const { return line_; }

 private:
  std::string line_;
};

using Date = std::chrono::year_month_day;

std::string format_date(Date d);  // YYYY-MM-DD
std::optional<Date> parse_date(std::string_view text);

// Whole minutes since the epoch for (day, minute-of-day).
std::int64_t absolute_minute(Date d, int minute_of_day);

std::string format_clock(int minute_of_day);  // HH:MM

/// Seeded random source. Wraps mt19937_64 and implements its own
/// distributions so that sampled values are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform double in the closed interval [lo, hi].
  double uniform_closed(double lo, double hi);

  // Uniform double in [0, 1).
  double uniform01();

  double normal();

  template <typename T>
  void shuffle(std::span<T> xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(xs[i - 1], xs[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& xs) {
    shuffle(std::span<T>(xs));
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

// Independent stream seed derived from (seed, stream) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string to_lower(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::string_view trim(std::string_view s);

// Shortest representation that parses back to the identical double.
std::string format_double(double x);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

namespace csv {

// Quotes a field when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);
std::string join_row(std::span<const std::string> fields);

// Parses RFC-4180 style CSV. Quoted fields may span lines.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace csv

}  // namespace dyadic
