#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace incivil {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kNoTargets,
  kSelfMentionOnly,
  kDimensionMismatch,
  kState,
  kDivergence,
  kUndefinedReputation,
  kSingleClass,
  kVocabMismatch,
  kMissingInput,
  kEmpty,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Carries a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using Rng = std::mt19937_64;

using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)`; throws Error(kParse).
Timestamp parse_iso8601(std::string_view text);
/// Canonical `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Timestamp ts);
int hour_of_day(Timestamp ts, int utc_offset_hours = 0);

namespace utf8 {

/// Decodes UTF-8; invalid bytes become U+FFFD.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
std::string encode(char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_upper(char32_t cp);
bool is_alnum(char32_t cp);
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view s);

}  // namespace utf8

/// Splits on Unicode whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);
/// Strips leading/trailing punctuation code points.
std::string strip_punct(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Exact textual encoding of a double (C99 hex-float).
std::string hexfloat(double v);
double parse_hexfloat(std::string_view s);
/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a, used for provenance digests (not a security hash).
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

/// Number of worker threads allowed for internal parallelism
/// (`INCIVIL_THREADS`, default 1).
std::size_t thread_cap();

/// Runs body(chunk_index) for chunk_index in [0, n_chunks) using up to
/// thread_cap() threads. Callers reduce per-chunk results in index order, so
/// results do not depend on the thread count.
void parallel_for(std::size_t n_chunks, const std::function<void(std::size_t)>& body);

}  // namespace incivil
