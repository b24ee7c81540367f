#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "incivil/corpus.hpp"

namespace incivil::text {

struct Token {
  std::string surface;
  std::string lower;
  // [begin, end) in code points of the source text.
  std::size_t begin = 0;
  std::size_t end = 0;
};

using TokenSeq = std::vector<Token>;

/// Whitespace tokens with leading/trailing punctuation runs split off as
/// their own tokens. Tokens starting with '@' or '#' are kept whole.
TokenSeq tokenize(std::string_view text);

/// Builds a TokenSeq from pre-split words (spans are synthetic, one space apart).
TokenSeq from_words(const std::vector<std::string>& words);

class CharVocab {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;

  CharVocab() = default;
  /// Characters in index order starting at 2; duplicates rejected.
  explicit CharVocab(std::u32string chars);

  /// Vocabulary of every code point seen in `texts`, sorted by code point.
  static CharVocab build(const std::vector<std::string>& texts);

  std::int32_t index(char32_t cp) const;
  /// Inverse of index for real characters; PAD/UNK have no character.
  char32_t character(std::int32_t idx) const;
  std::size_t size() const { return chars_.size() + 2; }
  const std::u32string& chars() const { return chars_; }

  bool operator==(const CharVocab& other) const { return chars_ == other.chars_; }

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, std::int32_t> index_;
};

struct CharSeq {
  std::vector<std::int32_t> indices;
  /// Number of encoded (non-pad) positions.
  std::size_t length = 0;
};

inline constexpr std::size_t kDefaultMaxLen = 280;

CharSeq char_encode(std::string_view text, const CharVocab& vocab, std::size_t max_len = kDefaultMaxLen);
/// Decodes the first `length` positions; UNK decodes to U+FFFD.
std::string char_decode(const CharSeq& seq, const CharVocab& vocab);

using NgramCounts = std::map<std::string, std::int64_t>;

/// Lowercased n-grams joined by a single space with exact multiplicities.
NgramCounts ngrams(const TokenSeq& tokens, const std::set<int>& n_values);

struct NegationConfig {
  std::size_t window = 3;
  std::set<std::string, std::less<>> cues = {
      "not",    "no",    "never",  "don't", "dont",  "doesn't", "doesnt", "didn't",
      "didnt",  "won't", "wont",   "can't", "cant",  "ain't",   "aint"};
};

bool is_negation_cue(std::string_view lower, const NegationConfig& config = {});

/// True iff a lexicon word has a negation cue within `window` tokens before it.
bool detect_negation(const TokenSeq& tokens, const corpus::Lexicon& lexicon, std::size_t window = 3);
bool detect_negation(const TokenSeq& tokens, const corpus::Lexicon& lexicon, const NegationConfig& config);

struct EntityMention {
  std::string entity;
  std::size_t begin = 0;  // token index
  std::size_t end = 0;    // exclusive

  bool operator==(const EntityMention&) const = default;
};

/// Lowercase, collapse internal whitespace runs to one space.
std::string normalize_entity(std::string_view s);

/// Rule-based stand-in for an external NER tool: maximal capitalized runs,
/// plus every @mention and #hashtag (normalized without the sigil). A lone
/// capitalized token at position 0 is skipped.
std::vector<EntityMention> entity_candidates(const TokenSeq& tokens);

/// Entity source used by profiling; either the rule-based recognizer or
/// externally produced annotations.
class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual std::vector<EntityMention> recognize(const std::string& tweet_id, const TokenSeq& tokens) const = 0;
};

class RuleBasedRecognizer final : public EntityRecognizer {
 public:
  std::vector<EntityMention> recognize(const std::string& tweet_id, const TokenSeq& tokens) const override;
};

/// Imported annotations (`{tweet_id, entities:[{text,start_token,end_token}]}`
/// JSONL). Tweets without an annotation fall back to `fallback` when given,
/// otherwise yield no entities.
class AnnotatedRecognizer final : public EntityRecognizer {
 public:
  AnnotatedRecognizer(std::map<std::string, std::vector<EntityMention>> annotations,
                      const EntityRecognizer* fallback = nullptr);

  static AnnotatedRecognizer parse(std::string_view jsonl, const EntityRecognizer* fallback = nullptr);
  static AnnotatedRecognizer load(const std::string& path, const EntityRecognizer* fallback = nullptr);

  std::vector<EntityMention> recognize(const std::string& tweet_id, const TokenSeq& tokens) const override;
  std::size_t size() const { return annotations_.size(); }

 private:
  std::map<std::string, std::vector<EntityMention>> annotations_;
  const EntityRecognizer* fallback_;
};

}  // namespace incivil::text
