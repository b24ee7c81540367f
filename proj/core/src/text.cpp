#include "incivil/text.hpp"

#include <algorithm>

#include "json.hpp"

namespace incivil::text {

namespace {

void push_token(TokenSeq& out, std::u32string_view cps, std::size_t begin, std::size_t end) {
  if (end <= begin) return;
  Token t;
  t.surface = utf8::encode(cps.substr(begin, end - begin));
  t.lower = utf8::to_lower(t.surface);
  t.begin = begin;
  t.end = end;
  out.push_back(std::move(t));
}

}  // namespace

TokenSeq tokenize(std::string_view text) {
  std::u32string cps = utf8::decode(text);
  std::u32string_view view(cps);
  TokenSeq out;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_space(cps[i])) ++i;
    if (i >= cps.size()) break;
    std::size_t start = i;
    while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
    std::size_t end = i;
    if (cps[start] == U'@' || cps[start] == U'#') {
      push_token(out, view, start, end);
      continue;
    }
    std::size_t core_begin = start;
    while (core_begin < end && utf8::is_punct(cps[core_begin])) ++core_begin;
    if (core_begin == end) {
      push_token(out, view, start, end);
      continue;
    }
    std::size_t core_end = end;
    while (core_end > core_begin && utf8::is_punct(cps[core_end - 1])) --core_end;
    push_token(out, view, start, core_begin);
    push_token(out, view, core_begin, core_end);
    push_token(out, view, core_end, end);
  }
  return out;
}

TokenSeq from_words(const std::vector<std::string>& words) {
  TokenSeq out;
  std::size_t pos = 0;
  for (const auto& w : words) {
    Token t;
    t.surface = w;
    t.lower = utf8::to_lower(w);
    t.begin = pos;
    t.end = pos + utf8::decode(w).size();
    pos = t.end + 1;
    out.push_back(std::move(t));
  }
  return out;
}

CharVocab::CharVocab(std::u32string chars) : chars_(std::move(chars)) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    auto [it, inserted] = index_.emplace(chars_[i], static_cast<std::int32_t>(i + 2));
    if (!inserted) throw Error(ErrorCode::kInvalidArgument, "duplicate character in vocabulary");
  }
}

CharVocab CharVocab::build(const std::vector<std::string>& texts) {
  std::set<char32_t> seen;
  for (const auto& t : texts)
    for (char32_t cp : utf8::decode(t)) seen.insert(cp);
  return CharVocab(std::u32string(seen.begin(), seen.end()));
}

std::int32_t CharVocab::index(char32_t cp) const {
  auto it = index_.find(cp);
  return it == index_.end() ? kUnk : it->second;
}

char32_t CharVocab::character(std::int32_t idx) const {
  if (idx < 2 || static_cast<std::size_t>(idx) >= size()) return U'�';
  return chars_[static_cast<std::size_t>(idx - 2)];
}

CharSeq char_encode(std::string_view text, const CharVocab& vocab, std::size_t max_len) {
  if (max_len == 0) throw Error(ErrorCode::kInvalidArgument, "max_len must be >= 1");
  std::u32string cps = utf8::decode(text);
  CharSeq seq;
  seq.length = std::min(cps.size(), max_len);
  seq.indices.assign(max_len, CharVocab::kPad);
  for (std::size_t i = 0; i < seq.length; ++i) seq.indices[i] = vocab.index(cps[i]);
  return seq;
}

std::string char_decode(const CharSeq& seq, const CharVocab& vocab) {
  std::u32string out;
  for (std::size_t i = 0; i < seq.length && i < seq.indices.size(); ++i) out.push_back(vocab.character(seq.indices[i]));
  return utf8::encode(out);
}

NgramCounts ngrams(const TokenSeq& tokens, const std::set<int>& n_values) {
  NgramCounts counts;
  for (int n : n_values) {
    if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
    auto un = static_cast<std::size_t>(n);
    if (tokens.size() < un) continue;
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      std::string gram = tokens[i].lower;
      for (std::size_t k = 1; k < un; ++k) {
        gram += ' ';
        gram += tokens[i + k].lower;
      }
      ++counts[gram];
    }
  }
  return counts;
}

bool is_negation_cue(std::string_view lower, const NegationConfig& config) {
  if (config.cues.count(lower) > 0) return true;
  auto ends_with = [&](std::string_view suffix) {
    return lower.size() > suffix.size() && lower.substr(lower.size() - suffix.size()) == suffix;
  };
  return ends_with("n't") || ends_with("n’t");
}

bool detect_negation(const TokenSeq& tokens, const corpus::Lexicon& lexicon, const NegationConfig& config) {
  if (config.window == 0) throw Error(ErrorCode::kInvalidArgument, "negation window must be >= 1");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!lexicon.contains(tokens[i].lower)) continue;
    std::size_t from = i >= config.window ? i - config.window : 0;
    for (std::size_t j = from; j < i; ++j) {
      if (is_negation_cue(tokens[j].lower, config)) return true;
    }
  }
  return false;
}

bool detect_negation(const TokenSeq& tokens, const corpus::Lexicon& lexicon, std::size_t window) {
  NegationConfig config;
  config.window = window;
  return detect_negation(tokens, lexicon, config);
}

std::string normalize_entity(std::string_view s) {
  std::string out;
  for (const auto& piece : split_whitespace(s)) {
    if (!out.empty()) out += ' ';
    out += utf8::to_lower(piece);
  }
  return out;
}

namespace {

bool is_capitalized(const Token& t) {
  std::u32string cps = utf8::decode(t.surface);
  return !cps.empty() && utf8::is_upper(cps.front());
}

bool has_sigil(const Token& t) {
  return !t.surface.empty() && (t.surface.front() == '@' || t.surface.front() == '#');
}

}  // namespace

std::vector<EntityMention> entity_candidates(const TokenSeq& tokens) {
  std::vector<EntityMention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (has_sigil(tokens[i])) {
      std::string name = normalize_entity(strip_punct(std::string_view(tokens[i].surface).substr(1)));
      if (!name.empty()) out.push_back({name, i, i + 1});
      ++i;
      continue;
    }
    if (!is_capitalized(tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && !has_sigil(tokens[j]) && is_capitalized(tokens[j])) ++j;
    if (!(i == 0 && j == 1)) {
      std::string name;
      for (std::size_t k = i; k < j; ++k) {
        if (!name.empty()) name += ' ';
        name += tokens[k].surface;
      }
      out.push_back({normalize_entity(name), i, j});
    }
    i = j;
  }
  return out;
}

std::vector<EntityMention> RuleBasedRecognizer::recognize(const std::string&, const TokenSeq& tokens) const {
  return entity_candidates(tokens);
}

AnnotatedRecognizer::AnnotatedRecognizer(std::map<std::string, std::vector<EntityMention>> annotations,
                                         const EntityRecognizer* fallback)
    : annotations_(std::move(annotations)), fallback_(fallback) {}

AnnotatedRecognizer AnnotatedRecognizer::parse(std::string_view jsonl, const EntityRecognizer* fallback) {
  using nlohmann::json;
  std::map<std::string, std::vector<EntityMention>> annotations;
  std::size_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json obj = json::parse(line);
      auto id = obj.at("tweet_id").get<std::string>();
      std::vector<EntityMention> mentions;
      for (const auto& e : obj.at("entities")) {
        EntityMention m;
        m.entity = normalize_entity(e.at("text").get<std::string>());
        m.begin = e.at("start_token").get<std::size_t>();
        m.end = e.at("end_token").get<std::size_t>();
        if (m.entity.empty() || m.end <= m.begin) {
          throw Error(ErrorCode::kParse, "invalid entity span");
        }
        mentions.push_back(std::move(m));
      }
      annotations[id] = std::move(mentions);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "entity annotation line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return AnnotatedRecognizer(std::move(annotations), fallback);
}

AnnotatedRecognizer AnnotatedRecognizer::load(const std::string& path, const EntityRecognizer* fallback) {
  return parse(read_file(path), fallback);
}

std::vector<EntityMention> AnnotatedRecognizer::recognize(const std::string& tweet_id, const TokenSeq& tokens) const {
  auto it = annotations_.find(tweet_id);
  if (it == annotations_.end()) {
    return fallback_ ? fallback_->recognize(tweet_id, tokens) : std::vector<EntityMention>{};
  }
  std::vector<EntityMention> out;
  for (const auto& m : it->second) {
    if (m.end <= tokens.size()) out.push_back(m);
  }
  return out;
}

}  // namespace incivil::text
