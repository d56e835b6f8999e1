#pragma once

#include <cctype>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/text.hpp"
#include "jargon/tokenizer.hpp"

namespace jargon {

struct RawDocument {
  std::string doc_id;
  std::string text;
  std::string source;
};

struct SentenceRecord {
  std::string sent_id;
  std::string doc_id;
  std::vector<std::string> words;
  std::string char_text;
};

struct FilterConfig {
  int max_subword_tokens = 128;
  int min_words = 6;
  int max_word_chars = 16;

  void validate() const {
    if (max_subword_tokens <= 0 || min_words < 1 || max_word_chars <= 0) {
      throw ConfigError("filter limits must be strictly positive");
    }
  }
};

struct CorpusStats {
  std::size_t posts = 0;
  std::size_t sentences = 0;
  std::size_t sentences_filtered = 0;
  std::size_t malformed = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

namespace detail {

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Tokens ending in a period that do not end a sentence.
inline bool is_abbreviation(std::string_view token) {
  static const std::unordered_set<std::string> kAbbrev = {
      "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "approx", "no", "mg", "mcg"};
  std::string t = text::to_lower(token);
  while (!t.empty() && (t.back() == '.' || is_closer(t.back()))) t.pop_back();
  std::size_t b = t.find_last_of(" \t\n(\"'");
  if (b != std::string::npos) t = t.substr(b + 1);
  return kAbbrev.count(t) != 0 || (t.size() == 1 && std::isalpha(static_cast<unsigned char>(t[0])));
}

}  // namespace detail

/// Punctuation-driven sentence segmentation. A boundary is a run of
/// [.!?] (plus closing quotes/brackets) followed by whitespace, unless the
/// period closes a known abbreviation or single initial. Segments are trimmed;
/// blank segments are dropped.
inline std::vector<std::string> split_sentence_text(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    std::string seg = text::trim(text.substr(start, end - start));
    if (!seg.empty()) out.push_back(std::move(seg));
    start = end;
  };
  while (i < text.size()) {
    if (!detail::is_terminal(text[i])) {
      if (text[i] == '\n' && i + 1 < text.size() && text[i + 1] == '\n') emit(i);  // paragraph break
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && detail::is_terminal(text[j])) ++j;
    while (j < text.size() && detail::is_closer(text[j])) ++j;
    if (j < text.size() && !text::is_space(text[j])) {
      i = j;
      continue;
    }
    const bool single_period = (j - i == 1 && text[i] == '.') ||
                               (text[i] == '.' && j > i + 1 && detail::is_closer(text[i + 1]));
    if (single_period && detail::is_abbreviation(text.substr(start, i + 1 - start))) {
      i = j;
      continue;
    }
    emit(j);
    i = j;
  }
  emit(text.size());
  return out;
}

/// Splits a document into pre-clean sentence records in document order.
/// Sentence ids are "<doc_id>#<k>" with k the 0-based segment index.
inline std::vector<SentenceRecord> split_sentences(const RawDocument& raw) {
  std::vector<SentenceRecord> out;
  auto segments = split_sentence_text(raw.text);
  out.reserve(segments.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    SentenceRecord rec;
    rec.sent_id = raw.doc_id + "#" + std::to_string(k);
    rec.doc_id = raw.doc_id;
    rec.words = text::split_whitespace(segments[k]);
    rec.char_text = std::move(segments[k]);
    out.push_back(std::move(rec));
  }
  return out;
}

namespace detail {

inline std::string clean_once(std::string_view input, int max_word_chars) {
  static const std::regex kTag("<[^>]{1,64}>");
  static const std::regex kEntity("&[a-zA-Z#0-9]{1,10};");
  std::string s = std::regex_replace(std::string(input), kTag, " ");
  s = std::regex_replace(s, kEntity, " ");
  std::string ascii;
  ascii.reserve(s.size());
  for (unsigned char c : s) {
    if (c >= 0x80) continue;
    if (text::is_space(static_cast<char>(c))) {
      ascii.push_back(' ');
    } else if (c >= 0x20 && c != 0x7f) {
      ascii.push_back(static_cast<char>(c));
    }
  }
  std::string out;
  for (const auto& tok : text::split_whitespace(ascii)) {
    if (static_cast<int>(tok.size()) > max_word_chars) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

}  // namespace detail

/// Removes HTML tags and entities, non-ASCII bytes, control characters and
/// whitespace tokens longer than `max_word_chars`; collapses spacing.
/// Applied to a fixed point, so the result is idempotent.
inline std::string clean_sentence(std::string_view text, int max_word_chars = 16) {
  std::string cur = detail::clean_once(text, max_word_chars);
  for (;;) {
    std::string next = detail::clean_once(cur, max_word_chars);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

/// Word tokens of cleaned text: whitespace tokens with leading and trailing
/// punctuation split off into their own tokens ("coke." -> "coke", ".").
inline std::vector<std::string> tokenize_words(std::string_view cleaned) {
  std::vector<std::string> out;
  auto is_edge_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  for (const auto& tok : text::split_whitespace(cleaned)) {
    std::size_t b = 0, e = tok.size();
    std::vector<std::string> tail;
    while (b < e && is_edge_punct(tok[b])) out.emplace_back(1, tok[b++]);
    while (e > b && is_edge_punct(tok[e - 1])) tail.emplace_back(1, tok[--e]);
    if (e > b) out.push_back(tok.substr(b, e - b));
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

/// Cleans a pre-clean record in place: char_text becomes the cleaned text and
/// words its word tokens.
inline SentenceRecord clean_record(SentenceRecord rec, int max_word_chars = 16) {
  rec.char_text = clean_sentence(rec.char_text, max_word_chars);
  rec.words = tokenize_words(rec.char_text);
  return rec;
}

inline std::size_t whitespace_word_count(const SentenceRecord& s) {
  return text::split_whitespace(s.char_text).size();
}

/// Word count uses whitespace tokens of the cleaned text; the subword count
/// includes the two wrapper tokens the classifier adds.
inline bool passes_filter(const SentenceRecord& sentence, const FilterConfig& cfg, const SubwordTokenizer& tokenizer) {
  if (static_cast<int>(whitespace_word_count(sentence)) < cfg.min_words) return false;
  const std::size_t subwords = tokenizer.count_subwords(sentence.words) + 2;
  return subwords <= static_cast<std::size_t>(cfg.max_subword_tokens);
}

/// True when the record satisfies every stored-sentence invariant.
inline bool satisfies_store_invariants(const SentenceRecord& s, const FilterConfig& cfg,
                                       const SubwordTokenizer& tokenizer) {
  if (static_cast<int>(s.words.size()) < cfg.min_words) return false;
  for (const auto& w : s.words) {
    if (w.empty() || static_cast<int>(w.size()) > cfg.max_word_chars) return false;
    for (unsigned char c : w) {
      if (c >= 0x80) return false;
    }
  }
  return tokenizer.count_subwords(s.words) + 2 <= static_cast<std::size_t>(cfg.max_subword_tokens);
}

struct IngestResult {
  std::vector<SentenceRecord> store;
  CorpusStats stats;
};

/// Pure per-document stage: split, clean, filter.
inline std::vector<SentenceRecord> process_document(const RawDocument& doc, const FilterConfig& cfg,
                                                    const SubwordTokenizer& tokenizer, CorpusStats& stats) {
  std::vector<SentenceRecord> kept;
  for (auto& raw : split_sentences(doc)) {
    ++stats.sentences;
    auto rec = clean_record(std::move(raw), cfg.max_word_chars);
    if (rec.words.empty() || !passes_filter(rec, cfg, tokenizer)) continue;
    ++stats.sentences_filtered;
    kept.push_back(std::move(rec));
  }
  return kept;
}

/// Parses one JSONL line into a document; throws MalformedRecord.
inline RawDocument parse_document(const std::string& line, std::size_t line_no) {
  io::json j;
  try {
    j = io::json::parse(line);
  } catch (const io::json::exception& e) {
    throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw MalformedRecord("line " + std::to_string(line_no) + ": missing string field 'text'");
  }
  RawDocument doc;
  doc.text = j["text"].get<std::string>();
  if (j.contains("id") && j["id"].is_string()) {
    doc.doc_id = j["id"].get<std::string>();
  } else if (j.contains("id") && j["id"].is_number_integer()) {
    doc.doc_id = std::to_string(j["id"].get<long long>());
  } else {
    doc.doc_id = "line-" + std::to_string(line_no);
  }
  if (j.contains("source") && j["source"].is_string()) doc.source = j["source"].get<std::string>();
  return doc;
}

/// Reads a JSONL document stream and returns the cleaned, filtered sentence
/// store in input order. Malformed lines and duplicate ids are skipped and
/// counted.
inline IngestResult ingest_corpus(const std::filesystem::path& input, const FilterConfig& cfg,
                                  const SubwordTokenizer& tokenizer) {
  cfg.validate();
  if (!std::filesystem::is_regular_file(input)) throw UnreadableInput("not a readable file: " + input.string());
  IngestResult result;
  std::unordered_set<std::string> seen;
  io::for_each_line(input, [&](std::size_t line_no, const std::string& line) {
    RawDocument doc;
    try {
      doc = parse_document(line, line_no);
    } catch (const MalformedRecord&) {
      ++result.stats.malformed;
      return;
    }
    if (!seen.insert(doc.doc_id).second) {
      ++result.stats.malformed;
      return;
    }
    ++result.stats.posts;
    auto kept = process_document(doc, cfg, tokenizer, result.stats);
    for (auto& s : kept) result.store.push_back(std::move(s));
  });
  return result;
}

inline io::json to_json(const SentenceRecord& s) {
  return io::json{{"sent_id", s.sent_id}, {"doc_id", s.doc_id}, {"words", s.words}};
}

inline io::json to_json(const CorpusStats& s) {
  return io::json{{"posts", s.posts},
                  {"sentences", s.sentences},
                  {"sentences_filtered", s.sentences_filtered},
                  {"malformed", s.malformed}};
}

inline std::string serialize_store(const std::vector<SentenceRecord>& store) {
  std::string out;
  for (const auto& s : store) out += to_json(s).dump() + "\n";
  return out;
}

inline void write_store(const std::filesystem::path& path, const std::vector<SentenceRecord>& store) {
  io::write_atomic(path, serialize_store(store));
}

inline std::vector<SentenceRecord> read_store(const std::filesystem::path& path) {
  std::vector<SentenceRecord> store;
  io::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    try {
      auto j = io::json::parse(line);
      SentenceRecord s;
      s.sent_id = j.at("sent_id").get<std::string>();
      s.doc_id = j.at("doc_id").get<std::string>();
      s.words = j.at("words").get<std::vector<std::string>>();
      s.char_text = text::join(s.words);
      store.push_back(std::move(s));
    } catch (const io::json::exception& e) {
      throw MalformedRecord(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return store;
}

/// Store path "<dir>/sentences.jsonl" gets stats at "<dir>/sentences.stats.json".
inline std::filesystem::path stats_path_for(const std::filesystem::path& store_path) {
  auto p = store_path;
  p.replace_extension(".stats.json");
  return p;
}

}  // namespace jargon
