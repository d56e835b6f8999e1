#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/model.hpp"
#include "jargon/pos_tagger.hpp"
#include "jargon/supervision.hpp"
#include "jargon/text.hpp"

namespace jargon {

/// Anything that scores a (sentence, span) query.
template <class P>
concept Predictor = requires(const P& p, std::span<const std::string> words, Span span) {
  { p(words, span) } -> std::convertible_to<Prediction>;
};

/// Adapts a ModelBundle to the Predictor interface.
struct BundlePredictor {
  const ModelBundle* bundle;
  Prediction operator()(std::span<const std::string> words, Span span) const { return predict(*bundle, words, span); }
};

/// Index of the first case-insensitive occurrence of a (possibly multi-word)
/// query in the sentence.
inline Span find_word(std::span<const std::string> words, std::string_view query) {
  const auto q = text::split_whitespace(text::to_lower(query));
  if (q.empty()) throw WordNotInSentence("empty query");
  for (std::size_t i = 0; i + q.size() <= words.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < q.size() && match; ++k) match = text::to_lower(words[i + k]) == q[k];
    if (match) return {static_cast<int>(i), static_cast<int>(i + q.size())};
  }
  throw WordNotInSentence("'" + std::string(query) + "'");
}

/// Sentence-level detection for a cleaned sentence record.
inline Prediction detect_word(const ModelBundle& b, const SentenceRecord& sentence, Span span,
                              const FilterConfig& filter = {}) {
  if (!passes_filter(sentence, filter, *b.tokenizer)) {
    throw SentenceRejectedByFilter("sentence '" + sentence.char_text + "'");
  }
  auto out = predict(b, sentence.words, span);
  out.sent_id = sentence.sent_id;
  return out;
}

inline Prediction detect_word(const ModelBundle& b, const SentenceRecord& sentence, std::string_view word,
                              const FilterConfig& filter = {}) {
  return detect_word(b, sentence, find_word(sentence.words, word), filter);
}

/// Raw sentence text: cleaned and tokenized the same way as the corpus.
inline Prediction detect_word(const ModelBundle& b, std::string_view raw_sentence, std::string_view word,
                              const FilterConfig& filter = {}) {
  SentenceRecord rec;
  rec.sent_id = "query";
  rec.char_text = std::string(raw_sentence);
  rec = clean_record(std::move(rec), filter.max_word_chars);
  return detect_word(b, rec, word, filter);
}

struct ScoreConfig {
  int n = 2;
  int top_k = 100;
  int min_occurrences = 1;

  void validate() const {
    if (n < 0 || top_k < 0 || min_occurrences < 0) throw ConfigError("score config values must be >= 0");
  }
};

struct JargonScore {
  std::string word;
  std::size_t f_pred = 0;  // positive predictions
  std::size_t total = 0;   // all predictions
  double r_pred = 0.0;
  double score = 0.0;
};

inline double jargon_score(std::size_t f_pred, double r_pred, int n) {
  return static_cast<double>(f_pred) * std::pow(r_pred, n);
}

/// Descending score, then higher f_pred, then lexicographic word.
inline bool ranks_before(const JargonScore& a, const JargonScore& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.f_pred != b.f_pred) return a.f_pred > b.f_pred;
  return a.word < b.word;
}

/// Per-word (positive, total) prediction counts.
using PredictionCounts = std::map<std::string, std::pair<std::size_t, std::size_t>>;

/// Turns accumulated counts into the ranked, truncated list.
inline std::vector<JargonScore> rank_counts(const PredictionCounts& counts, const ScoreConfig& cfg) {
  std::vector<JargonScore> out;
  for (const auto& [word, c] : counts) {
    if (c.second == 0 || c.second < static_cast<std::size_t>(cfg.min_occurrences)) continue;
    JargonScore s;
    s.word = word;
    s.f_pred = c.first;
    s.total = c.second;
    s.r_pred = static_cast<double>(c.first) / static_cast<double>(c.second);
    s.score = jargon_score(s.f_pred, s.r_pred, cfg.n);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > static_cast<std::size_t>(cfg.top_k)) out.resize(static_cast<std::size_t>(cfg.top_k));
  return out;
}

/// Predicts every noun-candidate occurrence once, aggregates by lowercase
/// surface form and ranks by F_pred * R_pred^n. Each occurrence within one
/// sentence counts as its own prediction.
template <Predictor P>
std::vector<JargonScore> score_corpus(const P& predictor, std::span<const SentenceRecord> store, const ScoreConfig& cfg,
                                      const PosTagger& tagger) {
  cfg.validate();
  if (store.empty()) throw EmptyStore("cannot score an empty sentence store");
  PredictionCounts counts;
  for (const auto& s : store) {
    for (int idx : extract_noun_candidates(s.words, tagger)) {
      const Prediction p = predictor(s.words, Span{idx, idx + 1});
      auto& c = counts[text::to_lower(s.words[static_cast<std::size_t>(idx)])];
      c.first += p.decision ? 1 : 0;
      c.second += 1;
    }
  }
  return rank_counts(counts, cfg);
}

inline io::json to_json(const JargonScore& s) {
  return io::json{{"word", s.word}, {"f_pred", s.f_pred}, {"total", s.total}, {"r_pred", s.r_pred}, {"score", s.score}};
}

inline io::json to_json(const Prediction& p) {
  io::json j{{"p_c", p.p_c}, {"p_w", p.p_w}, {"p", p.p}, {"decision", p.decision}, {"word", p.word}};
  if (!p.sent_id.empty()) j["sent_id"] = p.sent_id;
  return j;
}

inline std::string serialize_ranking(const std::vector<JargonScore>& ranking) {
  std::string out;
  for (const auto& s : ranking) out += to_json(s).dump() + "\n";
  return out;
}

/// Plain list, one word per line.
inline std::string serialize_word_list(const std::vector<JargonScore>& ranking) {
  std::string out;
  for (const auto& s : ranking) out += s.word + "\n";
  return out;
}

}  // namespace jargon
