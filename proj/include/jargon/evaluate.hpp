#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "jargon/detect.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/pos_tagger.hpp"
#include "jargon/supervision.hpp"
#include "jargon/text.hpp"

namespace jargon {

struct AnnotatedSentence {
  std::vector<std::string> words;
  std::vector<int> jargon_indices;     // sorted
  std::vector<int> candidate_indices;  // sorted; superset of jargon_indices
};

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total()); }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t unique_jargon_detected = 0;
  Confusion confusion;
};

/// Zero-division conventions: precision 0 without positive predictions,
/// recall 0 without positive labels, F1 0 when P + R = 0.
inline EvalResult metrics_from_confusion(const Confusion& c) {
  EvalResult r;
  r.confusion = c;
  r.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

/// One scored candidate, kept for auditing.
struct CandidateOutcome {
  std::size_t sentence = 0;
  int index = 0;
  std::string word;
  double p = 0.0;
  bool predicted = false;
  bool gold = false;
};

/// Candidate set for an annotated sentence: tagger nouns (alphanumeric, with
/// a letter) united with the annotated jargon indices.
inline AnnotatedSentence make_annotated(std::vector<std::string> words, std::vector<int> jargon, const PosTagger& tagger) {
  AnnotatedSentence a;
  a.words = std::move(words);
  std::sort(jargon.begin(), jargon.end());
  jargon.erase(std::unique(jargon.begin(), jargon.end()), jargon.end());
  for (int j : jargon) {
    if (j < 0 || j >= static_cast<int>(a.words.size())) throw SpanOutOfRange("jargon index " + std::to_string(j));
  }
  a.jargon_indices = std::move(jargon);
  std::set<int> cands;
  for (int i : extract_noun_candidates(a.words, tagger)) cands.insert(i);
  cands.insert(a.jargon_indices.begin(), a.jargon_indices.end());
  a.candidate_indices.assign(cands.begin(), cands.end());
  return a;
}

/// Scores every candidate at `threshold` and tallies against the annotation.
/// `filter`, when given, restricts which candidate words are scored
/// (lowercase surface form).
template <Predictor P>
EvalResult evaluate(const P& predictor, std::span<const AnnotatedSentence> data, double threshold = kDecisionThreshold,
                    std::vector<CandidateOutcome>* outcomes = nullptr,
                    const std::set<std::string>* word_filter = nullptr) {
  if (data.empty()) throw EmptyDataset("evaluation needs at least one annotated sentence");
  Confusion c;
  std::set<std::string> detected;
  for (std::size_t si = 0; si < data.size(); ++si) {
    const auto& s = data[si];
    for (int idx : s.candidate_indices) {
      const std::string word = text::to_lower(s.words[static_cast<std::size_t>(idx)]);
      if (word_filter != nullptr && word_filter->count(word) == 0) continue;
      const double p = predictor(s.words, Span{idx, idx + 1}).p;
      const bool predicted = p >= threshold;
      const bool gold = std::binary_search(s.jargon_indices.begin(), s.jargon_indices.end(), idx);
      if (predicted && gold) {
        ++c.tp;
        detected.insert(word);
      } else if (predicted) {
        ++c.fp;
      } else if (gold) {
        ++c.fn;
      } else {
        ++c.tn;
      }
      if (outcomes != nullptr) outcomes->push_back({si, idx, word, p, predicted, gold});
    }
  }
  auto r = metrics_from_confusion(c);
  r.unique_jargon_detected = detected.size();
  return r;
}

/// Chance-corrected agreement of two aligned binary label sequences.
/// Returns 1 when chance agreement is 1 and the sequences agree.
inline double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw LengthMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.empty()) throw LengthMismatch("sequences must be non-empty");
  const double n = static_cast<double>(a.size());
  double agree = 0.0, a1 = 0.0, b1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0, y = b[i] != 0;
    agree += x == y ? 1.0 : 0.0;
    a1 += x ? 1.0 : 0.0;
    b1 += y ? 1.0 : 0.0;
  }
  const double p_o = agree / n;
  const double p_e = (a1 / n) * (b1 / n) + (1.0 - a1 / n) * (1.0 - b1 / n);
  if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

inline io::json to_json(const EvalResult& r) {
  return io::json{{"precision", r.precision},
                  {"recall", r.recall},
                  {"f1", r.f1},
                  {"accuracy", r.confusion.accuracy()},
                  {"unique_jargon_detected", r.unique_jargon_detected},
                  {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}}};
}

inline io::json to_json(const AnnotatedSentence& a) {
  return io::json{{"words", a.words}, {"jargon_indices", a.jargon_indices}};
}

/// Reads {"words": [...], "jargon_indices": [...]} lines.
inline std::vector<AnnotatedSentence> read_annotated(const std::filesystem::path& path, const PosTagger& tagger) {
  std::vector<AnnotatedSentence> out;
  io::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    try {
      auto j = io::json::parse(line);
      out.push_back(make_annotated(j.at("words").get<std::vector<std::string>>(),
                                   j.value("jargon_indices", std::vector<int>{}), tagger));
    } catch (const io::json::exception& e) {
      throw MalformedRecord(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const SpanOutOfRange& e) {
      throw MalformedRecord(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace jargon
