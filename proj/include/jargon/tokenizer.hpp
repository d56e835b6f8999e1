#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/text.hpp"

namespace jargon {

/// Half-open word-index or subword-index range [begin, end).
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool contains(int i) const { return i >= begin && i < end; }
  bool overlaps(const Span& o) const { return begin < o.end && o.begin < end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Subword ids for a word sequence plus the subword span owned by each word.
/// Spans partition [0, ids.size()) in word order.
struct Alignment {
  std::vector<int> ids;
  std::vector<Span> word_spans;
};

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kMaskToken = "[MASK]";

/// Vocabulary-backed subword tokenizer with the reserved start, end and mask
/// tokens. Implementations only decide how one word maps to subword ids.
class SubwordTokenizer {
 public:
  explicit SubwordTokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (!index_.emplace(vocab_[i], static_cast<int>(i)).second) {
        throw ConfigError("duplicate vocabulary entry '" + vocab_[i] + "'");
      }
    }
    auto need = [&](std::string_view t) {
      auto it = index_.find(std::string(t));
      if (it == index_.end()) throw ConfigError("vocabulary lacks reserved token " + std::string(t));
      return it->second;
    };
    pad_ = need(kPadToken);
    unk_ = need(kUnkToken);
    cls_ = need(kClsToken);
    sep_ = need(kSepToken);
    mask_ = need(kMaskToken);
  }
  virtual ~SubwordTokenizer() = default;

  /// "word" or "wordpiece"; stored in checkpoint manifests.
  virtual std::string kind() const = 0;
  /// Non-empty list of subword ids for one word.
  virtual std::vector<int> encode_word(std::string_view word) const = 0;

  Alignment align(std::span<const std::string> words) const {
    Alignment a;
    for (const auto& w : words) {
      const int start = static_cast<int>(a.ids.size());
      auto ids = encode_word(w);
      a.ids.insert(a.ids.end(), ids.begin(), ids.end());
      a.word_spans.push_back({start, static_cast<int>(a.ids.size())});
    }
    return a;
  }

  /// Number of subwords for the sentence, excluding the start/end wrappers.
  std::size_t count_subwords(std::span<const std::string> words) const {
    std::size_t n = 0;
    for (const auto& w : words) n += encode_word(w).size();
    return n;
  }

  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(int id) const { return vocab_.at(static_cast<std::size_t>(id)); }
  std::optional<int> id_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int pad_id() const { return pad_; }
  int unk_id() const { return unk_; }
  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }
  int mask_id() const { return mask_; }
  bool is_special(int id) const { return id == pad_ || id == unk_ || id == cls_ || id == sep_ || id == mask_; }

  void save_vocab(const std::filesystem::path& path) const {
    std::string out;
    for (const auto& t : vocab_) out += t + "\n";
    io::write_atomic(path, out);
  }

 protected:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  int pad_ = 0, unk_ = 0, cls_ = 0, sep_ = 0, mask_ = 0;
};

inline std::vector<std::string> reserved_tokens() {
  return {std::string(kPadToken), std::string(kUnkToken), std::string(kClsToken), std::string(kSepToken),
          std::string(kMaskToken)};
}

/// Whole-word tokenizer: one (lowercased) word is one token, unknown words
/// become [UNK]. Used by the desk-scale scratch encoder profile.
class WordLevelTokenizer final : public SubwordTokenizer {
 public:
  using SubwordTokenizer::SubwordTokenizer;

  /// Vocabulary from word frequencies: reserved tokens, then words with
  /// count >= min_count ordered by descending count then lexicographically.
  template <class Sentences>
  static WordLevelTokenizer build(const Sentences& sentences, std::size_t min_count = 1) {
    std::map<std::string, std::size_t> counts;
    for (const auto& words : sentences) {
      for (const auto& w : words) ++counts[text::to_lower(w)];
    }
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    auto vocab = reserved_tokens();
    for (const auto& [w, c] : sorted) {
      if (c >= min_count && w.front() != '[') vocab.push_back(w);
    }
    return WordLevelTokenizer(std::move(vocab));
  }

  std::string kind() const override { return "word"; }

  std::vector<int> encode_word(std::string_view word) const override {
    auto id = id_of(text::to_lower(word));
    return {id ? *id : unk_};
  }
};

/// Greedy longest-match-first WordPiece over a BERT-style vocab.txt, uncased.
/// Continuation pieces carry the "##" prefix.
class WordPieceTokenizer final : public SubwordTokenizer {
 public:
  using SubwordTokenizer::SubwordTokenizer;

  std::string kind() const override { return "wordpiece"; }

  std::vector<int> encode_word(std::string_view word) const override {
    const std::string w = text::to_lower(word);
    if (w.empty() || w.size() > kMaxWordChars) return {unk_};
    std::vector<int> out;
    std::size_t start = 0;
    while (start < w.size()) {
      std::size_t end = w.size();
      std::optional<int> found;
      while (start < end) {
        std::string piece = w.substr(start, end - start);
        if (start > 0) piece = "##" + piece;
        if (auto id = id_of(piece)) {
          found = id;
          break;
        }
        --end;
      }
      if (!found) return {unk_};
      out.push_back(*found);
      start = end;
    }
    return out;
  }

 private:
  static constexpr std::size_t kMaxWordChars = 100;
};

inline std::vector<std::string> load_vocab(const std::filesystem::path& path) {
  std::vector<std::string> vocab;
  io::for_each_line(path, [&](std::size_t, const std::string& line) { vocab.push_back(text::trim(line)); });
  return vocab;
}

inline std::shared_ptr<const SubwordTokenizer> make_tokenizer(std::string_view kind, std::vector<std::string> vocab) {
  if (kind == "word") return std::make_shared<WordLevelTokenizer>(std::move(vocab));
  if (kind == "wordpiece") return std::make_shared<WordPieceTokenizer>(std::move(vocab));
  throw ConfigError("unknown tokenizer kind '" + std::string(kind) + "'");
}

}  // namespace jargon
