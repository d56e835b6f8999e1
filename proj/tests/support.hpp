#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "jargon/jargon.hpp"

namespace jt {

using namespace jargon;

/// Sentence record as the corpus pipeline would produce it from `text`.
inline SentenceRecord record(const std::string& id, const std::string& text) {
  SentenceRecord r;
  r.sent_id = id;
  r.doc_id = id;
  r.char_text = clean_sentence(text);
  r.words = tokenize_words(r.char_text);
  return r;
}

inline std::vector<std::string> words(const std::string& text) { return text::split_whitespace(text); }

/// Tiny scratch encoder sized for fast unit tests.
inline EncoderConfig tiny_config(int dim = 8, int layers = 1, int heads = 2) {
  EncoderConfig c;
  c.dim = dim;
  c.layers = layers;
  c.heads = heads;
  c.ff_dim = 2 * dim;
  c.max_len = 40;
  c.dropout = 0.1;
  return c;
}

inline EncoderCheckpoint tiny_checkpoint(const std::vector<SentenceRecord>& store, int dim = 8, int layers = 1,
                                         int heads = 2, std::uint64_t seed = 3) {
  return scratch_checkpoint(store, tiny_config(dim, layers, heads), seed);
}

inline std::vector<SentenceRecord> toy_store() {
  return {record("a", "I bought some zorax from my dealer last night."),
          record("b", "My friend and I tried zorax at the club last week."),
          record("c", "The kids played in the snow all afternoon at the park."),
          record("d", "We watched a movie at the cinema with my sister."),
          record("e", "My brother fixed the sink in the kitchen last week.")};
}

/// Predictor with a fixed probability per lowercase word.
struct LookupPredictor {
  std::map<std::string, double> p;
  double fallback = 0.0;

  Prediction operator()(std::span<const std::string> ws, Span span) const {
    const auto w = text::to_lower(ws[static_cast<std::size_t>(span.begin)]);
    const auto it = p.find(w);
    const double v = it == p.end() ? fallback : it->second;
    auto out = combine(v, v, 1.0);
    out.word = w;
    return out;
  }
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("jargon_test_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace jt
