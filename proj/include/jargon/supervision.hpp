#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/pos_tagger.hpp"
#include "jargon/rng.hpp"
#include "jargon/text.hpp"
#include "jargon/tokenizer.hpp"

namespace jargon {

/// Lowercase seed terms of one to three words each.
class SeedTermList {
 public:
  static constexpr std::size_t kMaxTermWords = 3;

  SeedTermList() = default;

  explicit SeedTermList(const std::vector<std::string>& terms) {
    for (const auto& raw : terms) {
      auto words = text::split_whitespace(raw);
      if (words.empty()) continue;
      const std::string joined = text::join(words);
      if (!text::is_lowercase(joined)) throw ConfigError("seed term '" + raw + "' is not lowercase");
      if (words.size() > kMaxTermWords) throw ConfigError("seed term '" + raw + "' has more than 3 words");
      if (!terms_.insert(joined).second) throw ConfigError("duplicate seed term '" + joined + "'");
      by_length_[words.size() - 1].insert(joined);
    }
    if (terms_.empty()) throw ConfigError("seed term list is empty");
  }

  static SeedTermList load(const std::filesystem::path& path) {
    std::vector<std::string> terms;
    io::for_each_line(path, [&](std::size_t, const std::string& line) {
      auto t = text::trim(line);
      if (!t.empty() && t.front() != '#') terms.push_back(t);
    });
    return SeedTermList(terms);
  }

  bool contains(std::string_view term) const { return terms_.count(std::string(term)) != 0; }
  bool contains_length(std::size_t n_words, const std::string& joined) const {
    return n_words >= 1 && n_words <= kMaxTermWords && by_length_[n_words - 1].count(joined) != 0;
  }
  std::size_t size() const { return terms_.size(); }
  const std::set<std::string>& terms() const { return terms_; }

 private:
  std::set<std::string> terms_;
  std::unordered_set<std::string> by_length_[kMaxTermWords];
};

/// Maximal non-overlapping case-insensitive seed matches, scanning left to
/// right and preferring the longest term at each position.
inline std::vector<Span> match_seed_spans(std::span<const std::string> words, const SeedTermList& seeds) {
  std::vector<Span> spans;
  std::vector<std::string> lower(words.size());
  std::transform(words.begin(), words.end(), lower.begin(), [](const std::string& w) { return text::to_lower(w); });
  std::size_t i = 0;
  while (i < lower.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(SeedTermList::kMaxTermWords, lower.size() - i); len >= 1; --len) {
      if (seeds.contains_length(len, text::join(lower, " ", i, i + len))) {
        matched = len;
        break;
      }
    }
    if (matched > 0) {
      spans.push_back({static_cast<int>(i), static_cast<int>(i + matched)});
      i += matched;
    } else {
      ++i;
    }
  }
  return spans;
}

/// Alphanumeric nouns with at least one letter that lie outside `excluded`.
inline std::vector<int> extract_noun_candidates(std::span<const std::string> words, const PosTagger& tagger,
                                                std::span<const Span> excluded = {}) {
  const auto tags = tagger.tag(words);
  std::vector<int> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (!text::is_alnum_word(words[i]) || !text::has_letter(words[i]) || !is_noun(tags[i])) continue;
    if (std::any_of(excluded.begin(), excluded.end(), [&](const Span& s) { return s.contains(idx); })) continue;
    out.push_back(idx);
  }
  return out;
}

inline std::vector<int> extract_noun_candidates(std::span<const std::string> words, const PosTagger& tagger,
                                                const SeedTermList& seeds) {
  const auto spans = match_seed_spans(words, seeds);
  return extract_noun_candidates(words, tagger, spans);
}

/// Partition of a sentence store into seed-mentioning and other sentences,
/// as indices into the store.
struct SentencePools {
  std::vector<std::size_t> stms;
  std::vector<std::size_t> nonstms;
  std::vector<std::vector<Span>> seed_spans;  // per store index; empty for non-STMS
};

inline SentencePools split_pools(std::span<const SentenceRecord> store, const SeedTermList& seeds) {
  SentencePools pools;
  pools.seed_spans.resize(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    pools.seed_spans[i] = match_seed_spans(store[i].words, seeds);
    (pools.seed_spans[i].empty() ? pools.nonstms : pools.stms).push_back(i);
  }
  return pools;
}

enum class Label { Pos, NegStms, NegNonStms };
enum class Split { Train, Valid };

inline std::string to_string(Label l) {
  switch (l) {
    case Label::Pos: return "POS";
    case Label::NegStms: return "NEG_STMS";
    case Label::NegNonStms: return "NEG_NONSTMS";
  }
  return "?";
}
inline Label parse_label(std::string_view s) {
  if (s == "POS") return Label::Pos;
  if (s == "NEG_STMS") return Label::NegStms;
  if (s == "NEG_NONSTMS") return Label::NegNonStms;
  throw MalformedRecord("unknown label '" + std::string(s) + "'");
}
inline std::string to_string(Split s) { return s == Split::Train ? "TRAIN" : "VALID"; }
inline Split parse_split(std::string_view s) {
  if (s == "TRAIN") return Split::Train;
  if (s == "VALID") return Split::Valid;
  throw MalformedRecord("unknown split '" + std::string(s) + "'");
}

struct LabeledSample {
  std::string sent_id;
  std::vector<std::string> words;
  Span target;
  Label label = Label::Pos;
  Split split = Split::Train;

  double y() const { return label == Label::Pos ? 1.0 : 0.0; }
};

struct LabelCounts {
  std::size_t pos = 0;
  std::size_t neg_stms = 0;
  std::size_t neg_nonstms = 0;

  std::size_t total() const { return pos + neg_stms + neg_nonstms; }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

struct LabeledDataset {
  std::vector<LabeledSample> samples;
  LabelCounts counts;
  std::size_t nonstms_shortfall = 0;  // NEG_NONSTMS quota not met because the pool ran out

  LabelCounts recount() const {
    LabelCounts c;
    for (const auto& s : samples) {
      switch (s.label) {
        case Label::Pos: ++c.pos; break;
        case Label::NegStms: ++c.neg_stms; break;
        case Label::NegNonStms: ++c.neg_nonstms; break;
      }
    }
    return c;
  }
};

struct SamplingConfig {
  int r_stms = 5;
  double r_nonstms = 2.0;
  std::uint64_t rng_seed = 42;
  double valid_fraction = 0.2;

  void validate() const {
    if (r_stms < 0) throw ConfigError("r_stms must be >= 0");
    if (!(r_nonstms >= 0.0) || !std::isfinite(r_nonstms)) throw ConfigError("r_nonstms must be >= 0");
    if (!(valid_fraction >= 0.0 && valid_fraction < 1.0)) throw ConfigError("valid_fraction must lie in [0, 1)");
  }
};

/// Distant-supervision labeling with controlled negative sampling.
///
/// Positives are all seed occurrences in STMS sentences. Each STMS sentence
/// contributes up to r_stms distinct non-seed noun negatives. The non-STMS
/// quota is round(r_nonstms * #POS); sentences are visited in a keyed
/// pseudo-random order, one random noun each, skipping sentences without
/// candidates. The TRAIN/VALID split is stratified by label. All draws are
/// keyed by (rng_seed, sent_id), so the result does not depend on store order
/// of the non-STMS pool.
inline LabeledDataset build_dataset(std::span<const SentenceRecord> store, const SentencePools& pools,
                                    const SamplingConfig& cfg, const PosTagger& tagger) {
  cfg.validate();
  LabeledDataset ds;
  auto make = [&](std::size_t store_idx, Span target, Label label) {
    LabeledSample s;
    s.sent_id = store[store_idx].sent_id;
    s.words = store[store_idx].words;
    s.target = target;
    s.label = label;
    return s;
  };

  std::vector<LabeledSample> pos, neg_stms, neg_nonstms;
  for (std::size_t idx : pools.stms) {
    for (const auto& span : pools.seed_spans[idx]) pos.push_back(make(idx, span, Label::Pos));
  }
  if (cfg.r_stms > 0) {
    for (std::size_t idx : pools.stms) {
      auto cands = extract_noun_candidates(store[idx].words, tagger, pools.seed_spans[idx]);
      if (static_cast<int>(cands.size()) > cfg.r_stms) {
        Rng rng(cfg.rng_seed, "neg_stms:" + store[idx].sent_id);
        rng.shuffle(cands);
        cands.resize(static_cast<std::size_t>(cfg.r_stms));
        std::sort(cands.begin(), cands.end());
      }
      for (int c : cands) neg_stms.push_back(make(idx, {c, c + 1}, Label::NegStms));
    }
  }

  const auto quota = static_cast<std::size_t>(std::llround(cfg.r_nonstms * static_cast<double>(pos.size())));
  if (quota > 0) {
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    order.reserve(pools.nonstms.size());
    for (std::size_t idx : pools.nonstms) order.emplace_back(key_hash(cfg.rng_seed, "pool:" + store[idx].sent_id), idx);
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : store[a.second].sent_id < store[b.second].sent_id;
    });
    for (const auto& [key, idx] : order) {
      if (neg_nonstms.size() >= quota) break;
      auto cands = extract_noun_candidates(store[idx].words, tagger);
      if (cands.empty()) continue;
      Rng rng(cfg.rng_seed, "neg_nonstms:" + store[idx].sent_id);
      const int c = cands[rng.below(cands.size())];
      neg_nonstms.push_back(make(idx, {c, c + 1}, Label::NegNonStms));
    }
    ds.nonstms_shortfall = quota - neg_nonstms.size();
  }

  // Stratified split: within each label, the valid_fraction of samples with
  // the smallest keyed hash go to VALID.
  auto assign_split = [&](std::vector<LabeledSample>& group) {
    const auto n_valid = static_cast<std::size_t>(std::llround(cfg.valid_fraction * static_cast<double>(group.size())));
    std::vector<std::pair<std::uint64_t, std::size_t>> keys;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& s = group[i];
      keys.emplace_back(key_hash(cfg.rng_seed, "split:" + s.sent_id + ":" + std::to_string(s.target.begin)), i);
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t k = 0; k < keys.size(); ++k) {
      group[keys[k].second].split = k < n_valid ? Split::Valid : Split::Train;
    }
  };
  assign_split(pos);
  assign_split(neg_stms);
  assign_split(neg_nonstms);

  ds.counts = {pos.size(), neg_stms.size(), neg_nonstms.size()};
  ds.samples.reserve(ds.counts.total());
  for (auto* group : {&pos, &neg_stms, &neg_nonstms}) {
    for (auto& s : *group) ds.samples.push_back(std::move(s));
  }
  return ds;
}

inline io::json to_json(const LabeledSample& s) {
  return io::json{{"sent_id", s.sent_id},           {"words", s.words},
                  {"target_start", s.target.begin}, {"target_end", s.target.end},
                  {"label", to_string(s.label)},    {"split", to_string(s.split)}};
}

inline io::json to_json(const LabelCounts& c) {
  return io::json{{"pos", c.pos}, {"neg_stms", c.neg_stms}, {"neg_nonstms", c.neg_nonstms}};
}

inline std::string serialize_dataset(const LabeledDataset& ds) {
  std::string out;
  for (const auto& s : ds.samples) out += to_json(s).dump() + "\n";
  return out;
}

inline LabeledDataset read_dataset(const std::filesystem::path& path) {
  LabeledDataset ds;
  io::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    try {
      auto j = io::json::parse(line);
      LabeledSample s;
      s.sent_id = j.at("sent_id").get<std::string>();
      s.words = j.at("words").get<std::vector<std::string>>();
      s.target = {j.at("target_start").get<int>(), j.at("target_end").get<int>()};
      s.label = parse_label(j.at("label").get<std::string>());
      s.split = parse_split(j.at("split").get<std::string>());
      if (s.target.begin < 0 || s.target.begin >= s.target.end || s.target.end > static_cast<int>(s.words.size())) {
        throw MalformedRecord("target span out of range");
      }
      ds.samples.push_back(std::move(s));
    } catch (const io::json::exception& e) {
      throw MalformedRecord(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  ds.counts = ds.recount();
  return ds;
}

}  // namespace jargon
