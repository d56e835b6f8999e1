#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "jargon/corpus.hpp"
#include "jargon/detect.hpp"
#include "jargon/encoder.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/model.hpp"
#include "jargon/pretrain.hpp"
#include "jargon/supervision.hpp"
#include "jargon/word2vec.hpp"

namespace jargon {

struct EncoderProfile {
  std::string name = "scratch-tiny";  // or "pretrained-path"
  std::filesystem::path path;         // checkpoint directory for pretrained-path
  EncoderConfig encoder;              // architecture for scratch profiles
  std::size_t vocab_min_count = 1;
};

struct AblationFlags {
  bool no_word_head = false;
  bool no_pretrain = false;
  bool no_neg_stms = false;
};

struct TaggerConfig {
  std::string kind = "stub";  // or "lexicon"
  std::filesystem::path path;
};

/// Everything a pipeline command needs. Paper-derived hyperparameters keep
/// their published defaults; the scratch-tiny profile swaps in desk-scale
/// optimization settings (see apply_profile_defaults).
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path seeds;
  std::filesystem::path workdir = "work";
  FilterConfig filter;
  SamplingConfig sampling;
  PretrainConfig pretrain;
  TrainConfig train;
  ScoreConfig score;
  EncoderProfile profile;
  AblationFlags ablation;
  TaggerConfig tagger;
  Word2VecParams word2vec;
  std::size_t mlm_top_k = 100;
  std::uint64_t rng_seed = 42;
};

/// Desk-scale defaults for the from-scratch encoder: small architecture,
/// larger learning rates and more pretraining epochs than the published
/// fine-tuning settings, which assume a pretrained 768-wide encoder.
inline void apply_profile_defaults(RunConfig& c) {
  if (c.profile.name == "scratch-tiny") {
    c.profile.encoder.dim = 64;
    c.profile.encoder.layers = 2;
    c.profile.encoder.heads = 4;
    c.profile.encoder.ff_dim = 128;
    c.profile.encoder.max_len = 128;
    c.profile.encoder.dropout = 0.1;
    c.pretrain.learning_rate = 1e-3;
    c.pretrain.epochs = 6;
    c.pretrain.warmup_ratio = 0.05;
    c.train.learning_rate = 1e-3;
    c.train.max_epochs = 4;
    c.train.early_stop_patience = 2;
  }
}

namespace detail {

template <class T>
void read_key(const io::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_path(const io::json& j, const char* key, std::filesystem::path& out) {
  if (j.contains(key)) out = j.at(key).get<std::string>();
}

}  // namespace detail

/// Overlays a JSON config object on `c`. Unknown top-level sections are
/// rejected so typos fail loudly. Profile defaults are not applied here;
/// callers resolve the profile first (see resolve_profile).
inline void apply_json(RunConfig& c, const io::json& j) {
  using detail::read_key;
  using detail::read_path;
  static const std::set<std::string> kSections = {"paths",    "filter", "sampling", "pretrain", "train",
                                                  "score",    "encoder", "ablation", "tagger",   "word2vec",
                                                  "baseline", "rng_seed"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kSections.count(k)) throw ConfigError("unknown config section '" + k + "'");
  }
  try {
    read_key(j, "rng_seed", c.rng_seed);
    if (j.contains("encoder")) {
      const auto& e = j["encoder"];
      read_key(e, "profile", c.profile.name);
      if (c.profile.name != "scratch-tiny" && c.profile.name != "pretrained-path") {
        throw ConfigError("encoder.profile must be scratch-tiny or pretrained-path");
      }
      read_path(e, "path", c.profile.path);
      read_key(e, "dim", c.profile.encoder.dim);
      read_key(e, "layers", c.profile.encoder.layers);
      read_key(e, "heads", c.profile.encoder.heads);
      read_key(e, "ff_dim", c.profile.encoder.ff_dim);
      read_key(e, "max_len", c.profile.encoder.max_len);
      read_key(e, "dropout", c.profile.encoder.dropout);
      read_key(e, "vocab_min_count", c.profile.vocab_min_count);
    }
    if (j.contains("paths")) {
      read_path(j["paths"], "corpus", c.corpus);
      read_path(j["paths"], "seeds", c.seeds);
      read_path(j["paths"], "workdir", c.workdir);
    }
    if (j.contains("filter")) {
      read_key(j["filter"], "max_subword_tokens", c.filter.max_subword_tokens);
      read_key(j["filter"], "min_words", c.filter.min_words);
      read_key(j["filter"], "max_word_chars", c.filter.max_word_chars);
    }
    if (j.contains("sampling")) {
      read_key(j["sampling"], "r_stms", c.sampling.r_stms);
      read_key(j["sampling"], "r_nonstms", c.sampling.r_nonstms);
      read_key(j["sampling"], "valid_fraction", c.sampling.valid_fraction);
    }
    if (j.contains("pretrain")) {
      const auto& p = j["pretrain"];
      read_key(p, "max_seq", c.pretrain.max_seq);
      read_key(p, "epochs", c.pretrain.epochs);
      read_key(p, "valid_pct", c.pretrain.valid_pct);
      read_key(p, "batch_size", c.pretrain.batch_size);
      read_key(p, "learning_rate", c.pretrain.learning_rate);
      read_key(p, "warmup_ratio", c.pretrain.warmup_ratio);
      read_key(p, "mask_prob", c.pretrain.mask_prob);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      read_key(t, "batch_size", c.train.batch_size);
      read_key(t, "learning_rate", c.train.learning_rate);
      read_key(t, "warmup_ratio", c.train.warmup_ratio);
      read_key(t, "max_epochs", c.train.max_epochs);
      read_key(t, "early_stop_patience", c.train.early_stop_patience);
      read_key(t, "weight_decay", c.train.weight_decay);
    }
    if (j.contains("score")) {
      read_key(j["score"], "n", c.score.n);
      read_key(j["score"], "top_k", c.score.top_k);
      read_key(j["score"], "min_occurrences", c.score.min_occurrences);
    }
    if (j.contains("ablation")) {
      read_key(j["ablation"], "no_word_head", c.ablation.no_word_head);
      read_key(j["ablation"], "no_pretrain", c.ablation.no_pretrain);
      read_key(j["ablation"], "no_neg_stms", c.ablation.no_neg_stms);
    }
    if (j.contains("tagger")) {
      read_key(j["tagger"], "kind", c.tagger.kind);
      read_path(j["tagger"], "path", c.tagger.path);
    }
    if (j.contains("word2vec")) {
      const auto& w = j["word2vec"];
      read_key(w, "min_count", c.word2vec.min_count);
      read_key(w, "vector_size", c.word2vec.vector_size);
      read_key(w, "window", c.word2vec.window);
      read_key(w, "epochs", c.word2vec.epochs);
      read_key(w, "neighbors_per_seed", c.word2vec.neighbors_per_seed);
    }
    if (j.contains("baseline")) read_key(j["baseline"], "mlm_top_k", c.mlm_top_k);
  } catch (const io::json::exception& e) {
    throw ConfigError(e.what());
  }
}

/// Propagates the global seed and ablation switches into module configs and
/// validates everything.
inline void finalize(RunConfig& c) {
  c.sampling.rng_seed = c.rng_seed;
  c.pretrain.seed = c.rng_seed;
  c.train.seed = c.rng_seed;
  c.word2vec.seed = c.rng_seed;
  c.train.word_head = !c.ablation.no_word_head;
  if (c.ablation.no_neg_stms) c.sampling.r_stms = 0;
  c.filter.validate();
  c.sampling.validate();
  c.pretrain.validate();
  c.train.validate();
  c.score.validate();
  if (c.tagger.kind != "stub" && c.tagger.kind != "lexicon") throw ConfigError("tagger.kind must be stub or lexicon");
}

inline io::json to_json(const RunConfig& c) {
  return io::json{
      {"paths", {{"corpus", c.corpus.string()}, {"seeds", c.seeds.string()}, {"workdir", c.workdir.string()}}},
      {"filter",
       {{"max_subword_tokens", c.filter.max_subword_tokens},
        {"min_words", c.filter.min_words},
        {"max_word_chars", c.filter.max_word_chars}}},
      {"sampling",
       {{"r_stms", c.sampling.r_stms}, {"r_nonstms", c.sampling.r_nonstms}, {"valid_fraction", c.sampling.valid_fraction}}},
      {"pretrain",
       {{"max_seq", c.pretrain.max_seq},
        {"epochs", c.pretrain.epochs},
        {"valid_pct", c.pretrain.valid_pct},
        {"batch_size", c.pretrain.batch_size},
        {"learning_rate", c.pretrain.learning_rate},
        {"warmup_ratio", c.pretrain.warmup_ratio},
        {"mask_prob", c.pretrain.mask_prob}}},
      {"train",
       {{"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"warmup_ratio", c.train.warmup_ratio},
        {"max_epochs", c.train.max_epochs},
        {"early_stop_patience", c.train.early_stop_patience},
        {"weight_decay", c.train.weight_decay}}},
      {"score", {{"n", c.score.n}, {"top_k", c.score.top_k}, {"min_occurrences", c.score.min_occurrences}}},
      {"encoder",
       {{"profile", c.profile.name},
        {"path", c.profile.path.string()},
        {"dim", c.profile.encoder.dim},
        {"layers", c.profile.encoder.layers},
        {"heads", c.profile.encoder.heads},
        {"ff_dim", c.profile.encoder.ff_dim},
        {"max_len", c.profile.encoder.max_len},
        {"dropout", c.profile.encoder.dropout},
        {"vocab_min_count", c.profile.vocab_min_count}}},
      {"ablation",
       {{"no_word_head", c.ablation.no_word_head},
        {"no_pretrain", c.ablation.no_pretrain},
        {"no_neg_stms", c.ablation.no_neg_stms}}},
      {"tagger", {{"kind", c.tagger.kind}, {"path", c.tagger.path.string()}}},
      {"word2vec",
       {{"min_count", c.word2vec.min_count},
        {"vector_size", c.word2vec.vector_size},
        {"window", c.word2vec.window},
        {"epochs", c.word2vec.epochs},
        {"neighbors_per_seed", c.word2vec.neighbors_per_seed}}},
      {"baseline", {{"mlm_top_k", c.mlm_top_k}}},
      {"rng_seed", c.rng_seed}};
}

/// Stable digest of the effective configuration (keys are sorted on dump).
inline std::string config_hash(const RunConfig& c) { return io::sha256_hex(to_json(c).dump()); }

/// Profile named in a config object, if any.
inline std::optional<std::string> profile_in(const io::json& j) {
  if (j.is_object() && j.contains("encoder") && j["encoder"].is_object() && j["encoder"].contains("profile")) {
    const auto& v = j["encoder"]["profile"];
    if (!v.is_string()) throw ConfigError("encoder.profile must be a string");
    return v.get<std::string>();
  }
  return std::nullopt;
}

struct KeyDoc {
  std::string key;
  std::string origin;  // "published", "desk-scale" or "implementation"
  std::string help;
};

/// Every config key with where its default comes from.
inline const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> k = {
      {"paths.corpus", "implementation", "JSONL documents {id, text, source}"},
      {"paths.seeds", "implementation", "seed term list, one lowercase term per line"},
      {"paths.workdir", "implementation", "directory for all artifacts and run manifests"},
      {"filter.max_subword_tokens", "published", "drop sentences longer than this many subword tokens"},
      {"filter.min_words", "published", "drop sentences with fewer whitespace words"},
      {"filter.max_word_chars", "published", "drop words longer than this during cleaning"},
      {"sampling.r_stms", "published", "NEG_STMS samples per seed-containing sentence"},
      {"sampling.r_nonstms", "published", "NEG_NONSTMS quota as a multiple of #POS"},
      {"sampling.valid_fraction", "published", "stratified VALID share (8:2 split)"},
      {"pretrain.max_seq", "published", "maximum MLM sequence length"},
      {"pretrain.epochs", "desk-scale", "MLM epochs (published: 3)"},
      {"pretrain.valid_pct", "published", "MLM validation percentage"},
      {"pretrain.batch_size", "published", "MLM batch size"},
      {"pretrain.learning_rate", "desk-scale", "MLM peak learning rate (published: 5e-5)"},
      {"pretrain.warmup_ratio", "desk-scale", "MLM warmup share of steps (published: 0)"},
      {"pretrain.mask_prob", "published", "MLM masking probability"},
      {"train.batch_size", "published", "detector batch size"},
      {"train.learning_rate", "desk-scale", "detector peak learning rate (published: 1e-5)"},
      {"train.warmup_ratio", "published", "linear warmup share of steps"},
      {"train.max_epochs", "desk-scale", "epoch cap (published: 10)"},
      {"train.early_stop_patience", "published", "epochs without VALID improvement before stopping"},
      {"train.weight_decay", "implementation", "AdamW decoupled weight decay"},
      {"score.n", "published", "exponent on R_pred in F * R^n"},
      {"score.top_k", "published", "length of the extracted jargon list"},
      {"score.min_occurrences", "implementation", "skip words with fewer candidate occurrences"},
      {"encoder.profile", "implementation", "scratch-tiny or pretrained-path"},
      {"encoder.path", "implementation", "checkpoint directory for pretrained-path"},
      {"encoder.dim", "desk-scale", "hidden width of scratch encoders"},
      {"encoder.layers", "desk-scale", "transformer layers of scratch encoders"},
      {"encoder.heads", "desk-scale", "attention heads of scratch encoders"},
      {"encoder.ff_dim", "desk-scale", "feed-forward width of scratch encoders"},
      {"encoder.max_len", "published", "maximum sequence length including [CLS]/[SEP]"},
      {"encoder.dropout", "published", "encoder dropout"},
      {"encoder.vocab_min_count", "implementation", "minimum count for scratch vocabulary words"},
      {"ablation.no_word_head", "published", "train and predict with the context head only"},
      {"ablation.no_pretrain", "published", "skip domain-adaptive MLM training"},
      {"ablation.no_neg_stms", "published", "sample no negatives from seed-containing sentences"},
      {"tagger.kind", "implementation", "stub or lexicon"},
      {"tagger.path", "implementation", "word<TAB>TAG lexicon for the lexicon tagger"},
      {"word2vec.min_count", "published", "Word2Vec vocabulary threshold"},
      {"word2vec.vector_size", "published", "Word2Vec dimensionality"},
      {"word2vec.window", "published", "Word2Vec context window"},
      {"word2vec.epochs", "published", "Word2Vec epochs"},
      {"word2vec.neighbors_per_seed", "published", "nearest neighbors taken per seed"},
      {"baseline.mlm_top_k", "published", "K for the masked-LM top-K baseline"},
      {"rng_seed", "implementation", "global seed for sampling, initialization, shuffling and dropout"},
  };
  return k;
}

inline RunConfig default_run_config() {
  RunConfig c;
  apply_profile_defaults(c);
  return c;
}

}  // namespace jargon
