#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "jargon/autograd.hpp"
#include "jargon/corpus.hpp"
#include "jargon/encoder.hpp"
#include "jargon/error.hpp"
#include "jargon/optim.hpp"
#include "jargon/rng.hpp"

namespace jargon {

struct PretrainConfig {
  int max_seq = 512;
  int epochs = 3;
  int valid_pct = 10;
  int batch_size = 32;
  double learning_rate = 5e-5;
  double warmup_ratio = 0.0;
  double weight_decay = 0.0;
  double mask_prob = 0.15;
  std::uint64_t seed = 42;

  void validate() const {
    if (max_seq <= 2 || epochs < 0 || batch_size <= 0 || !(learning_rate > 0.0)) {
      throw ConfigError("invalid pretraining config");
    }
    if (valid_pct < 0 || valid_pct >= 100) throw ConfigError("valid_pct must lie in [0, 100)");
    if (!(mask_prob > 0.0 && mask_prob < 1.0)) throw ConfigError("mask_prob must lie in (0, 1)");
  }
};

/// One masked-token example: corrupted input ids, and the positions and
/// original ids that are predicted.
struct MlmExample {
  std::vector<int> input;
  std::vector<int> positions;
  std::vector<int> targets;
};

/// BERT-style corruption: each non-special position is selected with
/// mask_prob (at least one per sequence); selected positions become MASK 80%,
/// a random non-special token 10%, unchanged 10%.
inline MlmExample make_mlm_example(std::span<const int> ids, const SubwordTokenizer& tok, double mask_prob, Rng& rng) {
  MlmExample ex;
  ex.input.assign(ids.begin(), ids.end());
  std::vector<int> eligible;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!tok.is_special(ids[i]) || ids[i] == tok.unk_id()) eligible.push_back(static_cast<int>(i));
  }
  if (eligible.empty()) return ex;
  for (int pos : eligible) {
    if (rng.uniform() < mask_prob) ex.positions.push_back(pos);
  }
  if (ex.positions.empty()) ex.positions.push_back(eligible[rng.below(eligible.size())]);
  const auto vocab = static_cast<std::uint64_t>(tok.vocab_size());
  for (int pos : ex.positions) {
    ex.targets.push_back(ids[pos]);
    const double r = rng.uniform();
    if (r < 0.8) {
      ex.input[pos] = tok.mask_id();
    } else if (r < 0.9) {
      int replacement = tok.mask_id();
      for (int attempt = 0; attempt < 16 && tok.is_special(replacement); ++attempt) {
        replacement = static_cast<int>(rng.below(vocab));
      }
      if (!tok.is_special(replacement)) ex.input[pos] = replacement;
    }
  }
  return ex;
}

/// Masked-token loss for one example; gradients added to `grads` (scaled by
/// `weight`) when non-null.
inline double mlm_loss(const Encoder& enc, const MlmExample& ex, Mode mode, Rng* dropout_rng, nn::Gradients* grads,
                       double weight = 1.0) {
  if (ex.positions.empty()) return 0.0;
  nn::Tape tape(grads != nullptr);
  nn::Var hidden = enc.forward(tape, ex.input, mode, dropout_rng);
  nn::Var logits = enc.mlm_logits(tape, tape.gather_rows(hidden, ex.positions));
  nn::Var loss = tape.cross_entropy(logits, ex.targets);
  if (grads != nullptr) tape.backward(tape.scale(loss, weight), *grads);
  return tape.scalar(loss);
}

struct PretrainHistory {
  double initial_valid_loss = 0.0;
  std::vector<double> valid_loss;  // per epoch
  std::vector<double> train_loss;  // per epoch
  int best_epoch = 0;              // 0: initial weights kept
};

struct PretrainResult {
  EncoderCheckpoint checkpoint;
  PretrainHistory history;
};

/// Continues masked-token training of `start` on the sentence store and
/// returns the best-validation weights tagged domain-adapted. Sentences are
/// encoded one per sequence, truncated to min(max_seq, encoder max_len).
inline PretrainResult pretrain_domain(std::span<const SentenceRecord> store, const EncoderCheckpoint& start,
                                      const PretrainConfig& cfg) {
  cfg.validate();
  if (store.empty()) throw EmptyCorpus("pretraining needs at least one sentence");
  const SubwordTokenizer& tok = *start.tokenizer;
  const auto limit = static_cast<std::size_t>(std::min(cfg.max_seq, start.config().max_len));

  std::vector<std::vector<int>> seqs;
  seqs.reserve(store.size());
  for (const auto& s : store) {
    auto ids = tok.align(s.words).ids;
    if (ids.size() + 2 > limit) ids.resize(limit - 2);
    ids.insert(ids.begin(), tok.cls_id());
    ids.push_back(tok.sep_id());
    seqs.push_back(std::move(ids));
  }

  // Keyed split so the validation set does not depend on store order.
  std::vector<std::size_t> train_idx, valid_idx;
  for (std::size_t i = 0; i < store.size(); ++i) {
    const bool valid = key_hash(cfg.seed, "mlm-split:" + store[i].sent_id) % 100 < static_cast<std::uint64_t>(cfg.valid_pct);
    (valid ? valid_idx : train_idx).push_back(i);
  }
  if (train_idx.empty()) std::swap(train_idx, valid_idx);
  if (valid_idx.empty()) valid_idx = train_idx;

  std::vector<MlmExample> valid_examples;
  for (std::size_t i : valid_idx) {
    Rng rng(cfg.seed, "mlm-valid:" + store[i].sent_id);
    valid_examples.push_back(make_mlm_example(seqs[i], tok, cfg.mask_prob, rng));
  }

  PretrainResult result{start, {}};
  Encoder& enc = result.checkpoint.encoder;
  auto valid_loss = [&] {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& ex : valid_examples) {
      if (ex.positions.empty()) continue;
      total += mlm_loss(enc, ex, Mode::Eval, nullptr, nullptr) * static_cast<double>(ex.positions.size());
      n += ex.positions.size();
    }
    return n == 0 ? 0.0 : total / static_cast<double>(n);
  };

  result.history.initial_valid_loss = valid_loss();
  if (cfg.epochs == 0) return result;

  const std::size_t steps_per_epoch = (train_idx.size() + cfg.batch_size - 1) / cfg.batch_size;
  nn::LinearSchedule schedule{cfg.learning_rate, 0, steps_per_epoch * static_cast<std::size_t>(cfg.epochs)};
  schedule.warmup_steps = static_cast<std::size_t>(std::llround(cfg.warmup_ratio * schedule.total_steps));
  nn::AdamW opt(enc.all_parameters(), cfg.weight_decay);

  double best = result.history.initial_valid_loss;
  Encoder best_enc = enc;
  std::vector<std::size_t> order = train_idx;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle(cfg.seed, "mlm-epoch:" + std::to_string(epoch));
    shuffle.shuffle(order);
    double running = 0.0;
    for (std::size_t start_i = 0; start_i < order.size(); start_i += cfg.batch_size) {
      const std::size_t end_i = std::min(order.size(), start_i + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(end_i - start_i);
      nn::Gradients grads;
      const std::size_t step = opt.steps();
      for (std::size_t k = start_i; k < end_i; ++k) {
        const std::size_t idx = order[k];
        Rng mask_rng(cfg.seed, "mlm-mask:" + std::to_string(epoch) + ":" + store[idx].sent_id);
        Rng drop_rng(cfg.seed, "mlm-drop:" + std::to_string(epoch) + ":" + store[idx].sent_id);
        const auto ex = make_mlm_example(seqs[idx], tok, cfg.mask_prob, mask_rng);
        running += mlm_loss(enc, ex, Mode::Train, &drop_rng, &grads, weight);
      }
      opt.step(grads, schedule.at(step));
    }
    result.history.train_loss.push_back(running / static_cast<double>(order.size()));
    const double v = valid_loss();
    result.history.valid_loss.push_back(v);
    if (v < best) {
      best = v;
      best_enc = enc;
      result.history.best_epoch = epoch;
    }
  }
  enc = best_enc;
  result.checkpoint.provenance = Provenance::DomainAdapted;
  return result;
}

/// Scratch checkpoint: a word-level vocabulary built from the store and a
/// randomly initialized encoder.
inline EncoderCheckpoint scratch_checkpoint(std::span<const SentenceRecord> store, EncoderConfig cfg,
                                            std::uint64_t seed, std::size_t min_count = 1) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(store.size());
  for (const auto& s : store) sentences.push_back(s.words);
  auto tok = std::make_shared<WordLevelTokenizer>(WordLevelTokenizer::build(sentences, min_count));
  cfg.vocab_size = static_cast<int>(tok->vocab_size());
  EncoderCheckpoint ckpt;
  ckpt.encoder = Encoder(cfg, seed);
  ckpt.tokenizer = std::move(tok);
  ckpt.provenance = Provenance::Scratch;
  return ckpt;
}

}  // namespace jargon
