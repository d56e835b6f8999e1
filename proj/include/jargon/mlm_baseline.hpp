#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "jargon/encoder.hpp"
#include "jargon/model.hpp"
#include "jargon/supervision.hpp"

namespace jargon {

/// Vocabulary ids ordered by the encoder's prediction at the masked target
/// position (descending logit, ties by id).
inline std::vector<int> mlm_ranking(const EncoderCheckpoint& ckpt, std::span<const std::string> words, Span span) {
  const auto ids = mask_target(words, span, *ckpt.tokenizer);
  const auto mask_pos = static_cast<int>(std::find(ids.begin(), ids.end(), ckpt.tokenizer->mask_id()) - ids.begin());
  nn::Tape tape(false);
  nn::Var hidden = ckpt.encoder.forward(tape, ids, Mode::Eval);
  const std::vector<int> rows{mask_pos};
  const nn::RowVector logits = tape.value(ckpt.encoder.mlm_logits(tape, tape.gather_rows(hidden, rows))).row(0);
  std::vector<int> order(static_cast<std::size_t>(logits.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return logits(a) > logits(b); });
  return order;
}

/// Seed terms that map to exactly one known token.
inline std::vector<int> single_token_seed_ids(const SeedTermList& seeds, const SubwordTokenizer& tok) {
  std::vector<int> out;
  for (const auto& term : seeds.terms()) {
    if (term.find(' ') != std::string::npos) continue;
    const auto ids = tok.encode_word(term);
    if (ids.size() == 1 && ids.front() != tok.unk_id()) out.push_back(ids.front());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff a single-token seed is among the top K predictions for the
/// masked target.
inline bool baseline_mlm_topk(const EncoderCheckpoint& ckpt, std::span<const std::string> words, Span span,
                              const SeedTermList& seeds, std::size_t k) {
  check_span(words, span);
  if (k == 0) return false;
  const auto seed_ids = single_token_seed_ids(seeds, *ckpt.tokenizer);
  const auto ranking = mlm_ranking(ckpt, words, span);
  const std::size_t limit = std::min(k, ranking.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (std::binary_search(seed_ids.begin(), seed_ids.end(), ranking[i])) return true;
  }
  return false;
}

/// Predictor adapter for evaluate(): p is 1 when the baseline fires.
struct MlmBaselinePredictor {
  const EncoderCheckpoint* ckpt;
  const SeedTermList* seeds;
  std::size_t k;

  Prediction operator()(std::span<const std::string> words, Span span) const {
    const bool hit = baseline_mlm_topk(*ckpt, words, span, *seeds, k);
    return combine(hit ? 1.0 : 0.0, hit ? 1.0 : 0.0, 1.0);
  }
};

}  // namespace jargon
