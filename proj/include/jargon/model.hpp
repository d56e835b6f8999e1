#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jargon/autograd.hpp"
#include "jargon/encoder.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/optim.hpp"
#include "jargon/rng.hpp"
#include "jargon/supervision.hpp"
#include "jargon/tensor_archive.hpp"
#include "jargon/tokenizer.hpp"

namespace jargon {

inline constexpr double kProbEps = 1e-7;
inline constexpr double kDecisionThreshold = 0.5;

/// Pooler plus binary classifier over the start-token state:
/// p_c = sigmoid(W2' tanh(W1 h + b1)).
struct ContextHeadParams {
  nn::Parameter w1;  // dim x dim, applied as W1 * h
  nn::Parameter b1;  // 1 x dim
  nn::Parameter w2;  // dim x 1

  static ContextHeadParams init(int dim, std::uint64_t seed, double std = 0.02) {
    Rng rng(seed, "context-head");
    ContextHeadParams h{{"ctx.w1", nn::Matrix(dim, dim), true},
                        {"ctx.b1", nn::Matrix::Zero(1, dim), false},
                        {"ctx.w2", nn::Matrix(dim, 1), true}};
    for (auto* p : {&h.w1.value, &h.w2.value}) {
      for (Eigen::Index i = 0; i < p->size(); ++i) p->data()[i] = rng.normal(0.0, std);
    }
    return h;
  }

  /// h_start is a 1 x dim row; returns the 1x1 probability node.
  nn::Var forward(nn::Tape& tape, nn::Var h_start) const {
    if (tape.value(h_start).cols() != w1.value.cols()) throw DimensionMismatch("context head input width");
    nn::Var pooled = tape.tanh(tape.add_row(tape.matmul_nt(h_start, tape.param(w1)), tape.param(b1)));
    return tape.sigmoid(tape.matmul(pooled, tape.param(w2)));
  }

  std::vector<nn::Parameter*> parameters() { return {&w1, &b1, &w2}; }
  std::vector<const nn::Parameter*> parameters() const { return {&w1, &b1, &w2}; }
};

/// Feed-forward classifier over a frozen contextual word embedding:
/// z = W3 e + b3; o = Dropout(tanh(LayerNorm(z))); p_w = sigmoid(W4' o).
struct WordHeadParams {
  nn::Parameter w3;  // dim x dim, applied as W3 * e
  nn::Parameter b3;
  nn::Parameter ln_scale;
  nn::Parameter ln_shift;
  nn::Parameter w4;  // dim x 1
  double dropout_rate = 0.1;

  static WordHeadParams init(int dim, std::uint64_t seed, double dropout = 0.1, double std = 0.02) {
    Rng rng(seed, "word-head");
    WordHeadParams h{{"word.w3", nn::Matrix(dim, dim), true},  {"word.b3", nn::Matrix::Zero(1, dim), false},
                     {"word.ln.g", nn::Matrix::Ones(1, dim), false}, {"word.ln.b", nn::Matrix::Zero(1, dim), false},
                     {"word.w4", nn::Matrix(dim, 1), true},    dropout};
    for (auto* p : {&h.w3.value, &h.w4.value}) {
      for (Eigen::Index i = 0; i < p->size(); ++i) p->data()[i] = rng.normal(0.0, std);
    }
    return h;
  }

  nn::Var forward(nn::Tape& tape, nn::Var e_word, Mode mode, Rng* rng = nullptr) const {
    if (tape.value(e_word).cols() != w3.value.cols() || tape.value(e_word).rows() != 1) {
      throw DimensionMismatch("word head expects a 1 x " + std::to_string(w3.value.cols()) + " embedding");
    }
    nn::Var z = tape.add_row(tape.matmul_nt(e_word, tape.param(w3)), tape.param(b3));
    nn::Var o = tape.tanh(tape.layer_norm(z, tape.param(ln_scale), tape.param(ln_shift)));
    o = tape.dropout(o, dropout_rate, mode == Mode::Train ? rng : nullptr);
    return tape.sigmoid(tape.matmul(o, tape.param(w4)));
  }

  std::vector<nn::Parameter*> parameters() { return {&w3, &b3, &ln_scale, &ln_shift, &w4}; }
  std::vector<const nn::Parameter*> parameters() const { return {&w3, &b3, &ln_scale, &ln_shift, &w4}; }
};

/// Learnable ensemble weight constrained to (lo, hi) through a sigmoid.
struct EnsembleState {
  nn::Parameter raw_alpha{"ensemble.raw_alpha", nn::Matrix::Zero(1, 1), false};
  double alpha_lo = 0.9;
  double alpha_hi = 0.99;

  double alpha() const { return alpha_lo + (alpha_hi - alpha_lo) * nn::Tape::sigmoid_scalar(raw_alpha.value(0, 0)); }

  nn::Var alpha(nn::Tape& tape) const {
    return tape.affine(tape.sigmoid(tape.param(raw_alpha)), alpha_hi - alpha_lo, alpha_lo);
  }
};

struct ModelBundle {
  std::shared_ptr<const SubwordTokenizer> tokenizer;
  Encoder context_encoder;  // trainable
  Encoder word_encoder;     // frozen after creation
  ContextHeadParams context_head;
  WordHeadParams word_head;
  EnsembleState ensemble;
  bool use_word_head = true;
  Provenance provenance = Provenance::Scratch;

  /// Both encoder copies start from the same checkpoint; heads are fresh.
  static ModelBundle from_checkpoint(const EncoderCheckpoint& ckpt, std::uint64_t seed, double word_dropout = 0.1) {
    ModelBundle b;
    b.tokenizer = ckpt.tokenizer;
    b.context_encoder = ckpt.encoder;
    b.word_encoder = ckpt.encoder;
    b.context_head = ContextHeadParams::init(ckpt.encoder.dim(), seed);
    b.word_head = WordHeadParams::init(ckpt.encoder.dim(), seed, word_dropout);
    b.provenance = ckpt.provenance;
    return b;
  }

  int dim() const { return context_encoder.dim(); }

  /// Weight used in the final combination; 1 when the word head is disabled.
  double effective_alpha() const { return use_word_head ? ensemble.alpha() : 1.0; }

  std::vector<nn::Parameter*> trainable_parameters() {
    auto out = context_encoder.body_parameters();
    for (auto* p : context_head.parameters()) out.push_back(p);
    if (use_word_head) {
      for (auto* p : word_head.parameters()) out.push_back(p);
      out.push_back(&ensemble.raw_alpha);
    }
    return out;
  }
};

inline void check_span(std::span<const std::string> words, Span span) {
  if (span.begin < 0 || span.begin >= span.end || span.end > static_cast<int>(words.size())) {
    throw SpanOutOfRange("[" + std::to_string(span.begin) + ", " + std::to_string(span.end) + ") over " +
                         std::to_string(words.size()) + " words");
  }
}

/// start + subwords(words before span) + MASK + subwords(words after span) + end.
inline std::vector<int> mask_target(std::span<const std::string> words, Span span, const SubwordTokenizer& tok) {
  check_span(words, span);
  std::vector<int> ids{tok.cls_id()};
  for (int i = 0; i < span.begin; ++i) {
    auto w = tok.encode_word(words[i]);
    ids.insert(ids.end(), w.begin(), w.end());
  }
  ids.push_back(tok.mask_id());
  for (int i = span.end; i < static_cast<int>(words.size()); ++i) {
    auto w = tok.encode_word(words[i]);
    ids.insert(ids.end(), w.begin(), w.end());
  }
  ids.push_back(tok.sep_id());
  return ids;
}

/// start + subwords(all words) + end, with each word's span shifted past the
/// start token.
inline Alignment wrap_sentence(std::span<const std::string> words, const SubwordTokenizer& tok) {
  Alignment a = tok.align(words);
  a.ids.insert(a.ids.begin(), tok.cls_id());
  a.ids.push_back(tok.sep_id());
  for (auto& s : a.word_spans) {
    ++s.begin;
    ++s.end;
  }
  return a;
}

inline nn::Var context_probability(nn::Tape& tape, const ModelBundle& b, std::span<const int> masked, Mode mode,
                                   Rng* rng = nullptr) {
  nn::Var hidden = b.context_encoder.forward(tape, masked, mode, rng);
  return b.context_head.forward(tape, tape.row(hidden, 0));
}

inline double forward_context(const ModelBundle& b, std::span<const int> masked, Mode mode = Mode::Eval,
                              Rng* rng = nullptr) {
  nn::Tape tape(false);
  return tape.scalar(context_probability(tape, b, masked, mode, rng));
}

/// Mean of the frozen encoder's final-layer states over the target's subword
/// positions in the unmasked sentence.
inline nn::RowVector embed_target(const ModelBundle& b, std::span<const std::string> words, Span span) {
  check_span(words, span);
  const Alignment a = wrap_sentence(words, *b.tokenizer);
  nn::Tape tape(false);
  nn::Var hidden = b.word_encoder.forward(tape, a.ids, Mode::Eval);
  const int first = a.word_spans[static_cast<std::size_t>(span.begin)].begin;
  const int last = a.word_spans[static_cast<std::size_t>(span.end - 1)].end;
  return tape.value(tape.mean_rows(hidden, first, last)).row(0);
}

inline double forward_word(const ModelBundle& b, const nn::RowVector& e_word, Mode mode = Mode::Eval,
                           Rng* rng = nullptr) {
  if (e_word.size() != b.dim()) {
    throw DimensionMismatch("embedding width " + std::to_string(e_word.size()) + " != " + std::to_string(b.dim()));
  }
  nn::Tape tape(false);
  return tape.scalar(b.word_head.forward(tape, tape.constant(e_word), mode, rng));
}

struct LossInput {
  double p_c = 0.5;
  double p_w = 0.5;
  double y = 0.0;
};

struct LossTriple {
  double context = 0.0;
  double word = 0.0;
  double total = 0.0;
};

inline double clamped_bce(double p, double y, double eps = kProbEps) {
  const double pc = std::clamp(p, eps, 1.0 - eps);
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

/// Mean BCE of each head and the alpha-weighted ensemble loss.
inline LossTriple compute_loss(std::span<const LossInput> batch, double alpha) {
  if (batch.empty()) return {};
  LossTriple out;
  for (const auto& s : batch) {
    out.context += clamped_bce(s.p_c, s.y);
    out.word += clamped_bce(s.p_w, s.y);
  }
  out.context /= static_cast<double>(batch.size());
  out.word /= static_cast<double>(batch.size());
  out.total = alpha * out.context + (1.0 - alpha) * out.word;
  return out;
}

inline LossTriple compute_loss(std::span<const LossInput> batch, const EnsembleState& state) {
  return compute_loss(batch, state.alpha());
}

struct Prediction {
  double p_c = 0.5;
  double p_w = 0.5;
  double p = 0.5;
  bool decision = false;
  std::string word;
  std::string sent_id;
};

inline Prediction combine(double p_c, double p_w, double alpha) {
  Prediction out;
  out.p_c = p_c;
  out.p_w = p_w;
  out.p = alpha * p_c + (1.0 - alpha) * p_w;
  out.decision = out.p >= kDecisionThreshold;
  return out;
}

/// Eval-mode prediction for the target span.
inline Prediction predict(const ModelBundle& b, std::span<const std::string> words, Span span) {
  check_span(words, span);
  const double p_c = forward_context(b, mask_target(words, span, *b.tokenizer));
  const double p_w = forward_word(b, embed_target(b, words, span));
  auto out = combine(p_c, p_w, b.effective_alpha());
  out.word = text::to_lower(text::join({words.begin() + span.begin, words.begin() + span.end}));
  return out;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 1e-5;
  double warmup_ratio = 0.1;
  int max_epochs = 10;
  int early_stop_patience = 2;
  double weight_decay = 0.01;
  bool word_head = true;
  std::uint64_t seed = 42;

  void validate() const {
    if (batch_size <= 0 || !(learning_rate > 0.0) || max_epochs <= 0 || early_stop_patience <= 0) {
      throw ConfigError("train config values must be positive");
    }
    if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0)) throw ConfigError("warmup_ratio must lie in [0, 1]");
    if (early_stop_patience >= max_epochs) throw ConfigError("early_stop_patience must be < max_epochs");
  }
};

/// A labeled sample reduced to model inputs. The word embedding comes from
/// the frozen encoder, so it is computed once.
struct EncodedSample {
  std::vector<int> masked_ids;
  nn::RowVector e_word;
  double y = 0.0;
};

inline EncodedSample encode_sample(const ModelBundle& b, const LabeledSample& s) {
  EncodedSample e;
  e.masked_ids = mask_target(s.words, s.target, *b.tokenizer);
  if (static_cast<int>(e.masked_ids.size()) > b.context_encoder.config().max_len) {
    throw SequenceTooLong("sample " + s.sent_id + " exceeds encoder max_len");
  }
  if (b.use_word_head) e.e_word = embed_target(b, s.words, s.target);
  e.y = s.y();
  return e;
}

/// Loss over `batch`; when `grads` is non-null the gradients of the mean
/// batch loss are added to it. Train mode draws dropout masks from
/// (dropout_seed, sample position).
inline LossTriple batch_loss(const ModelBundle& b, std::span<const EncodedSample* const> batch, Mode mode,
                             nn::Gradients* grads, std::uint64_t dropout_seed = 0) {
  LossTriple out;
  if (batch.empty()) return out;
  const double inv = 1.0 / static_cast<double>(batch.size());
  const double alpha_value = b.effective_alpha();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const EncodedSample& s = *batch[i];
    nn::Tape tape(grads != nullptr);
    Rng rng(dropout_seed, "dropout:" + std::to_string(i));
    Rng* drop = mode == Mode::Train ? &rng : nullptr;
    nn::Var pc = context_probability(tape, b, s.masked_ids, mode, drop);
    nn::Var lc = tape.bce(pc, s.y, kProbEps);
    out.context += tape.scalar(lc) * inv;
    nn::Var loss = lc;
    if (b.use_word_head) {
      nn::Var pw = b.word_head.forward(tape, tape.constant(s.e_word), mode, drop);
      nn::Var lw = tape.bce(pw, s.y, kProbEps);
      out.word += tape.scalar(lw) * inv;
      nn::Var alpha = b.ensemble.alpha(tape);
      loss = tape.add(tape.mul(alpha, lc), tape.mul(tape.affine(alpha, -1.0, 1.0), lw));
    }
    if (grads != nullptr) tape.backward(tape.scale(loss, inv), *grads);
  }
  out.total = b.use_word_head ? alpha_value * out.context + (1.0 - alpha_value) * out.word : out.context;
  return out;
}

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // running mean of train-mode batch losses
  double valid_loss = 0.0;  // eval-mode ensemble loss on VALID
  double alpha = 0.0;
};

struct TrainHistory {
  double initial_train_loss = 0.0;
  double initial_valid_loss = 0.0;
  std::vector<EpochLog> epochs;
  std::vector<double> alpha_per_step;
  int best_epoch = 0;  // 1-based; 0 means the initial weights were kept
  bool stopped_early = false;
  std::string word_encoder_digest;
};

namespace detail {

inline double mean_loss(const ModelBundle& b, std::span<const EncodedSample> samples, std::size_t chunk = 256) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  std::vector<const EncodedSample*> ptrs;
  for (std::size_t start = 0; start < samples.size(); start += chunk) {
    ptrs.clear();
    for (std::size_t i = start; i < std::min(samples.size(), start + chunk); ++i) ptrs.push_back(&samples[i]);
    total += batch_loss(b, ptrs, Mode::Eval, nullptr).total * static_cast<double>(ptrs.size());
  }
  return total / static_cast<double>(samples.size());
}

struct TrainableSnapshot {
  Encoder context_encoder;
  ContextHeadParams context_head;
  WordHeadParams word_head;
  EnsembleState ensemble;

  static TrainableSnapshot take(const ModelBundle& b) {
    return {b.context_encoder, b.context_head, b.word_head, b.ensemble};
  }
  void restore(ModelBundle& b) const {
    auto copy = [](auto to, auto from) {
      for (std::size_t i = 0; i < to.size(); ++i) to[i]->value = from[i]->value;
    };
    copy(b.context_encoder.all_parameters(), context_encoder.all_parameters());
    copy(b.context_head.parameters(), context_head.parameters());
    copy(b.word_head.parameters(), word_head.parameters());
    b.ensemble.raw_alpha.value = ensemble.raw_alpha.value;
  }
};

}  // namespace detail

/// Fine-tunes the context path, both heads and the ensemble weight on TRAIN,
/// early-stopping on the VALID ensemble loss, and leaves the best-validation
/// weights in `bundle`. The word-path encoder is never updated.
inline TrainHistory train(ModelBundle& bundle, const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  bundle.use_word_head = cfg.word_head;
  std::vector<const LabeledSample*> train_src, valid_src;
  bool has_pos = false, has_neg = false;
  for (const auto& s : data.samples) {
    if (s.split == Split::Train) {
      train_src.push_back(&s);
      (s.label == Label::Pos ? has_pos : has_neg) = true;
    } else {
      valid_src.push_back(&s);
    }
  }
  if (!has_pos || !has_neg) throw DegenerateDataset("TRAIN split must contain both positive and negative samples");

  TrainHistory hist;
  hist.word_encoder_digest = bundle.word_encoder.weights_digest();

  std::vector<EncodedSample> train_set, valid_set;
  train_set.reserve(train_src.size());
  valid_set.reserve(valid_src.size());
  for (const auto* s : train_src) train_set.push_back(encode_sample(bundle, *s));
  for (const auto* s : valid_src) valid_set.push_back(encode_sample(bundle, *s));
  const std::span<const EncodedSample> monitor = valid_set.empty() ? std::span<const EncodedSample>(train_set)
                                                                   : std::span<const EncodedSample>(valid_set);

  hist.initial_train_loss = detail::mean_loss(bundle, train_set);
  hist.initial_valid_loss = detail::mean_loss(bundle, monitor);

  const std::size_t batches_per_epoch = (train_set.size() + cfg.batch_size - 1) / cfg.batch_size;
  nn::LinearSchedule schedule;
  schedule.peak = cfg.learning_rate;
  schedule.total_steps = batches_per_epoch * static_cast<std::size_t>(cfg.max_epochs);
  schedule.warmup_steps = static_cast<std::size_t>(std::llround(cfg.warmup_ratio * schedule.total_steps));

  // Weight decay is applied through AdamW only to matrices flagged `decay`.
  nn::AdamW opt(bundle.trainable_parameters(), cfg.weight_decay);

  double best = hist.initial_valid_loss;
  auto best_state = detail::TrainableSnapshot::take(bundle);
  int bad_epochs = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const EncodedSample*> batch;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng shuffle_rng(cfg.seed, "epoch:" + std::to_string(epoch));
    shuffle_rng.shuffle(order);
    double running = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
        batch.push_back(&train_set[order[i]]);
      }
      nn::Gradients grads;
      const std::uint64_t step = opt.steps();
      const auto loss = batch_loss(bundle, batch, Mode::Train, &grads, key_hash(cfg.seed, "step:" + std::to_string(step)));
      running += loss.total * static_cast<double>(batch.size());
      opt.step(grads, schedule.at(step));
      const double a = bundle.ensemble.alpha();
      if (!(a > bundle.ensemble.alpha_lo && a < bundle.ensemble.alpha_hi)) {
        throw Error("ensemble weight left its admissible range: " + std::to_string(a));
      }
      hist.alpha_per_step.push_back(a);
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = running / static_cast<double>(train_set.size());
    log.valid_loss = detail::mean_loss(bundle, monitor);
    log.alpha = bundle.ensemble.alpha();
    hist.epochs.push_back(log);
    if (log.valid_loss < best) {
      best = log.valid_loss;
      best_state = detail::TrainableSnapshot::take(bundle);
      hist.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= cfg.early_stop_patience) {
      hist.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  best_state.restore(bundle);
  return hist;
}

// ---------------------------------------------------------------------------
// Persistence

inline TensorArchive heads_archive(const ModelBundle& b) {
  TensorArchive a;
  for (const auto* p : b.context_head.parameters()) a.put(*p);
  for (const auto* p : b.word_head.parameters()) a.put(*p);
  a.put(b.ensemble.raw_alpha);
  return a;
}

/// Bundle directory: manifest.json, vocab.txt, context_encoder.bin,
/// word_encoder.bin, heads.bin.
inline void save_bundle(const ModelBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  b.tokenizer->save_vocab(dir / "vocab.txt");
  b.context_encoder.to_archive().save(dir / "context_encoder.bin");
  b.word_encoder.to_archive().save(dir / "word_encoder.bin");
  heads_archive(b).save(dir / "heads.bin");
  const auto& c = b.context_encoder.config();
  io::json m = encoder_config_json(c);
  m["format"] = "jargon-bundle/1";
  m["provenance"] = to_string(b.provenance);
  m["tokenizer"] = b.tokenizer->kind();
  m["alpha"] = b.ensemble.alpha();
  m["alpha_lo"] = b.ensemble.alpha_lo;
  m["alpha_hi"] = b.ensemble.alpha_hi;
  m["word_head"] = b.use_word_head;
  m["word_dropout"] = b.word_head.dropout_rate;
  m["word_encoder_sha256"] = b.word_encoder.weights_digest();
  io::write_json(dir / "manifest.json", m);
}

inline ModelBundle load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw UnreadableInput("no model bundle at " + dir.string());
  const auto m = io::read_json(dir / "manifest.json");
  ModelBundle b;
  try {
    b.tokenizer = make_tokenizer(m.at("tokenizer").get<std::string>(), load_vocab(dir / "vocab.txt"));
    const auto cfg = encoder_config_from_json(m);
    b.context_encoder = Encoder(cfg);
    b.word_encoder = Encoder(cfg);
    b.context_head = ContextHeadParams::init(cfg.dim, 0);
    b.word_head = WordHeadParams::init(cfg.dim, 0, m.value("word_dropout", 0.1));
    b.ensemble.alpha_lo = m.value("alpha_lo", 0.9);
    b.ensemble.alpha_hi = m.value("alpha_hi", 0.99);
    b.use_word_head = m.value("word_head", true);
    b.provenance = parse_provenance(m.at("provenance").get<std::string>());
  } catch (const io::json::exception& e) {
    throw CheckpointError(std::string("bad bundle manifest: ") + e.what());
  }
  b.context_encoder.load_archive(TensorArchive::load(dir / "context_encoder.bin"));
  b.word_encoder.load_archive(TensorArchive::load(dir / "word_encoder.bin"));
  const auto heads = TensorArchive::load(dir / "heads.bin");
  for (auto* p : b.context_head.parameters()) heads.load_into(*p);
  for (auto* p : b.word_head.parameters()) heads.load_into(*p);
  heads.load_into(b.ensemble.raw_alpha);
  return b;
}

}  // namespace jargon
