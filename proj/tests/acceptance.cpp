// Acceptance run: one PASS/FAIL line per criterion, each timed against its
// own limit. Exit status is nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include <sys/wait.h>

#include "jargon/jargon.hpp"

using namespace jargon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream o;
  o.setf(std::ios::scientific);
  o.precision(2);
  o << x;
  return o.str();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << x;
  return o.str();
}

std::vector<SentenceRecord> synthetic_store(const synthetic::Generator& gen, const FilterConfig& filter = {}) {
  std::vector<SentenceRecord> store;
  const WordLevelTokenizer tok(reserved_tokens());
  CorpusStats stats;
  for (const auto& d : gen.documents()) {
    for (auto& s : process_document(d, filter, tok, stats)) store.push_back(std::move(s));
  }
  return store;
}

synthetic::Generator generator(std::size_t docs, std::uint64_t seed) {
  synthetic::Options opt;
  opt.documents = docs;
  opt.seed = seed;
  return synthetic::Generator(opt);
}

/// Longest-match seed count written independently of the library matcher.
std::size_t count_seed_occurrences(const std::vector<std::string>& words, const std::vector<std::string>& seed_terms) {
  std::vector<std::vector<std::string>> seeds;
  for (const auto& s : seed_terms) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    for (std::string w; in >> w;) parts.push_back(w);
    seeds.push_back(parts);
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < words.size();) {
    std::size_t best = 0;
    for (const auto& s : seeds) {
      if (s.size() <= best || i + s.size() > words.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < s.size() && eq; ++k) eq = text::to_lower(words[i + k]) == s[k];
      if (eq) best = s.size();
    }
    if (best > 0) {
      ++n;
      i += best;
    } else {
      ++i;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// 1. Sampling arithmetic

Outcome sampling_arithmetic() {
  StubTagger tagger;
  std::size_t checked = 0;
  for (std::uint64_t corpus_seed : {3u, 17u}) {
    const auto gen = generator(250, corpus_seed);
    const auto store = synthetic_store(gen);
    const SeedTermList seeds(gen.lexicon().seeds);
    const auto pools = split_pools(store, seeds);
    std::size_t seed_occurrences = 0;
    for (const auto& s : store) seed_occurrences += count_seed_occurrences(s.words, gen.lexicon().seeds);
    for (int r_stms : {0, 1, 5}) {
      for (double r_nonstms : {0.0, 0.5, 2.0}) {
        SamplingConfig cfg;
        cfg.r_stms = r_stms;
        cfg.r_nonstms = r_nonstms;
        const auto ds = build_dataset(store, pools, cfg, tagger);
        const auto c = ds.recount();
        if (c.pos != seed_occurrences) {
          return {false, "#POS " + std::to_string(c.pos) + " != seed occurrences " + std::to_string(seed_occurrences)};
        }
        std::map<std::string, std::set<int>> stms_targets;
        std::map<std::string, std::size_t> stms_per_sentence;
        for (const auto& s : ds.samples) {
          if (s.label != Label::NegStms) continue;
          ++stms_per_sentence[s.sent_id];
          if (!stms_targets[s.sent_id].insert(s.target.begin).second) return {false, "repeated NEG_STMS target"};
        }
        for (const auto& [id, n] : stms_per_sentence) {
          if (n > static_cast<std::size_t>(r_stms)) return {false, "NEG_STMS quota exceeded in " + id};
        }
        const auto want = static_cast<std::size_t>(std::llround(r_nonstms * static_cast<double>(c.pos)));
        if (ds.nonstms_shortfall != 0 || c.neg_nonstms != want) {
          return {false, "#NEG_NONSTMS " + std::to_string(c.neg_nonstms) + " != " + std::to_string(want)};
        }
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " configurations"};
}

// ---------------------------------------------------------------------------
// 2. Delexicalized context path

Outcome delexicalization() {
  const auto gen = generator(200, 21);
  const auto store = synthetic_store(gen);
  auto cfg = default_run_config();
  finalize(cfg);
  const auto b = ModelBundle::from_checkpoint(
      scratch_checkpoint(store, cfg.profile.encoder, cfg.rng_seed, cfg.profile.vocab_min_count), cfg.rng_seed);
  std::vector<std::string> vocab;
  for (const auto& s : store) {
    for (const auto& w : s.words) vocab.push_back(w);
  }
  for (const auto& w : gen.lexicon().unseen_jargon) vocab.push_back(w);
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& rec = store[rng.below(store.size())];
    const int n = static_cast<int>(rec.words.size());
    const int len = n >= 2 && rng.bernoulli(0.3) ? 2 : 1;
    const int begin = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - len + 1)));
    auto swapped = rec.words;
    for (int k = 0; k < len; ++k) swapped[static_cast<std::size_t>(begin + k)] = vocab[rng.below(vocab.size())];
    const Span span{begin, begin + len};
    const auto a = predict(b, rec.words, span);
    const auto c = predict(b, swapped, span);
    if (a.p_c != c.p_c) return {false, "p_c changed for " + rec.sent_id};
  }
  return {true, "1000 swaps, p_c bit-identical"};
}

// ---------------------------------------------------------------------------
// 3. Ensemble algebra

struct ToyData {
  std::vector<SentenceRecord> store;
  LabeledDataset data;
};

ToyData toy_data(std::size_t per_label) {
  const auto gen = generator(200, 11);
  ToyData out;
  out.store = synthetic_store(gen);
  const SeedTermList seeds(gen.lexicon().seeds);
  StubTagger tagger;
  const auto full = build_dataset(out.store, split_pools(out.store, seeds), {}, tagger);
  std::size_t pos = 0, neg = 0;
  for (const auto& s : full.samples) {
    if (s.words.size() > 60) continue;
    auto& n = s.label == Label::Pos ? pos : neg;
    if (n >= per_label) continue;
    ++n;
    out.data.samples.push_back(s);
  }
  out.data.counts = out.data.recount();
  return out;
}

ModelBundle toy_bundle(const std::vector<SentenceRecord>& store, int dim, int layers, int heads) {
  EncoderConfig c;
  c.dim = dim;
  c.layers = layers;
  c.heads = heads;
  c.ff_dim = 2 * dim;
  c.max_len = 64;
  return ModelBundle::from_checkpoint(scratch_checkpoint(store, c, 3), 5);
}

Outcome ensemble_algebra() {
  Rng rng(99);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double pc = rng.uniform(), pw = rng.uniform();
    const double alpha = 0.9 + 0.09 * rng.uniform();
    const auto c = combine(pc, pw, alpha);
    worst = std::max(worst, std::abs(c.p - (alpha * pc + (1.0 - alpha) * pw)));
    if (c.decision != (c.p >= 0.5)) return {false, "decision disagrees with p >= 0.5"};
  }
  if (worst > 1e-9) return {false, "combine error " + sci(worst)};

  const auto toy = toy_data(60);
  auto b = toy_bundle(toy.store, 16, 1, 2);
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.learning_rate = 2e-3;
  cfg.max_epochs = 3;
  cfg.early_stop_patience = 2;
  const auto hist = train(b, toy.data, cfg);
  std::size_t n_train = 0;
  for (const auto& s : toy.data.samples) n_train += s.split == Split::Train ? 1 : 0;
  const std::size_t per_epoch = (n_train + 15) / 16;
  if (hist.alpha_per_step.size() != per_epoch * hist.epochs.size()) return {false, "alpha not logged at every step"};
  for (double a : hist.alpha_per_step) {
    if (!(a > 0.9 && a < 0.99)) return {false, "alpha " + std::to_string(a) + " left (0.9, 0.99)"};
  }
  for (const auto& s : toy.data.samples) {
    const auto p = predict(b, s.words, s.target);
    const double a = b.ensemble.alpha();
    worst = std::max(worst, std::abs(p.p - (a * p.p_c + (1.0 - a) * p.p_w)));
  }
  if (worst > 1e-9) return {false, "model ensemble error " + sci(worst)};
  return {true, "max |p - mix| " + sci(worst) + ", " + std::to_string(hist.alpha_per_step.size()) +
                    " steps over " + std::to_string(hist.epochs.size()) + " epochs"};
}

// ---------------------------------------------------------------------------
// 4. Loss and gradients

double clamp_log(double p) { return std::log(std::min(std::max(p, 1e-7), 1.0 - 1e-7)); }

Outcome loss_and_gradients() {
  const auto toy = toy_data(6);
  auto b = toy_bundle(toy.store, 4, 2, 2);
  b.ensemble.raw_alpha.value(0, 0) = 0.4;
  Rng init(12);
  for (auto* p : {&b.context_head.b1, &b.word_head.b3, &b.word_head.ln_shift}) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = init.normal(0.0, 0.3);
  }
  for (auto* p : {&b.context_head.w2, &b.word_head.w4}) p->value *= 20.0;

  std::vector<EncodedSample> samples;
  for (const auto& s : toy.data.samples) samples.push_back(encode_sample(b, s));
  std::vector<const EncodedSample*> batch;
  for (const auto& s : samples) batch.push_back(&s);

  // scalar re-computation from per-sample probabilities
  double lc = 0.0, lw = 0.0;
  for (const auto& s : toy.data.samples) {
    const auto p = predict(b, s.words, s.target);
    const double y = s.y();
    lc -= y * clamp_log(p.p_c) + (1.0 - y) * clamp_log(1.0 - p.p_c);
    lw -= y * clamp_log(p.p_w) + (1.0 - y) * clamp_log(1.0 - p.p_w);
  }
  const double n = static_cast<double>(toy.data.samples.size());
  const double alpha = b.ensemble.alpha();
  const double scalar = alpha * lc / n + (1.0 - alpha) * lw / n;
  nn::Gradients g;
  const double batched = batch_loss(b, batch, Mode::Eval, &g).total;
  if (std::abs(batched - scalar) > 1e-6) {
    return {false, "batch loss " + std::to_string(batched) + " vs scalar " + std::to_string(scalar)};
  }

  const std::set<std::string> heads = {"ctx.w1", "ctx.b1", "ctx.w2", "word.w3", "word.b3",
                                       "word.ln.g", "word.ln.b", "word.w4", "ensemble.raw_alpha"};
  auto total = [&] { return batch_loss(b, batch, Mode::Eval, nullptr).total; };
  const double h = 1e-5;
  double worst = 0.0;
  std::size_t checked = 0;
  std::set<std::string> covered;
  for (nn::Parameter* p : b.trainable_parameters()) {
    if (!heads.count(p->name)) continue;
    covered.insert(p->name);
    const nn::Matrix* gp = g.find(*p);
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double orig = p->value.data()[i];
      p->value.data()[i] = orig + h;
      const double up = total();
      p->value.data()[i] = orig - h;
      const double down = total();
      p->value.data()[i] = orig;
      const double fd = (up - down) / (2.0 * h);
      const double an = gp == nullptr ? 0.0 : gp->data()[i];
      const double scale = std::max(std::abs(an), std::abs(fd));
      ++checked;
      if (scale < 1e-8) continue;
      const double rel = std::abs(an - fd) / scale;
      worst = std::max(worst, rel);
      if (rel > 1e-4) return {false, p->name + "[" + std::to_string(i) + "] relative error " + std::to_string(rel)};
    }
  }
  if (covered != heads) return {false, "not every head parameter was checked"};
  return {true, "|batch - scalar| " + sci(std::abs(batched - scalar)) + ", " + std::to_string(checked) +
                    " gradient entries, worst relative " + sci(worst)};
}

// ---------------------------------------------------------------------------
// Shared synthetic world for the model-quality criteria

struct World {
  synthetic::Generator gen = generator(1500, 7);
  std::vector<SentenceRecord> store;
  std::vector<AnnotatedSentence> annotated;
  StubTagger tagger;

  World() {
    const auto cfg = default_run_config();
    store = synthetic_store(gen, cfg.filter);
    annotated = gen.annotated(400, tagger, 999);
  }
};

const World& world() {
  static const World w;
  return w;
}

RunConfig world_config(std::uint64_t seed, bool no_neg_stms, bool no_word_head) {
  auto cfg = default_run_config();
  cfg.rng_seed = seed;
  cfg.ablation.no_neg_stms = no_neg_stms;
  cfg.ablation.no_word_head = no_word_head;
  finalize(cfg);
  return cfg;
}

EncoderCheckpoint pretrained(const RunConfig& cfg) {
  const auto& w = world();
  const auto start = scratch_checkpoint(w.store, cfg.profile.encoder, cfg.rng_seed, cfg.profile.vocab_min_count);
  return pretrain_domain(w.store, start, cfg.pretrain).checkpoint;
}

ModelBundle trained(const RunConfig& cfg, const EncoderCheckpoint& ckpt) {
  const auto& w = world();
  const SeedTermList seeds(w.gen.lexicon().seeds);
  const auto ds = build_dataset(w.store, split_pools(w.store, seeds), cfg.sampling, w.tagger);
  auto b = ModelBundle::from_checkpoint(ckpt, cfg.rng_seed, cfg.profile.encoder.dropout);
  train(b, ds, cfg.train);
  return b;
}

// ---------------------------------------------------------------------------
// 5. Generalization to unseen jargon

Outcome generalization() {
  const auto& w = world();
  const auto cfg = world_config(42, false, false);
  const auto b = trained(cfg, pretrained(cfg));
  const auto& lex = w.gen.lexicon();
  const std::set<std::string> unseen(lex.unseen_jargon.begin(), lex.unseen_jargon.end());
  const std::set<std::string> euph(lex.euphemisms.begin(), lex.euphemisms.end());
  const auto r = evaluate(BundlePredictor{&b}, w.annotated, 0.5, nullptr, &unseen);
  std::vector<CandidateOutcome> outcomes;
  evaluate(BundlePredictor{&b}, w.annotated, 0.5, &outcomes);
  std::size_t right = 0, total = 0;
  for (const auto& c : outcomes) {
    if (!euph.count(c.word)) continue;
    ++total;
    right += c.predicted == c.gold ? 1 : 0;
  }
  const double acc = total ? static_cast<double>(right) / static_cast<double>(total) : 0.0;
  const bool pass = r.f1 >= 0.90 && acc >= 0.85 && total > 0;
  return {pass, "unseen F1 " + fmt(r.f1) + " (P " + fmt(r.precision) + ", R " + fmt(r.recall) +
                    "), euphemism accuracy " + fmt(acc) + " over " + std::to_string(total)};
}

// ---------------------------------------------------------------------------
// 6. Ablation directions

Outcome ablations() {
  const auto& w = world();
  int neg_votes = 0, head_votes = 0;
  std::string detail;
  for (std::uint64_t seed : {42u, 43u, 44u}) {
    const auto full_cfg = world_config(seed, false, false);
    const auto ckpt = pretrained(full_cfg);
    const auto precision = [&](bool no_neg, bool no_head) {
      const auto b = trained(world_config(seed, no_neg, no_head), ckpt);
      return evaluate(BundlePredictor{&b}, w.annotated).precision;
    };
    const double full = precision(false, false);
    const double no_neg = precision(true, false);
    const double no_head = precision(false, true);
    neg_votes += no_neg < full ? 1 : 0;
    head_votes += no_head <= full ? 1 : 0;
    detail += " seed " + std::to_string(seed) + ": P " + fmt(full) + " / -NEG_STMS " + fmt(no_neg) + " / -word " +
              fmt(no_head) + ";";
  }
  return {neg_votes >= 2 && head_votes >= 2, "precision" + detail};
}

// ---------------------------------------------------------------------------
// 7. Extraction oracle

/// Stub model: probability from a hash of (word, sentence, position), with a
/// few fixed words to create ties.
struct HashPredictor {
  Prediction operator()(std::span<const std::string> words, Span span) const {
    std::string key;
    for (const auto& w : words) key += w + " ";
    key += std::to_string(span.begin);
    const auto word = text::to_lower(words[static_cast<std::size_t>(span.begin)]);
    double p = static_cast<double>(std::hash<std::string>{}(key) % 1000) / 1000.0;
    if (word == "snow" || word == "ice") p = 0.9;
    if (word.size() <= 3) p = 0.2;
    return combine(p, p, 1.0);
  }
};

Outcome extraction_oracle() {
  const auto gen = generator(60, 5);
  auto store = synthetic_store(gen);
  if (store.size() > 200) store.resize(200);
  StubTagger tagger;
  const HashPredictor pred;

  struct Tally {
    std::size_t f = 0, total = 0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& s : store) {
    const auto tags = tagger.tag(s.words);
    for (std::size_t i = 0; i < s.words.size(); ++i) {
      const auto& w = s.words[i];
      const bool alnum = std::all_of(w.begin(), w.end(), [](unsigned char ch) { return std::isalnum(ch) != 0; });
      const bool letter = std::any_of(w.begin(), w.end(), [](unsigned char ch) { return std::isalpha(ch) != 0; });
      if (!is_noun(tags[i]) || !alnum || !letter) continue;
      auto& t = tally[text::to_lower(w)];
      t.total += 1;
      const int k = static_cast<int>(i);
      t.f += pred(s.words, Span{k, k + 1}).p >= 0.5 ? 1 : 0;
    }
  }
  struct Row {
    std::string word;
    std::size_t f, total;
    double r, score;
  };
  std::vector<Row> rows;
  for (const auto& [w, t] : tally) {
    const double r = static_cast<double>(t.f) / static_cast<double>(t.total);
    rows.push_back({w, t.f, t.total, r, static_cast<double>(t.f) * r * r});
  }
  std::vector<Row> expected(rows.size());
  std::size_t ties = 0;
  for (const auto& a : rows) {
    std::size_t rank = 0;
    for (const auto& o : rows) {
      if (o.score == a.score && o.word != a.word) ++ties;
      rank += (o.score > a.score || (o.score == a.score && o.f > a.f) ||
               (o.score == a.score && o.f == a.f && o.word < a.word))
                  ? 1
                  : 0;
    }
    expected[rank] = a;
  }
  ScoreConfig cfg;
  cfg.top_k = static_cast<int>(rows.size()) + 10;
  const auto got = score_corpus(pred, store, cfg, tagger);
  if (got.size() != expected.size()) return {false, "ranked " + std::to_string(got.size()) + " words"};
  for (std::size_t i = 0; i < got.size(); ++i) {
    const auto& g = got[i];
    const auto& e = expected[i];
    if (g.word != e.word || g.f_pred != e.f || g.total != e.total || std::abs(g.r_pred - e.r) > 1e-12 ||
        std::abs(g.score - e.score) > 1e-12 * std::max(1.0, e.score)) {
      return {false, "position " + std::to_string(i) + ": got " + g.word + ", expected " + e.word};
    }
  }
  cfg.top_k = 10;
  const auto top = score_corpus(pred, store, cfg, tagger);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (top[i].word != expected[i].word) return {false, "top-k truncation reorders"};
  }
  return {true, std::to_string(store.size()) + " sentences, " + std::to_string(got.size()) + " words, " +
                    std::to_string(ties / 2) + " tied pairs"};
}

// ---------------------------------------------------------------------------
// 8. Metric oracles

struct TablePredictor {
  std::map<std::string, double> p;
  Prediction operator()(std::span<const std::string> words, Span span) const {
    const double v = p.at(words[static_cast<std::size_t>(span.begin)]);
    return combine(v, v, 1.0);
  }
};

AnnotatedSentence sentence(std::vector<std::string> ws, std::vector<int> jargon, std::vector<int> candidates) {
  AnnotatedSentence a;
  a.words = std::move(ws);
  a.jargon_indices = std::move(jargon);
  a.candidate_indices = std::move(candidates);
  return a;
}

Outcome metric_oracles() {
  // Hand tally: candidates and gold below with predictions zorax/snow/ice yes,
  // car/dog no.
  //   s1: zorax(g, yes)=TP  car(no)=TN   snow(g, yes)=TP
  //   s2: ice(yes)=FP       dog(g, no)=FN
  //   s3: snow(yes)=FP      zorax(g, yes)=TP  car(no)=TN
  // TP 3, FP 2, FN 1, TN 2; unique detected {zorax, snow} = 2.
  const std::vector<AnnotatedSentence> data = {
      sentence({"zorax", "car", "snow"}, {0, 2}, {0, 1, 2}), sentence({"ice", "dog"}, {1}, {0, 1}),
      sentence({"snow", "zorax", "car"}, {1}, {0, 1, 2})};
  const TablePredictor pred{{{"zorax", 0.8}, {"snow", 0.6}, {"ice", 0.5}, {"car", 0.1}, {"dog", 0.3}}};
  const auto r = evaluate(pred, data);
  const Confusion want{3, 2, 1, 2};
  if (!(r.confusion == want)) return {false, "confusion mismatch"};
  const bool prf = std::abs(r.precision - 3.0 / 5.0) <= 1e-9 && std::abs(r.recall - 3.0 / 4.0) <= 1e-9 &&
                   std::abs(r.f1 - 6.0 / 9.0) <= 1e-9 && std::abs(r.confusion.accuracy() - 5.0 / 8.0) <= 1e-9;
  if (!prf) return {false, "P/R/F1 mismatch"};
  if (r.unique_jargon_detected != 2) return {false, "unique detected " + std::to_string(r.unique_jargon_detected)};

  // second table: threshold 0.7 keeps only zorax: TP 2, FP 0, FN 2, TN 4
  const auto t = evaluate(pred, data, 0.7);
  if (!(t.confusion == Confusion{2, 0, 2, 4}) || std::abs(t.precision - 1.0) > 1e-9 ||
      std::abs(t.recall - 0.5) > 1e-9 || std::abs(t.f1 - 2.0 / 3.0) > 1e-9 || t.unique_jargon_detected != 1) {
    return {false, "threshold 0.7 table mismatch"};
  }

  const std::vector<int> a = {1, 0, 1, 1, 0, 0};
  const std::vector<int> inv = {0, 1, 0, 0, 1, 1};
  const std::vector<int> x = {1, 1, 0, 0};
  const std::vector<int> y = {1, 0, 1, 0};
  const double k1 = cohens_kappa(a, a), k0 = cohens_kappa(x, y), km = cohens_kappa(a, inv);
  if (std::abs(k1 - 1.0) > 1e-9 || std::abs(k0) > 1e-9 || std::abs(km + 1.0) > 1e-9) {
    return {false, "kappa " + std::to_string(k1) + " " + std::to_string(k0) + " " + std::to_string(km)};
  }
  return {true, "two confusion tables and kappa 1/0/-1"};
}

// ---------------------------------------------------------------------------
// 9. Baselines

Outcome baselines() {
  const auto gen = generator(200, 7);
  const auto store = synthetic_store(gen);
  auto cfg = default_run_config();
  finalize(cfg);
  const auto ckpt = scratch_checkpoint(store, cfg.profile.encoder, cfg.rng_seed, cfg.profile.vocab_min_count);
  const SeedTermList seeds(gen.lexicon().seeds);
  const auto seed_ids = single_token_seed_ids(seeds, *ckpt.tokenizer);
  const std::set<int> seed_set(seed_ids.begin(), seed_ids.end());
  const std::size_t vocab = ckpt.tokenizer->vocab_size();
  std::size_t queries = 0;
  for (std::size_t si = 0; si < store.size() && queries < 12; si += 17) {
    const auto& rec = store[si];
    const int i = static_cast<int>(si % rec.words.size());
    const Span span{i, i + 1};
    const auto ranking = mlm_ranking(ckpt, rec.words, span);
    std::size_t first = ranking.size();
    for (std::size_t r = 0; r < ranking.size() && first == ranking.size(); ++r) {
      if (seed_set.count(ranking[r])) first = r;
    }
    bool prev = false;
    for (std::size_t k = 0; k <= vocab; ++k) {
      const bool hit = baseline_mlm_topk(ckpt, rec.words, span, seeds, k);
      if (hit != (first < k)) return {false, "MLM top-" + std::to_string(k) + " disagrees with exhaustive ranking"};
      if (prev && !hit) return {false, "MLM baseline not monotone in K"};
      prev = hit;
    }
    ++queries;
  }

  const auto& w = world();
  const auto res = baseline_word2vec(w.store, SeedTermList(w.gen.lexicon().seeds), cfg.word2vec);
  const auto& unseen = w.gen.lexicon().unseen_jargon;
  const std::set<std::string> jargon(unseen.begin(), unseen.end());
  std::string detail;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& nonce = w.gen.lexicon().unseen_jargon[i];
    std::size_t pos = res.words.size();
    for (std::size_t k = 0; k < res.words.size(); ++k) {
      if (res.words[k].first == nonce) pos = k;
    }
    if (pos == res.words.size()) return {false, "word2vec missed " + nonce};
    for (std::size_t k = 0; k < pos; ++k) {
      if (!jargon.count(res.words[k].first)) return {false, res.words[k].first + " outranks " + nonce};
    }
    detail += " " + nonce + "@" + std::to_string(pos + 1);
  }
  return {true, std::to_string(queries) + " MLM queries x " + std::to_string(vocab + 1) +
                    " K values; word2vec ranks of " + std::to_string(res.words.size()) + ":" + detail};
}

// ---------------------------------------------------------------------------
// 10. Determinism of the CLI pipeline

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JARGON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "jargon_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto syn = root / "syn";
  if (run_cli("--workdir " + q(root / "synth") + " synth --out-dir " + q(syn)) != 0) return {false, "synth failed"};
  for (const char* w : {"a", "b"}) {
    const std::string base = "--workdir " + q(root / w) + " --corpus " + q(syn / "corpus.jsonl") + " --seeds " +
                             q(syn / "seeds.txt") + " ";
    for (const std::string& cmd : std::vector<std::string>{"ingest", "build-dataset", "pretrain", "train",
                                  "evaluate --annotations " + q(syn / "annotated.jsonl"), "extract-list"}) {
      if (run_cli(base + cmd) != 0) return {false, std::string(w) + ": " + cmd + " failed"};
    }
  }
  std::string detail;
  for (const char* f : {"dataset.jsonl", "ranking.jsonl", "jargon_list.txt", "eval.json"}) {
    const auto a = io::read_file(root / "a" / f);
    const auto b = io::read_file(root / "b" / f);
    if (a.empty() || a != b) return {false, std::string(f) + " differs"};
    detail += std::string(" ") + f + "=" + io::sha256_hex(a).substr(0, 12);
  }
  fs::remove_all(root);
  return {true, "identical:" + detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"sampling arithmetic", 1.0, sampling_arithmetic},
      {"delexicalized context path", 30.0, delexicalization},
      {"ensemble algebra", 120.0, ensemble_algebra},
      {"loss and gradients", 120.0, loss_and_gradients},
      {"generalization to unseen jargon", 600.0, generalization},
      {"ablation directions", 1800.0, ablations},
      {"extraction oracle", 10.0, extraction_oracle},
      {"metric oracles", 1.0, metric_oracles},
      {"baselines", 300.0, baselines},
      {"pipeline determinism", 1500.0, cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over time limit";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << c.name << " (" << fmt(secs, 2) << "s, limit "
              << fmt(c.limit_seconds, 0) << "s): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
