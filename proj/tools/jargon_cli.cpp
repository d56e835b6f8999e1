// jargon: command-line driver for the drug-jargon detection pipeline.
//
//   synth -> ingest -> build-dataset -> pretrain -> train -> evaluate / extract-list
//
// Each command writes its outputs atomically under the work directory and a
// run manifest to <workdir>/manifests/<command>.json.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jargon/jargon.hpp"

namespace fs = std::filesystem;
using namespace jargon;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInput = 3, kRuntime = 4 };

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;  // key.path=value
  std::optional<std::string> workdir, corpus, seeds, profile, encoder_path;
  std::optional<std::uint64_t> rng_seed;
  bool no_word_head = false, no_pretrain = false, no_neg_stms = false;

  // command-specific
  std::string sentence, word, annotations, words_file, out, outcomes, kind = "word2vec", sentences;
  std::string a_file, b_file, out_dir;
  std::size_t documents = 1500, annotated = 400;
  std::uint64_t synth_seed = 7;
  std::uint64_t annotated_seed = 999;
};

/// Parses "a.b=value"; the value is read as JSON when it parses, otherwise
/// as a plain string.
io::json override_patch(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + kv);
  const std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
  io::json value = io::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  io::json patch = io::json::object();
  io::json* node = &patch;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  return patch;
}

/// defaults -> profile defaults -> config file -> --set overrides -> flags.
RunConfig resolve_config(const Options& o) {
  io::json file = io::json::object();
  if (!o.config_file.empty()) {
    try {
      file = io::json::parse(io::read_file(o.config_file));
    } catch (const io::json::exception& e) {
      throw ConfigError("cannot parse " + o.config_file + ": " + e.what());
    } catch (const UnreadableInput& e) {
      throw ConfigError(e.what());
    }
  }
  std::vector<io::json> patches;
  for (const auto& kv : o.overrides) patches.push_back(override_patch(kv));

  RunConfig c;
  c.profile.name = "scratch-tiny";
  if (auto p = profile_in(file)) c.profile.name = *p;
  for (const auto& p : patches) {
    if (auto name = profile_in(p)) c.profile.name = *name;
  }
  if (o.profile) c.profile.name = *o.profile;
  if (c.profile.name != "scratch-tiny" && c.profile.name != "pretrained-path") {
    throw ConfigError("profile must be scratch-tiny or pretrained-path, got '" + c.profile.name + "'");
  }
  apply_profile_defaults(c);
  const std::string profile = c.profile.name;
  apply_json(c, file);
  for (const auto& p : patches) apply_json(c, p);
  c.profile.name = profile;

  if (o.workdir) c.workdir = *o.workdir;
  if (o.corpus) c.corpus = *o.corpus;
  if (o.seeds) c.seeds = *o.seeds;
  if (o.encoder_path) c.profile.path = *o.encoder_path;
  if (o.rng_seed) c.rng_seed = *o.rng_seed;
  c.ablation.no_word_head = c.ablation.no_word_head || o.no_word_head;
  c.ablation.no_pretrain = c.ablation.no_pretrain || o.no_pretrain;
  c.ablation.no_neg_stms = c.ablation.no_neg_stms || o.no_neg_stms;
  finalize(c);
  if (c.profile.name == "pretrained-path" && c.profile.path.empty()) {
    throw ConfigError("pretrained-path profile needs encoder.path");
  }
  return c;
}

const fs::path& require(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " path is not set");
  if (!fs::exists(p)) throw UnreadableInput(std::string(what) + " not found: " + p.string());
  return p;
}

std::unique_ptr<PosTagger> make_tagger(const RunConfig& c) {
  if (c.tagger.kind == "lexicon") return std::make_unique<LexiconTagger>(require(c.tagger.path, "tagger lexicon"));
  return std::make_unique<StubTagger>();
}

/// Writes a directory by filling a sibling temp directory and renaming it
/// into place.
template <class Fill>
void publish_dir(const fs::path& dir, Fill fill) {
  fs::path tmp = dir;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fill(tmp);
  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

class Run {
 public:
  Run(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg), start_(clock::now()) {
    fs::create_directories(cfg_.workdir);
  }

  fs::path path(const std::string& name) const { return cfg_.workdir / name; }

  const fs::path& input(const fs::path& p, const char* what) {
    require(p, what);
    inputs_[p.string()] = io::sha256_file(p);
    return p;
  }

  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void stage(const std::string& name) {
    const auto now = clock::now();
    timings_[name] = std::chrono::duration<double>(now - mark_).count();
    mark_ = now;
  }
  io::json& extra() { return extra_; }

  void finish() {
    io::json m{{"command", command_},
               {"config_hash", config_hash(cfg_)},
               {"config", to_json(cfg_)},
               {"ablation",
                {{"no_word_head", cfg_.ablation.no_word_head},
                 {"no_pretrain", cfg_.ablation.no_pretrain},
                 {"no_neg_stms", cfg_.ablation.no_neg_stms}}},
               {"inputs", inputs_},
               {"outputs", outputs_},
               {"timings", timings_}};
    m["timings"]["total_seconds"] = std::chrono::duration<double>(clock::now() - start_).count();
    if (!extra_.is_null()) m["details"] = extra_;
    io::write_json(cfg_.workdir / "manifests" / (command_ + ".json"), m);
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string command_;
  const RunConfig& cfg_;
  clock::time_point start_, mark_ = clock::now();
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  io::json timings_ = io::json::object();
  io::json extra_;
};

std::shared_ptr<const SubwordTokenizer> filter_tokenizer(const RunConfig& c) {
  if (c.profile.name == "pretrained-path") return load_checkpoint(require(c.profile.path, "encoder checkpoint")).tokenizer;
  // Scratch vocabularies are word-level, so every word is one token.
  return std::make_shared<WordLevelTokenizer>(reserved_tokens());
}

std::set<std::string> read_word_set(const fs::path& p) {
  std::set<std::string> out;
  io::for_each_line(p, [&](std::size_t, const std::string& line) {
    auto w = text::trim(line);
    if (!w.empty() && w.front() != '#') out.insert(text::to_lower(w));
  });
  return out;
}

std::vector<int> read_binary_labels(const fs::path& p) {
  std::vector<int> out;
  io::for_each_line(p, [&](std::size_t line_no, const std::string& line) {
    const auto t = text::trim(line);
    if (t == "0" || t == "1") {
      out.push_back(t == "1" ? 1 : 0);
    } else {
      throw MalformedRecord(p.string() + " line " + std::to_string(line_no) + ": expected 0 or 1");
    }
  });
  return out;
}

std::string lines(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_synth(const RunConfig& cfg, const Options& o) {
  Run run("synth", cfg);
  synthetic::Options so;
  so.documents = o.documents;
  so.seed = o.synth_seed;
  const synthetic::Generator gen(so);
  const fs::path dir = o.out_dir.empty() ? cfg.workdir / "synthetic" : fs::path(o.out_dir);
  fs::create_directories(dir);

  std::string corpus;
  for (const auto& d : gen.documents()) corpus += io::json{{"id", d.doc_id}, {"text", d.text}, {"source", d.source}}.dump() + "\n";
  std::string annotated;
  StubTagger tagger;
  for (const auto& a : gen.annotated(o.annotated, tagger, o.annotated_seed)) annotated += to_json(a).dump() + "\n";

  const auto& lex = gen.lexicon();
  const std::vector<std::pair<std::string, std::string>> files = {
      {"corpus.jsonl", corpus},
      {"seeds.txt", lines(lex.seeds)},
      {"annotated.jsonl", annotated},
      {"seen_jargon.txt", lines(lex.seen_jargon)},
      {"unseen_jargon.txt", lines(lex.unseen_jargon)},
      {"euphemisms.txt", lines(lex.euphemisms)}};
  for (const auto& [name, body] : files) {
    io::write_atomic(dir / name, body);
    run.output(dir / name);
  }
  run.stage("generate");
  run.finish();
}

void cmd_ingest(const RunConfig& cfg) {
  Run run("ingest", cfg);
  run.input(cfg.corpus, "corpus");
  if (cfg.profile.name == "pretrained-path") run.input(cfg.profile.path, "encoder checkpoint");
  const auto tok = filter_tokenizer(cfg);
  const auto result = ingest_corpus(cfg.corpus, cfg.filter, *tok);
  run.stage("ingest");
  const auto store_path = run.path("sentences.jsonl");
  write_store(store_path, result.store);
  io::write_json(stats_path_for(store_path), to_json(result.stats));
  run.output(store_path);
  run.output(stats_path_for(store_path));
  run.extra() = to_json(result.stats);
  run.finish();
}

void cmd_build_dataset(const RunConfig& cfg) {
  Run run("build-dataset", cfg);
  const auto store = read_store(run.input(run.path("sentences.jsonl"), "sentence store"));
  const auto seeds = SeedTermList::load(run.input(cfg.seeds, "seed list"));
  const auto tagger = make_tagger(cfg);
  const auto pools = split_pools(store, seeds);
  const auto ds = build_dataset(store, pools, cfg.sampling, *tagger);
  run.stage("sample");
  io::write_atomic(run.path("dataset.jsonl"), serialize_dataset(ds));
  io::json counts{{"counts", to_json(ds.counts)},
                  {"stms_sentences", pools.stms.size()},
                  {"nonstms_sentences", pools.nonstms.size()},
                  {"nonstms_shortfall", ds.nonstms_shortfall}};
  io::write_json(run.path("dataset.counts.json"), counts);
  run.output(run.path("dataset.jsonl"));
  run.output(run.path("dataset.counts.json"));
  run.extra() = counts;
  run.finish();
}

EncoderCheckpoint start_checkpoint(const RunConfig& cfg, std::span<const SentenceRecord> store, Run& run) {
  if (cfg.profile.name == "pretrained-path") return load_checkpoint(run.input(cfg.profile.path, "encoder checkpoint"));
  return scratch_checkpoint(store, cfg.profile.encoder, cfg.rng_seed, cfg.profile.vocab_min_count);
}

void cmd_pretrain(const RunConfig& cfg) {
  Run run("pretrain", cfg);
  const auto store = read_store(run.input(run.path("sentences.jsonl"), "sentence store"));
  auto ckpt = start_checkpoint(cfg, store, run);
  io::json hist = {{"skipped", cfg.ablation.no_pretrain}};
  if (!cfg.ablation.no_pretrain) {
    const auto result = pretrain_domain(store, ckpt, cfg.pretrain);
    ckpt = result.checkpoint;
    hist["initial_valid_loss"] = result.history.initial_valid_loss;
    hist["train_loss"] = result.history.train_loss;
    hist["valid_loss"] = result.history.valid_loss;
    hist["best_epoch"] = result.history.best_epoch;
  }
  hist["provenance"] = to_string(ckpt.provenance);
  run.stage("pretrain");
  const auto dir = run.path("encoder");
  publish_dir(dir, [&](const fs::path& tmp) { save_checkpoint(ckpt, tmp); });
  io::write_json(run.path("pretrain_history.json"), hist);
  run.output(dir);
  run.output(run.path("pretrain_history.json"));
  run.extra() = hist;
  run.finish();
}

void cmd_train(const RunConfig& cfg) {
  Run run("train", cfg);
  const auto ds = read_dataset(run.input(run.path("dataset.jsonl"), "dataset"));
  const auto ckpt = load_checkpoint(run.input(run.path("encoder"), "encoder checkpoint"));
  auto bundle = ModelBundle::from_checkpoint(ckpt, cfg.rng_seed, cfg.profile.encoder.dropout);
  const auto h = train(bundle, ds, cfg.train);
  run.stage("train");

  io::json hist{{"initial_train_loss", h.initial_train_loss},
                {"initial_valid_loss", h.initial_valid_loss},
                {"best_epoch", h.best_epoch},
                {"stopped_early", h.stopped_early},
                {"word_head", bundle.use_word_head},
                {"alpha", bundle.effective_alpha()},
                {"word_encoder_sha256", h.word_encoder_digest},
                {"epochs", io::json::array()}};
  for (const auto& e : h.epochs) {
    hist["epochs"].push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"valid_loss", e.valid_loss}, {"alpha", e.alpha}});
  }
  if (!h.alpha_per_step.empty()) {
    const auto [lo, hi] = std::minmax_element(h.alpha_per_step.begin(), h.alpha_per_step.end());
    hist["alpha_min"] = *lo;
    hist["alpha_max"] = *hi;
  }
  const auto dir = run.path("model");
  publish_dir(dir, [&](const fs::path& tmp) { save_bundle(bundle, tmp); });
  io::write_json(run.path("train_history.json"), hist);
  run.output(dir);
  run.output(run.path("train_history.json"));
  run.extra() = hist;
  run.finish();
}

void cmd_detect(const RunConfig& cfg, const Options& o) {
  Run run("detect", cfg);
  const auto bundle = load_bundle(run.input(run.path("model"), "model bundle"));
  const auto p = detect_word(bundle, o.sentence, o.word, cfg.filter);
  std::cout << to_json(p).dump() << "\n";
  run.extra() = to_json(p);
  run.finish();
}

void cmd_evaluate(const RunConfig& cfg, const Options& o) {
  Run run("evaluate", cfg);
  const auto bundle = load_bundle(run.input(run.path("model"), "model bundle"));
  const auto tagger = make_tagger(cfg);
  const auto data = read_annotated(run.input(o.annotations, "annotations"), *tagger);
  std::optional<std::set<std::string>> filter;
  if (!o.words_file.empty()) filter = read_word_set(run.input(o.words_file, "word list"));
  std::vector<CandidateOutcome> outcomes;
  const auto r = evaluate(BundlePredictor{&bundle}, data, kDecisionThreshold, &outcomes, filter ? &*filter : nullptr);
  run.stage("evaluate");
  const fs::path out = o.out.empty() ? run.path("eval.json") : fs::path(o.out);
  io::write_json(out, to_json(r));
  run.output(out);
  if (!o.outcomes.empty()) {
    std::string body;
    for (const auto& c : outcomes) {
      body += io::json{{"sentence", c.sentence}, {"index", c.index}, {"word", c.word}, {"p", c.p},
                       {"predicted", c.predicted}, {"gold", c.gold}}.dump() + "\n";
    }
    io::write_atomic(o.outcomes, body);
    run.output(o.outcomes);
  }
  std::cout << to_json(r).dump() << "\n";
  run.extra() = to_json(r);
  run.finish();
}

void cmd_extract_list(const RunConfig& cfg, const Options& o) {
  Run run("extract-list", cfg);
  const auto bundle = load_bundle(run.input(run.path("model"), "model bundle"));
  const fs::path store_path = o.sentences.empty() ? run.path("sentences.jsonl") : fs::path(o.sentences);
  const auto store = read_store(run.input(store_path, "sentence store"));
  const auto tagger = make_tagger(cfg);
  const auto ranking = score_corpus(BundlePredictor{&bundle}, store, cfg.score, *tagger);
  run.stage("score");
  io::write_atomic(run.path("ranking.jsonl"), serialize_ranking(ranking));
  io::write_atomic(run.path("jargon_list.txt"), serialize_word_list(ranking));
  run.output(run.path("ranking.jsonl"));
  run.output(run.path("jargon_list.txt"));
  run.extra() = {{"ranked", ranking.size()}};
  run.finish();
}

void cmd_kappa(const RunConfig& cfg, const Options& o) {
  Run run("kappa", cfg);
  const auto a = read_binary_labels(run.input(o.a_file, "first annotation"));
  const auto b = read_binary_labels(run.input(o.b_file, "second annotation"));
  const io::json r{{"kappa", cohens_kappa(a, b)}, {"n", a.size()}};
  const fs::path out = o.out.empty() ? run.path("kappa.json") : fs::path(o.out);
  io::write_json(out, r);
  run.output(out);
  std::cout << r.dump() << "\n";
  run.extra() = r;
  run.finish();
}

void cmd_baseline(const RunConfig& cfg, const Options& o) {
  Run run("baseline", cfg);
  const auto seeds = SeedTermList::load(run.input(cfg.seeds, "seed list"));
  if (o.kind == "word2vec") {
    const auto store = read_store(run.input(run.path("sentences.jsonl"), "sentence store"));
    const auto result = baseline_word2vec(store, seeds, cfg.word2vec);
    run.stage("word2vec");
    const fs::path out = o.out.empty() ? run.path("baseline_word2vec.txt") : fs::path(o.out);
    std::string body;
    for (const auto& [w, sim] : result.words) body += w + "\n";
    io::write_atomic(out, body);
    run.output(out);
    run.extra() = {{"words", result.words.size()}, {"skipped_seeds", result.skipped_seeds}};
  } else if (o.kind == "mlm") {
    const auto ckpt = load_checkpoint(run.input(run.path("encoder"), "encoder checkpoint"));
    const auto tagger = make_tagger(cfg);
    const auto data = read_annotated(run.input(o.annotations, "annotations"), *tagger);
    const auto r = evaluate(MlmBaselinePredictor{&ckpt, &seeds, cfg.mlm_top_k}, data);
    run.stage("mlm");
    const fs::path out = o.out.empty() ? run.path("baseline_mlm_eval.json") : fs::path(o.out);
    io::write_json(out, to_json(r));
    run.output(out);
    std::cout << to_json(r).dump() << "\n";
    run.extra() = to_json(r);
  } else {
    throw ConfigError("baseline kind must be word2vec or mlm");
  }
  run.finish();
}

template <class... E>
bool is_any(const std::exception& e) {
  return ((dynamic_cast<const E*>(&e) != nullptr) || ...);
}

int exit_code_for(const std::exception& e) {
  if (is_any<ConfigError>(e)) return kConfig;
  if (is_any<UnreadableInput, MalformedRecord, CheckpointError, EmptyCorpus, EmptyStore, EmptyDataset,
             WordNotInSentence, SentenceRejectedByFilter, LengthMismatch, SequenceTooLong>(e)) {
    return kInput;
  }
  return kRuntime;
}

std::string key_table() {
  const auto defaults = to_json(default_run_config());
  std::string s = "\nConfig keys (JSON file via --config, or --set key=value; flags win).\n"
                  "Defaults shown for the scratch-tiny profile. Origin: published = setting of the\n"
                  "reference method, desk-scale = reduced for CPU runs, implementation = this tool.\n\n";
  for (const auto& k : config_keys()) {
    const auto ptr = io::json::json_pointer("/" + [&] {
      std::string p = k.key;
      for (auto& ch : p) ch = ch == '.' ? '/' : ch;
      return p;
    }());
    std::string line = "  " + k.key;
    line.resize(std::max<std::size_t>(line.size() + 1, 30), ' ');
    std::string def = defaults.contains(ptr) ? defaults[ptr].dump() : "";
    def.resize(std::max<std::size_t>(def.size() + 1, 16), ' ');
    s += line + def + "[" + k.origin + "] " + k.help + "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware drug-jargon detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(key_table());
  Options o;
  app.add_option("-c,--config", o.config_file, "JSON config file");
  app.add_option("--set", o.overrides, "Override a config key, e.g. --set sampling.r_nonstms=1.5");
  app.add_option("--workdir", o.workdir, "Work directory (paths.workdir)");
  app.add_option("--corpus", o.corpus, "Document corpus (paths.corpus)");
  app.add_option("--seeds", o.seeds, "Seed term list (paths.seeds)");
  app.add_option("--profile", o.profile, "Encoder profile: scratch-tiny or pretrained-path");
  app.add_option("--encoder-path", o.encoder_path, "Checkpoint for the pretrained-path profile (encoder.path)");
  app.add_option("--rng-seed", o.rng_seed, "Global seed (rng_seed)");
  app.add_flag("--no-word-head", o.no_word_head, "Ablation: context head only");
  app.add_flag("--no-pretrain", o.no_pretrain, "Ablation: skip domain-adaptive MLM training");
  app.add_flag("--no-neg-stms", o.no_neg_stms, "Ablation: no negatives from seed-containing sentences");

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus, seed list and annotated test set");
  synth->add_option("--out-dir", o.out_dir, "Output directory (default <workdir>/synthetic)");
  synth->add_option("--documents", o.documents, "Number of documents")->capture_default_str();
  synth->add_option("--annotated", o.annotated, "Number of annotated sentences")->capture_default_str();
  synth->add_option("--synth-seed", o.synth_seed, "Generator seed for the corpus")->capture_default_str();
  synth->add_option("--annotated-seed", o.annotated_seed, "Generator seed for annotations")->capture_default_str();
  app.add_subcommand("ingest", "Clean, split and filter the corpus into <workdir>/sentences.jsonl");
  app.add_subcommand("build-dataset", "Label samples with distant supervision into <workdir>/dataset.jsonl");
  app.add_subcommand("pretrain", "Domain-adaptive MLM training into <workdir>/encoder/");
  app.add_subcommand("train", "Train the detector into <workdir>/model/");
  auto* detect = app.add_subcommand("detect", "Score one word in one sentence and print the prediction");
  detect->add_option("--sentence", o.sentence, "Raw sentence text")->required();
  detect->add_option("--word", o.word, "Word to score")->required();
  auto* eval = app.add_subcommand("evaluate", "Precision/recall/F1 against annotated sentences");
  eval->add_option("--annotations", o.annotations, "JSONL {words, jargon_indices}")->required();
  eval->add_option("--words", o.words_file, "Only score candidates in this word list");
  eval->add_option("--out", o.out, "Metrics file (default <workdir>/eval.json)");
  eval->add_option("--outcomes", o.outcomes, "Optional per-candidate JSONL");
  auto* extract = app.add_subcommand("extract-list", "Rank corpus words by F * R^n");
  extract->add_option("--sentences", o.sentences, "Sentence store (default <workdir>/sentences.jsonl)");
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa of two 0/1 label files");
  kappa->add_option("--a", o.a_file, "First annotator, one label per line")->required();
  kappa->add_option("--b", o.b_file, "Second annotator, one label per line")->required();
  kappa->add_option("--out", o.out, "Result file (default <workdir>/kappa.json)");
  auto* baseline = app.add_subcommand("baseline", "Word2Vec neighbor list or masked-LM top-K baseline");
  baseline->add_option("--kind", o.kind, "word2vec or mlm")->capture_default_str();
  baseline->add_option("--annotations", o.annotations, "Annotated sentences (mlm)");
  baseline->add_option("--out", o.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = resolve_config(o);
    if (command == "synth") cmd_synth(cfg, o);
    else if (command == "ingest") cmd_ingest(cfg);
    else if (command == "build-dataset") cmd_build_dataset(cfg);
    else if (command == "pretrain") cmd_pretrain(cfg);
    else if (command == "train") cmd_train(cfg);
    else if (command == "detect") cmd_detect(cfg, o);
    else if (command == "evaluate") cmd_evaluate(cfg, o);
    else if (command == "extract-list") cmd_extract_list(cfg, o);
    else if (command == "kappa") cmd_kappa(cfg, o);
    else if (command == "baseline") cmd_baseline(cfg, o);
    return kOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    std::cerr << (code == kConfig ? "config error: " : code == kInput ? "input error: " : "runtime error: ") << e.what()
              << "\n";
    return code;
  }
}
