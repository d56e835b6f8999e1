#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jargon/autograd.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/rng.hpp"
#include "jargon/tensor_archive.hpp"
#include "jargon/tokenizer.hpp"

namespace jargon {

enum class Mode { Train, Eval };

struct EncoderConfig {
  int vocab_size = 0;
  int dim = 64;
  int layers = 2;
  int heads = 4;
  int ff_dim = 256;
  int max_len = 128;
  double dropout = 0.1;
  double init_std = 0.02;

  void validate() const {
    if (vocab_size <= 0 || dim <= 0 || layers <= 0 || heads <= 0 || ff_dim <= 0 || max_len <= 2) {
      throw ConfigError("encoder dimensions must be positive");
    }
    if (dim % heads != 0) throw ConfigError("dim must be divisible by heads");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("encoder dropout must lie in [0, 1)");
  }
};

enum class Provenance { PretrainedGeneric, DomainAdapted, Scratch };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::PretrainedGeneric: return "pretrained-generic";
    case Provenance::DomainAdapted: return "domain-adapted";
    case Provenance::Scratch: return "scratch";
  }
  return "?";
}

inline Provenance parse_provenance(std::string_view s) {
  if (s == "pretrained-generic") return Provenance::PretrainedGeneric;
  if (s == "domain-adapted") return Provenance::DomainAdapted;
  if (s == "scratch") return Provenance::Scratch;
  throw CheckpointError("unknown provenance '" + std::string(s) + "'");
}

/// Post-LayerNorm transformer encoder (BERT layout) with a masked-token
/// prediction head whose decoder is tied to the token embeddings.
class Encoder {
 public:
  struct Layer {
    nn::Parameter wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w_in, b_in, w_out, b_out, ln2_g, ln2_b;
  };

  Encoder() = default;

  explicit Encoder(const EncoderConfig& cfg, std::uint64_t seed = 0) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed, "encoder-init");
    const auto d = cfg_.dim;
    auto normal = [&](const std::string& name, int rows, int cols) {
      nn::Parameter p{name, nn::Matrix(rows, cols), true};
      for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = rng.normal(0.0, cfg_.init_std);
      return p;
    };
    auto zeros = [](const std::string& name, int rows, int cols) {
      return nn::Parameter{name, nn::Matrix::Zero(rows, cols), false};
    };
    auto ones = [](const std::string& name, int cols) { return nn::Parameter{name, nn::Matrix::Ones(1, cols), false}; };

    tok_ = normal("emb.tok", cfg_.vocab_size, d);
    pos_ = normal("emb.pos", cfg_.max_len, d);
    emb_ln_g_ = ones("emb.ln.g", d);
    emb_ln_b_ = zeros("emb.ln.b", 1, d);
    for (int l = 0; l < cfg_.layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      layers_.push_back(Layer{normal(p + "wq", d, d), zeros(p + "bq", 1, d), normal(p + "wk", d, d),
                              zeros(p + "bk", 1, d), normal(p + "wv", d, d), zeros(p + "bv", 1, d),
                              normal(p + "wo", d, d), zeros(p + "bo", 1, d), ones(p + "ln1.g", d),
                              zeros(p + "ln1.b", 1, d), normal(p + "w_in", d, cfg_.ff_dim),
                              zeros(p + "b_in", 1, cfg_.ff_dim), normal(p + "w_out", cfg_.ff_dim, d),
                              zeros(p + "b_out", 1, d), ones(p + "ln2.g", d), zeros(p + "ln2.b", 1, d)});
    }
    mlm_w_ = normal("mlm.w", d, d);
    mlm_b_ = zeros("mlm.b", 1, d);
    mlm_ln_g_ = ones("mlm.ln.g", d);
    mlm_ln_b_ = zeros("mlm.ln.b", 1, d);
    mlm_bias_ = zeros("mlm.bias", 1, cfg_.vocab_size);
  }

  const EncoderConfig& config() const { return cfg_; }
  int dim() const { return cfg_.dim; }

  /// Final-layer hidden states (n x dim) for a wrapped id sequence.
  /// Dropout is active only when mode == Train and rng is given.
  nn::Var forward(nn::Tape& tape, std::span<const int> ids, Mode mode, Rng* rng = nullptr) const {
    if (ids.empty()) throw DimensionMismatch("empty input sequence");
    if (static_cast<int>(ids.size()) > cfg_.max_len) {
      throw SequenceTooLong(std::to_string(ids.size()) + " > max_len " + std::to_string(cfg_.max_len));
    }
    Rng* drop = mode == Mode::Train ? rng : nullptr;
    const double p = cfg_.dropout;
    const auto n = static_cast<int>(ids.size());
    std::vector<int> positions(ids.size());
    for (int i = 0; i < n; ++i) positions[i] = i;

    nn::Var x = tape.add(tape.embed(tok_, ids), tape.embed(pos_, positions));
    x = tape.layer_norm(x, tape.param(emb_ln_g_), tape.param(emb_ln_b_));
    x = tape.dropout(x, p, drop);

    const int dh = cfg_.dim / cfg_.heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    for (const auto& L : layers_) {
      nn::Var q = tape.add_row(tape.matmul(x, tape.param(L.wq)), tape.param(L.bq));
      nn::Var k = tape.add_row(tape.matmul(x, tape.param(L.wk)), tape.param(L.bk));
      nn::Var v = tape.add_row(tape.matmul(x, tape.param(L.wv)), tape.param(L.bv));
      std::vector<nn::Var> heads;
      heads.reserve(static_cast<std::size_t>(cfg_.heads));
      for (int h = 0; h < cfg_.heads; ++h) {
        nn::Var qh = tape.slice_cols(q, h * dh, dh);
        nn::Var kh = tape.slice_cols(k, h * dh, dh);
        nn::Var vh = tape.slice_cols(v, h * dh, dh);
        nn::Var attn = tape.softmax_rows(tape.scale(tape.matmul_nt(qh, kh), inv_sqrt));
        attn = tape.dropout(attn, p, drop);
        heads.push_back(tape.matmul(attn, vh));
      }
      nn::Var ctx = cfg_.heads == 1 ? heads.front() : tape.concat_cols(heads);
      nn::Var attn_out = tape.add_row(tape.matmul(ctx, tape.param(L.wo)), tape.param(L.bo));
      attn_out = tape.dropout(attn_out, p, drop);
      x = tape.layer_norm(tape.add(x, attn_out), tape.param(L.ln1_g), tape.param(L.ln1_b));

      nn::Var ff = tape.gelu(tape.add_row(tape.matmul(x, tape.param(L.w_in)), tape.param(L.b_in)));
      ff = tape.add_row(tape.matmul(ff, tape.param(L.w_out)), tape.param(L.b_out));
      ff = tape.dropout(ff, p, drop);
      x = tape.layer_norm(tape.add(x, ff), tape.param(L.ln2_g), tape.param(L.ln2_b));
    }
    return x;
  }

  /// Vocabulary logits (m x vocab) for hidden-state rows.
  nn::Var mlm_logits(nn::Tape& tape, nn::Var hidden) const {
    nn::Var t = tape.gelu(tape.add_row(tape.matmul(hidden, tape.param(mlm_w_)), tape.param(mlm_b_)));
    t = tape.layer_norm(t, tape.param(mlm_ln_g_), tape.param(mlm_ln_b_));
    return tape.add_row(tape.matmul_nt(t, tape.param(tok_)), tape.param(mlm_bias_));
  }

  /// Encoder body parameters (excluding the masked-token head).
  std::vector<nn::Parameter*> body_parameters() {
    std::vector<nn::Parameter*> out{&tok_, &pos_, &emb_ln_g_, &emb_ln_b_};
    for (auto& L : layers_) {
      for (nn::Parameter* p : {&L.wq, &L.bq, &L.wk, &L.bk, &L.wv, &L.bv, &L.wo, &L.bo, &L.ln1_g, &L.ln1_b, &L.w_in,
                               &L.b_in, &L.w_out, &L.b_out, &L.ln2_g, &L.ln2_b}) {
        out.push_back(p);
      }
    }
    return out;
  }

  std::vector<nn::Parameter*> mlm_parameters() { return {&mlm_w_, &mlm_b_, &mlm_ln_g_, &mlm_ln_b_, &mlm_bias_}; }

  std::vector<nn::Parameter*> all_parameters() {
    auto out = body_parameters();
    for (auto* p : mlm_parameters()) out.push_back(p);
    return out;
  }

  std::vector<const nn::Parameter*> all_parameters() const {
    std::vector<const nn::Parameter*> out;
    for (auto* p : const_cast<Encoder*>(this)->all_parameters()) out.push_back(p);
    return out;
  }

  TensorArchive to_archive() const {
    TensorArchive a;
    for (const auto* p : all_parameters()) a.put(*p);
    return a;
  }

  void load_archive(const TensorArchive& a) {
    for (auto* p : all_parameters()) a.load_into(*p);
  }

  /// SHA-256 over the serialized weights.
  std::string weights_digest() const { return io::sha256_hex(to_archive().serialize()); }

 private:
  EncoderConfig cfg_;
  nn::Parameter tok_, pos_, emb_ln_g_, emb_ln_b_;
  std::vector<Layer> layers_;
  nn::Parameter mlm_w_, mlm_b_, mlm_ln_g_, mlm_ln_b_, mlm_bias_;
};

/// Encoder weights plus the tokenizer they were trained with.
struct EncoderCheckpoint {
  Encoder encoder;
  std::shared_ptr<const SubwordTokenizer> tokenizer;
  Provenance provenance = Provenance::Scratch;

  const EncoderConfig& config() const { return encoder.config(); }
};

inline io::json encoder_config_json(const EncoderConfig& c) {
  return io::json{{"vocab_size", c.vocab_size}, {"dim", c.dim},         {"layers", c.layers},
                  {"heads", c.heads},           {"ff_dim", c.ff_dim},   {"max_len", c.max_len},
                  {"dropout", c.dropout},       {"init_std", c.init_std}};
}

inline EncoderConfig encoder_config_from_json(const io::json& j) {
  EncoderConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.dim = j.at("dim").get<int>();
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.ff_dim = j.at("ff_dim").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.dropout = j.value("dropout", 0.1);
  c.init_std = j.value("init_std", 0.02);
  return c;
}

/// Checkpoint directory: manifest.json, weights.bin, vocab.txt.
inline void save_checkpoint(const EncoderCheckpoint& ckpt, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ckpt.tokenizer->save_vocab(dir / "vocab.txt");
  ckpt.encoder.to_archive().save(dir / "weights.bin");
  io::json manifest = encoder_config_json(ckpt.config());
  manifest["format"] = "jargon-encoder/1";
  manifest["provenance"] = to_string(ckpt.provenance);
  manifest["tokenizer"] = ckpt.tokenizer->kind();
  manifest["weights_sha256"] = ckpt.encoder.weights_digest();
  io::write_json(dir / "manifest.json", manifest);
}

inline EncoderCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw UnreadableInput("no checkpoint directory at " + dir.string());
  const auto manifest = io::read_json(dir / "manifest.json");
  EncoderCheckpoint ckpt;
  try {
    ckpt.tokenizer = make_tokenizer(manifest.at("tokenizer").get<std::string>(), load_vocab(dir / "vocab.txt"));
    ckpt.provenance = parse_provenance(manifest.at("provenance").get<std::string>());
    auto cfg = encoder_config_from_json(manifest);
    if (static_cast<std::size_t>(cfg.vocab_size) != ckpt.tokenizer->vocab_size()) {
      throw CheckpointError("vocab size differs from vocab.txt");
    }
    ckpt.encoder = Encoder(cfg);
  } catch (const io::json::exception& e) {
    throw CheckpointError(std::string("bad manifest: ") + e.what());
  }
  ckpt.encoder.load_archive(TensorArchive::load(dir / "weights.bin"));
  return ckpt;
}

}  // namespace jargon
