#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/error.hpp"
#include "jargon/rng.hpp"
#include "jargon/supervision.hpp"
#include "jargon/text.hpp"

namespace jargon {

struct Word2VecParams {
  int min_count = 10;
  int vector_size = 100;
  int window = 10;
  int epochs = 10;
  int negative = 5;
  double alpha = 0.025;
  double min_alpha = 0.0001;
  double sample = 1e-3;
  int neighbors_per_seed = 25;
  std::uint64_t seed = 1;
};

/// CBOW word embeddings trained with negative sampling, single-threaded so a
/// fixed seed gives identical vectors.
class Word2Vec {
 public:
  using Table = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Word2Vec(std::span<const SentenceRecord> store, const Word2VecParams& params) : params_(params) {
    if (store.empty()) throw EmptyStore("word2vec needs sentences");
    if (params.vector_size <= 0 || params.window <= 0 || params.epochs < 0 || params.negative < 0) {
      throw ConfigError("invalid word2vec parameters");
    }
    build_vocab(store);
    train(store);
  }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  Eigen::VectorXf vector(const std::string& word) const { return syn0_.row(index_.at(word)).transpose(); }

  double similarity(const std::string& a, const std::string& b) const {
    return static_cast<double>(normalized_.row(index_.at(a)).dot(normalized_.row(index_.at(b))));
  }

  /// Top-n words by cosine similarity, excluding the query word itself.
  std::vector<std::pair<std::string, double>> most_similar(const std::string& word, std::size_t topn) const {
    const auto q = index_.at(word);
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (i == q) continue;
      out.emplace_back(words_[i], static_cast<double>(normalized_.row(static_cast<Eigen::Index>(i)).dot(normalized_.row(q))));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (out.size() > topn) out.resize(topn);
    return out;
  }

 private:
  void build_vocab(std::span<const SentenceRecord> store) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& s : store) {
      for (const auto& w : s.words) {
        if (text::has_letter(w) || text::is_alnum_word(w)) ++counts[text::to_lower(w)];
      }
    }
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [w, c] : counts) {
      if (c >= static_cast<std::uint64_t>(params_.min_count)) kept.emplace_back(w, c);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [w, c] : kept) {
      index_[w] = words_.size();
      words_.push_back(w);
      counts_.push_back(c);
      total_ += c;
    }
    // Unigram^0.75 cumulative distribution for negative draws.
    double acc = 0.0;
    for (auto c : counts_) {
      acc += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(acc);
    }
  }

  std::size_t draw_negative(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) - cumulative_.begin());
  }

  void train(std::span<const SentenceRecord> store) {
    const auto v = static_cast<Eigen::Index>(words_.size());
    const int dim = params_.vector_size;
    syn0_ = Table(v, dim);
    syn1_ = Table::Zero(v, dim);
    Rng init(params_.seed, "w2v-init");
    for (Eigen::Index i = 0; i < syn0_.size(); ++i) {
      syn0_.data()[i] = static_cast<float>((init.uniform() - 0.5) / dim);
    }
    if (v > 0 && params_.epochs > 0) {
      const double total_words = static_cast<double>(total_) * params_.epochs;
      double processed = 0.0;
      Rng rng(params_.seed, "w2v-train");
      Eigen::VectorXf h(dim), err(dim);
      std::vector<std::size_t> sent;
      for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        for (const auto& s : store) {
          sent.clear();
          for (const auto& w : s.words) {
            auto it = index_.find(text::to_lower(w));
            if (it == index_.end()) continue;
            processed += 1.0;
            if (params_.sample > 0) {
              const double f = static_cast<double>(counts_[it->second]);
              const double thr = params_.sample * static_cast<double>(total_);
              const double keep = (std::sqrt(f / thr) + 1.0) * thr / f;
              if (keep < rng.uniform()) continue;
            }
            sent.push_back(it->second);
          }
          const double alpha = std::max(params_.min_alpha, params_.alpha * (1.0 - processed / (total_words + 1.0)));
          for (std::size_t pos = 0; pos < sent.size(); ++pos) {
            const int shrink = static_cast<int>(rng.below(static_cast<std::uint64_t>(params_.window)));
            const int reach = params_.window - shrink;
            h.setZero();
            int cw = 0;
            for (int off = -reach; off <= reach; ++off) {
              const auto c = static_cast<long>(pos) + off;
              if (off == 0 || c < 0 || c >= static_cast<long>(sent.size())) continue;
              h += syn0_.row(static_cast<Eigen::Index>(sent[static_cast<std::size_t>(c)])).transpose();
              ++cw;
            }
            if (cw == 0) continue;
            h /= static_cast<float>(cw);
            err.setZero();
            for (int d = 0; d <= params_.negative; ++d) {
              std::size_t target;
              float label;
              if (d == 0) {
                target = sent[pos];
                label = 1.0f;
              } else {
                target = draw_negative(rng);
                if (target == sent[pos]) continue;
                label = 0.0f;
              }
              auto out_row = syn1_.row(static_cast<Eigen::Index>(target));
              const float f = 1.0f / (1.0f + std::exp(-out_row.dot(h.transpose())));
              const float g = (label - f) * static_cast<float>(alpha);
              err += g * out_row.transpose();
              out_row += g * h.transpose();
            }
            for (int off = -reach; off <= reach; ++off) {
              const auto c = static_cast<long>(pos) + off;
              if (off == 0 || c < 0 || c >= static_cast<long>(sent.size())) continue;
              syn0_.row(static_cast<Eigen::Index>(sent[static_cast<std::size_t>(c)])) += err.transpose();
            }
          }
        }
      }
    }
    normalized_ = syn0_;
    for (Eigen::Index i = 0; i < normalized_.rows(); ++i) {
      const float n = normalized_.row(i).norm();
      if (n > 0) normalized_.row(i) /= n;
    }
  }

  Word2VecParams params_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> cumulative_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_ = 0;
  Table syn0_, syn1_, normalized_;
};

struct Word2VecBaselineResult {
  std::vector<std::pair<std::string, double>> words;  // ranked by best similarity to any seed
  std::vector<std::string> skipped_seeds;             // not in vocabulary (multi-word or below min_count)
};

/// Union of each seed's nearest neighbors, ranked by the best similarity to
/// any seed, seeds excluded.
inline Word2VecBaselineResult baseline_word2vec(std::span<const SentenceRecord> store, const SeedTermList& seeds,
                                                const Word2VecParams& params = {}) {
  if (store.empty()) throw EmptyStore("word2vec baseline needs sentences");
  const Word2Vec model(store, params);
  Word2VecBaselineResult result;
  std::map<std::string, double> best;
  for (const auto& seed : seeds.terms()) {
    if (!model.contains(seed)) {
      result.skipped_seeds.push_back(seed);
      continue;
    }
    for (const auto& [w, sim] : model.most_similar(seed, static_cast<std::size_t>(params.neighbors_per_seed))) {
      if (seeds.contains(w)) continue;
      auto [it, inserted] = best.emplace(w, sim);
      if (!inserted) it->second = std::max(it->second, sim);
    }
  }
  result.words.assign(best.begin(), best.end());
  std::sort(result.words.begin(), result.words.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return result;
}

}  // namespace jargon
