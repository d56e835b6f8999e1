#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jargon/corpus.hpp"
#include "jargon/evaluate.hpp"
#include "jargon/pos_tagger.hpp"
#include "jargon/rng.hpp"
#include "jargon/text.hpp"

namespace jargon::synthetic {

/// Word inventory of the synthetic drug-forum domain.
///
/// Drug slots are filled with nonce "pseudo-drug" names. 38 of them are
/// plain seeds; 16 are pseudo-jargon, of which 8 are also seeds and 8 are
/// held out. Four held-out words are euphemisms that also fill benign
/// material slots ("snow on the road").
struct Lexicon {
  std::vector<std::string> seeds;          // 46 terms: plain seeds + seen jargon
  std::vector<std::string> seen_jargon;    // 8, subset of seeds
  std::vector<std::string> unseen_jargon;  // 8, disjoint from seeds
  std::vector<std::string> euphemisms;     // 4, subset of unseen_jargon
};

inline std::vector<std::string> nonce_words(std::size_t n) {
  static const char* kOnsets[] = {"zor", "quen", "vex", "dral", "kesh", "mox", "plib", "trel", "gorv", "snib",
                                  "yarl", "crin", "fenz", "wob", "thaz", "brum", "klem", "nux", "prav", "sorb"};
  static const char* kCodas[] = {"ax", "ip", "un", "ob", "et", "ar", "oz", "ik", "um", "eth"};
  StubTagger tagger;
  std::vector<std::string> out;
  for (const char* coda : kCodas) {
    for (const char* onset : kOnsets) {
      std::string w = std::string(onset) + coda;
      if (is_noun(tagger.tag_word(w))) out.push_back(w);
      if (out.size() == n) return out;
    }
  }
  return out;
}

inline Lexicon default_lexicon() {
  Lexicon lex;
  auto nonce = nonce_words(50);
  lex.seeds.assign(nonce.begin(), nonce.begin() + 38);
  lex.seen_jargon.assign(nonce.begin() + 38, nonce.begin() + 46);
  lex.seeds.insert(lex.seeds.end(), lex.seen_jargon.begin(), lex.seen_jargon.end());
  lex.unseen_jargon.assign(nonce.begin() + 46, nonce.begin() + 50);
  lex.euphemisms = {"snow", "ice", "grass", "candy"};
  lex.unseen_jargon.insert(lex.unseen_jargon.end(), lex.euphemisms.begin(), lex.euphemisms.end());
  return lex;
}

// Slots: D drug, P person, L place, T time, O object, M benign material.
inline const std::vector<std::string_view>& drug_templates() {
  static const std::vector<std::string_view> k = {
      "I bought some D from my P last T.",
      "My P and I tried D at the L last T.",
      "The D was super clean and the buzz lasted for hours.",
      "How much D should I take for my first trip?",
      "I have been using D every T for a year now.",
      "Never mix D with alcohol because it hits your heart hard.",
      "My P got caught with a bag of D at the L.",
      "Does anyone know a good plug for D near the L?",
      "I snorted a fat line of D in the bathroom at the L.",
      "After two days on D I could not sleep at all.",
      "The comedown from D was brutal and my jaw hurt.",
      "Is it safe to dose D twice in one T?",
      "My tolerance to D went up fast after a month.",
      "Got a gram of D for forty bucks from my P.",
      "Tested my D with a reagent kit and it was legit.",
      "I smoked D with my P behind the L yesterday.",
  };
  return k;
}

inline const std::vector<std::string_view>& material_templates() {
  static const std::vector<std::string_view> k = {
      "The kids played in the M all afternoon at the L.",
      "We cleaned the M off the porch before my P arrived.",
      "There was so much M on the road this T.",
      "I love the smell of M in the early morning.",
      "The store on the corner sells M and fresh bread.",
      "My P covered the garden with M last T.",
  };
  return k;
}

inline const std::vector<std::string_view>& everyday_templates() {
  static const std::vector<std::string_view> k = {
      "My P fixed the O in the kitchen last T.",
      "We watched a movie at the L with my P.",
      "I ordered a new O online and it arrived today.",
      "The O in my car stopped working this T.",
      "I searched the internet and found nothing too helpful.",
      "My P wants to paint the O blue this T.",
      "We walked the dog around the L after dinner.",
      "She baked a cake for her P on his birthday.",
      "The teacher asked us to read the book before class.",
      "I spent the whole T cleaning my O and the garage.",
  };
  return k;
}

inline const std::vector<std::string>& persons() {
  static const std::vector<std::string> k = {"friend", "buddy", "roommate", "cousin", "brother",
                                             "sister", "coworker", "neighbor", "boyfriend", "girlfriend"};
  return k;
}
inline const std::vector<std::string>& places() {
  static const std::vector<std::string> k = {"party", "club", "park", "festival", "concert",
                                             "beach", "school", "office", "station", "gym"};
  return k;
}
inline const std::vector<std::string>& times() {
  static const std::vector<std::string> k = {"night", "weekend", "morning", "evening", "week", "month", "summer"};
  return k;
}
inline const std::vector<std::string>& objects() {
  static const std::vector<std::string> k = {"fridge", "laptop", "phone", "door", "table",
                                             "window", "engine", "printer", "bike", "couch"};
  return k;
}
inline const std::vector<std::string>& materials() {
  static const std::vector<std::string> k = {"sand", "water", "mud", "leaves", "flowers", "gravel", "straw", "salt"};
  return k;
}

struct Options {
  std::size_t documents = 1000;
  double drug_doc_fraction = 0.4;
  double unseen_drug_prob = 0.15;  // drug slot gets a held-out word instead of a seed
  double euphemism_prob = 0.35;    // material slot gets a euphemism
  double noise_prob = 0.1;         // inject markup / non-ASCII / short filler sentences
  std::uint64_t seed = 7;
};

enum class SlotKind { None, Drug, Material };

/// One generated sentence with the filler in its slot.
struct GeneratedSentence {
  std::string text;
  std::vector<std::string> words;  // as the corpus pipeline tokenizes `text`
  SlotKind kind = SlotKind::None;
  int slot = -1;                   // word index of the drug/material filler
  std::string filler;
};

namespace detail {

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

inline std::string_view pick_view(const std::vector<std::string_view>& v, Rng& rng) { return v[rng.below(v.size())]; }

}  // namespace detail

/// Fills a template. `slot_filler` replaces the D or M slot.
inline GeneratedSentence fill_template(std::string_view tmpl, SlotKind kind, const std::string& slot_filler, Rng& rng) {
  GeneratedSentence g;
  g.kind = kind;
  g.filler = slot_filler;
  std::vector<std::string> tokens;
  for (auto tok : text::split_whitespace(tmpl)) {
    // Split trailing punctuation so slot letters can be recognized.
    std::string tail;
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) {
      tail.insert(tail.begin(), tok.back());
      tok.pop_back();
    }
    std::string word = tok;
    if (tok == "D" || tok == "M") {
      word = slot_filler;
    } else if (tok == "P") {
      word = detail::pick(persons(), rng);
    } else if (tok == "L") {
      word = detail::pick(places(), rng);
    } else if (tok == "T") {
      word = detail::pick(times(), rng);
    } else if (tok == "O") {
      word = detail::pick(objects(), rng);
    }
    tokens.push_back(word + tail);
  }
  g.text = text::join(tokens);
  g.words = tokenize_words(clean_sentence(g.text));
  if (kind != SlotKind::None) {
    // The slot is the k-th whitespace token; count word tokens before it.
    std::size_t k = 0;
    for (auto tok : text::split_whitespace(tmpl)) {
      while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) tok.pop_back();
      if (tok == "D" || tok == "M") break;
      ++k;
    }
    g.slot = static_cast<int>(k);  // template tokens before the slot carry no leading punctuation
  }
  return g;
}

class Generator {
 public:
  explicit Generator(Options opt, Lexicon lex = default_lexicon()) : opt_(opt), lex_(std::move(lex)) {}

  const Lexicon& lexicon() const { return lex_; }
  const Options& options() const { return opt_; }

  GeneratedSentence drug_sentence(Rng& rng) const {
    const bool unseen = rng.bernoulli(opt_.unseen_drug_prob);
    const std::string& filler = unseen ? detail::pick(lex_.unseen_jargon, rng) : detail::pick(lex_.seeds, rng);
    return fill_template(detail::pick_view(drug_templates(), rng), SlotKind::Drug, filler, rng);
  }

  GeneratedSentence material_sentence(Rng& rng) const {
    const bool euph = rng.bernoulli(opt_.euphemism_prob);
    const std::string& filler = euph ? detail::pick(lex_.euphemisms, rng) : detail::pick(materials(), rng);
    return fill_template(detail::pick_view(material_templates(), rng), SlotKind::Material, filler, rng);
  }

  GeneratedSentence everyday_sentence(Rng& rng) const {
    return fill_template(detail::pick_view(everyday_templates(), rng), SlotKind::None, "", rng);
  }

  GeneratedSentence benign_sentence(Rng& rng) const {
    return rng.bernoulli(0.4) ? material_sentence(rng) : everyday_sentence(rng);
  }

  /// Forum-style documents of one to three sentences.
  std::vector<RawDocument> documents() const {
    static const std::vector<std::string_view> kShort = {"lol.", "Thanks man!", "Same here.", "Be safe out there!"};
    static const std::vector<std::string_view> kNoise = {" <br> ", " &amp; ", " \xE2\x98\x83 ", " <i>really</i> "};
    std::vector<RawDocument> out;
    for (std::size_t d = 0; d < opt_.documents; ++d) {
      Rng rng(opt_.seed, "doc:" + std::to_string(d));
      const bool drug = rng.bernoulli(opt_.drug_doc_fraction);
      const std::size_t n = 1 + rng.below(3);
      std::string text;
      for (std::size_t k = 0; k < n; ++k) {
        const auto g = (drug && (k == 0 || rng.bernoulli(0.7))) ? drug_sentence(rng) : benign_sentence(rng);
        if (!text.empty()) text += ' ';
        std::string s = g.text;
        if (rng.bernoulli(opt_.noise_prob)) {
          const auto cut = s.find(' ');
          if (cut != std::string::npos) s.insert(cut, detail::pick_view(kNoise, rng));
        }
        text += s;
      }
      if (rng.bernoulli(opt_.noise_prob)) text += " " + std::string(detail::pick_view(kShort, rng));
      out.push_back({"doc" + std::to_string(d), text, "synthetic"});
    }
    return out;
  }

  /// Held-out annotated sentences with gold jargon positions.
  std::vector<AnnotatedSentence> annotated(std::size_t n, const PosTagger& tagger, std::uint64_t seed) const {
    std::vector<AnnotatedSentence> out;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(seed, "annotated:" + std::to_string(i));
      const double r = rng.uniform();
      const auto g = r < 0.5 ? drug_sentence(rng) : (r < 0.8 ? material_sentence(rng) : everyday_sentence(rng));
      std::vector<int> gold;
      if (g.kind == SlotKind::Drug) gold.push_back(g.slot);
      out.push_back(make_annotated(g.words, gold, tagger));
    }
    return out;
  }

 private:
  Options opt_;
  Lexicon lex_;
};

}  // namespace jargon::synthetic
