#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jargon/error.hpp"
#include "jargon/io.hpp"
#include "jargon/text.hpp"

namespace jargon {

enum class PosTag { Noun, ProperNoun, Verb, Adj, Adv, Pron, Det, Adp, Conj, Part, Num, Punct, Other };

inline bool is_noun(PosTag t) { return t == PosTag::Noun || t == PosTag::ProperNoun; }

/// Maps a Penn Treebank or Universal tag string to PosTag.
inline PosTag parse_pos_tag(std::string_view tag) {
  const std::string t(tag);
  if (t.rfind("NNP", 0) == 0 || t == "PROPN") return PosTag::ProperNoun;
  if (t.rfind("NN", 0) == 0 || t == "NOUN") return PosTag::Noun;
  if (t.rfind("VB", 0) == 0 || t == "MD" || t == "VERB" || t == "AUX") return PosTag::Verb;
  if (t.rfind("JJ", 0) == 0 || t == "ADJ") return PosTag::Adj;
  if (t.rfind("RB", 0) == 0 || t == "WRB" || t == "ADV") return PosTag::Adv;
  if (t.rfind("PRP", 0) == 0 || t == "WP" || t == "WP$" || t == "PRON") return PosTag::Pron;
  if (t == "DT" || t == "PDT" || t == "WDT" || t == "DET") return PosTag::Det;
  if (t == "IN" || t == "ADP") return PosTag::Adp;
  if (t == "CC" || t == "CONJ" || t == "CCONJ" || t == "SCONJ") return PosTag::Conj;
  if (t == "TO" || t == "RP" || t == "POS" || t == "PART") return PosTag::Part;
  if (t == "CD" || t == "NUM") return PosTag::Num;
  if (t == "." || t == "," || t == ":" || t == "PUNCT") return PosTag::Punct;
  return PosTag::Other;
}

/// Pluggable part-of-speech tagger. Implementations must be deterministic
/// and safe to call concurrently.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<PosTag> tag(std::span<const std::string> words) const = 0;
};

/// Deterministic tagger: closed-class and common-word lexicon, then suffix
/// rules, then default to noun. Meant for hermetic tests and synthetic data.
class StubTagger : public PosTagger {
 public:
  StubTagger() {
    auto add_all = [&](PosTag t, std::initializer_list<std::string_view> words) {
      for (auto w : words) lexicon_[std::string(w)] = t;
    };
    add_all(PosTag::Det, {"a", "an", "the", "this", "that", "these", "those", "some", "any", "every", "each", "no",
                          "all", "both", "another", "much", "many", "more", "most", "few", "several", "what",
                          "which", "whatever", "enough"});
    add_all(PosTag::Pron, {"i", "me", "my", "mine", "myself", "you", "your", "yours", "he", "him", "his", "she",
                           "her", "hers", "it", "its", "we", "us", "our", "ours", "they", "them", "their",
                           "theirs", "who", "whom", "whose", "someone", "anyone", "everyone", "nobody",
                           "something", "anything", "everything", "nothing", "one", "yourself", "themselves",
                           "i'm", "i've", "i'd", "i'll", "it's", "you're", "we're", "they're", "that's"});
    add_all(PosTag::Adp, {"of", "in", "on", "at", "by", "for", "with", "about", "from", "into", "onto", "over",
                          "under", "after", "before", "during", "without", "through", "between", "around",
                          "against", "near", "like", "since", "until", "up", "down", "off", "out", "per", "via",
                          "across", "behind", "inside", "outside", "than", "along"});
    add_all(PosTag::Conj, {"and", "or", "but", "so", "because", "if", "while", "although", "though", "when",
                           "where", "whether", "unless", "nor", "yet", "then", "once"});
    add_all(PosTag::Part, {"to", "not", "n't", "'s", "'re", "'ve", "'ll", "'d", "'m"});
    add_all(PosTag::Verb,
            {"be", "is", "am", "are", "was", "were", "been", "being", "have", "has", "had", "do", "does", "did",
             "done", "can", "could", "will", "would", "shall", "should", "may", "might", "must", "can't", "don't",
             "didn't", "won't", "isn't", "wasn't", "doesn't", "get", "got", "gets", "go", "went", "goes", "gone",
             "take", "took", "takes", "taken", "make", "made", "makes", "buy", "bought", "buys", "sell", "sold",
             "sells", "try", "tried", "tries", "use", "snort", "snorted", "smoke", "smoked", "smokes", "feel", "felt",
             "feels", "mix", "say", "said", "says", "see", "saw", "seen", "know", "knew", "think", "thought",
             "want", "wanted", "need", "needed", "like", "liked", "love", "loved", "hit", "hits", "keep", "kept",
             "keeps", "put", "let", "come", "came", "comes", "give", "gave", "gives", "find", "found", "look",
             "looked", "looks", "grow", "grew", "grows", "last", "lasted", "lasts", "play", "played", "plays",
             "build", "built", "builds", "cook", "cooked", "cooks", "bake", "baked", "bakes", "eat", "ate", "eats",
             "drink", "drank", "drinks", "melt", "melted", "melts", "cut", "cuts", "fell", "falls", "fall",
             "pick", "picked", "order", "ordered", "dose", "dosed", "drop", "dropped", "rolled", "roll",
             "called", "call", "asked", "ask", "help", "helped", "helps", "read", "wrote", "write", "shipped",
             "arrived", "arrive", "spent", "spend", "pay", "paid", "bring", "brought", "brings", "share",
             "shared", "shares", "covered", "cover", "covers", "mowed", "mow", "planted", "plant", "watched",
             "watch", "ran", "run", "runs", "walked", "walk", "started", "start", "stayed", "stay", "tasted",
             "taste", "tastes", "kicked", "kick", "kicks", "landed", "shovel", "shoveled", "sprinkle",
             "sprinkled", "hand", "handed", "wrap", "wrapped", "sent", "send", "measured", "weighed", "fixed",
             "fix", "visited", "visit", "cleaned", "painted", "paint", "crushed", "crush", "hide", "hid",
             "stash", "stashed", "score", "scored", "cop", "copped", "ruined", "ruin", "lost", "lose"});
    add_all(PosTag::Adj,
            {"good", "bad", "great", "best", "better", "worse", "worst", "new", "old", "big", "small", "little",
             "long", "short", "high", "low", "pure", "clean", "strong", "weak", "cheap", "expensive", "fresh",
             "cold", "hot", "warm", "white", "green", "brown", "blue", "red", "sweet", "first", "last", "next",
             "other", "same", "whole", "nice", "real", "fake", "super", "quick", "slow", "hard", "easy", "heavy",
             "light", "full", "empty", "dirty", "local", "late", "early", "sure", "happy", "sad", "tired",
             "sick", "ready", "safe", "dangerous", "legit", "crazy", "insane", "amazing", "huge", "tiny",
             "thick", "deep", "wet", "dry", "soft", "crispy", "delicious", "beautiful", "quiet", "loud",
             "favorite", "entire", "second", "third", "single", "half", "extra", "whole"});
    add_all(PosTag::Adv, {"very", "really", "too", "also", "just", "still", "already", "again", "never", "ever",
                          "always", "often", "sometimes", "now", "here", "there", "today", "tonight",
                          "yesterday", "tomorrow", "soon", "almost", "only", "even", "back", "away", "together",
                          "pretty", "quite", "maybe", "probably", "definitely", "how", "why", "well", "instead",
                          "ago", "outside", "finally", "later", "twice"});
    add_all(PosTag::Num, {"two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "hundred",
                          "thousand", "dozen"});
  }

  /// Overrides or extends the lexicon.
  void set(std::string_view word, PosTag tag) { lexicon_[text::to_lower(word)] = tag; }

  PosTag tag_word(std::string_view word) const {
    const std::string w = text::to_lower(word);
    if (w.empty()) return PosTag::Other;
    if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
    if (!text::has_letter(w)) {
      bool digits = std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c) || c == '.' || c == ','; });
      if (digits && std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); })) return PosTag::Num;
      return PosTag::Punct;
    }
    auto ends = [&](std::string_view suf) { return w.size() > suf.size() + 2 && w.ends_with(suf); };
    if (ends("ly")) return PosTag::Adv;
    if (ends("ing") || ends("ed") || ends("ize") || ends("ise")) return PosTag::Verb;
    if (ends("ous") || ends("ful") || ends("ive") || ends("able") || ends("ible") || ends("less") || ends("ical"))
      return PosTag::Adj;
    return PosTag::Noun;
  }

  std::vector<PosTag> tag(std::span<const std::string> words) const override {
    std::vector<PosTag> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(tag_word(w));
    return out;
  }

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
};

/// Adapter for an external tagger's output: a tab-separated "word<TAB>TAG"
/// dictionary (Penn or Universal tags), falling back to StubTagger rules for
/// words it does not cover.
class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(const std::filesystem::path& path) {
    io::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw MalformedRecord(path.string() + " line " + std::to_string(line_no) + ": expected word<TAB>tag");
      }
      fallback_.set(line.substr(0, tab), parse_pos_tag(text::trim(line.substr(tab + 1))));
    });
  }

  std::vector<PosTag> tag(std::span<const std::string> words) const override { return fallback_.tag(words); }

 private:
  StubTagger fallback_;
};

}  // namespace jargon
