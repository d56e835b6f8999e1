#include "support.hpp"

using namespace jt;

namespace {

/// Positional rank oracle: a word's rank is the number of words that beat it
/// under (score desc, f_pred desc, word asc).
std::vector<std::string> oracle_order(const PredictionCounts& counts, int n, int min_occ, int top_k) {
  struct Row {
    std::string word;
    double score;
    std::size_t f;
  };
  std::vector<Row> rows;
  for (const auto& [w, c] : counts) {
    if (c.second == 0 || c.second < static_cast<std::size_t>(min_occ)) continue;
    double r = static_cast<double>(c.first) / static_cast<double>(c.second);
    double s = static_cast<double>(c.first);
    for (int k = 0; k < n; ++k) s *= r;
    rows.push_back({w, s, c.first});
  }
  std::vector<std::string> out(rows.size());
  for (const auto& a : rows) {
    std::size_t rank = 0;
    for (const auto& b : rows) {
      const bool beats = b.score > a.score || (b.score == a.score && b.f > a.f) ||
                         (b.score == a.score && b.f == a.f && b.word < a.word);
      rank += beats ? 1 : 0;
    }
    out[rank] = a.word;
  }
  if (out.size() > static_cast<std::size_t>(top_k)) out.resize(static_cast<std::size_t>(top_k));
  return out;
}

std::vector<std::string> ranked_words(const std::vector<JargonScore>& r) {
  std::vector<std::string> out;
  for (const auto& s : r) out.push_back(s.word);
  return out;
}

}  // namespace

TEST(JargonScore, Examples) {
  EXPECT_DOUBLE_EQ(jargon_score(10, 10.0 / 20.0, 2), 2.5);
  EXPECT_DOUBLE_EQ(jargon_score(10, 0.5, 0), 10.0);
  EXPECT_DOUBLE_EQ(jargon_score(0, 0.0, 2), 0.0);
  EXPECT_DOUBLE_EQ(jargon_score(7, 1.0, 3), 7.0);
}

TEST(RankCounts, ExampleWithDefaultExponent) {
  const PredictionCounts counts = {{"snow", {10, 20}}, {"zorax", {9, 10}}, {"car", {1, 30}}};
  const auto r = rank_counts(counts, {});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].word, "zorax");
  EXPECT_NEAR(r[0].score, 9 * 0.81, 1e-12);
  EXPECT_EQ(r[1].word, "snow");
  EXPECT_NEAR(r[1].score, 2.5, 1e-12);
  EXPECT_NEAR(r[1].r_pred, 0.5, 1e-15);
  EXPECT_EQ(r[1].total, 20u);
}

TEST(RankCounts, ExponentZeroRanksByFrequency) {
  const PredictionCounts counts = {{"a", {3, 100}}, {"b", {5, 5}}, {"c", {4, 4}}, {"d", {6, 600}}};
  ScoreConfig cfg;
  cfg.n = 0;
  EXPECT_EQ(ranked_words(rank_counts(counts, cfg)), (std::vector<std::string>{"d", "b", "c", "a"}));
}

TEST(RankCounts, TieBreaks) {
  ScoreConfig cfg;
  cfg.n = 1;
  // both score 4: 8 * 0.5 and 4 * 1
  const PredictionCounts counts = {{"aaa", {4, 4}}, {"bbb", {8, 16}}, {"ccc", {4, 4}}};
  EXPECT_EQ(ranked_words(rank_counts(counts, cfg)), (std::vector<std::string>{"bbb", "aaa", "ccc"}));
}

TEST(RankCounts, TopKAndMinOccurrences) {
  const PredictionCounts counts = {{"a", {3, 3}}, {"b", {2, 2}}, {"c", {1, 1}}, {"d", {0, 0}}};
  ScoreConfig cfg;
  cfg.top_k = 2;
  EXPECT_EQ(ranked_words(rank_counts(counts, cfg)), (std::vector<std::string>{"a", "b"}));
  cfg.top_k = 100;
  cfg.min_occurrences = 2;
  EXPECT_EQ(ranked_words(rank_counts(counts, cfg)), (std::vector<std::string>{"a", "b"}));
  cfg.top_k = 0;
  EXPECT_TRUE(rank_counts(counts, cfg).empty());
  cfg.n = -1;
  EXPECT_THROW(score_corpus(LookupPredictor{}, toy_store(), cfg, StubTagger{}), ConfigError);
}

TEST(RankCounts, MatchesBruteForceOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    PredictionCounts counts;
    const auto words = 1 + rng.below(25);
    for (std::uint64_t w = 0; w < words; ++w) {
      const auto total = rng.below(6);
      counts["w" + std::to_string(rng.below(40))] = {total == 0 ? 0 : rng.below(total + 1), total};
    }
    ScoreConfig cfg;
    cfg.n = static_cast<int>(rng.below(4));
    cfg.min_occurrences = static_cast<int>(rng.below(3));
    cfg.top_k = static_cast<int>(rng.below(30));
    ASSERT_EQ(ranked_words(rank_counts(counts, cfg)), oracle_order(counts, cfg.n, cfg.min_occurrences, cfg.top_k));
  }
}

TEST(RankCounts, ScoreIsMonotoneInPositives) {
  for (int n : {0, 1, 2, 3}) {
    for (std::size_t total = 1; total <= 30; ++total) {
      double prev = -1.0;
      for (std::size_t f = 0; f <= total; ++f) {
        const double s = jargon_score(f, static_cast<double>(f) / static_cast<double>(total), n);
        EXPECT_GE(s, prev);
        EXPECT_LE(s, static_cast<double>(total));
        prev = s;
      }
    }
  }
}

TEST(ScoreCorpus, CountsEveryCandidateOccurrence) {
  StubTagger tagger;
  std::vector<SentenceRecord> store = {record("a", "the snow fell on the snow and the car"),
                                       record("b", "some zorax in the car"), record("c", "zorax again")};
  const LookupPredictor pred{{{"zorax", 0.9}, {"snow", 0.7}, {"car", 0.2}}, 0.0};

  PredictionCounts expected;
  for (const auto& s : store) {
    for (int i : extract_noun_candidates(s.words, tagger)) {
      auto& c = expected[text::to_lower(s.words[static_cast<std::size_t>(i)])];
      c.first += pred(s.words, {i, i + 1}).p >= 0.5 ? 1 : 0;
      c.second += 1;
    }
  }
  ASSERT_EQ(expected.at("snow").second, 2u);
  const auto r = score_corpus(pred, store, {}, tagger);
  ASSERT_EQ(r.size(), expected.size());
  for (const auto& s : r) {
    EXPECT_EQ(s.f_pred, expected.at(s.word).first) << s.word;
    EXPECT_EQ(s.total, expected.at(s.word).second) << s.word;
  }
  EXPECT_EQ(r[0].word, "snow");
  EXPECT_EQ(r[1].word, "zorax");
}

TEST(ScoreCorpus, InvariantUnderStorePermutation) {
  synthetic::Options opt;
  opt.documents = 60;
  const synthetic::Generator gen(opt);
  std::vector<SentenceRecord> store;
  const WordLevelTokenizer tok(reserved_tokens());
  CorpusStats stats;
  for (const auto& d : gen.documents()) {
    for (auto& s : process_document(d, {}, tok, stats)) store.push_back(std::move(s));
  }
  LookupPredictor pred;
  for (const auto& w : gen.lexicon().seeds) pred.p[w] = 0.8;
  for (const auto& w : gen.lexicon().euphemisms) pred.p[w] = 0.6;
  StubTagger tagger;
  const auto a = serialize_ranking(score_corpus(pred, store, {}, tagger));
  Rng rng(2);
  for (int k = 0; k < 3; ++k) {
    rng.shuffle(store);
    EXPECT_EQ(serialize_ranking(score_corpus(pred, store, {}, tagger)), a);
  }
  EXPECT_THROW(score_corpus(pred, std::vector<SentenceRecord>{}, {}, tagger), EmptyStore);
}

TEST(ScoreCorpus, AgreesWithPerSentenceDetection) {
  const auto store = toy_store();
  const auto b = ModelBundle::from_checkpoint(tiny_checkpoint(store), 5);
  StubTagger tagger;
  FilterConfig loose;
  loose.min_words = 1;
  PredictionCounts counts;
  for (const auto& s : store) {
    for (int i : extract_noun_candidates(s.words, tagger)) {
      const auto p = detect_word(b, s, Span{i, i + 1}, loose);
      EXPECT_EQ(p.sent_id, s.sent_id);
      auto& c = counts[p.word];
      c.first += p.decision ? 1 : 0;
      c.second += 1;
    }
  }
  ScoreConfig cfg;
  cfg.top_k = 1000;
  const auto ranking = score_corpus(BundlePredictor{&b}, store, cfg, tagger);
  EXPECT_EQ(serialize_ranking(ranking), serialize_ranking(rank_counts(counts, cfg)));
}

TEST(Detect, FindWordAndErrors) {
  EXPECT_EQ(find_word(words("I love Crystal Meth a lot"), "crystal meth"), (Span{2, 4}));
  EXPECT_EQ(find_word(words("snow and more snow"), "SNOW"), (Span{0, 1}));
  EXPECT_THROW(find_word(words("no match here"), "snow"), WordNotInSentence);
  EXPECT_THROW(find_word(words("no match here"), "  "), WordNotInSentence);

  const auto b = ModelBundle::from_checkpoint(tiny_checkpoint(toy_store()), 5);
  const auto p = detect_word(b, "I bought some zorax from my dealer last night.", "zorax");
  EXPECT_EQ(p.word, "zorax");
  EXPECT_EQ(p.sent_id, "query");
  const auto direct = predict(b, record("x", "I bought some zorax from my dealer last night.").words, {3, 4});
  EXPECT_EQ(p.p, direct.p);
  EXPECT_THROW(detect_word(b, "I bought some zorax from my dealer.", "snow"), WordNotInSentence);
  EXPECT_THROW(detect_word(b, "zorax here", "zorax"), SentenceRejectedByFilter);
}

TEST(Detect, PredictionJsonFields) {
  auto p = combine(0.8, 0.2, 0.9);
  p.word = "zorax";
  const auto j = to_json(p);
  EXPECT_EQ(j["word"], "zorax");
  EXPECT_EQ(j["decision"], true);
  EXPECT_FALSE(j.contains("sent_id"));
  EXPECT_NEAR(j["p"].get<double>(), 0.74, 1e-12);
}
