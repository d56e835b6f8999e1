#include "support.hpp"

using namespace jt;

namespace {

WordPieceTokenizer wordpiece() {
  auto v = reserved_tokens();
  for (const char* t : {"i", "love", "ket", "##amine", "crystal", "me", "##th", "rocks", "un", "##believ", "##able"}) {
    v.push_back(t);
  }
  return WordPieceTokenizer(v);
}

std::vector<std::string> tokens(const SubwordTokenizer& tok, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(tok.token(id));
  return out;
}

}  // namespace

TEST(Tokenizer, RequiresReservedTokens) {
  EXPECT_THROW(WordLevelTokenizer(std::vector<std::string>{"[PAD]", "[UNK]", "a"}), ConfigError);
  auto v = reserved_tokens();
  v.push_back("[PAD]");
  EXPECT_THROW(WordLevelTokenizer(std::vector<std::string>(v)), ConfigError);
}

TEST(Tokenizer, WordLevelBuildOrdersByCountThenWord) {
  const std::vector<std::vector<std::string>> s = {{"b", "a", "c"}, {"a", "B"}, {"c"}};
  const auto tok = WordLevelTokenizer::build(s);
  const auto& v = tok.vocab();
  ASSERT_EQ(v.size(), reserved_tokens().size() + 3);
  EXPECT_EQ(v[5], "a");
  EXPECT_EQ(v[6], "b");
  EXPECT_EQ(v[7], "c");
  EXPECT_EQ(tok.encode_word("zzz"), std::vector<int>{tok.unk_id()});
  EXPECT_EQ(tok.encode_word("A"), std::vector<int>{5});
}

TEST(Tokenizer, WordLevelMinCount) {
  const std::vector<std::vector<std::string>> s = {{"a", "a", "b"}};
  EXPECT_EQ(WordLevelTokenizer::build(s, 2).vocab_size(), reserved_tokens().size() + 1);
}

TEST(Tokenizer, WordPieceGreedyLongestMatch) {
  const auto tok = wordpiece();
  EXPECT_EQ(tokens(tok, tok.encode_word("ketamine")), (std::vector<std::string>{"ket", "##amine"}));
  EXPECT_EQ(tokens(tok, tok.encode_word("Unbelievable")), (std::vector<std::string>{"un", "##believ", "##able"}));
  EXPECT_EQ(tok.encode_word("qqq"), std::vector<int>{tok.unk_id()});
}

// Every word maps to a non-empty contiguous span and the spans partition
// the subword sequence.
TEST(Tokenizer, AlignmentPartitionsSubwords) {
  const auto tok = wordpiece();
  const auto w = words("i love ketamine unbelievable crystal meth xyz");
  const auto a = tok.align(w);
  ASSERT_EQ(a.word_spans.size(), w.size());
  int cursor = 0;
  for (const auto& s : a.word_spans) {
    EXPECT_EQ(s.begin, cursor);
    EXPECT_GT(s.size(), 0);
    cursor = s.end;
  }
  EXPECT_EQ(cursor, static_cast<int>(a.ids.size()));
  EXPECT_EQ(tok.count_subwords(w), a.ids.size());
}

TEST(Tokenizer, VocabRoundTrip) {
  TempDir dir("vocab");
  const auto tok = wordpiece();
  tok.save_vocab(dir / "vocab.txt");
  const auto back = make_tokenizer("wordpiece", load_vocab(dir / "vocab.txt"));
  EXPECT_EQ(back->vocab(), tok.vocab());
  EXPECT_EQ(back->kind(), "wordpiece");
  EXPECT_THROW(make_tokenizer("bpe", tok.vocab()), ConfigError);
}

TEST(MaskTarget, ReplacesTargetWithSingleMask) {
  const auto tok = wordpiece();
  const auto w = words("i love ketamine");
  const auto ids = mask_target(w, {2, 3}, tok);
  EXPECT_EQ(tokens(tok, ids), (std::vector<std::string>{"[CLS]", "i", "love", "[MASK]", "[SEP]"}));
}

// Alignment oracle: none of the target's subwords survive, one mask stands in
// for the whole multi-word span.
TEST(MaskTarget, MultiWordSpanLeavesNoTargetSubwords) {
  const auto tok = wordpiece();
  const auto w = words("crystal meth rocks");
  const auto ids = mask_target(w, {0, 2}, tok);
  const auto full = tok.align(w);
  std::vector<int> target_ids(full.ids.begin() + full.word_spans[0].begin, full.ids.begin() + full.word_spans[1].end);
  for (int t : target_ids) EXPECT_EQ(std::count(ids.begin(), ids.end(), t), 0) << tok.token(t);
  EXPECT_EQ(std::count(ids.begin(), ids.end(), tok.mask_id()), 1);
  EXPECT_EQ(tokens(tok, ids), (std::vector<std::string>{"[CLS]", "[MASK]", "rocks", "[SEP]"}));
}

TEST(MaskTarget, SentenceStartSpan) {
  const auto tok = wordpiece();
  const auto ids = mask_target(words("ketamine rocks"), {0, 1}, tok);
  EXPECT_EQ(ids[1], tok.mask_id());
}

TEST(MaskTarget, RejectsBadSpans) {
  const auto tok = wordpiece();
  const auto w = words("i love ketamine");
  EXPECT_THROW(mask_target(w, {2, 2}, tok), SpanOutOfRange);
  EXPECT_THROW(mask_target(w, {-1, 1}, tok), SpanOutOfRange);
  EXPECT_THROW(mask_target(w, {2, 4}, tok), SpanOutOfRange);
}
