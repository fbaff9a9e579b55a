// Copyright 2026 The inerd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "inerd/vocab.hpp"

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "inerd/random.hpp"

namespace inerd {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

TEST(VocabularyTest, MarkersAreAppended) {
  const auto vocab = build_vocabulary({"EU", "rejects"},
                                      {"<CT>", "<TCS>", "<ES>", "<EOS>"});
  EXPECT_EQ(vocab.size(), 6u);
  EXPECT_EQ(vocab.kappa(), 2);
  EXPECT_EQ(vocab.tau(), 3);
  EXPECT_EQ(vocab.epsilon(), 4);
  EXPECT_EQ(vocab.eos(), 5);
  EXPECT_EQ(vocab.token(vocab.kappa()), "<CT>");
  EXPECT_EQ(vocab.id("rejects"), 1);
  EXPECT_TRUE(vocab.is_marker(5));
  EXPECT_FALSE(vocab.is_marker(0));
}

TEST(VocabularyTest, RejectsDuplicates) {
  EXPECT_EQ(code_of([] { build_vocabulary({"a", "a"}); }),
            ErrorCode::kDuplicateToken);
}

TEST(VocabularyTest, RejectsMarkerCollision) {
  EXPECT_EQ(code_of([] { build_vocabulary({"<CT>", "x"}); }),
            ErrorCode::kMarkerCollision);
  EXPECT_EQ(code_of([] { build_vocabulary({"x"}, {"<A>", "<A>", "<B>", "<C>"}); }),
            ErrorCode::kMarkerCollision);
}

TEST(VocabularyTest, RejectsEmptyTokenList) {
  EXPECT_EQ(code_of([] { build_vocabulary({}); }), ErrorCode::kInvalidArgument);
}

TEST(VocabularyTest, ConstructorValidatesMarkerIds) {
  EXPECT_EQ(code_of([] { Vocabulary({"a", "b", "c", "d"}, 0, 1, 2, 9); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Vocabulary({"a", "b", "c", "d"}, 0, 1, 1, 3); }),
            ErrorCode::kMarkerCollision);
}

TEST(WhitespaceTokenizeTest, LooksUpEachWord) {
  const auto vocab = build_vocabulary({"EU", "rejects"});
  EXPECT_EQ(whitespace_tokenize("EU rejects", vocab), (TokenSeq{0, 1}));
  EXPECT_EQ(whitespace_tokenize("  EU\trejects \n", vocab), (TokenSeq{0, 1}));
  EXPECT_TRUE(whitespace_tokenize("", vocab).empty());
}

TEST(WhitespaceTokenizeTest, UnknownWordIsNamed) {
  const auto vocab = build_vocabulary({"EU", "rejects"});
  try {
    whitespace_tokenize("EU zzz", vocab);
    FAIL() << "expected UnknownToken";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownToken);
    EXPECT_NE(std::string(e.what()).find("zzz"), std::string::npos);
  }
}

TEST(VocabularyFileTest, FooterFormatIsExact) {
  const auto vocab = build_vocabulary({"EU", "#kappa=0"});
  std::ostringstream out;
  write_vocabulary(out, vocab);
  EXPECT_EQ(out.str(),
            "EU\n#kappa=0\n<CT>\n<TCS>\n<ES>\n<EOS>\n"
            "#kappa=2\n#tau=3\n#epsilon=4\n#eos=5\n");
  std::istringstream in(out.str());
  const auto back = read_vocabulary(in);
  EXPECT_EQ(back.tokens(), vocab.tokens());
  EXPECT_EQ(back.kappa(), 2);
  EXPECT_EQ(back.eos(), 5);
}

TEST(VocabularyFileTest, MarkersNeedNotBeLast) {
  std::istringstream in("<s>\nhello\n<t>\n<e>\n</s>\n#kappa=0\n#tau=2\n#epsilon=3\n#eos=4\n");
  const auto vocab = read_vocabulary(in);
  EXPECT_EQ(vocab.kappa(), 0);
  EXPECT_EQ(vocab.id("hello"), 1);
}

TEST(VocabularyFileTest, MalformedFooter) {
  std::istringstream short_file("a\n#kappa=0\n");
  EXPECT_EQ(code_of([&] { read_vocabulary(short_file); }), ErrorCode::kParseError);
  std::istringstream bad_id("a\nb\nc\nd\n#kappa=x\n#tau=1\n#epsilon=2\n#eos=3\n");
  EXPECT_EQ(code_of([&] { read_vocabulary(bad_id); }), ErrorCode::kParseError);
}

// decode(encode(words)) is the words joined by single spaces.
TEST(WhitespaceTokenizerProperty, RoundTrip) {
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back("tok" + std::to_string(i));
  const auto vocab = build_vocabulary(words);
  const WhitespaceTokenizer tokenizer(vocab);
  std::uint64_t state = 7;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = bounded_draw(state, 12);
    std::string messy, canonical;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto& w = words[bounded_draw(state, words.size())];
      messy += std::string(1 + bounded_draw(state, 3), bounded_draw(state, 2) ? ' ' : '\t');
      messy += w;
      if (!canonical.empty()) canonical += ' ';
      canonical += w;
    }
    EXPECT_EQ(tokenizer.decode(tokenizer.encode(messy)), canonical);
  }
  for (TokenId m : {vocab.kappa(), vocab.tau(), vocab.epsilon(), vocab.eos()}) {
    EXPECT_GE(m, static_cast<TokenId>(words.size()));
  }
}

}  // namespace
}  // namespace inerd
