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

#include "inerd/c_api.h"

#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace inerd {
namespace {

constexpr int kOk = 0;

int code(ErrorCode c) { return static_cast<int>(c); }

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir("c_api");
    vocab_path_ = (dir_ / "vocab.txt").string();
    save_vocabulary(vocab_path_, w_.vocab);
  }

  inerd_session open(const TokenSeq& sentence) {
    inerd_session s = -1;
    EXPECT_EQ(inerd_open_session(sentence.data(), sentence.size(), labels_.data(),
                                 labels_.size(), vocab_path_.c_str(), &s),
              kOk)
        << inerd_last_error();
    return s;
  }

  std::vector<int32_t> allowed(inerd_session s) {
    size_t count = 0;
    EXPECT_EQ(inerd_allowed_tokens(s, nullptr, 0, &count), kOk);
    std::vector<int32_t> ids(count);
    EXPECT_EQ(inerd_allowed_tokens(s, ids.data(), ids.size(), &count), kOk);
    return ids;
  }

  testing::WorkedExample w_ = testing::make_worked_example();
  std::vector<const char*> labels_ = {"Organisation", "Location"};
  std::filesystem::path dir_;
  std::string vocab_path_;
};

TEST_F(CApiTest, DecodesTheWorkedExample) {
  const inerd_session s = open(w_.sentence);
  size_t n = 0;
  ASSERT_EQ(inerd_vocab_size(s, &n), kOk);
  ASSERT_EQ(n, w_.vocab.size());

  TokenSeq target = whitespace_tokenize(testing::kWorkedEntityString, w_.vocab);
  target.push_back(w_.vocab.eos());
  for (std::size_t i = 0; i < target.size(); ++i) {
    // Uniform scores plus a bump on the target token.
    std::vector<float> scores(n, 0.25f);
    scores[static_cast<std::size_t>(target[i])] = 0.9f;
    ASSERT_EQ(inerd_process_scores(s, scores.data(), n, scores.data()), kOk);
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (scores[k] > scores[best]) best = k;
    }
    ASSERT_EQ(static_cast<int32_t>(best), target[i]);
    int terminal = -1;
    ASSERT_EQ(inerd_commit_token(s, target[i], &terminal), kOk);
    EXPECT_EQ(terminal, i + 1 == target.size() ? 1 : 0);
  }
  EXPECT_EQ(inerd_close_session(s), kOk);
}

TEST_F(CApiTest, Errors) {
  inerd_session s = -1;
  const TokenSeq with_marker = {0, w_.vocab.kappa()};
  EXPECT_EQ(inerd_open_session(with_marker.data(), with_marker.size(), labels_.data(),
                               labels_.size(), vocab_path_.c_str(), &s),
            code(ErrorCode::kMarkerInSentence));
  EXPECT_NE(std::string(inerd_last_error()).find("MarkerInSentence"), std::string::npos);
  EXPECT_EQ(inerd_open_session(w_.sentence.data(), w_.sentence.size(), nullptr, 0,
                               vocab_path_.c_str(), &s),
            code(ErrorCode::kEmptyLabel));
  EXPECT_EQ(inerd_open_session(w_.sentence.data(), 0, labels_.data(), labels_.size(),
                               vocab_path_.c_str(), &s),
            code(ErrorCode::kEmptySentence));
  EXPECT_EQ(inerd_open_session(w_.sentence.data(), w_.sentence.size(), labels_.data(),
                               labels_.size(), (dir_ / "nope.txt").c_str(), &s),
            code(ErrorCode::kIoFailure));
  const char* unknown[] = {"Person"};
  EXPECT_EQ(inerd_open_session(w_.sentence.data(), w_.sentence.size(), unknown, 1,
                               vocab_path_.c_str(), &s),
            code(ErrorCode::kUnknownToken));

  s = open(w_.sentence);
  std::vector<float> scores(w_.vocab.size() - 1, 0.0f);
  EXPECT_EQ(inerd_process_scores(s, scores.data(), scores.size(), scores.data()),
            code(ErrorCode::kLengthMismatch));
  int terminal = 0;
  EXPECT_EQ(inerd_commit_token(s, w_.vocab.epsilon(), &terminal),
            code(ErrorCode::kDisallowedToken));
  EXPECT_EQ(inerd_close_session(s), kOk);
  EXPECT_EQ(inerd_close_session(s), code(ErrorCode::kClosedHandle));
  EXPECT_EQ(inerd_commit_token(s, w_.vocab.eos(), &terminal),
            code(ErrorCode::kClosedHandle));
  EXPECT_EQ(inerd_commit_token(12345, w_.vocab.eos(), &terminal),
            code(ErrorCode::kClosedHandle));
}

TEST_F(CApiTest, AdvanceExamples) {
  const auto s = open(w_.sentence);
  EXPECT_EQ(allowed(s), (std::vector<int32_t>{w_.vocab.id("Organisation"),
                                              w_.vocab.id("Location"), w_.vocab.eos()}));
  int terminal = 0;
  ASSERT_EQ(inerd_commit_token(s, w_.vocab.id("Location"), &terminal), kOk);
  EXPECT_EQ(allowed(s), (std::vector<int32_t>{w_.vocab.tau()}));
  ASSERT_EQ(inerd_commit_token(s, w_.vocab.tau(), &terminal), kOk);
  EXPECT_EQ(allowed(s).size(), 9u);
  ASSERT_EQ(inerd_commit_token(s, w_.vocab.id("German"), &terminal), kOk);
  EXPECT_EQ(allowed(s), (std::vector<int32_t>{w_.vocab.id("call"), w_.vocab.epsilon()}));
  // A short buffer still reports the full count.
  int32_t one = -1;
  size_t count = 0;
  EXPECT_EQ(inerd_allowed_tokens(s, &one, 1, &count), kOk);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(one, w_.vocab.id("call"));
  inerd_close_session(s);
}

// The boundary reproduces the engine's own mask on random states and scores,
// and masking twice changes nothing.
TEST_F(CApiTest, MatchesEngineMask) {
  std::uint64_t rng = 5;
  const std::size_t n = w_.vocab.size();
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = open(w_.sentence);
    auto state = new_session(w_.sentence, w_.types, w_.vocab);
    const std::size_t depth = bounded_draw(rng, 12);
    for (std::size_t d = 0; d < depth && !is_terminal(state); ++d) {
      const auto ids = allowed_tokens(state, w_.types, w_.vocab).ids();
      const TokenId t = ids[bounded_draw(rng, ids.size())];
      state = advance(state, t, w_.types, w_.vocab);
      int terminal = 0;
      ASSERT_EQ(inerd_commit_token(s, t, &terminal), kOk);
    }
    if (is_terminal(state)) {
      inerd_close_session(s);
      continue;
    }
    std::vector<float> scores(n);
    for (auto& x : scores) x = static_cast<float>(unit_double(splitmix64(rng)) * 4 - 2);
    const auto expected = apply_mask(std::span<const float>(scores),
                                     allowed_tokens(state, w_.types, w_.vocab));
    std::vector<float> out(n);
    ASSERT_EQ(inerd_process_scores(s, scores.data(), n, out.data()), kOk);
    ASSERT_EQ(out, expected);
    std::vector<float> again(n);
    ASSERT_EQ(inerd_process_scores(s, out.data(), n, again.data()), kOk);
    ASSERT_EQ(again, out);
    ASSERT_EQ(inerd_close_session(s), kOk);
  }
}

TEST_F(CApiTest, IndependentHandlesAcrossThreads) {
  std::vector<std::jthread> threads;
  std::vector<int> failures(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        inerd_session s = -1;
        if (inerd_open_session(w_.sentence.data(), w_.sentence.size(), labels_.data(),
                               labels_.size(), vocab_path_.c_str(), &s) != kOk) {
          ++failures[t];
          continue;
        }
        int terminal = 0;
        if (inerd_commit_token(s, w_.vocab.eos(), &terminal) != kOk || terminal != 1) {
          ++failures[t];
        }
        inerd_close_session(s);
      }
    });
  }
  threads.clear();
  EXPECT_EQ(failures, std::vector<int>(4, 0));
}

}  // namespace
}  // namespace inerd
