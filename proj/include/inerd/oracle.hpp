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

// Deterministic scorers and a brute-force enumeration of the entity-string
// language, for checking the engine without a trained model.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inerd/decode.hpp"
#include "inerd/encoding.hpp"
#include "inerd/error.hpp"
#include "inerd/grammar.hpp"
#include "inerd/random.hpp"
#include "inerd/vocab.hpp"

namespace inerd {

// One-hot on the next gold token while the prefix follows the gold
// sequence, uniform otherwise.
inline std::vector<double> teacher_score(const EncodedExample& target,
                                         std::span<const TokenId> prefix,
                                         const Vocabulary& vocab) {
  const auto& gold = target.input_ids;
  if (prefix.size() < gold.size() &&
      std::equal(prefix.begin(), prefix.end(), gold.begin())) {
    std::vector<double> scores(vocab.size(), 0.0);
    scores[static_cast<std::size_t>(gold[prefix.size()])] = 1.0;
    return scores;
  }
  return std::vector<double>(vocab.size(), 1.0 / static_cast<double>(vocab.size()));
}

class TeacherScorer final : public Scorer {
 public:
  TeacherScorer(EncodedExample target, const Vocabulary& vocab)
      : target_(std::move(target)), vocab_(&vocab) {}

  std::vector<double> score(std::span<const TokenId> prefix) override {
    return teacher_score(target_, prefix, *vocab_);
  }

  const EncodedExample& target() const noexcept { return target_; }

 private:
  EncodedExample target_;
  const Vocabulary* vocab_;
};

// Scores in [0, 1) that depend only on (seed, prefix). score() has no
// mutable state, so one instance may be shared by concurrent decodes.
class RandomScorer final : public Scorer {
 public:
  RandomScorer(std::uint64_t seed, std::size_t vocab_size)
      : seed_(seed), vocab_size_(vocab_size) {}

  std::vector<double> score(std::span<const TokenId> prefix) override {
    std::uint64_t state = seed_;
    std::uint64_t h = splitmix64(state);
    for (TokenId t : prefix) {
      state = h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
      h = splitmix64(state);
    }
    state = h;
    std::vector<double> scores(vocab_size_);
    for (auto& s : scores) s = unit_double(splitmix64(state));
    return scores;
  }

 private:
  std::uint64_t seed_;
  std::size_t vocab_size_;
};

// (1 - w) * random + w * teacher. w = 0 is pure noise, w = 1 the teacher.
class NoisyTeacherScorer final : public Scorer {
 public:
  NoisyTeacherScorer(EncodedExample target, const Vocabulary& vocab,
                     std::uint64_t seed, double teacher_weight)
      : teacher_(std::move(target), vocab),
        noise_(seed, vocab.size()),
        weight_(teacher_weight) {}

  std::vector<double> score(std::span<const TokenId> prefix) override {
    auto scores = noise_.score(prefix);
    if (weight_ == 0.0) return scores;
    const auto gold = teacher_.score(prefix);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = (1.0 - weight_) * scores[i] + weight_ * gold[i];
    }
    return scores;
  }

 private:
  TeacherScorer teacher_;
  RandomScorer noise_;
  double weight_;
};

struct EnumerationLimits {
  std::size_t max_vocab = 20;
  std::size_t max_len = 18;
  std::size_t node_cap = 1'000'000;
};

// Every complete entity string (EOS included) of at most `max_len` tokens.
// Built directly from the block structure, label tau span epsilon, and never
// consults the incremental state machine, so the two can be compared.
inline std::set<TokenSeq> enumerate_valid_strings(
    std::span<const TokenId> sentence, const EntityTypeSet& types,
    const Vocabulary& vocab, std::size_t max_len,
    const EnumerationLimits& limits = {}) {
  if (vocab.size() > limits.max_vocab || max_len > limits.max_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "enumeration is limited to vocabularies of " +
                    std::to_string(limits.max_vocab) + " tokens and strings of " +
                    std::to_string(limits.max_len) + " tokens");
  }
  std::set<TokenSeq> blocks;
  for (std::size_t l = 0; l < types.size(); ++l) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      for (std::size_t j = i + 1; j <= sentence.size(); ++j) {
        TokenSeq block = types.label_tokens(l);
        block.push_back(vocab.tau());
        block.insert(block.end(), sentence.begin() + static_cast<std::ptrdiff_t>(i),
                     sentence.begin() + static_cast<std::ptrdiff_t>(j));
        block.push_back(vocab.epsilon());
        blocks.insert(std::move(block));
      }
    }
  }

  std::set<TokenSeq> out;
  std::size_t nodes = 0;
  TokenSeq current;
  auto extend = [&](auto& self) -> void {
    if (++nodes > limits.node_cap) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "more than " + std::to_string(limits.node_cap) +
                      " search nodes");
    }
    if (current.size() + 1 <= max_len) {
      current.push_back(vocab.eos());
      out.insert(current);
      current.pop_back();
    }
    for (const auto& block : blocks) {
      if (current.size() + block.size() + 1 > max_len) continue;
      current.insert(current.end(), block.begin(), block.end());
      self(self);
      current.resize(current.size() - block.size());
    }
  };
  extend(extend);
  return out;
}

struct SyntheticSpec {
  std::size_t vocab_size = 50;  // markers included
  std::size_t sentence_len = 10;
  std::size_t type_count = 4;
  bool multi_token_labels = false;  // some labels become two tokens
  double entity_rate = 0.3;         // chance an entity starts at a position
};

// A random sentence, label set and gold annotation over words "w0", "w1", ...
// Label i starts with word i, so label words can also occur in sentences.
struct SyntheticInstance {
  Vocabulary vocab;
  EntityTypeSet types;
  TokenSeq sentence;
  std::vector<Entity> gold;
  EncodedExample target;
};

inline SyntheticInstance make_synthetic_instance(std::uint64_t seed,
                                                 const SyntheticSpec& spec) {
  if (spec.vocab_size < 5 || spec.type_count == 0 || spec.sentence_len == 0 ||
      spec.vocab_size - 4 < spec.type_count) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic instance needs a sentence, at least one type, and "
                "more words than types");
  }
  const std::size_t words = spec.vocab_size - 4;
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < words; ++i) tokens.push_back("w" + std::to_string(i));
  Vocabulary vocab = build_vocabulary(tokens);

  std::uint64_t state = seed;
  const bool multi = spec.multi_token_labels && words >= 2 * spec.type_count;
  std::vector<std::string> labels;
  std::vector<TokenSeq> label_tokens;
  for (std::size_t i = 0; i < spec.type_count; ++i) {
    TokenSeq seq{static_cast<TokenId>(i)};
    if (multi && bounded_draw(state, 3) == 0) {
      seq.push_back(static_cast<TokenId>(words - 1 - i));
    }
    labels.push_back(join_tokens(seq, vocab));
    label_tokens.push_back(std::move(seq));
  }
  EntityTypeSet types(labels, label_tokens, vocab);

  TokenSeq sentence(spec.sentence_len);
  for (auto& t : sentence) t = static_cast<TokenId>(bounded_draw(state, words));

  std::vector<Entity> gold;
  const auto rate_cut = static_cast<std::uint64_t>(spec.entity_rate * 1000.0);
  for (std::size_t p = 0; p < sentence.size();) {
    if (bounded_draw(state, 1000) >= rate_cut) {
      ++p;
      continue;
    }
    const std::size_t room = std::min<std::size_t>(3, sentence.size() - p);
    const std::size_t len = 1 + bounded_draw(state, room);
    gold.push_back({labels[bounded_draw(state, labels.size())], Span{p, p + len}});
    p += len;
  }
  EncodedExample target = encode_example(sentence, gold, vocab, types);
  return {std::move(vocab), std::move(types), std::move(sentence),
          std::move(gold), std::move(target)};
}

}  // namespace inerd
