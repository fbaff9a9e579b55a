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

#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inerd/encoding.hpp"
#include "inerd/error.hpp"
#include "inerd/grammar.hpp"
#include "inerd/vocab.hpp"

namespace inerd {

// Produces one score per vocabulary entry for the next token given the full
// prefix (sentence, kappa, and everything generated so far). The decode loop
// calls it from a single thread; sharing one scorer between concurrent
// decodes requires score() to be thread-safe.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(std::span<const TokenId> prefix) = 0;
};

struct DecodeResult {
  std::vector<Entity> entities;
  TokenSeq raw_tokens;  // everything emitted after kappa, EOS included
  std::size_t steps = 0;
  bool truncated = false;
  std::vector<Warning> warnings;
  std::size_t hallucinations = 0;  // only nonzero for unconstrained decoding

  friend bool operator==(const DecodeResult&, const DecodeResult&) = default;
};

inline std::size_t default_max_steps(std::size_t sentence_len) {
  return 4 * sentence_len + 16;
}

namespace detail {

inline std::vector<double> call_scorer(Scorer& scorer,
                                       std::span<const TokenId> prefix,
                                       std::size_t vocab_size,
                                       std::size_t step) {
  std::vector<double> scores;
  try {
    scores = scorer.score(prefix);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kScorerError,
                "step " + std::to_string(step) + ": " + e.what());
  }
  if (scores.size() != vocab_size) {
    throw Error(ErrorCode::kScorerError,
                "step " + std::to_string(step) + ": expected " +
                    std::to_string(vocab_size) + " scores, got " +
                    std::to_string(scores.size()));
  }
  return scores;
}

}  // namespace detail

// Greedy decoding under the grammar mask: score, mask, take the best allowed
// token (lowest id on ties), advance, until EOS or `max_steps` tokens.
inline DecodeResult greedy_decode(Scorer& scorer,
                                  std::span<const TokenId> sentence,
                                  const EntityTypeSet& types,
                                  const Vocabulary& vocab,
                                  std::optional<std::size_t> max_steps = {}) {
  const std::size_t budget = max_steps.value_or(default_max_steps(sentence.size()));
  DecoderState state =
      new_session(TokenSeq(sentence.begin(), sentence.end()), types, vocab);
  TokenSeq prefix = inference_prefix(sentence, vocab);

  DecodeResult result;
  while (!is_terminal(state) && result.steps < budget) {
    auto scores = detail::call_scorer(scorer, prefix, vocab.size(), result.steps);
    const AllowedSet allowed = allowed_tokens(state, types, vocab);
    apply_mask_in_place(std::span<double>(scores), allowed);
    const TokenId next = masked_argmax(std::span<const double>(scores), allowed);
    state = advance(state, next, types, vocab);
    prefix.push_back(next);
    ++result.steps;
  }
  result.raw_tokens = state.emitted();
  result.truncated = !is_terminal(state);
  auto parsed = parse_entity_string(result.raw_tokens, sentence, vocab, types,
                                    ParseMode::kStrict);
  result.entities = std::move(parsed.entities);
  result.warnings = std::move(parsed.warnings);
  return result;
}

// The same loop with no mask. Output is parsed leniently; dropped chunks are
// counted as hallucinations.
inline DecodeResult unconstrained_decode(
    Scorer& scorer, std::span<const TokenId> sentence,
    const EntityTypeSet& types, const Vocabulary& vocab,
    std::optional<std::size_t> max_steps = {}) {
  const std::size_t budget = max_steps.value_or(default_max_steps(sentence.size()));
  if (sentence.empty()) {
    throw Error(ErrorCode::kEmptySentence, "cannot decode an empty sentence");
  }
  TokenSeq prefix = inference_prefix(sentence, vocab);

  DecodeResult result;
  bool ended = false;
  while (!ended && result.steps < budget) {
    auto scores = detail::call_scorer(scorer, prefix, vocab.size(), result.steps);
    const TokenId next = argmax(std::span<const double>(scores));
    prefix.push_back(next);
    result.raw_tokens.push_back(next);
    ++result.steps;
    ended = next == vocab.eos();
  }
  result.truncated = !ended;
  auto parsed = parse_entity_string(result.raw_tokens, sentence, vocab, types,
                                    ParseMode::kLenient);
  result.entities = std::move(parsed.entities);
  result.hallucinations = parsed.hallucinations();
  result.warnings = std::move(parsed.warnings);
  return result;
}

// True when `tokens` can be produced by the grammar from a fresh session,
// i.e. every token would have been allowed at its step.
inline bool is_grammar_prefix(std::span<const TokenId> tokens,
                              std::span<const TokenId> sentence,
                              const EntityTypeSet& types,
                              const Vocabulary& vocab) {
  DecoderState state =
      new_session(TokenSeq(sentence.begin(), sentence.end()), types, vocab);
  for (TokenId t : tokens) {
    if (!allowed_tokens(state, types, vocab).contains(t)) return false;
    state = advance(state, t, types, vocab);
  }
  return true;
}

}  // namespace inerd
