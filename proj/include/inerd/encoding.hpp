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

// Serialization of (sentence, entities) into the generation target
//
//   sentence kappa (label tau content epsilon)* EOS
//
// and the inverse parse, plus IOB tag conversion.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "inerd/error.hpp"
#include "inerd/grammar.hpp"
#include "inerd/vocab.hpp"

namespace inerd {

// Half-open token range [start, end) of a sentence.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Entity {
  std::string type;
  Span span;

  friend auto operator<=>(const Entity&, const Entity&) = default;
};

inline bool by_position(const Entity& a, const Entity& b) {
  return std::tie(a.span.start, a.span.end, a.type) <
         std::tie(b.span.start, b.span.end, b.type);
}

// An entity as it appears in a generated string: no position, only the
// type label and the content tokens.
struct SurfaceEntity {
  std::string type;
  TokenSeq content;

  friend auto operator<=>(const SurfaceEntity&, const SurfaceEntity&) = default;
};

inline SurfaceEntity surface_of(const Entity& entity,
                                std::span<const TokenId> sentence) {
  return {entity.type,
          TokenSeq(sentence.begin() + static_cast<std::ptrdiff_t>(entity.span.start),
                   sentence.begin() + static_cast<std::ptrdiff_t>(entity.span.end))};
}

inline std::vector<SurfaceEntity> surfaces_of(
    std::span<const Entity> entities, std::span<const TokenId> sentence) {
  std::vector<SurfaceEntity> out;
  out.reserve(entities.size());
  for (const auto& e : entities) out.push_back(surface_of(e, sentence));
  return out;
}

// input_ids[kappa_position] is the only kappa; everything after it is the
// entity string, closed by EOS. Training loss covers the tokens after kappa.
struct EncodedExample {
  TokenSeq input_ids;
  std::size_t kappa_position = 0;

  std::span<const TokenId> sentence() const {
    return std::span<const TokenId>(input_ids).first(kappa_position);
  }
  std::span<const TokenId> entity_string() const {
    return std::span<const TokenId>(input_ids).subspan(kappa_position + 1);
  }

  friend bool operator==(const EncodedExample&,
                         const EncodedExample&) = default;
};

inline void check_span(const Span& span, std::size_t sentence_len) {
  if (span.start >= span.end || span.end > sentence_len) {
    throw Error(ErrorCode::kInvalidSpan,
                "[" + std::to_string(span.start) + ", " +
                    std::to_string(span.end) + ") in a sentence of length " +
                    std::to_string(sentence_len));
  }
}

inline TokenSeq inference_prefix(std::span<const TokenId> sentence,
                                 const Vocabulary& vocab) {
  check_no_markers(sentence, vocab);
  TokenSeq out(sentence.begin(), sentence.end());
  out.push_back(vocab.kappa());
  return out;
}

// Entities are written in (start, end, label) order.
inline EncodedExample encode_example(std::span<const TokenId> sentence,
                                     std::vector<Entity> entities,
                                     const Vocabulary& vocab,
                                     const EntityTypeSet& types) {
  check_no_markers(sentence, vocab);
  for (const auto& e : entities) {
    check_span(e.span, sentence.size());
    if (!types.find_label(e.type)) {
      throw Error(ErrorCode::kUnknownTypeLabel, e.type);
    }
  }
  std::sort(entities.begin(), entities.end(), by_position);
  EncodedExample ex;
  ex.input_ids.assign(sentence.begin(), sentence.end());
  ex.kappa_position = ex.input_ids.size();
  ex.input_ids.push_back(vocab.kappa());
  for (const auto& e : entities) {
    const TokenSeq& label = types.tokens_of(e.type);
    ex.input_ids.insert(ex.input_ids.end(), label.begin(), label.end());
    ex.input_ids.push_back(vocab.tau());
    ex.input_ids.insert(ex.input_ids.end(),
                        sentence.begin() + static_cast<std::ptrdiff_t>(e.span.start),
                        sentence.begin() + static_cast<std::ptrdiff_t>(e.span.end));
    ex.input_ids.push_back(vocab.epsilon());
  }
  ex.input_ids.push_back(vocab.eos());
  return ex;
}

// Start indices of every occurrence of `needle` in `haystack`.
inline std::vector<std::size_t> find_occurrences(
    std::span<const TokenId> haystack, std::span<const TokenId> needle) {
  std::vector<std::size_t> starts;
  if (needle.empty() || needle.size() > haystack.size()) return starts;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() +
                                                     static_cast<std::ptrdiff_t>(i))) {
      starts.push_back(i);
    }
  }
  return starts;
}

enum class ParseMode {
  kStrict,   // malformed chunks throw
  kLenient,  // malformed chunks are dropped and reported as warnings
};

struct ParseResult {
  std::vector<Entity> entities;  // generation order
  std::vector<Warning> warnings;

  // Chunks dropped because they could not have come from the grammar:
  // malformed, unknown type, or content absent from the sentence.
  std::size_t hallucinations() const {
    return static_cast<std::size_t>(
        std::count_if(warnings.begin(), warnings.end(), [](const Warning& w) {
          return w.kind == WarningKind::kMalformedChunk ||
                 w.kind == WarningKind::kUnknownType ||
                 w.kind == WarningKind::kContentNotInSentence;
        }));
  }
};

// `generated` is everything after kappa; a final EOS is optional. Positions
// are recovered by matching content against the sentence: each entity takes
// the leftmost occurrence not yet taken by an earlier identical entity, and
// falls back to the leftmost overall (with a DuplicateSurplus warning).
inline ParseResult parse_entity_string(std::span<const TokenId> generated,
                                       std::span<const TokenId> sentence,
                                       const Vocabulary& vocab,
                                       const EntityTypeSet& types,
                                       ParseMode mode = ParseMode::kStrict) {
  ParseResult result;
  bool has_eos = false;
  if (!generated.empty() && generated.back() == vocab.eos()) {
    has_eos = true;
    generated = generated.first(generated.size() - 1);
  }

  const auto reject = [&](ErrorCode code, WarningKind kind,
                          std::string detail) {
    if (mode == ParseMode::kStrict) throw Error(code, detail);
    result.warnings.push_back({kind, std::move(detail)});
  };

  std::map<std::pair<std::size_t, TokenSeq>, std::set<std::size_t>> taken;
  std::size_t chunk_index = 0;

  const auto handle_chunk = [&](std::span<const TokenId> chunk) {
    const std::string where = "chunk " + std::to_string(chunk_index++);
    std::size_t tau_count = 0;
    std::size_t tau_at = 0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const TokenId t = chunk[i];
      if (t == vocab.tau()) {
        ++tau_count;
        tau_at = i;
      } else if (vocab.is_marker(t)) {
        reject(ErrorCode::kMalformedChunk, WarningKind::kMalformedChunk,
               where + ": stray marker '" + vocab.token(t) + "'");
        return;
      }
    }
    if (tau_count != 1) {
      reject(ErrorCode::kMalformedChunk, WarningKind::kMalformedChunk,
             where + ": expected exactly one type-content separator, found " +
                 std::to_string(tau_count));
      return;
    }
    auto type_part = chunk.first(tau_at);
    auto content = chunk.subspan(tau_at + 1);
    if (type_part.empty() || content.empty()) {
      reject(ErrorCode::kMalformedChunk, WarningKind::kMalformedChunk,
             where + ": empty type or content");
      return;
    }
    auto label = types.match(type_part);
    if (!label) {
      reject(ErrorCode::kUnknownTypeLabel, WarningKind::kUnknownType,
             where + ": '" + join_tokens(type_part, vocab) +
                 "' is not a registered type");
      return;
    }
    auto occurrences = find_occurrences(sentence, content);
    if (occurrences.empty()) {
      reject(ErrorCode::kContentNotInSentence,
             WarningKind::kContentNotInSentence,
             where + ": '" + join_tokens(content, vocab) +
                 "' does not occur in the sentence");
      return;
    }
    auto& used = taken[{*label, TokenSeq(content.begin(), content.end())}];
    std::size_t start = occurrences.front();
    auto fresh = std::find_if(occurrences.begin(), occurrences.end(),
                              [&](std::size_t s) { return !used.count(s); });
    if (fresh != occurrences.end()) {
      start = *fresh;
    } else {
      result.warnings.push_back(
          {WarningKind::kDuplicateSurplus,
           where + ": '" + join_tokens(content, vocab) +
               "' generated more often than it occurs"});
    }
    used.insert(start);
    result.entities.push_back(
        {types.labels()[*label], Span{start, start + content.size()}});
  };

  std::size_t chunk_start = 0;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    if (generated[i] == vocab.epsilon()) {
      handle_chunk(generated.subspan(chunk_start, i - chunk_start));
      chunk_start = i + 1;
    }
  }
  if (chunk_start < generated.size()) {
    auto tail = generated.subspan(chunk_start);
    if (has_eos) {
      reject(ErrorCode::kMalformedChunk, WarningKind::kMalformedChunk,
             "end of sequence inside an entity: '" +
                 join_tokens(tail, vocab) + "'");
    } else {
      result.warnings.push_back(
          {WarningKind::kTruncatedEntity, join_tokens(tail, vocab)});
    }
  }
  return result;
}

// One tag per token: "O", "B-<label>" or "I-<label>".
using IobTagSequence = std::vector<std::string>;

struct IobResult {
  std::vector<Entity> entities;
  std::vector<Warning> warnings;
};

namespace detail {
struct ParsedTag {
  char prefix;  // 'O', 'B' or 'I'
  std::string_view label;
};

inline ParsedTag parse_tag(std::string_view tag, std::size_t index) {
  if (tag == "O") return {'O', {}};
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    return {tag[0], tag.substr(2)};
  }
  throw Error(ErrorCode::kInvalidTag,
              "'" + std::string(tag) + "' at position " + std::to_string(index));
}
}  // namespace detail

// Maximal B/I runs become spans. An I- tag that does not continue a run of
// the same label opens a new span and is reported as RepairedTag.
inline IobResult iob_to_entities(const IobTagSequence& tags) {
  IobResult result;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto tag = detail::parse_tag(tags[i], i);
    if (tag.prefix == 'O') {
      open = false;
      continue;
    }
    if (tag.prefix == 'I' && open && result.entities.back().type == tag.label) {
      result.entities.back().span.end = i + 1;
      continue;
    }
    if (tag.prefix == 'I') {
      result.warnings.push_back(
          {WarningKind::kRepairedTag,
           "orphan " + tags[i] + " at position " + std::to_string(i)});
    }
    result.entities.push_back({std::string(tag.label), Span{i, i + 1}});
    open = true;
  }
  return result;
}

inline IobTagSequence entities_to_iob(std::vector<Entity> entities,
                                      std::size_t sentence_len) {
  IobTagSequence tags(sentence_len, "O");
  std::sort(entities.begin(), entities.end(), by_position);
  std::size_t covered_until = 0;
  for (const auto& e : entities) {
    check_span(e.span, sentence_len);
    if (e.span.start < covered_until) {
      throw Error(ErrorCode::kOverlappingSpans,
                  e.type + " at [" + std::to_string(e.span.start) + ", " +
                      std::to_string(e.span.end) + ")");
    }
    tags[e.span.start] = "B-" + e.type;
    for (std::size_t i = e.span.start + 1; i < e.span.end; ++i) {
      tags[i] = "I-" + e.type;
    }
    covered_until = e.span.end;
  }
  return tags;
}

// JSON-lines record: {"input_ids": [...], "kappa_position": k, "text": "..."}
inline nlohmann::json to_json(const EncodedExample& ex,
                              const Vocabulary& vocab) {
  return nlohmann::json{{"input_ids", ex.input_ids},
                        {"kappa_position", ex.kappa_position},
                        {"text", join_tokens(ex.input_ids, vocab)}};
}

inline EncodedExample encoded_example_from_json(const nlohmann::json& j,
                                                const Vocabulary& vocab) {
  EncodedExample ex;
  try {
    ex.input_ids = j.at("input_ids").get<TokenSeq>();
    ex.kappa_position = j.at("kappa_position").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (ex.kappa_position >= ex.input_ids.size() ||
      ex.input_ids[ex.kappa_position] != vocab.kappa()) {
    throw Error(ErrorCode::kParseError,
                "kappa_position does not point at the combine token");
  }
  if (std::count(ex.input_ids.begin(), ex.input_ids.end(), vocab.kappa()) != 1) {
    throw Error(ErrorCode::kParseError, "combine token must occur exactly once");
  }
  for (TokenId t : ex.input_ids) {
    if (!vocab.contains(t)) {
      throw Error(ErrorCode::kParseError,
                  "token id out of range: " + std::to_string(t));
    }
  }
  return ex;
}

}  // namespace inerd
