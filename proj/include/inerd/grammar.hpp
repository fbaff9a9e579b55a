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

// The entity-string grammar as an incremental state machine.
//
// After the combine token the model must emit zero or more blocks
//
//   <type label tokens> tau <contiguous span of the sentence> epsilon
//
// followed by end-of-sequence. DecoderState tracks where in a block the
// sequence currently is; allowed_tokens() returns the exact set of tokens
// that keep the sequence inside the language, and advance() consumes one.
//
//   Boundary        after kappa or epsilon: a type label may start, or EOS.
//   TypePartial     inside a label; the trie node says which tokens may
//                   follow. tau is allowed once a full label has been read.
//   ContentStart    after tau: any token of the sentence.
//   ContentPartial  inside the content: the successor of every sentence
//                   position consistent with the content so far, or epsilon.
//
// Labels may span several tokens; a prefix trie generalizes the
// single-token case without changing it.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "inerd/error.hpp"
#include "inerd/vocab.hpp"

namespace inerd {

// Registered entity-type labels compiled into a prefix trie over their token
// sequences. Immutable and shareable.
class EntityTypeSet {
 public:
  struct Node {
    std::map<TokenId, std::size_t> children;  // ordered for stable masks
    std::optional<std::size_t> label;         // set on accepting nodes
  };

  static constexpr std::size_t kRoot = 0;

  EntityTypeSet(std::vector<std::string> labels, std::vector<TokenSeq> tokens,
                const Vocabulary& vocab)
      : labels_(std::move(labels)), label_tokens_(std::move(tokens)) {
    if (labels_.empty()) {
      throw Error(ErrorCode::kEmptyLabel,
                  "at least one entity type label is required");
    }
    if (labels_.size() != label_tokens_.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "labels and token sequences differ in length");
    }
    nodes_.emplace_back();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) {
        throw Error(ErrorCode::kEmptyLabel, "empty label string");
      }
      if (!by_name_.emplace(labels_[i], i).second) {
        throw Error(ErrorCode::kDuplicateLabel, labels_[i]);
      }
      const TokenSeq& seq = label_tokens_[i];
      if (seq.empty()) {
        throw Error(ErrorCode::kEmptyLabel,
                    "label '" + labels_[i] + "' has no tokens");
      }
      std::size_t cur = kRoot;
      for (TokenId t : seq) {
        if (!vocab.contains(t)) {
          throw Error(ErrorCode::kUnknownToken,
                      "label '" + labels_[i] + "' uses token id " +
                          std::to_string(t));
        }
        if (vocab.is_marker(t)) {
          throw Error(ErrorCode::kMarkerCollision,
                      "label '" + labels_[i] + "' contains a marker token");
        }
        auto it = nodes_[cur].children.find(t);
        if (it == nodes_[cur].children.end()) {
          nodes_.emplace_back();
          it = nodes_[cur].children.emplace(t, nodes_.size() - 1).first;
        }
        cur = it->second;
      }
      if (nodes_[cur].label) {
        throw Error(ErrorCode::kDuplicateLabel,
                    "labels '" + labels_[*nodes_[cur].label] + "' and '" +
                        labels_[i] + "' tokenize identically");
      }
      nodes_[cur].label = i;
    }
    // A label whose accepting node has children is a strict prefix of
    // another label.
    for (const Node& n : nodes_) {
      if (n.label && !n.children.empty()) {
        warnings_.push_back({WarningKind::kPrefixAmbiguity, labels_[*n.label]});
      }
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const TokenSeq& label_tokens(std::size_t i) const {
    return label_tokens_.at(i);
  }
  const std::vector<Warning>& warnings() const noexcept { return warnings_; }

  const Node& node(std::size_t index) const { return nodes_.at(index); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::optional<std::size_t> find_label(std::string_view label) const {
    auto it = by_name_.find(std::string(label));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  const TokenSeq& tokens_of(std::string_view label) const {
    if (auto i = find_label(label)) return label_tokens_[*i];
    throw Error(ErrorCode::kUnknownTypeLabel, std::string(label));
  }

  // Label whose token sequence is exactly `seq`, if any.
  std::optional<std::size_t> match(std::span<const TokenId> seq) const {
    std::size_t cur = kRoot;
    for (TokenId t : seq) {
      auto it = nodes_[cur].children.find(t);
      if (it == nodes_[cur].children.end()) return std::nullopt;
      cur = it->second;
    }
    return nodes_[cur].label;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<TokenSeq> label_tokens_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<Node> nodes_;
  std::vector<Warning> warnings_;
};

// Labels are tokenized with the engine's tokenizer and stay ordinary tokens.
inline EntityTypeSet compile_types(const std::vector<std::string>& labels,
                                   const Tokenizer& tokenizer,
                                   const Vocabulary& vocab) {
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyLabel,
                "at least one entity type label is required");
  }
  std::vector<TokenSeq> tokens;
  tokens.reserve(labels.size());
  for (const auto& label : labels) tokens.push_back(tokenizer.encode(label));
  return EntityTypeSet(labels, std::move(tokens), vocab);
}

namespace phase {
struct Boundary {
  friend bool operator==(const Boundary&, const Boundary&) = default;
};
struct TypePartial {
  std::size_t node;
  friend bool operator==(const TypePartial&, const TypePartial&) = default;
};
struct ContentStart {
  friend bool operator==(const ContentStart&, const ContentStart&) = default;
};
// Each position is one past the last matched sentence token; sorted.
struct ContentPartial {
  std::vector<std::size_t> positions;
  friend bool operator==(const ContentPartial&,
                         const ContentPartial&) = default;
};
struct Terminal {
  friend bool operator==(const Terminal&, const Terminal&) = default;
};
}  // namespace phase

using Phase = std::variant<phase::Boundary, phase::TypePartial,
                           phase::ContentStart, phase::ContentPartial,
                           phase::Terminal>;

// Grammar state of one sequence being generated. A plain value: copy it to
// fork, never share one across concurrent decodes.
class DecoderState {
 public:
  const TokenSeq& sentence() const noexcept { return sentence_; }
  const Phase& phase() const noexcept { return phase_; }
  const TokenSeq& emitted() const noexcept { return emitted_; }

 private:
  friend DecoderState new_session(TokenSeq, const EntityTypeSet&,
                                  const Vocabulary&);
  friend DecoderState advance(const DecoderState&, TokenId,
                              const EntityTypeSet&, const Vocabulary&);

  TokenSeq sentence_;
  Phase phase_ = phase::Boundary{};
  TokenSeq emitted_;
};

// Sorted, duplicate-free token ids.
class AllowedSet {
 public:
  AllowedSet() = default;
  explicit AllowedSet(std::vector<TokenId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  bool contains(TokenId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<TokenId>& ids() const noexcept { return ids_; }

  friend bool operator==(const AllowedSet&, const AllowedSet&) = default;

 private:
  std::vector<TokenId> ids_;
};

inline void check_no_markers(std::span<const TokenId> sentence,
                             const Vocabulary& vocab) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (vocab.is_marker(sentence[i])) {
      throw Error(ErrorCode::kMarkerInSentence,
                  "marker token '" + vocab.token(sentence[i]) +
                      "' at sentence position " + std::to_string(i));
    }
    if (!vocab.contains(sentence[i])) {
      throw Error(ErrorCode::kUnknownToken,
                  "token id " + std::to_string(sentence[i]) +
                      " at sentence position " + std::to_string(i));
    }
  }
}

inline DecoderState new_session(TokenSeq sentence, const EntityTypeSet& types,
                                const Vocabulary& vocab) {
  (void)types;
  if (sentence.empty()) {
    throw Error(ErrorCode::kEmptySentence, "cannot decode an empty sentence");
  }
  check_no_markers(sentence, vocab);
  DecoderState state;
  state.sentence_ = std::move(sentence);
  return state;
}

inline bool is_terminal(const DecoderState& state) noexcept {
  return std::holds_alternative<phase::Terminal>(state.phase());
}

inline AllowedSet allowed_tokens(const DecoderState& state,
                                 const EntityTypeSet& types,
                                 const Vocabulary& vocab) {
  const TokenSeq& sentence = state.sentence();
  std::vector<TokenId> ids;
  std::visit(
      [&](const auto& ph) {
        using P = std::decay_t<decltype(ph)>;
        if constexpr (std::is_same_v<P, phase::Boundary>) {
          for (const auto& [tok, child] :
               types.node(EntityTypeSet::kRoot).children) {
            ids.push_back(tok);
          }
          ids.push_back(vocab.eos());
        } else if constexpr (std::is_same_v<P, phase::TypePartial>) {
          const auto& node = types.node(ph.node);
          for (const auto& [tok, child] : node.children) ids.push_back(tok);
          if (node.label) ids.push_back(vocab.tau());
        } else if constexpr (std::is_same_v<P, phase::ContentStart>) {
          ids.assign(sentence.begin(), sentence.end());
        } else if constexpr (std::is_same_v<P, phase::ContentPartial>) {
          for (std::size_t p : ph.positions) {
            if (p < sentence.size()) ids.push_back(sentence[p]);
          }
          ids.push_back(vocab.epsilon());
        }
        // Terminal: nothing may follow.
      },
      state.phase());
  return AllowedSet(std::move(ids));
}

inline DecoderState advance(const DecoderState& state, TokenId token,
                            const EntityTypeSet& types,
                            const Vocabulary& vocab) {
  const auto disallowed = [&] {
    std::string name = vocab.contains(token) ? vocab.token(token)
                                             : std::to_string(token);
    return Error(ErrorCode::kDisallowedToken,
                 "token '" + name + "' after " +
                     std::to_string(state.emitted().size()) +
                     " emitted tokens");
  };
  const TokenSeq& sentence = state.sentence();
  DecoderState next = state;
  std::visit(
      [&](const auto& ph) {
        using P = std::decay_t<decltype(ph)>;
        if constexpr (std::is_same_v<P, phase::Boundary>) {
          if (token == vocab.eos()) {
            next.phase_ = phase::Terminal{};
            return;
          }
          const auto& root = types.node(EntityTypeSet::kRoot);
          auto it = root.children.find(token);
          if (it == root.children.end()) throw disallowed();
          next.phase_ = phase::TypePartial{it->second};
        } else if constexpr (std::is_same_v<P, phase::TypePartial>) {
          const auto& node = types.node(ph.node);
          if (token == vocab.tau() && node.label) {
            next.phase_ = phase::ContentStart{};
            return;
          }
          auto it = node.children.find(token);
          if (it == node.children.end()) throw disallowed();
          next.phase_ = phase::TypePartial{it->second};
        } else if constexpr (std::is_same_v<P, phase::ContentStart>) {
          std::vector<std::size_t> positions;
          for (std::size_t p = 0; p < sentence.size(); ++p) {
            if (sentence[p] == token) positions.push_back(p + 1);
          }
          if (positions.empty() || vocab.is_marker(token)) throw disallowed();
          next.phase_ = phase::ContentPartial{std::move(positions)};
        } else if constexpr (std::is_same_v<P, phase::ContentPartial>) {
          if (token == vocab.epsilon()) {
            next.phase_ = phase::Boundary{};
            return;
          }
          std::vector<std::size_t> positions;
          for (std::size_t p : ph.positions) {
            if (p < sentence.size() && sentence[p] == token) {
              positions.push_back(p + 1);
            }
          }
          if (positions.empty()) throw disallowed();
          next.phase_ = phase::ContentPartial{std::move(positions)};
        } else {
          throw disallowed();
        }
      },
      state.phase());
  next.emitted_.push_back(token);
  return next;
}

// Value written over disallowed entries: the lowest finite score, so masking
// works for probabilities and logits alike.
template <std::floating_point T>
constexpr T mask_sentinel() noexcept {
  return std::numeric_limits<T>::lowest();
}

template <std::floating_point T>
void apply_mask_in_place(std::span<T> scores, const AllowedSet& allowed) {
  if (allowed.empty()) {
    throw Error(ErrorCode::kEmptyAllowedSet, "nothing left to select");
  }
  if (static_cast<std::size_t>(allowed.ids().back()) >= scores.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "score vector of size " + std::to_string(scores.size()) +
                    " does not cover token id " +
                    std::to_string(allowed.ids().back()));
  }
  auto next = allowed.ids().begin();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (next != allowed.ids().end() && static_cast<std::size_t>(*next) == i) {
      ++next;
    } else {
      scores[i] = mask_sentinel<T>();
    }
  }
}

template <std::floating_point T>
std::vector<T> apply_mask(std::span<const T> scores,
                          const AllowedSet& allowed) {
  std::vector<T> out(scores.begin(), scores.end());
  apply_mask_in_place(std::span<T>(out), allowed);
  return out;
}

namespace detail {
// NaN ranks below every number.
template <std::floating_point T>
bool ranks_above(T candidate, T best) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(best)) return true;
  return candidate > best;
}
}  // namespace detail

// Index of the highest score; ties go to the lowest id.
template <std::floating_point T>
TokenId argmax(std::span<const T> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "argmax of an empty vector");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (detail::ranks_above(scores[i], scores[best])) best = i;
  }
  return static_cast<TokenId>(best);
}

// Highest-scoring member of `allowed`, lowest id on ties. Agrees with
// argmax(apply_mask(scores, allowed)) whenever some allowed score exceeds
// the sentinel, and stays inside `allowed` when none does.
template <std::floating_point T>
TokenId masked_argmax(std::span<const T> scores, const AllowedSet& allowed) {
  if (allowed.empty()) {
    throw Error(ErrorCode::kEmptyAllowedSet, "nothing left to select");
  }
  TokenId best = allowed.ids().front();
  for (TokenId id : allowed.ids()) {
    const auto i = static_cast<std::size_t>(id);
    if (i >= scores.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "score vector does not cover token id " + std::to_string(id));
    }
    if (detail::ranks_above(scores[i], scores[static_cast<std::size_t>(best)])) {
      best = id;
    }
  }
  return best;
}

}  // namespace inerd
