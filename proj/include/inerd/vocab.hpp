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
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "inerd/error.hpp"

namespace inerd {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Strings used for the four reserved tokens when a vocabulary is built.
struct MarkerNames {
  std::string kappa = "<CT>";
  std::string tau = "<TCS>";
  std::string epsilon = "<ES>";
  std::string eos = "<EOS>";
};

// Token strings <-> ids, plus the reserved ids of the combine token (kappa),
// the type-content separator (tau), the entity separator (epsilon) and
// end-of-sequence. Immutable once constructed.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> tokens, TokenId kappa, TokenId tau,
             TokenId epsilon, TokenId eos)
      : tokens_(std::move(tokens)),
        kappa_(kappa),
        tau_(tau),
        epsilon_(epsilon),
        eos_(eos) {
    if (tokens_.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary is empty");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].find('\n') != std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument,
                    "token contains a newline at id " + std::to_string(i));
      }
      auto [it, inserted] =
          index_.emplace(tokens_[i], static_cast<TokenId>(i));
      if (!inserted) throw Error(ErrorCode::kDuplicateToken, tokens_[i]);
    }
    const TokenId markers[] = {kappa_, tau_, epsilon_, eos_};
    for (int i = 0; i < 4; ++i) {
      if (!contains(markers[i])) {
        throw Error(ErrorCode::kInvalidArgument,
                    "marker id out of range: " + std::to_string(markers[i]));
      }
      for (int j = 0; j < i; ++j) {
        if (markers[i] == markers[j]) {
          throw Error(ErrorCode::kMarkerCollision,
                      "marker ids must be distinct");
        }
      }
    }
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  bool contains(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }

  const std::string& token(TokenId id) const {
    if (!contains(id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token id out of range: " + std::to_string(id));
    }
    return tokens_[static_cast<std::size_t>(id)];
  }

  std::optional<TokenId> find(std::string_view text) const {
    auto it = index_.find(std::string(text));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  TokenId id(std::string_view text) const {
    if (auto found = find(text)) return *found;
    throw Error(ErrorCode::kUnknownToken, std::string(text));
  }

  TokenId kappa() const noexcept { return kappa_; }
  TokenId tau() const noexcept { return tau_; }
  TokenId epsilon() const noexcept { return epsilon_; }
  TokenId eos() const noexcept { return eos_; }

  bool is_marker(TokenId id) const noexcept {
    return id == kappa_ || id == tau_ || id == epsilon_ || id == eos_;
  }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId kappa_;
  TokenId tau_;
  TokenId epsilon_;
  TokenId eos_;
};

// Appends the four markers after `tokens`, in the order kappa, tau, epsilon,
// eos.
inline Vocabulary build_vocabulary(std::vector<std::string> tokens,
                                   const MarkerNames& markers = {}) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "token list is empty");
  }
  const std::string* names[] = {&markers.kappa, &markers.tau,
                                &markers.epsilon, &markers.eos};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      if (*names[i] == *names[j]) {
        throw Error(ErrorCode::kMarkerCollision,
                    "marker names must be distinct: " + *names[i]);
      }
    }
  }
  // Check duplicates among the ordinary tokens first so the error names the
  // real problem.
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& t : tokens) {
      if (!seen.emplace(t, 0).second) {
        throw Error(ErrorCode::kDuplicateToken, t);
      }
    }
    for (const auto* name : names) {
      if (seen.count(*name)) throw Error(ErrorCode::kMarkerCollision, *name);
    }
  }
  const auto base = static_cast<TokenId>(tokens.size());
  for (const auto* name : names) tokens.push_back(*name);
  return Vocabulary(std::move(tokens), base, base + 1, base + 2, base + 3);
}

// File format: one token per line in id order, then a four-line footer
//   #kappa=<id>
//   #tau=<id>
//   #epsilon=<id>
//   #eos=<id>
// The footer is always the last four lines, so tokens may themselves start
// with '#'.
inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& t : vocab.tokens()) out << t << '\n';
  out << "#kappa=" << vocab.kappa() << '\n'
      << "#tau=" << vocab.tau() << '\n'
      << "#epsilon=" << vocab.epsilon() << '\n'
      << "#eos=" << vocab.eos() << '\n';
}

inline Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (lines.size() < 5) {
    throw Error(ErrorCode::kParseError,
                "vocabulary file needs at least one token and a 4-line footer");
  }
  const char* keys[] = {"#kappa=", "#tau=", "#epsilon=", "#eos="};
  TokenId ids[4];
  const std::size_t footer = lines.size() - 4;
  for (int i = 0; i < 4; ++i) {
    const std::string& line = lines[footer + i];
    std::string_view key = keys[i];
    if (line.compare(0, key.size(), key) != 0) {
      throw Error(ErrorCode::kParseError,
                  "expected footer line '" + std::string(key) + "<id>', got '" +
                      line + "'");
    }
    try {
      std::size_t used = 0;
      const std::string digits = line.substr(key.size());
      long value = std::stol(digits, &used);
      if (used != digits.size() || value < 0) throw std::invalid_argument("");
      ids[i] = static_cast<TokenId>(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, "bad marker id in '" + line + "'");
    }
  }
  lines.resize(footer);
  return Vocabulary(std::move(lines), ids[0], ids[1], ids[2], ids[3]);
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return read_vocabulary(in);
}

inline void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  write_vocabulary(out, vocab);
}

// Maps text to token ids and back. Implementations must be immutable after
// construction so they can be shared by concurrent sessions.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual TokenSeq encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const TokenId> ids) const = 0;
};

inline std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

inline TokenSeq whitespace_tokenize(std::string_view text,
                                    const Vocabulary& vocab) {
  TokenSeq ids;
  for (auto word : split_whitespace(text)) ids.push_back(vocab.id(word));
  return ids;
}

inline std::string join_tokens(std::span<const TokenId> ids,
                               const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += vocab.token(ids[i]);
  }
  return out;
}

// Reference tokenizer: one token per whitespace-delimited word. Decoding joins
// with single spaces, so runs of whitespace are normalized away. Holds a
// reference; the vocabulary must outlive it.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  explicit WhitespaceTokenizer(const Vocabulary& vocab) : vocab_(&vocab) {}

  TokenSeq encode(std::string_view text) const override {
    return whitespace_tokenize(text, *vocab_);
  }
  std::string decode(std::span<const TokenId> ids) const override {
    return join_tokens(ids, *vocab_);
  }

 private:
  const Vocabulary* vocab_;
};

}  // namespace inerd
