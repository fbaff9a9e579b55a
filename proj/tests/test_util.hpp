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

// Shared fixtures and brute-force reference computations for the tests.
// Nothing here calls into allowed_tokens()/advance() except the explicit
// DFS walkers, so these can serve as independent oracles.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "inerd/inerd.hpp"

namespace inerd::testing {

// The running example: one sentence, two types, a few distractor words.
struct WorkedExample {
  Vocabulary vocab;
  EntityTypeSet types;
  TokenSeq sentence;
  std::vector<Entity> gold;
};

inline const std::vector<std::string>& worked_words() {
  static const std::vector<std::string> words = {
      "EU",    "rejects", "German",       "call",     "to",
      "boycott", "British", "lamb",       ".",        "Organisation",
      "Location", "Organization", "aarhus", "aardvark", "zythum",
      "zyzzyva"};
  return words;
}

inline WorkedExample make_worked_example() {
  Vocabulary vocab = build_vocabulary(worked_words());
  WhitespaceTokenizer tok(vocab);
  EntityTypeSet types = compile_types({"Organisation", "Location"}, tok, vocab);
  TokenSeq sentence =
      whitespace_tokenize("EU rejects German call to boycott British lamb .", vocab);
  std::vector<Entity> gold = {{"Organisation", {0, 1}},
                              {"Location", {2, 3}},
                              {"Location", {6, 7}}};
  return {std::move(vocab), std::move(types), std::move(sentence), std::move(gold)};
}

inline const char* kWorkedEntityString =
    "Organisation <TCS> EU <ES> Location <TCS> German <ES> Location <TCS> "
    "British <ES>";

// Next tokens of every occurrence of `content` in `sentence`, by scanning
// every start position.
inline std::set<TokenId> brute_force_successors(const TokenSeq& sentence,
                                                const TokenSeq& content) {
  std::set<TokenId> next;
  for (std::size_t q = 0; q + content.size() <= sentence.size(); ++q) {
    bool match = true;
    for (std::size_t k = 0; k < content.size(); ++k) {
      if (sentence[q + k] != content[k]) match = false;
    }
    if (match && q + content.size() < sentence.size()) {
      next.insert(sentence[q + content.size()]);
    }
  }
  return next;
}

// Phase recomputed from scratch by scanning the emitted tokens backwards
// for the most recent separator, the way the per-step masking rule
// describes it ("is tau found before epsilon in the reversed sequence").
inline Phase phase_by_rescan(const TokenSeq& sentence, const TokenSeq& emitted,
                             const EntityTypeSet& types,
                             const Vocabulary& vocab) {
  if (!emitted.empty() && emitted.back() == vocab.eos()) return phase::Terminal{};
  // Index one past the last separator, and which one it was.
  std::size_t since = 0;
  TokenId last_marker = vocab.kappa();
  for (std::size_t i = emitted.size(); i-- > 0;) {
    if (emitted[i] == vocab.tau() || emitted[i] == vocab.epsilon()) {
      since = i + 1;
      last_marker = emitted[i];
      break;
    }
  }
  const bool generating = last_marker == vocab.tau();
  TokenSeq tail(emitted.begin() + static_cast<std::ptrdiff_t>(since), emitted.end());
  if (!generating) {
    if (tail.empty()) return phase::Boundary{};
    std::size_t node = EntityTypeSet::kRoot;
    for (TokenId t : tail) node = types.node(node).children.at(t);
    return phase::TypePartial{node};
  }
  if (tail.empty()) return phase::ContentStart{};
  std::vector<std::size_t> positions;
  for (std::size_t q = 0; q + tail.size() <= sentence.size(); ++q) {
    if (std::equal(tail.begin(), tail.end(),
                   sentence.begin() + static_cast<std::ptrdiff_t>(q))) {
      positions.push_back(q + tail.size());
    }
  }
  return phase::ContentPartial{positions};
}

// Every terminal sequence of at most max_len tokens reachable by stepping
// the state machine.
inline std::set<TokenSeq> reachable_by_advance(const TokenSeq& sentence,
                                               const EntityTypeSet& types,
                                               const Vocabulary& vocab,
                                               std::size_t max_len) {
  std::set<TokenSeq> out;
  auto walk = [&](auto& self, const DecoderState& state) -> void {
    if (is_terminal(state)) {
      out.insert(state.emitted());
      return;
    }
    if (state.emitted().size() >= max_len) return;
    const AllowedSet allowed = allowed_tokens(state, types, vocab);
    for (TokenId t : allowed.ids()) {
      self(self, advance(state, t, types, vocab));
    }
  };
  walk(walk, new_session(sentence, types, vocab));
  return out;
}

// Is `content` a contiguous run of `sentence`?
inline bool is_subsequence_run(const TokenSeq& sentence, const TokenSeq& content) {
  if (content.empty()) return false;
  return std::search(sentence.begin(), sentence.end(), content.begin(),
                     content.end()) != sentence.end();
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("inerd_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace inerd::testing
