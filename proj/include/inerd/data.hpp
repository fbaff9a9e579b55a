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

// CoNLL-style IOB column files, label maps, and the merged training corpus.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "inerd/encoding.hpp"
#include "inerd/error.hpp"
#include "inerd/grammar.hpp"
#include "inerd/random.hpp"
#include "inerd/vocab.hpp"

namespace inerd {

struct LabeledSentence {
  std::vector<std::string> tokens;
  IobTagSequence tags;  // same length as tokens

  friend bool operator==(const LabeledSentence&,
                         const LabeledSentence&) = default;
};

struct DatasetSplit {
  std::string name;
  std::vector<LabeledSentence> examples;
  std::vector<Warning> warnings;  // tag repairs
};

// Column 0 holds the word. `tag_column` selects the IOB tag column; a
// negative value counts from the end (-1 is the last column, as in
// CoNLL-2003). The first data line fixes the column count; a later line too
// short to hold the tag column raises ColumnMissing. Blank lines end
// sentences and -DOCSTART- lines are dropped.
inline DatasetSplit read_conll(std::istream& in, std::string name,
                               int tag_column = -1) {
  DatasetSplit split;
  split.name = std::move(name);
  LabeledSentence current;
  std::size_t columns = 0;
  std::size_t line_no = 0;

  const auto flush = [&] {
    if (current.tokens.empty()) return;
    auto repaired = iob_to_entities(current.tags);
    for (auto& w : repaired.warnings) {
      w.detail = split.name + " line " + std::to_string(line_no) + ": " + w.detail;
      split.warnings.push_back(std::move(w));
    }
    split.examples.push_back(std::move(current));
    current = {};
  };

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_whitespace(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields.front() == "-DOCSTART-") {
      flush();
      continue;
    }
    if (columns == 0) columns = fields.size();
    std::size_t index = 0;
    if (tag_column < 0) {
      const auto back = static_cast<std::size_t>(-static_cast<long>(tag_column));
      if (fields.size() < columns || back > fields.size() || back > columns) {
        throw Error(ErrorCode::kColumnMissing,
                    split.name + " line " + std::to_string(line_no));
      }
      index = columns - back;
    } else {
      index = static_cast<std::size_t>(tag_column);
      if (index >= fields.size()) {
        throw Error(ErrorCode::kColumnMissing,
                    split.name + " line " + std::to_string(line_no));
      }
    }
    if (index == 0) {
      throw Error(ErrorCode::kColumnMissing,
                  split.name + " line " + std::to_string(line_no) +
                      ": tag column coincides with the word column");
    }
    try {
      (void)detail::parse_tag(fields[index], current.tags.size());
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidTag,
                  split.name + " line " + std::to_string(line_no) + ": " +
                      std::string(fields[index]));
    }
    current.tokens.emplace_back(fields[0]);
    current.tags.emplace_back(fields[index]);
  }
  flush();
  return split;
}

inline DatasetSplit read_conll(const std::string& path, int tag_column = -1,
                               std::string name = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  if (name.empty()) name = std::filesystem::path(path).stem().string();
  return read_conll(in, std::move(name), tag_column);
}

// Dataset-local tag labels ("ORG") to natural-language type labels
// ("Organisation").
struct LabelMap {
  std::string dataset;
  std::map<std::string, std::string> labels;

  const std::string* find(std::string_view tag) const {
    auto it = labels.find(std::string(tag));
    return it == labels.end() ? nullptr : &it->second;
  }
};

namespace detail {
inline std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}
}  // namespace detail

// One "DATASET.TAG = Label" entry per line; '#' starts a comment line. The
// dataset name is everything before the last '.' of the key.
inline std::vector<LabelMap> read_label_maps(std::istream& in) {
  std::map<std::string, LabelMap> maps;
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const auto bad = [&](const std::string& why) {
      return Error(ErrorCode::kParseError,
                   "label map line " + std::to_string(line_no) + ": " + why);
    };
    if (eq == std::string_view::npos) throw bad("missing '='");
    const auto key = detail::trim(line.substr(0, eq));
    const auto label = detail::trim(line.substr(eq + 1));
    const auto dot = key.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size()) {
      throw bad("key must look like DATASET.TAG");
    }
    if (label.empty()) throw bad("empty label");
    auto& map = maps[std::string(key.substr(0, dot))];
    map.dataset = std::string(key.substr(0, dot));
    const std::string tag(key.substr(dot + 1));
    if (!map.labels.emplace(tag, std::string(label)).second) {
      throw bad("tag '" + tag + "' mapped twice");
    }
  }
  std::vector<LabelMap> out;
  for (auto& [name, map] : maps) {
    std::set<std::string> targets;
    for (const auto& [tag, label] : map.labels) {
      if (!targets.insert(label).second) {
        throw Error(ErrorCode::kParseError,
                    "label map for " + name + " sends two tags to '" + label +
                        "'");
      }
    }
    out.push_back(std::move(map));
  }
  return out;
}

inline std::vector<LabelMap> load_label_maps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return read_label_maps(in);
}

// Every human-readable label used by `maps` for the given splits, sorted.
inline std::vector<std::string> mapped_labels(std::span<const DatasetSplit> splits,
                                              std::span<const LabelMap> maps) {
  std::set<std::string> labels;
  for (const auto& split : splits) {
    for (const auto& map : maps) {
      if (map.dataset != split.name) continue;
      for (const auto& [tag, label] : map.labels) labels.insert(label);
    }
  }
  return {labels.begin(), labels.end()};
}

// Entities of one labeled sentence, in word positions, with labels mapped.
inline std::vector<Entity> mapped_entities(const LabeledSentence& sentence,
                                           const LabelMap* map,
                                           std::string_view dataset) {
  auto entities = iob_to_entities(sentence.tags).entities;
  for (auto& e : entities) {
    const std::string* label = map ? map->find(e.type) : nullptr;
    if (!label) {
      throw Error(ErrorCode::kUnmappedLabel,
                  "dataset '" + std::string(dataset) + "' label '" + e.type + "'");
    }
    e.type = *label;
  }
  return entities;
}

// Tokenizes a word-level sentence one word at a time and converts word spans
// into token spans.
inline EncodedExample encode_labeled(const LabeledSentence& sentence,
                                     std::vector<Entity> word_entities,
                                     const Vocabulary& vocab,
                                     const Tokenizer& tokenizer,
                                     const EntityTypeSet* types) {
  TokenSeq ids;
  std::vector<std::size_t> offsets{0};
  for (const auto& word : sentence.tokens) {
    auto pieces = tokenizer.encode(word);
    ids.insert(ids.end(), pieces.begin(), pieces.end());
    offsets.push_back(ids.size());
  }
  for (auto& e : word_entities) {
    e.span = Span{offsets[e.span.start], offsets[e.span.end]};
  }
  if (word_entities.empty() || types == nullptr) {
    if (!word_entities.empty()) {
      throw Error(ErrorCode::kUnknownTypeLabel, word_entities.front().type);
    }
    EncodedExample ex;
    ex.input_ids = inference_prefix(ids, vocab);
    ex.kappa_position = ids.size();
    ex.input_ids.push_back(vocab.eos());
    return ex;
  }
  return encode_example(ids, std::move(word_entities), vocab, *types);
}

// Converts every split with its dataset's label map, concatenates the
// splits in order, then shuffles with `shuffle_seed`. Each dataset keeps its
// own label inventory.
inline std::vector<EncodedExample> build_corpus(
    std::span<const DatasetSplit> splits, std::span<const LabelMap> maps,
    const Vocabulary& vocab, const Tokenizer& tokenizer,
    std::uint64_t shuffle_seed) {
  const auto labels = mapped_labels(splits, maps);
  std::optional<EntityTypeSet> types;
  if (!labels.empty()) types.emplace(compile_types(labels, tokenizer, vocab));

  std::vector<EncodedExample> corpus;
  for (const auto& split : splits) {
    const LabelMap* map = nullptr;
    for (const auto& m : maps) {
      if (m.dataset == split.name) map = &m;
    }
    for (const auto& sentence : split.examples) {
      auto entities = mapped_entities(sentence, map, split.name);
      corpus.push_back(encode_labeled(sentence, std::move(entities), vocab,
                                      tokenizer, types ? &*types : nullptr));
    }
  }
  seeded_shuffle(corpus, shuffle_seed);
  return corpus;
}

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t entities = 0;
  std::map<std::string, std::size_t> per_label;
  double mean_entities_per_sentence = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["sentences"] = sentences;
    j["entities"] = entities;
    j["per_label"] = per_label;
    j["mean_entities_per_sentence"] = mean_entities_per_sentence;
    return j;
  }
};

// Counts entities by reading the label tokens of each block; needs no
// EntityTypeSet.
inline CorpusStats corpus_stats(std::span<const EncodedExample> corpus,
                                const Vocabulary& vocab) {
  CorpusStats stats;
  for (const auto& ex : corpus) {
    ++stats.sentences;
    TokenSeq label;
    bool in_label = true;
    for (TokenId t : ex.entity_string()) {
      if (t == vocab.eos()) break;
      if (t == vocab.epsilon()) {
        label.clear();
        in_label = true;
      } else if (t == vocab.tau() && in_label) {
        ++stats.per_label[join_tokens(label, vocab)];
        ++stats.entities;
        in_label = false;
      } else if (in_label) {
        label.push_back(t);
      }
    }
  }
  if (stats.sentences > 0) {
    stats.mean_entities_per_sentence =
        static_cast<double>(stats.entities) / static_cast<double>(stats.sentences);
  }
  return stats;
}

}  // namespace inerd
