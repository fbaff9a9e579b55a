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

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "inerd/inerd.hpp"
#include "worker_pool.hpp"

namespace inerd::tools {
namespace {

using ordered_json = nlohmann::ordered_json;

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(flag) + " is required");
  }
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kIoFailure,
                std::string(flag) + ": cannot read " + path);
  }
}

// Writes to --out when given, otherwise to the command's stdout stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_.is_open()) {
      file_.close();
      if (file_.fail()) throw Error(ErrorCode::kIoFailure, "write failed");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> read_type_labels(const std::string& path) {
  std::vector<std::string> labels;
  for (auto& line : read_lines(path)) {
    const auto words = split_whitespace(line);
    if (words.empty() || words.front().front() == '#') continue;
    std::string label;
    for (auto w : words) {
      if (!label.empty()) label += ' ';
      label += w;
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

nlohmann::json parse_json_line(const std::string& line, const std::string& path,
                               std::size_t line_no) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                path + " line " + std::to_string(line_no) + ": " + e.what());
  }
}

int report_failure(std::ostream& err, const std::exception& e) {
  spdlog::error("{}", e.what());
  err << "error: " << e.what() << '\n';
  return 1;
}

// One sentence to decode, optionally with its gold encoding.
struct DecodeItem {
  TokenSeq sentence;
  std::optional<EncodedExample> gold;
};

std::vector<DecodeItem> read_decode_items(const std::string& path,
                                          const Vocabulary& vocab) {
  std::vector<DecodeItem> items;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto j = parse_json_line(line, path, line_no);
    DecodeItem item;
    try {
      if (j.contains("kappa_position")) {
        item.gold = encoded_example_from_json(j, vocab);
        const auto s = item.gold->sentence();
        item.sentence.assign(s.begin(), s.end());
      } else if (j.contains("input_ids")) {
        item.sentence = j.at("input_ids").get<TokenSeq>();
      } else {
        item.sentence = whitespace_tokenize(j.at("text").get<std::string>(), vocab);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path + " line " + std::to_string(line_no) + ": " +
                                e.what());
    }
    items.push_back(std::move(item));
  }
  return items;
}

// Replays precomputed scores, one JSON line {"prefix_len": k, "scores": [...]}
// per decode step, in file order. Not thread-safe.
class ExternalScorer final : public Scorer {
 public:
  explicit ExternalScorer(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  }

  std::vector<double> score(std::span<const TokenId> prefix) override {
    std::string line;
    do {
      if (!std::getline(in_, line)) {
        throw Error(ErrorCode::kScorerError,
                    path_ + ": ran out of score lines at prefix length " +
                        std::to_string(prefix.size()));
      }
      ++line_no_;
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    const auto j = parse_json_line(line, path_, line_no_);
    try {
      const auto k = j.at("prefix_len").get<std::size_t>();
      if (k != prefix.size()) {
        throw Error(ErrorCode::kScorerError,
                    path_ + " line " + std::to_string(line_no_) +
                        ": prefix_len " + std::to_string(k) +
                        " but the decoder is at " + std::to_string(prefix.size()));
      }
      return j.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  path_ + " line " + std::to_string(line_no_) + ": " + e.what());
    }
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

ordered_json decode_record(std::size_t id, const DecodeResult& r,
                           std::span<const TokenId> sentence,
                           const Vocabulary& vocab, bool unconstrained) {
  ordered_json j;
  j["id"] = id;
  ordered_json entities = ordered_json::array();
  for (const auto& e : r.entities) {
    const auto content = surface_of(e, sentence).content;
    ordered_json ej;
    ej["type"] = e.type;
    ej["start"] = e.span.start;
    ej["end"] = e.span.end;
    ej["text"] = join_tokens(content, vocab);
    ej["content_ids"] = content;
    entities.push_back(std::move(ej));
  }
  j["entities"] = std::move(entities);
  j["raw_tokens"] = r.raw_tokens;
  j["steps"] = r.steps;
  j["truncated"] = r.truncated;
  ordered_json warnings = ordered_json::array();
  for (const auto& w : r.warnings) {
    warnings.push_back(std::string(WarningKindName(w.kind)) + ": " + w.detail);
  }
  j["warnings"] = std::move(warnings);
  if (unconstrained) j["hallucinations"] = r.hallucinations;
  return j;
}

}  // namespace

int cmd_encode(const EncodeConfig& config, std::ostream& out,
               std::ostream& err) {
  try {
    if (config.inputs.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--input is required");
    }
    for (const auto& in : config.inputs) require_file(in, "--input");
    require_file(config.label_map, "--label-map");
    require_file(config.vocab, "--vocab");

    const auto vocab = load_vocabulary(config.vocab);
    const auto maps = load_label_maps(config.label_map);
    const WhitespaceTokenizer tokenizer(vocab);

    std::vector<DatasetSplit> splits;
    for (const auto& path : config.inputs) {
      splits.push_back(read_conll(path, config.column));
      for (const auto& w : splits.back().warnings) {
        spdlog::warn("{}: {}", WarningKindName(w.kind), w.detail);
      }
      spdlog::info("read {} sentences from {}", splits.back().examples.size(),
                   path);
    }
    const auto corpus = build_corpus(splits, maps, vocab, tokenizer, config.seed);

    Output sink(config.out, out);
    for (const auto& ex : corpus) sink.get() << to_json(ex, vocab).dump() << '\n';
    sink.close();

    const auto stats = corpus_stats(corpus, vocab);
    // Stats go to stdout even when the corpus is written to a file.
    if (!config.out.empty()) out << stats.to_json().dump() << '\n';
    else err << stats.to_json().dump() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_decode(const DecodeConfig& config, std::ostream& out,
               std::ostream& err) {
  try {
    require_file(config.input, "--input");
    require_file(config.vocab, "--vocab");
    require_file(config.types, "--types");
    if (config.scorer != "teacher" && config.scorer != "random" &&
        config.scorer != "external") {
      throw Error(ErrorCode::kInvalidArgument,
                  "--scorer must be teacher, random or external");
    }
    if (config.scorer == "external") require_file(config.scores, "--scores");

    const auto vocab = load_vocabulary(config.vocab);
    const WhitespaceTokenizer tokenizer(vocab);
    const auto types = compile_types(read_type_labels(config.types), tokenizer, vocab);
    for (const auto& w : types.warnings()) {
      spdlog::warn("{}: {}", WarningKindName(w.kind), w.detail);
    }
    const auto items = read_decode_items(config.input, vocab);
    if (config.scorer == "teacher") {
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].gold) {
          throw Error(ErrorCode::kInvalidArgument,
                      "teacher scorer needs encoded examples; item " +
                          std::to_string(i) + " has no kappa_position");
        }
      }
    }

    std::unique_ptr<ExternalScorer> external;
    RandomScorer random(config.seed, vocab.size());
    std::size_t threads = config.threads;
    if (config.scorer == "external") {
      external = std::make_unique<ExternalScorer>(config.scores);
      threads = 1;  // scores are consumed in lockstep
    }

    const auto decode_one = [&](std::size_t i) {
      const auto& item = items[i];
      std::unique_ptr<TeacherScorer> teacher;
      Scorer* scorer = &random;
      if (config.scorer == "teacher") {
        teacher = std::make_unique<TeacherScorer>(*item.gold, vocab);
        scorer = teacher.get();
      } else if (external) {
        scorer = external.get();
      }
      try {
        auto result =
            config.unconstrained
                ? unconstrained_decode(*scorer, item.sentence, types, vocab,
                                       config.max_steps)
                : greedy_decode(*scorer, item.sentence, types, vocab,
                                config.max_steps);
        return decode_record(i, result, item.sentence, vocab,
                             config.unconstrained)
            .dump();
      } catch (const Error& e) {
        throw Error(e.code(), "sentence " + std::to_string(i) + ": " + e.what());
      }
    };
    const auto lines =
        parallel_map<std::string>(items.size(), threads, decode_one);

    Output sink(config.out, out);
    for (const auto& line : lines) sink.get() << line << '\n';
    sink.close();
    spdlog::info("decoded {} sentences", items.size());
    return 0;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_eval(const EvalConfig& config, std::ostream& out, std::ostream& err) {
  try {
    require_file(config.gold, "--gold");
    require_file(config.pred, "--pred");
    require_file(config.vocab, "--vocab");
    require_file(config.types, "--types");
    MatchMode mode;
    if (config.match == "surface") {
      mode = MatchMode::kSurface;
    } else if (config.match == "position") {
      mode = MatchMode::kPosition;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "--match must be surface or position");
    }

    const auto vocab = load_vocabulary(config.vocab);
    const WhitespaceTokenizer tokenizer(vocab);
    const auto types = compile_types(read_type_labels(config.types), tokenizer, vocab);

    std::vector<EncodedExample> gold;
    {
      std::size_t line_no = 0;
      for (const auto& line : read_lines(config.gold)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        gold.push_back(encoded_example_from_json(
            parse_json_line(line, config.gold, line_no), vocab));
      }
    }
    std::vector<nlohmann::json> pred;
    {
      std::size_t line_no = 0;
      for (const auto& line : read_lines(config.pred)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        pred.push_back(parse_json_line(line, config.pred, line_no));
      }
    }
    if (gold.size() != pred.size()) {
      throw Error(ErrorCode::kSentenceCountMismatch,
                  std::to_string(gold.size()) + " gold sentences but " +
                      std::to_string(pred.size()) + " predictions");
    }

    std::vector<Tally> tallies;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const auto sentence = gold[i].sentence();
      const auto g = parse_entity_string(gold[i].entity_string(), sentence,
                                         vocab, types)
                         .entities;
      std::vector<Entity> p;
      try {
        if (pred[i].at("id").get<std::size_t>() != i) {
          throw Error(ErrorCode::kSentenceCountMismatch,
                      "prediction " + std::to_string(i) + " carries id " +
                          pred[i].at("id").dump());
        }
        for (const auto& e : pred[i].at("entities")) {
          Entity ent{e.at("type").get<std::string>(),
                     Span{e.at("start").get<std::size_t>(),
                          e.at("end").get<std::size_t>()}};
          check_span(ent.span, sentence.size());
          p.push_back(std::move(ent));
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError,
                    "prediction " + std::to_string(i) + ": " + e.what());
      }
      tallies.push_back(match_entities(g, p, sentence, mode));
    }
    const auto report = micro_f1(tallies);

    Output sink(config.out, out);
    sink.get() << report.to_json().dump() << '\n';
    sink.close();
    if (!config.out.empty()) out << report.to_json().dump() << '\n';
    out << report.summary() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_simulate(const SimulateConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    if (config.teacher_weight < 0.0 || config.teacher_weight > 1.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--teacher-weight must lie in [0, 1]");
    }
    SyntheticSpec spec;
    spec.vocab_size = config.vocab_size;
    spec.sentence_len = config.sentence_len;
    spec.type_count = config.type_count;
    // Surfaces parameter problems before any output is written.
    (void)make_synthetic_instance(config.seed, spec);

    struct Row {
      int valid[2];
      std::size_t hallucinations[2];
      double f1[2];
    };
    const auto run_trial = [&](std::size_t trial) {
      std::uint64_t mix = config.seed ^ (0x5851F42D4C957F2DULL * (trial + 1));
      const auto instance_seed = splitmix64(mix);
      const auto scorer_seed = splitmix64(mix);
      const auto inst = make_synthetic_instance(instance_seed, spec);
      const auto gold = surfaces_of(inst.gold, inst.sentence);
      Row row{};
      for (int mode = 0; mode < 2; ++mode) {
        NoisyTeacherScorer scorer(inst.target, inst.vocab, scorer_seed,
                                  config.teacher_weight);
        const auto result =
            mode == 0 ? greedy_decode(scorer, inst.sentence, inst.types,
                                      inst.vocab, config.max_steps)
                      : unconstrained_decode(scorer, inst.sentence, inst.types,
                                             inst.vocab, config.max_steps);
        const bool valid =
            result.hallucinations == 0 &&
            is_grammar_prefix(result.raw_tokens, inst.sentence, inst.types,
                              inst.vocab);
        const auto pred = surfaces_of(result.entities, inst.sentence);
        const Tally tally = match_entities(gold, pred);
        row.valid[mode] = valid ? 1 : 0;
        row.hallucinations[mode] = result.hallucinations;
        row.f1[mode] = report_from(tally).micro_f1;
      }
      return row;
    };
    const auto rows = parallel_map<Row>(config.trials, config.threads, run_trial);

    Output sink(config.out, out);
    auto& csv = sink.get();
    csv << "trial,mode,grammar_valid,hallucinations,f1_vs_gold\n";
    std::size_t valid_count[2] = {0, 0};
    std::size_t halluc_total[2] = {0, 0};
    const char* names[2] = {"constrained", "unconstrained"};
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (int mode = 0; mode < 2; ++mode) {
        char f1[32];
        std::snprintf(f1, sizeof(f1), "%.6f", rows[t].f1[mode]);
        csv << t << ',' << names[mode] << ',' << rows[t].valid[mode] << ','
            << rows[t].hallucinations[mode] << ',' << f1 << '\n';
        valid_count[mode] += static_cast<std::size_t>(rows[t].valid[mode]);
        halluc_total[mode] += rows[t].hallucinations[mode];
      }
    }
    sink.close();
    for (int mode = 0; mode < 2; ++mode) {
      spdlog::info("{}: grammar_valid {}/{}, hallucinations {}", names[mode],
                   valid_count[mode], rows.size(), halluc_total[mode]);
    }
    return 0;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

}  // namespace inerd::tools
