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

#include <cstdlib>
#include <iostream>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

// INERD_LOG takes a spdlog level name (trace, debug, info, warn, error,
// critical, off). Default: warn.
void setup_logging() {
  auto logger = spdlog::stderr_logger_st("inerd");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("INERD_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace inerd::tools;

  CLI::App app{"Constrained entity-string decoding for named entity recognition"};
  app.require_subcommand(1);

  EncodeConfig enc;
  auto* encode = app.add_subcommand(
      "encode", "Convert CoNLL files into a shuffled JSON-lines training corpus");
  encode->add_option("--input", enc.inputs, "CoNLL file(s); dataset name is the file stem")
      ->required();
  encode->add_option("--label-map", enc.label_map, "DATASET.TAG = Label file")->required();
  encode->add_option("--vocab", enc.vocab, "Vocabulary file")->required();
  encode->add_option("--column", enc.column, "Tag column (negative counts from the end)");
  encode->add_option("--seed", enc.seed, "Shuffle seed");
  encode->add_option("--out", enc.out, "Output JSON-lines file (stdout if omitted)");

  DecodeConfig dec;
  auto* decode = app.add_subcommand("decode", "Greedy decoding with the grammar mask");
  decode->add_option("--input", dec.input, "JSON-lines sentences or encoded examples")
      ->required();
  decode->add_option("--vocab", dec.vocab, "Vocabulary file")->required();
  decode->add_option("--types", dec.types, "Entity type labels, one per line")->required();
  decode->add_option("--scorer", dec.scorer, "teacher | random | external")
      ->check(CLI::IsMember({"teacher", "random", "external"}));
  decode->add_option("--scores", dec.scores, "Score lines for --scorer external");
  decode->add_option("--seed", dec.seed, "Seed for --scorer random");
  decode->add_option("--max-steps", dec.max_steps,
                     "Token budget per sentence (default 4 * length + 16)");
  decode->add_flag("--unconstrained", dec.unconstrained,
                   "Skip the grammar mask and tally hallucinations");
  decode->add_option("--threads", dec.threads, "Worker threads")->check(CLI::PositiveNumber);
  decode->add_option("--out", dec.out, "Output JSON-lines file (stdout if omitted)");

  EvalConfig ev;
  auto* eval = app.add_subcommand("eval", "Span-level micro precision/recall/F1");
  eval->add_option("--gold", ev.gold, "Encoded gold examples")->required();
  eval->add_option("--pred", ev.pred, "Output of decode")->required();
  eval->add_option("--vocab", ev.vocab, "Vocabulary file")->required();
  eval->add_option("--types", ev.types, "Entity type labels, one per line")->required();
  eval->add_option("--match", ev.match, "surface | position")
      ->check(CLI::IsMember({"surface", "position"}));
  eval->add_option("--out", ev.out, "Also write the report JSON here");

  SimulateConfig sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Constrained vs unconstrained decoding on synthetic instances");
  simulate->add_option("--vocab-size", sim.vocab_size, "Vocabulary size, markers included");
  simulate->add_option("--sentence-len", sim.sentence_len, "Sentence length");
  simulate->add_option("--type-count", sim.type_count, "Number of entity types");
  simulate->add_option("--trials", sim.trials, "Number of trials");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--max-steps", sim.max_steps, "Token budget per decode");
  simulate->add_option("--teacher-weight", sim.teacher_weight,
                       "Blend of gold signal into the random scores, 0..1");
  simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "CSV output (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  if (*encode) return cmd_encode(enc, std::cout, std::cerr);
  if (*decode) return cmd_decode(dec, std::cout, std::cerr);
  if (*eval) return cmd_eval(ev, std::cout, std::cerr);
  return cmd_simulate(sim, std::cout, std::cerr);
}
