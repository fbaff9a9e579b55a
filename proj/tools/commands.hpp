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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace inerd::tools {

// Used whenever --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 20240101;

struct EncodeConfig {
  std::vector<std::string> inputs;  // CoNLL files; dataset name = file stem
  std::string label_map;
  std::string vocab;
  std::string out;
  int column = -1;
  std::uint64_t seed = kDefaultSeed;
};

struct DecodeConfig {
  std::string input;  // JSON lines: encoded examples or {"text": ...}
  std::string vocab;
  std::string types;  // one label per line
  std::string scorer = "teacher";  // teacher | random | external
  std::string scores;              // JSON lines for the external scorer
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> max_steps;
  bool unconstrained = false;
  std::size_t threads = 4;
};

struct EvalConfig {
  std::string gold;  // encoded examples
  std::string pred;  // decode output
  std::string vocab;
  std::string types;
  std::string match = "surface";  // surface | position
  std::string out;
};

struct SimulateConfig {
  std::size_t vocab_size = 50;  // markers included
  std::size_t sentence_len = 10;
  std::size_t type_count = 4;
  std::size_t trials = 100;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> max_steps;
  double teacher_weight = 0.0;
  std::string out;  // CSV; stdout when empty
  std::size_t threads = 4;
};

// Each returns the process exit status. Errors are reported on `err`;
// results go to the configured --out file or to `out`.
int cmd_encode(const EncodeConfig& config, std::ostream& out, std::ostream& err);
int cmd_decode(const DecodeConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateConfig& config, std::ostream& out,
                 std::ostream& err);

}  // namespace inerd::tools
