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

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "test_util.hpp"

namespace inerd {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::write_file;

const std::string kData = INERD_TESTDATA_DIR;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir("cli");
    vocab_ = (dir_ / "vocab.txt").string();
    save_vocabulary(vocab_, build_vocabulary(testing::worked_words()));
    types_ = (dir_ / "types.txt").string();
    write_file(types_, "# type labels\nOrganisation\nLocation\n");
  }

  // Runs the binary with stdout and stderr captured to files.
  int run(const std::string& args) {
    const std::string cmd = std::string(INERD_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout").string() + " 2> " +
                            (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read_file(dir_ / "stdout"); }
  std::string err() const { return read_file(dir_ / "stderr"); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string encode_eu_lamb() {
    EXPECT_EQ(run("encode --input " + kData + "/eu_lamb.conll --label-map " + kData +
                  "/eu_lamb.map --vocab " + vocab_ + " --out " + path("gold.jsonl")),
              0)
        << err();
    return read_file(path("gold.jsonl"));
  }

  fs::path dir_;
  std::string vocab_;
  std::string types_;
};

TEST_F(CliTest, EncodeRunningExample) {
  const auto corpus = lines_of(encode_eu_lamb());
  ASSERT_EQ(corpus.size(), 1u);
  const auto j = nlohmann::json::parse(corpus[0]);
  EXPECT_EQ(j.at("text"),
            std::string("EU rejects German call to boycott British lamb <CT> ") +
                testing::kWorkedEntityString + " <EOS>");
  EXPECT_EQ(j.at("kappa_position"), 8);
  const auto stats = nlohmann::json::parse(out());
  EXPECT_EQ(stats.at("entities"), 3);
  EXPECT_EQ(stats.at("per_label").at("Location"), 2);

  // Without --out the corpus goes to stdout and the stats to stderr.
  ASSERT_EQ(run("encode --input " + kData + "/eu_lamb.conll --label-map " + kData +
                "/eu_lamb.map --vocab " + vocab_),
            0);
  EXPECT_EQ(lines_of(out()), corpus);
  EXPECT_EQ(nlohmann::json::parse(err()).at("sentences"), 1);
}

TEST_F(CliTest, EncodeEmptyInput) {
  write_file(path("empty.conll"), "");
  ASSERT_EQ(run("encode --input " + path("empty.conll") + " --label-map " + kData +
                "/eu_lamb.map --vocab " + vocab_ + " --out " + path("c.jsonl")),
            0)
      << err();
  EXPECT_EQ(read_file(path("c.jsonl")), "");
  const auto stats = nlohmann::json::parse(out());
  EXPECT_EQ(stats.at("sentences"), 0);
  EXPECT_EQ(stats.at("entities"), 0);
}

TEST_F(CliTest, EncodeFailures) {
  write_file(path("bad.map"), "eu_lamb.ORG Organisation\n");
  EXPECT_EQ(run("encode --input " + kData + "/eu_lamb.conll --label-map " + path("bad.map") +
                " --vocab " + vocab_),
            1);
  EXPECT_NE(err().find("ParseError"), std::string::npos);
  EXPECT_EQ(run("encode --input " + path("missing.conll") + " --label-map " + kData +
                "/eu_lamb.map --vocab " + vocab_),
            1);
  EXPECT_NE(run("encode --label-map " + kData + "/eu_lamb.map --vocab " + vocab_), 0);
}

TEST_F(CliTest, TeacherDecodeThenEval) {
  encode_eu_lamb();
  ASSERT_EQ(run("decode --input " + path("gold.jsonl") + " --vocab " + vocab_ +
                " --types " + types_ + " --out " + path("pred.jsonl")),
            0)
      << err();
  const auto record = nlohmann::json::parse(lines_of(read_file(path("pred.jsonl")))[0]);
  EXPECT_EQ(record.at("entities").size(), 3u);
  EXPECT_EQ(record.at("entities")[1].at("text"), "German");
  EXPECT_EQ(record.at("truncated"), false);
  EXPECT_FALSE(record.contains("hallucinations"));

  ASSERT_EQ(run("eval --gold " + path("gold.jsonl") + " --pred " + path("pred.jsonl") +
                " --vocab " + vocab_ + " --types " + types_),
            0)
      << err();
  const auto report = nlohmann::json::parse(lines_of(out())[0]);
  EXPECT_EQ(report.at("micro_f1"), 1.0);
  EXPECT_EQ(report.at("tp"), 3);
}

TEST_F(CliTest, RandomDecodeIsReproducible) {
  write_file(path("text.jsonl"),
             "{\"text\": \"EU rejects German call to boycott British lamb .\"}\n"
             "{\"text\": \"British lamb\"}\n");
  const std::string args = "decode --input " + path("text.jsonl") + " --vocab " + vocab_ +
                           " --types " + types_ + " --scorer random --seed 7";
  ASSERT_EQ(run(args), 0) << err();
  const auto first = out();
  ASSERT_EQ(run(args + " --threads 1"), 0);
  EXPECT_EQ(out(), first);
  EXPECT_EQ(lines_of(first).size(), 2u);

  ASSERT_EQ(run(args + " --unconstrained"), 0);
  for (const auto& line : lines_of(out())) {
    EXPECT_TRUE(nlohmann::json::parse(line).contains("hallucinations"));
  }
}

TEST_F(CliTest, ExternalScores) {
  // A single score line that puts all mass on EOS ends the decode at once.
  const auto vocab = load_vocabulary(vocab_);
  write_file(path("one.jsonl"), "{\"text\": \"EU\"}\n");
  std::vector<double> scores(vocab.size(), 0.0);
  scores[vocab.eos()] = 1.0;
  nlohmann::json line = {{"prefix_len", 2}, {"scores", scores}};
  write_file(path("scores.jsonl"), line.dump() + "\n");
  ASSERT_EQ(run("decode --input " + path("one.jsonl") + " --vocab " + vocab_ +
                " --types " + types_ + " --scorer external --scores " +
                path("scores.jsonl")),
            0)
      << err();
  const auto record = nlohmann::json::parse(out());
  EXPECT_EQ(record.at("steps"), 1);
  EXPECT_TRUE(record.at("entities").empty());
}

TEST_F(CliTest, EvalCountMismatch) {
  encode_eu_lamb();
  write_file(path("pred.jsonl"), "");
  EXPECT_EQ(run("eval --gold " + path("gold.jsonl") + " --pred " + path("pred.jsonl") +
                " --vocab " + vocab_ + " --types " + types_),
            1);
  EXPECT_NE(err().find("SentenceCountMismatch"), std::string::npos);
}

TEST_F(CliTest, Simulate) {
  ASSERT_EQ(run("simulate --trials 0"), 0) << err();
  EXPECT_EQ(out(), "trial,mode,grammar_valid,hallucinations,f1_vs_gold\n");

  ASSERT_EQ(run("simulate --trials 100 --seed 3"), 0) << err();
  const auto csv = out();
  const auto rows = lines_of(csv);
  ASSERT_EQ(rows.size(), 201u);
  std::size_t constrained_valid = 0;
  for (const auto& row : rows) {
    if (row.find(",constrained,1,0,") != std::string::npos) ++constrained_valid;
  }
  EXPECT_EQ(constrained_valid, 100u);
  ASSERT_EQ(run("simulate --trials 100 --seed 3 --threads 3"), 0);
  EXPECT_EQ(out(), csv);

  EXPECT_EQ(run("simulate --vocab-size 3"), 1);
}

// The same entry points without a subprocess.
TEST(CommandsTest, InProcessSimulate) {
  tools::SimulateConfig config;
  config.trials = 5;
  std::ostringstream out, err;
  ASSERT_EQ(tools::cmd_simulate(config, out, err), 0) << err.str();
  EXPECT_EQ(lines_of(out.str()).size(), 11u);
  tools::EvalConfig bad;
  bad.gold = "/nonexistent";
  EXPECT_EQ(tools::cmd_eval(bad, out, err), 1);
}

}  // namespace
}  // namespace inerd
