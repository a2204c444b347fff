#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <utility>

#include "possev/cli.hpp"

using namespace possev;
using cli::Format;
using cli::Outcome;

namespace {

const char* kModelText = R"({
  "universes": {"rings": ["10", "9", "8"]},
  "fuzzy_subsets": {
    "acc": {"universe": "rings", "memberships": {"10": "1", "9": "3/4", "8": "1/2"}}
  },
  "expressions": {
    "A": {"op": "construct", "fuzzy": "acc", "depth": 2},
    "notA": {"op": "negate", "operand": "A"}
  },
  "queries": [
    {"expression": "A", "functional": "bel", "subset": ["10", "9"]},
    {"expression": "A", "functional": "coverage", "point": "9"},
    {"expression": "notA", "functional": "pl", "subset": ["8"]}
  ]
})";

// run a shell command, returning (exit code, stdout)
std::pair<int, std::string> run(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kBin = PE_BINARY_PATH;
const std::string kShooter = std::string(PE_MODEL_DIR) + "/shooter.json";

}  // namespace

TEST(RunEval, JsonCarriesFractionAndDecimal) {
  Model m = parse_model_text(kModelText);
  Outcome out = cli::run_eval(m, {}, Format::json);
  EXPECT_EQ(out.exit_code, 0);
  Json doc = Json::parse(out.text);
  EXPECT_EQ(doc["command"], "eval");
  ASSERT_EQ(doc["results"].size(), 3u);
  // A aggregates to {({10,9,8}):1/2, ({10,9}):1/4, ({10}):1/4}
  EXPECT_EQ(doc["results"][0]["value"], "1/2");
  EXPECT_EQ(doc["results"][0]["decimal"], "0.500000");
  EXPECT_EQ(doc["results"][1]["point"], "9");
  EXPECT_EQ(doc["results"][1]["value"], "3/4");
  // notA = {∅:1/2, ({8}):1/4, ({9,8}):1/4}: nothing non-empty avoids 8
  EXPECT_EQ(doc["results"][2]["value"], "1");
}

TEST(RunEval, QueryFilterAndUnknownName) {
  Model m = parse_model_text(kModelText);
  Outcome out = cli::run_eval(m, {"notA"}, Format::csv);
  EXPECT_EQ(out.text,
            "expression,functional,target,value,decimal\n"
            "notA,pl,{8},1,1.000000\n");
  try {
    cli::run_eval(m, {"nothere"}, Format::json);
    FAIL() << "unknown query name accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::unknown_reference);
  }
}

TEST(RunTabulate, TablesMatchEngineValues) {
  Model m = parse_model_text(kModelText);
  Outcome out = cli::run_tabulate(m, "A", Format::json);
  Json doc = Json::parse(out.text);
  EXPECT_EQ(doc["kappa"]["value"], "1");
  EXPECT_EQ(doc["coverage"][1]["point"], "9");
  EXPECT_EQ(doc["coverage"][1]["value"], "3/4");
  // 8 subsets over 3 points; the empty subset has q = 1
  ASSERT_EQ(doc["subsets"].size(), 8u);
  EXPECT_EQ(doc["subsets"][0]["q"]["value"], "1");
  EXPECT_EQ(doc["subsets"][0]["bel"]["value"], "0");

  try {
    cli::run_tabulate(m, "missing", Format::json);
    FAIL() << "unknown expression accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::unknown_reference);
  }
}

TEST(RunTabulate, ZeroKappaNamesTheExpression) {
  Model m = parse_model_text(R"({
    "universes": {"u": ["a"]},
    "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "0"}}},
    "expressions": {"Z": {"op": "construct", "fuzzy": "f", "depth": 1}}
  })");
  try {
    cli::run_tabulate(m, "Z", Format::json);
    FAIL() << "zero kappa tabulated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::zero_kappa);
    EXPECT_NE(std::string(e.what()).find("\"Z\""), std::string::npos);
  }
}

TEST(RunCheck, BuiltinAllPasses) {
  cli::CheckSetup setup = cli::builtin_setup(7);
  Outcome out = cli::run_check(setup, "all", 7, 10, Format::json);
  EXPECT_EQ(out.exit_code, 0);
  Json doc = Json::parse(out.text);
  EXPECT_EQ(doc["status"], "pass");
  ASSERT_EQ(doc["reports"].size(), 5u);
  for (const auto& r : doc["reports"]) {
    EXPECT_NE(r["status"], "fail") << r["name"];
    EXPECT_EQ(r["failure_count"], 0) << r["name"];
  }
}

TEST(RunCheck, SelectorsAndSetupValidation) {
  cli::CheckSetup setup = cli::builtin_setup(1);
  for (const std::string& sel : cli::theorem_selectors()) {
    Outcome out = cli::run_check(setup, sel, 1, 5, Format::csv);
    EXPECT_EQ(out.exit_code, 0) << sel;
    EXPECT_EQ(out.text.find("name,status"), 0u);
  }
  EXPECT_THROW(cli::run_check(setup, "everything", 1, 5, Format::json), Error);

  Model empty = parse_model_text(R"({"universes": {"u": ["a"]}})");
  EXPECT_THROW(cli::setup_from_model(empty), Error);
}

TEST(RunCheck, ModelSubjectsAreSnappedToGrid) {
  Model m = parse_model_text(R"({
    "universes": {"u": ["a", "b"]},
    "fuzzy_subsets": {
      "f": {"universe": "u", "memberships": {"a": "1", "b": "1/3"}},
      "g": {"universe": "u", "memberships": {"a": "0.5", "b": "1"}}
    },
    "expressions": {"F": {"op": "construct", "fuzzy": "f", "depth": 3}}
  })");
  cli::CheckSetup setup = cli::setup_from_model(m);
  EXPECT_EQ(setup.depth, 3);
  ASSERT_EQ(setup.notes.size(), 1u);
  EXPECT_NE(setup.notes[0].find("\"f\""), std::string::npos);
  EXPECT_EQ(setup.subjects[0].value.value("b"), Rat(2, 8));  // 1/3 floored
  EXPECT_EQ(setup.subjects[1].value.value("a"), Rat(1, 2));  // already on grid
  Outcome out = cli::run_check(setup, "all", 3, 5, Format::json);
  EXPECT_EQ(out.exit_code, 0);
  Json doc = Json::parse(out.text);
  ASSERT_FALSE(doc["notes"].empty());
}

TEST(PeBinary, EvalAgainstBundledModel) {
  auto [code, text] = run(kBin + " eval " + kShooter + " --format csv");
  EXPECT_EQ(code, 0);
  EXPECT_NE(text.find("accurate,coverage,9,3/4,0.750000"), std::string::npos);
  EXPECT_NE(text.find("notAccurate,bel,{8;7;6},3/4,0.750000"), std::string::npos);
}

TEST(PeBinary, TabulateAndOutputFile) {
  std::string path = testing::TempDir() + "pe_tab_out.json";
  auto [code, text] = run(kBin + " tabulate " + kShooter + " --expr accurate --output " + path);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(text, "");  // everything went to the file
  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  Json doc = Json::parse(in);
  EXPECT_EQ(doc["expression"], "accurate");
  EXPECT_EQ(doc["kappa"]["value"], "1");
  std::remove(path.c_str());
}

TEST(PeBinary, CheckBuiltinDeterministicAcrossRuns) {
  const std::string cmd = kBin + " check --builtin --theorem all --seed 11 --trials 8";
  auto [c1, t1] = run(cmd);
  auto [c2, t2] = run(cmd);
  EXPECT_EQ(c1, 0);
  EXPECT_EQ(c2, 0);
  EXPECT_EQ(t1, t2);
  EXPECT_FALSE(t1.empty());
}

TEST(PeBinary, InputErrorsExitTwo) {
  EXPECT_EQ(run(kBin + " eval /nonexistent.json 2>/dev/null").first, 2);
  EXPECT_EQ(run(kBin + " tabulate " + kShooter + " 2>/dev/null").first, 2);  // missing --expr
  EXPECT_EQ(run(kBin + " check --builtin --theorem bogus 2>/dev/null").first, 2);
  EXPECT_EQ(run(kBin + " check 2>/dev/null").first, 2);  // neither model nor --builtin
  EXPECT_EQ(run(kBin + " frobnicate 2>/dev/null").first, 2);
}
