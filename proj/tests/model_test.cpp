#include <gtest/gtest.h>

#include <string>

#include "possev/model.hpp"

using namespace possev;

namespace {

const char* kShooterText = R"json({
  "universes": {"rings": ["10", "9", "8"]},
  "fuzzy_subsets": {
    "acc": {"universe": "rings", "memberships": {"10": "1", "9": "3/4", "8": "1/2"},
            "class": "skill"},
    "ctr": {"universe": "rings", "memberships": {"10": "1", "9": "0.5"}, "class": "luck"}
  },
  "reference_class": "skill",
  "expressions": {
    "A": {"op": "construct", "fuzzy": "acc", "depth": 2},
    "notA": {"op": "negate", "operand": "A"},
    "B": {"op": "construct", "fuzzy": "ctr", "depth": 2},
    "AorB": {"op": "union", "left": "A", "right": "B", "coupling": "independent", "depth": 2},
    "AandB": {"op": "intersection", "left": "A", "right": "B",
              "coupling": {"permutation": [2, 1, 4, 3]}, "depth": 2},
    "AtoB": {"op": "conditional", "left": "A", "right": "B", "coupling": "anti_diagonal",
             "depth": 2}
  },
  "queries": [
    {"expression": "A", "functional": "bel", "subset": ["10", "9"]},
    {"expression": "notA", "functional": "coverage", "point": "9"},
    {"expression": "AorB", "functional": "pl", "subset": ["9"]},
    {"expression": "AtoB", "functional": "q", "subset": ["(9,10)"]}
  ]
})json";

}  // namespace

TEST(ParseModel, LoadsAndResolvesNames) {
  Model m = parse_model_text(kShooterText);
  EXPECT_EQ(m.universes.size(), 1u);
  EXPECT_EQ(m.fuzzy_subsets.size(), 2u);
  EXPECT_EQ(m.expressions.size(), 6u);
  EXPECT_EQ(m.queries.size(), 4u);
  EXPECT_EQ(m.reference_class, "skill");
  EXPECT_TRUE(m.warnings.empty());
  const Model::FuzzyDef* acc = m.find_fuzzy("acc");
  ASSERT_NE(acc, nullptr);
  EXPECT_EQ(acc->value.value("9"), Rat(3, 4));
  EXPECT_EQ(m.find_fuzzy("ctr")->value.value("9"), Rat(1, 2));  // decimal 0.5 exact
  EXPECT_EQ(m.find_fuzzy("ctr")->value.value("8"), Rat(0));     // omitted point
  EXPECT_EQ(m.polarity_of(*acc), Polarity::synonymous);
  EXPECT_EQ(m.polarity_of(*m.find_fuzzy("ctr")), Polarity::antonymous);
  const Model::ExpressionDef* perm = m.find_expression("AandB");
  ASSERT_NE(perm, nullptr);
  EXPECT_EQ(perm->coupling.kind, Coupling::Kind::permutation);
  EXPECT_EQ(perm->coupling.perm, (std::vector<std::size_t>{1, 0, 3, 2}));  // 1-based in file
}

TEST(ParseModel, RoundTripIsIdentity) {
  Model m = parse_model_text(kShooterText);
  Model again = parse_model_text(write_model(m));
  EXPECT_TRUE(m == again);
  // and the canonical form is a fixed point
  EXPECT_EQ(write_model(m), write_model(again));
}

TEST(ParseModel, MatrixCouplingRoundTrips) {
  Model m = parse_model_text(R"({
    "universes": {"u": ["a"]},
    "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "1/2"}}},
    "expressions": {
      "F": {"op": "construct", "fuzzy": "f", "depth": 1},
      "FF": {"op": "union", "left": "F", "right": "F",
             "coupling": {"matrix": [["1/2", 0], [0, "0.5"]]}, "depth": 1}
    },
    "queries": [{"expression": "FF", "functional": "coverage", "point": "a"}]
  })");
  const Model::ExpressionDef* ff = m.find_expression("FF");
  ASSERT_NE(ff, nullptr);
  EXPECT_EQ(ff->coupling.kind, Coupling::Kind::matrix);
  EXPECT_EQ(ff->coupling.weights[0][0], Rat(1, 2));
  EXPECT_TRUE(m == parse_model_text(write_model(m)));
  // this matrix is the diagonal coupling in disguise
  Evaluator ev(m);
  EXPECT_EQ(evaluate_query(ev.evaluate("FF").body, m.queries[0]), Rat(1, 2));
}

TEST(ParseModel, ErrorsCarryTheRightCodes) {
  auto expect_code = [](const char* text, errc code) {
    try {
      parse_model_text(text);
      FAIL() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  expect_code("{", errc::parse_error);
  expect_code(R"({"bogus_key": 1})", errc::parse_error);
  expect_code(R"({"universes": {"u": ["a", "a"]}})", errc::duplicate_label);
  expect_code(R"({"universes": {"u": []}})", errc::empty_universe);
  expect_code(R"({"fuzzy_subsets": {"f": {"universe": "nope", "memberships": {}}}})",
              errc::unknown_reference);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"z": "1"}}}})",
      errc::unknown_reference);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "3/2"}}}})",
      errc::membership_out_of_range);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {
            "f": {"universe": "u", "memberships": {"a": "1"}, "class": "p"},
            "g": {"universe": "u", "memberships": {"a": "1"}, "class": "q"},
            "h": {"universe": "u", "memberships": {"a": "1"}, "class": "r"}}})",
      errc::parse_error);  // more than two implication classes
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "1"}}},
          "reference_class": "other"})",
      errc::unknown_reference);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "1"}}},
          "expressions": {"E": {"op": "construct", "fuzzy": "f", "depth": 99}}})",
      errc::bad_depth);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "expressions": {"E": {"op": "negate", "operand": "missing"}}})",
      errc::unknown_reference);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "1"}}},
          "expressions": {"E": {"op": "construct", "fuzzy": "f", "depth": 1}},
          "queries": [{"expression": "E", "functional": "mass", "subset": ["a"]}]})",
      errc::bad_query);
  expect_code(
      R"({"universes": {"u": ["a"]},
          "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "1"}}},
          "expressions": {
            "E": {"op": "union", "left": "E", "right": "E", "depth": 1,
                  "coupling": {"permutation": [0, 1]}}}})",
      errc::bad_permutation);  // permutation entries are 1-based
}

TEST(ParseModel, OffGridMembershipsWarnOnce) {
  Model m = parse_model_text(R"({
    "universes": {"u": ["a", "b"]},
    "fuzzy_subsets": {"f": {"universe": "u", "memberships": {"a": "0.3", "b": "1"}}},
    "expressions": {
      "E1": {"op": "construct", "fuzzy": "f", "depth": 2},
      "E2": {"op": "construct", "fuzzy": "f", "depth": 2}
    }
  })");
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_NE(m.warnings[0].find("\"f\""), std::string::npos);
  EXPECT_NE(m.warnings[0].find("3/10"), std::string::npos);
  // the construction really floors: coverage(a) = 1/4
  Evaluator ev(m);
  EXPECT_EQ(coverage(ev.evaluate("E1").body, "a"), Rat(1, 4));
}

TEST(Evaluator, NegateInheritsDepthAndCaches) {
  Model m = parse_model_text(kShooterText);
  Evaluator ev(m);
  const ExprValue& a = ev.evaluate("A");
  EXPECT_EQ(a.depth, 2);
  ASSERT_TRUE(a.levels.has_value());
  const ExprValue& na = ev.evaluate("notA");
  EXPECT_EQ(na.depth, 2);
  for (std::size_t p = 0; p < 3; ++p)
    EXPECT_EQ(coverage(na.body, p), 1 - coverage(a.body, p));
  // memoized: same object back
  EXPECT_EQ(&ev.evaluate("A"), &a);
}

TEST(Evaluator, DetectsCycles) {
  Model m = parse_model_text(R"({
    "universes": {"u": ["a"]},
    "expressions": {
      "X": {"op": "negate", "operand": "Y", "depth": 1},
      "Y": {"op": "negate", "operand": "X", "depth": 1}
    }
  })");
  Evaluator ev(m);
  try {
    ev.evaluate("X");
    FAIL() << "cycle evaluated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
}

TEST(Evaluator, ReLevelsCombinationResultsWhenPossible) {
  // an independent intersection at depth 1 has masses in quarters, so a
  // consuming combination at depth 2 can re-level it
  Model m = parse_model_text(R"({
    "universes": {"u": ["a", "b"]},
    "fuzzy_subsets": {
      "f": {"universe": "u", "memberships": {"a": "1", "b": "1/2"}},
      "g": {"universe": "u", "memberships": {"a": "1/2", "b": "1"}}
    },
    "expressions": {
      "F": {"op": "construct", "fuzzy": "f", "depth": 1},
      "G": {"op": "construct", "fuzzy": "g", "depth": 1},
      "FG": {"op": "intersection", "left": "F", "right": "G", "coupling": "independent", "depth": 1},
      "G2": {"op": "construct", "fuzzy": "g", "depth": 2},
      "FGG": {"op": "intersection", "left": "FG", "right": "G2", "coupling": "diagonal",
              "depth": 2}
    },
    "queries": [{"expression": "FGG", "functional": "coverage", "point": "a"}]
  })");
  Evaluator ev(m);
  EXPECT_EQ(ev.evaluate("FG").depth, 1);
  EXPECT_NO_THROW(ev.evaluate("FGG"));

  // at an incompatible depth the re-leveling failure names the operand
  Model bad = parse_model_text(R"({
    "universes": {"u": ["a", "b"]},
    "fuzzy_subsets": {
      "f": {"universe": "u", "memberships": {"a": "1", "b": "1/2"}},
      "g": {"universe": "u", "memberships": {"a": "1/2", "b": "1"}}
    },
    "expressions": {
      "F": {"op": "construct", "fuzzy": "f", "depth": 1},
      "G": {"op": "construct", "fuzzy": "g", "depth": 1},
      "FG": {"op": "intersection", "left": "F", "right": "G", "coupling": "independent", "depth": 1},
      "G1": {"op": "construct", "fuzzy": "g", "depth": 1},
      "X": {"op": "intersection", "left": "FG", "right": "G1", "coupling": "diagonal",
            "depth": 1}
    }
  })");
  Evaluator evb(bad);
  try {
    evb.evaluate("X");
    FAIL() << "quarter masses re-leveled at depth 1";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::off_grid_mass);
    EXPECT_NE(std::string(e.what()).find("FG"), std::string::npos);
  }
}

TEST(Evaluator, QueriesMatchDirectEngineCalls) {
  Model m = parse_model_text(kShooterText);
  Evaluator ev(m);
  const UniversePtr u = m.universes[0].value;
  FuzzySubset acc = m.find_fuzzy("acc")->value;
  BodyOfEvidence direct = to_body(from_fuzzy(acc, 2));
  EXPECT_EQ(evaluate_query(ev.evaluate("A").body, m.queries[0]),
            belief(direct, Subset::of(u, {"10", "9"})));
  EXPECT_EQ(evaluate_query(ev.evaluate("notA").body, m.queries[1]), Rat(1, 4));

  // ctr is in the opposite class, so B is represented antonymously
  LevelEvidence b_ant = represent(m.find_fuzzy("ctr")->value, Polarity::antonymous, 2);
  EXPECT_EQ(ev.evaluate("B").body, to_body(b_ant));

  Model::QueryDef bogus{.expression = "A", .functional = "bel", .subset = {"zzz"}};
  EXPECT_THROW(evaluate_query(ev.evaluate("A").body, bogus), Error);
}
