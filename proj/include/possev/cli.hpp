#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "possev/error.hpp"
#include "possev/model.hpp"
#include "possev/verify.hpp"

namespace possev::cli {

enum class Format { json, csv };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  raise(errc::unknown_command, "unknown format \"" + s + "\" (expected json or csv)");
}

/// Finished command: formatted text plus the process exit code
/// (0 ok, 1 check failures; input errors surface as exceptions → 2).
struct Outcome {
  int exit_code = 0;
  std::string text;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline Json rat_json(const Rat& r) {
  return Json{{"value", to_fraction_string(r)}, {"decimal", to_decimal_string(r, 6)}};
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline Json report_json(const CheckReport& rep) {
  Json failures = Json::array();
  for (const CheckFailure& f : rep.failures)
    failures.push_back(
        Json{{"context", f.context}, {"expected", f.expected}, {"observed", f.observed}});
  Json notes = Json::array();
  for (const std::string& n : rep.notes) notes.push_back(n);
  return Json{{"name", rep.name},
              {"status", rep.status()},
              {"instances", rep.instances},
              {"skipped_instances", rep.skipped_instances},
              {"failure_count", rep.failure_count},
              {"failures", failures},
              {"notes", notes}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// eval

inline Outcome run_eval(const Model& model, const std::vector<std::string>& only,
                        Format format) {
  for (const std::string& name : only) {
    bool found = false;
    for (const auto& q : model.queries) found = found || q.expression == name;
    require(found, errc::unknown_reference, "no query references expression \"" + name + "\"");
  }
  Evaluator ev(model);
  struct Row {
    const Model::QueryDef* q;
    Rat value;
  };
  std::vector<Row> rows;
  for (const auto& q : model.queries) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), q.expression) == only.end())
      continue;
    rows.push_back({&q, evaluate_query(ev.evaluate(q.expression).body, q)});
  }

  Outcome out;
  if (format == Format::json) {
    Json results = Json::array();
    for (const Row& r : rows) {
      Json item = Json::object();
      item["expression"] = r.q->expression;
      item["functional"] = r.q->functional;
      if (r.q->is_point) {
        item["point"] = r.q->point;
      } else {
        Json s = Json::array();
        for (const std::string& l : r.q->subset) s.push_back(l);
        item["subset"] = s;
      }
      item["value"] = to_fraction_string(r.value);
      item["decimal"] = to_decimal_string(r.value, 6);
      results.push_back(item);
    }
    Json warnings = Json::array();
    for (const std::string& w : model.warnings) warnings.push_back(w);
    Json doc{{"command", "eval"}, {"warnings", warnings}, {"results", results}};
    out.text = doc.dump(2) + "\n";
  } else {
    out.text = "expression,functional,target,value,decimal\n";
    for (const Row& r : rows) {
      const std::string target =
          r.q->is_point ? r.q->point : "{" + detail::join(r.q->subset, ";") + "}";
      out.text += detail::csv_field(r.q->expression) + "," + r.q->functional + "," +
                  detail::csv_field(target) + "," + to_fraction_string(r.value) + "," +
                  to_decimal_string(r.value, 6) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// tabulate

inline Outcome run_tabulate(const Model& model, const std::string& expr_name, Format format) {
  require(model.find_expression(expr_name) != nullptr, errc::unknown_reference,
          "expression \"" + expr_name + "\"");
  Evaluator ev(model);
  const ExprValue& v = ev.evaluate(expr_name);
  const BodyOfEvidence& body = v.body;
  const UniversePtr& u = body.universe();
  require(kappa(body) > 0, errc::zero_kappa,
          "expression \"" + expr_name + "\" has K = 0: belief and plausibility are undefined");
  require(u->size() <= 12, errc::bad_query,
          "tabulate enumerates all subsets and supports at most 12 points");

  struct SubsetRow {
    std::string label;
    std::vector<std::string> labels;
    Rat bel, pl, q;
  };
  std::vector<std::pair<std::string, Rat>> cover_rows;
  for (std::size_t p = 0; p < u->size(); ++p)
    cover_rows.emplace_back(u->labels()[p], coverage(body, p));
  std::vector<SubsetRow> subset_rows;
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << u->size()); ++bits) {
    Mask m(u->size());
    std::vector<std::string> labels;
    for (std::size_t p = 0; p < u->size(); ++p) {
      if (!(bits >> p & 1)) continue;
      m.set(p);
      labels.push_back(u->labels()[p]);
    }
    const Subset c(u, m);
    subset_rows.push_back({"{" + detail::join(labels, ";") + "}", labels, belief(body, c),
                           plausibility(body, c), commonality(body, c)});
  }

  Outcome out;
  if (format == Format::json) {
    Json coverage_arr = Json::array();
    for (const auto& [label, val] : cover_rows)
      coverage_arr.push_back(Json{{"point", label},
                                  {"value", to_fraction_string(val)},
                                  {"decimal", to_decimal_string(val, 6)}});
    Json subsets_arr = Json::array();
    for (const SubsetRow& row : subset_rows) {
      Json labels = Json::array();
      for (const std::string& l : row.labels) labels.push_back(l);
      subsets_arr.push_back(Json{{"subset", labels},
                                 {"bel", detail::rat_json(row.bel)},
                                 {"pl", detail::rat_json(row.pl)},
                                 {"q", detail::rat_json(row.q)}});
    }
    Json warnings = Json::array();
    for (const std::string& w : model.warnings) warnings.push_back(w);
    Json doc{{"command", "tabulate"},
             {"expression", expr_name},
             {"depth", v.depth},
             {"kappa", detail::rat_json(kappa(body))},
             {"warnings", warnings},
             {"coverage", coverage_arr},
             {"subsets", subsets_arr}};
    out.text = doc.dump(2) + "\n";
  } else {
    out.text = "section,target,value,decimal\n";
    out.text += "kappa,," + to_fraction_string(kappa(body)) + "," +
                to_decimal_string(kappa(body), 6) + "\n";
    for (const auto& [label, val] : cover_rows)
      out.text += "coverage," + detail::csv_field(label) + "," + to_fraction_string(val) + "," +
                  to_decimal_string(val, 6) + "\n";
    for (const SubsetRow& row : subset_rows) {
      out.text += "bel," + detail::csv_field(row.label) + "," + to_fraction_string(row.bel) +
                  "," + to_decimal_string(row.bel, 6) + "\n";
      out.text += "pl," + detail::csv_field(row.label) + "," + to_fraction_string(row.pl) + "," +
                  to_decimal_string(row.pl, 6) + "\n";
      out.text += "q," + detail::csv_field(row.label) + "," + to_fraction_string(row.q) + "," +
                  to_decimal_string(row.q, 6) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// check

/// One fuzzy subject for the theorem checkers, carrying its implication
/// class so pairs know their polarity.
struct CheckSubject {
  std::string name;
  std::string implication_class;
  FuzzySubset value;
};

struct CheckSetup {
  std::vector<CheckSubject> subjects;
  int depth = 3;
  std::vector<std::string> notes;
};

inline CheckSetup setup_from_model(const Model& model) {
  CheckSetup setup;
  int depth = 0;
  for (const auto& e : model.expressions) depth = std::max(depth, e.depth);
  setup.depth = std::clamp(depth, 1, 5);
  if (depth == 0) setup.depth = 3;
  for (const auto& f : model.fuzzy_subsets) {
    FuzzySubset snapped = floor_to_grid(f.value, setup.depth);
    bool changed = false;
    for (std::size_t i = 0; i < f.value.universe()->size(); ++i)
      changed = changed || snapped.value(i) != f.value.value(i);
    if (changed)
      setup.notes.push_back("fuzzy subset \"" + f.name + "\" floored to the 2^-" +
                            std::to_string(setup.depth) + " grid for checking");
    setup.subjects.push_back({f.name, f.implication_class, std::move(snapped)});
  }
  require(!setup.subjects.empty(), errc::unknown_reference,
          "model declares no fuzzy subsets to check");
  return setup;
}

/// The bundled check corpus: the worked micro-fixtures plus a seeded batch
/// of random grid fuzzy subsets in two implication classes.
inline CheckSetup builtin_setup(std::uint64_t seed) {
  CheckSetup setup;
  setup.depth = 2;
  const UniversePtr abc = Universe::make({"a", "b", "c"});
  const UniversePtr ab = Universe::make({"a", "b"});
  const UniversePtr one = Universe::make({"a"});
  const UniversePtr rings = Universe::make({"10", "9", "8", "7", "6"});
  setup.subjects.push_back(
      {"gradedThree", "pos",
       FuzzySubset::make(abc, {{"a", Rat(1)}, {"b", Rat(1, 2)}, {"c", Rat(1, 4)}})});
  setup.subjects.push_back(
      {"subnormalPair", "pos", FuzzySubset::make(ab, {{"a", Rat(1, 2)}, {"b", Rat(1, 4)}})});
  setup.subjects.push_back(
      {"leftSlope", "pos", FuzzySubset::make(ab, {{"a", Rat(1)}, {"b", Rat(1, 2)}})});
  setup.subjects.push_back(
      {"rightSlope", "neg", FuzzySubset::make(ab, {{"a", Rat(1, 2)}, {"b", Rat(3, 4)}})});
  setup.subjects.push_back({"half", "pos", FuzzySubset::make(one, {{"a", Rat(1, 2)}})});
  setup.subjects.push_back({"halfAgain", "neg", FuzzySubset::make(one, {{"a", Rat(1, 2)}})});
  setup.subjects.push_back(
      {"veryAccurate", "pos",
       FuzzySubset::make(rings, {{"10", Rat(1)},
                                 {"9", Rat(3, 4)},
                                 {"8", Rat(1, 2)},
                                 {"7", Rat(1, 4)},
                                 {"6", Rat(0)}})});
  Rng rng(seed);
  for (int k = 0; k < 4; ++k) {
    const std::size_t points = 1 + rng.index(3);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < points; ++i)
      labels.push_back("t" + std::to_string(k) + std::to_string(i));
    const UniversePtr u = Universe::make(std::move(labels));
    setup.subjects.push_back({"fuzz" + std::to_string(2 * k), k % 2 ? "neg" : "pos",
                              random_grid_fuzzy(rng, u, setup.depth)});
    setup.subjects.push_back({"fuzz" + std::to_string(2 * k + 1), "pos",
                              random_normal_grid_fuzzy(rng, u, setup.depth)});
  }
  return setup;
}

inline const std::vector<std::string>& theorem_selectors() {
  static const std::vector<std::string> kSelectors = {"fundamental", "operators", "negation",
                                                      "bounds", "dempster"};
  return kSelectors;
}

inline Outcome run_check(const CheckSetup& setup, const std::string& theorem,
                         std::uint64_t seed, int trials, Format format) {
  std::vector<std::string> selected;
  if (theorem == "all") {
    selected = theorem_selectors();
  } else {
    require(std::find(theorem_selectors().begin(), theorem_selectors().end(), theorem) !=
                theorem_selectors().end(),
            errc::unknown_command, "unknown theorem selector \"" + theorem + "\"");
    selected.push_back(theorem);
  }
  require(trials >= 0, errc::bad_query, "trials must be nonnegative");

  struct PairRef {
    const CheckSubject* f1;
    const CheckSubject* f2;
    Polarity polarity;
  };
  std::vector<PairRef> pairs;
  for (std::size_t i = 0; i < setup.subjects.size(); ++i) {
    for (std::size_t j = i + 1; j < setup.subjects.size(); ++j) {
      const CheckSubject& a = setup.subjects[i];
      const CheckSubject& b = setup.subjects[j];
      if (!same_universe(a.value.universe(), b.value.universe())) continue;
      pairs.push_back({&a, &b,
                       a.implication_class == b.implication_class ? Polarity::synonymous
                                                                  : Polarity::antonymous});
    }
  }

  // per-selector seed salts, so a stream is independent of which selectors run
  const auto salt = [](const std::string& sel) -> std::uint64_t {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : sel) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    return h;
  };
  std::vector<CheckReport> reports;
  for (const std::string& sel : selected) {
    Rng srng(seed ^ salt(sel));
    CheckReport merged;
    if (sel == "fundamental") {
      merged.name = "fundamental-equivalence";
      for (const CheckSubject& s : setup.subjects)
        merged.merge(check_fundamental(s.value, setup.depth, trials, srng.next()));
    } else if (sel == "operators") {
      merged.name = "operator-identities";
      if (pairs.empty()) merged.skip("no two fuzzy subsets share a universe");
      for (const PairRef& p : pairs)
        merged.merge(check_operator_identities(p.f1->value, p.f2->value, setup.depth,
                                               p.polarity));
    } else if (sel == "negation") {
      merged.name = "negation-duality";
      for (const CheckSubject& s : setup.subjects) {
        try {
          merged.merge(check_negation_duality(s.value, setup.depth));
        } catch (const Error& e) {
          if (e.code() != errc::degenerate_negation) throw;
          merged.skip("\"" + s.name + "\": " + e.what());
        }
      }
    } else if (sel == "bounds") {
      merged.name = "coupling-bounds";
      if (pairs.empty()) merged.skip("no two fuzzy subsets share a universe");
      for (const PairRef& p : pairs)
        merged.merge(check_coupling_bounds(p.f1->value, p.f2->value, setup.depth, p.polarity,
                                           trials, srng.next()));
    } else {  // dempster
      merged.name = "dempster-correspondence";
      if (pairs.empty()) merged.skip("no two fuzzy subsets share a universe");
      for (const PairRef& p : pairs) {
        try {
          merged.merge(check_dempster_correspondence(p.f1->value, p.f2->value, setup.depth));
        } catch (const Error& e) {
          if (e.code() != errc::total_conflict) throw;
          merged.skip("\"" + p.f1->name + "\" and \"" + p.f2->name + "\" are totally conflicting");
        }
      }
    }
    reports.push_back(std::move(merged));
  }

  bool any_failure = false;
  for (const CheckReport& r : reports) any_failure = any_failure || r.failure_count > 0;

  Outcome out;
  out.exit_code = any_failure ? 1 : 0;
  if (format == Format::json) {
    Json rs = Json::array();
    for (const CheckReport& r : reports) rs.push_back(detail::report_json(r));
    Json notes = Json::array();
    for (const std::string& n : setup.notes) notes.push_back(n);
    Json doc{{"command", "check"},
             {"theorem", theorem},
             {"seed", seed},
             {"trials", trials},
             {"depth", setup.depth},
             {"status", any_failure ? "fail" : "pass"},
             {"notes", notes},
             {"reports", rs}};
    out.text = doc.dump(2) + "\n";
  } else {
    out.text = "name,status,instances,skipped_instances,failure_count\n";
    for (const CheckReport& r : reports)
      out.text += r.name + "," + r.status() + "," + std::to_string(r.instances) + "," +
                  std::to_string(r.skipped_instances) + "," + std::to_string(r.failure_count) +
                  "\n";
  }
  return out;
}

}  // namespace possev::cli
