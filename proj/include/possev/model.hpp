#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "possev/error.hpp"
#include "possev/evidence.hpp"
#include "possev/fuzzy.hpp"
#include "possev/levels.hpp"
#include "possev/rational.hpp"
#include "possev/universe.hpp"

namespace possev {

using Json = nlohmann::ordered_json;

/// Declarative inference model: named universes, named fuzzy subsets with an
/// implication class, a DAG of named expressions, and a list of queries.
/// Declaration order is preserved and canonical.
class Model {
 public:
  struct UniverseDef {
    std::string name;
    UniversePtr value;
  };

  struct FuzzyDef {
    std::string name;
    std::string universe;
    std::string implication_class;
    FuzzySubset value;
  };

  struct CouplingSpec {
    Coupling::Kind kind = Coupling::Kind::diagonal;
    std::vector<std::size_t> perm;            // 0-based (files use 1-based)
    std::vector<std::vector<Rat>> weights;

    Coupling build(int depth) const {
      switch (kind) {
        case Coupling::Kind::diagonal: return Coupling::diagonal(depth);
        case Coupling::Kind::anti_diagonal: return Coupling::anti_diagonal(depth);
        case Coupling::Kind::independent: return Coupling::independent(depth);
        case Coupling::Kind::permutation: return Coupling::permutation(depth, perm);
        case Coupling::Kind::matrix: return Coupling::matrix(depth, weights);
      }
      raise(errc::parse_error, "unreachable coupling kind");
    }

    friend bool operator==(const CouplingSpec& a, const CouplingSpec& b) {
      return a.kind == b.kind && a.perm == b.perm && a.weights == b.weights;
    }
  };

  enum class Op { construct, negate, set_union, set_intersection, conditional };

  struct ExpressionDef {
    std::string name;
    Op op = Op::construct;
    std::string fuzzy;        // construct
    std::string operand;      // negate
    std::string left, right;  // binary operations
    int depth = 0;            // 0 on negate: inherit from operand
    CouplingSpec coupling;

    friend bool operator==(const ExpressionDef& a, const ExpressionDef& b) {
      return a.name == b.name && a.op == b.op && a.fuzzy == b.fuzzy && a.operand == b.operand &&
             a.left == b.left && a.right == b.right && a.depth == b.depth &&
             a.coupling == b.coupling;
    }
  };

  struct QueryDef {
    std::string expression;
    std::string functional;  // bel | pl | q | coverage | ignorance
    bool is_point = false;
    std::vector<std::string> subset;
    std::string point;

    friend bool operator==(const QueryDef& a, const QueryDef& b) {
      return a.expression == b.expression && a.functional == b.functional &&
             a.is_point == b.is_point && a.subset == b.subset && a.point == b.point;
    }
  };

  std::vector<UniverseDef> universes;
  std::vector<FuzzyDef> fuzzy_subsets;
  std::vector<ExpressionDef> expressions;
  std::vector<QueryDef> queries;
  std::string reference_class;       // polarity anchor; default: first declared class
  std::vector<std::string> warnings; // filled during validation, not serialized

  const UniverseDef* find_universe(const std::string& name) const {
    for (const auto& d : universes)
      if (d.name == name) return &d;
    return nullptr;
  }
  const FuzzyDef* find_fuzzy(const std::string& name) const {
    for (const auto& d : fuzzy_subsets)
      if (d.name == name) return &d;
    return nullptr;
  }
  const ExpressionDef* find_expression(const std::string& name) const {
    for (const auto& d : expressions)
      if (d.name == name) return &d;
    return nullptr;
  }

  Polarity polarity_of(const FuzzyDef& f) const {
    return f.implication_class == reference_class ? Polarity::synonymous : Polarity::antonymous;
  }

  friend bool operator==(const Model& a, const Model& b) {
    if (a.universes.size() != b.universes.size() ||
        a.fuzzy_subsets.size() != b.fuzzy_subsets.size() ||
        a.expressions.size() != b.expressions.size() || a.queries.size() != b.queries.size() ||
        a.reference_class != b.reference_class)
      return false;
    for (std::size_t i = 0; i < a.universes.size(); ++i) {
      if (a.universes[i].name != b.universes[i].name ||
          a.universes[i].value->labels() != b.universes[i].value->labels())
        return false;
    }
    for (std::size_t i = 0; i < a.fuzzy_subsets.size(); ++i) {
      const auto& x = a.fuzzy_subsets[i];
      const auto& y = b.fuzzy_subsets[i];
      if (x.name != y.name || x.universe != y.universe ||
          x.implication_class != y.implication_class)
        return false;
      for (std::size_t p = 0; p < x.value.universe()->size(); ++p)
        if (x.value.value(p) != y.value.value(p)) return false;
    }
    return a.expressions == b.expressions && a.queries == b.queries;
  }
};

namespace detail {

inline Rat json_to_rat(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    // numbers go through their canonical (shortest round-trip) decimal form,
    // so a literal like 0.3 converts to exactly 3/10
    if (j.is_number()) return parse_rat(j.dump());
  } catch (const Error& e) {
    raise(errc::parse_error, where + ": " + e.what());
  }
  raise(errc::parse_error, where + ": expected a rational as \"p/q\", decimal string, or number");
}

inline const Json& member(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  require(it != j.end(), errc::parse_error, where + ": missing \"" + key + "\"");
  return *it;
}

inline std::string string_member(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  require(v.is_string(), errc::parse_error, where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline int int_member(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  require(v.is_number_integer(), errc::parse_error,
          where + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

inline Model::CouplingSpec parse_coupling(const Json& j, const std::string& where) {
  Model::CouplingSpec spec;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "diagonal") spec.kind = Coupling::Kind::diagonal;
    else if (s == "anti_diagonal") spec.kind = Coupling::Kind::anti_diagonal;
    else if (s == "independent") spec.kind = Coupling::Kind::independent;
    else raise(errc::parse_error, where + ": unknown coupling \"" + s + "\"");
    return spec;
  }
  require(j.is_object(), errc::parse_error,
          where + ": coupling must be a name or {\"permutation\": ...} / {\"matrix\": ...}");
  if (j.contains("permutation")) {
    const Json& p = j["permutation"];
    require(p.is_array(), errc::parse_error, where + ": permutation must be an array");
    spec.kind = Coupling::Kind::permutation;
    for (const Json& v : p) {
      require(v.is_number_integer() && v.get<std::int64_t>() >= 1, errc::bad_permutation,
              where + ": permutation entries are 1-based cell indices");
      spec.perm.push_back(static_cast<std::size_t>(v.get<std::int64_t>() - 1));
    }
    return spec;
  }
  if (j.contains("matrix")) {
    const Json& m = j["matrix"];
    require(m.is_array(), errc::parse_error, where + ": matrix must be an array of rows");
    spec.kind = Coupling::Kind::matrix;
    for (const Json& row : m) {
      require(row.is_array(), errc::parse_error, where + ": matrix rows must be arrays");
      std::vector<Rat> r;
      for (const Json& v : row) r.push_back(json_to_rat(v, where + " matrix entry"));
      spec.weights.push_back(std::move(r));
    }
    return spec;
  }
  raise(errc::parse_error, where + ": coupling object needs \"permutation\" or \"matrix\"");
}

inline Json coupling_to_json(const Model::CouplingSpec& spec) {
  switch (spec.kind) {
    case Coupling::Kind::diagonal: return "diagonal";
    case Coupling::Kind::anti_diagonal: return "anti_diagonal";
    case Coupling::Kind::independent: return "independent";
    case Coupling::Kind::permutation: {
      Json arr = Json::array();
      for (std::size_t v : spec.perm) arr.push_back(v + 1);
      return Json{{"permutation", arr}};
    }
    case Coupling::Kind::matrix: {
      Json rows = Json::array();
      for (const auto& row : spec.weights) {
        Json r = Json::array();
        for (const Rat& w : row) r.push_back(to_fraction_string(w));
        rows.push_back(r);
      }
      return Json{{"matrix", rows}};
    }
  }
  return nullptr;
}

}  // namespace detail

/// Parses and validates a model document. All names must resolve, at most
/// two implication classes may appear, and every membership used by a
/// construct expression that is off that expression's grid is warned about.
inline Model parse_model(const Json& doc) {
  require(doc.is_object(), errc::parse_error, "model: top level must be an object");
  static const std::set<std::string> known_keys = {"universes", "fuzzy_subsets", "expressions",
                                                   "queries", "reference_class"};
  for (const auto& [key, value] : doc.items())
    require(known_keys.count(key) > 0, errc::parse_error, "model: unknown key \"" + key + "\"");
  Model m;

  if (doc.contains("universes")) {
    const Json& us = doc["universes"];
    require(us.is_object(), errc::parse_error, "model: \"universes\" must be an object");
    for (const auto& [name, labels] : us.items()) {
      require(labels.is_array(), errc::parse_error,
              "universe \"" + name + "\": labels must be an array");
      std::vector<std::string> ls;
      for (const Json& l : labels) {
        require(l.is_string(), errc::parse_error,
                "universe \"" + name + "\": labels must be strings");
        ls.push_back(l.get<std::string>());
      }
      require(m.find_universe(name) == nullptr, errc::duplicate_label,
              "universe \"" + name + "\" defined twice");
      m.universes.push_back({name, Universe::make(std::move(ls))});
    }
  }

  std::vector<std::string> classes;
  if (doc.contains("fuzzy_subsets")) {
    const Json& fs = doc["fuzzy_subsets"];
    require(fs.is_object(), errc::parse_error, "model: \"fuzzy_subsets\" must be an object");
    for (const auto& [name, def] : fs.items()) {
      const std::string where = "fuzzy subset \"" + name + "\"";
      require(def.is_object(), errc::parse_error, where + ": must be an object");
      const std::string uname = detail::string_member(def, "universe", where);
      const Model::UniverseDef* u = m.find_universe(uname);
      require(u != nullptr, errc::unknown_reference, where + ": universe \"" + uname + "\"");
      const Json& ms = detail::member(def, "memberships", where);
      require(ms.is_object(), errc::parse_error, where + ": \"memberships\" must be an object");
      std::map<std::string, Rat> values;
      for (const auto& [label, v] : ms.items()) {
        require(u->value->find(label).has_value(), errc::unknown_reference,
                where + ": point \"" + label + "\" is not in universe \"" + uname + "\"");
        values[label] = detail::json_to_rat(v, where + " at \"" + label + "\"");
      }
      std::string cls = def.contains("class") ? detail::string_member(def, "class", where)
                                              : std::string("default");
      require(m.find_fuzzy(name) == nullptr, errc::duplicate_label,
              where + " defined twice");
      m.fuzzy_subsets.push_back({name, uname, cls, FuzzySubset::make(u->value, values)});
      if (std::find(classes.begin(), classes.end(), cls) == classes.end())
        classes.push_back(cls);
    }
  }
  require(classes.size() <= 2, errc::parse_error,
          "model: more than two implication classes declared");
  if (doc.contains("reference_class")) {
    const Json& rc = doc["reference_class"];
    require(rc.is_string(), errc::parse_error, "model: \"reference_class\" must be a string");
    m.reference_class = rc.get<std::string>();
    require(std::find(classes.begin(), classes.end(), m.reference_class) != classes.end(),
            errc::unknown_reference,
            "reference class \"" + m.reference_class + "\" matches no fuzzy subset");
  } else if (!classes.empty()) {
    m.reference_class = classes.front();
  }

  if (doc.contains("expressions")) {
    const Json& es = doc["expressions"];
    require(es.is_object(), errc::parse_error, "model: \"expressions\" must be an object");
    for (const auto& [name, def] : es.items()) {
      const std::string where = "expression \"" + name + "\"";
      require(def.is_object(), errc::parse_error, where + ": must be an object");
      Model::ExpressionDef e;
      e.name = name;
      const std::string op = detail::string_member(def, "op", where);
      if (op == "construct") {
        e.op = Model::Op::construct;
        e.fuzzy = detail::string_member(def, "fuzzy", where);
        require(m.find_fuzzy(e.fuzzy) != nullptr, errc::unknown_reference,
                where + ": fuzzy subset \"" + e.fuzzy + "\"");
        e.depth = detail::int_member(def, "depth", where);
        require_depth(e.depth);
      } else if (op == "negate") {
        e.op = Model::Op::negate;
        e.operand = detail::string_member(def, "operand", where);
        if (def.contains("depth")) {
          e.depth = detail::int_member(def, "depth", where);
          require_depth(e.depth);
        }
      } else if (op == "union" || op == "intersection" || op == "conditional") {
        e.op = op == "union" ? Model::Op::set_union
               : op == "intersection" ? Model::Op::set_intersection
                                      : Model::Op::conditional;
        e.left = detail::string_member(def, "left", where);
        e.right = detail::string_member(def, "right", where);
        e.depth = detail::int_member(def, "depth", where);
        require_depth(e.depth);
        e.coupling = def.contains("coupling")
                         ? detail::parse_coupling(def["coupling"], where)
                         : Model::CouplingSpec{};
      } else {
        raise(errc::parse_error, where + ": unknown op \"" + op + "\"");
      }
      require(m.find_expression(name) == nullptr, errc::duplicate_label,
              where + " defined twice");
      m.expressions.push_back(std::move(e));
    }
    // operand names must resolve to an expression (forward references allowed)
    for (const auto& e : m.expressions) {
      for (const std::string* ref : {&e.operand, &e.left, &e.right}) {
        if (!ref->empty())
          require(m.find_expression(*ref) != nullptr, errc::unknown_reference,
                  "expression \"" + e.name + "\": operand \"" + *ref + "\"");
      }
    }
  }

  if (doc.contains("queries")) {
    const Json& qs = doc["queries"];
    require(qs.is_array(), errc::parse_error, "model: \"queries\" must be an array");
    for (const Json& q : qs) {
      const std::string where = "query " + std::to_string(m.queries.size() + 1);
      require(q.is_object(), errc::parse_error, where + ": must be an object");
      Model::QueryDef d;
      d.expression = detail::string_member(q, "expression", where);
      require(m.find_expression(d.expression) != nullptr, errc::unknown_reference,
              where + ": expression \"" + d.expression + "\"");
      d.functional = detail::string_member(q, "functional", where);
      static const std::set<std::string> fns = {"bel", "pl", "q", "coverage", "ignorance"};
      require(fns.count(d.functional) > 0, errc::bad_query,
              where + ": unknown functional \"" + d.functional + "\"");
      if (d.functional == "coverage") {
        d.is_point = true;
        d.point = detail::string_member(q, "point", where);
      } else {
        const Json& s = detail::member(q, "subset", where);
        require(s.is_array(), errc::parse_error, where + ": \"subset\" must be an array");
        for (const Json& l : s) {
          require(l.is_string(), errc::parse_error, where + ": subset labels must be strings");
          d.subset.push_back(l.get<std::string>());
        }
      }
      m.queries.push_back(std::move(d));
    }
  }

  // warn once per (fuzzy, construct depth) with off-grid memberships
  std::set<std::pair<std::string, int>> warned;
  for (const auto& e : m.expressions) {
    if (e.op != Model::Op::construct || !warned.insert({e.fuzzy, e.depth}).second) continue;
    const Model::FuzzyDef* f = m.find_fuzzy(e.fuzzy);
    std::string bad;
    for (std::size_t i = 0; i < f->value.universe()->size(); ++i) {
      if (on_grid(f->value.value(i), e.depth)) continue;
      if (!bad.empty()) bad += ", ";
      bad += f->value.universe()->labels()[i] + "=" + to_fraction_string(f->value.value(i));
    }
    if (!bad.empty())
      m.warnings.push_back("fuzzy subset \"" + e.fuzzy + "\" has memberships off the 2^-" +
                           std::to_string(e.depth) + " grid (floored in construction): " + bad);
  }
  return m;
}

inline Model parse_model_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(errc::parse_error, e.what());
  }
  return parse_model(doc);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::parse_error, "cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

/// Canonical serialization: declaration order, memberships in universe label
/// order, rationals as fraction strings. parse_model(model_to_json(m)) == m.
inline Json model_to_json(const Model& m) {
  Json doc = Json::object();
  Json us = Json::object();
  for (const auto& u : m.universes) {
    Json labels = Json::array();
    for (const std::string& l : u.value->labels()) labels.push_back(l);
    us[u.name] = labels;
  }
  doc["universes"] = us;
  Json fs = Json::object();
  for (const auto& f : m.fuzzy_subsets) {
    Json ms = Json::object();
    for (std::size_t i = 0; i < f.value.universe()->size(); ++i)
      ms[f.value.universe()->labels()[i]] = to_fraction_string(f.value.value(i));
    fs[f.name] = Json{{"universe", f.universe}, {"memberships", ms},
                      {"class", f.implication_class}};
  }
  doc["fuzzy_subsets"] = fs;
  if (!m.reference_class.empty()) doc["reference_class"] = m.reference_class;
  Json es = Json::object();
  for (const auto& e : m.expressions) {
    Json d = Json::object();
    switch (e.op) {
      case Model::Op::construct:
        d["op"] = "construct";
        d["fuzzy"] = e.fuzzy;
        d["depth"] = e.depth;
        break;
      case Model::Op::negate:
        d["op"] = "negate";
        d["operand"] = e.operand;
        if (e.depth != 0) d["depth"] = e.depth;
        break;
      case Model::Op::set_union:
      case Model::Op::set_intersection:
      case Model::Op::conditional:
        d["op"] = e.op == Model::Op::set_union ? "union"
                  : e.op == Model::Op::set_intersection ? "intersection"
                                                        : "conditional";
        d["left"] = e.left;
        d["right"] = e.right;
        d["coupling"] = detail::coupling_to_json(e.coupling);
        d["depth"] = e.depth;
        break;
    }
    es[e.name] = d;
  }
  doc["expressions"] = es;
  Json qs = Json::array();
  for (const auto& q : m.queries) {
    Json d = Json::object();
    d["expression"] = q.expression;
    d["functional"] = q.functional;
    if (q.is_point) {
      d["point"] = q.point;
    } else {
      Json s = Json::array();
      for (const std::string& l : q.subset) s.push_back(l);
      d["subset"] = s;
    }
    qs.push_back(d);
  }
  doc["queries"] = qs;
  return doc;
}

inline std::string write_model(const Model& m) { return model_to_json(m).dump(2) + "\n"; }

/// A fully evaluated expression: always an aggregated body; the level form
/// is kept when the construction produced one directly.
struct ExprValue {
  int depth = 0;
  BodyOfEvidence body;
  std::optional<LevelEvidence> levels;
};

/// Resolves the expression DAG with memoization. Combination operands are
/// re-leveled to the combining expression's depth via from_body, so a
/// combined body can feed another combination whenever its masses fit that
/// grid (e.g. an independent-coupling result at depth n re-levels at 2n).
class Evaluator {
 public:
  explicit Evaluator(const Model& model) : model_(model) {}

  const ExprValue& evaluate(const std::string& name) {
    auto memo = cache_.find(name);
    if (memo != cache_.end()) return memo->second;
    const Model::ExpressionDef* e = model_.find_expression(name);
    require(e != nullptr, errc::unknown_reference, "expression \"" + name + "\"");
    require(visiting_.insert(name).second, errc::parse_error,
            "expression \"" + name + "\" references itself (cycle)");
    ExprValue v = evaluate_def(*e);
    visiting_.erase(name);
    return cache_.emplace(name, std::move(v)).first->second;
  }

 private:
  LevelEvidence levels_at(const ExprValue& v, int depth, const std::string& who) {
    if (v.levels && v.levels->depth() == depth) return *v.levels;
    try {
      return from_body(v.body, depth);
    } catch (const Error& e) {
      if (e.code() != errc::off_grid_mass) throw;
      raise(errc::off_grid_mass,
            "operand \"" + who + "\" cannot be re-leveled at depth " + std::to_string(depth) +
                ": " + e.what());
    }
  }

  ExprValue evaluate_def(const Model::ExpressionDef& e) {
    switch (e.op) {
      case Model::Op::construct: {
        const Model::FuzzyDef* f = model_.find_fuzzy(e.fuzzy);
        LevelEvidence le = represent(f->value, model_.polarity_of(*f), e.depth);
        return {e.depth, to_body(le), std::move(le)};
      }
      case Model::Op::negate: {
        const ExprValue& operand = evaluate(e.operand);
        const int depth = e.depth != 0 ? e.depth : operand.depth;
        LevelEvidence le = negate_levels(levels_at(operand, depth, e.operand));
        return {depth, to_body(le), std::move(le)};
      }
      case Model::Op::set_union:
      case Model::Op::set_intersection: {
        const ExprValue& l = evaluate(e.left);
        const ExprValue& r = evaluate(e.right);
        LevelEvidence ll = levels_at(l, e.depth, e.left);
        LevelEvidence rl = levels_at(r, e.depth, e.right);
        const SetOp op =
            e.op == Model::Op::set_union ? SetOp::set_union : SetOp::set_intersection;
        return {e.depth, combine(ll, rl, op, e.coupling.build(e.depth)), std::nullopt};
      }
      case Model::Op::conditional: {
        const ExprValue& l = evaluate(e.left);
        const ExprValue& r = evaluate(e.right);
        LevelEvidence ll = levels_at(l, e.depth, e.left);
        LevelEvidence rl = levels_at(r, e.depth, e.right);
        ProductUniversePtr p = ProductUniverse::make(ll.universe(), rl.universe());
        return {e.depth, conditional(ll, rl, p, e.coupling.build(e.depth)), std::nullopt};
      }
    }
    raise(errc::parse_error, "unreachable expression op");
  }

  const Model& model_;
  std::map<std::string, ExprValue> cache_;
  std::unordered_set<std::string> visiting_;
};

/// Evaluates one query against an expression's body.
inline Rat evaluate_query(const BodyOfEvidence& body, const Model::QueryDef& q) {
  const UniversePtr& u = body.universe();
  if (q.is_point) {
    require(u->find(q.point).has_value(), errc::unknown_reference,
            "query point \"" + q.point + "\" is not in the universe of \"" + q.expression +
                "\"");
    return coverage(body, q.point);
  }
  for (const std::string& l : q.subset)
    require(u->find(l).has_value(), errc::unknown_reference,
            "query label \"" + l + "\" is not in the universe of \"" + q.expression + "\"");
  const Subset c = Subset::of(u, q.subset);
  if (q.functional == "bel") return belief(body, c);
  if (q.functional == "pl") return plausibility(body, c);
  if (q.functional == "q") return commonality(body, c);
  if (q.functional == "ignorance") return ignorance(body, c);
  raise(errc::bad_query, "unknown functional \"" + q.functional + "\"");
}

}  // namespace possev
