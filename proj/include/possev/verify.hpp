#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "possev/error.hpp"
#include "possev/evidence.hpp"
#include "possev/fuzzy.hpp"
#include "possev/levels.hpp"
#include "possev/rational.hpp"
#include "possev/universe.hpp"

namespace possev {

struct CheckFailure {
  std::string context;   // which inputs
  std::string expected;  // the relation that should hold
  std::string observed;  // what actually came out
};

/// Outcome of one checker run (or a merge of many). Failures are hard
/// violations; notes carry informational observations and sub-check skips.
struct CheckReport {
  static constexpr std::size_t kMaxRecordedFailures = 32;
  static constexpr std::size_t kMaxRecordedNotes = 64;

  std::string name;
  std::int64_t instances = 0;
  std::int64_t skipped_instances = 0;
  std::int64_t failure_count = 0;
  std::vector<CheckFailure> failures;  // first kMaxRecordedFailures only
  std::vector<std::string> notes;

  void fail(std::string context, std::string expected, std::string observed) {
    ++failure_count;
    if (failures.size() < kMaxRecordedFailures)
      failures.push_back({std::move(context), std::move(expected), std::move(observed)});
  }

  void note(std::string text) {
    if (notes.size() < kMaxRecordedNotes) notes.push_back(std::move(text));
  }

  void skip(const std::string& reason) {
    ++skipped_instances;
    note("skipped: " + reason);
  }

  std::string status() const {
    if (instances == 0 && skipped_instances > 0) return "skipped";
    return (failure_count == 0 && instances >= 1) ? "pass" : "fail";
  }

  bool passed() const { return status() == "pass"; }

  /// Associative, order-fixed aggregation of per-instance reports.
  void merge(const CheckReport& other) {
    instances += other.instances;
    skipped_instances += other.skipped_instances;
    failure_count += other.failure_count;
    for (const CheckFailure& f : other.failures) {
      if (failures.size() >= kMaxRecordedFailures) break;
      failures.push_back(f);
    }
    for (const std::string& n : other.notes) {
      if (notes.size() >= kMaxRecordedNotes) break;
      notes.push_back(n);
    }
  }
};

/// Deterministic RNG for all fuzzing. Draws below a bound use rejection, so
/// sequences depend only on the seed, never on the platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  std::uint64_t below(std::uint64_t bound) {
    // reject the tail that would bias the modulus
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    std::uint64_t r;
    do {
      r = gen_();
    } while (limit != 0 && r >= limit);
    return r % bound;
  }

  std::size_t index(std::size_t bound) { return static_cast<std::size_t>(below(bound)); }

 private:
  std::mt19937_64 gen_;
};

/// Uniform membership on the depth-n grid per point; an all-zero draw gets
/// one point bumped so downstream belief functions stay defined.
inline FuzzySubset random_grid_fuzzy(Rng& rng, const UniversePtr& universe, int depth) {
  require_depth(depth);
  const std::uint64_t den = std::uint64_t(1) << depth;
  std::vector<Rat> values;
  values.reserve(universe->size());
  bool any = false;
  for (std::size_t i = 0; i < universe->size(); ++i) {
    std::uint64_t k = rng.below(den + 1);
    any = any || k > 0;
    values.emplace_back(Int(k), Int(den));
  }
  if (!any) values[rng.index(universe->size())] = Rat(Int(rng.below(den) + 1), Int(den));
  return FuzzySubset::from_values(universe, std::move(values));
}

inline FuzzySubset random_normal_grid_fuzzy(Rng& rng, const UniversePtr& universe, int depth) {
  FuzzySubset f = random_grid_fuzzy(rng, universe, depth);
  std::vector<Rat> values;
  values.reserve(universe->size());
  for (std::size_t i = 0; i < universe->size(); ++i) values.push_back(f.value(i));
  values[rng.index(universe->size())] = 1;
  return FuzzySubset::from_values(universe, std::move(values));
}

inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> pi(n);
  std::iota(pi.begin(), pi.end(), std::size_t(0));
  for (std::size_t i = n; i > 1; --i) std::swap(pi[i - 1], pi[rng.index(i)]);
  return pi;
}

namespace detail {

inline std::vector<Mask> equivalence_walk(std::vector<Mask> cells, std::size_t points, Rng& rng,
                                          int steps, bool preserve_kappa) {
  std::vector<std::size_t> holders, lackers;
  for (int s = 0; s < steps; ++s) {
    const std::size_t p = rng.index(points);
    holders.clear();
    lackers.clear();
    for (std::size_t i = 0; i < cells.size(); ++i)
      (cells[i].test(p) ? holders : lackers).push_back(i);
    if (holders.empty() || lackers.empty()) continue;
    const std::size_t i = holders[rng.index(holders.size())];
    const std::size_t j = lackers[rng.index(lackers.size())];
    if (preserve_kappa) {
      const bool empties_source = cells[i].count() == 1;
      const bool fills_target = cells[j].none();
      if (empties_source != fills_target) continue;  // would change the non-empty count
    }
    cells[i].reset(p);
    cells[j].set(p);
  }
  return cells;
}

}  // namespace detail

/// Random walk through the class of bodies sharing the input's coverage:
/// each step moves one point from a cell holding it to a cell lacking it,
/// rejecting moves that would change the number of non-empty cells (and so
/// K). Coverage is invariant under every accepted move.
inline LevelEvidence sample_equivalent(const LevelEvidence& le, std::uint64_t seed, int steps) {
  Rng rng(seed);
  return LevelEvidence::from_cells(
      le.universe(), le.depth(),
      detail::equivalence_walk(le.cells(), le.universe()->size(), rng, steps, true));
}

inline void require_on_grid(const FuzzySubset& f, int depth) {
  std::string bad;
  for (std::size_t i = 0; i < f.universe()->size(); ++i) {
    if (!on_grid(f.value(i), depth)) {
      if (!bad.empty()) bad += ", ";
      bad += f.universe()->labels()[i] + "=" + to_fraction_string(f.value(i));
    }
  }
  require(bad.empty(), errc::off_grid_membership,
          "memberships not multiples of 2^-" + std::to_string(depth) + ": " + bad);
}

namespace detail {

inline std::uint64_t to_u64(const Mask& m) {
  require(m.size() <= 64, errc::bad_query, "checker fast path supports at most 64 points");
  std::uint64_t out = 0;
  for (std::size_t i = m.find_first(); i != Mask::npos; i = m.find_next(i))
    out |= std::uint64_t(1) << i;
  return out;
}

inline std::vector<std::uint64_t> to_u64_cells(const LevelEvidence& le) {
  std::vector<std::uint64_t> out;
  out.reserve(le.cell_count());
  for (const Mask& c : le.cells()) out.push_back(to_u64(c));
  return out;
}

inline Mask mask_from_u64(std::uint64_t bits, std::size_t points) {
  Mask m(points);
  for (std::size_t i = 0; i < points; ++i)
    if (bits >> i & 1) m.set(i);
  return m;
}

/// All 2^points subsets when points ≤ 12; otherwise ∅, Θ, the singletons and
/// random draws up to 2048 (the caller notes the sampling).
inline std::vector<std::uint64_t> subset_pool(std::size_t points, Rng& rng, bool* sampled) {
  require(points >= 1 && points <= 64, errc::bad_query,
          "subset enumeration supports 1..64 points");
  const std::uint64_t full =
      points == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << points) - 1;
  std::vector<std::uint64_t> pool;
  if (points <= 12) {
    *sampled = false;
    pool.resize(std::size_t(1) << points);
    std::iota(pool.begin(), pool.end(), std::uint64_t(0));
    return pool;
  }
  *sampled = true;
  pool.push_back(0);
  pool.push_back(full);
  for (std::size_t i = 0; i < points; ++i) pool.push_back(std::uint64_t(1) << i);
  while (pool.size() < 2048) pool.push_back(rng.next() & full);
  return pool;
}

// Integer forms of the evidence functionals over equally weighted result
// sets: each count is the functional times (number of results) — shared
// normalizers cancel in every comparison made below.
inline std::int64_t count_nonempty(const std::vector<std::uint64_t>& r) {
  std::int64_t c = 0;
  for (std::uint64_t m : r) c += m != 0;
  return c;
}
inline std::int64_t count_covering(const std::vector<std::uint64_t>& r, std::uint64_t point_bit) {
  std::int64_t c = 0;
  for (std::uint64_t m : r) c += (m & point_bit) != 0;
  return c;
}
inline std::int64_t count_superset(const std::vector<std::uint64_t>& r, std::uint64_t set) {
  std::int64_t c = 0;
  for (std::uint64_t m : r) c += (m & set) == set;
  return c;
}
inline std::int64_t count_subset_nonempty(const std::vector<std::uint64_t>& r, std::uint64_t set) {
  std::int64_t c = 0;
  for (std::uint64_t m : r) c += m != 0 && (m & ~set) == 0;
  return c;
}
inline std::int64_t count_intersecting(const std::vector<std::uint64_t>& r, std::uint64_t set) {
  std::int64_t c = 0;
  for (std::uint64_t m : r) c += (m & set) != 0;
  return c;
}

inline std::string describe(const FuzzySubset& f) {
  std::string out = "{";
  for (std::size_t i = 0; i < f.universe()->size(); ++i) {
    if (i) out += ",";
    out += f.universe()->labels()[i] + ":" + to_fraction_string(f.value(i));
  }
  return out + "}";
}

inline std::string describe_subset(const UniversePtr& u, std::uint64_t bits) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < u->size(); ++i) {
    if (!(bits >> i & 1)) continue;
    if (!first) out += ",";
    out += u->labels()[i];
    first = false;
  }
  return out + "}";
}

inline std::string describe_permutation(const std::vector<std::size_t>& pi) {
  std::string out = "[";
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(pi[i] + 1);  // 1-based, matching the file format
  }
  return out + "]";
}

}  // namespace detail

/// The λ-cut body reproduces the possibility, necessity and commonality of
/// its fuzzy source exactly, and is extremal among coverage-equivalent
/// bodies: no equivalent has smaller Pl, larger Bel (same K) or larger Q
/// (any K).
inline CheckReport check_fundamental(const FuzzySubset& f, int depth, int equivalents,
                                     std::uint64_t seed) {
  CheckReport rep{.name = "fundamental-equivalence"};
  require_on_grid(f, depth);
  const UniversePtr& u = f.universe();
  const LevelEvidence le0 = from_fuzzy(f, depth);
  const BodyOfEvidence b0 = to_body(le0);
  if (height(f) == 0) {
    rep.skip("height 0: belief and plausibility undefined for " + detail::describe(f));
    return rep;
  }

  Rng rng(seed);
  bool sampled = false;
  const std::vector<std::uint64_t> pool = detail::subset_pool(u->size(), rng, &sampled);
  if (sampled) rep.note("subset enumeration sampled (" + std::to_string(pool.size()) + " sets)");
  const std::string fd = detail::describe(f);

  for (std::uint64_t cbits : pool) {
    const Subset c(u, detail::mask_from_u64(cbits, u->size()));
    const std::string ctx = "f=" + fd + ", C=" + detail::describe_subset(u, cbits);
    const Rat pi = possibility(f, c), pl = plausibility(b0, c);
    if (pi != pl)
      rep.fail(ctx, "possibility equals plausibility",
               to_fraction_string(pi) + " vs " + to_fraction_string(pl));
    const Rat nec = necessity(f, c), bel = belief(b0, c);
    if (nec != bel)
      rep.fail(ctx, "necessity equals belief",
               to_fraction_string(nec) + " vs " + to_fraction_string(bel));
    if (cbits != 0) {
      const Rat qf = fuzzy_commonality(f, c), qb = commonality(b0, c);
      if (qf != qb)
        rep.fail(ctx, "fuzzy commonality equals body commonality",
                 to_fraction_string(qf) + " vs " + to_fraction_string(qb));
    }
    ++rep.instances;
  }

  // extremality against coverage-equivalent mutants
  const std::vector<std::uint64_t> base = detail::to_u64_cells(le0);
  std::vector<std::int64_t> pl0(pool.size()), bel0(pool.size()), q0(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    pl0[k] = detail::count_intersecting(base, pool[k]);
    bel0[k] = detail::count_subset_nonempty(base, pool[k]);
    q0[k] = detail::count_superset(base, pool[k]);
  }
  const int steps = 4 * static_cast<int>(le0.cell_count()) + 8;
  for (int e = 0; e < equivalents; ++e) {
    const LevelEvidence mut = sample_equivalent(le0, rng.next(), steps);
    const std::vector<std::uint64_t> mc = detail::to_u64_cells(mut);
    // same-K mutant: all three directions
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const std::string ctx = "f=" + fd + ", mutant " + std::to_string(e + 1) + ", C=" +
                              detail::describe_subset(u, pool[k]);
      if (pl0[k] > detail::count_intersecting(mc, pool[k]))
        rep.fail(ctx, "cut body has minimal plausibility",
                 std::to_string(pl0[k]) + " > " +
                     std::to_string(detail::count_intersecting(mc, pool[k])) + " (cell counts)");
      if (bel0[k] < detail::count_subset_nonempty(mc, pool[k]))
        rep.fail(ctx, "cut body has maximal belief",
                 std::to_string(bel0[k]) + " < " +
                     std::to_string(detail::count_subset_nonempty(mc, pool[k])) +
                     " (cell counts)");
      if (q0[k] < detail::count_superset(mc, pool[k]))
        rep.fail(ctx, "cut body has maximal commonality",
                 std::to_string(q0[k]) + " < " +
                     std::to_string(detail::count_superset(mc, pool[k])) + " (cell counts)");
    }
    ++rep.instances;
    // free mutant (K may drift): only the commonality direction is claimed
    Rng walk(rng.next());
    const std::vector<std::uint64_t> fc = detail::to_u64_cells(LevelEvidence::from_cells(
        u, depth, detail::equivalence_walk(le0.cells(), u->size(), walk, steps, false)));
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (pool[k] != 0 && q0[k] < detail::count_superset(fc, pool[k]))
        rep.fail("f=" + fd + ", free mutant " + std::to_string(e + 1) + ", C=" +
                     detail::describe_subset(u, pool[k]),
                 "cut body has maximal commonality (no K constraint)",
                 std::to_string(q0[k]) + " < " +
                     std::to_string(detail::count_superset(fc, pool[k])) + " (cell counts)");
    }
    ++rep.instances;
  }
  return rep;
}

/// Combined coverage matches the classical pointwise operators exactly:
/// max/min under the diagonal, probabilistic sum/product under independence,
/// bounded sum/difference under the anti-diagonal, and the matching
/// implication family for the conditional; antonymous polarity swaps the
/// diagonal and anti-diagonal columns. Also: a concept joined with its own
/// negation is certainty, met with it is contradiction.
inline CheckReport check_operator_identities(const FuzzySubset& f1, const FuzzySubset& f2,
                                             int depth, Polarity polarity) {
  CheckReport rep{.name = "operator-identities"};
  require_same_universe(f1.universe(), f2.universe());
  require_on_grid(f1, depth);
  require_on_grid(f2, depth);
  const UniversePtr& u = f1.universe();
  const LevelEvidence le1 = from_fuzzy(f1, depth);
  const LevelEvidence le2 = represent(f2, polarity, depth);
  const std::string ctx_base =
      "f1=" + detail::describe(f1) + ", f2=" + detail::describe(f2) + ", " +
      (polarity == Polarity::synonymous ? "synonymous" : "antonymous");
  const bool swap = polarity == Polarity::antonymous;

  struct Identity {
    SetOp op;
    Coupling coupling;
    OperatorKind kind;
    const char* label;
  };
  const std::vector<Identity> identities = {
      {SetOp::set_union, Coupling::diagonal(depth),
       swap ? OperatorKind::bounded_sum : OperatorKind::zadeh_union, "union/diagonal"},
      {SetOp::set_union, Coupling::independent(depth), OperatorKind::prob_sum,
       "union/independent"},
      {SetOp::set_union, Coupling::anti_diagonal(depth),
       swap ? OperatorKind::zadeh_union : OperatorKind::bounded_sum, "union/anti-diagonal"},
      {SetOp::set_intersection, Coupling::diagonal(depth),
       swap ? OperatorKind::bounded_difference : OperatorKind::zadeh_intersection,
       "intersection/diagonal"},
      {SetOp::set_intersection, Coupling::independent(depth), OperatorKind::product,
       "intersection/independent"},
      {SetOp::set_intersection, Coupling::anti_diagonal(depth),
       swap ? OperatorKind::zadeh_intersection : OperatorKind::bounded_difference,
       "intersection/anti-diagonal"},
  };
  for (const Identity& id : identities) {
    const BodyOfEvidence body = combine(le1, le2, id.op, id.coupling);
    for (std::size_t p = 0; p < u->size(); ++p) {
      const Rat got = coverage(body, p);
      const Rat want = pointwise_operator(id.kind, f1.value(p), f2.value(p));
      if (got != want)
        rep.fail(ctx_base + ", point " + u->labels()[p], std::string(id.label) + " coverage = " +
                     operator_name(id.kind),
                 to_fraction_string(got) + " vs " + to_fraction_string(want));
    }
    ++rep.instances;
  }

  struct CondIdentity {
    Coupling coupling;
    OperatorKind kind;
    const char* label;
  };
  const ProductUniversePtr prod = ProductUniverse::make(u, u);
  const std::vector<CondIdentity> conds = {
      {Coupling::diagonal(depth),
       swap ? OperatorKind::kleene_dienes_impl : OperatorKind::lukasiewicz_impl,
       "conditional/diagonal"},
      {Coupling::independent(depth), OperatorKind::reichenbach_impl, "conditional/independent"},
      {Coupling::anti_diagonal(depth),
       swap ? OperatorKind::lukasiewicz_impl : OperatorKind::kleene_dienes_impl,
       "conditional/anti-diagonal"},
  };
  for (const CondIdentity& id : conds) {
    const BodyOfEvidence body = conditional(le1, le2, prod, id.coupling);
    for (std::size_t i = 0; i < u->size(); ++i) {
      for (std::size_t j = 0; j < u->size(); ++j) {
        const Rat got = coverage(body, prod->pair_index(i, j));
        const Rat want = pointwise_operator(id.kind, f1.value(i), f2.value(j));
        if (got != want)
          rep.fail(ctx_base + ", point (" + u->labels()[i] + "," + u->labels()[j] + ")",
                   std::string(id.label) + " coverage = " + operator_name(id.kind),
                   to_fraction_string(got) + " vs " + to_fraction_string(want));
      }
    }
    ++rep.instances;
  }

  // excluded middle / contradiction under the diagonal
  const LevelEvidence nle1 = negate_levels(le1);
  const BodyOfEvidence middle = combine(le1, nle1, SetOp::set_union, Coupling::diagonal(depth));
  const BodyOfEvidence certain =
      BodyOfEvidence::make(u, {{Subset::full(u), Rat(1)}});
  if (!(middle == certain))
    rep.fail(ctx_base, "union with own negation under diagonal is certainty", middle.to_string());
  ++rep.instances;
  const BodyOfEvidence contra =
      combine(le1, nle1, SetOp::set_intersection, Coupling::diagonal(depth));
  const BodyOfEvidence vacuous = BodyOfEvidence::make(u, {{Subset::empty(u), Rat(1)}});
  if (!(contra == vacuous))
    rep.fail(ctx_base, "intersection with own negation under diagonal is contradiction",
             contra.to_string());
  ++rep.instances;
  return rep;
}

/// The diagonal and anti-diagonal couplings bound every other coupling:
/// union K and coverage always; union Bel/Pl once K is coupling-invariant;
/// intersection Q (hence coverage) always; conditional coverage always.
/// Directions flip for antonymous operands. Intersection K/Bel/Pl behavior
/// and the conditional Bel/Pl sandwich are observed and reported as notes,
/// not asserted.
inline CheckReport check_coupling_bounds(const FuzzySubset& f1, const FuzzySubset& f2, int depth,
                                         Polarity polarity, int trials, std::uint64_t seed) {
  CheckReport rep{.name = "coupling-bounds"};
  require_same_universe(f1.universe(), f2.universe());
  require_on_grid(f1, depth);
  require_on_grid(f2, depth);
  const UniversePtr& u = f1.universe();
  const std::size_t points = u->size();
  const std::size_t n = std::size_t(1) << depth;
  const Int den = Int(1) << depth;
  const bool rev = polarity == Polarity::antonymous;
  const std::string ctx_base =
      "f1=" + detail::describe(f1) + ", f2=" + detail::describe(f2) + ", " +
      (rev ? "antonymous" : "synonymous");

  const LevelEvidence le1 = from_fuzzy(f1, depth);
  const LevelEvidence le2 = represent(f2, polarity, depth);
  const std::vector<std::uint64_t> a = detail::to_u64_cells(le1);
  const std::vector<std::uint64_t> b = detail::to_u64_cells(le2);

  const ProductUniversePtr prod = ProductUniverse::make(u, u);
  const bool with_conditional = points * points <= 64;
  std::vector<std::uint64_t> ca, cb;
  if (with_conditional) {
    ca = detail::to_u64_cells(negate_levels(extend(le1, prod, Axis::left)));
    cb = detail::to_u64_cells(extend(le2, prod, Axis::right));
  } else {
    rep.note("conditional sub-checks skipped: product universe exceeds 64 points");
  }

  auto pair_results = [n](const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y,
                          const std::vector<std::size_t>& pi, bool union_op) {
    std::vector<std::uint64_t> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = union_op ? (x[i] | y[pi[i]]) : (x[i] & y[pi[i]]);
    return r;
  };
  auto all_results = [n](const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y,
                         bool union_op) {
    std::vector<std::uint64_t> r;
    r.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r.push_back(union_op ? (x[i] | y[j]) : (x[i] & y[j]));
    return r;
  };

  std::vector<std::size_t> idp(n), antip(n);
  std::iota(idp.begin(), idp.end(), std::size_t(0));
  for (std::size_t i = 0; i < n; ++i) antip[i] = n - 1 - i;

  const auto u_diag = pair_results(a, b, idp, true), u_anti = pair_results(a, b, antip, true);
  const auto i_diag = pair_results(a, b, idp, false), i_anti = pair_results(a, b, antip, false);
  const auto u_ind = all_results(a, b, true), i_ind = all_results(a, b, false);
  std::vector<std::uint64_t> c_diag, c_anti, c_ind;
  if (with_conditional) {
    c_diag = pair_results(ca, cb, idp, true);
    c_anti = pair_results(ca, cb, antip, true);
    c_ind = all_results(ca, cb, true);
  }

  Rng rng(seed);
  bool sampled = false;
  const std::vector<std::uint64_t> pool = detail::subset_pool(points, rng, &sampled);
  if (sampled) rep.note("subset enumeration sampled (" + std::to_string(pool.size()) + " sets)");
  std::vector<std::uint64_t> cpool;
  if (with_conditional) {
    bool csampled = false;
    cpool = detail::subset_pool(points * points, rng, &csampled);
    if (csampled)
      rep.note("conditional subset enumeration sampled (" + std::to_string(cpool.size()) +
               " sets)");
  }

  // ordered bound pair: lo/hi after polarity reversal
  auto bounds = [rev](std::int64_t diag, std::int64_t anti, bool diag_is_low) {
    const bool low_diag = diag_is_low != rev;
    return std::pair<std::int64_t, std::int64_t>(low_diag ? diag : anti, low_diag ? anti : diag);
  };
  auto expect_between = [&rep](std::int64_t lo, std::int64_t x, std::int64_t hi,
                               const std::string& ctx, const char* what,
                               const std::string& detail_txt) {
    if (lo <= x && x <= hi) return true;
    rep.fail(ctx, std::string(what) + " bounded by diagonal and anti-diagonal couplings",
             std::to_string(lo) + " <= " + std::to_string(x) + " <= " + std::to_string(hi) +
                 " fails " + detail_txt);
    return false;
  };

  // union K: diagonal is the low end for synonymous operands
  const std::int64_t ku_d = detail::count_nonempty(u_diag), ku_a = detail::count_nonempty(u_anti);
  const std::int64_t ku_i = detail::count_nonempty(u_ind);
  {
    auto [lo, hi] = bounds(ku_d, ku_a, true);
    expect_between(lo * std::int64_t(n), ku_i, hi * std::int64_t(n), ctx_base,
                   "union K (independent)", "(pair counts)");
  }
  const bool union_k_const = ku_d == ku_a;
  if (!union_k_const)
    rep.note("union belief/plausibility sandwich skipped: K+ = " +
             to_fraction_string(Rat(ku_d, den)) + " differs from K- = " +
             to_fraction_string(Rat(ku_a, den)));
  else if (ku_d == 0)
    rep.note("union belief/plausibility sandwich skipped: K = 0");
  const bool union_belpl = union_k_const && ku_d > 0;

  // intersection K is only observed (no claimed relation)
  const std::int64_t ki_d = detail::count_nonempty(i_diag), ki_a = detail::count_nonempty(i_anti);
  std::int64_t ki_min = std::min(ki_d, ki_a), ki_max = std::max(ki_d, ki_a);
  const bool inter_k_const = ki_d == ki_a;
  std::int64_t inter_belpl_violations = 0;
  std::string inter_belpl_first;

  // conditional gate
  std::int64_t kc_d = 0, kc_a = 0;
  bool cond_belpl = false;
  std::int64_t cond_belpl_violations = 0;
  std::string cond_belpl_first;
  if (with_conditional) {
    kc_d = detail::count_nonempty(c_diag);
    kc_a = detail::count_nonempty(c_anti);
    if (kc_d != kc_a)
      rep.note("conditional belief/plausibility sandwich skipped: K+ = " +
               to_fraction_string(Rat(kc_d, den)) + " differs from K- = " +
               to_fraction_string(Rat(kc_a, den)));
    else if (kc_d == 0)
      rep.note("conditional belief/plausibility sandwich skipped: K = 0");
    cond_belpl = kc_d == kc_a && kc_d > 0;
  }

  // per-subset counts for the fixed couplings
  const std::size_t pn = pool.size();
  std::vector<std::int64_t> q_lo(pn), q_hi(pn), bel_lo(pn), bel_hi(pn), pl_lo(pn), pl_hi(pn);
  for (std::size_t k = 0; k < pn; ++k) {
    // intersection Q: diagonal is the high end for synonymous operands
    auto [qlo, qhi] = bounds(detail::count_superset(i_diag, pool[k]),
                             detail::count_superset(i_anti, pool[k]), false);
    q_lo[k] = qlo;
    q_hi[k] = qhi;
    expect_between(qlo * std::int64_t(n), detail::count_superset(i_ind, pool[k]),
                   qhi * std::int64_t(n),
                   ctx_base + ", C=" + detail::describe_subset(u, pool[k]),
                   "intersection Q (independent)", "(pair counts)");
    if (union_belpl) {
      // union Bel: diagonal is the high end; Pl: diagonal is the low end
      auto [blo, bhi] = bounds(detail::count_subset_nonempty(u_diag, pool[k]),
                               detail::count_subset_nonempty(u_anti, pool[k]), false);
      bel_lo[k] = blo;
      bel_hi[k] = bhi;
      auto [plo, phi] = bounds(detail::count_intersecting(u_diag, pool[k]),
                               detail::count_intersecting(u_anti, pool[k]), true);
      pl_lo[k] = plo;
      pl_hi[k] = phi;
      const std::string ctx = ctx_base + ", C=" + detail::describe_subset(u, pool[k]);
      expect_between(blo * std::int64_t(n), detail::count_subset_nonempty(u_ind, pool[k]),
                     bhi * std::int64_t(n), ctx, "union belief (independent)", "(pair counts)");
      expect_between(plo * std::int64_t(n), detail::count_intersecting(u_ind, pool[k]),
                     phi * std::int64_t(n), ctx, "union plausibility (independent)",
                     "(pair counts)");
    }
  }
  std::vector<std::int64_t> cbel_lo, cbel_hi, cpl_lo, cpl_hi;
  std::vector<std::int64_t> cov_lo(points), cov_hi(points), ccov_lo, ccov_hi;
  for (std::size_t p = 0; p < points; ++p) {
    const std::uint64_t bit = std::uint64_t(1) << p;
    // union coverage: diagonal low (synonymous), like K
    auto [lo, hi] = bounds(detail::count_covering(u_diag, bit),
                           detail::count_covering(u_anti, bit), true);
    cov_lo[p] = lo;
    cov_hi[p] = hi;
    expect_between(lo * std::int64_t(n), detail::count_covering(u_ind, bit),
                   hi * std::int64_t(n), ctx_base + ", point " + u->labels()[p],
                   "union coverage (independent)", "(pair counts)");
  }
  if (with_conditional) {
    const std::size_t cpoints = points * points;
    ccov_lo.resize(cpoints);
    ccov_hi.resize(cpoints);
    for (std::size_t p = 0; p < cpoints; ++p) {
      const std::uint64_t bit = std::uint64_t(1) << p;
      // conditional coverage: diagonal is the high end for synonymous operands
      auto [lo, hi] = bounds(detail::count_covering(c_diag, bit),
                             detail::count_covering(c_anti, bit), false);
      ccov_lo[p] = lo;
      ccov_hi[p] = hi;
      expect_between(lo * std::int64_t(n), detail::count_covering(c_ind, bit),
                     hi * std::int64_t(n),
                     ctx_base + ", point " + prod->universe()->labels()[p],
                     "conditional coverage (independent)", "(pair counts)");
    }
    if (cond_belpl) {
      cbel_lo.resize(cpool.size());
      cbel_hi.resize(cpool.size());
      cpl_lo.resize(cpool.size());
      cpl_hi.resize(cpool.size());
      for (std::size_t k = 0; k < cpool.size(); ++k) {
        // conditional Bel: anti-diagonal high (synonymous); Pl: diagonal high
        auto [blo, bhi] = bounds(detail::count_subset_nonempty(c_diag, cpool[k]),
                                 detail::count_subset_nonempty(c_anti, cpool[k]), true);
        cbel_lo[k] = blo;
        cbel_hi[k] = bhi;
        auto [plo, phi] = bounds(detail::count_intersecting(c_diag, cpool[k]),
                                 detail::count_intersecting(c_anti, cpool[k]), false);
        cpl_lo[k] = plo;
        cpl_hi[k] = phi;
      }
    }
  }
  ++rep.instances;

  // random permutation couplings
  for (int t = 0; t < trials; ++t) {
    const std::vector<std::size_t> pi = random_permutation(rng, n);
    const std::string pctx = ctx_base + ", permutation " + detail::describe_permutation(pi);
    const auto u_pi = pair_results(a, b, pi, true);
    const auto i_pi = pair_results(a, b, pi, false);

    auto [klo, khi] = bounds(ku_d, ku_a, true);
    expect_between(klo, detail::count_nonempty(u_pi), khi, pctx, "union K", "(cell counts)");
    for (std::size_t p = 0; p < points; ++p)
      expect_between(cov_lo[p], detail::count_covering(u_pi, std::uint64_t(1) << p), cov_hi[p],
                     pctx + ", point " + u->labels()[p], "union coverage", "(cell counts)");
    for (std::size_t k = 0; k < pn; ++k) {
      const std::string cctx = pctx + ", C=" + detail::describe_subset(u, pool[k]);
      expect_between(q_lo[k], detail::count_superset(i_pi, pool[k]), q_hi[k], cctx,
                     "intersection Q", "(cell counts)");
      if (union_belpl) {
        expect_between(bel_lo[k], detail::count_subset_nonempty(u_pi, pool[k]), bel_hi[k], cctx,
                       "union belief", "(cell counts)");
        expect_between(pl_lo[k], detail::count_intersecting(u_pi, pool[k]), pl_hi[k], cctx,
                       "union plausibility", "(cell counts)");
      }
    }

    // observed-only intersection behavior
    const std::int64_t ki_pi = detail::count_nonempty(i_pi);
    ki_min = std::min(ki_min, ki_pi);
    ki_max = std::max(ki_max, ki_pi);
    if (inter_k_const && ki_d > 0) {
      for (std::size_t k = 0; k < pn; ++k) {
        auto [blo, bhi] = bounds(detail::count_subset_nonempty(i_diag, pool[k]),
                                 detail::count_subset_nonempty(i_anti, pool[k]), false);
        auto [plo, phi] = bounds(detail::count_intersecting(i_diag, pool[k]),
                                 detail::count_intersecting(i_anti, pool[k]), true);
        const std::int64_t bx = detail::count_subset_nonempty(i_pi, pool[k]);
        const std::int64_t px = detail::count_intersecting(i_pi, pool[k]);
        if (!(blo <= bx && bx <= bhi) || !(plo <= px && px <= phi)) {
          ++inter_belpl_violations;
          if (inter_belpl_first.empty())
            inter_belpl_first = pctx + ", C=" + detail::describe_subset(u, pool[k]);
        }
      }
    }

    if (with_conditional) {
      const auto c_pi = pair_results(ca, cb, pi, true);
      for (std::size_t p = 0; p < points * points; ++p)
        expect_between(ccov_lo[p], detail::count_covering(c_pi, std::uint64_t(1) << p),
                       ccov_hi[p], pctx + ", point " + prod->universe()->labels()[p],
                       "conditional coverage", "(cell counts)");
      if (cond_belpl) {
        for (std::size_t k = 0; k < cpool.size(); ++k) {
          const std::int64_t bx = detail::count_subset_nonempty(c_pi, cpool[k]);
          const std::int64_t px = detail::count_intersecting(c_pi, cpool[k]);
          if (!(cbel_lo[k] <= bx && bx <= cbel_hi[k]) ||
              !(cpl_lo[k] <= px && px <= cpl_hi[k])) {
            ++cond_belpl_violations;
            if (cond_belpl_first.empty())
              cond_belpl_first =
                  pctx + ", C=" + detail::describe_subset(prod->universe(), cpool[k]);
          }
        }
      }
    }
    ++rep.instances;
  }

  rep.note("intersection K observed: diagonal " + to_fraction_string(Rat(ki_d, den)) +
           ", anti-diagonal " + to_fraction_string(Rat(ki_a, den)) + ", permutation range [" +
           to_fraction_string(Rat(ki_min, den)) + ", " + to_fraction_string(Rat(ki_max, den)) +
           "] over " + std::to_string(trials) + " couplings");
  if (inter_k_const && ki_d > 0)
    rep.note(inter_belpl_violations == 0
                 ? "intersection belief/plausibility sandwich held across all sampled couplings"
                 : "intersection belief/plausibility sandwich violated in " +
                       std::to_string(inter_belpl_violations) + " comparisons; first: " +
                       inter_belpl_first);
  if (cond_belpl)
    rep.note(cond_belpl_violations == 0
                 ? "conditional belief/plausibility sandwich held across all sampled couplings"
                 : "conditional belief/plausibility sandwich violated in " +
                       std::to_string(cond_belpl_violations) + " comparisons; first: " +
                       cond_belpl_first);
  return rep;
}

/// Negating the λ-cut body yields the λ-cut body of the complement concept:
/// coverage flips, K becomes 1 − min μ, the complement's possibility and
/// necessity are reproduced, commonality is maximal among negated
/// equivalents, and Q(C) + K(ξ̄)·Pl_ξ̄(C) = 1 holds for every equivalent.
inline CheckReport check_negation_duality(const FuzzySubset& f, int depth) {
  CheckReport rep{.name = "negation-duality"};
  require_on_grid(f, depth);
  const UniversePtr& u = f.universe();
  Rat min_mu = 1;
  for (std::size_t i = 0; i < u->size(); ++i) min_mu = std::min(min_mu, f.value(i));
  require(min_mu < 1, errc::degenerate_negation,
          "membership identically 1: negation would carry no evidence");

  const LevelEvidence le0 = from_fuzzy(f, depth);
  const LevelEvidence neg = negate_levels(le0);
  const BodyOfEvidence b0 = to_body(le0);
  const BodyOfEvidence bneg = to_body(neg);
  const FuzzySubset fc = fuzzy_complement(f);
  const std::string fd = detail::describe(f);

  if (!(bneg == to_body(from_fuzzy(fc, depth))))
    rep.fail("f=" + fd, "negated levels aggregate to the complement's cut body",
             bneg.to_string());
  if (!(bneg == negate_body(b0)))
    rep.fail("f=" + fd, "level negation agrees with body negation", bneg.to_string());
  ++rep.instances;

  for (std::size_t p = 0; p < u->size(); ++p) {
    if (coverage(bneg, p) != 1 - f.value(p))
      rep.fail("f=" + fd + ", point " + u->labels()[p], "negated coverage = 1 - membership",
               to_fraction_string(coverage(bneg, p)));
    ++rep.instances;
  }
  if (kappa(bneg) != 1 - min_mu)
    rep.fail("f=" + fd, "K of negation = 1 - min membership", to_fraction_string(kappa(bneg)));
  ++rep.instances;

  Rng rng(0x5eedULL ^ (std::uint64_t(depth) << 32));
  bool sampled = false;
  const std::vector<std::uint64_t> pool = detail::subset_pool(u->size(), rng, &sampled);
  if (sampled) rep.note("subset enumeration sampled (" + std::to_string(pool.size()) + " sets)");

  for (std::uint64_t cbits : pool) {
    const Subset c(u, detail::mask_from_u64(cbits, u->size()));
    const std::string ctx = "f=" + fd + ", C=" + detail::describe_subset(u, cbits);
    const Rat pi = possibility(fc, c), pl = plausibility(bneg, c);
    if (pi != pl)
      rep.fail(ctx, "complement possibility equals negated plausibility",
               to_fraction_string(pi) + " vs " + to_fraction_string(pl));
    const Rat nec = necessity(fc, c), bel = belief(bneg, c);
    if (nec != bel)
      rep.fail(ctx, "complement necessity equals negated belief",
               to_fraction_string(nec) + " vs " + to_fraction_string(bel));
    if (cbits != 0) {
      const Rat lhs = commonality(b0, c) + kappa(bneg) * plausibility(bneg, c);
      if (lhs != 1)
        rep.fail(ctx, "Q(C) + K(negation)*Pl(negation at C) = 1", to_fraction_string(lhs));
    }
    ++rep.instances;
  }

  // duality against mutated equivalents
  const std::vector<std::uint64_t> nbase = detail::to_u64_cells(neg);
  const int steps = 4 * static_cast<int>(le0.cell_count()) + 8;
  constexpr int kEquivalents = 8;
  for (int e = 0; e < kEquivalents; ++e) {
    // identity holds for every coverage-equivalent, not just the cut body
    const LevelEvidence mut = sample_equivalent(le0, rng.next(), steps);
    const BodyOfEvidence bm = to_body(mut);
    const BodyOfEvidence bmn = negate_body(bm);
    for (std::uint64_t cbits : pool) {
      if (cbits == 0) continue;
      const Subset c(u, detail::mask_from_u64(cbits, u->size()));
      const Rat lhs = commonality(bm, c) + kappa(bmn) * plausibility(bmn, c);
      if (lhs != 1)
        rep.fail("f=" + fd + ", mutant " + std::to_string(e + 1) + ", C=" +
                     detail::describe_subset(u, cbits),
                 "Q(C) + K(negation)*Pl(negation at C) = 1", to_fraction_string(lhs));
    }
    ++rep.instances;
    // negated cut body dominates negated equivalents in commonality (K-free)
    Rng walk(rng.next());
    std::vector<Mask> free_cells =
        detail::equivalence_walk(le0.cells(), u->size(), walk, steps, false);
    for (Mask& cell : free_cells) cell = ~cell;
    const std::vector<std::uint64_t> nmut =
        detail::to_u64_cells(LevelEvidence::from_cells(u, depth, std::move(free_cells)));
    for (std::uint64_t cbits : pool) {
      if (cbits == 0) continue;
      const std::int64_t q0 = detail::count_superset(nbase, cbits);
      const std::int64_t qm = detail::count_superset(nmut, cbits);
      if (q0 < qm)
        rep.fail("f=" + fd + ", negated mutant " + std::to_string(e + 1) + ", C=" +
                     detail::describe_subset(u, cbits),
                 "negated cut body has maximal commonality",
                 std::to_string(q0) + " < " + std::to_string(qm) + " (cell counts)");
    }
    ++rep.instances;
  }
  return rep;
}

/// Normalizing the independent-coupling intersection reproduces Dempster's
/// rule applied to the two aggregated bodies, exactly.
inline CheckReport check_dempster_correspondence(const FuzzySubset& f1, const FuzzySubset& f2,
                                                 int depth) {
  CheckReport rep{.name = "dempster-correspondence"};
  require_same_universe(f1.universe(), f2.universe());
  require_on_grid(f1, depth);
  require_on_grid(f2, depth);
  const LevelEvidence le1 = from_fuzzy(f1, depth);
  const LevelEvidence le2 = from_fuzzy(f2, depth);
  const BodyOfEvidence lhs =
      normalized(combine(le1, le2, SetOp::set_intersection, Coupling::independent(depth)));
  const BodyOfEvidence rhs = dempster_combine(to_body(le1), to_body(le2));
  if (!(lhs == rhs))
    rep.fail("f1=" + detail::describe(f1) + ", f2=" + detail::describe(f2),
             "normalized independent intersection equals Dempster combination",
             lhs.to_string() + " vs " + rhs.to_string());
  ++rep.instances;
  return rep;
}

}  // namespace possev
