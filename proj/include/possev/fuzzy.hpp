#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "possev/error.hpp"
#include "possev/rational.hpp"
#include "possev/universe.hpp"

namespace possev {

/// A fuzzy subset: one exact membership value in [0,1] per universe point.
class FuzzySubset {
 public:
  static FuzzySubset from_values(UniversePtr universe, std::vector<Rat> memberships) {
    require(memberships.size() == universe->size(), errc::universe_mismatch,
            "membership vector length does not match universe size");
    for (std::size_t i = 0; i < memberships.size(); ++i)
      require(in_unit_interval(memberships[i]), errc::membership_out_of_range,
              "membership of '" + universe->label(i) + "' outside [0,1]");
    return FuzzySubset(std::move(universe), std::move(memberships));
  }

  /// Points missing from the map default to membership 0.
  static FuzzySubset make(UniversePtr universe, const std::map<std::string, Rat>& memberships) {
    std::vector<Rat> mu(universe->size(), Rat(0));
    for (const auto& [label, value] : memberships) {
      auto i = universe->find(label);
      if (!i) raise(errc::universe_mismatch, "no point '" + label + "' in universe");
      mu[*i] = value;
    }
    return from_values(std::move(universe), std::move(mu));
  }

  const UniversePtr& universe() const { return universe_; }
  const std::vector<Rat>& values() const { return mu_; }
  const Rat& value(std::size_t i) const { return mu_.at(i); }
  const Rat& value(const std::string& label) const { return mu_[universe_->index_of(label)]; }

 private:
  FuzzySubset(UniversePtr universe, std::vector<Rat> mu)
      : universe_(std::move(universe)), mu_(std::move(mu)) {}

  UniversePtr universe_;
  std::vector<Rat> mu_;
};

/// {θ : μ(θ) ≥ λ} for λ in (0,1].
inline Subset lambda_cut(const FuzzySubset& f, const Rat& lambda) {
  require(lambda > 0 && lambda <= 1, errc::lambda_out_of_range, "lambda must lie in (0,1]");
  Mask m(f.universe()->size());
  for (std::size_t i = 0; i < m.size(); ++i)
    if (f.value(i) >= lambda) m.set(i);
  return Subset(f.universe(), std::move(m));
}

inline Rat height(const FuzzySubset& f) {
  Rat h = 0;
  for (const Rat& v : f.values()) h = std::max(h, v);
  return h;
}

inline bool is_normal(const FuzzySubset& f) { return height(f) == 1; }

namespace detail {
inline Rat max_over(const FuzzySubset& f, const Mask& bits) {
  Rat m = 0;  // max over the empty set is 0 by convention
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits.test(i)) m = std::max(m, f.value(i));
  return m;
}
}  // namespace detail

/// Possibility of a crisp subset, normalized by the height so that
/// possibility never falls below necessity even for subnormal subsets.
inline Rat possibility(const FuzzySubset& f, const Subset& c) {
  require_same_universe(f.universe(), c.universe());
  Rat h = height(f);
  require(h > 0, errc::empty_fuzzy_subset, "possibility undefined for an all-zero fuzzy subset");
  return detail::max_over(f, c.bits()) / h;
}

inline Rat necessity(const FuzzySubset& f, const Subset& c) {
  require_same_universe(f.universe(), c.universe());
  Rat h = height(f);
  require(h > 0, errc::empty_fuzzy_subset, "necessity undefined for an all-zero fuzzy subset");
  return 1 - detail::max_over(f, ~c.bits()) / h;
}

/// min over the points of c; the fuzzy commonality number. Unnormalized.
inline Rat fuzzy_commonality(const FuzzySubset& f, const Subset& c) {
  require_same_universe(f.universe(), c.universe());
  require(!c.is_empty(), errc::empty_set_query, "commonality of the empty set is undefined");
  Rat m = 1;
  for (std::size_t i = 0; i < c.universe()->size(); ++i)
    if (c.contains(i)) m = std::min(m, f.value(i));
  return m;
}

inline FuzzySubset fuzzy_complement(const FuzzySubset& f) {
  std::vector<Rat> mu;
  mu.reserve(f.values().size());
  for (const Rat& v : f.values()) mu.push_back(1 - v);
  return FuzzySubset::from_values(f.universe(), std::move(mu));
}

/// Each membership floored to the nearest multiple of 2^-depth below it —
/// what the level construction at that depth effectively sees.
inline FuzzySubset floor_to_grid(const FuzzySubset& f, int depth) {
  const Int den = Int(1) << depth;
  std::vector<Rat> mu;
  mu.reserve(f.values().size());
  for (const Rat& v : f.values()) mu.emplace_back(Int(grid_floor(v, depth)), den);
  return FuzzySubset::from_values(f.universe(), std::move(mu));
}

/// The closed-form pointwise operators that the coupled combinations
/// reproduce: three union/intersection families plus three implications.
enum class OperatorKind {
  zadeh_union,
  zadeh_intersection,
  prob_sum,
  product,
  bounded_sum,
  bounded_difference,
  lukasiewicz_impl,
  reichenbach_impl,
  kleene_dienes_impl,
};

inline const char* operator_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::zadeh_union: return "zadeh_union";
    case OperatorKind::zadeh_intersection: return "zadeh_intersection";
    case OperatorKind::prob_sum: return "prob_sum";
    case OperatorKind::product: return "product";
    case OperatorKind::bounded_sum: return "bounded_sum";
    case OperatorKind::bounded_difference: return "bounded_difference";
    case OperatorKind::lukasiewicz_impl: return "lukasiewicz_impl";
    case OperatorKind::reichenbach_impl: return "reichenbach_impl";
    case OperatorKind::kleene_dienes_impl: return "kleene_dienes_impl";
  }
  return "?";
}

inline Rat pointwise_operator(OperatorKind kind, const Rat& m1, const Rat& m2) {
  require(in_unit_interval(m1) && in_unit_interval(m2), errc::membership_out_of_range,
          "operator arguments must lie in [0,1]");
  switch (kind) {
    case OperatorKind::zadeh_union: return std::max(m1, m2);
    case OperatorKind::zadeh_intersection: return std::min(m1, m2);
    case OperatorKind::prob_sum: return m1 + m2 - m1 * m2;
    case OperatorKind::product: return m1 * m2;
    case OperatorKind::bounded_sum: return std::min(Rat(m1 + m2), Rat(1));
    case OperatorKind::bounded_difference: return std::max(Rat(m1 + m2 - 1), Rat(0));
    case OperatorKind::lukasiewicz_impl: return std::min(Rat(1 - m1 + m2), Rat(1));
    case OperatorKind::reichenbach_impl: return 1 - m1 + m1 * m2;
    case OperatorKind::kleene_dienes_impl: return std::max(Rat(1 - m1), m2);
  }
  raise(errc::unknown_command, "unhandled operator kind");
}

}  // namespace possev
