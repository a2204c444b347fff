#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "possev/error.hpp"
#include "possev/evidence.hpp"
#include "possev/fuzzy.hpp"
#include "possev/rational.hpp"
#include "possev/universe.hpp"

namespace possev {

/// Beyond this depth the pairwise enumerations (4^depth cell pairs under the
/// independent coupling) stop being practical.
inline constexpr int kMaxDepth = 12;

inline void require_depth(int depth) {
  require(depth >= 1 && depth <= kMaxDepth, errc::bad_depth,
          "depth must lie in [1," + std::to_string(kMaxDepth) + "]");
}

/// Dyadic level representation of a random subset: 2^depth cells of equal
/// mass 2^-depth, each holding one subset. Cell order is the level order of
/// the underlying refinement, so couplings can address cells by index.
class LevelEvidence {
 public:
  static LevelEvidence from_cells(UniversePtr universe, int depth, std::vector<Mask> cells) {
    require_depth(depth);
    require(cells.size() == (std::size_t(1) << depth), errc::depth_mismatch,
            "expected 2^depth cells");
    for (const Mask& c : cells)
      require(c.size() == universe->size(), errc::universe_mismatch,
              "cell mask length does not match universe");
    return LevelEvidence(std::move(universe), depth, std::move(cells));
  }

  const UniversePtr& universe() const { return universe_; }
  int depth() const { return depth_; }
  std::size_t cell_count() const { return cells_.size(); }
  const std::vector<Mask>& cells() const { return cells_; }
  const Mask& cell_mask(std::size_t index) const { return cells_.at(index); }
  Subset cell(std::size_t index) const { return Subset(universe_, cells_.at(index)); }

  friend bool operator==(const LevelEvidence& a, const LevelEvidence& b) {
    return same_universe(a.universe_, b.universe_) && a.depth_ == b.depth_ && a.cells_ == b.cells_;
  }

 private:
  LevelEvidence(UniversePtr universe, int depth, std::vector<Mask> cells)
      : universe_(std::move(universe)), depth_(depth), cells_(std::move(cells)) {}

  UniversePtr universe_;
  int depth_;
  std::vector<Mask> cells_;
};

/// Two concepts on one universe either share an implication class or oppose
/// each other; an opposing concept is represented by negating the evidence
/// of its complement.
enum class Polarity { synonymous, antonymous };

/// The level evidence of a fuzzy subset at a given depth: cell i (1-based)
/// holds the λ-cut at λ = i/2^depth. Cells are nested and shrinking, and the
/// coverage of the result is μ floored to the grid.
inline LevelEvidence from_fuzzy(const FuzzySubset& f, int depth) {
  require_depth(depth);
  const std::size_t n = std::size_t(1) << depth;
  const std::size_t points = f.universe()->size();
  std::vector<Mask> cells(n, Mask(points));
  for (std::size_t p = 0; p < points; ++p) {
    // point p lies in cells 1..floor(2^depth * μ(p))
    auto level = static_cast<std::size_t>(grid_floor(f.value(p), depth));
    for (std::size_t i = 0; i < level; ++i) cells[i].set(p);
  }
  return LevelEvidence::from_cells(f.universe(), depth, std::move(cells));
}

/// Cell-wise complement.
inline LevelEvidence negate_levels(const LevelEvidence& le) {
  std::vector<Mask> cells;
  cells.reserve(le.cell_count());
  for (const Mask& c : le.cells()) cells.push_back(~c);
  return LevelEvidence::from_cells(le.universe(), le.depth(), std::move(cells));
}

inline LevelEvidence represent(const FuzzySubset& f, Polarity polarity, int depth) {
  if (polarity == Polarity::synonymous) return from_fuzzy(f, depth);
  return negate_levels(from_fuzzy(fuzzy_complement(f), depth));
}

/// Aggregates equal cells: mass of a subset = (cells holding it) / 2^depth.
inline BodyOfEvidence to_body(const LevelEvidence& le) {
  std::map<Mask, std::int64_t> counts;
  for (const Mask& c : le.cells()) ++counts[c];
  BodyOfEvidence::FocalMap focal;
  const Int den = Int(1) << le.depth();
  for (const auto& [bits, count] : counts) focal.emplace(bits, Rat(count, den));
  return BodyOfEvidence::from_masses(le.universe(), std::move(focal));
}

/// Inverse of to_body for dyadic bodies: every mass must be a multiple of
/// 2^-depth. Cells are ordered largest subset first, which reproduces the
/// λ-cut order for consonant bodies.
inline LevelEvidence from_body(const BodyOfEvidence& b, int depth) {
  require_depth(depth);
  const Int den = Int(1) << depth;
  std::vector<std::pair<Mask, std::int64_t>> entries;
  for (const auto& [bits, mass] : b.focal()) {
    Rat scaled = mass * den;
    require(denominator(scaled) == 1, errc::off_grid_mass,
            "mass " + to_fraction_string(mass) + " is not a multiple of 2^-" +
                std::to_string(depth));
    entries.emplace_back(bits, static_cast<std::int64_t>(numerator(scaled)));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first.count() != b.first.count()) return a.first.count() > b.first.count();
    return a.first < b.first;
  });
  std::vector<Mask> cells;
  cells.reserve(std::size_t(1) << depth);
  for (const auto& [bits, count] : entries)
    for (std::int64_t i = 0; i < count; ++i) cells.push_back(bits);
  return LevelEvidence::from_cells(b.universe(), depth, std::move(cells));
}

/// Lifts every cell into the product universe along one axis.
inline LevelEvidence extend(const LevelEvidence& le, const ProductUniversePtr& p, Axis axis) {
  require_same_universe(le.universe(), p->factor(axis));
  std::vector<Mask> cells;
  cells.reserve(le.cell_count());
  for (const Mask& c : le.cells()) cells.push_back(cylinder_mask(c, *p, axis));
  return LevelEvidence::from_cells(p->universe(), le.depth(), std::move(cells));
}

/// A joint mass over pairs of level cells with uniform marginals: how the
/// two underlying refinements are correlated. The diagonal, anti-diagonal
/// and independent couplings are the comonotone, countermonotone and
/// product cases; any permutation or doubly-proportional matrix is allowed.
class Coupling {
 public:
  enum class Kind { diagonal, anti_diagonal, independent, permutation, matrix };

  static Coupling diagonal(int depth) {
    Coupling c(Kind::diagonal, depth);
    c.perm_.resize(std::size_t(1) << depth);
    std::iota(c.perm_.begin(), c.perm_.end(), std::size_t(0));
    return c;
  }

  /// Pairs cell i with cell 2^depth + 1 - i (1-based): the bitwise
  /// complement of the level index.
  static Coupling anti_diagonal(int depth) {
    Coupling c(Kind::anti_diagonal, depth);
    const std::size_t n = std::size_t(1) << depth;
    c.perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.perm_[i] = n - 1 - i;
    return c;
  }

  static Coupling independent(int depth) { return Coupling(Kind::independent, depth); }

  /// pi maps left cell index to right cell index, 0-based, bijective.
  static Coupling permutation(int depth, std::vector<std::size_t> pi) {
    require_depth(depth);
    const std::size_t n = std::size_t(1) << depth;
    require(pi.size() == n, errc::bad_permutation, "permutation must cover all 2^depth cells");
    std::vector<bool> seen(n, false);
    for (std::size_t v : pi) {
      require(v < n, errc::bad_permutation, "permutation index out of range");
      require(!seen[v], errc::bad_permutation, "permutation repeats an index");
      seen[v] = true;
    }
    Coupling c(Kind::permutation, depth);
    c.perm_ = std::move(pi);
    return c;
  }

  /// weights[i][j] = joint mass of (left cell i, right cell j); every row
  /// and every column must sum to 2^-depth.
  static Coupling matrix(int depth, std::vector<std::vector<Rat>> weights) {
    require_depth(depth);
    const std::size_t n = std::size_t(1) << depth;
    require(weights.size() == n, errc::bad_marginals, "matrix must have 2^depth rows");
    const Rat marginal(1, Int(1) << depth);
    std::vector<Rat> col_sums(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
      require(weights[i].size() == n, errc::bad_marginals, "matrix must have 2^depth columns");
      Rat row_sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        require(weights[i][j] >= 0, errc::bad_marginals, "matrix weights must be nonnegative");
        row_sum += weights[i][j];
        col_sums[j] += weights[i][j];
      }
      require(row_sum == marginal, errc::bad_marginals,
              "row " + std::to_string(i + 1) + " sums to " + to_fraction_string(row_sum) +
                  ", expected " + to_fraction_string(marginal));
    }
    for (std::size_t j = 0; j < n; ++j)
      require(col_sums[j] == marginal, errc::bad_marginals,
              "column " + std::to_string(j + 1) + " sums to " + to_fraction_string(col_sums[j]) +
                  ", expected " + to_fraction_string(marginal));
    Coupling c(Kind::matrix, depth);
    c.matrix_ = std::move(weights);
    return c;
  }

  Kind kind() const { return kind_; }
  int depth() const { return depth_; }
  bool is_permutation_backed() const { return !perm_.empty(); }
  const std::vector<std::size_t>& perm() const { return perm_; }
  const std::vector<std::vector<Rat>>& weights() const { return matrix_; }

 private:
  Coupling(Kind kind, int depth) : kind_(kind), depth_(depth) { require_depth(depth); }

  Kind kind_;
  int depth_;
  std::vector<std::size_t> perm_;          // permutation-backed kinds
  std::vector<std::vector<Rat>> matrix_;   // matrix kind
};

enum class SetOp { set_union, set_intersection };

namespace detail {
inline Mask apply_set_op(SetOp op, const Mask& a, const Mask& b) {
  return op == SetOp::set_union ? a | b : a & b;
}
}  // namespace detail

/// Couples the two level representations and aggregates the per-pair set
/// results into a body of evidence. The combined sample space has 4^depth
/// atoms, so the result is returned aggregated rather than as levels.
inline BodyOfEvidence combine(const LevelEvidence& le1, const LevelEvidence& le2, SetOp op,
                              const Coupling& coupling) {
  require_same_universe(le1.universe(), le2.universe());
  require(le1.depth() == le2.depth() && le1.depth() == coupling.depth(), errc::depth_mismatch,
          "operands and coupling must share one depth");
  const std::size_t n = le1.cell_count();
  BodyOfEvidence::FocalMap focal;
  switch (coupling.kind()) {
    case Coupling::Kind::diagonal:
    case Coupling::Kind::anti_diagonal:
    case Coupling::Kind::permutation: {
      std::map<Mask, std::int64_t> counts;
      const auto& pi = coupling.perm();
      for (std::size_t i = 0; i < n; ++i)
        ++counts[detail::apply_set_op(op, le1.cell_mask(i), le2.cell_mask(pi[i]))];
      const Int den = Int(1) << coupling.depth();
      for (const auto& [bits, count] : counts) focal.emplace(bits, Rat(count, den));
      break;
    }
    case Coupling::Kind::independent: {
      std::map<Mask, std::int64_t> counts;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          ++counts[detail::apply_set_op(op, le1.cell_mask(i), le2.cell_mask(j))];
      const Int den = Int(1) << (2 * coupling.depth());
      for (const auto& [bits, count] : counts) focal.emplace(bits, Rat(count, den));
      break;
    }
    case Coupling::Kind::matrix: {
      const auto& w = coupling.weights();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (w[i][j] != 0)
            focal[detail::apply_set_op(op, le1.cell_mask(i), le2.cell_mask(j))] += w[i][j];
      break;
    }
  }
  return BodyOfEvidence::from_masses(le1.universe(), std::move(focal));
}

/// Conditional inference "if X is F1 then Y is F2" over the product
/// universe: the union of the negated left extension with the right
/// extension, under the given coupling.
inline BodyOfEvidence conditional(const LevelEvidence& le1, const LevelEvidence& le2,
                                  const ProductUniversePtr& p, const Coupling& coupling) {
  require_same_universe(le1.universe(), p->left());
  require_same_universe(le2.universe(), p->right());
  require(le1.depth() == le2.depth(), errc::depth_mismatch, "operands must share one depth");
  LevelEvidence antecedent = negate_levels(extend(le1, p, Axis::left));
  LevelEvidence consequent = extend(le2, p, Axis::right);
  return combine(antecedent, consequent, SetOp::set_union, coupling);
}

}  // namespace possev
