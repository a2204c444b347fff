#pragma once

#include <boost/dynamic_bitset.hpp>

#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "possev/error.hpp"

namespace possev {

/// Bit mask over the points of a universe; bit i = point i is included.
using Mask = boost::dynamic_bitset<>;

class Universe;
using UniversePtr = std::shared_ptr<const Universe>;

/// A finite universe of discourse: an ordered list of distinct point labels.
/// Points carry no numeric semantics; the declaration order is canonical.
class Universe {
 public:
  static UniversePtr make(std::vector<std::string> labels) {
    require(!labels.empty(), errc::empty_universe, "a universe needs at least one point");
    auto u = std::shared_ptr<Universe>(new Universe(std::move(labels)));
    for (std::size_t i = 0; i < u->labels_.size(); ++i) {
      auto [it, inserted] = u->index_.emplace(u->labels_[i], i);
      require(inserted, errc::duplicate_label, "duplicate point '" + u->labels_[i] + "'");
    }
    return u;
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& label) const {
    auto i = find(label);
    if (!i) raise(errc::unknown_reference, "no point '" + label + "' in universe");
    return *i;
  }

  bool same_as(const Universe& other) const {
    return this == &other || labels_ == other.labels_;
  }

 private:
  explicit Universe(std::vector<std::string> labels) : labels_(std::move(labels)) {}

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool same_universe(const UniversePtr& a, const UniversePtr& b) {
  return a && b && a->same_as(*b);
}

inline void require_same_universe(const UniversePtr& a, const UniversePtr& b) {
  require(same_universe(a, b), errc::universe_mismatch, "operands live in different universes");
}

/// A crisp subset of one universe, stored as a bit mask.
class Subset {
 public:
  Subset(UniversePtr universe, Mask bits) : universe_(std::move(universe)), bits_(std::move(bits)) {
    require(bits_.size() == universe_->size(), errc::universe_mismatch,
            "mask length does not match universe size");
  }

  static Subset empty(UniversePtr universe) {
    Mask m(universe->size());
    return Subset(std::move(universe), std::move(m));
  }

  static Subset full(UniversePtr universe) {
    Mask m(universe->size());
    m.set();
    return Subset(std::move(universe), std::move(m));
  }

  static Subset of(UniversePtr universe, const std::vector<std::string>& labels) {
    Mask m(universe->size());
    for (const auto& l : labels) m.set(universe->index_of(l));
    return Subset(std::move(universe), std::move(m));
  }

  static Subset of(UniversePtr universe, std::initializer_list<const char*> labels) {
    std::vector<std::string> v(labels.begin(), labels.end());
    return of(std::move(universe), v);
  }

  const UniversePtr& universe() const { return universe_; }
  const Mask& bits() const { return bits_; }

  std::size_t count() const { return bits_.count(); }
  bool is_empty() const { return bits_.none(); }
  bool is_full() const { return bits_.all(); }
  bool contains(std::size_t i) const { return bits_.test(i); }
  bool contains(const std::string& label) const { return bits_.test(universe_->index_of(label)); }

  Subset complement() const { return Subset(universe_, ~bits_); }

  bool is_subset_of(const Subset& other) const {
    require_same_universe(universe_, other.universe_);
    return bits_.is_subset_of(other.bits_);
  }

  friend Subset operator|(const Subset& a, const Subset& b) {
    require_same_universe(a.universe_, b.universe_);
    return Subset(a.universe_, a.bits_ | b.bits_);
  }

  friend Subset operator&(const Subset& a, const Subset& b) {
    require_same_universe(a.universe_, b.universe_);
    return Subset(a.universe_, a.bits_ & b.bits_);
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return same_universe(a.universe_, b.universe_) && a.bits_ == b.bits_;
  }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (!bits_.test(i)) continue;
      if (!first) out += ",";
      out += universe_->label(i);
      first = false;
    }
    out += "}";
    return out;
  }

 private:
  UniversePtr universe_;
  Mask bits_;
};

enum class Axis { left, right };

/// Cartesian product of two universes. Pair (left i, right j) sits at index
/// i * |right| + j, so pairs are enumerated row-major in the left universe.
class ProductUniverse {
 public:
  static std::shared_ptr<const ProductUniverse> make(UniversePtr left, UniversePtr right) {
    std::vector<std::string> labels;
    labels.reserve(left->size() * right->size());
    for (const auto& l : left->labels())
      for (const auto& r : right->labels()) labels.push_back("(" + l + "," + r + ")");
    auto combined = Universe::make(std::move(labels));
    return std::shared_ptr<const ProductUniverse>(
        new ProductUniverse(std::move(left), std::move(right), std::move(combined)));
  }

  const UniversePtr& left() const { return left_; }
  const UniversePtr& right() const { return right_; }
  const UniversePtr& universe() const { return combined_; }
  std::size_t size() const { return combined_->size(); }

  std::size_t pair_index(std::size_t i, std::size_t j) const { return i * right_->size() + j; }

  const UniversePtr& factor(Axis axis) const { return axis == Axis::left ? left_ : right_; }

 private:
  ProductUniverse(UniversePtr left, UniversePtr right, UniversePtr combined)
      : left_(std::move(left)), right_(std::move(right)), combined_(std::move(combined)) {}

  UniversePtr left_;
  UniversePtr right_;
  UniversePtr combined_;
};

using ProductUniversePtr = std::shared_ptr<const ProductUniverse>;

/// Mask-level cylinder: lifts a factor mask into the product universe.
inline Mask cylinder_mask(const Mask& bits, const ProductUniverse& p, Axis axis) {
  Mask out(p.size());
  const std::size_t nl = p.left()->size();
  const std::size_t nr = p.right()->size();
  if (axis == Axis::left) {
    for (std::size_t i = 0; i < nl; ++i)
      if (bits.test(i))
        for (std::size_t j = 0; j < nr; ++j) out.set(p.pair_index(i, j));
  } else {
    for (std::size_t j = 0; j < nr; ++j)
      if (bits.test(j))
        for (std::size_t i = 0; i < nl; ++i) out.set(p.pair_index(i, j));
  }
  return out;
}

/// Extends a subset of one factor to the product: all pairs whose factor
/// coordinate lies in the subset.
inline Subset cylinder(const Subset& s, const ProductUniversePtr& p, Axis axis) {
  require_same_universe(s.universe(), p->factor(axis));
  return Subset(p->universe(), cylinder_mask(s.bits(), *p, axis));
}

}  // namespace possev
