#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "possev/error.hpp"
#include "possev/rational.hpp"
#include "possev/universe.hpp"

namespace possev {

/// A finite body of evidence: a mass function over subsets of one universe.
/// Mass on the empty set is allowed and encodes the defect 1-K, so subnormal
/// possibility distributions round-trip without renormalization. Focal sets
/// are keyed canonically by mask, masses are strictly positive and sum to 1.
class BodyOfEvidence {
 public:
  using FocalMap = std::map<Mask, Rat>;

  static BodyOfEvidence make(UniversePtr universe, const std::vector<std::pair<Subset, Rat>>& assignments) {
    FocalMap focal;
    for (const auto& [subset, mass] : assignments) {
      require_same_universe(universe, subset.universe());
      require(mass >= 0, errc::negative_mass, "mass of " + subset.to_string() + " is negative");
      if (mass == 0) continue;
      focal[subset.bits()] += mass;
    }
    return from_masses(std::move(universe), std::move(focal));
  }

  /// Internal constructor for already-merged masks; still validates.
  static BodyOfEvidence from_masses(UniversePtr universe, FocalMap focal) {
    Rat total = 0;
    for (auto it = focal.begin(); it != focal.end();) {
      require(it->first.size() == universe->size(), errc::universe_mismatch,
              "focal mask length does not match universe");
      require(it->second >= 0, errc::negative_mass, "negative focal mass");
      total += it->second;
      if (it->second == 0)
        it = focal.erase(it);
      else
        ++it;
    }
    require(total == 1, errc::mass_sum_not_one,
            "masses sum to " + to_fraction_string(total) + ", expected 1");
    return BodyOfEvidence(std::move(universe), std::move(focal));
  }

  const UniversePtr& universe() const { return universe_; }
  const FocalMap& focal() const { return focal_; }
  std::size_t focal_count() const { return focal_.size(); }

  Rat mass(const Mask& bits) const {
    auto it = focal_.find(bits);
    return it == focal_.end() ? Rat(0) : it->second;
  }

  Rat mass(const Subset& s) const {
    require_same_universe(universe_, s.universe());
    return mass(s.bits());
  }

  friend bool operator==(const BodyOfEvidence& a, const BodyOfEvidence& b) {
    return same_universe(a.universe_, b.universe_) && a.focal_ == b.focal_;
  }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [bits, mass] : focal_) {
      if (!first) out += ", ";
      out += Subset(universe_, bits).to_string() + ":" + to_fraction_string(mass);
      first = false;
    }
    return out + "}";
  }

 private:
  BodyOfEvidence(UniversePtr universe, FocalMap focal)
      : universe_(std::move(universe)), focal_(std::move(focal)) {}

  UniversePtr universe_;
  FocalMap focal_;
};

/// K: the probability that the random subset is non-empty, 1 - m(∅).
inline Rat kappa(const BodyOfEvidence& b) {
  Mask none(b.universe()->size());
  return 1 - b.mass(none);
}

inline void require_positive_kappa(const BodyOfEvidence& b) {
  require(kappa(b) > 0, errc::zero_kappa, "body places all mass on the empty set");
}

/// Bel(C) = K⁻¹ Σ{m(A) : ∅ ≠ A ⊆ C}.
inline Rat belief(const BodyOfEvidence& b, const Subset& c) {
  require_same_universe(b.universe(), c.universe());
  require_positive_kappa(b);
  Rat sum = 0;
  for (const auto& [bits, mass] : b.focal())
    if (bits.any() && bits.is_subset_of(c.bits())) sum += mass;
  return sum / kappa(b);
}

/// Pl(C) = 1 - Bel(C̄).
inline Rat plausibility(const BodyOfEvidence& b, const Subset& c) {
  return 1 - belief(b, c.complement());
}

/// Q(C) = Σ{m(A) : A ⊇ C}. Deliberately unnormalized; Q(∅) = 1.
inline Rat commonality(const BodyOfEvidence& b, const Subset& c) {
  require_same_universe(b.universe(), c.universe());
  Rat sum = 0;
  for (const auto& [bits, mass] : b.focal())
    if (c.bits().is_subset_of(bits)) sum += mass;
  return sum;
}

/// Falling shadow of the body at one point: total mass of focal sets
/// covering it. Equals the represented membership function.
inline Rat coverage(const BodyOfEvidence& b, std::size_t point) {
  Rat sum = 0;
  for (const auto& [bits, mass] : b.focal())
    if (bits.test(point)) sum += mass;
  return sum;
}

inline Rat coverage(const BodyOfEvidence& b, const std::string& label) {
  return coverage(b, b.universe()->index_of(label));
}

/// Complements every focal set, keeping masses. Degenerate (and rejected)
/// exactly when all mass sits on the full universe.
inline BodyOfEvidence negate_body(const BodyOfEvidence& b) {
  Mask full(b.universe()->size());
  full.set();
  require(b.mass(full) < 1, errc::degenerate_negation,
          "negation of the vacuous body has zero kappa");
  BodyOfEvidence::FocalMap focal;
  for (const auto& [bits, mass] : b.focal()) focal[~bits] += mass;
  return BodyOfEvidence::from_masses(b.universe(), std::move(focal));
}

/// Pl(C) - Bel(C): the probability mass committed to neither C nor its
/// complement.
inline Rat ignorance(const BodyOfEvidence& b, const Subset& c) {
  return plausibility(b, c) - belief(b, c);
}

/// Drops any mass on ∅ and rescales by K.
inline BodyOfEvidence normalized(const BodyOfEvidence& b) {
  Rat k = kappa(b);
  require(k > 0, errc::total_conflict, "cannot normalize a body with zero kappa");
  BodyOfEvidence::FocalMap focal;
  for (const auto& [bits, mass] : b.focal())
    if (bits.any()) focal[bits] = mass / k;
  return BodyOfEvidence::from_masses(b.universe(), std::move(focal));
}

/// Dempster's rule of combination. Independent of the level machinery on
/// purpose: it is the oracle the independent-coupling intersection must
/// reproduce after normalization.
inline BodyOfEvidence dempster_combine(const BodyOfEvidence& b1, const BodyOfEvidence& b2) {
  require_same_universe(b1.universe(), b2.universe());
  BodyOfEvidence::FocalMap products;
  Rat conflict = 0;
  for (const auto& [a1, m1] : b1.focal()) {
    for (const auto& [a2, m2] : b2.focal()) {
      Mask meet = a1 & a2;
      Rat w = m1 * m2;
      if (meet.none())
        conflict += w;
      else
        products[meet] += w;
    }
  }
  require(conflict < 1, errc::total_conflict, "the two bodies are in total conflict");
  Rat k = 1 - conflict;
  for (auto& [bits, mass] : products) mass /= k;
  return BodyOfEvidence::from_masses(b1.universe(), std::move(products));
}

}  // namespace possev
