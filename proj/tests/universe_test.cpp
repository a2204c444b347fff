#include <gtest/gtest.h>

#include "possev/universe.hpp"

using namespace possev;

TEST(Universe, MakeAndLookup) {
  UniversePtr u = Universe::make({"a", "b", "c"});
  EXPECT_EQ(u->size(), 3u);
  EXPECT_EQ(u->labels()[1], "b");
  EXPECT_EQ(u->find("c"), std::optional<std::size_t>(2));
  EXPECT_FALSE(u->find("z").has_value());
  EXPECT_EQ(u->index_of("a"), 0u);
  EXPECT_THROW(u->index_of("z"), Error);
}

TEST(Universe, RejectsDegenerateDefinitions) {
  EXPECT_THROW(Universe::make({}), Error);
  try {
    Universe::make({"a", "a"});
    FAIL() << "duplicate label accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::duplicate_label);
  }
}

TEST(Subset, ConstructionAndAlgebra) {
  UniversePtr u = Universe::make({"a", "b", "c", "d"});
  Subset s = Subset::of(u, {"a", "c"});
  EXPECT_TRUE(s.contains(0));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ(s.to_string(), "{a,c}");
  EXPECT_EQ(s.complement().to_string(), "{b,d}");
  EXPECT_EQ((s | Subset::of(u, {"b"})).to_string(), "{a,b,c}");
  EXPECT_EQ((s & Subset::of(u, {"c", "d"})).to_string(), "{c}");
  EXPECT_TRUE(Subset::empty(u).is_empty());
  EXPECT_EQ(Subset::full(u).complement(), Subset::empty(u));
  EXPECT_THROW(Subset::of(u, {"a", "z"}), Error);
}

TEST(Subset, CrossUniverseOperationsRejected) {
  UniversePtr u = Universe::make({"a", "b"});
  UniversePtr v = Universe::make({"a", "c"});
  try {
    (void)(Subset::full(u) | Subset::full(v));
    FAIL() << "cross-universe union accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::universe_mismatch);
  }
  // distinct instances with equal labels are interchangeable
  UniversePtr w = Universe::make({"a", "b"});
  EXPECT_EQ(Subset::of(u, {"a"}) | Subset::of(w, {"b"}), Subset::full(u));
}

TEST(ProductUniverse, PairIndexingMatchesLabels) {
  UniversePtr l = Universe::make({"x1", "x2"});
  UniversePtr r = Universe::make({"y1", "y2", "y3"});
  ProductUniversePtr p = ProductUniverse::make(l, r);
  EXPECT_EQ(p->universe()->size(), 6u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t k = p->pair_index(i, j);
      EXPECT_EQ(p->universe()->labels()[k], "(" + l->labels()[i] + "," + r->labels()[j] + ")");
    }
}

TEST(ProductUniverse, CylinderReachesEveryPairOnce) {
  UniversePtr l = Universe::make({"x1", "x2"});
  UniversePtr r = Universe::make({"y1", "y2", "y3"});
  ProductUniversePtr p = ProductUniverse::make(l, r);
  Subset cx = cylinder(Subset::of(l, {"x2"}), p, Axis::left);
  Subset cy = cylinder(Subset::of(r, {"y1", "y3"}), p, Axis::right);
  EXPECT_EQ(cx.to_string(), "{(x2,y1),(x2,y2),(x2,y3)}");
  EXPECT_EQ((cx & cy).to_string(), "{(x2,y1),(x2,y3)}");
  // cylinders of complements are complements of cylinders
  EXPECT_EQ(cylinder(Subset::of(l, {"x2"}).complement(), p, Axis::left), cx.complement());
}
