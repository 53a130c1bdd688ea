#include <valfield/ogroup.hpp>

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace valfield;

namespace {

GroupElement lex2(Rational a, Rational b) { return GroupElement(GroupBasis::lex(2), {a, b}); }

TEST(GroupArith, AddSubScale) {
  auto b = GroupBasis::lex(2);
  EXPECT_EQ(lex2(1, 0) + lex2(0, 1), lex2(1, 1));
  EXPECT_EQ(lex2(1, 0) * Rational(1, 2), lex2(Rational(1, 2), 0));
  EXPECT_TRUE((lex2(1, 1) - lex2(1, 1)).is_zero());
  EXPECT_THROW(lex2(1, 0) + GroupElement(GroupBasis::lex(3)), Error);
  (void)b;
}

TEST(GroupCmp, Lexicographic) {
  EXPECT_GT(lex2(1, 0), lex2(0, 5));
  EXPECT_LT(lex2(0, -3), lex2(0, 2));
}

TEST(GroupCmp, RealEmbedded) {
  auto b = GroupBasis::real({1, 2});
  GroupElement sqrt2(b, {0, 1}), one(b, {1, 0});
  EXPECT_GT(sqrt2, one);
  // 3 - 2*sqrt2 > 0 since sqrt2 < 1.5; oracle: (2*sqrt2)^2 = 8 < 9.
  GroupElement x(b, {3, -2});
  EXPECT_GT(x, GroupElement(b));
  EXPECT_LT(GroupElement(b, {-3, 2}), GroupElement(b));
}

TEST(GroupCmp, RealEmbeddedCloseValues) {
  // 577/408 is a convergent of sqrt2; the difference is about 2e-6.
  auto b = GroupBasis::real({1, 2});
  EXPECT_GT(GroupElement(b, {Rational(577, 408), 0}), GroupElement(b, {0, 1}));
  EXPECT_LT(GroupElement(b, {Rational(1393, 985), 0}), GroupElement(b, {0, 1}));
  // 665857/470832 - sqrt2 ~ 1.6e-12, decided by the exact refinement.
  Rational big(Integer("886731088897"), Integer("627013566048"));
  EXPECT_GT(GroupElement(b, {big, -1}).sign(), 0);
}

TEST(GroupBasisTest, RejectsBadWeights) {
  EXPECT_THROW(GroupBasis::real({1, 4}), Error);
  EXPECT_THROW(GroupBasis::real({3, 2}), Error);
  EXPECT_THROW(GroupBasis::lex(0), Error);
}

TEST(CosetOrder, Examples) {
  auto b = GroupBasis::lex(2);
  auto z2 = Subgroup::standard(b);
  EXPECT_EQ(*z2.coset_order(lex2(Rational(1, 2), 0)), 2);
  // Oracle: smallest n in 1..12 with n*alpha integral.
  GroupElement a = lex2(Rational(1, 3), Rational(1, 2));
  int oracle = 0;
  for (int n = 1; n <= 12 && !oracle; ++n) {
    GroupElement m = a * Rational(n);
    if (m[0].get_den() == 1 && m[1].get_den() == 1) oracle = n;
  }
  EXPECT_EQ(oracle, 6);
  EXPECT_EQ(*z2.coset_order(a), oracle);

  auto rb = GroupBasis::real({1, 2});
  Subgroup h(rb, {GroupElement(rb, {1, 0})});
  EXPECT_FALSE(h.coset_order(GroupElement(rb, {0, Rational(1, 2)})).has_value());
}

TEST(CosetOrder, NonStandardLattice) {
  auto b = GroupBasis::lex(2);
  // H generated by (2,1) and (0,3): index 6 in Z^2.
  Subgroup h(b, {lex2(2, 1), lex2(0, 3)});
  EXPECT_EQ(*h.index_in(Subgroup::standard(b)), 6);
  EXPECT_TRUE(h.contains(lex2(2, 4)));
  EXPECT_FALSE(h.contains(lex2(1, 0)));
  EXPECT_EQ(*h.coset_order(lex2(1, 0)), 6);
}

TEST(Index, ValueIndex) {
  auto b = GroupBasis::lex(1);
  Subgroup z = Subgroup::standard(b);
  Subgroup third = z.with({GroupElement::scalar(b, Rational(1, 3))});
  EXPECT_EQ(*z.index_in(third), 3);
  auto rb = GroupBasis::real({1, 2});
  Subgroup zr(rb, {GroupElement(rb, {1, 0})});
  EXPECT_FALSE(zr.index_in(Subgroup::standard(rb)).has_value());
}

// Properties ---------------------------------------------------------------

TEST(GroupProperties, OrderCompatibleWithAddition) {
  vt::Rng r(11);
  for (auto b : {GroupBasis::lex(3), GroupBasis::real({1, 2, 3})}) {
    for (int i = 0; i < 2000; ++i) {
      auto x = vt::random_element(r, b), y = vt::random_element(r, b), c = vt::random_element(r, b);
      auto o1 = x <=> y;
      auto o2 = (x + c) <=> (y + c);
      EXPECT_EQ(o1, o2);
      EXPECT_EQ(x < y, y > x);
      EXPECT_EQ(x == y, (x <=> y) == 0);
    }
  }
}

TEST(GroupProperties, RealOrderAgreesWithBigFloat) {
  vt::Rng r(12);
  auto b = GroupBasis::real({1, 2, 3, 5, 7});
  std::vector<mpf_class> roots;
  for (auto w : b.weights()) roots.push_back(sqrt(mpf_class(static_cast<unsigned long>(w), 200)));
  for (int i = 0; i < 10000; ++i) {
    std::vector<Rational> c;
    for (std::size_t j = 0; j < b.rank(); ++j) c.push_back(r.rational(1000000, 1000));
    GroupElement g(b, c);
    mpf_class acc(0, 200);
    for (std::size_t j = 0; j < c.size(); ++j) acc += mpf_class(c[j], 200) * roots[j];
    int fs = sgn(acc);
    EXPECT_EQ(g.sign(), fs);
  }
}

TEST(GroupProperties, CosetOrderIsMinimal) {
  vt::Rng r(13);
  auto b = GroupBasis::lex(2);
  for (int i = 0; i < 300; ++i) {
    Subgroup h(b, {vt::random_element(r, b, 4, 3), vt::random_element(r, b, 4, 3)});
    auto a = vt::random_element(r, b, 6, 8);
    auto n = h.coset_order(a);
    if (!n) {
      EXPECT_EQ(h.rank(), 1u);  // two random generators spanning only a line
      continue;
    }
    ASSERT_LT(*n, 100000);
    EXPECT_TRUE(h.contains(a * Rational(*n)));
    for (long m = 1; m < n->get_si(); ++m) EXPECT_FALSE(h.contains(a * Rational(m)));
  }
}

}  // namespace
