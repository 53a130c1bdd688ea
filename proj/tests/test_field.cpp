#include <valfield/field.hpp>

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace valfield;

namespace {

TEST(FieldArith, Examples) {
  auto f2 = FieldDesc::prime(2);
  EXPECT_TRUE((FieldElem::one(f2) + FieldElem::one(f2)).is_zero());

  auto r = FieldDesc::ratfunc(2, {"s"});
  auto s = FieldElem::var(r, 0);
  EXPECT_EQ(s.inv().to_string(), "(1)/(s)");
  EXPECT_TRUE((s * s.inv()).is_one());

  auto pc = FieldDesc::perf_closure(r);
  auto sp = FieldElem::var(pc, 0);
  auto h = sp.pth_root();
  EXPECT_EQ(h.to_string(), "(s)^(1/2)");
  // Oracle: squaring both sides of s^(1/2) * s^(1/2) = s.
  EXPECT_EQ(h * h, sp);
  EXPECT_EQ((h * h).frobenius(1), sp * sp);
  EXPECT_THROW(FieldElem::zero(f2).inv(), Error);
}

TEST(FieldArith, FractionsReduce) {
  auto r = FieldDesc::ratfunc(3, {"s", "u"});
  auto s = FieldElem::var(r, 0), u = FieldElem::var(r, 1);
  auto x = (s * s - u * u) / (s + u);
  EXPECT_EQ(x, s - u);
  auto y = (s * u + u) / (u * u);
  EXPECT_EQ(y.to_string(), "(s+1)/(u)");
  // Denominator monic: 1/(2s) = 2/s over F3.
  auto z = (s + s).inv();
  EXPECT_EQ(z.to_string(), "(2)/(s)");
}

TEST(PthRoot, Examples) {
  auto f2 = FieldDesc::prime(2);
  EXPECT_TRUE(FieldElem::one(f2).pth_root().is_one());
  auto pc = FieldDesc::perf_closure(FieldDesc::ratfunc(2, {"s"}));
  auto s = FieldElem::var(pc, 0);
  EXPECT_EQ((s * s).pth_root(), s);
  EXPECT_EQ(s.pth_root().perf_level(), 1u);
  auto r = FieldDesc::ratfunc(2, {"s"});
  EXPECT_THROW(FieldElem::var(r, 0).pth_root(), Error);
}

TEST(PthRoot, CapEnforced) {
  auto pc = FieldDesc::perf_closure(FieldDesc::ratfunc(2, {"s"}), 3);
  auto s = FieldElem::var(pc, 0);
  auto x = s.pth_root().pth_root().pth_root();
  EXPECT_EQ(x.perf_level(), 3u);
  EXPECT_THROW(x.pth_root(), Error);
}

TEST(IsPthPower, Examples) {
  auto r2 = FieldDesc::ratfunc(2, {"s"});
  auto s = FieldElem::var(r2, 0);
  EXPECT_EQ(*(s * s).is_pth_power(), s);
  EXPECT_FALSE(s.is_pth_power().has_value());
  auto r3 = FieldDesc::ratfunc(3, {"s", "u"});
  auto s3 = FieldElem::var(r3, 0), u3 = FieldElem::var(r3, 1);
  EXPECT_EQ(*(s3.pow(3) * u3.pow(3)).is_pth_power(), s3 * u3);
  EXPECT_EQ(*((s3 + u3).pow(3) / (s3.pow(3) + FieldElem::one(r3))).is_pth_power(),
            (s3 + u3) / (s3 + FieldElem::one(r3)));
}

TEST(FiniteField, Moduli) {
  EXPECT_EQ(FieldDesc::finite(2, 2).modulus(), (fp::Poly{1, 1, 1}));
  EXPECT_EQ(FieldDesc::finite(2, 3).modulus(), (fp::Poly{1, 1, 0, 1}));
  EXPECT_EQ(FieldDesc::finite(3, 2).modulus(), (fp::Poly{1, 0, 1}));
  EXPECT_EQ(FieldDesc::finite(2, 6).modulus(), (fp::Poly{1, 1, 0, 0, 0, 0, 1}));
}

TEST(MinPolyDegree, Examples) {
  EXPECT_EQ(FieldElem::generator(FieldDesc::finite(2, 2)).min_poly_degree(), 2u);
  EXPECT_EQ(FieldElem::one(FieldDesc::finite(2, 3)).min_poly_degree(), 1u);
  auto f64 = FieldDesc::finite(2, 6);
  auto g = FieldElem::generator(f64);
  EXPECT_EQ(g.min_poly_degree(), 6u);
  // Oracle: the Frobenius orbit of g has exactly 6 distinct elements.
  std::vector<std::string> orbit;
  auto x = g;
  for (int i = 0; i < 6; ++i) {
    orbit.push_back(x.to_string());
    x = x.frobenius(1);
  }
  EXPECT_EQ(x, g);
  std::sort(orbit.begin(), orbit.end());
  EXPECT_EQ(std::unique(orbit.begin(), orbit.end()) - orbit.begin(), 6);
  // g^9 has order 7 and lies in F_8.
  EXPECT_EQ(g.pow(9).min_poly_degree(), 3u);
  EXPECT_EQ(g.pow(21).min_poly_degree(), 2u);
}

// Properties ---------------------------------------------------------------

std::vector<FieldDesc> descs() {
  return {FieldDesc::prime(2),
          FieldDesc::prime(5),
          FieldDesc::finite(2, 4),
          FieldDesc::finite(3, 2),
          FieldDesc::ratfunc(2, {"s", "u"}),
          FieldDesc::ratfunc(3, {"s"}),
          FieldDesc::perf_closure(FieldDesc::ratfunc(2, {"s", "u"}))};
}

TEST(FieldProperties, Axioms) {
  vt::Rng r(21);
  for (const auto& d : descs()) {
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      auto a = vt::random_field_elem(r, d), b = vt::random_field_elem(r, d), c = vt::random_field_elem(r, d);
      ASSERT_EQ((a + b) + c, a + (b + c)) << d.to_string();
      ASSERT_EQ((a * b) * c, a * (b * c)) << d.to_string();
      ASSERT_EQ(a * (b + c), a * b + a * c) << d.to_string();
      ASSERT_EQ(a + b, b + a);
      ASSERT_TRUE((a - a).is_zero());
      if (!a.is_zero()) ASSERT_TRUE((a * a.inv()).is_one()) << a.to_string();
    }
  }
}

TEST(FieldProperties, PthRootInvertsFrobenius) {
  vt::Rng r(22);
  for (const auto& d : descs()) {
    if (!d.is_perfect()) continue;
    for (int i = 0; i < 500; ++i) {
      auto x = vt::random_field_elem(r, d);
      ASSERT_EQ(x.pth_root().frobenius(1), x) << x.to_string();
      ASSERT_EQ(x.frobenius(1).pth_root(), x);
      ASSERT_EQ(x.frobenius(1), x.pow(Integer(static_cast<unsigned long>(d.p()))));
    }
  }
}

TEST(FieldProperties, MinPolyDegreeDividesN) {
  vt::Rng r(23);
  for (auto [p, n] : std::vector<std::pair<unsigned, unsigned>>{{2, 6}, {3, 4}, {5, 3}, {2, 12}}) {
    auto d = FieldDesc::finite(p, n);
    for (int i = 0; i < 200; ++i) {
      auto x = vt::random_field_elem(r, d);
      unsigned m = x.min_poly_degree();
      EXPECT_EQ(n % m, 0u);
      // Oracle: x^(p^m) == x exactly for m = degree and not for any proper divisor.
      EXPECT_EQ(x.frobenius(m), x);
      for (unsigned k = 1; k < m; ++k) EXPECT_NE(x.frobenius(k), x);
    }
  }
}

}  // namespace
