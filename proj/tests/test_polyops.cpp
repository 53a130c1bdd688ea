#include <gtest/gtest.h>

#include <valfield/polyops.hpp>

#include "testutil.hpp"

using namespace valfield;

namespace {

GroupBasis L1 = GroupBasis::lex(1);

Series tpow(const FieldDesc& f, Rational e, long long c = 1) {
  return Series::monomial(L1, FieldElem::from_int(f, c), GroupElement::scalar(L1, e));
}
Series one(const FieldDesc& f) { return Series::constant(L1, FieldElem::one(f)); }

MultiPoly random_poly(vt::Rng& r, const FieldDesc& f, unsigned maxdeg) {
  unsigned d = static_cast<unsigned>(r.range(0, maxdeg));
  std::vector<Series> c;
  for (unsigned j = 0; j <= d; ++j) c.push_back(vt::random_series(r, L1, f, 3, false, 6, 2));
  return MultiPoly::univariate(c);
}

// Naive evaluation: exact products, no truncation.
Series naive_eval(const MultiPoly& f, const std::vector<Series>& y) {
  Series acc = Series::zero(f.basis(), f.field());
  for (const auto& [e, c] : f.terms()) {
    Series m = c;
    for (std::size_t j = 0; j < e.size(); ++j) m = m * y[j].pow(e[j]);
    acc = acc + m;
  }
  return acc;
}

}  // namespace

TEST(PolyOps, HasseDerivativeMatchesBinomials) {
  FieldDesc f = FieldDesc::prime(3);
  std::vector<Series> c;
  for (int j = 0; j <= 9; ++j) c.push_back(tpow(f, j, 1));
  MultiPoly g = MultiPoly::univariate(c);
  for (unsigned i = 0; i <= 9; ++i) {
    MultiPoly d = formal_derivative(g, 0, i);
    for (unsigned k = 0; k + i <= 9; ++k) {
      Integer b;
      mpz_bin_uiui(b.get_mpz_t(), k + i, i);
      long r = mpz_fdiv_ui(b.get_mpz_t(), 3);
      Series want = r ? tpow(f, k + i, r) : Series::zero(L1, f);
      EXPECT_EQ(d.coeff(k), want) << "i=" << i << " k=" << k;
    }
  }
}

TEST(PolyOps, FrobeniusPowerHasOnlyTopDerivative) {
  // X^4 over F2: f_1 = f_2 = f_3 = 0, f_4 = 1.
  FieldDesc f = FieldDesc::prime(2);
  MultiPoly g(1, L1, f);
  g.add({4}, one(f));
  EXPECT_TRUE(formal_derivative(g, 0, 1).is_zero());
  EXPECT_TRUE(formal_derivative(g, 0, 2).is_zero());
  EXPECT_TRUE(formal_derivative(g, 0, 3).is_zero());
  EXPECT_EQ(formal_derivative(g, 0, 4).coeff(0), one(f));
}

TEST(PolyOps, MultivariateDerivative) {
  FieldDesc f = FieldDesc::prime(5);
  MultiPoly g(2, L1, f);
  g.add({3, 2}, tpow(f, 1));
  g.add({1, 4}, tpow(f, 2));
  MultiPoly d = formal_derivative(g, 1, 2);  // binom(2,2)=1, binom(4,2)=6=1
  EXPECT_EQ(d.coeff(Exps{3, 0}), tpow(f, 1));
  EXPECT_EQ(d.coeff(Exps{1, 2}), tpow(f, 2));
  EXPECT_EQ(d.terms().size(), 2u);
}

TEST(PolyOps, CrucialExponent) {
  FieldDesc f = FieldDesc::prime(2);
  MultiPoly g(2, L1, f);
  g.add({0, 5}, tpow(f, 1));
  g.add({1, 0}, tpow(f, 3));
  g.add({1, 2}, tpow(f, 7));
  auto [e, c] = crucial_exponent(g);
  EXPECT_EQ(e, (Exps{1, 2}));
  EXPECT_EQ(c, tpow(f, 7));
  EXPECT_THROW(crucial_exponent(MultiPoly(2, L1, f)), Error);
}

TEST(PolyOps, EvaluationExample) {
  // X^2 + tX at t^2 + t^4 gives t^3 + t^4 + t^5 + t^8 over F2.
  FieldDesc f = FieldDesc::prime(2);
  MultiPoly g = MultiPoly::univariate({Series::zero(L1, f), tpow(f, 1), one(f)});
  Series y = tpow(f, 2) + tpow(f, 4);
  Series v = eval_at_series(g, {y}, Value::inf());
  EXPECT_EQ(v, tpow(f, 3) + tpow(f, 4) + tpow(f, 5) + tpow(f, 8));
  EXPECT_EQ(eval_at_series(g, {y}, Value(GroupElement::scalar(L1, 5))).to_string(), "t^3 + t^4 + O(t^5)");
}

TEST(PolyOps, InsufficientPrecisionNamesRequirement) {
  FieldDesc f = FieldDesc::prime(3);
  MultiPoly g = MultiPoly::univariate({Series::zero(L1, f), Series::zero(L1, f), one(f)});
  Series y = tpow(f, -1).truncate(Value(GroupElement::scalar(L1, 2)), true);
  ASSERT_EQ(y.precision(), Value(GroupElement::scalar(L1, 2)));
  Series ok = eval_at_series(g, {y}, Value(GroupElement::scalar(L1, 1)));
  EXPECT_EQ(ok.precision(), Value(GroupElement::scalar(L1, 1)));
  try {
    eval_at_series(g, {y}, Value(GroupElement::scalar(L1, 3)));
    FAIL() << "expected insufficient precision";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_precision);
    EXPECT_NE(std::string(e.what()).find("y1>=4"), std::string::npos) << e.what();
  }
}

TEST(PolyOps, TaylorIdentityRandom) {
  for (fp::U p : {2u, 3u, 5u}) {
    FieldDesc f = FieldDesc::prime(p);
    vt::Rng r(1000 + p);
    for (int it = 0; it < 1000; ++it) {
      MultiPoly g = random_poly(r, f, 6);
      if (g.is_zero()) g.add({0}, one(f));
      Series c = vt::random_series(r, L1, f, 3, false, 6, 2);
      ASSERT_TRUE(taylor_check(g, c)) << "p=" << p << " f=" << g.to_string() << " c=" << c.to_string();
    }
  }
}

TEST(PolyOps, TaylorDetectsCorruptedDerivative) {
  for (fp::U p : {2u, 3u, 5u}) {
    FieldDesc f = FieldDesc::prime(p);
    vt::Rng r(7 * p);
    for (int it = 0; it < 100; ++it) {
      MultiPoly g = random_poly(r, f, 6);
      Series c = vt::random_series(r, L1, f, 3, false, 6, 2);
      std::vector<MultiPoly> d;
      for (unsigned i = 0; i <= std::max(1u, g.degree()); ++i) d.push_back(formal_derivative(g, 0, i));
      d[1].add({0}, one(f));
      EXPECT_FALSE(taylor_check_with(g, c, d));
    }
  }
}

TEST(PolyOps, EvaluationAgreesWithNaive) {
  vt::Rng r(42);
  for (fp::U p : {2u, 3u}) {
    FieldDesc f = FieldDesc::prime(p);
    for (int it = 0; it < 500; ++it) {
      MultiPoly g(2, L1, f);
      int nt = static_cast<int>(r.range(1, 4));
      for (int k = 0; k < nt; ++k)
        g.add({static_cast<std::uint32_t>(r.range(0, 3)), static_cast<std::uint32_t>(r.range(0, 3))},
              vt::random_series(r, L1, f, 2, false, 6, 1));
      std::vector<Series> y{vt::random_series(r, L1, f, 3, false, 6, 1), vt::random_series(r, L1, f, 3, false, 6, 1)};
      Series exact = naive_eval(g, y);
      EXPECT_EQ(eval_at_series(g, y, Value::inf()), exact);
      Value pi(GroupElement::scalar(L1, Rational(static_cast<long>(r.range(-10, 20)))));
      EXPECT_EQ(eval_at_series(g, y, pi), exact.truncate(pi, true));
    }
  }
}

TEST(PolyOps, InexactInputsAgreeWithAnyCompletion) {
  // If y is known to precision q, f(y) to the reported precision agrees
  // with f evaluated at any exact series agreeing with y.
  vt::Rng r(5);
  FieldDesc f = FieldDesc::prime(3);
  for (int it = 0; it < 500; ++it) {
    MultiPoly g = random_poly(r, f, 4);
    Series ex = vt::random_series(r, L1, f, 4, false, 6, 1);
    Value q(GroupElement::scalar(L1, Rational(static_cast<long>(r.range(-3, 8)))));
    Series y = ex.truncate(q, true);
    Series got = eval_best_effort(g, {y});
    EXPECT_TRUE(agree(got, naive_eval(g, {ex}))) << g.to_string() << " at " << y.to_string();
  }
}
