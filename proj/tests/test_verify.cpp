#include <gtest/gtest.h>

#include <valfield/verify.hpp>

#include <bitset>

#include "testutil.hpp"

using namespace valfield;

namespace {

// F_2[t] modulo t^256 as bitsets; the independent oracle for ms sweeps over F_2.
using Bits = std::bitset<256>;

Bits clmul(const Bits& a, const Bits& b) {
  Bits r;
  for (std::size_t i = 0; i < 256; ++i)
    if (a[i]) r ^= b << i;
  return r;
}

Bits bits_of(const Series& s) {
  Bits r;
  for (const auto& t : s.terms()) {
    Integer e = floor(t.exp[0]);
    if (e < 256) r.set(e.get_ui());
  }
  return r;
}

int lowest(const Bits& b) {
  for (std::size_t i = 0; i < 256; ++i)
    if (b[i]) return static_cast<int>(i);
  return -1;
}

Value V(const GroupBasis& b, Rational q) { return Value(GroupElement::scalar(b, q)); }

}  // namespace

TEST(Btl, HandInstances) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  const GroupBasis& b = pl.basis;
  Series one = Series::constant(b, FieldElem::one(pl.field));
  Series t = *pl.generator;
  // f = X: v y_1 = 2 < 4 at k = 2.
  MultiPoly X = MultiPoly::univariate({Series::zero(b, pl.field), one});
  Check c = btl_check(pl, E, 1, 2, X);
  EXPECT_EQ(c.status, Status::pass);
  EXPECT_EQ(c.witness["value"], "2");
  // f = X^2 + tX at k = 3: t^3 + t^4 + t^5 + ... gives 3 < 37.
  MultiPoly f = MultiPoly::univariate({Series::zero(b, pl.field), t, one});
  c = btl_check(pl, E, 1, 3, f);
  EXPECT_EQ(c.status, Status::pass);
  EXPECT_EQ(c.witness["value"], "3");
  EXPECT_EQ(c.witness["bound"], "37");
  // Degree too large for k = 2: skipped, not failed.
  EXPECT_EQ(btl_check(pl, E, 1, 2, f).status, Status::skipped);
  // Cross-variable monomial at i = 2, k = 2: y_1 y_2 + y_1 + y_2 with
  // y_1 = t^2 + t^4, y_2 = t^2 + t^37; the t^2 and t^4 terms cancel.
  MultiPoly g(2, b, pl.field);
  g.add({1, 1}, one);
  g.add({1, 0}, one);
  g.add({0, 1}, one);
  c = btl_check(pl, E, 2, 2, g);
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness["value"], "6");
}

TEST(Btl, SuitesAtSmallK) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  for (unsigned long k = 2; k <= 3; ++k) {
    Check c = btl_suite(pl, E, 1, k, SweepMode{});
    EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  }
  Check r = btl_suite(pl, E, 2, 2, SweepMode{SweepKind::random, 100, 11});
  EXPECT_EQ(r.status, Status::pass) << r.witness.dump();
}

TEST(Sweep, ZeroCandidateRejected) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  MultiPoly z(1, pl.basis, pl.field);
  try {
    sweep_candidate(pl, E, 1, z, default_family(pl, 3), SweepOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::zero_polynomial);
  }
}

TEST(Sweep, MsOneVariableMatchesBitOracle) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  SweepOptions opt;
  opt.D = 2;
  opt.coeff_deg = 3;
  CoeffFamily fam = default_family(pl, 3);
  CandidateSpace space(1, 2, fam);
  ASSERT_EQ(space.size(), 4096);
  Bits y = bits_of(build_witness(pl, E, 1, 4));  // t^2 + t^4 + t^11 + t^37
  Bits y2 = clmul(y, y);
  Bits mask;
  for (int i = 0; i < 153; ++i) mask.set(i);
  for (long n = 1; n < 4096; ++n) {
    MultiPoly g = space.decode(Integer(n));
    SweepVerdict v = sweep_candidate(pl, E, 1, g, fam, opt);
    ASSERT_EQ(v.status, Status::pass) << n;
    Bits acc = bits_of(g.coeff(0u)) ^ clmul(bits_of(g.coeff(1u)), y) ^ clmul(bits_of(g.coeff(2u)), y2);
    int low = lowest(acc & mask);
    ASSERT_GE(low, 0) << n;
    // The sweep normalizes by t^(min coefficient value); the oracle does not.
    int shift = 256;
    for (const auto& [e, c] : g.terms()) shift = std::min(shift, static_cast<int>(floor(c.valuation().finite()[0]).get_ui()));
    EXPECT_EQ(v.value, V(pl.basis, low - shift)) << n;
  }
  Check c = independence_sweep(pl, E, 1, opt);
  EXPECT_EQ(c.status, Status::pass);
  EXPECT_EQ(c.witness["nonzero"], 4095);
}

TEST(Sweep, MsTwoVariables) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  SweepOptions opt;
  opt.D = 1;
  opt.coeff_deg = 1;
  Check c = independence_sweep(pl, E, 2, opt);
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness["nonzero"], 255);
}

TEST(Sweep, CapAndRandomMode) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  SweepOptions opt;
  opt.D = 2;
  opt.coeff_deg = 3;
  opt.max_candidates = Integer(1000);
  Check c = independence_sweep(pl, E, 2, opt);
  EXPECT_EQ(c.status, Status::skipped);
  opt.mode = SweepMode{SweepKind::random, 50, 4};
  c = independence_sweep(pl, E, 1, opt);
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness["nonzero"], 50);
}

TEST(ValueLaws, MinOfMonomials) {
  GroupBasis b = GroupBasis::real({1, 2});
  FieldDesc f = FieldDesc::prime(2);
  Series t = Series::monomial(b, FieldElem::one(f), GroupElement::scalar(b, 1));
  Series x = Series::monomial(b, FieldElem::one(f), GroupElement::unit(b, 1));
  EXPECT_EQ((t + x).valuation(), V(b, 1));
  for (LawScenario s : {LawScenario::va, LawScenario::ra, LawScenario::sqrt2}) {
    Check c = monomial_min_value_check(s, 300, 8);
    EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
    Check d = polvspaces_check(s, 200, 9);
    EXPECT_EQ(d.status, Status::pass) << d.witness.dump();
    EXPECT_LE(d.witness["max_cosets"].get<int>(), 4);
  }
  Check z = polvspaces_check(LawScenario::va, 50, 3, 0);
  EXPECT_EQ(z.witness["max_cosets"], 1);
  EXPECT_EQ(z.witness["max_dimension"], 1);
  Check r = polvspaces_check(LawScenario::ra, 200, 3, 2);
  EXPECT_EQ(r.status, Status::pass);
  EXPECT_LE(r.witness["max_dimension"].get<int>(), 3);
}

TEST(ValueLaws, FpRank) {
  EXPECT_EQ(detail::fp_rank({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}}, 2), 2u);
  EXPECT_EQ(detail::fp_rank({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}}, 3), 3u);
  EXPECT_EQ(detail::fp_rank({}, 2), 0u);
}

TEST(FundamentalInequality, CatalogDefects) {
  auto exts = catalog_extensions();
  for (const auto& x : exts) {
    InequalityRow r = fundamental_inequality(x);
    EXPECT_TRUE(r.ok) << x.name;
    ASSERT_TRUE(r.defect) << x.name;
    EXPECT_EQ(*r.defect, 1) << x.name;
  }
  auto find = [&](const std::string& n) {
    for (const auto& x : exts)
      if (x.name == n) return fundamental_inequality(x);
    return InequalityRow{};
  };
  InequalityRow f3 = find("F3(t^(1/3))|F3(t)");
  EXPECT_EQ(*f3.e, 3);
  EXPECT_EQ(*f3.f, 1);
  InequalityRow z3 = find("ip-val K(z_3)");
  EXPECT_EQ(*z3.degree, 8);
  EXPECT_EQ(*z3.e, 8);
  EXPECT_EQ(fundamental_inequality_check(exts).status, Status::pass);
  // A claimed degree below e f violates the inequality.
  Extension bad = exts[1];
  bad.degree = Integer(2);
  EXPECT_FALSE(fundamental_inequality(bad).ok);
}

TEST(Distance, DmInstances) {
  InfPDegPlan d2 = plan_dm_ii();
  for (unsigned N = 0; N < 3; ++N) {
    Check c = completion_distance_check(d2, N, 64, 5);
    EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
    EXPECT_EQ(c.witness["bound"], "0");
    EXPECT_EQ(c.witness["bound_le_gamma_over_p"], true);
  }
  InfPDegPlan d1 = plan_dm_i();
  for (unsigned N = 0; N < 2; ++N) EXPECT_EQ(completion_distance_check(d1, N, 64, 5).status, Status::pass);
}

TEST(PseudoCauchy, Sequences) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  std::vector<Series> ys;
  Series acc = Series::zero(pl.basis, pl.field);
  for (unsigned long k = 1; k <= 4; ++k) ys.push_back(acc = acc + pl.a(E(1, Integer(k))));
  Check c = pseudo_cauchy_check("ms", ys);
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness["differences"], json({"4", "11", "37"}));
  Series one = Series::constant(pl.basis, FieldElem::one(pl.field));
  EXPECT_EQ(pseudo_cauchy_check("const", {one, one, one}).status, Status::fail);
  EXPECT_EQ(pseudo_cauchy_check("short", {one, one}).status, Status::skipped);
  InfPDegPlan ip = plan_ip_res(2, 1, 3);
  std::vector<Series> zs;
  for (unsigned long n = 1; n <= 4; ++n) zs.push_back(infpdeg_zeta(ip, 0, n));
  EXPECT_EQ(pseudo_cauchy_check("zeta", zs).status, Status::pass);
}

TEST(InfH, TowerValues) {
  Check c = infH_tower_check(2);
  ASSERT_EQ(c.status, Status::pass) << c.witness.dump();
  auto lv = c.witness["levels"];
  ASSERT_EQ(lv.size(), 3u);
  auto has = [](const json& v, const std::string& s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  };
  EXPECT_TRUE(has(lv[0]["root_values"], "-1"));
  EXPECT_TRUE(has(lv[1]["root_values"], "-1/2"));
  EXPECT_TRUE(has(lv[2]["root_values"], "-1/4"));
}

TEST(Krasner, SeparablePlanAlpha) {
  Check c = krasner_alpha_check(plan_sa(2));
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness.size(), 2u);
}

TEST(InfPDegChecks, SequencesEtaAndSupports) {
  for (const InfPDegPlan& pl : {plan_ip_val(2, 2, 4), plan_ip_res(2, 2, 4)}) {
    for (const Check& c : infpdeg_sequence_checks(pl)) EXPECT_EQ(c.status, Status::pass) << c.name << c.witness.dump();
    for (unsigned tau = 0; tau < 2; ++tau) {
      Check e = infpdeg_eta_check(pl, tau);
      EXPECT_EQ(e.status, Status::pass) << e.witness.dump();
      EXPECT_EQ(e.witness.size(), 3u);
      Check z = infpdeg_z_support_check(pl, tau);
      EXPECT_EQ(z.status, Status::pass) << z.witness.dump();
      EXPECT_EQ(z.witness.size(), 5u);
    }
  }
  // Corrupted scalars surface as a failure, not an exception.
  InfPDegPlan bad = plan_ip_res(2, 1, 2);
  std::swap(bad.c[0][0], bad.c[0][1]);
  EXPECT_EQ(infpdeg_sequence_checks(bad)[0].status, Status::fail);
}

TEST(InfPDegChecks, Towers) {
  InfPDegPlan d2 = plan_dm_ii();
  Check c = distinct_max_tower_check(d2, 3, Value(GroupElement::scalar(d2.basis, 8)));
  EXPECT_EQ(c.status, Status::pass) << c.witness.dump();
  EXPECT_EQ(c.witness.size(), 3u);
  InfPDegPlan d1 = plan_dm_i();
  EXPECT_EQ(distinct_max_tower_check(d1, 2, Value(GroupElement::scalar(d1.basis, 8))).status, Status::pass);
}
