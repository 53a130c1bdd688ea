#include <gtest/gtest.h>

#include <valfield/construct.hpp>

#include "testutil.hpp"

using namespace valfield;

namespace {

Integer I(long v) { return Integer(v); }

// Direct loop for E_1 under phi(k, l) = k + k l.
std::vector<Integer> e1_oracle(unsigned n) {
  std::vector<Integer> e{2};
  for (unsigned k = 1; e.size() < n; ++k) e.push_back(Integer(k) + Integer(k) * e.back() + 1);
  return e;
}

Status status_of(const std::vector<Check>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c.status;
  return Status::fail;
}

}  // namespace

TEST(Phi, SchedulesAndInvariants) {
  PhiRule vt = PhiRule::vt();
  EXPECT_EQ(vt(I(1), I(2)), 3);
  EXPECT_EQ(vt(I(3), I(11)), 36);
  PhiRule po = PhiRule::poly({1, 3, 7});
  EXPECT_EQ(po(I(2), I(3)), 3 + 21);
  EXPECT_THROW(po(I(4), I(1)), Error);
  EXPECT_THROW(PhiRule::poly({2, 2}), Error);
  EXPECT_THROW(PhiRule::custom({{{I(1), I(3)}, I(3)}}), Error);
  EXPECT_THROW(PhiRule::custom({{{I(1), I(1)}, I(5)}, {{I(2), I(1)}, I(4)}}), Error);
  PhiRule cu = PhiRule::custom({{{I(1), I(1)}, I(3)}});
  EXPECT_EQ(cu(I(1), I(1)), 3);
  EXPECT_THROW(cu(I(2), I(1)), Error);

  std::vector<Integer> N;
  for (int j = 0; j < 64; ++j) N.push_back(Integer(1) << j);
  PhiRule pow2 = PhiRule::poly(N);
  vt::Rng r(5);
  for (int n = 0; n < 500; ++n) {
    Integer k = I(r.range(1, 60)), l = I(r.range(1, 60));
    for (const PhiRule& ph : {vt, pow2}) {
      EXPECT_GT(ph(k, l), std::max(k, l));
      EXPECT_GT(ph(k + 1, l), ph(k, l));
    }
  }
}

TEST(ETable, MinimalRowsMatchDirectLoop) {
  ETable E = make_E(PhiRule::vt());
  auto oracle = e1_oracle(12);
  for (unsigned k = 1; k <= 12; ++k) EXPECT_EQ(E(1, I(k)), oracle[k - 1]) << k;
  EXPECT_EQ(E.row(1, 5), (std::vector<Integer>{2, 4, 11, 37, 153}));
  EXPECT_EQ(E(2, I(1)), 2);
  EXPECT_EQ(E(2, I(2)), 37);
  EXPECT_EQ(E(2, I(3)), e1_oracle(77)[76]);
  for (unsigned i = 1; i <= 5; ++i) EXPECT_EQ(E(i, I(1)), 2);
  try {
    E(2, I(4));
    FAIL() << "expected overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overflow);
  }
}

TEST(ETable, GrowthInvariants) {
  for (const PhiRule& ph : {PhiRule::vt(), PhiRule::poly({1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233})}) {
    ETable E(ph);
    for (unsigned i = 1; i <= 2; ++i)
      for (unsigned long k = 1; k <= 6; ++k) {
        Integer e, en;
        try {
          e = E(i, I(k));
          en = E(i, I(k + 1));
        } catch (const Error& err) {
          EXPECT_TRUE(err.kind() == ErrorKind::overflow || err.kind() == ErrorKind::insufficient_depth);
          break;
        }
        EXPECT_GT(e, I(k));
        EXPECT_GT(en, e + 1);
        try {
          EXPECT_GE(en, ph(I(k), e) + 1);
        } catch (const Error&) {
        }
      }
  }
}

TEST(ETable, BitCapOverflows) {
  ETable E(PhiRule::vt(), Integer(1) << 20, 64);
  try {
    E(1, I(40));
    FAIL() << "expected overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overflow);
  }
}

TEST(Plan, MsTermsAndWitnesses) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  EXPECT_EQ(pl.a(I(3)).to_string(), "t^3");
  EXPECT_EQ(pl.alpha(I(5)), GroupElement::scalar(pl.basis, 5));
  EXPECT_EQ(build_witness(pl, E, 1, 4).to_string(), "t^2 + t^4 + t^11 + t^37 + O(t^153)");
  EXPECT_EQ(build_witness(pl, E, 1, 1).to_string(), "t^2 + O(t^4)");
  EXPECT_EQ(build_witness(pl, E, 2, 1).to_string(), "t^2 + O(t^37)");
  // Pseudo-Cauchy: consecutive prefixes differ at exactly the next omitted value.
  for (unsigned long k = 1; k < 4; ++k) {
    Series a = build_witness(pl, E, 1, k), b = build_witness(pl, E, 1, k + 1);
    Series diff = Series::from_terms(pl.basis, pl.field, b.terms()) - Series::from_terms(pl.basis, pl.field, a.terms());
    EXPECT_EQ(diff.valuation(), a.precision());
  }
}

TEST(Plan, MsConditionsPass) {
  Plan pl = plan_ms();
  ETable E = make_E(pl.phi);
  auto cs = check_conditions(pl, E, 4, 100, 7);
  for (const auto& c : cs) EXPECT_EQ(c.status, Status::pass) << c.name << " " << c.witness.dump();
}

TEST(Plan, A4TinyInstance) {
  // v(1 + t * t^2) = 0 <= vd_1 + alpha_2 = 1 + 2.
  Plan pl = plan_ms();
  Series one = Series::constant(pl.basis, FieldElem::one(pl.field));
  Series lhs = one + pl.a(I(1)) * pl.a(I(2));
  EXPECT_EQ(lhs.valuation(), Value(GroupElement::scalar(pl.basis, 0)));
  EXPECT_LE(lhs.valuation(), Value(pl.value(I(1)) + pl.alpha(I(2))));
}

TEST(Plan, CorruptedAlphaFailsA1) {
  Plan pl = plan_ms();
  auto good = pl.alpha;
  pl.alpha = [good, b = pl.basis](const Integer& k) {
    return k == 3 ? GroupElement::scalar(b, Rational(5, 2)) : good(k);
  };
  ETable E = make_E(pl.phi);
  Check c = check_A1(pl, E, 4);
  EXPECT_EQ(c.status, Status::fail);
  EXPECT_EQ(c.witness["k"], 3);
}

TEST(Plan, RtScalars) {
  Plan pl = plan_rt();
  std::vector<long> want{1, 2, 4, 12, 48};
  for (unsigned k = 1; k <= 5; ++k) {
    EXPECT_EQ(pl.value(I(k)), GroupElement::scalar(pl.basis, want[k - 1]));
    if (k > 1) EXPECT_GE(pl.value(I(k)), pl.value(I(k - 1)) * Rational(k - 1));
  }
  EXPECT_EQ(pl.a(I(2)).to_string(), "(s^2)*t^2");
  ETable E = make_E(pl.phi);
  auto cs = check_conditions(pl, E, 4, 60, 3);
  for (const auto& c : cs) EXPECT_EQ(c.status, Status::pass) << c.name << " " << c.witness.dump();
}

TEST(Plan, VaValuesAndCosets) {
  Plan pl = plan_va();
  std::vector<Rational> want{0, Rational(1, 2), Rational(7, 6), Rational(97, 24)};
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(pl.value(I(k)), GroupElement::scalar(pl.basis, want[k - 1]));
  for (unsigned k = 1; k <= 6; ++k) EXPECT_EQ(pl.a(I(k)).valuation(), Value(pl.value(I(k))));
  Subgroup vK = Subgroup::standard(pl.basis);
  EXPECT_EQ(*vK.coset_order(pl.value(I(4))), 24);
  ETable E = make_E(pl.phi);
  auto cs = check_conditions(pl, E, 3, 60, 3);
  for (const auto& c : cs) EXPECT_EQ(c.status, Status::pass) << c.name << " " << c.witness.dump();
}

TEST(Plan, RaAndSaResidueDegrees) {
  Plan ra = plan_ra(4);
  EXPECT_EQ(ra.field.degree(), 24u);
  std::vector<unsigned> dra{1, 2, 6, 24};
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(ra.term(I(k)).b.residue().min_poly_degree(), dra[k - 1]);
  EXPECT_EQ(ra.a(I(1)).to_string(), "1");
  EXPECT_THROW(ra.a(I(5)), Error);
  Plan sa = plan_sa(4);
  EXPECT_EQ(sa.field.degree(), 48u);
  std::vector<unsigned> dsa{2, 4, 12, 48};
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(sa.term(I(k)).b.residue().min_poly_degree(), dsa[k - 1]);
  std::vector<long> vc{0, 1, 2, 6};
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(sa.alpha(I(k)), GroupElement::scalar(sa.basis, vc[k - 1]));
  for (Plan* pl : {&ra, &sa}) {
    ETable E = make_E(pl->phi);
    auto cs = check_conditions(*pl, E, 4, 40, 9);
    for (const auto& c : cs) EXPECT_NE(c.status, Status::fail) << pl->id << " " << c.name << " " << c.witness.dump();
    EXPECT_EQ(status_of(cs, "A4"), Status::pass);
  }
}

TEST(Plan, VtSqrt2) {
  Plan pl = plan_vt_sqrt2();
  ETable E = make_E(pl.phi);
  auto cs = check_conditions(pl, E, 4, 40, 2);
  for (const auto& c : cs) EXPECT_EQ(c.status, Status::pass) << c.name << " " << c.witness.dump();
  GroupBasis b = GroupBasis::lex(2);
  EXPECT_THROW(plan_vt(b, GroupElement::scalar(b, Rational(1, 2))), Error);
}

TEST(Scenario, BuildAndValidate) {
  ScenarioDesc s;
  s.id = "ms";
  EXPECT_EQ(build_plan(s).id, "ms");
  s.coeff_field = "F3";
  EXPECT_THROW(build_plan(s), Error);
  s.p = 3;
  EXPECT_EQ(build_plan(s).field.p(), 3u);
  ScenarioDesc bad;
  bad.id = "nope";
  EXPECT_THROW(build_plan(bad), Error);
  ScenarioDesc refuted;
  refuted.id = "ms";
  refuted.basis = GroupBasis::lex(2);
  refuted.generator_value = std::vector<Rational>{Rational(3, 2), 0};
  try {
    build_plan(refuted);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  EXPECT_EQ(scenario_for_case("residue-algebraic"), "ra");
  ScenarioDesc ip;
  ip.id = "ip-val";
  EXPECT_THROW(build_plan(ip), Error);
  EXPECT_EQ(build_infpdeg(ip).n_families, 4u);
}

TEST(InfPDeg, SplitIndex) {
  EXPECT_EQ(infpdeg_s(1), 0u);
  EXPECT_EQ(infpdeg_s(2), 1u);
  EXPECT_EQ(infpdeg_s(3), 3u);
  for (unsigned long m = 1; m < 20; ++m) EXPECT_EQ(infpdeg_s(m + 1), infpdeg_s(m) + m);
}

TEST(InfPDeg, ResidueXiAndZ) {
  InfPDegPlan pl = plan_ip_res(2, 4, 4);
  EXPECT_EQ(pl.length, 15u);
  EXPECT_TRUE(infpdeg_xi(pl, 0, 0).is_exact_zero());
  const FieldDesc& F = pl.field;
  auto s = [&](std::size_t v) { return FieldElem::var(F, v).pth_root(); };
  auto tp = [&](long e) { return GroupElement::scalar(pl.basis, e); };
  Series want = Series::from_terms(pl.basis, F, {{tp(1), s(pl.slot[1][0])}, {tp(2), s(pl.slot[1][1])}});
  EXPECT_EQ(infpdeg_xi(pl, 1, 2), want);
  // z_2 = d_2 b_2^(1/2) + d_3 b_3^(1/4).
  Series z2 = infpdeg_z(pl, 0, 2);
  Series wz = Series::from_terms(pl.basis, F, {{tp(2), s(pl.slot[0][1])}, {tp(3), s(pl.slot[0][2]).pth_root()}});
  EXPECT_EQ(z2, wz);
  for (unsigned long m = 1; m <= 5; ++m) {
    Series z = infpdeg_z(pl, 2, m);
    ASSERT_EQ(z.size(), m);
    for (unsigned long i = 1; i <= m; ++i) EXPECT_EQ(z.terms()[i - 1].coeff.perf_level(), i);
  }
}

TEST(InfPDeg, ValueXiIncreasesAndZDenominators) {
  InfPDegPlan pl = plan_ip_val(2, 4, 4);
  for (unsigned tau = 0; tau < 4; ++tau) {
    Series xi = infpdeg_xi(pl, tau, pl.length);
    ASSERT_EQ(xi.size(), pl.length);
    for (std::size_t i = 1; i < xi.size(); ++i) EXPECT_LT(xi.terms()[i - 1].exp, xi.terms()[i].exp);
    for (unsigned long m = 1; m <= 5; ++m) {
      Series z = infpdeg_z(pl, tau, m);
      std::set<Integer> dens;
      for (const auto& t : z.terms())
        for (const auto& c : t.exp.coords()) dens.insert(Integer(c.get_den()));
      for (unsigned long i = 1; i <= m; ++i) EXPECT_TRUE(dens.count(ipow(2, i))) << m << " " << i;
    }
  }
}

TEST(InfPDeg, ZetaEtaIdentities) {
  for (const InfPDegPlan& pl : {plan_ip_val(2, 2, 4), plan_ip_res(2, 2, 4)}) {
    for (unsigned long n = 1; n <= 3; ++n) {
      ZetaEta ze = infpdeg_zeta_eta(pl, 1, n, n + 2);
      unsigned long j = infpdeg_s(n) + n;
      unsigned e = static_cast<unsigned>(n - 1);
      Series lead = pl.d[1][j - 1].frobenius(e) * pl.gen[1][j - 1].pth_root();
      Series diff = ze.zeta_N.frobenius(e) - ze.eta;
      GroupElement want = pl.d[1][j - 1].valuation().finite() * Rational(ipow(2, e)) +
                          pl.gen[1][j - 1].valuation().finite() / Rational(2);
      EXPECT_EQ(diff.valuation(), Value(want)) << pl.id << " n=" << n;
      EXPECT_EQ(diff.valuation(), lead.valuation());
      if (pl.side == Side::residue) {
        Series scaled = diff * pl.d[1][j - 1].frobenius(e).inv();
        EXPECT_EQ(scaled.residue(), pl.gen[1][j - 1].residue().pth_root()) << n;
      }
    }
  }
}

TEST(InfPDeg, CofinalValuesPassTargets) {
  InfPDegPlan pl = plan_ip_val(2, 1, 3, true);
  Series xi = infpdeg_xi(pl, 0, pl.length);
  for (std::size_t i = 0; i < xi.size(); ++i)
    EXPECT_GE(xi.terms()[i].exp, GroupElement::scalar(pl.basis, Rational(long(i + 1))));
}

TEST(InfPDeg, BadScalarsRejected) {
  InfPDegPlan pl = plan_ip_res(2, 1, 2);
  std::swap(pl.c[0][0], pl.c[0][1]);
  try {
    infpdeg_xi(pl, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::construction_inconsistency);
  }
}

TEST(DistinctMax, DmIIValuesAndTower) {
  InfPDegPlan pl = plan_dm_ii();
  Series xi = infpdeg_xi(pl, 0, 4);
  std::vector<Rational> want{0, Rational(1, 2), Rational(2, 3), Rational(3, 4)};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(xi.terms()[i].exp, GroupElement::scalar(pl.basis, want[i]));
  Value pi(GroupElement::scalar(pl.basis, 8));
  auto tower = distinct_max_tower(pl, 3, pi);
  ASSERT_EQ(tower.size(), 3u);
  for (const auto& lv : tower) {
    EXPECT_EQ(lv.bound, Value(GroupElement::scalar(pl.basis, 0)));
    EXPECT_LE(lv.bound, Value(GroupElement::scalar(pl.basis, Rational(1, 2))));
    EXPECT_EQ(lv.d.to_string(), "t");
    EXPECT_GE(lv.theta.residual.value_lower_bound(), pi);
    // Realized tails: the omitted part costs at most p * pi_neg.
    Value pn(GroupElement::scalar(pl.basis, Rational(-1, 64)));
    Series th = lv.theta.realize(pn);
    Series c = (lv.xi * lv.d.inv()).frobenius(1);
    Series r = th.frobenius(1) - th - c.truncate(pi, true);
    EXPECT_GE(r.value_lower_bound(), pn * Rational(2));
  }
}

TEST(DistinctMax, DmIWindow) {
  InfPDegPlan pl = plan_dm_i();
  ASSERT_EQ(pl.n_families, 2u);
  ASSERT_EQ(pl.length, 2u);
  // Sorted reduced representatives: sqrt5-2, sqrt7-2, sqrt2, sqrt3.
  const GroupBasis& b = pl.basis;
  auto r = [&](std::size_t coord, long shift) {
    return GroupElement::unit(b, coord) - GroupElement::scalar(b, shift);
  };
  EXPECT_EQ(pl.gen[0][0].valuation().finite(), r(3, 2));
  EXPECT_EQ(pl.gen[1][0].valuation().finite(), r(4, 2));
  EXPECT_EQ(pl.gen[0][1].valuation().finite(), r(1, 0));
  EXPECT_EQ(pl.gen[1][1].valuation().finite(), r(2, 0));
  for (const auto& fam : pl.gen)
    for (const auto& a : fam) {
      EXPECT_GE(a.valuation().finite(), GroupElement::scalar(b, 0));
      EXPECT_LT(a.valuation().finite(), GroupElement::scalar(b, 2));
    }
  Value pi(GroupElement::scalar(b, 8));
  auto tower = distinct_max_tower(pl, 2, pi);
  ASSERT_EQ(tower.size(), 2u);
  for (const auto& lv : tower) {
    EXPECT_LT(lv.bound, Value(GroupElement::scalar(b, 1)));
    EXPECT_EQ(lv.d.to_string(), "t");
    EXPECT_GE(lv.theta.residual.value_lower_bound(), pi);
  }
}
