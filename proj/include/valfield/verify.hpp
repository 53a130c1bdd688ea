// Checkers: the polynomial bound at witness points, independence sweeps,
// value laws, the fundamental inequality, distances to subfields,
// pseudo-Cauchy structure and the X^2 - X tower.
#pragma once

#include <valfield/construct.hpp>

#include <numeric>
#include <set>

namespace valfield {

// ---------------------------------------------------------------------------
// Witnesses deep enough for a target precision.

// y_i known at least to `prec`: the shortest prefix whose precision reaches it.
inline Series witness_to(const Plan& pl, const ETable& E, unsigned i, const GroupElement& prec, unsigned long extra = 0) {
  unsigned long k = 1;
  while (pl.value(E(i, Integer(k + 1))) < prec) ++k;
  return build_witness(pl, E, i, k + extra);
}

// ---------------------------------------------------------------------------
// Coefficient families and candidate spaces.

// Polynomials sum_{j <= degree} c_j x^j with c_j in F_p.
struct CoeffFamily {
  Series x;
  unsigned degree = 0;
  std::uint64_t p = 2;

  Integer size() const { return ipow(p, degree + 1); }
  Series decode(Integer code) const {
    Series acc = Series::zero(x.basis(), x.field());
    Series xp = Series::constant(x.basis(), FieldElem::one(x.field()));
    Integer P(static_cast<unsigned long>(p));
    for (unsigned j = 0; j <= degree; ++j) {
      Integer dig = code % P;
      code /= P;
      if (dig != 0) acc = acc + xp.scaled(FieldElem::from_int(x.field(), static_cast<long long>(dig.get_ui())));
      xp = xp * x;
    }
    return acc;
  }
};

inline CoeffFamily default_family(const Plan& pl, unsigned degree) {
  Series x = pl.generator ? *pl.generator : detail::tpow(pl.basis, pl.field, GroupElement::scalar(pl.basis, 1));
  return CoeffFamily{x, degree, pl.field.p()};
}

// All polynomials in `nvars` variables of degree <= D in each, coefficients from
// the family; monomials in graded-lex order, candidate n has digit m for monomial m.
struct CandidateSpace {
  std::size_t nvars;
  unsigned D;
  CoeffFamily fam;
  std::vector<Exps> monomials;

  CandidateSpace(std::size_t n, unsigned d, CoeffFamily f) : nvars(n), D(d), fam(std::move(f)) {
    Exps e(n, 0);
    for (;;) {
      monomials.push_back(e);
      std::size_t j = 0;
      while (j < n && e[j] == D) e[j++] = 0;
      if (j == n) break;
      ++e[j];
    }
    std::stable_sort(monomials.begin(), monomials.end(), [](const Exps& a, const Exps& b) {
      unsigned sa = 0, sb = 0;
      for (auto x : a) sa += x;
      for (auto x : b) sb += x;
      if (sa != sb) return sa < sb;
      return a > b;
    });
  }

  Integer size() const { return pow_int(fam.size(), monomials.size()); }

  MultiPoly decode(Integer n) const {
    MultiPoly g(nvars, fam.x.basis(), fam.x.field());
    Integer q = fam.size();
    for (const auto& m : monomials) {
      Integer dig = n % q;
      n /= q;
      if (dig != 0) g.add(m, fam.decode(dig));
    }
    return g;
  }
};

namespace detail {

// Largest x-degree among the coefficients of g (coefficients built from the family).
inline unsigned x_degree(const Series& c, const Series& x) {
  GroupElement vx = x.valuation().finite();
  unsigned d = 0;
  for (const auto& t : c.terms()) {
    Rational q;
    for (std::size_t i = 0; i < vx.coords().size(); ++i)
      if (vx[i] != 0) {
        q = t.exp[i] / vx[i];
        break;
      }
    if (q > 0) d = std::max<unsigned>(d, static_cast<unsigned>(ceil(q).get_ui()));
  }
  return d;
}

// Whether c lies in S_{k-1}: decided by the recipe, or structurally for
// family coefficients (polynomials in the generator x of known degree).
inline std::optional<bool> coeff_in(const Series& c, const SubfieldDesc& S, const std::optional<CoeffFamily>& fam) {
  if (auto in = subfield_contains(c, S)) return in;
  if (!fam) return std::nullopt;
  if (auto pt = S.poly_in_t())
    if (pt->x == fam->x) return x_degree(c, fam->x) <= pt->degree;
  if (S.fin_gen() || S.hahn()) {
    // Family coefficients are polynomials in x; x = t lies in K, hence in S.
    if (fam->x.size() == 1 && fam->x.terms()[0].exp == GroupElement::scalar(fam->x.basis(), 1)) return true;
  }
  return std::nullopt;
}

}  // namespace detail

// Why (i, k, f) does not satisfy the bound's hypotheses, or nullopt when it does.
inline std::optional<std::string> btl_preconditions(const Plan& pl, const ETable& E, unsigned i, unsigned long k,
                                                    const MultiPoly& f,
                                                    const std::optional<CoeffFamily>& fam = std::nullopt) {
  if (k < 2) return "k must be >= 2";
  if (f.is_zero()) return "zero polynomial";
  if (f.nvars() != i) return "polynomial must have " + std::to_string(i) + " variables";
  for (std::size_t v = 0; v < i; ++v)
    if (f.degree_in(v) >= k) return "degree " + std::to_string(f.degree_in(v)) + " in X" + std::to_string(v + 1) + " not below k";
  SubfieldDesc S = pl.subfield(Integer(k - 1));
  for (const auto& [e, c] : f.terms()) {
    if (c.valuation().finite().sign() < 0) return "coefficient " + c.to_string() + " has negative value";
    auto in = detail::coeff_in(c, S, fam);
    if (!in) return "membership of " + c.to_string() + " in " + S.name() + " undecidable";
    if (!*in) return "coefficient " + c.to_string() + " not in " + S.name();
  }
  GroupElement vcf = crucial_exponent(f).second.valuation().finite();
  if (pl.alpha(E(i, Integer(k))) < vcf) return "alpha_E_i(k) below the crucial coefficient's value";
  return std::nullopt;
}

struct BtlOutcome {
  Status status = Status::skipped;
  std::string reason;
  Value value;
  GroupElement bound;
};

// v f(y_1, ..., y_i) < va_{E_i(k+1)}, evaluated at precision va_{E_i(k+1)}.
inline BtlOutcome btl_eval(const Plan& pl, const ETable& E, unsigned i, unsigned long k, const MultiPoly& f,
                           const std::optional<CoeffFamily>& fam = std::nullopt, int retries = 2) {
  BtlOutcome out{Status::skipped, "", Value::inf(), GroupElement(pl.basis)};
  try {
    if (auto why = btl_preconditions(pl, E, i, k, f, fam)) {
      out.reason = *why;
      return out;
    }
    out.bound = pl.value(E(i, Integer(k + 1)));
    Value pi(out.bound);
    for (int r = 0; r <= retries; ++r) {
      std::vector<Series> y;
      for (unsigned l = 1; l <= i; ++l) y.push_back(witness_to(pl, E, l, out.bound, r));
      try {
        Series g = eval_at_series(f, y, pi);
        out.value = g.value_decidable() ? g.valuation() : g.precision();
        out.status = g.value_decidable() && g.valuation() < pi ? Status::pass : Status::fail;
        if (out.status == Status::fail) out.reason = "value not below the bound";
        return out;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::insufficient_precision) throw;
        out.reason = e.what();
      }
    }
  } catch (const Error& e) {
    if (!detail::skippable(e)) throw;
    out.reason = e.what();
  }
  out.status = Status::skipped;
  return out;
}

inline Check btl_check(const Plan& pl, const ETable& E, unsigned i, unsigned long k, const MultiPoly& f) {
  BtlOutcome o = btl_eval(pl, E, i, k, f);
  json w = {{"i", i}, {"k", k}, {"f", f.to_string()}};
  if (o.status != Status::skipped) {
    w["value"] = o.value.pretty();
    w["bound"] = o.bound.pretty();
  }
  if (!o.reason.empty()) w["reason"] = o.reason;
  return make_check("btl", o.status, w);
}

enum class SweepKind { exhaustive, random };

struct SweepMode {
  SweepKind kind = SweepKind::exhaustive;
  std::uint64_t n = 0, seed = 0;
};

// All admissible f at (i, k): degree < k per variable, coefficients polynomials
// of degree <= k-1 in the generator; exhaustive or n random members.
inline Check btl_suite(const Plan& pl, const ETable& E, unsigned i, unsigned long k, SweepMode mode,
                       std::optional<Integer> max_candidates = std::nullopt) {
  CoeffFamily fam = default_family(pl, static_cast<unsigned>(k - 1));
  CandidateSpace space(i, static_cast<unsigned>(k - 1), fam);
  Integer total = space.size();
  std::string name = "btl i=" + std::to_string(i) + " k=" + std::to_string(k);
  if (mode.kind == SweepKind::exhaustive && max_candidates && total - 1 > *max_candidates)
    return make_check(name, Status::skipped, {{"candidates", Integer(total - 1).get_str()}, {"reason", "exceeds the candidate cap"}});
  std::size_t passed = 0, skipped = 0;
  auto run_one = [&](const Integer& n) -> std::optional<json> {
    MultiPoly f = space.decode(n);
    BtlOutcome o = btl_eval(pl, E, i, k, f, fam);
    if (o.status == Status::pass) ++passed;
    else if (o.status == Status::skipped) ++skipped;
    else
      return json{{"candidate", n.get_str()}, {"f", f.to_string()}, {"value", o.value.pretty()}, {"bound", o.bound.pretty()}};
    return std::nullopt;
  };
  if (mode.kind == SweepKind::exhaustive) {
    for (Integer n = 1; n < total; ++n)
      if (auto w = run_one(n)) return make_check(name, Status::fail, *w);
  } else {
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(static_cast<unsigned long>(mode.seed));
    for (std::uint64_t s = 0; s < mode.n; ++s) {
      Integer n = gr.get_z_range(total - 1) + 1;
      if (auto w = run_one(n)) return make_check(name, Status::fail, *w);
    }
  }
  return make_check(name, passed ? Status::pass : Status::skipped,
                    {{"admissible", passed}, {"inadmissible", skipped}, {"mode", mode.kind == SweepKind::exhaustive ? "exhaustive" : "random"}});
}

// ---------------------------------------------------------------------------
// Independence sweep.

struct SweepOptions {
  unsigned D = 2;
  unsigned coeff_deg = 3;
  SweepMode mode;
  std::optional<Integer> max_candidates = Integer(200000);
  int retries = 2;
  unsigned long k_cap = 64;
};

struct SweepVerdict {
  Status status = Status::skipped;
  unsigned long k = 0;
  Value value;
  GroupElement bound;
  std::string reason;
};

// Divides g by the monomial t^(min coefficient value), then takes the least k
// for which g meets the bound's hypotheses and evaluates at y_1, ..., y_i.
inline SweepVerdict sweep_candidate(const Plan& pl, const ETable& E, unsigned i, const MultiPoly& g0,
                                    const CoeffFamily& fam, const SweepOptions& opt) {
  if (g0.is_zero()) fail(ErrorKind::zero_polynomial, "zero candidate");
  Value mv = Value::inf();
  for (const auto& [e, c] : g0.terms()) mv = vmin(mv, c.valuation());
  MultiPoly g = g0.scaled(detail::tpow(pl.basis, g0.field(), -mv.finite()));
  SweepVerdict v{Status::skipped, 0, Value::inf(), GroupElement(pl.basis), ""};
  for (unsigned long k = 2; k <= opt.k_cap; ++k) {
    std::optional<std::string> why;
    try {
      why = btl_preconditions(pl, E, i, k, g, fam);
    } catch (const Error& e) {
      if (!detail::skippable(e)) throw;
      v.reason = e.what();
      return v;
    }
    if (why) continue;
    BtlOutcome o = btl_eval(pl, E, i, k, g, fam, opt.retries);
    return SweepVerdict{o.status, k, o.value, o.bound, o.reason};
  }
  v.reason = "no k <= " + std::to_string(opt.k_cap) + " meets the hypotheses";
  return v;
}

inline Check independence_sweep(const Plan& pl, const ETable& E, unsigned i, const SweepOptions& opt) {
  CoeffFamily fam = default_family(pl, opt.coeff_deg);
  CandidateSpace space(i, opt.D, fam);
  Integer total = space.size();
  std::string name = "independence i=" + std::to_string(i) + " D=" + std::to_string(opt.D) +
                     " coeff_deg=" + std::to_string(opt.coeff_deg);
  json params = {{"mode", opt.mode.kind == SweepKind::exhaustive ? "exhaustive" : "random"}};
  if (opt.mode.kind == SweepKind::random) params["n"] = opt.mode.n, params["seed"] = opt.mode.seed;
  if (opt.mode.kind == SweepKind::exhaustive && opt.max_candidates && total - 1 > *opt.max_candidates) {
    params["candidates"] = Integer(total - 1).get_str();
    params["reason"] = "exceeds the candidate cap " + opt.max_candidates->get_str();
    return make_check(name, Status::skipped, params);
  }
  std::size_t nonzero = 0, skipped = 0;
  unsigned long kmin = 0, kmax = 0;
  json first_skip;
  auto run_one = [&](const Integer& n) -> std::optional<json> {
    MultiPoly g = space.decode(n);
    SweepVerdict v = sweep_candidate(pl, E, i, g, fam, opt);
    if (v.status == Status::fail)
      return json{{"candidate", n.get_str()}, {"g", g.to_string()}, {"k", v.k}, {"value", v.value.pretty()},
                  {"bound", v.bound.pretty()}};
    if (v.status == Status::skipped) {
      if (first_skip.is_null()) first_skip = {{"candidate", n.get_str()}, {"reason", v.reason}};
      ++skipped;
      return std::nullopt;
    }
    ++nonzero;
    kmin = kmin ? std::min(kmin, v.k) : v.k;
    kmax = std::max(kmax, v.k);
    return std::nullopt;
  };
  if (opt.mode.kind == SweepKind::exhaustive) {
    for (Integer n = 1; n < total; ++n)
      if (auto w = run_one(n)) {
        params["violation"] = *w;
        return make_check(name, Status::fail, params);
      }
  } else {
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(static_cast<unsigned long>(opt.mode.seed));
    for (std::uint64_t s = 0; s < opt.mode.n; ++s) {
      Integer n = gr.get_z_range(total - 1) + 1;
      if (auto w = run_one(n)) {
        params["violation"] = *w;
        return make_check(name, Status::fail, params);
      }
    }
  }
  params["nonzero"] = nonzero;
  params["skipped"] = skipped;
  if (nonzero) params["k_range"] = {kmin, kmax};
  if (!first_skip.is_null()) params["first_skip"] = first_skip;
  return make_check(name, skipped ? Status::skipped : Status::pass, params);
}

// ---------------------------------------------------------------------------
// Value of a sum versus the least value of its summands.

namespace detail {

inline Series random_nonzero_K(std::mt19937_64& g, const GroupBasis& b, const FieldDesc& f, const HahnRecipe& K) {
  for (;;) {
    Series s = sample_hahn(g, b, f, K, 3);
    if (!s.empty()) return s;
  }
}

// Coordinates of a coefficient-field element over F_p.
inline std::vector<fp::U> fp_coords(const FieldElem& e) {
  switch (e.desc().kind()) {
    case FieldKind::prime: return {*e.prime_value()};
    case FieldKind::finite: {
      std::vector<fp::U> c(e.coeffs().begin(), e.coeffs().end());
      c.resize(e.desc().degree(), 0);
      return c;
    }
    default: fail(ErrorKind::precondition, "F_p coordinates need a finite field");
  }
}

inline std::size_t fp_rank(std::vector<std::vector<fp::U>> rows, std::uint64_t p) {
  std::size_t rank = 0;
  std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < ncols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    fp::U inv = fp::invm(rows[rank][c], p);
    for (auto& x : rows[rank]) x = fp::mulm(x, inv, p);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][c]) {
        fp::U m = rows[r][c];
        for (std::size_t j = 0; j < ncols; ++j) rows[r][j] = fp::subm(rows[r][j], fp::mulm(m, rows[rank][j], p), p);
      }
    ++rank;
  }
  return rank;
}

}  // namespace detail

enum class LawScenario { va, ra, sqrt2 };

inline std::string law_name(LawScenario s) {
  switch (s) {
    case LawScenario::va: return "va";
    case LawScenario::ra: return "ra";
    case LawScenario::sqrt2: return "vt-sqrt2";
  }
  return "?";
}

// Sums of c * (basis element) whose values lie in distinct cosets, or whose
// residues are linearly independent, or mixed monomials x^i s^j: the value
// must equal the least summand value exactly.
inline Check monomial_min_value_check(LawScenario sc, int instances, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  GroupBasis b = sc == LawScenario::sqrt2 ? GroupBasis::real({1, 2}) : GroupBasis::lex(1);
  FieldDesc f = sc == LawScenario::ra ? FieldDesc::finite(2, 6)
                : sc == LawScenario::sqrt2 ? FieldDesc::ratfunc(2, {"s"})
                                           : FieldDesc::prime(2);
  HahnRecipe K = detail::prime_hahn(Subgroup(b, {GroupElement::scalar(b, 1)}));
  std::vector<Series> basis_elems;
  if (sc == LawScenario::va) {
    for (int i = 0; i < 6; ++i) basis_elems.push_back(detail::tpow(b, f, GroupElement::scalar(b, Rational(i, 6))));
  } else if (sc == LawScenario::ra) {
    FieldElem beta = detail::element_of_degree(f, 6);
    for (int j = 0; j < 6; ++j) basis_elems.push_back(Series::constant(b, beta.pow(Integer(j))));
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        basis_elems.push_back(Series::monomial(b, FieldElem::var(f, 0).pow(Integer(j)), GroupElement::unit(b, 1, i)));
  }
  for (int n = 0; n < instances; ++n) {
    std::vector<std::size_t> idx(basis_elems.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), g);
    std::size_t r = static_cast<std::size_t>(detail::rng_range(g, 1, static_cast<long long>(idx.size())));
    Series sum = Series::zero(b, f);
    Value least = Value::inf();
    json mons = json::array();
    for (std::size_t j = 0; j < r; ++j) {
      Series m = detail::random_nonzero_K(g, b, f, K) * basis_elems[idx[j]];
      least = vmin(least, m.valuation());
      sum = sum + m;
      mons.push_back(m.to_string());
    }
    if (!(sum.valuation() == least))
      return make_check("monomial-min " + law_name(sc), Status::fail,
                        {{"instance", n}, {"summands", mons}, {"value", sum.valuation().pretty()}, {"min", least.pretty()}});
  }
  return make_check("monomial-min " + law_name(sc), Status::pass, {{"instances", instances}});
}

// Elements of K[x]_n: values in at most n+1 cosets of vK, residues of
// value-normalized elements spanning at most n+1 dimensions over F_p.
inline Check polvspaces_check(LawScenario sc, int instances, std::uint64_t seed, unsigned n_max = 3,
                              int batch = 8) {
  std::mt19937_64 g(seed);
  Plan pl = sc == LawScenario::va ? plan_va() : sc == LawScenario::ra ? plan_ra(3) : plan_vt_sqrt2();
  Series x = sc == LawScenario::sqrt2 ? *pl.generator : pl.a(Integer(3));
  const GroupBasis& b = pl.basis;
  FieldDesc f = pl.field;
  HahnRecipe K = detail::prime_hahn(Subgroup(b, {GroupElement::scalar(b, 1)}));
  Subgroup vK = K.lattice;
  std::size_t max_cosets = 0, max_dim = 0;
  for (int inst = 0; inst < instances; ++inst) {
    unsigned n = static_cast<unsigned>(detail::rng_range(g, 0, n_max));
    std::vector<GroupElement> reps;
    std::vector<std::vector<fp::U>> rows;
    json elems = json::array();
    for (int s = 0; s < batch; ++s) {
      Series e = Series::zero(b, f);
      Series xp = Series::constant(b, FieldElem::one(f));
      for (unsigned j = 0; j <= n; ++j) {
        if (detail::rng_range(g, 0, 2)) e = e + detail::random_nonzero_K(g, b, f, K) * xp;
        xp = xp * x;
      }
      if (e.empty()) continue;
      elems.push_back(e.to_string());
      GroupElement v = e.valuation().finite();
      bool seen = std::any_of(reps.begin(), reps.end(), [&](const GroupElement& r) { return vK.contains(v - r); });
      if (!seen) reps.push_back(v);
      if (vK.contains(v)) {
        FieldElem res = (e * detail::tpow(b, f, -v)).residue();
        rows.push_back(detail::fp_coords(res));
      }
    }
    std::size_t dim = detail::fp_rank(rows, f.p());
    max_cosets = std::max(max_cosets, reps.size());
    max_dim = std::max(max_dim, dim);
    if (reps.size() > n + 1 || dim > n + 1)
      return make_check("polvspaces " + law_name(sc), Status::fail,
                        {{"instance", inst}, {"n", n}, {"cosets", reps.size()}, {"dimension", dim}, {"elements", elems}});
  }
  return make_check("polvspaces " + law_name(sc), Status::pass,
                    {{"instances", instances}, {"max_cosets", max_cosets}, {"max_dimension", max_dim}});
}

// ---------------------------------------------------------------------------
// Fundamental inequality.

struct Extension {
  std::string name;
  std::uint64_t p = 2;
  Subgroup vK;
  std::vector<GroupElement> values;  // values of elements of L
  std::vector<FieldElem> residues;   // residues generating Lv over Kv = F_p
  std::optional<Integer> degree;     // [L:K] when known exactly
};

struct InequalityRow {
  std::string name;
  std::optional<Integer> degree, e, f, defect;
  bool ok = true;
};

inline InequalityRow fundamental_inequality(const Extension& x) {
  InequalityRow r{x.name, x.degree, std::nullopt, std::nullopt, std::nullopt, true};
  r.e = x.vK.index_in(x.vK.with(x.values));
  Integer f = 1;
  for (const auto& res : x.residues) f = lcm(f, Integer(res.min_poly_degree()));
  r.f = f;
  if (!r.e || !x.degree) return r;
  Integer ef = *r.e * f;
  r.ok = *x.degree >= ef;
  if (r.ok && *x.degree % ef == 0) {
    r.defect = *x.degree / ef;
    Integer d = *r.defect;
    while (d % x.p == 0) d /= x.p;
    r.ok = d == 1;
  } else {
    r.ok = false;
  }
  return r;
}

// Extensions of the catalog whose degree is known exactly.
inline std::vector<Extension> catalog_extensions() {
  std::vector<Extension> out;
  GroupBasis L1 = GroupBasis::lex(1);
  Subgroup Z = Subgroup::standard(L1);
  out.push_back({"trivial", 2, Z, {}, {}, Integer(1)});
  out.push_back({"F3(t^(1/3))|F3(t)", 3, Z, {GroupElement::scalar(L1, Rational(1, 3))}, {}, Integer(3)});
  Plan va = plan_va();
  for (unsigned long k = 1; k <= 4; ++k) {
    Extension x{"va K(a_1..a_" + std::to_string(k) + ")", 2, Z, {}, {}, std::nullopt};
    Integer fact = 1;
    for (unsigned long j = 1; j <= k; ++j) {
      x.values.push_back(va.value(Integer(j)));
      fact *= j;
    }
    x.degree = fact;  // t^(1/k!) has degree k! over F_2((t))
    out.push_back(x);
  }
  for (Plan pl : {plan_ra(3), plan_sa(2)}) {
    for (unsigned long k = 1; k <= pl.term_limit->get_ui(); ++k) {
      FieldElem beta = pl.term(Integer(k)).b.residue();
      out.push_back({pl.id + " K(a_" + std::to_string(k) + ")", 2, Z, {}, {beta}, Integer(beta.min_poly_degree())});
    }
  }
  // K(z_m)|K: z^(p^m) lies in K, so the degree is at most p^m; the values
  // (z - first j summands)^(p^j) give the value index.
  InfPDegPlan ip = plan_ip_val(2, 1, 2);
  Subgroup vK = Subgroup::standard(ip.basis);
  for (unsigned long m = 1; m <= 3; ++m) {
    auto terms = infpdeg_z_terms(ip, 0, m);
    Series z = Series::zero(ip.basis, ip.field);
    for (const auto& t : terms) z = z + t;
    Extension x{"ip-val K(z_" + std::to_string(m) + ")", 2, vK, {}, {}, std::nullopt};
    for (unsigned long j = 0; j < m; ++j) {
      Series rest = z;
      for (unsigned long l = 0; l < j; ++l) rest = rest - terms[l];
      x.values.push_back(rest.frobenius(static_cast<unsigned>(j)).valuation().finite());
    }
    auto inK = subfield_contains(z.frobenius(static_cast<unsigned>(m)), ip.base_field());
    if (inK && *inK) x.degree = ipow(2, m);
    out.push_back(x);
  }
  return out;
}

inline Check fundamental_inequality_check(const std::vector<Extension>& exts) {
  json rows = json::array();
  bool ok = true, any = false;
  for (const auto& x : exts) {
    InequalityRow r = fundamental_inequality(x);
    json j = {{"extension", r.name}};
    auto s = [](const std::optional<Integer>& v) { return v ? json(v->get_str()) : json(nullptr); };
    j["degree"] = s(r.degree);
    j["value_index"] = s(r.e);
    j["residue_degree"] = s(r.f);
    j["defect"] = s(r.defect);
    if (r.degree && r.e) any = true;
    if (!r.ok) ok = false;
    rows.push_back(j);
  }
  return make_check("fundamental-inequality", !ok ? Status::fail : any ? Status::pass : Status::skipped, rows);
}

// ---------------------------------------------------------------------------
// Distance of xi_N from the field of the other families.

inline Check completion_distance_check(const InfPDegPlan& pl, unsigned N, int samples, std::uint64_t seed) {
  const GroupBasis& b = pl.basis;
  Series xi = infpdeg_xi(pl, N, pl.length);
  SubfieldDesc S = tower_subfield(pl, N);
  auto md = subfield_membership_distance(xi, S, samples, seed);
  Rational pq(static_cast<unsigned long>(pl.p));
  Rational window = pl.side == Side::value ? *pl.gamma / pq : *pl.gamma;
  json w = {{"family", N}, {"xi", xi.to_string()}, {"gamma", pl.gamma->get_str()}, {"window", window.get_str()}};
  std::string name = pl.id + " distance family " + std::to_string(N);
  if (!md.exact_bound || md.exact_bound->is_inf()) {
    w["reason"] = "no exact bound";
    return make_check(name, Status::fail, w);
  }
  Value B = *md.exact_bound;
  w["bound"] = B.pretty();
  w["bound_le_gamma_over_p"] = B <= Value(GroupElement::scalar(b, *pl.gamma / pq));
  w["sampled_sup"] = md.sampled_sup.pretty();
  bool ok = B < Value(GroupElement::scalar(b, window)) && md.sampled_sup <= B;
  // Partial sum without the last summand: distance is the last summand's value.
  std::vector<Term> head(xi.terms().begin(), xi.terms().end() - 1);
  Series d = Series::from_terms(b, xi.field(), head);
  Value last = Value(xi.terms().back().exp);
  ok = ok && (xi - d).valuation() == last && last < Value(GroupElement::scalar(b, *pl.gamma));
  auto in = subfield_contains(xi, S);
  ok = ok && in && !*in;
  return make_check(name, ok ? Status::pass : Status::fail, w);
}

// ---------------------------------------------------------------------------

inline Check pseudo_cauchy_check(const std::string& name, const std::vector<Series>& seq) {
  if (seq.size() < 3) return make_check(name, Status::skipped, {{"reason", "fewer than 3 terms"}});
  json vals = json::array();
  std::optional<Value> last;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    Series d = seq[i + 1] - seq[i];
    if (!d.value_decidable() || d.valuation().is_inf()) {
      vals.push_back("undecided");
      return make_check(name, Status::fail, {{"index", i}, {"differences", vals}});
    }
    Value v = d.valuation();
    vals.push_back(v.pretty());
    if (last && !(*last < v)) return make_check(name, Status::fail, {{"index", i}, {"differences", vals}});
    last = v;
  }
  return make_check(name, Status::pass, {{"differences", vals}});
}

// g_0 = X - t^-1, g_1 = X^2 - X - t^-1, g_{i+1}(X) = g_i(X^2 - X) over F_9:
// a root of value -1/2^i at every level.
inline Check infH_tower_check(unsigned depth, const Value& pi = Value::inf()) {
  GroupBasis b = GroupBasis::lex(1);
  FieldDesc F = FieldDesc::finite(3, 2);
  auto cst = [&](long c) { return Series::constant(b, FieldElem::from_int(F, c)); };
  Series tinv = detail::tpow(b, F, GroupElement::scalar(b, -1));
  MultiPoly sub = MultiPoly::univariate({cst(0), cst(-1), cst(1)});
  MultiPoly g = MultiPoly::univariate({-tinv, cst(1)});
  Value prec = pi.is_inf() ? Value(GroupElement::scalar(b, 2)) : pi;
  json levels = json::array();
  for (unsigned i = 0; i <= depth; ++i) {
    if (i == 1) g = MultiPoly::univariate({-tinv, cst(-1), cst(1)});
    if (i > 1) {
      // g(X^2 - X) by Horner over the dense coefficients.
      auto c = detail::dense(g);
      MultiPoly acc = MultiPoly::univariate({c.back()});
      for (std::size_t j = c.size() - 1; j-- > 0;) acc = acc * sub + MultiPoly::univariate({c[j]});
      g = acc;
    }
    GroupElement want = GroupElement::scalar(b, Rational(-1) / Rational(ipow(2, i)));
    auto roots = puiseux_roots(g, prec, 8);
    std::vector<std::string> vals;
    bool found = false;
    for (const auto& r : roots) {
      vals.push_back(r.valuation().pretty());
      found = found || r.valuation() == Value(want);
    }
    levels.push_back({{"level", i}, {"degree", g.degree()}, {"root_values", vals}});
    if (!found) return make_check("infH-tower", Status::fail, {{"levels", levels}, {"missing", want.pretty()}});
  }
  return make_check("infH-tower", Status::pass, {{"levels", levels}});
}

// alpha_k equals the Krasner constant of a_k for minimal polynomials of degree <= max_degree.
inline Check krasner_alpha_check(const Plan& pl, unsigned max_degree = 8) {
  json rows = json::array();
  std::size_t checked = 0;
  for (unsigned long k = 1; pl.term_limit && k <= pl.term_limit->get_ui(); ++k) {
    PlanTerm tm = pl.term(Integer(k));
    FieldElem beta = tm.b.residue();
    unsigned D = beta.min_poly_degree();
    if (D < 2 || D > max_degree) continue;
    // prod over conjugates (X - c beta^(p^j)).
    MultiPoly f = MultiPoly::univariate({Series::constant(pl.basis, FieldElem::one(pl.field))});
    for (unsigned j = 0; j < D; ++j) {
      Series conj = tm.c * Series::constant(pl.basis, beta.frobenius(j));
      f = f * MultiPoly::univariate({-conj, Series::constant(pl.basis, FieldElem::one(pl.field))});
    }
    KrasnerResult kr = krasner_constant(f, max_degree);
    ++checked;
    rows.push_back({{"k", k}, {"degree", D}, {"kras", kr.value.pretty()}, {"alpha", pl.alpha(Integer(k)).pretty()}});
    if (!(kr.value == pl.alpha(Integer(k))) || pl.alpha(Integer(k)) < pl.value(Integer(k)))
      return make_check("krasner-alpha", Status::fail, rows);
  }
  return make_check("krasner-alpha", checked ? Status::pass : Status::skipped, rows);
}

// ---------------------------------------------------------------------------
// p-th root families: sequence structure, eta identities, z-supports, tower.

namespace detail {

template <class F>
Check guarded(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::construction_inconsistency) return make_check(name, Status::fail, {{"error", e.what()}});
    if (skippable(e)) return make_check(name, Status::skipped, {{"reason", e.what()}});
    throw;
  }
}

// Largest m with s(m) + m <= length: the z blocks the prefix supports.
inline unsigned long z_blocks(const InfPDegPlan& pl) {
  unsigned long m = 0;
  while (infpdeg_s(m + 1) + m + 1 <= pl.length) ++m;
  return m;
}

}  // namespace detail

// xi_{tau,1..length} and zeta_{tau,1..m} are pseudo-Cauchy.
inline std::vector<Check> infpdeg_sequence_checks(const InfPDegPlan& pl) {
  std::vector<Check> out;
  for (unsigned tau = 0; tau < pl.n_families; ++tau) {
    std::string xn = pl.id + " xi family " + std::to_string(tau);
    out.push_back(detail::guarded(xn, [&] {
      std::vector<Series> xs;
      for (unsigned long n = 1; n <= pl.length; ++n) xs.push_back(infpdeg_xi(pl, tau, n));
      Check c = pseudo_cauchy_check(xn, xs);
      return c;
    }));
    if (pl.id == "dm-i" || pl.id == "dm-ii") continue;
    std::string zn = pl.id + " zeta family " + std::to_string(tau);
    out.push_back(detail::guarded(zn, [&] {
      std::vector<Series> zs;
      for (unsigned long n = 1; n <= detail::z_blocks(pl); ++n) zs.push_back(infpdeg_zeta(pl, tau, n));
      return pseudo_cauchy_check(zn, zs);
    }));
  }
  return out;
}

// For n <= n_max and N = n + 2:
//   v(zeta_N^(p^(n-1)) - eta_n) = p^(n-1) v d_{s(n)+n} + (1/p) v a_{s(n)+n},
// and on the residue side the residue of d^(-p^(n-1)) (zeta_N^(p^(n-1)) - eta_n)
// is b_{s(n)+n}^(1/p).
inline Check infpdeg_eta_check(const InfPDegPlan& pl, unsigned tau, unsigned long n_max = 3) {
  std::string name = pl.id + " eta family " + std::to_string(tau);
  return detail::guarded(name, [&] {
    json rows = json::array();
    Rational pq(static_cast<unsigned long>(pl.p));
    for (unsigned long n = 1; n <= n_max; ++n) {
      ZetaEta ze = infpdeg_zeta_eta(pl, tau, n, n + 2);
      unsigned long j = infpdeg_s(n) + n;
      unsigned e = static_cast<unsigned>(n - 1);
      const Series& d = pl.d[tau][j - 1];
      const Series& a = pl.gen[tau][j - 1];
      Series diff = ze.zeta_N.frobenius(e) - ze.eta;
      GroupElement want = d.valuation().finite() * Rational(ipow(pl.p, e)) + a.valuation().finite() / pq;
      json row = {{"n", n}, {"N", n + 2}, {"value", diff.valuation().pretty()}, {"expected", want.pretty()}};
      bool ok = diff.valuation() == Value(want);
      if (pl.side == Side::residue) {
        FieldElem r = (diff * d.frobenius(e).inv()).residue();
        FieldElem w = a.residue().pth_root();
        row["residue"] = r.to_string();
        ok = ok && r == w;
      }
      rows.push_back(row);
      if (!ok) return make_check(name, Status::fail, rows);
    }
    return make_check(name, Status::pass, rows);
  });
}

// z_{tau,m} carries denominators p, ..., p^m in its value support (value side)
// or p-th root levels 1, ..., m in its residues (residue side).
inline Check infpdeg_z_support_check(const InfPDegPlan& pl, unsigned tau) {
  std::string name = pl.id + " z-support family " + std::to_string(tau);
  return detail::guarded(name, [&] {
    json rows = json::array();
    unsigned long M = detail::z_blocks(pl);
    for (unsigned long m = 1; m <= M; ++m) {
      Series z = infpdeg_z(pl, tau, m);
      std::set<Integer> got;
      for (const auto& t : z.terms()) {
        if (pl.side == Side::value)
          for (const auto& c : t.exp.coords()) got.insert(Integer(c.get_den()));
        else
          got.insert(ipow(pl.p, t.coeff.perf_level()));
      }
      json dens = json::array();
      for (const auto& g : got) dens.push_back(g.get_str());
      rows.push_back({{"m", m}, {"denominators", dens}});
      for (unsigned long i = 1; i <= m; ++i)
        if (!got.count(ipow(pl.p, static_cast<unsigned>(i)))) return make_check(name, Status::fail, rows);
    }
    return make_check(name, M ? Status::pass : Status::skipped, rows);
  });
}

// Builds theta_1, ..., theta_m and checks each Artin-Schreier residual is O(pi).
inline Check distinct_max_tower_check(const InfPDegPlan& pl, unsigned m_max, const Value& pi) {
  std::string name = pl.id + " tower";
  return detail::guarded(name, [&] {
    auto tower = distinct_max_tower(pl, m_max, pi);
    json rows = json::array();
    bool ok = true;
    for (const auto& lv : tower) {
      Value res = lv.theta.residual.value_lower_bound();
      bool lok = !(res < pi) && lv.bound < Value(GroupElement::scalar(pl.basis, lv.window));
      rows.push_back({{"family", lv.family},
                      {"bound", lv.bound.pretty()},
                      {"window", lv.window.get_str()},
                      {"d", lv.d.to_string()},
                      {"residual_at_least", res.pretty()},
                      {"tails", lv.theta.tails.size()}});
      ok = ok && lok;
    }
    return make_check(name, ok ? Status::pass : Status::fail, rows);
  });
}

}  // namespace valfield
