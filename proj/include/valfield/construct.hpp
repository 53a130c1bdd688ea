// Construction engine: schedules, index tables, plans for the four
// transcendence/algebraicity cases, condition checks, witnesses, and the
// p-th root families used for infinite p-degree and distinct maximal
// immediate extensions.
#pragma once

#include <valfield/hensel.hpp>
#include <valfield/report.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <memory>

namespace valfield {

// ---------------------------------------------------------------------------
// Schedule functions phi(k, l).

class PhiRule {
 public:
  enum class Kind { vt, poly, custom };
  using Table = std::map<std::pair<Integer, Integer>, Integer>;

  static PhiRule vt() { return PhiRule(Kind::vt, {}, {}); }

  // phi(k, l) = N_k + N_k N_l; N[0] is N_1.
  static PhiRule poly(std::vector<Integer> N) {
    if (N.empty()) fail(ErrorKind::precondition, "empty degree sequence");
    if (N[0] < 1) fail(ErrorKind::precondition, "N_1 must be positive");
    for (std::size_t i = 1; i < N.size(); ++i)
      if (N[i] <= N[i - 1]) fail(ErrorKind::precondition, "degree sequence must increase strictly");
    return PhiRule(Kind::poly, std::move(N), {});
  }

  static PhiRule custom(Table t) {
    for (const auto& [kl, v] : t) {
      const auto& [k, l] = kl;
      if (k < 1 || l < 1) fail(ErrorKind::precondition, "phi indices start at 1");
      if (v <= std::max(k, l))
        fail(ErrorKind::precondition, "phi(" + k.get_str() + "," + l.get_str() + ") = " + v.get_str() +
                                          " is not above max(k, l)");
      auto nx = t.find({k + 1, l});
      if (nx != t.end() && nx->second <= v)
        fail(ErrorKind::precondition, "phi not increasing in k at (" + k.get_str() + "," + l.get_str() + ")");
    }
    return PhiRule(Kind::custom, {}, std::move(t));
  }

  Kind kind() const { return kind_; }
  const std::vector<Integer>& degrees() const { return N_; }

  std::string name() const {
    switch (kind_) {
      case Kind::vt: return "k+kl";
      case Kind::poly: return "N_k+N_k*N_l";
      case Kind::custom: return "table";
    }
    return "?";
  }

  Integer operator()(const Integer& k, const Integer& l) const {
    if (k < 1 || l < 1) fail(ErrorKind::precondition, "phi indices start at 1");
    switch (kind_) {
      case Kind::vt: return k + k * l;
      case Kind::poly: {
        Integer nk = N(k), nl = N(l);
        return nk + nk * nl;
      }
      case Kind::custom: {
        auto it = tab_->find({k, l});
        if (it == tab_->end())
          fail(ErrorKind::precondition, "phi(" + k.get_str() + "," + l.get_str() + ") not in the table");
        return it->second;
      }
    }
    return 0;
  }

  // N_k for the polynomial schedule.
  Integer N(const Integer& k) const {
    if (k < 1 || k > N_.size())
      fail(ErrorKind::insufficient_depth, "N_" + k.get_str() + " beyond the degree table");
    return N_[k.get_ui() - 1];
  }

 private:
  PhiRule(Kind k, std::vector<Integer> N, Table t)
      : kind_(k), N_(std::move(N)), tab_(std::make_shared<const Table>(std::move(t))) {}

  Kind kind_;
  std::vector<Integer> N_;
  std::shared_ptr<const Table> tab_;
};

// ---------------------------------------------------------------------------
// E_i(k): the minimal table with E_i(1) = 2,
//   E_1(k+1) = phi(k, E_1(k)) + 1,  E_i(k+1) = E_{i-1}(phi(k, E_i(k)) + 1).

class ETable {
 public:
  explicit ETable(PhiRule phi, Integer max_index = Integer(1) << 20, unsigned max_bits = 4096)
      : phi_(std::move(phi)), max_index_(std::move(max_index)), max_bits_(max_bits),
        rows_(std::make_shared<std::vector<std::vector<Integer>>>()) {}

  const PhiRule& phi() const { return phi_; }

  Integer operator()(unsigned i, const Integer& k) const {
    if (i < 1 || k < 1) fail(ErrorKind::precondition, "E_i(k) needs i, k >= 1");
    if (k > max_index_)
      fail(ErrorKind::overflow, "E_" + std::to_string(i) + "(" + k.get_str() + "): index beyond " +
                                    max_index_.get_str());
    if (rows_->size() < i) rows_->resize(i);
    if (rows_->at(i - 1).empty()) rows_->at(i - 1).push_back(2);
    unsigned long kk = k.get_ui();
    while (rows_->at(i - 1).size() < kk) {
      Integer j = static_cast<unsigned long>(rows_->at(i - 1).size());
      Integer next = phi_(j, rows_->at(i - 1).back()) + 1;
      if (i > 1) next = (*this)(i - 1, next);
      if (mpz_sizeinbase(next.get_mpz_t(), 2) > max_bits_)
        fail(ErrorKind::overflow, "E_" + std::to_string(i) + "(" + Integer(j + 1).get_str() + ") exceeds " +
                                      std::to_string(max_bits_) + " bits");
      rows_->at(i - 1).push_back(next);
    }
    return rows_->at(i - 1)[kk - 1];
  }

  std::vector<Integer> row(unsigned i, unsigned long k_max) const {
    std::vector<Integer> out;
    for (unsigned long k = 1; k <= k_max; ++k) out.push_back((*this)(i, Integer(k)));
    return out;
  }

 private:
  PhiRule phi_;
  Integer max_index_;
  unsigned max_bits_;
  std::shared_ptr<std::vector<std::vector<Integer>>> rows_;
};

inline ETable make_E(const PhiRule& phi) { return ETable(phi); }

// ---------------------------------------------------------------------------
// Plans.

enum class CaseTag { value_transcendental, residue_transcendental, value_algebraic, residue_algebraic,
                     separable_algebraic };

inline std::string case_name(CaseTag c) {
  switch (c) {
    case CaseTag::value_transcendental: return "valuation-transcendental";
    case CaseTag::residue_transcendental: return "residue-transcendental";
    case CaseTag::value_algebraic: return "value-algebraic";
    case CaseTag::residue_algebraic: return "residue-algebraic";
    case CaseTag::separable_algebraic: return "separable-algebraic";
  }
  return "?";
}

struct PlanTerm {
  Series b, c, a;
};

struct Plan {
  std::string id;
  CaseTag tag = CaseTag::value_transcendental;
  PhiRule phi = PhiRule::vt();
  GroupBasis basis = GroupBasis::lex(1);
  FieldDesc field = FieldDesc::prime(2);
  HahnRecipe base{Subgroup(GroupBasis::lex(1), {}), {}, {}};  // the base field K
  std::optional<Series> generator;  // distinguished generator when S_k = K[x]_n
  bool cofinal = false;
  std::optional<Integer> term_limit;  // a_k is realizable for k <= term_limit

  std::function<PlanTerm(const Integer&)> term;
  std::function<GroupElement(const Integer&)> value;  // va_k, without building a_k
  std::function<GroupElement(const Integer&)> alpha;
  std::function<SubfieldDesc(const Integer&)> subfield;

  Series a(const Integer& k) const {
    if (term_limit && k > *term_limit)
      fail(ErrorKind::insufficient_depth, "a_" + k.get_str() + " beyond the plan depth " + term_limit->get_str());
    return term(k).a;
  }
  SubfieldDesc base_field() const { return SubfieldDesc("K", base); }
};

namespace detail {

inline Series tpow(const GroupBasis& b, const FieldDesc& f, const GroupElement& e) {
  return Series::monomial(b, FieldElem::one(f), e);
}

inline unsigned long small_index(const Integer& k, unsigned long limit, const char* what) {
  if (k < 1) fail(ErrorKind::precondition, std::string(what) + " index must be >= 1");
  if (k > limit) fail(ErrorKind::insufficient_depth, std::string(what) + "_" + k.get_str() + " beyond " +
                                                         std::to_string(limit) + " generated entries");
  return k.get_ui();
}

// Largest integer m with m <= g (g read as an element of the ordered group).
inline Integer floor_of(const GroupElement& g) {
  const GroupBasis& b = g.basis();
  Integer m;
  if (b.mode() == OrderMode::lexicographic) {
    m = floor(g[0]);
  } else {
    double approx = 0;
    for (std::size_t i = 0; i < b.rank(); ++i) approx += g[i].get_d() * std::sqrt(double(b.weights()[i]));
    m = Integer(std::floor(approx));
  }
  while (GroupElement::scalar(b, Rational(m)) > g) --m;
  while (GroupElement::scalar(b, Rational(m + 1)) <= g) ++m;
  return m;
}

// Lazily grown integer sequence v_1 = first, v_{k+1} = max(k v_k, v_k + 1).
class GrowthSeq {
 public:
  GrowthSeq(Integer first, unsigned long limit) : v_(std::make_shared<std::vector<Integer>>(1, first)), limit_(limit) {}
  Integer operator()(const Integer& k) const {
    unsigned long kk = small_index(k, limit_, "vc");
    while (v_->size() < kk) {
      Integer j = static_cast<unsigned long>(v_->size());
      v_->push_back(std::max(Integer(j * v_->back()), Integer(v_->back() + 1)));
    }
    return (*v_)[kk - 1];
  }

 private:
  std::shared_ptr<std::vector<Integer>> v_;
  unsigned long limit_;
};

inline HahnRecipe prime_hahn(const Subgroup& lattice) {
  return HahnRecipe{lattice, {}, CoeffRule{CoeffRule::Kind::prime_subfield, {}}};
}

inline std::vector<std::uint64_t> squarefree_from(std::uint64_t start, std::size_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = start; out.size() < n; ++q)
    if (is_squarefree(q)) out.push_back(q);
  return out;
}

}  // namespace detail

constexpr unsigned long kSequencePrefix = 512;

// ms: K = F_p trivially valued, L = F_p(t), a_k = t^k, alpha_k = k, S_k = K[t]_k.
inline Plan plan_ms(std::uint64_t p = 2) {
  Plan pl;
  pl.id = "ms";
  pl.tag = CaseTag::value_transcendental;
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::prime(p);
  pl.base = detail::prime_hahn(Subgroup(pl.basis, {}));
  GroupBasis b = pl.basis;
  FieldDesc f = pl.field;
  Series t = detail::tpow(b, f, GroupElement::scalar(b, 1));
  pl.generator = t;
  HahnRecipe base = pl.base;
  pl.value = [b](const Integer& k) { return GroupElement::scalar(b, Rational(k)); };
  pl.alpha = pl.value;
  pl.term = [b, f](const Integer& k) {
    Series a = detail::tpow(b, f, GroupElement::scalar(b, Rational(k)));
    return PlanTerm{a, Series::constant(b, FieldElem::one(f)), a};
  };
  pl.subfield = [t, base](const Integer& k) {
    return SubfieldDesc("K[t]_" + k.get_str(), PolyInTRecipe{t, static_cast<unsigned>(k.get_ui()), base});
  };
  return pl;
}

// Value-transcendental over K = F_p((t)) with x = t^g, g rationally independent
// from vK = Z: a_k = x^k, alpha_k = k g, S_k = K[x]_k.
inline Plan plan_vt(const GroupBasis& b, const GroupElement& g, std::uint64_t p = 2, std::string id = "vt") {
  Subgroup vK(b, {GroupElement::scalar(b, 1)});
  if (g.sign() <= 0) fail(ErrorKind::config, "generator value must be positive");
  if (auto ord = vK.coset_order(g))
    fail(ErrorKind::config, "claimed rationally independent value " + g.pretty() + " has order " + ord->get_str() +
                                " modulo vK");
  Plan pl;
  pl.id = std::move(id);
  pl.tag = CaseTag::value_transcendental;
  pl.basis = b;
  pl.field = FieldDesc::prime(p);
  pl.base = detail::prime_hahn(vK);
  FieldDesc f = pl.field;
  Series x = detail::tpow(b, f, g);
  pl.generator = x;
  HahnRecipe base = pl.base;
  pl.value = [g](const Integer& k) { return g * Rational(k); };
  pl.alpha = pl.value;
  pl.term = [b, f, g](const Integer& k) {
    Series a = detail::tpow(b, f, g * Rational(k));
    return PlanTerm{a, Series::constant(b, FieldElem::one(f)), a};
  };
  pl.subfield = [x, base](const Integer& k) {
    return SubfieldDesc("K[x]_" + k.get_str(), PolyInTRecipe{x, static_cast<unsigned>(k.get_ui()), base});
  };
  return pl;
}

inline Plan plan_vt_sqrt2(std::uint64_t p = 2) {
  GroupBasis b = GroupBasis::real({1, 2});
  return plan_vt(b, GroupElement::unit(b, 1), p, "vt-sqrt2");
}

// rt: K = F_p(u) u-adic (u plays t), residue variable s; a_k = c_k s^k with
// vc_1 = 1 and vc_{k+1} the least integer >= k vc_k and > vc_k.
inline Plan plan_rt(std::uint64_t p = 2) {
  Plan pl;
  pl.id = "rt";
  pl.tag = CaseTag::residue_transcendental;
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::ratfunc(p, {"s"});
  pl.base = detail::prime_hahn(Subgroup::standard(pl.basis));
  GroupBasis b = pl.basis;
  FieldDesc f = pl.field;
  Series s = Series::constant(b, FieldElem::var(f, 0));
  pl.generator = s;
  HahnRecipe base = pl.base;
  detail::GrowthSeq vc(1, kSequencePrefix);
  pl.value = [b, vc](const Integer& k) { return GroupElement::scalar(b, Rational(vc(k))); };
  pl.alpha = pl.value;
  pl.term = [b, f, vc](const Integer& k) {
    Series c = detail::tpow(b, f, GroupElement::scalar(b, Rational(vc(k))));
    Series bk = Series::constant(b, FieldElem::var(f, 0).pow(k));
    return PlanTerm{bk, c, c * bk};
  };
  pl.subfield = [s, base](const Integer& k) {
    return SubfieldDesc("K[s]_" + k.get_str(), PolyInTRecipe{s, static_cast<unsigned>(k.get_ui()), base});
  };
  return pl;
}

namespace detail {

inline FinGenRecipe fin_gen_prefix(const Plan& pl, const Integer& k) {
  FinGenRecipe r{{}, pl.base, 2};
  for (Integer j = 1; j <= k; ++j) r.gens.push_back(pl.term(j).a);
  return r;
}

inline void finish_fin_gen(Plan& pl) {
  // S_k = K(a_1, ..., a_k); the generator list is rebuilt from the plan's terms.
  auto term = pl.term;
  HahnRecipe base = pl.base;
  auto lim = pl.term_limit;
  pl.subfield = [term, base, lim](const Integer& k) {
    if (lim && k > *lim) fail(ErrorKind::insufficient_depth, "S_" + k.get_str() + " beyond the plan depth");
    FinGenRecipe r{{}, base, 2};
    for (Integer j = 1; j <= k; ++j) r.gens.push_back(term(j).a);
    return SubfieldDesc("K(a_1..a_" + k.get_str() + ")", r);
  };
}

}  // namespace detail

// va: K = F_p((t)); b_1 = 1, b_k = t^(1/k!), c_k = t^(m_k) with m_k the least
// integer making (k-1) va_{k-1} <= va_k and va_{k-1} < va_k.
inline Plan plan_va(std::uint64_t p = 2) {
  Plan pl;
  pl.id = "va";
  pl.tag = CaseTag::value_algebraic;
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::prime(p);
  pl.base = detail::prime_hahn(Subgroup::standard(pl.basis));
  GroupBasis b = pl.basis;
  FieldDesc f = pl.field;
  // (m_k, 1/k!) pairs, grown lazily.
  struct Seq {
    std::vector<Integer> m{0};
    std::vector<Integer> fact{1};
  };
  auto seq = std::make_shared<Seq>();
  auto grow = [seq](const Integer& k) {
    unsigned long kk = detail::small_index(k, kSequencePrefix, "va");
    while (seq->m.size() < kk) {
      unsigned long j = seq->m.size() + 1;  // index being added
      Integer fact = seq->fact.back() * j;
      Rational prev = j == 2 ? Rational(0) : Rational(seq->m.back()) + Rational(1) / Rational(seq->fact.back());
      Rational r = Rational(1) / Rational(fact);
      Integer m1 = ceil(Rational(j - 1) * prev - r);
      Integer m2 = floor(prev - r) + 1;
      seq->m.push_back(std::max(m1, m2));
      seq->fact.push_back(fact);
    }
    return std::pair<Integer, Integer>(seq->m[kk - 1], seq->fact[kk - 1]);
  };
  pl.value = [b, grow](const Integer& k) {
    auto [m, fact] = grow(k);
    Rational v = k == 1 ? Rational(0) : Rational(m) + Rational(1) / Rational(fact);
    return GroupElement::scalar(b, v);
  };
  pl.alpha = pl.value;
  pl.term = [b, f, grow](const Integer& k) {
    auto [m, fact] = grow(k);
    Series one = Series::constant(b, FieldElem::one(f));
    if (k == 1) return PlanTerm{one, one, one};
    Series bk = detail::tpow(b, f, GroupElement::scalar(b, Rational(1) / Rational(fact)));
    Series c = detail::tpow(b, f, GroupElement::scalar(b, Rational(m)));
    return PlanTerm{bk, c, c * bk};
  };
  detail::finish_fin_gen(pl);
  // vS_k = (1/k!) Z, so va_{k+1} must have order >= (k+1) (vS_k : vK) modulo vK.
  Subgroup vK = Subgroup::standard(b);
  for (unsigned long k = 1; k < 6; ++k) {
    Subgroup vS = vK.with({GroupElement::scalar(b, Rational(1) / Rational(grow(k).second))});
    auto idx = vK.index_in(vS);
    auto ord = vK.coset_order(pl.value(k + 1));
    if (!idx || !ord || *ord < Integer(k + 1) * *idx)
      fail(ErrorKind::construction_inconsistency, "va_" + std::to_string(k + 1) + " does not leave vS_" +
                                                      std::to_string(k));
  }
  return pl;
}

namespace detail {

// An element of exact degree `deg` over F_p inside F_{p^D}.
inline FieldElem element_of_degree(const FieldDesc& F, unsigned deg) {
  Integer pD = ipow(F.p(), F.degree()), pd = ipow(F.p(), deg);
  Integer e = (pD - 1) / (pd - 1);
  FieldElem x = FieldElem::generator(F);
  for (long c = 0; c < 1000; ++c) {
    FieldElem y = (x + FieldElem::from_int(F, c)).pow(e);
    if (y.min_poly_degree() == deg) return y;
  }
  fail(ErrorKind::search_exhausted, "no element of degree " + std::to_string(deg) + " found");
}

// Residue-algebraic style plan: a_k = t^(vc_k) beta_k with beta_k of degree D_k over F_p.
inline Plan residue_alg_plan(std::string id, CaseTag tag, std::uint64_t p, std::vector<unsigned> degs,
                             Integer vc_first) {
  unsigned D = degs.back();
  if (D > 128) fail(ErrorKind::config, "coefficient field F_" + std::to_string(p) + "^" + std::to_string(D) +
                                           " too large; lower the depth");
  Plan pl;
  pl.id = std::move(id);
  pl.tag = tag;
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::finite(p, D);
  pl.base = prime_hahn(Subgroup::standard(pl.basis));
  pl.term_limit = Integer(static_cast<unsigned long>(degs.size()));
  GroupBasis b = pl.basis;
  FieldDesc f = pl.field;
  auto betas = std::make_shared<std::vector<FieldElem>>();
  for (unsigned d : degs) betas->push_back(d == 1 ? FieldElem::one(f) : element_of_degree(f, d));
  GrowthSeq vc(vc_first, kSequencePrefix);
  pl.value = [b, vc](const Integer& k) { return GroupElement::scalar(b, Rational(vc(k))); };
  pl.alpha = pl.value;
  pl.term = [b, f, vc, betas](const Integer& k) {
    unsigned long kk = small_index(k, betas->size(), "beta");
    Series bk = Series::constant(b, (*betas)[kk - 1]);
    Series c = tpow(b, f, GroupElement::scalar(b, Rational(vc(k))));
    return PlanTerm{bk, c, c * bk};
  };
  finish_fin_gen(pl);
  return pl;
}

}  // namespace detail

// ra: beta_k of degree k! (so a_1 = 1), vc = 0, 1, 2, 6, 24, ...
inline Plan plan_ra(unsigned depth = 4, std::uint64_t p = 2) {
  std::vector<unsigned> degs;
  unsigned d = 1;
  for (unsigned k = 1; k <= depth; ++k) degs.push_back(d *= k);
  return detail::residue_alg_plan("ra", CaseTag::residue_algebraic, p, degs, 0);
}

// sa: inertial generators of degree 2, 4, 12, 48, ...; alpha_k = kras(a_k, K) = vc_k.
inline Plan plan_sa(unsigned depth = 4, std::uint64_t p = 2) {
  std::vector<unsigned> degs;
  unsigned d = 2;
  for (unsigned k = 1; k <= depth; ++k) degs.push_back(k == 1 ? d : d *= k);
  return detail::residue_alg_plan("sa", CaseTag::separable_algebraic, p, degs, 0);
}

// ---------------------------------------------------------------------------
// Condition checks.

namespace detail {

struct Tally {
  std::size_t checked = 0, skipped = 0;
  json fail_witness;
  bool failed() const { return !fail_witness.is_null(); }
  Check finish(const std::string& name) const {
    if (failed()) return make_check(name, Status::fail, fail_witness);
    json w = {{"checked", checked}, {"skipped", skipped}};
    return make_check(name, checked ? Status::pass : Status::skipped, w);
  }
};

inline bool skippable(const Error& e) {
  return e.kind() == ErrorKind::overflow || e.kind() == ErrorKind::insufficient_depth;
}

inline Series poly_combo(const std::vector<Series>& d, const Series& u) {
  Series acc = d.back();
  for (std::size_t j = d.size() - 1; j-- > 0;) acc = acc * u + d[j];
  return acc;
}

inline json series_list(const std::vector<Series>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back(s.to_string());
  return a;
}

}  // namespace detail

inline Check check_A1(const Plan& pl, const ETable& E, unsigned depth, unsigned i_max = 2) {
  detail::Tally t;
  for (unsigned long k = 1; k <= depth && !t.failed(); ++k) {
    Integer K(k);
    GroupElement va = pl.value(K), al = pl.alpha(K), vn = pl.value(K + 1);
    ++t.checked;
    if (va.sign() < 0 || al < va || !(al < vn))
      t.fail_witness = {{"k", k}, {"va_k", va.pretty()}, {"alpha_k", al.pretty()}, {"va_k+1", vn.pretty()}};
  }
  for (unsigned i = 1; i <= i_max && !t.failed(); ++i)
    for (unsigned long k = 1; k <= depth && !t.failed(); ++k) {
      try {
        Integer e = E(i, Integer(k));
        Integer ph = E.phi()(Integer(k), e);
        GroupElement lhs = pl.alpha(e) * Rational(Integer(k)), rhs = pl.alpha(ph);
        ++t.checked;
        if (lhs > rhs)
          t.fail_witness = {{"i", i}, {"k", k}, {"E", e.get_str()}, {"k*alpha_E", lhs.pretty()},
                            {"alpha_phi", rhs.pretty()}};
      } catch (const Error& err) {
        if (!detail::skippable(err)) throw;
        ++t.skipped;
      }
    }
  return t.finish("A1");
}

inline Check check_A2(const Plan& pl, unsigned depth, int samples, std::mt19937_64& rng) {
  detail::Tally t;
  unsigned long top = depth;
  if (pl.term_limit && *pl.term_limit < top) top = pl.term_limit->get_ui();
  for (unsigned long k = 1; k <= top && !t.failed(); ++k) {
    Integer K(k);
    SubfieldDesc S = pl.subfield(K);
    Series a = pl.a(K);
    ++t.checked;
    if (auto pt = S.poly_in_t()) {
      // a_k must be a K-multiple of x^j with j <= n; S_k grows with k.
      bool ok = pl.generator && pt->x == *pl.generator;
      if (k < top) ok = ok && pl.subfield(K + 1).poly_in_t() && pl.subfield(K + 1).poly_in_t()->degree >= pt->degree;
      if (auto in = subfield_contains(a, S)) ok = ok && *in;
      if (!ok) t.fail_witness = {{"k", k}, {"a_k", a.to_string()}, {"S_k", S.name()}};
    } else if (auto fg = S.fin_gen()) {
      bool ok = fg->gens.size() == k && fg->gens.back() == a;
      if (k < top) {
        SubfieldDesc Sn = pl.subfield(K + 1);
        const auto* fn = Sn.fin_gen();
        ok = ok && fn && fn->gens.size() > fg->gens.size() &&
             std::equal(fg->gens.begin(), fg->gens.end(), fn->gens.begin());
      }
      if (!ok) t.fail_witness = {{"k", k}, {"a_k", a.to_string()}, {"S_k", S.name()}};
    }
    // Sampled inclusion S_k in S_{k+1}, where membership is decidable.
    if (k < top && !t.failed()) {
      SubfieldDesc Sn = pl.subfield(K + 1);
      for (int s = 0; s < samples && !t.failed(); ++s) {
        Series d = sample_subfield_element(S, pl.basis, pl.field, rng);
        auto in = subfield_contains(d, Sn);
        if (!in) {
          ++t.skipped;
          break;
        }
        ++t.checked;
        if (!*in) t.fail_witness = {{"k", k}, {"element", d.to_string()}, {"outside", Sn.name()}};
      }
    }
  }
  return t.finish("A2");
}

inline Check check_A3(const Plan& pl, unsigned depth, int samples, std::mt19937_64& rng) {
  detail::Tally t;
  unsigned long top = depth;
  if (pl.term_limit && *pl.term_limit < top) top = pl.term_limit->get_ui();
  for (unsigned long k = 1; k <= top && !t.failed(); ++k)
    for (unsigned long l = 1; l <= top && !t.failed(); ++l) {
      Integer K(k), L(l), ph;
      try {
        ph = pl.phi(K, L);
      } catch (const Error& e) {
        if (!detail::skippable(e)) throw;
        ++t.skipped;
        continue;
      }
      SubfieldDesc Sk = pl.subfield(K), Sl = pl.subfield(L);
      ++t.checked;
      if (auto pk = Sk.poly_in_t()) {
        // deg(d_0 + ... + d_k u^k) <= n_k + k n_l must fit into S_phi(k,l).
        Integer need = Integer(pk->degree) + K * Integer(Sl.poly_in_t()->degree);
        if (need > ph && pl.phi.kind() == PhiRule::Kind::vt) {
          t.fail_witness = {{"k", k}, {"l", l}, {"degree", need.get_str()}, {"phi", ph.get_str()}};
          break;
        }
        if (pl.phi.kind() != PhiRule::Kind::vt && need > Integer(pl.subfield(ph).poly_in_t()->degree)) {
          t.fail_witness = {{"k", k}, {"l", l}, {"degree", need.get_str()}, {"phi", ph.get_str()}};
          break;
        }
        SubfieldDesc Sp = pl.subfield(ph);
        for (int s = 0; s < samples && !t.failed(); ++s) {
          std::vector<Series> d;
          for (unsigned long j = 0; j <= k; ++j) d.push_back(sample_subfield_element(Sk, pl.basis, pl.field, rng));
          Series u = sample_subfield_element(Sl, pl.basis, pl.field, rng);
          Series w = detail::poly_combo(d, u);
          auto in = subfield_contains(w, Sp);
          if (!in) {
            ++t.skipped;
            break;
          }
          ++t.checked;
          if (!*in)
            t.fail_witness = {{"k", k}, {"l", l}, {"d", detail::series_list(d)}, {"u", u.to_string()},
                              {"outside", Sp.name()}};
        }
      } else {
        // Finitely generated fields: S_k, S_l are contained in S_phi once phi > max(k, l).
        if (ph <= std::max(K, L)) t.fail_witness = {{"k", k}, {"l", l}, {"phi", ph.get_str()}};
      }
    }
  return t.finish("A3");
}

inline Check check_A4(const Plan& pl, unsigned depth, int samples, std::mt19937_64& rng) {
  detail::Tally t;
  unsigned long top = depth;
  if (pl.term_limit && *pl.term_limit < top + 1) top = pl.term_limit->get_ui() - 1;
  auto test = [&](unsigned long k, const std::vector<Series>& d, const Series& a) {
    const Series& dm = d.back();
    if (dm.is_exact_zero()) return;
    ++t.checked;
    Series lhs = detail::poly_combo(d, a);
    Value rhs(dm.valuation().finite() + pl.alpha(Integer(k + 1)) * Rational(long(d.size() - 1)));
    Value lv = lhs.valuation();
    if (!(lv <= rhs))
      t.fail_witness = {{"k", k}, {"m", d.size() - 1}, {"d", detail::series_list(d)}, {"lhs", lv.pretty()},
                        {"rhs", rhs.pretty()}};
  };
  for (unsigned long k = 1; k <= top && !t.failed(); ++k) {
    Integer K(k);
    SubfieldDesc S = pl.subfield(K);
    Series a = pl.a(K + 1);
    // Tiny family {0, 1, a_j (j <= min(k, 2))}, all tuples with m <= min(k, 2).
    std::vector<Series> fam{Series::zero(pl.basis, pl.field), Series::constant(pl.basis, FieldElem::one(pl.field))};
    for (unsigned long j = 1; j <= std::min<unsigned long>(k, 2); ++j) fam.push_back(pl.a(Integer(j)));
    for (unsigned long m = 0; m <= std::min<unsigned long>(k, 2) && !t.failed(); ++m) {
      std::size_t total = 1;
      for (unsigned long j = 0; j <= m; ++j) total *= fam.size();
      for (std::size_t code = 0; code < total && !t.failed(); ++code) {
        std::vector<Series> d;
        std::size_t c = code;
        for (unsigned long j = 0; j <= m; ++j, c /= fam.size()) d.push_back(fam[c % fam.size()]);
        test(k, d, a);
      }
    }
    for (int s = 0; s < samples && !t.failed(); ++s) {
      unsigned long m = static_cast<unsigned long>(detail::rng_range(rng, 0, static_cast<long long>(k)));
      std::vector<Series> d;
      for (unsigned long j = 0; j <= m; ++j) d.push_back(sample_subfield_element(S, pl.basis, pl.field, rng));
      test(k, d, a);
    }
  }
  return t.finish("A4");
}

inline std::vector<Check> check_conditions(const Plan& pl, const ETable& E, unsigned depth, int samples,
                                           std::uint64_t seed, unsigned i_max = 2) {
  std::mt19937_64 rng(seed);
  std::vector<Check> out;
  out.push_back(timed([&] { return check_A1(pl, E, depth, i_max); }));
  out.push_back(timed([&] { return check_A2(pl, depth, samples, rng); }));
  out.push_back(timed([&] { return check_A3(pl, depth, std::max(1, samples / 10), rng); }));
  out.push_back(timed([&] { return check_A4(pl, depth, samples, rng); }));
  return out;
}

// Partial sum of a_{E_i(j)}, j <= k_max, known up to va_{E_i(k_max + 1)}.
inline Series build_witness(const Plan& pl, const ETable& E, unsigned i, unsigned long k_max) {
  Series acc = Series::zero(pl.basis, pl.field);
  for (unsigned long j = 1; j <= k_max; ++j) acc = acc + pl.a(E(i, Integer(j)));
  GroupElement prec = pl.value(E(i, Integer(k_max + 1)));
  return acc.truncate(Value(prec), true);
}

// ---------------------------------------------------------------------------
// Families of p-th roots.

enum class Side { value, residue };

struct InfPDegPlan {
  std::string id;
  Side side = Side::value;
  std::uint64_t p = 2;
  GroupBasis basis = GroupBasis::lex(1);
  FieldDesc field = FieldDesc::prime(2);
  HahnRecipe base{Subgroup(GroupBasis::lex(1), {}), {}, {}};  // K
  unsigned n_families = 0, length = 0;
  bool cofinal = false;
  std::optional<Rational> gamma;
  // Per family: generators a_{tau,i} (value side) or b_{tau,i} (residue side),
  // their basis coordinate / variable index, and the scalars c, d. Index i-1.
  std::vector<std::vector<Series>> gen;
  std::vector<std::vector<std::size_t>> slot;
  std::vector<std::vector<Series>> c, d;

  SubfieldDesc base_field() const { return SubfieldDesc("K", base); }
};

inline unsigned long infpdeg_s(unsigned long m) { return m * (m - 1) / 2; }

namespace detail {

inline Series root_iter(Series x, unsigned e) {
  for (unsigned j = 0; j < e; ++j) x = x.pth_root();
  return x;
}

inline const std::vector<Series>& family(const std::vector<std::vector<Series>>& v, unsigned tau, const char* what) {
  if (tau >= v.size()) fail(ErrorKind::precondition, std::string(what) + ": no family " + std::to_string(tau));
  return v[tau];
}

inline const Series& entry(const std::vector<Series>& v, unsigned long i, const char* what) {
  if (i < 1 || i > v.size())
    fail(ErrorKind::insufficient_depth, std::string(what) + "_" + std::to_string(i) + " beyond the generated prefix");
  return v[i - 1];
}

// Least integer m with m + r > prev (and m + r >= floor_target if given).
inline Integer least_exponent(const GroupElement& r, const std::optional<GroupElement>& prev,
                              const std::optional<Rational>& at_least) {
  const GroupBasis& b = r.basis();
  Integer m = prev ? floor_of(*prev - r) + 1 : Integer(0);
  if (at_least) m = std::max(m, Integer(-floor_of(r - GroupElement::scalar(b, *at_least))));
  return m;
}

}  // namespace detail

// sum_{i <= n} c_{tau,i} gen_{tau,i}^(1/p); summand values must increase strictly.
inline Series infpdeg_xi(const InfPDegPlan& pl, unsigned tau, unsigned long n) {
  const auto& g = detail::family(pl.gen, tau, "xi");
  const auto& c = detail::family(pl.c, tau, "xi");
  Series acc = Series::zero(pl.basis, pl.field);
  std::optional<GroupElement> last;
  for (unsigned long i = 1; i <= n; ++i) {
    Series s = detail::entry(c, i, "c") * detail::entry(g, i, "a").pth_root();
    GroupElement v = s.valuation().finite();
    if (last && !(*last < v))
      fail(ErrorKind::construction_inconsistency, "xi summand " + std::to_string(i) + " has value " + v.pretty() +
                                                      ", not above " + last->pretty());
    last = v;
    acc = acc + s;
  }
  return acc;
}

// The summands d_{tau,s(m)+i} gen_{tau,s(m)+i}^(p^-i), i = 1..m.
inline std::vector<Series> infpdeg_z_terms(const InfPDegPlan& pl, unsigned tau, unsigned long m) {
  const auto& g = detail::family(pl.gen, tau, "z");
  const auto& d = detail::family(pl.d, tau, "z");
  std::vector<Series> out;
  for (unsigned long i = 1; i <= m; ++i) {
    unsigned long j = infpdeg_s(m) + i;
    out.push_back(detail::entry(d, j, "d") * detail::root_iter(detail::entry(g, j, "a"), static_cast<unsigned>(i)));
  }
  return out;
}

// Values of the z-summands over all blocks 1..m_max must increase strictly.
inline void infpdeg_validate(const InfPDegPlan& pl, unsigned tau, unsigned long m_max) {
  std::optional<GroupElement> last;
  for (unsigned long m = 1; m <= m_max; ++m)
    for (const auto& s : infpdeg_z_terms(pl, tau, m)) {
      GroupElement v = s.valuation().finite();
      if (last && !(*last < v))
        fail(ErrorKind::construction_inconsistency, "z block " + std::to_string(m) + ": value " + v.pretty() +
                                                        " not above " + last->pretty());
      last = v;
    }
}

// z_{tau,m}; also checks that the m summands carry p-power denominators p, ..., p^m
// (value side) or p-th root levels 1, ..., m (residue side).
inline Series infpdeg_z(const InfPDegPlan& pl, unsigned tau, unsigned long m) {
  infpdeg_validate(pl, tau, m);
  auto terms = infpdeg_z_terms(pl, tau, m);
  Series acc = Series::zero(pl.basis, pl.field);
  for (unsigned long i = 1; i <= m; ++i) {
    const Series& s = terms[i - 1];
    const Term& t = s.terms().front();
    bool ok;
    if (pl.side == Side::value) {
      std::size_t coord = pl.slot[tau][infpdeg_s(m) + i - 1];
      ok = Integer(t.exp[coord].get_den()) == ipow(pl.p, i);
    } else {
      ok = t.coeff.perf_level() == i;
    }
    if (!ok)
      fail(ErrorKind::construction_inconsistency, "z_" + std::to_string(m) + " summand " + std::to_string(i) +
                                                      " lacks root level " + std::to_string(i));
    acc = acc + s;
  }
  return acc;
}

inline Series infpdeg_zeta(const InfPDegPlan& pl, unsigned tau, unsigned long n) {
  Series acc = Series::zero(pl.basis, pl.field);
  for (unsigned long m = 1; m <= n; ++m) acc = acc + infpdeg_z(pl, tau, m);
  return acc;
}

struct ZetaEta {
  Series zeta_N, zeta_n, eta;
};

// zeta_N (proxy for the pseudo limit), zeta_n and
// eta_n = zeta_n^(p^(n-1)) - d_{s(n)+n}^(p^(n-1)) a_{s(n)+n}^(1/p).
inline ZetaEta infpdeg_zeta_eta(const InfPDegPlan& pl, unsigned tau, unsigned long n, unsigned long N) {
  if (n < 1 || N <= n) fail(ErrorKind::precondition, "need 1 <= n < N");
  Series zN = infpdeg_zeta(pl, tau, N), zn = infpdeg_zeta(pl, tau, n);
  Series znext = infpdeg_z(pl, tau, n + 1);
  if (!((zN - zn).valuation() == znext.valuation()))
    fail(ErrorKind::construction_inconsistency, "v(zeta_N - zeta_n) differs from v z_{n+1}");
  unsigned e = static_cast<unsigned>(n - 1);
  unsigned long j = infpdeg_s(n) + n;
  const auto& g = pl.gen[tau];
  const auto& d = pl.d[tau];
  Series eta = zn.frobenius(e) - detail::entry(d, j, "d").frobenius(e) * detail::entry(g, j, "a").pth_root();
  // Alternate form: zeta_{n-1}^(p^(n-1)) + sum_{i<n} d_{s(n)+i}^(p^(n-1)) a_{s(n)+i}^(p^(n-1-i)).
  Series alt = infpdeg_zeta(pl, tau, n - 1).frobenius(e);
  for (unsigned long i = 1; i < n; ++i) {
    unsigned long ji = infpdeg_s(n) + i;
    alt = alt + d[ji - 1].frobenius(e) * g[ji - 1].frobenius(static_cast<unsigned>(n - 1 - i));
  }
  if (!(alt == eta)) fail(ErrorKind::construction_inconsistency, "eta_" + std::to_string(n) + " expansions differ");
  auto inK = subfield_contains(eta, pl.base_field());
  if (!inK || !*inK) fail(ErrorKind::construction_inconsistency, "eta_" + std::to_string(n) + " not in K");
  return {zN, zn, eta};
}

namespace detail {

// Fill c (for xi) and d (for z) by the least-exponent rule over t-powers.
inline void choose_scalars(InfPDegPlan& pl) {
  const GroupBasis& b = pl.basis;
  pl.c.assign(pl.n_families, {});
  pl.d.assign(pl.n_families, {});
  for (unsigned tau = 0; tau < pl.n_families; ++tau) {
    std::optional<GroupElement> last;
    for (unsigned long i = 1; i <= pl.length; ++i) {
      GroupElement r = pl.gen[tau][i - 1].pth_root().valuation().finite();
      std::optional<Rational> floor_target;
      if (pl.cofinal) floor_target = Rational(i);
      Integer m = least_exponent(r, last, floor_target);
      pl.c[tau].push_back(tpow(b, pl.field, GroupElement::scalar(b, Rational(m))));
      last = r + GroupElement::scalar(b, Rational(m));
    }
    last.reset();
    unsigned long j = 0;
    for (unsigned long m = 1; j < pl.length; ++m)
      for (unsigned long i = 1; i <= m && j < pl.length; ++i) {
        ++j;
        GroupElement r = root_iter(pl.gen[tau][j - 1], static_cast<unsigned>(i)).valuation().finite();
        std::optional<Rational> floor_target;
        if (pl.cofinal) floor_target = Rational(j);
        Integer e = least_exponent(r, last, floor_target);
        pl.d[tau].push_back(tpow(b, pl.field, GroupElement::scalar(b, Rational(e))));
        last = r + GroupElement::scalar(b, Rational(e));
      }
  }
}

inline unsigned long infpdeg_length(unsigned depth) { return infpdeg_s(depth + 1) + depth + 1; }

inline std::vector<std::string> family_vars(unsigned n_families, unsigned long length) {
  std::vector<std::string> v;
  for (unsigned tau = 0; tau < n_families; ++tau)
    for (unsigned long i = 1; i <= length; ++i) v.push_back("s" + std::to_string(tau) + "_" + std::to_string(i));
  return v;
}

}  // namespace detail

// Value side: K = F_p((Z + sum Z sqrt q)), a_{tau,i} = t^(sqrt q_{tau,i}).
inline InfPDegPlan plan_ip_val(std::uint64_t p = 2, unsigned n_families = 4, unsigned depth = 4, bool cofinal = false) {
  InfPDegPlan pl;
  pl.id = "ip-val";
  pl.side = Side::value;
  pl.p = p;
  pl.n_families = n_families;
  pl.length = static_cast<unsigned>(detail::infpdeg_length(depth));
  pl.cofinal = cofinal;
  auto qs = detail::squarefree_from(2, std::size_t(n_families) * pl.length);
  std::vector<std::uint64_t> w{1};
  w.insert(w.end(), qs.begin(), qs.end());
  pl.basis = GroupBasis::real(w);
  pl.field = FieldDesc::prime(p);
  pl.base = HahnRecipe{Subgroup::standard(pl.basis), {}, CoeffRule{}};
  pl.gen.assign(n_families, {});
  pl.slot.assign(n_families, {});
  for (unsigned tau = 0; tau < n_families; ++tau)
    for (unsigned long i = 0; i < pl.length; ++i) {
      std::size_t coord = 1 + tau * pl.length + i;
      pl.gen[tau].push_back(detail::tpow(pl.basis, pl.field, GroupElement::unit(pl.basis, coord)));
      pl.slot[tau].push_back(coord);
    }
  detail::choose_scalars(pl);
  return pl;
}

// Residue side: K = F_p(s_{tau,i})((Z)) inside the perfect hull, b_{tau,i} = s_{tau,i},
// c_i = t^i, d_j = t^j.
inline InfPDegPlan plan_ip_res(std::uint64_t p = 2, unsigned n_families = 4, unsigned depth = 4, bool cofinal = false) {
  InfPDegPlan pl;
  pl.id = "ip-res";
  pl.side = Side::residue;
  pl.p = p;
  pl.n_families = n_families;
  pl.length = static_cast<unsigned>(detail::infpdeg_length(depth));
  pl.cofinal = cofinal;
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::perf_closure(FieldDesc::ratfunc(p, detail::family_vars(n_families, pl.length)));
  std::vector<std::size_t> all;
  for (std::size_t v = 0; v < pl.field.nvars(); ++v) all.push_back(v);
  pl.base = HahnRecipe{Subgroup::standard(pl.basis), {}, CoeffRule{CoeffRule::Kind::no_roots_of, all}};
  const GroupBasis& b = pl.basis;
  for (unsigned tau = 0; tau < n_families; ++tau) {
    pl.gen.emplace_back();
    pl.slot.emplace_back();
    pl.c.emplace_back();
    pl.d.emplace_back();
    for (unsigned long i = 1; i <= pl.length; ++i) {
      std::size_t v = tau * pl.length + (i - 1);
      pl.gen[tau].push_back(Series::constant(b, FieldElem::var(pl.field, v)));
      pl.slot[tau].push_back(v);
      pl.c[tau].push_back(detail::tpow(b, pl.field, GroupElement::scalar(b, Rational(i))));
      pl.d[tau].push_back(detail::tpow(b, pl.field, GroupElement::scalar(b, Rational(i))));
    }
  }
  return pl;
}

// Bounded value window: a = t^r with r = sqrt q - p floor(sqrt q / p) in [0, p),
// sorted and dealt alternately to two families; gamma = p, no scalars.
inline InfPDegPlan plan_dm_i(std::uint64_t p = 2, std::vector<std::uint64_t> qs = {2, 3, 5, 7},
                             unsigned n_families = 2) {
  InfPDegPlan pl;
  pl.id = "dm-i";
  pl.side = Side::value;
  pl.p = p;
  pl.n_families = n_families;
  pl.gamma = Rational(static_cast<unsigned long>(p));
  std::vector<std::uint64_t> w{1};
  w.insert(w.end(), qs.begin(), qs.end());
  pl.basis = GroupBasis::real(w);
  pl.field = FieldDesc::prime(p);
  pl.base = HahnRecipe{Subgroup::standard(pl.basis), {}, CoeffRule{}};
  const GroupBasis& b = pl.basis;
  std::vector<std::pair<GroupElement, std::size_t>> r;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    GroupElement s = GroupElement::unit(b, j + 1);
    Integer fl = detail::floor_of(s / Rational(static_cast<unsigned long>(p)));
    r.emplace_back(s - GroupElement::scalar(b, Rational(fl * static_cast<unsigned long>(p))), j + 1);
  }
  std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  pl.gen.assign(n_families, {});
  pl.slot.assign(n_families, {});
  pl.c.assign(n_families, {});
  for (std::size_t j = 0; j < r.size(); ++j) {
    unsigned tau = static_cast<unsigned>(j % n_families);
    pl.gen[tau].push_back(detail::tpow(b, pl.field, r[j].first));
    pl.slot[tau].push_back(r[j].second);
    pl.c[tau].push_back(Series::constant(b, FieldElem::one(pl.field)));
  }
  pl.length = static_cast<unsigned>(pl.gen[0].size());
  for (const auto& g : pl.gen)
    if (g.size() != pl.length) fail(ErrorKind::config, "families of unequal length");
  pl.d = pl.c;
  return pl;
}

// Non-discrete value group: K = F_p(s_{tau,i})((Q)), b_{tau,i} = s_{tau,i},
// c_i = t^(1 - 1/i), gamma = 1.
inline InfPDegPlan plan_dm_ii(std::uint64_t p = 2, unsigned n_families = 3, unsigned length = 4) {
  InfPDegPlan pl;
  pl.id = "dm-ii";
  pl.side = Side::residue;
  pl.p = p;
  pl.n_families = n_families;
  pl.length = length;
  pl.gamma = Rational(1);
  pl.basis = GroupBasis::lex(1);
  pl.field = FieldDesc::perf_closure(FieldDesc::ratfunc(p, detail::family_vars(n_families, length)));
  std::vector<std::size_t> all;
  for (std::size_t v = 0; v < pl.field.nvars(); ++v) all.push_back(v);
  pl.base = HahnRecipe{Subgroup::standard(pl.basis), {true}, CoeffRule{CoeffRule::Kind::no_roots_of, all}};
  const GroupBasis& b = pl.basis;
  for (unsigned tau = 0; tau < n_families; ++tau) {
    pl.gen.emplace_back();
    pl.slot.emplace_back();
    pl.c.emplace_back();
    for (unsigned long i = 1; i <= length; ++i) {
      std::size_t v = tau * length + (i - 1);
      pl.gen[tau].push_back(Series::constant(b, FieldElem::var(pl.field, v)));
      pl.slot[tau].push_back(v);
      pl.c[tau].push_back(detail::tpow(b, pl.field, GroupElement::scalar(b, Rational(1) - Rational(1, i))));
    }
  }
  pl.d = pl.c;
  return pl;
}

// ---------------------------------------------------------------------------
// Deformation tower for distinct maximal immediate extensions.

struct TowerLevel {
  unsigned family = 0;
  Series xi;
  SubfieldDesc S;
  Value bound;      // exact bound on v(xi - d), d in S
  Rational window;  // the bound must stay below this
  Series d;
  ASRoot theta;
};

// The field S_N that xi_N must stay away from: all other families' roots and
// the base, with family N's own direction excluded.
inline SubfieldDesc tower_subfield(const InfPDegPlan& pl, unsigned N) {
  if (pl.side == Side::value) {
    std::vector<bool> div(pl.basis.rank(), false);
    div[0] = true;
    for (unsigned tau = 0; tau < pl.n_families; ++tau)
      if (tau != N)
        for (auto c : pl.slot[tau]) div[c] = true;
    return SubfieldDesc("L_" + std::to_string(N), HahnRecipe{Subgroup::standard(pl.basis), div, CoeffRule{}});
  }
  std::vector<std::size_t> own(pl.slot[N].begin(), pl.slot[N].end());
  std::vector<bool> div(pl.basis.rank(), false);
  div[0] = true;
  return SubfieldDesc("L_" + std::to_string(N),
                      HahnRecipe{Subgroup::standard(pl.basis), div, CoeffRule{CoeffRule::Kind::no_roots_of, own}});
}

inline std::vector<TowerLevel> distinct_max_tower(const InfPDegPlan& pl, unsigned m_max, const Value& pi,
                                                  unsigned long d_search = 64) {
  if (!pl.gamma) fail(ErrorKind::config, "gamma is required");
  if (m_max > pl.n_families) fail(ErrorKind::insufficient_depth, "only " + std::to_string(pl.n_families) + " families");
  const GroupBasis& b = pl.basis;
  Rational pq(static_cast<unsigned long>(pl.p));
  GroupElement gamma = GroupElement::scalar(b, *pl.gamma);
  Rational window = pl.side == Side::value ? *pl.gamma / pq : *pl.gamma;
  std::vector<TowerLevel> out;
  for (unsigned N = 0; N < m_max; ++N) {
    Series xi = infpdeg_xi(pl, N, pl.length);
    for (const auto& t : xi.terms())
      if (!(t.exp < gamma))
        fail(ErrorKind::construction_inconsistency, "xi_" + std::to_string(N) + " summand value " + t.exp.pretty() +
                                                        " not below gamma");
    SubfieldDesc S = tower_subfield(pl, N);
    auto md = subfield_membership_distance(xi, S, 32, N + 1);
    if (!md.exact_bound || md.exact_bound->is_inf())
      fail(ErrorKind::construction_inconsistency, "xi_" + std::to_string(N) + " has no distance bound to " + S.name());
    Value B = *md.exact_bound;
    if (!(B < Value(GroupElement::scalar(b, window))))
      fail(ErrorKind::construction_inconsistency, "distance bound " + B.pretty() + " not below the window");
    // Least j >= 0 with (p-1) j + v xi > p B.
    GroupElement vxi = xi.valuation().finite();
    std::optional<unsigned long> j;
    for (unsigned long jj = 0; jj <= d_search && !j; ++jj)
      if (GroupElement::scalar(b, (pq - 1) * Rational(jj)) + vxi > B.finite() * pq) j = jj;
    if (!j) fail(ErrorKind::search_exhausted, "no t-power d found up to t^" + std::to_string(d_search));
    Series d = detail::tpow(b, pl.field, GroupElement::scalar(b, Rational(*j)));
    ASRoot theta = deform_element(xi, d, DistanceBound{B, false}, pi);
    out.push_back({N, xi, S, B, window, d, theta});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario catalog.

struct CatalogEntry {
  std::string id, tag, description;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c{
      {"ms", "valuation-transcendental", "F2(t) over trivially valued F2; a_k = t^k"},
      {"vt-sqrt2", "valuation-transcendental", "x = t^sqrt2 over F2((t)); a_k = x^k"},
      {"rt", "residue-transcendental", "residue variable s over F2(u) u-adic; a_k = c_k s^k"},
      {"va", "value-algebraic", "t^(1/k!) over F2((t)); values in new cosets"},
      {"ra", "residue-algebraic", "residues of degree k! over F2"},
      {"sa", "separable-algebraic", "inertial generators, alpha_k = Krasner constant"},
      {"ip-val", "infinite-p-degree", "p-th roots of t^sqrt(q): value side"},
      {"ip-res", "infinite-p-degree", "p-th roots of residue variables"},
      {"dm-i", "distinct-maximal-extensions", "bounded value window, four square-root generators"},
      {"dm-ii", "distinct-maximal-extensions", "non-discrete value group, c_i = t^(1-1/i)"},
  };
  return c;
}

inline bool is_infpdeg(const std::string& id) { return id == "ip-val" || id == "ip-res" || id == "dm-i" || id == "dm-ii"; }

struct ScenarioDesc {
  std::string id;
  std::optional<std::uint64_t> p;
  std::optional<GroupBasis> basis;
  std::optional<std::vector<Rational>> generator_value;  // value-transcendental configs
  std::optional<std::string> coeff_field;
  unsigned depth = 4;
  std::optional<unsigned> n_families;
  std::optional<Rational> gamma;
  bool cofinal = false;
  std::uint64_t seed = 1;
};

// Maps a case name from a config file to a catalog id.
inline std::string scenario_for_case(const std::string& c) {
  static const std::map<std::string, std::string> m{
      {"valuation-transcendental", "ms"}, {"value-transcendental", "ms"},   {"residue-transcendental", "rt"},
      {"value-algebraic", "va"},          {"residue-algebraic", "ra"},      {"separable-algebraic", "sa"},
      {"infinite-p-degree-value", "ip-val"}, {"infinite-p-degree-residue", "ip-res"},
      {"distinct-maximal-value", "dm-i"}, {"distinct-maximal-residue", "dm-ii"}};
  auto it = m.find(c);
  if (it == m.end()) fail(ErrorKind::config, "unknown case '" + c + "'");
  return it->second;
}

namespace detail {

inline void check_id(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return;
  fail(ErrorKind::config, "unknown scenario '" + id + "'");
}

inline void check_basis(const ScenarioDesc& s, const GroupBasis& built) {
  if (s.basis && !(*s.basis == built)) fail(ErrorKind::config, "basis does not match scenario '" + s.id + "'");
}

inline void check_field(const ScenarioDesc& s, const FieldDesc& built) {
  if (s.coeff_field && *s.coeff_field != built.to_string())
    fail(ErrorKind::config, "coeff_field '" + *s.coeff_field + "' does not match " + built.to_string());
}

}  // namespace detail

inline Plan build_plan(const ScenarioDesc& s) {
  detail::check_id(s.id);
  if (is_infpdeg(s.id)) fail(ErrorKind::config, "scenario '" + s.id + "' is a p-th root family, not a plan");
  if (s.depth < 1) fail(ErrorKind::config, "depth must be >= 1");
  std::uint64_t p = s.p.value_or(2);
  if (!is_prime(p)) fail(ErrorKind::config, "p = " + std::to_string(p) + " is not prime");
  Plan pl;
  if (s.id == "ms" || s.id == "vt-sqrt2") {
    bool rank2 = s.id == "vt-sqrt2" || (s.basis && s.basis->rank() == 2) || s.generator_value;
    if (!rank2) {
      if (s.basis && !(*s.basis == GroupBasis::lex(1))) fail(ErrorKind::config, "ms needs a rank-1 basis");
      pl = plan_ms(p);
    } else {
      GroupBasis b = s.basis ? *s.basis : s.id == "vt-sqrt2" ? GroupBasis::real({1, 2}) : GroupBasis::lex(2);
      if (b.rank() < 2) fail(ErrorKind::config, "a generator value needs a basis of rank >= 2");
      GroupElement g = GroupElement::unit(b, 1);
      if (s.generator_value) {
        if (s.generator_value->size() != b.rank()) fail(ErrorKind::config, "generator value has the wrong rank");
        g = GroupElement(b, *s.generator_value);
      }
      pl = plan_vt(b, g, p, s.id);
    }
  } else {
    if (s.generator_value) fail(ErrorKind::config, "generator value applies only to value-transcendental cases");
    if (s.id == "rt") pl = plan_rt(p);
    else if (s.id == "va") pl = plan_va(p);
    else if (s.id == "ra") pl = plan_ra(s.depth, p);
    else pl = plan_sa(s.depth, p);
    detail::check_basis(s, pl.basis);
  }
  detail::check_field(s, pl.field);
  pl.cofinal = s.cofinal;
  return pl;
}

inline InfPDegPlan build_infpdeg(const ScenarioDesc& s) {
  detail::check_id(s.id);
  if (!is_infpdeg(s.id)) fail(ErrorKind::config, "scenario '" + s.id + "' is not a p-th root family");
  std::uint64_t p = s.p.value_or(2);
  if (!is_prime(p)) fail(ErrorKind::config, "p = " + std::to_string(p) + " is not prime");
  InfPDegPlan pl;
  if (s.id == "ip-val") pl = plan_ip_val(p, s.n_families.value_or(4), s.depth, s.cofinal);
  else if (s.id == "ip-res") pl = plan_ip_res(p, s.n_families.value_or(4), s.depth, s.cofinal);
  else if (s.id == "dm-i") pl = plan_dm_i(p, {2, 3, 5, 7}, s.n_families.value_or(2));
  else pl = plan_dm_ii(p, s.n_families.value_or(3));
  if (s.gamma) {
    if (*s.gamma <= 0) fail(ErrorKind::config, "gamma must be positive");
    pl.gamma = *s.gamma;
  }
  detail::check_basis(s, pl.basis);
  detail::check_field(s, pl.field);
  return pl;
}

}  // namespace valfield
