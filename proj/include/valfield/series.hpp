// Truncated generalized power series: a finite sorted support plus a
// precision exponent. Terms at or beyond the precision are unknown, so an
// empty support with finite precision is "zero so far", not zero.
#pragma once

#include <valfield/field.hpp>
#include <valfield/ogroup.hpp>

#include <algorithm>
#include <random>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

namespace valfield {

struct Term {
  GroupElement exp;
  FieldElem coeff;
};

struct SeriesLimits {
  std::size_t max_terms = 4096;
  std::size_t max_inverse_steps = 100000;
};

inline SeriesLimits& series_limits() {
  static SeriesLimits limits;
  return limits;
}

// Restores the previous limits on scope exit.
class ScopedSeriesLimits {
 public:
  explicit ScopedSeriesLimits(SeriesLimits l) : saved_(series_limits()) { series_limits() = l; }
  ~ScopedSeriesLimits() { series_limits() = saved_; }
  ScopedSeriesLimits(const ScopedSeriesLimits&) = delete;
  ScopedSeriesLimits& operator=(const ScopedSeriesLimits&) = delete;

 private:
  SeriesLimits saved_;
};

namespace detail {
inline FieldDesc common_field(const FieldDesc& a, const FieldDesc& b) {
  if (a == b) return a;
  if (a.p() != b.p()) fail(ErrorKind::field_mismatch, "coefficient fields of different characteristic");
  if (a.kind() == FieldKind::prime) return b;
  if (b.kind() == FieldKind::prime) return a;
  if (a.kind() == FieldKind::perf && b == a.inner()) return a;
  if (b.kind() == FieldKind::perf && a == b.inner()) return b;
  if (a.kind() == FieldKind::finite && b.kind() == FieldKind::finite) {
    if (b.degree() % a.degree() == 0) return b;
    if (a.degree() % b.degree() == 0) return a;
  }
  fail(ErrorKind::field_mismatch, "incompatible coefficient fields " + a.to_string() + " and " + b.to_string());
}
}  // namespace detail

class Series {
 public:
  Series(GroupBasis b, FieldDesc f, Value prec = Value::inf())
      : basis_(std::move(b)), field_(std::move(f)), prec_(std::move(prec)) {}

  static Series zero(const GroupBasis& b, const FieldDesc& f, Value prec = Value::inf()) {
    return Series(b, f, std::move(prec));
  }
  static Series monomial(const GroupBasis& b, const FieldElem& c, const GroupElement& e, Value prec = Value::inf()) {
    Series s(b, c.desc(), std::move(prec));
    if (!c.is_zero() && Value(e) < s.prec_) s.terms_.push_back({e, c});
    return s;
  }
  static Series constant(const GroupBasis& b, const FieldElem& c) {
    return monomial(b, c, GroupElement(b));
  }
  // Sorts, merges equal exponents, drops zeros and terms at or beyond prec.
  static Series from_terms(const GroupBasis& b, const FieldDesc& f, std::vector<Term> terms,
                           Value prec = Value::inf()) {
    Series s(b, f, std::move(prec));
    s.terms_ = normalize_terms(std::move(terms), s.prec_, f);
    s.check_cap();
    return s;
  }

  const GroupBasis& basis() const { return basis_; }
  const FieldDesc& field() const { return field_; }
  const std::vector<Term>& terms() const { return terms_; }
  const Value& precision() const { return prec_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  // Zero with infinite precision: the genuine zero element.
  bool is_exact_zero() const { return terms_.empty() && prec_.is_inf(); }
  bool is_exact() const { return prec_.is_inf(); }

  // (valuation, leading coefficient); throws when zero at finite precision.
  std::pair<Value, std::optional<FieldElem>> val_lc() const {
    if (!terms_.empty()) return {Value(terms_.front().exp), terms_.front().coeff};
    if (prec_.is_inf()) return {Value::inf(), std::nullopt};
    fail(ErrorKind::undecidable_at_precision, "series is zero below precision " + prec_.to_string());
  }
  Value valuation() const { return val_lc().first; }
  bool value_decidable() const { return !terms_.empty() || prec_.is_inf(); }
  // A lower bound for the valuation that is always available.
  Value value_lower_bound() const { return terms_.empty() ? prec_ : Value(terms_.front().exp); }

  FieldElem residue() const {
    auto [v, c] = val_lc();
    if (v.is_inf()) return FieldElem::zero(field_);
    int s = v.finite().sign();
    if (s < 0) fail(ErrorKind::negative_value, "residue of an element of negative value " + v.to_string());
    if (s > 0) return FieldElem::zero(field_);
    return *c;
  }

  FieldElem coeff_at(const GroupElement& e) const {
    if (!(Value(e) < prec_)) fail(ErrorKind::undecidable_at_precision, "coefficient beyond precision");
    for (const auto& t : terms_)
      if (t.exp == e) return t.coeff;
    return FieldElem::zero(field_);
  }

  Series operator-() const {
    Series r(*this);
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) { return add(a, b, false); }
  friend Series operator-(const Series& a, const Series& b) { return add(a, b, true); }

  friend Series operator*(const Series& a, const Series& b) {
    a.check_basis(b);
    FieldDesc f = detail::common_field(a.field_, b.field_);
    Value prec = vmin(a.prec_ + b.value_lower_bound(), b.prec_ + a.value_lower_bound());
    std::vector<Term> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) {
        GroupElement e = x.exp + y.exp;
        if (!(Value(e) < prec)) break;  // b is sorted, so later y only grow
        out.push_back({std::move(e), x.coeff * y.coeff});
      }
    Series r(a.basis_, f, prec);
    r.terms_ = normalize_terms(std::move(out), r.prec_, f);
    r.check_cap();
    return r;
  }

  Series scaled(const FieldElem& c) const {
    if (c.is_zero()) return Series(basis_, field_, Value::inf());
    Series r(basis_, detail::common_field(field_, c.desc()), prec_);
    for (const auto& t : terms_) r.terms_.push_back({t.exp, t.coeff * c});
    return r;
  }
  // Multiplication by t^g.
  Series shifted(const GroupElement& g) const {
    Series r(basis_, field_, prec_.is_inf() ? prec_ : Value(prec_.finite() + g));
    for (const auto& t : terms_) r.terms_.push_back({t.exp + g, t.coeff});
    return r;
  }

  Series pow(unsigned long n) const {
    Series r = constant(basis_, FieldElem::one(field_));
    Series b = *this;
    while (n) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n) b = b * b;
    }
    return r;
  }

  // Inverse. The result is known to prec - 2v; when *this is exact but not a
  // monomial, `target` bounds the (otherwise infinite) expansion.
  Series inv(std::optional<Value> target = std::nullopt) const {
    auto [v, lc] = val_lc();
    if (v.is_inf()) fail(ErrorKind::division_by_zero, "inverse of the zero series");
    const GroupElement& g = v.finite();
    FieldElem ilc = lc->inv();
    Value out_prec = prec_ - g - g;
    if (target && *target < out_prec) out_prec = *target;
    if (out_prec.is_inf()) {
      if (terms_.size() == 1) return monomial(basis_, ilc, -g);
      fail(ErrorKind::precondition, "inverse of a non-monomial exact series needs a target precision");
    }
    // u = this / (lc t^g) = 1 + h with v(h) > 0, known to relative precision rel.
    Value rel = out_prec + Value(g);
    Series h(basis_, field_, rel);
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      if (!(Value(terms_[i].exp - g) < rel)) break;
      h.terms_.push_back({terms_[i].exp - g, terms_[i].coeff * ilc});
    }
    Series sum = constant(basis_, FieldElem::one(field_)).truncate(rel, true);
    Series term = sum;
    Series mh = -h;
    for (std::size_t step = 0;; ++step) {
      if (step > series_limits().max_inverse_steps)
        fail(ErrorKind::support_overflow, "geometric series did not terminate within the step cap");
      term = (term * mh).truncate(rel);
      if (term.empty()) break;
      sum = sum + term;
    }
    sum.prec_ = rel;
    return sum.shifted(-g).scaled(ilc);
  }

  // Termwise p-th root: exponents and precision divided by p.
  Series pth_root() const {
    Rational ip(1, static_cast<unsigned long>(field_.p()));
    Series r(basis_, field_, prec_.is_inf() ? prec_ : Value(prec_.finite() * ip));
    for (const auto& t : terms_) r.terms_.push_back({t.exp * ip, t.coeff.pth_root()});
    if (!r.terms_.empty()) r.field_ = r.terms_.front().coeff.desc();
    return r;
  }

  // f^(p^e), termwise.
  Series frobenius(unsigned e) const {
    if (e == 0) return *this;
    Rational q(ipow(field_.p(), e));
    Series r(basis_, field_, prec_.is_inf() ? prec_ : Value(prec_.finite() * q));
    for (const auto& t : terms_) r.terms_.push_back({t.exp * q, t.coeff.frobenius(e)});
    return r;
  }

  // Drops terms >= pi and sets the precision to pi. Raising the precision
  // claims knowledge we do not have, so it needs allow_raise.
  Series truncate(const Value& pi, bool allow_raise = false) const {
    if (prec_ < pi && !allow_raise) return *this;
    Series r(basis_, field_, pi);
    for (const auto& t : terms_) {
      if (!(Value(t.exp) < pi)) break;
      r.terms_.push_back(t);
    }
    return r;
  }

  Series with_field(const FieldDesc& f) const {
    Series r(basis_, f, prec_);
    for (const auto& t : terms_) r.terms_.push_back({t.exp, FieldElem::embed(t.coeff, f)});
    return r;
  }

  // Same support and precision.
  friend bool operator==(const Series& a, const Series& b) {
    if (!(a.basis_ == b.basis_) || !(a.prec_ == b.prec_) || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (!(a.terms_[i].exp == b.terms_[i].exp) || !(a.terms_[i].coeff == b.terms_[i].coeff)) return false;
    return true;
  }

  // a and b agree below min(prec a, prec b).
  friend bool agree(const Series& a, const Series& b) { return (a - b).empty(); }

  std::string to_string(const std::string& var = "t") const {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      if (!first) os << " + ";
      first = false;
      bool zero_exp = t.exp.is_zero();
      std::string c = t.coeff.to_string();
      if (zero_exp) {
        os << c;
        continue;
      }
      if (!t.coeff.is_one()) os << '(' << c << ")*";
      os << var;
      std::string e = t.exp.pretty();
      if (e == "1") continue;
      os << '^';
      bool simple = e.find_first_of("/+-*") == std::string::npos;
      os << (simple ? e : "(" + e + ")");
    }
    if (!prec_.is_inf()) {
      if (!first) os << " + ";
      std::string e = prec_.finite().pretty();
      bool simple = e.find_first_of("/+-*") == std::string::npos;
      if (e == "1") os << "O(" << var << ')';
      else os << "O(" << var << '^' << (simple ? e : "(" + e + ")") << ')';
    } else if (first) {
      os << '0';
    }
    return os.str();
  }

  void check_basis(const Series& o) const {
    if (!(basis_ == o.basis_)) fail(ErrorKind::basis_mismatch, "series over different value groups");
  }

 private:
  static Series add(const Series& a, const Series& b, bool negate) {
    a.check_basis(b);
    FieldDesc f = detail::common_field(a.field_, b.field_);
    Series r(a.basis_, f, vmin(a.prec_, b.prec_));
    std::size_t i = 0, j = 0;
    const auto& x = a.terms_;
    const auto& y = b.terms_;
    while (i < x.size() || j < y.size()) {
      std::strong_ordering o = i == x.size()   ? std::strong_ordering::greater
                               : j == y.size() ? std::strong_ordering::less
                                               : x[i].exp <=> y[j].exp;
      const GroupElement& e = o == std::strong_ordering::greater ? y[j].exp : x[i].exp;
      if (!(Value(e) < r.prec_)) break;
      if (o == std::strong_ordering::less) {
        r.terms_.push_back(x[i++]);
      } else if (o == std::strong_ordering::greater) {
        r.terms_.push_back({y[j].exp, negate ? -y[j].coeff : y[j].coeff});
        ++j;
      } else {
        FieldElem c = negate ? x[i].coeff - y[j].coeff : x[i].coeff + y[j].coeff;
        if (!c.is_zero()) r.terms_.push_back({x[i].exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    r.check_cap();
    return r;
  }

  static std::vector<Term> normalize_terms(std::vector<Term> t, const Value& prec, const FieldDesc&) {
    std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
    std::vector<Term> out;
    for (auto& x : t) {
      if (!(Value(x.exp) < prec)) break;
      if (!out.empty() && out.back().exp == x.exp) {
        out.back().coeff = out.back().coeff + x.coeff;
      } else {
        if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
        out.push_back(std::move(x));
      }
    }
    if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
    return out;
  }

  void check_cap() const {
    if (terms_.size() > series_limits().max_terms)
      fail(ErrorKind::support_overflow, "series support of " + std::to_string(terms_.size()) +
                                            " terms exceeds the cap of " +
                                            std::to_string(series_limits().max_terms));
  }

  GroupBasis basis_;
  FieldDesc field_;
  std::vector<Term> terms_;
  Value prec_;
};

// ---------------------------------------------------------------------------
// Distinguished subfields of the ambient series field.

// Which coefficients a subfield admits.
struct CoeffRule {
  enum class Kind { all, prime_subfield, no_roots_of };
  Kind kind = Kind::all;
  std::vector<std::size_t> vars;  // for no_roots_of: variables whose proper p-power roots are excluded

  bool admits(const FieldElem& c) const {
    switch (kind) {
      case Kind::all: return true;
      case Kind::prime_subfield: return c.prime_value().has_value();
      case Kind::no_roots_of: {
        unsigned k = c.perf_level();
        if (k == 0) return true;
        const FieldElem& x = c.perf_base();
        if (x.desc().kind() != FieldKind::ratfunc) return true;
        std::uint64_t q = ipow(c.p(), k).get_ui();
        for (const auto* poly : {&x.numerator(), &x.denominator()})
          for (const auto& [m, coef] : poly->terms())
            for (auto v : vars)
              if (m[v] % q) return false;
        return true;
      }
    }
    return false;
  }
};

// Hahn subfield: exponents in a lattice (plus freely divisible coordinates),
// coefficients from a subfield of the coefficient field.
struct HahnRecipe {
  Subgroup lattice;
  std::vector<bool> divisible;  // coordinate i may take any rational value
  CoeffRule coeff;

  bool admits_exponent(const GroupElement& g) const {
    if (divisible.empty()) return lattice.contains(g);
    std::vector<Rational> c(g.coords());
    for (std::size_t i = 0; i < c.size() && i < divisible.size(); ++i)
      if (divisible[i]) c[i] = 0;
    std::vector<GroupElement> gens;
    for (const auto& h : lattice.generators()) {
      std::vector<Rational> hc(h.coords());
      for (std::size_t i = 0; i < hc.size() && i < divisible.size(); ++i)
        if (divisible[i]) hc[i] = 0;
      gens.emplace_back(g.basis(), hc);
    }
    return Subgroup(g.basis(), gens).contains(GroupElement(g.basis(), c));
  }
  bool admits(const Term& t) const { return admits_exponent(t.exp) && coeff.admits(t.coeff); }
};

// K[x]_n: polynomials of degree <= n in x with coefficients in the base field K.
struct PolyInTRecipe {
  Series x;
  unsigned degree;
  HahnRecipe base;
};

// K(a_1, ..., a_k); sampled through polynomials of bounded total degree.
struct FinGenRecipe {
  std::vector<Series> gens;
  HahnRecipe base;
  unsigned sample_degree = 2;
};

class SubfieldDesc {
 public:
  using Recipe = std::variant<PolyInTRecipe, FinGenRecipe, HahnRecipe>;
  SubfieldDesc(std::string name, Recipe r) : name_(std::move(name)), r_(std::move(r)) {}

  const std::string& name() const { return name_; }
  const Recipe& recipe() const { return r_; }
  const HahnRecipe* hahn() const { return std::get_if<HahnRecipe>(&r_); }
  const PolyInTRecipe* poly_in_t() const { return std::get_if<PolyInTRecipe>(&r_); }
  const FinGenRecipe* fin_gen() const { return std::get_if<FinGenRecipe>(&r_); }

 private:
  std::string name_;
  Recipe r_;
};

namespace detail {

inline long long rng_range(std::mt19937_64& g, long long lo, long long hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long long>(g() % span);
}

// A random coefficient admitted by `rule` inside `f`.
inline FieldElem sample_coeff(std::mt19937_64& g, const FieldDesc& f, const CoeffRule& rule) {
  const long long p = static_cast<long long>(f.p());
  if (rule.kind == CoeffRule::Kind::prime_subfield || f.kind() == FieldKind::prime)
    return FieldElem::from_int(f, rng_range(g, 1, p - 1));
  if (f.kind() == FieldKind::finite) {
    fp::Poly c;
    for (unsigned i = 0; i < f.degree(); ++i) c.push_back(static_cast<fp::U>(rng_range(g, 0, p - 1)));
    FieldElem e = FieldElem::from_coeffs(f, c);
    return e.is_zero() ? FieldElem::one(f) : e;
  }
  // Rational function field or its perfect closure: a short monomial sum.
  FieldElem e = FieldElem::from_int(f, rng_range(g, 1, p - 1));
  std::size_t nv = f.nvars();
  int nt = static_cast<int>(rng_range(g, 0, 2));
  for (int t = 0; t < nt; ++t) {
    std::size_t v = static_cast<std::size_t>(rng_range(g, 0, static_cast<long long>(nv) - 1));
    FieldElem m = FieldElem::var(f, v).pow(Integer(static_cast<long>(rng_range(g, 1, 2))));
    bool excluded = rule.kind == CoeffRule::Kind::no_roots_of &&
                    std::find(rule.vars.begin(), rule.vars.end(), v) != rule.vars.end();
    if (f.kind() == FieldKind::perf && !excluded && rng_range(g, 0, 1)) m = m.pth_root();
    e = e + m;
  }
  return e.is_zero() ? FieldElem::one(f) : e;
}

inline GroupElement sample_exponent(std::mt19937_64& g, const GroupBasis& b, const HahnRecipe& h) {
  GroupElement e(b);
  for (const auto& gen : h.lattice.generators()) e += gen * Rational(static_cast<long>(rng_range(g, -1, 3)));
  for (std::size_t i = 0; i < h.divisible.size() && i < b.rank(); ++i)
    if (h.divisible[i] && rng_range(g, 0, 1)) {
      Rational q(static_cast<long>(rng_range(g, -4, 8)), static_cast<long>(rng_range(g, 1, 8)));
      q.canonicalize();
      e += GroupElement::unit(b, i, q);
    }
  return e;
}

inline Series sample_hahn(std::mt19937_64& g, const GroupBasis& b, const FieldDesc& f, const HahnRecipe& h,
                          int max_terms = 3) {
  std::vector<Term> t;
  int n = static_cast<int>(rng_range(g, 0, max_terms));
  for (int i = 0; i < n; ++i) t.push_back({sample_exponent(g, b, h), sample_coeff(g, f, h.coeff)});
  return Series::from_terms(b, f, std::move(t));
}

}  // namespace detail

// A random element of S (exact series).
inline Series sample_subfield_element(const SubfieldDesc& S, const GroupBasis& b, const FieldDesc& f,
                                      std::mt19937_64& g) {
  if (auto h = S.hahn()) return detail::sample_hahn(g, b, f, *h);
  if (auto pt = S.poly_in_t()) {
    Series acc = Series::zero(b, f);
    Series xp = Series::constant(b, FieldElem::one(f));
    for (unsigned j = 0; j <= pt->degree; ++j) {
      if (detail::rng_range(g, 0, 2)) acc = acc + detail::sample_hahn(g, b, f, pt->base, 1) * xp;
      xp = xp * pt->x;
    }
    return acc;
  }
  const auto& fg = *S.fin_gen();
  Series acc = detail::sample_hahn(g, b, f, fg.base, 1);
  int nm = static_cast<int>(detail::rng_range(g, 1, 3));
  for (int m = 0; m < nm; ++m) {
    Series mono = detail::sample_hahn(g, b, f, fg.base, 1);
    if (mono.empty()) mono = Series::constant(b, FieldElem::one(f));
    unsigned deg = static_cast<unsigned>(detail::rng_range(g, 1, fg.sample_degree));
    for (unsigned d = 0; d < deg && !fg.gens.empty(); ++d)
      mono = mono * fg.gens[static_cast<std::size_t>(detail::rng_range(g, 0, static_cast<long long>(fg.gens.size()) - 1))];
    acc = acc + mono;
  }
  return acc;
}

// Whether f lies in S, when decidable from the recipe.
inline std::optional<bool> subfield_contains(const Series& f, const SubfieldDesc& S) {
  if (auto h = S.hahn()) {
    for (const auto& t : f.terms())
      if (!h->admits(t)) return false;
    if (!f.is_exact()) return std::nullopt;
    return true;
  }
  if (auto pt = S.poly_in_t()) {
    if (!f.is_exact() || !pt->x.is_exact() || pt->x.size() != 1) return std::nullopt;
    const Term& xt = pt->x.terms().front();
    const auto& base = pt->base;
    bool trivial_base = base.lattice.generators().empty() ||
                        std::all_of(base.lattice.generators().begin(), base.lattice.generators().end(),
                                    [](const GroupElement& g) { return g.is_zero(); });
    if (!xt.exp.is_zero() && trivial_base) {
      // Exponents must be j * vx with 0 <= j <= n, coefficients k * c^j with k admitted.
      for (const auto& t : f.terms()) {
        bool found = false;
        for (unsigned j = 0; j <= pt->degree && !found; ++j) {
          if (!(t.exp == xt.exp * Rational(j))) continue;
          found = base.coeff.admits(t.coeff / xt.coeff.pow(Integer(j)));
        }
        if (!found) return false;
      }
      return true;
    }
    if (xt.exp.is_zero() && xt.coeff.desc().kind() == FieldKind::ratfunc && xt.coeff.denominator().is_one() &&
        xt.coeff.numerator().terms().size() == 1 && base.coeff.kind == CoeffRule::Kind::prime_subfield) {
      // x = s_v: every coefficient must be a polynomial of degree <= n in s_v over F_p.
      const auto& mono = xt.coeff.numerator().terms().begin()->first;
      std::size_t v = 0;
      while (v < mono.size() && mono[v] == 0) ++v;
      if (v == mono.size() || mono[v] != 1 || fp::total_degree(mono) != 1) return std::nullopt;
      for (const auto& t : f.terms()) {
        if (!base.admits_exponent(t.exp)) return false;
        if (!t.coeff.denominator().is_one()) return false;
        for (const auto& [m, c] : t.coeff.numerator().terms())
          if (fp::total_degree(m) != m[v] || m[v] > pt->degree) return false;
      }
      return true;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

struct MembershipDistance {
  Value sampled_sup;                  // max over sampled d of v(f - d)
  std::optional<Value> exact_bound;   // support-based bound valid for every d in S
  std::optional<std::size_t> first_outside;  // index of the first term of f outside S
  std::size_t samples = 0;
};

// sup over sampled d in S of v(f - d), plus an exact bound for Hahn subfields:
// the first term of f outside the recipe survives in f - d for every d in S.
inline MembershipDistance subfield_membership_distance(const Series& f, const SubfieldDesc& S, int samples,
                                                       std::uint64_t seed) {
  std::mt19937_64 g(seed);
  MembershipDistance out{Value::inf(), std::nullopt, std::nullopt, 0};
  bool have = false;
  auto consider = [&](const Series& d) {
    Series diff = f - d;
    Value v = diff.value_lower_bound();
    out.sampled_sup = have ? vmax(out.sampled_sup, v) : v;
    have = true;
    ++out.samples;
  };
  if (auto h = S.hahn()) {
    std::vector<Term> prefix;
    for (std::size_t i = 0; i < f.terms().size(); ++i) {
      if (!h->admits(f.terms()[i])) {
        out.first_outside = i;
        out.exact_bound = Value(f.terms()[i].exp);
        break;
      }
      prefix.push_back(f.terms()[i]);
    }
    if (!out.first_outside && f.is_exact()) out.exact_bound = Value::inf();
    Series pre = Series::from_terms(f.basis(), f.field(), prefix);
    consider(pre);
    for (int i = 1; i < samples; ++i) {
      Series d = detail::sample_hahn(g, f.basis(), f.field(), *h);
      consider(i % 2 ? pre + d : d);
    }
    return out;
  }
  for (int i = 0; i < samples; ++i) consider(sample_subfield_element(S, f.basis(), f.field(), g));
  if (!have) out.sampled_sup = Value(GroupElement(f.basis()));
  return out;
}

}  // namespace valfield
