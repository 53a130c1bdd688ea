// Root analysis over series fields: Newton polygons, Newton lifting,
// Newton-Puiseux roots, Krasner constants, Artin-Schreier roots and the
// deformation element.
#pragma once

#include <valfield/ffpoly.hpp>
#include <valfield/polyops.hpp>

#include <numeric>

namespace valfield {

struct NewtonSegment {
  GroupElement slope;
  int start = 0;
  int length = 0;
  GroupElement root_value() const { return -slope; }
};

struct NewtonPolygon {
  std::vector<std::pair<int, Value>> points;
  std::vector<NewtonSegment> segments;
  int zero_multiplicity = 0;  // order of X dividing f

  // (root value, multiplicity), largest value first.
  std::vector<std::pair<GroupElement, int>> root_values() const {
    std::vector<std::pair<GroupElement, int>> r;
    for (const auto& s : segments) r.push_back({s.root_value(), s.length});
    return r;
  }
};

namespace detail {
inline NewtonPolygon hull(std::vector<std::pair<int, GroupElement>> pts) {
  NewtonPolygon np;
  std::vector<std::pair<int, GroupElement>> h;
  auto slope = [](const auto& a, const auto& b) { return (b.second - a.second) / Rational(b.first - a.first); };
  for (auto& q : pts) {
    while (h.size() >= 2 && slope(h[h.size() - 2], h.back()) >= slope(h.back(), q)) h.pop_back();
    h.push_back(q);
  }
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    np.segments.push_back({slope(h[i], h[i + 1]), h[i].first, h[i + 1].first - h[i].first});
  for (auto& q : pts) np.points.push_back({q.first, Value(q.second)});
  return np;
}

// Dense coefficient list of a univariate polynomial.
inline std::vector<Series> dense(const MultiPoly& f) {
  if (f.nvars() != 1) fail(ErrorKind::precondition, "univariate polynomial expected");
  if (f.is_zero()) fail(ErrorKind::zero_polynomial, "zero polynomial");
  std::vector<Series> c(f.degree() + 1, Series::zero(f.basis(), f.field()));
  for (const auto& [e, s] : f.terms()) c[e[0]] = s;
  return c;
}
}  // namespace detail

inline NewtonPolygon newton_polygon(const MultiPoly& f) {
  auto c = detail::dense(f);
  std::vector<std::pair<int, GroupElement>> pts;
  int zm = -1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_exact_zero()) continue;
    Value v = c[i].valuation();  // throws when undecidable
    if (zm < 0) zm = static_cast<int>(i);
    pts.push_back({static_cast<int>(i), v.finite()});
  }
  NewtonPolygon np = detail::hull(std::move(pts));
  np.zero_multiplicity = zm;
  return np;
}

// Newton iteration a <- a - f(a)/f'(a). The result is a root to precision
// pi - v f'(a0), so that f(result) = O(t^pi).
inline Series hensel_lift(const MultiPoly& f, const Series& a0, const Value& pi) {
  if (pi.is_inf()) fail(ErrorKind::precondition, "Newton lifting needs a finite target precision");
  MultiPoly d1 = formal_derivative(f, 0, 1);
  if (d1.is_zero()) fail(ErrorKind::inseparable, "derivative vanishes identically");
  Series fa = eval_at_series(f, {a0}, Value::inf());
  if (fa.is_exact_zero()) return a0;
  Series da = eval_at_series(d1, {a0}, Value::inf());
  if (da.is_exact_zero()) fail(ErrorKind::precondition, "f'(a0) = 0");
  GroupElement vd = da.valuation().finite();
  if (!(fa.valuation() > Value(vd * Rational(2))))
    fail(ErrorKind::precondition, "v f(a0) = " + fa.valuation().to_string() + " is not > 2 v f'(a0) = " +
                                      Value(vd * Rational(2)).to_string());
  Value R(pi.finite() - vd);
  Series a = a0.truncate(R);
  for (int it = 0; it < 128; ++it) {
    Series exact = Series::from_terms(a.basis(), a.field(), a.terms());
    fa = eval_at_series(f, {exact}, Value::inf());
    if (fa.is_exact_zero()) return exact;
    if (fa.valuation() >= pi) return exact.truncate(R, true);
    da = eval_at_series(d1, {exact}, Value::inf());
    Value target(R.finite() - fa.valuation().finite());
    Series q = (fa * da.inv(target)).truncate(R);
    a = (exact - q).truncate(R);
  }
  fail(ErrorKind::search_exhausted, "Newton iteration did not reach the target precision");
}

// ---- Newton-Puiseux ----

namespace detail {

struct NeedLift {
  unsigned degree;
};

inline unsigned lcm_u(unsigned a, unsigned b) { return a / std::gcd(a, b) * b; }

// Degrees of all irreducible factors of r over a finite field.
inline void all_factor_degrees(ff::FPoly r, std::vector<int>& out) {
  ff::trim(r);
  if (ff::deg(r) <= 0) return;
  ff::FPoly d = ff::derivative(r);
  if (d.empty()) {
    ff::FPoly h;
    for (std::size_t i = 0; i < r.size(); i += r[0].p()) h.push_back(r[i].pth_root());
    all_factor_degrees(h, out);
    return;
  }
  ff::FPoly g = ff::gcd(r, d);
  for (int k : ff::factor_degrees(ff::divmod(r, g).first)) out.push_back(k);
  all_factor_degrees(g, out);
}

// Roots with multiplicity of a residual polynomial. Throws NeedLift when a
// finite coefficient field is too small.
inline std::vector<std::pair<FieldElem, unsigned>> residual_roots(const ff::FPoly& r) {
  const FieldDesc& F = r[0].desc();
  std::vector<std::pair<FieldElem, unsigned>> out;
  unsigned found = 0;
  auto take = [&](const FieldElem& c) {
    unsigned m = ff::multiplicity(r, c);
    if (m) {
      out.push_back({c, m});
      found += m;
    }
  };
  if (ff::is_finite_kind(F)) {
    for (const auto& c : ff::roots(r)) take(c);
    if (found < static_cast<unsigned>(ff::deg(r))) {
      ff::FPoly rest = r;
      for (const auto& [c, m] : out)
        for (unsigned i = 0; i < m; ++i) rest = ff::divmod(rest, ff::FPoly{-c, FieldElem::one(F)}).first;
      std::vector<int> degs;
      all_factor_degrees(rest, degs);
      unsigned L = 1;
      for (int k : degs) L = lcm_u(L, static_cast<unsigned>(k));
      throw NeedLift{L};
    }
    return out;
  }
  if (ff::deg(r) == 1) {
    take(-(r[0] / r[1]));
    return out;
  }
  // a Y^(p^k) + b in a perfect field: one root of full multiplicity.
  int n = ff::deg(r);
  bool binom = true;
  for (int i = 1; i < n; ++i) binom = binom && r[i].is_zero();
  if (binom && F.is_perfect()) {
    int k = 0, m = n;
    while (m % static_cast<int>(F.p()) == 0) m /= static_cast<int>(F.p()), ++k;
    if (m == 1) {
      FieldElem c = -(r[0] / r[n]);
      for (int i = 0; i < k; ++i) c = c.pth_root();
      out.push_back({c, static_cast<unsigned>(n)});
      return out;
    }
  }
  for (std::uint64_t v = 0; v < F.p() && v < 64; ++v) take(FieldElem::from_int(F, static_cast<long long>(v)));
  if (found != static_cast<unsigned>(n))
    fail(ErrorKind::precondition, "residual polynomial does not split over " + F.to_string());
  return out;
}

struct Puiseux {
  GroupBasis basis;
  FieldDesc field;
  Value pi;
  std::optional<MultiPoly> exact_f;  // for switching to Newton iteration on simple roots
  Integer fact;                      // deg(f)! times the exponent denominators of f
  std::vector<Series> out;

  // g(X) = f(prefix + X); collects the roots of g of value > mu_lo.
  // Coefficients of X^i only matter below bound - i*mu_lo.
  void expand(const std::vector<Series>& g, const Series& prefix, const std::optional<GroupElement>& mu_lo,
              unsigned expect, const GroupElement& bound, int depth) {
    if (depth > 4096) fail(ErrorKind::search_exhausted, "Newton-Puiseux recursion too deep");
    std::vector<std::pair<int, GroupElement>> pts;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g[i].empty()) pts.push_back({static_cast<int>(i), g[i].valuation().finite()});
    NewtonPolygon np = hull(pts);
    const GroupElement& P = pi.finite();
    // Rightmost index minimizing v_i + i*pi counts roots of value >= pi.
    int n_hi = 0;
    std::optional<GroupElement> best;
    for (const auto& [i, v] : pts) {
      GroupElement w = v + P * Rational(i);
      if (!best || w <= *best) best = w, n_hi = i;
    }
    unsigned total = static_cast<unsigned>(n_hi);
    if (n_hi > 1)
      fail(ErrorKind::inseparable,
           std::to_string(n_hi) + " roots agree to precision " + pi.to_string() + " (inseparable or precision too low)");
    if (n_hi == 1) out.push_back(g[0].is_exact_zero() ? prefix : prefix.truncate(pi, true));
    for (const auto& seg : np.segments) {
      GroupElement nu = seg.root_value();
      if (mu_lo && nu <= *mu_lo) continue;
      if (Value(nu) >= pi) continue;
      for (const auto& q : nu.coords())
        if (!mpz_divisible_p(fact.get_mpz_t(), q.get_den_mpz_t()))
          fail(ErrorKind::precondition, "root exponent " + nu.to_string() + " has a denominator not dividing " +
                                            fact.get_str() + " (wild ramification)");
      total += static_cast<unsigned>(seg.length);
      GroupElement C = pts[0].second;  // placeholder, set below
      bool have = false;
      for (const auto& [i, v] : pts) {
        GroupElement w = v + nu * Rational(i);
        if (!have || w < C) C = w, have = true;
      }
      ff::FPoly R;
      for (const auto& [i, v] : pts) {
        if (i < seg.start || i > seg.start + seg.length) continue;
        if (!(v + nu * Rational(i) == C)) continue;
        R.resize(i - seg.start + 1, FieldElem::zero(field));
        R[i - seg.start] = *g[i].val_lc().second;
      }
      R.resize(seg.length + 1, FieldElem::zero(field));
      for (auto& x : R) x = FieldElem::embed(x, field);
      for (const auto& [c, m] : residual_roots(R)) {
        Series next = prefix + Series::monomial(basis, c, nu);
        std::vector<Series> h = shift(g, c, nu, bound);
        // The m roots above nu see the other roots through h_m only, so
        // v(h_m) + m*pi bounds every line constant further down.
        GroupElement b = bound;
        if (h.size() > m && !h[m].empty()) {
          GroupElement b2 = h[m].valuation().finite() + P * Rational(m);
          if (b2 < b) {
            b = b2;
            for (std::size_t i = 0; i < h.size(); ++i) h[i] = h[i].truncate(Value(b - nu * Rational(static_cast<long>(i))));
          }
        }
        if (m == 1 && try_newton(h, next)) continue;
        expand(h, next, nu, m, b, depth + 1);
      }
    }
    if (total != expect && expect != 0)
      fail(ErrorKind::construction_inconsistency, "root count mismatch in Newton-Puiseux recursion");
  }

  // A simple root near `start` once Newton's condition v h_0 > 2 v h_1 holds.
  bool try_newton(const std::vector<Series>& h, const Series& start) {
    if (!exact_f || h.size() < 2 || h[0].empty() || h[1].empty()) return false;
    GroupElement v0 = h[0].valuation().finite(), v1 = h[1].valuation().finite();
    if (!(v0 > v1 * Rational(2))) return false;
    try {
      Series r = hensel_lift(*exact_f, start, Value(pi.finite() + v1));
      out.push_back(r.is_exact() ? r : r.truncate(pi, true));
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  // Coefficients of g(c t^nu + X), truncated.
  std::vector<Series> shift(const std::vector<Series>& g, const FieldElem& c, const GroupElement& nu,
                            const GroupElement& bound) const {
    std::size_t n = g.size();
    auto binom = pascal_mod(static_cast<std::uint32_t>(n - 1), field.p());
    std::vector<FieldElem> cp{FieldElem::one(field)};
    for (std::size_t j = 1; j < n; ++j) cp.push_back(cp.back() * c);
    std::vector<Series> h;
    for (std::size_t i = 0; i < n; ++i) {
      Value Pi(bound - nu * Rational(static_cast<long>(i)));
      Series acc = Series::zero(basis, field, Pi);
      for (std::size_t j = i; j < n; ++j) {
        fp::U b = binom[j][i];
        if (!b || g[j].is_exact_zero()) continue;
        FieldElem k = cp[j - i] * FieldElem::from_int(field, static_cast<long long>(b));
        acc = acc + g[j].truncate(Value(Pi.finite() - nu * Rational(static_cast<long>(j - i))))
                        .scaled(k)
                        .shifted(nu * Rational(static_cast<long>(j - i)));
      }
      h.push_back(acc.truncate(Pi));
    }
    return h;
  }
};

}  // namespace detail

// All roots of f (deg <= 8), each to precision pi. A finite coefficient field
// is enlarged when a residual polynomial does not split; the roots then live
// over the larger field.
inline std::vector<Series> puiseux_roots(const MultiPoly& f, const Value& pi, unsigned deg_cap = 8) {
  if (pi.is_inf()) fail(ErrorKind::precondition, "Newton-Puiseux needs a finite precision");
  auto c = detail::dense(f);
  int n = static_cast<int>(c.size()) - 1;
  if (n > static_cast<int>(deg_cap))
    fail(ErrorKind::precondition, "degree " + std::to_string(n) + " exceeds the cap " + std::to_string(deg_cap));
  FieldDesc F = f.field();
  for (int round = 0; round < 8; ++round) {
    std::vector<Series> g;
    for (auto& s : c) g.push_back(s.with_field(F));
    for (auto& s : g)
      if (!s.value_decidable()) fail(ErrorKind::undecidable_at_precision, "coefficient value undecidable");
    Integer fact = 1, den = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    for (const auto& s : c)
      for (const auto& t : s.terms())
        for (const auto& q : t.exp.coords()) den = lcm(den, Integer(q.get_den()));
    fact *= den;
    detail::Puiseux ctx{f.basis(), F, pi, std::nullopt, fact, {}};
    if (std::all_of(g.begin(), g.end(), [](const Series& s) { return s.is_exact(); })) {
      MultiPoly e(1, f.basis(), F);
      for (std::size_t i = 0; i < g.size(); ++i) e.add({static_cast<std::uint32_t>(i)}, g[i]);
      ctx.exact_f = e;
    }
    try {
      ctx.expand(g, Series::zero(f.basis(), F), std::nullopt, static_cast<unsigned>(n),
                 c.back().valuation().finite() + pi.finite() * Rational(n), 0);
      if (ctx.out.size() != static_cast<std::size_t>(n))
        fail(ErrorKind::construction_inconsistency, "found " + std::to_string(ctx.out.size()) + " of " +
                                                        std::to_string(n) + " roots");
      return ctx.out;
    } catch (const detail::NeedLift& l) {
      F = F.kind() == FieldKind::prime ? FieldDesc::finite(F.p(), l.degree)
                                       : FieldDesc::finite(F.p(), F.degree() * l.degree);
    }
  }
  fail(ErrorKind::search_exhausted, "coefficient field lifting did not terminate");
}

struct KrasnerResult {
  GroupElement value;
  std::size_t i = 0, j = 0;  // witness pair of root indices
  std::vector<Series> roots;
};

// max v(r_i - r_j) over distinct roots; the working precision is raised
// until every difference has a decidable value.
inline KrasnerResult krasner_constant(const MultiPoly& f, unsigned deg_cap = 8) {
  NewtonPolygon np = newton_polygon(f);
  if (np.zero_multiplicity > 1) fail(ErrorKind::inseparable, "repeated root 0");
  const GroupBasis& b = f.basis();
  GroupElement top = GroupElement::scalar(b, 0);
  for (const auto& s : np.segments) top = std::max(top, s.root_value());
  std::optional<Error> last;
  for (int k = 0; k < 10; ++k) {
    Value pi(top + GroupElement::scalar(b, Rational(4L << k)));
    std::vector<Series> r;
    try {
      r = puiseux_roots(f, pi, deg_cap);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::inseparable) throw;
      last = e;
      continue;
    }
    if (r.size() < 2) fail(ErrorKind::precondition, "Krasner constant needs at least two roots");
    KrasnerResult out{GroupElement(b), 0, 0, r};
    bool ok = true, have = false;
    for (std::size_t i = 0; i < r.size() && ok; ++i)
      for (std::size_t j = i + 1; j < r.size(); ++j) {
        Series d = r[i] - r[j];
        if (!d.value_decidable()) {
          ok = false;
          break;
        }
        GroupElement v = d.valuation().finite();
        if (!have || v > out.value) out.value = v, out.i = i, out.j = j, have = true;
      }
    if (ok) return out;
  }
  if (last) throw *last;
  fail(ErrorKind::inseparable, "root differences undecidable at every working precision tried");
}

// ---- Artin-Schreier ----

// Root of X^p - X = c. A monomial m of negative value contributes the
// infinite sum of m^(1/p^j), j >= 1, kept symbolically in `tails`.
struct ASRoot {
  Series finite;            // remaining part, to precision pi
  std::vector<Term> tails;  // each m stands for sum_{j>=1} m^(1/p^j)
  Series residual;          // finite^p - finite - (c minus its negative part), exact

  bool has_tails() const { return !tails.empty(); }

  Series series() const {
    if (has_tails()) fail(ErrorKind::precondition, "root has infinitely many terms of negative value");
    return finite;
  }

  // finite plus every tail term of value < pi_neg (pi_neg <= 0). The omitted
  // terms have value >= pi_neg, so X^p - X - c has value >= p*pi_neg there.
  Series realize(const Value& pi_neg) const {
    if (pi_neg.is_inf() || pi_neg.finite().sign() > 0) fail(ErrorKind::precondition, "realize needs pi_neg <= 0");
    std::vector<Term> t(finite.terms());
    Rational ip(1, static_cast<unsigned long>(finite.field().p()));
    FieldDesc F = finite.field();
    for (const auto& m : tails) {
      Term cur = m;
      for (int j = 1;; ++j) {
        cur = {cur.exp * ip, cur.coeff.pth_root()};
        if (!(Value(cur.exp) < pi_neg)) break;
        F = detail::common_field(F, cur.coeff.desc());
        t.push_back(cur);
        if (j > 4096) fail(ErrorKind::support_overflow, "tail realization too long");
      }
    }
    for (auto& x : t) x.coeff = FieldElem::embed(x.coeff, F);
    return Series::from_terms(finite.basis(), F, std::move(t), finite.precision());
  }
};

namespace detail {
// Root of Y^p - Y = a in the coefficient field, with constant coordinate 0.
inline FieldElem as_residue_root(const FieldElem& a) {
  const FieldDesc& F = a.desc();
  if (a.is_zero()) return a;
  if (ff::is_finite_kind(F)) {
    ff::FPoly r(F.p() + 1, FieldElem::zero(F));
    r[0] = -a;
    r[1] = -FieldElem::one(F);
    r[F.p()] = FieldElem::one(F);
    for (const auto& y : ff::roots(r)) {
      if (F.kind() == FieldKind::finite && (y.coeffs().empty() || y.coeffs()[0] == 0)) return y;
    }
  }
  fail(ErrorKind::not_solvable_here, "Y^p - Y = " + a.to_string() + " has no root in " + F.to_string());
}
}  // namespace detail

inline ASRoot artin_schreier_solve(const Series& c, const Value& pi) {
  const GroupBasis& b = c.basis();
  FieldDesc F = c.field();
  if (!c.precision().is_inf() && c.precision() < pi)
    fail(ErrorKind::insufficient_precision, "c is known only to " + c.precision().to_string());
  std::vector<Term> neg, pos;
  std::optional<FieldElem> c0;
  for (const auto& t : c.terms()) {
    int s = t.exp.sign();
    if (s < 0) neg.push_back(t);
    else if (s == 0) c0 = t.coeff;
    else pos.push_back(t);
  }
  ASRoot r{Series::zero(b, F), neg, Series::zero(b, F)};
  Series x = Series::zero(b, F);
  if (c0) x = x + Series::constant(b, detail::as_residue_root(*c0));
  if (!pos.empty()) {
    if (pi.is_inf()) fail(ErrorKind::precondition, "positive part needs a finite precision");
    // -sum_j cpos^(p^j) below pi.
    Series cp = Series::from_terms(b, F, pos);
    for (unsigned j = 0;; ++j) {
      Series term = cp.frobenius(j);
      if (!(term.valuation() < pi)) break;
      x = x - term.truncate(pi, true);
      x = Series::from_terms(b, x.field(), x.terms());
      if (j > 4096) fail(ErrorKind::support_overflow, "Artin-Schreier series too long");
    }
  }
  std::vector<Term> nonneg(pos);
  if (c0) nonneg.push_back({GroupElement(b), *c0});
  Series cn = Series::from_terms(b, x.field(), nonneg);
  r.residual = x.frobenius(1) - x - cn;
  r.finite = pi.is_inf() ? x : x.truncate(pi, true);
  return r;
}

// ---- deformation element ----

struct DistanceBound {
  Value value;
  bool strict = false;  // distance < value rather than <= value
};

// Root of X^p - X = (eta/b)^p after certifying (p-1) vb + v eta > p * dist(eta, S).
inline ASRoot deform_element(const Series& eta, const Series& b, const DistanceBound& dist, const Value& pi) {
  if (dist.value.is_inf()) fail(ErrorKind::precondition, "eta lies in the completion of the subfield");
  Rational p(static_cast<unsigned long>(eta.field().p()));
  Value lhs = Value(b.valuation().finite() * (p - 1) + eta.valuation().finite());
  Value rhs = Value(dist.value.finite() * p);
  bool ok = dist.strict ? lhs >= rhs : lhs > rhs;
  if (!ok)
    fail(ErrorKind::precondition, "(p-1) vb + v eta = " + lhs.to_string() + " does not exceed p * dist = " +
                                      rhs.to_string());
  // eta/b is needed to precision pi/p before the Frobenius.
  Series q = eta;
  if ((b.size() == 1 && b.is_exact()) || pi.is_inf()) {
    q = eta * b.inv();
  } else {
    q = eta * b.inv(Value(pi.finite() / p - eta.valuation().finite()));
  }
  return artin_schreier_solve(q.frobenius(1), pi);
}

inline ASRoot deform_element(const Series& eta, const Series& b, const SubfieldDesc& S, const Value& pi,
                             std::size_t samples = 64, std::uint64_t seed = 1) {
  auto d = subfield_membership_distance(eta, S, samples, seed);
  if (!d.exact_bound)
    fail(ErrorKind::condition_unverifiable, "only a sampled distance (" + d.sampled_sup.to_string() +
                                                 ") is available for " + S.name());
  return deform_element(eta, b, DistanceBound{*d.exact_bound, false}, pi);
}

}  // namespace valfield
