// Multivariate polynomials with series coefficients: formal (Hasse)
// derivatives, Taylor expansion, crucial exponents and evaluation.
#pragma once

#include <valfield/series.hpp>

#include <map>
#include <sstream>
#include <vector>

namespace valfield {

using Exps = std::vector<std::uint32_t>;

class MultiPoly {
 public:
  MultiPoly(std::size_t nvars, GroupBasis b, FieldDesc f) : n_(nvars), b_(std::move(b)), f_(std::move(f)) {
    if (nvars == 0) fail(ErrorKind::precondition, "polynomial needs at least one variable");
  }

  // Univariate polynomial from coefficients indexed by degree.
  static MultiPoly univariate(const std::vector<Series>& coeffs) {
    if (coeffs.empty()) fail(ErrorKind::precondition, "empty coefficient list");
    MultiPoly r(1, coeffs[0].basis(), coeffs[0].field());
    for (std::size_t j = 0; j < coeffs.size(); ++j) r.add({static_cast<std::uint32_t>(j)}, coeffs[j]);
    return r;
  }

  std::size_t nvars() const { return n_; }
  const GroupBasis& basis() const { return b_; }
  const FieldDesc& field() const { return f_; }
  const std::map<Exps, Series>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  Series coeff(const Exps& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Series::zero(b_, f_) : it->second;
  }
  Series coeff(std::uint32_t j) const { return coeff(Exps{j}); }

  // Adds c to the coefficient of X^e; exact zeros are not stored.
  void add(const Exps& e, const Series& c) {
    if (e.size() != n_) fail(ErrorKind::precondition, "exponent tuple of wrong length");
    auto it = t_.find(e);
    if (it == t_.end()) {
      if (!c.is_exact_zero()) {
        t_.emplace(e, c);
        f_ = detail::common_field(f_, c.field());
      }
      return;
    }
    it->second = it->second + c;
    if (it->second.is_exact_zero()) t_.erase(it);
  }

  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : t_) d = std::max(d, e.at(var));
    return d;
  }
  std::uint32_t degree() const { return degree_in(0); }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r(a);
    for (const auto& [e, c] : b.t_) r.add(e, c);
    return r;
  }
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r(a);
    for (const auto& [e, c] : b.t_) r.add(e, -c);
    return r;
  }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r(a.n_, a.b_, detail::common_field(a.f_, b.f_));
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) {
        Exps e(ea);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        r.add(e, ca * cb);
      }
    return r;
  }
  MultiPoly scaled(const Series& c) const {
    MultiPoly r(n_, b_, detail::common_field(f_, c.field()));
    for (const auto& [e, x] : t_) r.add(e, x * c);
    return r;
  }

  std::string to_string() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << '(' << it->second.to_string() << ')';
      for (std::size_t i = 0; i < n_; ++i) {
        if (!it->first[i]) continue;
        os << "*X" << (n_ > 1 ? std::to_string(i + 1) : "");
        if (it->first[i] > 1) os << '^' << it->first[i];
      }
    }
    return os.str();
  }

 private:
  std::size_t n_;
  GroupBasis b_;
  FieldDesc f_;
  std::map<Exps, Series> t_;
};

namespace detail {
// binom(n, k) mod p by Pascal's rule, for 0 <= k <= n <= nmax.
inline std::vector<std::vector<fp::U>> pascal_mod(std::uint32_t nmax, fp::U p) {
  std::vector<std::vector<fp::U>> c(nmax + 1);
  for (std::uint32_t n = 0; n <= nmax; ++n) {
    c[n].assign(n + 1, 0);
    c[n][0] = c[n][n] = 1 % p;
    for (std::uint32_t k = 1; k < n; ++k) c[n][k] = fp::addm(c[n - 1][k - 1], c[n - 1][k], p);
  }
  return c;
}
}  // namespace detail

// f_i: sum over terms of binom(e_var, i) c X^(e - i*unit(var)).
inline MultiPoly formal_derivative(const MultiPoly& f, std::size_t var, std::uint32_t i) {
  if (var >= f.nvars()) fail(ErrorKind::precondition, "variable index out of range");
  if (i == 0) return f;
  auto binom = detail::pascal_mod(f.degree_in(var), f.field().p());
  MultiPoly r(f.nvars(), f.basis(), f.field());
  for (const auto& [e, c] : f.terms()) {
    if (e[var] < i) continue;
    fp::U b = binom[e[var]][i];
    if (b == 0) continue;
    Exps k(e);
    k[var] -= i;
    r.add(k, c.scaled(FieldElem::from_int(f.field(), static_cast<long long>(b))));
  }
  return r;
}

// Lexicographically largest exponent with a stored coefficient, and that coefficient.
inline std::pair<Exps, Series> crucial_exponent(const MultiPoly& f) {
  if (f.is_zero()) fail(ErrorKind::zero_polynomial, "crucial exponent of the zero polynomial");
  const auto& last = *f.terms().rbegin();
  return {last.first, last.second};
}

inline bool c_inputs_exact(const MultiPoly& f) {
  for (const auto& [e, c] : f.terms())
    if (!c.is_exact()) return false;
  return true;
}

namespace detail {
inline Series eval_impl(const MultiPoly& f, const std::vector<Series>& y, const Value& pi, bool check);
}

// f(y) known to precision pi. Intermediate products are truncated at
// max(pi, 0) shifted down by the most negative value the other factors can have.
inline Series eval_at_series(const MultiPoly& f, const std::vector<Series>& y, const Value& pi) {
  return detail::eval_impl(f, y, pi, true);
}

// Whatever precision the inputs allow, at most pi.
inline Series eval_best_effort(const MultiPoly& f, const std::vector<Series>& y, const Value& pi = Value::inf()) {
  return detail::eval_impl(f, y, pi, false);
}

inline Series detail::eval_impl(const MultiPoly& f, const std::vector<Series>& y, const Value& pi, bool check) {
  if (y.size() != f.nvars()) fail(ErrorKind::precondition, "wrong number of evaluation points");
  const GroupBasis& b = f.basis();
  GroupElement zero(b);
  auto neg_part = [&](const Value& v) { return v.is_inf() || v.finite().sign() >= 0 ? zero : v.finite(); };

  GroupElement slack = zero;
  Value min_c = Value::inf();
  for (const auto& [e, c] : f.terms()) min_c = vmin(min_c, c.value_lower_bound());
  slack += neg_part(min_c);
  for (std::size_t j = 0; j < y.size(); ++j)
    slack += neg_part(y[j].value_lower_bound()) * Rational(f.degree_in(j));
  // T >= 0 keeps every truncated factor at value >= its assumed lower bound.
  Value T = pi.is_inf() ? pi : Value(vmax(pi, Value(zero)).finite() - slack);

  std::vector<std::vector<Series>> pw(y.size());
  auto power = [&](std::size_t j, std::uint32_t e) -> const Series& {
    auto& t = pw[j];
    if (t.empty()) t.push_back(Series::constant(b, FieldElem::one(f.field())));
    while (t.size() <= e) t.push_back((t.back() * y[j]).truncate(T));
    return t[e];
  };

  Series acc = Series::zero(b, f.field());
  for (const auto& [e, c] : f.terms()) {
    Series m = c.truncate(T);
    for (std::size_t j = 0; j < e.size(); ++j)
      if (e[j]) m = (m * power(j, e[j])).truncate(T);
    acc = acc + m;
  }
  acc = acc.truncate(pi);
  if (check && acc.precision() < pi) {
    // Required precision of y_j: pi - (e_j - 1) v(y_j) - v(c) - sum_{l != j} e_l v(y_l), maximized.
    std::ostringstream os;
    os << "evaluation reaches only " << acc.precision().to_string() << " < " << pi.to_string()
       << "; required input precisions:";
    for (std::size_t j = 0; j < y.size(); ++j) {
      std::optional<Value> need;
      for (const auto& [e, c] : f.terms()) {
        if (!e[j]) continue;
        Value lowc = c.value_lower_bound();
        if (lowc.is_inf()) continue;
        GroupElement s = lowc.finite();
        bool ok = true;
        for (std::size_t l = 0; l < y.size(); ++l) {
          Value vl = y[l].value_lower_bound();
          Rational k(l == j ? e[l] - 1 : e[l]);
          if (k == 0) continue;
          if (vl.is_inf()) { ok = false; break; }
          s += vl.finite() * k;
        }
        if (!ok) continue;
        Value r = pi.is_inf() ? pi : Value(pi.finite() - s);
        need = need ? vmax(*need, r) : r;
      }
      os << " y" << (j + 1) << ">=" << (need ? need->to_string() : "-") << " (has "
         << y[j].precision().to_string() << ")";
    }
    if (!c_inputs_exact(f)) os << "; some coefficients are inexact";
    fail(ErrorKind::insufficient_precision, os.str());
  }
  return acc;
}

// Taylor identity f(X) = sum_i f_i(c) (X - c)^i, with the derivative table given.
inline bool taylor_check_with(const MultiPoly& f, const Series& c, const std::vector<MultiPoly>& derivs) {
  if (f.nvars() != 1) fail(ErrorKind::precondition, "taylor_check needs a univariate polynomial");
  const GroupBasis& b = f.basis();
  MultiPoly lin(1, b, f.field());
  lin.add({1}, Series::constant(b, FieldElem::one(f.field())));
  lin.add({0}, -c);
  MultiPoly pw(1, b, f.field());
  pw.add({0}, Series::constant(b, FieldElem::one(f.field())));
  MultiPoly sum(1, b, f.field());
  for (const auto& d : derivs) {
    Series v = eval_best_effort(d, {c});
    sum = sum + pw.scaled(v);
    pw = pw * lin;
  }
  std::uint32_t n = std::max(f.degree(), sum.is_zero() ? 0u : sum.degree());
  for (std::uint32_t j = 0; j <= n; ++j) {
    Series a = f.coeff(j), s = sum.coeff(j);
    if (a.is_exact() && s.is_exact()) {
      if (!(a == s)) return false;
    } else if (!agree(a, s)) {
      return false;
    }
  }
  return true;
}

inline bool taylor_check(const MultiPoly& f, const Series& c) {
  std::vector<MultiPoly> d;
  for (std::uint32_t i = 0; i <= f.degree(); ++i) d.push_back(formal_derivative(f, 0, i));
  return taylor_check_with(f, c, d);
}

}  // namespace valfield
