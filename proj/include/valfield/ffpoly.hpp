// Univariate polynomials over a coefficient field, with root finding over
// finite fields (distinct-degree split, then Cantor-Zassenhaus).
#pragma once

#include <valfield/field.hpp>

#include <map>
#include <mutex>
#include <random>

namespace valfield::ff {

using FPoly = std::vector<FieldElem>;  // low degree first, no trailing zeros

inline void trim(FPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}
inline int deg(const FPoly& a) { return static_cast<int>(a.size()) - 1; }

inline FPoly add(const FPoly& a, const FPoly& b) {
  FPoly r = a.size() >= b.size() ? a : b;
  const FPoly& s = a.size() >= b.size() ? b : a;
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = r[i] + s[i];
  trim(r);
  return r;
}
inline FPoly neg(FPoly a) {
  for (auto& x : a) x = -x;
  return a;
}
inline FPoly sub(const FPoly& a, const FPoly& b) { return add(a, neg(b)); }

inline FPoly mul(const FPoly& a, const FPoly& b) {
  if (a.empty() || b.empty()) return {};
  FPoly r(a.size() + b.size() - 1, FieldElem::zero(a[0].desc()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

inline std::pair<FPoly, FPoly> divmod(FPoly a, const FPoly& b) {
  if (b.empty()) fail(ErrorKind::division_by_zero, "polynomial division by zero");
  if (a.size() < b.size()) return {{}, a};
  FieldElem il = b.back().inv();
  FPoly q(a.size() - b.size() + 1, FieldElem::zero(b[0].desc()));
  for (int i = deg(a); i >= deg(b); --i) {
    if (a[i].is_zero()) continue;
    FieldElem c = a[i] * il;
    q[i - deg(b)] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[i - deg(b) + j] -= c * b[j];
  }
  trim(q);
  trim(a);
  return {q, a};
}
inline FPoly mod(const FPoly& a, const FPoly& m) { return divmod(a, m).second; }

inline FPoly monic(FPoly a) {
  if (a.empty()) return a;
  FieldElem il = a.back().inv();
  for (auto& x : a) x = x * il;
  return a;
}

inline FPoly gcd(FPoly a, FPoly b) {
  while (!b.empty()) {
    FPoly r = mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline FPoly mulmod(const FPoly& a, const FPoly& b, const FPoly& m) { return mod(mul(a, b), m); }

inline FPoly powmod(FPoly base, Integer e, const FPoly& m) {
  const FieldDesc& d = m[0].desc();
  FPoly r{FieldElem::one(d)};
  r = mod(r, m);
  base = mod(base, m);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mulmod(r, base, m);
    e >>= 1;
    if (e > 0) base = mulmod(base, base, m);
  }
  return r;
}

inline FPoly derivative(const FPoly& a) {
  FPoly r;
  for (std::size_t i = 1; i < a.size(); ++i)
    r.push_back(a[i] * FieldElem::from_int(a[i].desc(), static_cast<long long>(i % a[i].p())));
  trim(r);
  return r;
}

inline FieldElem eval(const FPoly& a, const FieldElem& x) {
  FieldElem r = FieldElem::zero(x.desc());
  for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
  return r;
}

inline FPoly x_poly(const FieldDesc& d) { return {FieldElem::zero(d), FieldElem::one(d)}; }

inline bool is_finite_kind(const FieldDesc& d) { return d.kind() == FieldKind::prime || d.kind() == FieldKind::finite; }

inline Integer field_size(const FieldDesc& d) {
  if (!is_finite_kind(d)) fail(ErrorKind::precondition, "field " + d.to_string() + " is infinite");
  return pow_int(Integer(static_cast<unsigned long>(d.p())), d.degree());
}

inline FieldElem random_elem(const FieldDesc& d, std::mt19937_64& g) {
  if (d.kind() == FieldKind::prime) return FieldElem::from_int(d, static_cast<long long>(g() % d.p()));
  fp::Poly c;
  for (unsigned i = 0; i < d.degree(); ++i) c.push_back(g() % d.p());
  return FieldElem::from_coeffs(d, c);
}

// Degrees of the irreducible factors of a squarefree f, with multiplicity,
// via gcd(f, X^(q^d) - X).
inline std::vector<int> factor_degrees(FPoly f) {
  f = monic(f);
  std::vector<int> out;
  if (deg(f) <= 0) return out;
  const FieldDesc& d = f[0].desc();
  Integer q = field_size(d);
  FPoly xq = x_poly(d);
  for (int k = 1; deg(f) >= 2 * k; ++k) {
    xq = powmod(xq, q, f);
    FPoly g = gcd(f, sub(xq, x_poly(d)));
    if (deg(g) > 0) {
      for (int i = 0; i < deg(g) / k; ++i) out.push_back(k);
      f = divmod(f, g).first;
      xq = mod(xq, f);
    }
  }
  if (deg(f) > 0) out.push_back(deg(f));
  return out;
}

namespace detail {
// Splits a product of distinct linear factors.
inline void split_linear(const FPoly& g, std::mt19937_64& rng, std::vector<FieldElem>& out) {
  if (deg(g) <= 0) return;
  if (deg(g) == 1) {
    out.push_back(-(g[0] / g[1]));
    return;
  }
  const FieldDesc& d = g[0].desc();
  Integer q = field_size(d);
  for (int attempt = 0; attempt < 200; ++attempt) {
    FieldElem a = random_elem(d, rng);
    FPoly h;
    if (d.p() == 2) {
      // Trace of aX from F_q down to F_2.
      FPoly ax{FieldElem::zero(d), a}, s = mod(ax, g), term = s;
      unsigned n = d.degree();
      for (unsigned i = 1; i < n; ++i) {
        term = mulmod(term, term, g);
        s = add(s, term);
      }
      h = gcd(g, s);
    } else {
      FPoly base{a, FieldElem::one(d)};
      FPoly w = powmod(base, (q - 1) / 2, g);
      h = gcd(g, sub(w, FPoly{FieldElem::one(d)}));
    }
    if (deg(h) > 0 && deg(h) < deg(g)) {
      split_linear(h, rng, out);
      split_linear(divmod(g, h).first, rng, out);
      return;
    }
  }
  fail(ErrorKind::search_exhausted, "equal-degree splitting did not separate the roots");
}

inline bool elem_less(const FieldElem& a, const FieldElem& b) {
  if (a.desc().kind() == FieldKind::prime) return *a.prime_value() < *b.prime_value();
  const auto &x = a.coeffs(), &y = b.coeffs();
  if (x.size() != y.size()) return x.size() < y.size();
  return std::lexicographical_compare(x.rbegin(), x.rend(), y.rbegin(), y.rend());
}
}  // namespace detail

// Distinct roots of f in its (finite) coefficient field, in a canonical order.
inline std::vector<FieldElem> roots(const FPoly& f0) {
  FPoly f = f0;
  trim(f);
  if (f.empty()) fail(ErrorKind::zero_polynomial, "roots of the zero polynomial");
  std::vector<FieldElem> out;
  if (deg(f) == 0) return out;
  const FieldDesc& d = f[0].desc();
  FPoly xq = powmod(x_poly(d), field_size(d), f);
  FPoly g = gcd(f, sub(xq, x_poly(d)));
  std::mt19937_64 rng(0x5eed);
  detail::split_linear(g, rng, out);
  std::sort(out.begin(), out.end(), detail::elem_less);
  return out;
}

// Multiplicity of r as a root of f.
inline unsigned multiplicity(FPoly f, const FieldElem& r) {
  FPoly lin{-r, FieldElem::one(r.desc())};
  unsigned m = 0;
  for (;;) {
    auto [q, rem] = divmod(f, lin);
    if (!rem.empty() || f.empty()) return m;
    ++m;
    f = std::move(q);
  }
}

inline FPoly embed(const FPoly& a, const FieldDesc& to) {
  FPoly r;
  for (const auto& x : a) r.push_back(FieldElem::embed(x, to));
  return r;
}

}  // namespace valfield::ff

namespace valfield::detail {

// A root of the modulus of F_{p^n} inside F_{p^N}; fixes the embedding.
inline FieldElem finite_generator_image(const FieldDesc& from, const FieldDesc& to) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, unsigned, unsigned>, fp::Poly> cache;
  auto key = std::make_tuple(from.p(), from.degree(), to.degree());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return FieldElem::from_coeffs(to, it->second);
  }
  ff::FPoly m;
  for (fp::U c : from.modulus()) m.push_back(FieldElem::from_int(to, static_cast<long long>(c)));
  auto rs = ff::roots(m);
  if (rs.empty()) fail(ErrorKind::field_mismatch, "no embedding of " + from.to_string() + " into " + to.to_string());
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = rs.front().coeffs();
  return rs.front();
}

}  // namespace valfield::detail
