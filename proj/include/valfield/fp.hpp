// Arithmetic over F_p: scalars, dense univariate polynomials, and sparse
// multivariate polynomials with a graded-lex canonical order.
#pragma once

#include <valfield/base.hpp>

#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace valfield::fp {

using U = std::uint64_t;

inline U mulm(U a, U b, U p) { return static_cast<U>(static_cast<unsigned __int128>(a) * b % p); }
inline U addm(U a, U b, U p) { U s = a + b; return s >= p ? s - p : s; }
inline U subm(U a, U b, U p) { return a >= b ? a - b : a + p - b; }
inline U negm(U a, U p) { return a == 0 ? 0 : p - a; }

inline U powm(U a, U e, U p) {
  U r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}

inline U invm(U a, U p) {
  if (a % p == 0) fail(ErrorKind::division_by_zero, "inverse of 0 in F_" + std::to_string(p));
  return powm(a, p - 2, p);
}

inline U reduce(long long v, U p) {
  long long m = v % static_cast<long long>(p);
  return static_cast<U>(m < 0 ? m + static_cast<long long>(p) : m);
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials, index = degree, always trimmed.
using Poly = std::vector<U>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, U p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = addm(r[i], b[i], p);
  trim(r);
  return r;
}
inline Poly sub(const Poly& a, const Poly& b, U p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = subm(r[i], b[i], p);
  trim(r);
  return r;
}
inline Poly scale(const Poly& a, U c, U p) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mulm(a[i], c, p);
  trim(r);
  return r;
}
inline Poly mul(const Poly& a, const Poly& b, U p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = addm(r[i + j], mulm(a[i], b[j], p), p);
  }
  trim(r);
  return r;
}

inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b, U p) {
  if (b.empty()) fail(ErrorKind::division_by_zero, "polynomial division by 0");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  Poly q(a.size() - b.size() + 1, 0);
  U li = invm(b.back(), p);
  for (int i = deg(a); i >= deg(b); --i) {
    U c = mulm(a[i], li, p);
    if (c == 0) continue;
    int s = i - deg(b);
    q[s] = c;
    for (int j = 0; j <= deg(b); ++j) a[s + j] = subm(a[s + j], mulm(c, b[j], p), p);
  }
  trim(q);
  trim(a);
  return {q, a};
}
inline Poly mod(const Poly& a, const Poly& m, U p) { return divmod(a, m, p).second; }

inline Poly monic(const Poly& a, U p) {
  if (a.empty()) return a;
  return scale(a, invm(a.back(), p), p);
}

inline Poly gcd(Poly a, Poly b, U p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& m, U p) { return mod(mul(a, b, p), m, p); }

inline Poly powmod(Poly base, Integer e, const Poly& m, U p) {
  Poly r{1};
  r = mod(r, m, p);
  base = mod(base, m, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mulmod(r, base, m, p);
    base = mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

// Inverse of a modulo m (m irreducible, a != 0 mod m).
inline Poly invmod(const Poly& a, const Poly& m, U p) {
  Poly r0 = m, r1 = mod(a, m, p);
  if (r1.empty()) fail(ErrorKind::division_by_zero, "inverse of 0 in finite field");
  Poly s0{}, s1{1};
  while (!r1.empty()) {
    auto [q, r] = divmod(r0, r1, p);
    Poly s = sub(s0, mul(q, s1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.size() != 1) fail(ErrorKind::precondition, "modulus is not irreducible");
  return mod(scale(s0, invm(r0[0], p), p), m, p);
}

// Ben-Or irreducibility test for a monic polynomial.
inline bool irreducible(const Poly& f, U p) {
  int n = deg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  Poly x{0, 1};
  Poly h = x;
  for (int i = 1; 2 * i <= n; ++i) {
    h = powmod(h, Integer(static_cast<unsigned long>(p)), f, p);
    Poly g = gcd(sub(h, x, p), f, p);
    if (deg(g) > 0) return false;
  }
  return true;
}

// Monic irreducible polynomial of degree n whose coefficient vector
// (c_{n-1}, ..., c_0) is lexicographically smallest. Cached.
inline const Poly& first_irreducible(U p, unsigned n) {
  static std::mutex mu;
  static std::map<std::pair<U, unsigned>, Poly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, n});
  if (it != cache.end()) return it->second;
  Integer total = ipow(p, n);
  for (Integer c = 0; c < total; ++c) {
    Poly f(n + 1, 0);
    f[n] = 1;
    Integer rest = c;
    for (unsigned i = 0; i < n; ++i) {
      Integer d = rest % static_cast<unsigned long>(p);
      f[i] = d.get_ui();
      rest /= static_cast<unsigned long>(p);
    }
    if (irreducible(f, p)) return cache.emplace(std::make_pair(p, n), f).first->second;
  }
  fail(ErrorKind::precondition, "no irreducible polynomial found");
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over F_p.

using Mono = std::vector<std::uint32_t>;

inline std::uint64_t total_degree(const Mono& m) {
  std::uint64_t s = 0;
  for (auto e : m) s += e;
  return s;
}

// Graded lex; variable 0 is the most significant.
struct GrLexLess {
  bool operator()(const Mono& a, const Mono& b) const {
    auto da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

class MPoly {
 public:
  using Terms = std::map<Mono, U, GrLexLess>;

  MPoly() = default;
  MPoly(std::size_t nvars, U p) : n_(nvars), p_(p) {}

  static MPoly constant(std::size_t nvars, U p, U c) {
    MPoly r(nvars, p);
    if (c % p) r.t_[Mono(nvars, 0)] = c % p;
    return r;
  }
  static MPoly var(std::size_t nvars, U p, std::size_t i, std::uint32_t e = 1) {
    MPoly r(nvars, p);
    Mono m(nvars, 0);
    m.at(i) = e;
    r.t_[m] = 1;
    return r;
  }
  static MPoly monomial(std::size_t nvars, U p, Mono m, U c) {
    MPoly r(nvars, p);
    if (c % p) r.t_[std::move(m)] = c % p;
    return r;
  }

  std::size_t nvars() const { return n_; }
  U p() const { return p_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && total_degree(t_.begin()->first) == 0); }
  U constant_value() const { return t_.empty() ? 0 : t_.begin()->second; }
  bool is_one() const { return t_.size() == 1 && total_degree(t_.begin()->first) == 0 && t_.begin()->second == 1; }
  const Mono& leading_mono() const { return t_.rbegin()->first; }
  U leading_coeff() const { return t_.rbegin()->second; }

  friend bool operator==(const MPoly& a, const MPoly& b) { return a.t_ == b.t_; }

  MPoly operator-() const {
    MPoly r(*this);
    for (auto& [m, c] : r.t_) c = negm(c, p_);
    return r;
  }
  friend MPoly operator+(const MPoly& a, const MPoly& b) {
    MPoly r(a);
    for (const auto& [m, c] : b.t_) r.add_term(m, c);
    return r;
  }
  friend MPoly operator-(const MPoly& a, const MPoly& b) {
    MPoly r(a);
    for (const auto& [m, c] : b.t_) r.add_term(m, negm(c, a.p_));
    return r;
  }
  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly r(a.n_, a.p_);
    for (const auto& [ma, ca] : a.t_)
      for (const auto& [mb, cb] : b.t_) {
        Mono m(ma);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
        r.add_term(m, mulm(ca, cb, a.p_));
      }
    return r;
  }
  MPoly scaled(U c) const {
    MPoly r(n_, p_);
    c %= p_;
    if (c == 0) return r;
    for (const auto& [m, x] : t_) r.t_[m] = mulm(x, c, p_);
    return r;
  }
  MPoly shifted(const Mono& by) const {
    MPoly r(n_, p_);
    for (const auto& [m, x] : t_) {
      Mono k(m);
      for (std::size_t i = 0; i < k.size(); ++i) k[i] += by[i];
      r.t_[k] = x;
    }
    return r;
  }
  MPoly make_monic() const { return t_.empty() ? *this : scaled(invm(leading_coeff(), p_)); }

  // Exponents multiplied by f (Frobenius when f is a power of p).
  MPoly exponents_times(std::uint64_t f) const {
    MPoly r(n_, p_);
    for (const auto& [m, x] : t_) {
      Mono k(m);
      for (auto& e : k) {
        std::uint64_t ne = static_cast<std::uint64_t>(e) * f;
        if (ne > 0xffffffffULL) fail(ErrorKind::overflow, "monomial exponent overflow");
        e = static_cast<std::uint32_t>(ne);
      }
      r.t_[k] = x;
    }
    return r;
  }
  // Exponents divided by f when all are divisible; else empty.
  std::optional<MPoly> exponents_div(std::uint64_t f) const {
    MPoly r(n_, p_);
    for (const auto& [m, x] : t_) {
      Mono k(m);
      for (auto& e : k) {
        if (e % f) return std::nullopt;
        e = static_cast<std::uint32_t>(e / f);
      }
      r.t_[k] = x;
    }
    return r;
  }

  std::uint32_t deg_in(std::size_t v) const {
    std::uint32_t d = 0;
    for (const auto& [m, x] : t_) d = std::max(d, m[v]);
    return d;
  }
  bool involves(std::size_t v) const {
    for (const auto& [m, x] : t_)
      if (m[v]) return true;
    return false;
  }
  // Coefficient of X_v^d, as a polynomial free of X_v.
  MPoly coeff_in(std::size_t v, std::uint32_t d) const {
    MPoly r(n_, p_);
    for (const auto& [m, x] : t_)
      if (m[v] == d) {
        Mono k(m);
        k[v] = 0;
        r.t_[k] = x;
      }
    return r;
  }

  // Exact division; fails if b does not divide *this.
  MPoly exact_div(const MPoly& b) const {
    if (b.is_zero()) fail(ErrorKind::division_by_zero, "polynomial division by 0");
    MPoly q(n_, p_), r(*this);
    const Mono& lb = b.leading_mono();
    U lbi = invm(b.leading_coeff(), p_);
    while (!r.is_zero()) {
      Mono lr = r.leading_mono();
      Mono d(lr);
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] < lb[i]) fail(ErrorKind::precondition, "inexact multivariate division");
        d[i] -= lb[i];
      }
      U c = mulm(r.leading_coeff(), lbi, p_);
      q.add_term(d, c);
      U nc = negm(c, p_);
      Mono k(d.size());
      for (const auto& [m, x] : b.t_) {
        for (std::size_t i = 0; i < k.size(); ++i) k[i] = m[i] + d[i];
        r.add_term(k, mulm(x, nc, p_));
      }
    }
    return q;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
      if (!first) os << '+';
      first = false;
      const auto& [m, c] = *it;
      bool unit = total_degree(m) == 0;
      if (unit || c != 1) os << c;
      bool need_star = !unit && c != 1;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        if (need_star) os << '*';
        need_star = true;
        os << names[i];
        if (m[i] > 1) os << '^' << m[i];
      }
    }
    return os.str();
  }

  void add_term(const Mono& m, U c) {
    c %= p_;
    if (c == 0) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
      t_.emplace(m, c);
      return;
    }
    it->second = addm(it->second, c, p_);
    if (it->second == 0) t_.erase(it);
  }

 private:
  std::size_t n_ = 0;
  U p_ = 2;
  Terms t_;
};

namespace detail {

inline MPoly gcd_rec(const MPoly& a, const MPoly& b);

// gcd of a monomial with an arbitrary polynomial.
inline MPoly gcd_with_monomial(const Mono& m, const MPoly& b) {
  Mono g(m);
  for (const auto& [k, c] : b.terms())
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::min(g[i], k[i]);
  return MPoly::monomial(b.nvars(), b.p(), g, 1);
}

inline MPoly content_in(const MPoly& a, std::size_t v) {
  MPoly g(a.nvars(), a.p());
  for (std::uint32_t d = 0; d <= a.deg_in(v); ++d) {
    MPoly c = a.coeff_in(v, d);
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.make_monic() : gcd_rec(g, c);
    if (g.is_one()) break;
  }
  return g;
}

// Pseudo-remainder of a by b in variable v (deg_v b >= 1).
inline MPoly prem(MPoly a, const MPoly& b, std::size_t v) {
  std::uint32_t db = b.deg_in(v);
  MPoly lb = b.coeff_in(v, db);
  while (!a.is_zero() && a.deg_in(v) >= db) {
    std::uint32_t da = a.deg_in(v);
    MPoly la = a.coeff_in(v, da);
    Mono shift(a.nvars(), 0);
    shift[v] = da - db;
    a = lb * a - (la * b).shifted(shift);
  }
  return a;
}

// Arithmetic in F_p[z]/(m) for specializations at extension-field points.
struct ExtField {
  U p;
  Poly m;
  Poly mul(const Poly& a, const Poly& b) const { return mulmod(a, b, m, p); }
  Poly inv(const Poly& a) const { return invmod(a, m, p); }
};

using ExtPoly = std::vector<Poly>;  // coefficients in ExtField, index = degree

inline void trim_ext(ExtPoly& a) {
  while (!a.empty() && a.back().empty()) a.pop_back();
}

inline ExtPoly ext_mod(ExtPoly a, const ExtPoly& b, const ExtField& f) {
  const Poly li = f.inv(b.back());
  const int db = static_cast<int>(b.size()) - 1;
  for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
    if (a[i].empty()) continue;
    Poly c = f.mul(a[i], li);
    int s = i - db;
    for (int j = 0; j <= db; ++j) a[s + j] = sub(a[s + j], f.mul(c, b[j]), f.p);
  }
  trim_ext(a);
  return a;
}

inline int ext_gcd_degree(ExtPoly a, ExtPoly b, const ExtField& f) {
  trim_ext(a);
  trim_ext(b);
  while (!b.empty()) {
    ExtPoly r = ext_mod(a, b, f);
    a = std::move(b);
    b = std::move(r);
  }
  return static_cast<int>(a.size()) - 1;
}

// Univariate image in variable v after substituting pt[j] for the others.
inline ExtPoly image_in(const MPoly& a, std::size_t v, const std::vector<Poly>& pt, const ExtField& f) {
  ExtPoly r;
  std::vector<std::vector<Poly>> pw(pt.size());
  auto power = [&](std::size_t j, std::uint32_t e) -> const Poly& {
    auto& t = pw[j];
    if (t.empty()) t.push_back(Poly{1});
    while (t.size() <= e) t.push_back(f.mul(t.back(), pt[j]));
    return t[e];
  };
  for (const auto& [m, c] : a.terms()) {
    Poly x{c};
    for (std::size_t j = 0; j < m.size(); ++j)
      if (j != v && m[j]) x = f.mul(x, power(j, m[j]));
    if (r.size() <= m[v]) r.resize(m[v] + 1);
    r[m[v]] = add(r[m[v]], x, f.p);
  }
  trim_ext(r);
  return r;
}

// True only when a and b are provably coprime: for every variable v some
// specialization of the other variables (in an extension of F_p) keeps both
// v-degrees and gives coprime univariate images, so no common factor can
// involve v.
inline bool certify_coprime(const MPoly& a, const MPoly& b) {
  const std::size_t n = a.nvars();
  const U p = a.p();
  unsigned k = 1;
  while (ipow(p, k) < 1000) ++k;
  ExtField f{p, first_irreducible(p, k)};
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  auto next = [&] {
    seed ^= seed << 13;
    seed ^= seed >> 7;
    seed ^= seed << 17;
    return seed;
  };
  for (std::size_t v = 0; v < n; ++v) {
    std::uint32_t da = a.deg_in(v), db = b.deg_in(v);
    if (da == 0 || db == 0) continue;
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      std::vector<Poly> pt(n);
      for (auto& x : pt) {
        x.resize(k);
        for (auto& c : x) c = next() % p;
        trim(x);
      }
      ExtPoly ia = image_in(a, v, pt, f), ib = image_in(b, v, pt, f);
      if (static_cast<int>(ia.size()) - 1 != static_cast<int>(da) ||
          static_cast<int>(ib.size()) - 1 != static_cast<int>(db))
        continue;
      ok = ext_gcd_degree(ia, ib, f) == 0;
    }
    if (!ok) return false;
  }
  return true;
}

inline MPoly gcd_rec(const MPoly& a, const MPoly& b) {
  if (a.is_zero()) return b.make_monic();

  if (b.is_zero()) return a.make_monic();
  if (a.is_constant() || b.is_constant()) return MPoly::constant(a.nvars(), a.p(), 1);
  if (a.terms().size() == 1) return gcd_with_monomial(a.terms().begin()->first, b);
  if (b.terms().size() == 1) return gcd_with_monomial(b.terms().begin()->first, a);
  std::size_t v = 0;
  while (!a.involves(v) && !b.involves(v)) ++v;
  if (!a.involves(v)) return gcd_rec(a, content_in(b, v));
  if (!b.involves(v)) return gcd_rec(content_in(a, v), b);
  MPoly ca = content_in(a, v), cb = content_in(b, v);
  MPoly c = gcd_rec(ca, cb);
  MPoly x = a.exact_div(ca), y = b.exact_div(cb);
  if (x.deg_in(v) < y.deg_in(v)) std::swap(x, y);
  while (!y.is_zero() && y.involves(v)) {
    MPoly r = prem(x, y, v);
    x = std::move(y);
    if (r.is_zero()) {
      y = MPoly(a.nvars(), a.p());
      break;
    }
    y = r.exact_div(content_in(r, v));
  }
  // y nonzero and free of v means the primitive parts are coprime in v.
  MPoly g = y.is_zero() ? x.exact_div(content_in(x, v)) : MPoly::constant(a.nvars(), a.p(), 1);
  return (c * g).make_monic();
}

}  // namespace detail

inline MPoly gcd(const MPoly& a, const MPoly& b) {
  if (!a.is_constant() && !b.is_constant() && a.terms().size() > 1 && b.terms().size() > 1 &&
      detail::certify_coprime(a, b))
    return MPoly::constant(a.nvars(), a.p(), 1);
  return detail::gcd_rec(a, b);
}

}  // namespace valfield::fp
