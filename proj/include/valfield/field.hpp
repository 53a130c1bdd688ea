// Coefficient fields: F_p, F_{p^n}, F_p(vars), and formal p-power roots.
#pragma once

#include <valfield/fp.hpp>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace valfield {

enum class FieldKind { prime, finite, ratfunc, perf };

class FieldDesc {
 public:
  static FieldDesc prime(std::uint64_t p) {
    check_p(p);
    return FieldDesc(std::make_shared<const Data>(Data{FieldKind::prime, p, 1, {}, {}, nullptr, 0}));
  }

  static FieldDesc finite(std::uint64_t p, unsigned n) {
    check_p(p);
    if (n == 0) fail(ErrorKind::config, "finite field degree must be >= 1");
    return FieldDesc(
        std::make_shared<const Data>(Data{FieldKind::finite, p, n, fp::first_irreducible(p, n), {}, nullptr, 0}));
  }

  static FieldDesc ratfunc(std::uint64_t p, std::vector<std::string> vars) {
    check_p(p);
    if (vars.empty()) fail(ErrorKind::config, "rational function field needs at least one variable");
    return FieldDesc(std::make_shared<const Data>(Data{FieldKind::ratfunc, p, 1, {}, std::move(vars), nullptr, 0}));
  }

  static FieldDesc perf_closure(const FieldDesc& inner, unsigned root_cap = 8) {
    if (inner.kind() != FieldKind::prime && inner.kind() != FieldKind::ratfunc)
      fail(ErrorKind::config, "perfect closure wraps only prime or rational function fields");
    return FieldDesc(std::make_shared<const Data>(
        Data{FieldKind::perf, inner.p(), 1, {}, inner.vars(), inner.d_, root_cap}));
  }

  FieldKind kind() const { return d_->kind; }
  std::uint64_t p() const { return d_->p; }
  unsigned degree() const { return d_->n; }
  const fp::Poly& modulus() const { return d_->modulus; }
  const std::vector<std::string>& vars() const { return d_->vars; }
  FieldDesc inner() const {
    if (!d_->inner) fail(ErrorKind::precondition, "field has no inner field");
    return FieldDesc(d_->inner);
  }
  unsigned root_cap() const { return d_->root_cap; }
  bool is_perfect() const { return kind() != FieldKind::ratfunc; }
  // Variables of the underlying rational function field, if any.
  std::size_t nvars() const { return d_->vars.size(); }

  friend bool operator==(const FieldDesc& a, const FieldDesc& b) {
    if (a.d_ == b.d_) return true;
    const Data &x = *a.d_, &y = *b.d_;
    if (x.kind != y.kind || x.p != y.p || x.n != y.n || x.vars != y.vars || x.root_cap != y.root_cap) return false;
    if (x.kind == FieldKind::perf) return FieldDesc(x.inner) == FieldDesc(y.inner);
    return true;
  }

  std::string to_string() const {
    switch (kind()) {
      case FieldKind::prime: return "F" + std::to_string(p());
      case FieldKind::finite: return "F" + std::to_string(p()) + "^" + std::to_string(degree());
      case FieldKind::ratfunc: {
        std::string s = "F" + std::to_string(p()) + "(";
        for (std::size_t i = 0; i < vars().size(); ++i) s += (i ? "," : "") + vars()[i];
        return s + ")";
      }
      case FieldKind::perf: return "perf(" + inner().to_string() + ")";
    }
    return "?";
  }

 private:
  struct Data {
    FieldKind kind;
    std::uint64_t p;
    unsigned n;
    fp::Poly modulus;
    std::vector<std::string> vars;
    std::shared_ptr<const Data> inner;
    unsigned root_cap;
  };
  static void check_p(std::uint64_t p) {
    if (!is_prime(p) || p >= (1ULL << 31)) fail(ErrorKind::config, "characteristic must be a prime below 2^31");
  }
  explicit FieldDesc(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

class FieldElem;

namespace detail {
inline FieldElem finite_generator_image(const FieldDesc& from, const FieldDesc& to);

struct RatPayload {
  fp::MPoly num, den;
};
struct PerfPayload {
  std::shared_ptr<const FieldElem> x;  // element of the inner field
  unsigned k = 0;                       // represents x^(1/p^k)
};
}  // namespace detail

class FieldElem {
 public:
  static FieldElem zero(const FieldDesc& d) { return from_int(d, 0); }
  static FieldElem one(const FieldDesc& d) { return from_int(d, 1); }

  static FieldElem from_int(const FieldDesc& d, long long v) {
    fp::U c = fp::reduce(v, d.p());
    switch (d.kind()) {
      case FieldKind::prime: return FieldElem(d, c);
      case FieldKind::finite: {
        fp::Poly a{c};
        fp::trim(a);
        return FieldElem(d, a);
      }
      case FieldKind::ratfunc:
        return FieldElem(d, detail::RatPayload{fp::MPoly::constant(d.nvars(), d.p(), c),
                                               fp::MPoly::constant(d.nvars(), d.p(), 1)});
      case FieldKind::perf: return wrap(d, from_int(d.inner(), v), 0);
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  // Variable i of a rational function field (or of the one inside a perfect closure).
  static FieldElem var(const FieldDesc& d, std::size_t i) {
    if (d.kind() == FieldKind::perf) return wrap(d, var(d.inner(), i), 0);
    if (d.kind() != FieldKind::ratfunc) fail(ErrorKind::precondition, "field has no variables");
    if (i >= d.nvars()) fail(ErrorKind::precondition, "variable index out of range");
    return FieldElem(d, detail::RatPayload{fp::MPoly::var(d.nvars(), d.p(), i),
                                           fp::MPoly::constant(d.nvars(), d.p(), 1)});
  }

  // Residue class of the polynomial with the given coefficients (low degree first).
  static FieldElem from_coeffs(const FieldDesc& d, fp::Poly c) {
    if (d.kind() != FieldKind::finite) fail(ErrorKind::precondition, "from_coeffs needs a finite field");
    for (auto& x : c) x %= d.p();
    fp::trim(c);
    return FieldElem(d, fp::mod(c, d.modulus(), d.p()));
  }
  static FieldElem generator(const FieldDesc& d) { return from_coeffs(d, {0, 1}); }

  // Quotient num/den of polynomials in a rational function field.
  static FieldElem fraction(const FieldDesc& d, fp::MPoly num, fp::MPoly den) {
    if (d.kind() != FieldKind::ratfunc) fail(ErrorKind::precondition, "fraction needs a rational function field");
    return FieldElem(d, normalize(std::move(num), std::move(den)));
  }

  // Image of e in the field `to`: prime -> anything of the same characteristic,
  // F_{p^n} -> F_{p^N} for n | N, ratfunc -> its perfect closure.
  static FieldElem embed(const FieldElem& e, const FieldDesc& to) {
    if (e.desc_ == to) return e;
    if (e.desc_.p() != to.p()) fail(ErrorKind::field_mismatch, "embedding across characteristics");
    if (e.desc_.kind() == FieldKind::prime) return from_int(to, static_cast<long long>(std::get<fp::U>(e.v_)));
    if (to.kind() == FieldKind::perf && e.desc_ == to.inner()) return wrap(to, e, 0);
    if (e.desc_.kind() == FieldKind::finite && to.kind() == FieldKind::finite && to.degree() % e.desc_.degree() == 0) {
      FieldElem g = detail::finite_generator_image(e.desc_, to), r = zero(to), pw = one(to);
      for (fp::U c : e.coeffs()) {
        r += pw * from_int(to, static_cast<long long>(c));
        pw *= g;
      }
      return r;
    }
    if (e.desc_.kind() == FieldKind::perf && e.perf().k == 0 && e.perf().x->desc_.kind() == FieldKind::prime)
      return embed(*e.perf().x, to);
    fail(ErrorKind::field_mismatch, "cannot embed " + e.desc_.to_string() + " into " + to.to_string());
  }

  const FieldDesc& desc() const { return desc_; }
  std::uint64_t p() const { return desc_.p(); }

  bool is_zero() const {
    switch (desc_.kind()) {
      case FieldKind::prime: return std::get<fp::U>(v_) == 0;
      case FieldKind::finite: return std::get<fp::Poly>(v_).empty();
      case FieldKind::ratfunc: return rat().num.is_zero();
      case FieldKind::perf: return perf().x->is_zero();
    }
    return false;
  }
  bool is_one() const { return *this == one(desc_); }

  // Value in F_p when the element lies in the prime field.
  std::optional<fp::U> prime_value() const {
    switch (desc_.kind()) {
      case FieldKind::prime: return std::get<fp::U>(v_);
      case FieldKind::finite: {
        const auto& a = std::get<fp::Poly>(v_);
        if (a.size() > 1) return std::nullopt;
        return a.empty() ? 0 : a[0];
      }
      case FieldKind::ratfunc:
        if (rat().num.is_constant() && rat().den.is_one()) return rat().num.constant_value();
        return std::nullopt;
      case FieldKind::perf:
        if (perf().k) return std::nullopt;
        return perf().x->prime_value();
    }
    return std::nullopt;
  }

  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    if (!(a.desc_ == b.desc_)) {
      if (a.desc_.kind() == FieldKind::prime || b.desc_.kind() == FieldKind::prime) {
        auto x = a.prime_value(), y = b.prime_value();
        return x && y && *x == *y;
      }
      return false;
    }
    switch (a.desc_.kind()) {
      case FieldKind::prime: return std::get<fp::U>(a.v_) == std::get<fp::U>(b.v_);
      case FieldKind::finite: return std::get<fp::Poly>(a.v_) == std::get<fp::Poly>(b.v_);
      case FieldKind::ratfunc: return a.rat().num == b.rat().num && a.rat().den == b.rat().den;
      case FieldKind::perf: return a.perf().k == b.perf().k && *a.perf().x == *b.perf().x;
    }
    return false;
  }

  FieldElem operator-() const {
    switch (desc_.kind()) {
      case FieldKind::prime: return FieldElem(desc_, fp::negm(std::get<fp::U>(v_), p()));
      case FieldKind::finite: return FieldElem(desc_, fp::scale(std::get<fp::Poly>(v_), p() - 1, p()));
      case FieldKind::ratfunc: return FieldElem(desc_, detail::RatPayload{-rat().num, rat().den});
      case FieldKind::perf: return wrap(desc_, -*perf().x, perf().k);
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) { return binary(a, b, Op::add); }
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return binary(a, b, Op::sub); }
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b) { return binary(a, b, Op::mul); }
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inv(); }
  FieldElem& operator+=(const FieldElem& b) { return *this = *this + b; }
  FieldElem& operator-=(const FieldElem& b) { return *this = *this - b; }
  FieldElem& operator*=(const FieldElem& b) { return *this = *this * b; }

  FieldElem inv() const {
    if (is_zero()) fail(ErrorKind::division_by_zero, "inverse of 0 in " + desc_.to_string());
    switch (desc_.kind()) {
      case FieldKind::prime: return FieldElem(desc_, fp::invm(std::get<fp::U>(v_), p()));
      case FieldKind::finite: return FieldElem(desc_, fp::invmod(std::get<fp::Poly>(v_), desc_.modulus(), p()));
      case FieldKind::ratfunc: return FieldElem(desc_, normalize(rat().den, rat().num));
      case FieldKind::perf: return wrap(desc_, perf().x->inv(), perf().k);
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  FieldElem pow(Integer e) const {
    if (e < 0) return inv().pow(-e);
    FieldElem r = one(desc_), b = *this;
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) r = r * b;
      e >>= 1;
      if (e > 0) b = b * b;
    }
    return r;
  }

  // x^(p^e).
  FieldElem frobenius(unsigned e = 1) const {
    if (e == 0) return *this;
    switch (desc_.kind()) {
      case FieldKind::prime: return *this;
      case FieldKind::finite: {
        FieldElem r = *this;
        for (unsigned i = 0; i < e % desc_.degree(); ++i) r = r.pow(Integer(static_cast<unsigned long>(p())));
        return r;
      }
      case FieldKind::ratfunc: {
        std::uint64_t f = 1;
        for (unsigned i = 0; i < e; ++i) {
          if (f > (1ULL << 32) / p()) fail(ErrorKind::overflow, "Frobenius exponent too large");
          f *= p();
        }
        return FieldElem(desc_, detail::RatPayload{rat().num.exponents_times(f), rat().den.exponents_times(f)});
      }
      case FieldKind::perf: {
        unsigned k = perf().k;
        if (k >= e) return wrap(desc_, *perf().x, k - e);
        return wrap(desc_, perf().x->frobenius(e - k), 0);
      }
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  // g with g^p == *this, for rational functions; empty when none exists.
  std::optional<FieldElem> is_pth_power() const {
    switch (desc_.kind()) {
      case FieldKind::ratfunc: {
        auto n = rat().num.exponents_div(p());
        auto d = rat().den.exponents_div(p());
        if (!n || !d) return std::nullopt;
        return FieldElem(desc_, normalize(std::move(*n), std::move(*d)));
      }
      case FieldKind::perf:
        if (perf().k > 0) return pth_root();
        if (auto r = perf().x->is_pth_power()) return wrap(desc_, *r, 0);
        return pth_root();
      default: return pth_root();
    }
  }

  // The unique p-th root in a perfect field.
  FieldElem pth_root() const {
    switch (desc_.kind()) {
      case FieldKind::prime: return *this;
      case FieldKind::finite: return frobenius(desc_.degree() - 1);
      case FieldKind::ratfunc: {
        auto r = is_pth_power();
        if (!r) fail(ErrorKind::not_a_pth_power, to_string() + " is not a p-th power in " + desc_.to_string());
        return *r;
      }
      case FieldKind::perf: return wrap(desc_, *perf().x, perf().k + 1);
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  // Degree over F_p of an element of a finite field: dim span{1, a, a^2, ...}.
  unsigned min_poly_degree() const {
    if (desc_.kind() == FieldKind::prime) return 1;
    if (desc_.kind() != FieldKind::finite) fail(ErrorKind::precondition, "min_poly_degree needs a finite field");
    const unsigned n = desc_.degree();
    const fp::U pp = p();
    std::vector<std::vector<fp::U>> rows;  // reduced echelon rows with pivot positions
    std::vector<unsigned> pivots;
    FieldElem pw = one(desc_);
    for (unsigned d = 0; d <= n; ++d) {
      std::vector<fp::U> v(n, 0);
      const auto& c = std::get<fp::Poly>(pw.v_);
      for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        fp::U f = v[pivots[r]];
        if (!f) continue;
        for (unsigned i = 0; i < n; ++i) v[i] = fp::subm(v[i], fp::mulm(f, rows[r][i], pp), pp);
      }
      unsigned piv = 0;
      while (piv < n && v[piv] == 0) ++piv;
      if (piv == n) return d;
      fp::U s = fp::invm(v[piv], pp);
      for (auto& x : v) x = fp::mulm(x, s, pp);
      rows.push_back(v);
      pivots.push_back(piv);
      pw = pw * *this;
    }
    return n;
  }

  // Coefficients over F_p of a finite-field element (low degree first, trimmed).
  const fp::Poly& coeffs() const { return std::get<fp::Poly>(v_); }
  const fp::MPoly& numerator() const { return rat().num; }
  const fp::MPoly& denominator() const { return rat().den; }
  // Perfect-closure view: inner element x and k with this = x^(1/p^k).
  const FieldElem& perf_base() const { return *perf().x; }
  unsigned perf_level() const { return desc_.kind() == FieldKind::perf ? perf().k : 0; }

  std::string to_string() const {
    switch (desc_.kind()) {
      case FieldKind::prime: return std::to_string(std::get<fp::U>(v_));
      case FieldKind::finite: {
        const auto& a = std::get<fp::Poly>(v_);
        if (a.empty()) return "0";
        std::string s;
        for (int i = fp::deg(a); i >= 0; --i) {
          if (!a[i]) continue;
          if (!s.empty()) s += '+';
          if (i == 0) {
            s += std::to_string(a[i]);
            continue;
          }
          if (a[i] != 1) s += std::to_string(a[i]) + "*";
          s += "g";
          if (i > 1) s += "^" + std::to_string(i);
        }
        return s;
      }
      case FieldKind::ratfunc: {
        std::string n = rat().num.to_string(desc_.vars());
        if (rat().den.is_one()) return n;
        return "(" + n + ")/(" + rat().den.to_string(desc_.vars()) + ")";
      }
      case FieldKind::perf: {
        std::string x = perf().x->to_string();
        if (perf().k == 0) return x;
        return "(" + x + ")^(1/" + ipow(p(), perf().k).get_str() + ")";
      }
    }
    return "?";
  }

 private:
  using Payload = std::variant<fp::U, fp::Poly, detail::RatPayload, detail::PerfPayload>;
  enum class Op { add, sub, mul };

  FieldElem(FieldDesc d, Payload v) : desc_(std::move(d)), v_(std::move(v)) {}

  const detail::RatPayload& rat() const { return std::get<detail::RatPayload>(v_); }
  const detail::PerfPayload& perf() const { return std::get<detail::PerfPayload>(v_); }

  static detail::RatPayload normalize(fp::MPoly num, fp::MPoly den) {
    if (den.is_zero()) fail(ErrorKind::division_by_zero, "rational function with zero denominator");
    if (num.is_zero()) return {num, fp::MPoly::constant(den.nvars(), den.p(), 1)};
    if (!den.is_constant()) {
      fp::MPoly g = fp::gcd(num, den);
      if (!g.is_one()) {
        num = num.exact_div(g);
        den = den.exact_div(g);
      }
    }
    fp::U s = fp::invm(den.leading_coeff(), den.p());
    return {num.scaled(s), den.scaled(s)};
  }

  // Builds x^(1/p^k) in the perfect closure `d`, extracting p-th roots while possible.
  static FieldElem wrap(const FieldDesc& d, FieldElem x, unsigned k) {
    if (x.desc_.kind() == FieldKind::prime) k = 0;
    while (k > 0) {
      auto r = x.is_pth_power();
      if (!r) break;
      x = std::move(*r);
      --k;
    }
    if (k > d.root_cap())
      fail(ErrorKind::root_cap, "p-power root level " + std::to_string(k) + " exceeds cap " +
                                    std::to_string(d.root_cap()));
    return FieldElem(d, detail::PerfPayload{std::make_shared<const FieldElem>(std::move(x)), k});
  }

  static FieldElem binary(const FieldElem& a0, const FieldElem& b0, Op op) {
    const FieldElem* a = &a0;
    const FieldElem* b = &b0;
    std::optional<FieldElem> tmp;
    if (!(a->desc_ == b->desc_)) {
      if (b->desc_.kind() == FieldKind::prime || (a->desc_.kind() == FieldKind::perf && b->desc_ == a->desc_.inner())) {
        tmp = embed(*b, a->desc_);
        b = &*tmp;
      } else {
        tmp = embed(*a, b->desc_);
        a = &*tmp;
      }
    }
    const FieldDesc& d = a->desc_;
    const fp::U p = d.p();
    switch (d.kind()) {
      case FieldKind::prime: {
        fp::U x = std::get<fp::U>(a->v_), y = std::get<fp::U>(b->v_);
        if (op == Op::add) return FieldElem(d, fp::addm(x, y, p));
        if (op == Op::sub) return FieldElem(d, fp::subm(x, y, p));
        return FieldElem(d, fp::mulm(x, y, p));
      }
      case FieldKind::finite: {
        const auto &x = std::get<fp::Poly>(a->v_), &y = std::get<fp::Poly>(b->v_);
        if (op == Op::add) return FieldElem(d, fp::add(x, y, p));
        if (op == Op::sub) return FieldElem(d, fp::sub(x, y, p));
        return FieldElem(d, fp::mulmod(x, y, d.modulus(), p));
      }
      case FieldKind::ratfunc: {
        const auto &x = a->rat(), &y = b->rat();
        if (op == Op::mul) {
          if (x.den.is_one() && y.den.is_one()) return FieldElem(d, detail::RatPayload{x.num * y.num, x.den});
          return FieldElem(d, normalize(x.num * y.num, x.den * y.den));
        }
        fp::MPoly yn = op == Op::sub ? -y.num : y.num;
        if (x.den == y.den) {
          if (x.den.is_one()) return FieldElem(d, detail::RatPayload{x.num + yn, x.den});
          return FieldElem(d, normalize(x.num + yn, x.den));
        }
        return FieldElem(d, normalize(x.num * y.den + yn * x.den, x.den * y.den));
      }
      case FieldKind::perf: {
        const auto &x = a->perf(), &y = b->perf();
        unsigned k = std::max(x.k, y.k);
        FieldElem xs = x.x->frobenius(k - x.k), ys = y.x->frobenius(k - y.k);
        FieldElem r = op == Op::add ? xs + ys : op == Op::sub ? xs - ys : xs * ys;
        return wrap(d, std::move(r), k);
      }
    }
    fail(ErrorKind::precondition, "bad field kind");
  }

  FieldDesc desc_;
  Payload v_;
};

}  // namespace valfield

#include <valfield/ffpoly.hpp>
