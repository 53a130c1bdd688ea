// Hand-rolled generators for property tests.
#pragma once

#include <valfield/field.hpp>
#include <valfield/ogroup.hpp>

#include <random>

namespace valfield {
inline void PrintTo(const GroupElement& g, std::ostream* os) { *os << g.pretty(); }
inline void PrintTo(const Value& v, std::ostream* os) { *os << v.pretty(); }
}  // namespace valfield

namespace vt {

using namespace valfield;

struct Rng {
  explicit Rng(std::uint64_t seed) : g(seed) {}
  std::mt19937_64 g;

  long long range(long long lo, long long hi) {  // inclusive
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(g() % span);
  }
  bool coin() { return g() & 1; }
  Rational rational(long long num_bound, long long den_bound) {
    Rational q(Integer(static_cast<long>(range(-num_bound, num_bound))),
               Integer(static_cast<long>(range(1, den_bound))));
    q.canonicalize();
    return q;
  }
};

inline GroupElement random_element(Rng& r, const GroupBasis& b, long long num = 20, long long den = 6) {
  std::vector<Rational> c;
  for (std::size_t i = 0; i < b.rank(); ++i) c.push_back(r.rational(num, den));
  return GroupElement(b, c);
}

inline FieldElem random_field_elem(Rng& r, const FieldDesc& d, bool nonzero = false) {
  for (;;) {
    FieldElem e = FieldElem::zero(d);
    switch (d.kind()) {
      case FieldKind::prime: e = FieldElem::from_int(d, r.range(0, static_cast<long long>(d.p()) - 1)); break;
      case FieldKind::finite: {
        fp::Poly c;
        for (unsigned i = 0; i < d.degree(); ++i) c.push_back(static_cast<fp::U>(r.range(0, d.p() - 1)));
        e = FieldElem::from_coeffs(d, c);
        break;
      }
      case FieldKind::ratfunc:
      case FieldKind::perf: {
        FieldDesc rd = d.kind() == FieldKind::perf ? d.inner() : d;
        auto poly = [&] {
          fp::MPoly m(rd.nvars(), rd.p());
          int nt = static_cast<int>(r.range(1, 3));
          for (int t = 0; t < nt; ++t) {
            fp::Mono mo(rd.nvars(), 0);
            for (auto& x : mo) x = static_cast<std::uint32_t>(r.range(0, 2));
            m.add_term(mo, static_cast<fp::U>(r.range(1, d.p() - 1)));
          }
          return m;
        };
        fp::MPoly den = poly();
        if (den.is_zero()) den = fp::MPoly::constant(rd.nvars(), rd.p(), 1);
        FieldElem x = r.coin() ? FieldElem::fraction(rd, poly(), fp::MPoly::constant(rd.nvars(), rd.p(), 1))
                               : FieldElem::fraction(rd, poly(), den);
        if (d.kind() == FieldKind::perf) {
          e = FieldElem::embed(x, d);
          int k = static_cast<int>(r.range(0, 1));
          for (int i = 0; i < k; ++i) e = e.pth_root();
        } else {
          e = x;
        }
        break;
      }
    }
    if (!nonzero || !e.is_zero()) return e;
  }
}

}  // namespace vt

#include <valfield/series.hpp>

namespace vt {

inline Series random_series(Rng& r, const GroupBasis& b, const FieldDesc& f, int max_terms = 5,
                            bool finite_prec = false, long long num = 12, long long den = 3) {
  std::vector<Term> t;
  int n = static_cast<int>(r.range(0, max_terms));
  for (int i = 0; i < n; ++i) t.push_back({random_element(r, b, num, den), random_field_elem(r, f, true)});
  Value prec = Value::inf();
  if (finite_prec) prec = Value(random_element(r, b, num, den) + GroupElement::unit(b, 0, Rational(static_cast<long>(num))));
  return Series::from_terms(b, f, std::move(t), prec);
}

}  // namespace vt
