// Finite-rank ordered abelian groups with rational coordinates.
//
// Two order modes are supported. Lexicographic compares coordinate vectors
// left to right. Real-embedded maps basis vector i to sqrt(d_i) for distinct
// squarefree d_i and compares the resulting real numbers; since the sqrt(d_i)
// are linearly independent over Q, a combination is zero exactly when all
// coordinates are zero.
#pragma once

#include <valfield/base.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <compare>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

namespace valfield {

enum class OrderMode { lexicographic, real_embedded };

class GroupBasis {
 public:
  static GroupBasis lex(std::size_t rank) {
    if (rank == 0) fail(ErrorKind::config, "group basis rank must be >= 1");
    return GroupBasis(std::make_shared<const Data>(Data{rank, OrderMode::lexicographic, {}}));
  }

  static GroupBasis real(std::vector<std::uint64_t> weights) {
    if (weights.empty()) fail(ErrorKind::config, "group basis rank must be >= 1");
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!is_squarefree(weights[i]))
        fail(ErrorKind::config, "real weight " + std::to_string(weights[i]) + " is not squarefree");
      if (i > 0 && weights[i] <= weights[i - 1])
        fail(ErrorKind::config, "real weights must be strictly increasing");
    }
    std::size_t r = weights.size();
    return GroupBasis(std::make_shared<const Data>(Data{r, OrderMode::real_embedded, std::move(weights)}));
  }

  std::size_t rank() const { return d_->rank; }
  OrderMode mode() const { return d_->mode; }
  const std::vector<std::uint64_t>& weights() const { return d_->weights; }

  friend bool operator==(const GroupBasis& a, const GroupBasis& b) {
    return a.d_ == b.d_ ||
           (a.d_->rank == b.d_->rank && a.d_->mode == b.d_->mode && a.d_->weights == b.d_->weights);
  }

 private:
  struct Data {
    std::size_t rank;
    OrderMode mode;
    std::vector<std::uint64_t> weights;
  };
  explicit GroupBasis(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

namespace detail {

// Sign of sum q_i * sqrt(w_i). Coordinates are assumed not all zero.
inline int real_sign(const std::vector<Rational>& q, const std::vector<std::uint64_t>& w) {
  // Double filter with a conservative rounding bound.
  {
    double sum = 0, mag = 0;
    bool finite = true;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      double x = q[i].get_d() * std::sqrt(static_cast<double>(w[i]));
      if (!std::isfinite(x) || x == 0) {
        finite = false;
        break;
      }
      sum += x;
      mag += std::fabs(x);
    }
    if (finite) {
      double bound = (static_cast<double>(q.size()) + 8.0) * DBL_EPSILON * mag;
      if (sum > bound) return 1;
      if (sum < -bound) return -1;
    }
  }
  // sqrt(w) lies in [s, s+1] / 2^bits with s = floor(sqrt(w * 4^bits)).
  for (unsigned long bits = 64;; bits *= 2) {
    Integer scale = pow_int(Integer(2), bits);
    Rational lo = 0, hi = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      Integer n = Integer(static_cast<unsigned long>(w[i])) * scale * scale;
      Integer s = isqrt(n);
      Rational l(s, scale);
      Rational h = (s * s == n) ? l : Rational(s + 1, scale);
      l.canonicalize();
      h.canonicalize();
      if (q[i] > 0) {
        lo += q[i] * l;
        hi += q[i] * h;
      } else {
        lo += q[i] * h;
        hi += q[i] * l;
      }
    }
    if (lo > 0) return 1;
    if (hi < 0) return -1;
  }
}

}  // namespace detail

class GroupElement {
 public:
  explicit GroupElement(GroupBasis b) : basis_(std::move(b)), c_(basis_.rank()) {}
  GroupElement(GroupBasis b, std::vector<Rational> coords) : basis_(std::move(b)), c_(std::move(coords)) {
    if (c_.size() != basis_.rank()) fail(ErrorKind::basis_mismatch, "coordinate count differs from rank");
    for (auto& q : c_) q.canonicalize();
  }

  static GroupElement unit(const GroupBasis& b, std::size_t i, const Rational& q = 1) {
    GroupElement g(b);
    g.c_.at(i) = q;
    g.c_[i].canonicalize();
    return g;
  }
  // Rank-1 convenience.
  static GroupElement scalar(const GroupBasis& b, const Rational& q) { return unit(b, 0, q); }

  const GroupBasis& basis() const { return basis_; }
  const std::vector<Rational>& coords() const { return c_; }
  const Rational& operator[](std::size_t i) const { return c_[i]; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return q == 0; });
  }

  int sign() const {
    if (basis_.mode() == OrderMode::lexicographic) {
      for (const auto& q : c_)
        if (q != 0) return q > 0 ? 1 : -1;
      return 0;
    }
    if (is_zero()) return 0;
    return detail::real_sign(c_, basis_.weights());
  }

  GroupElement& operator+=(const GroupElement& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  GroupElement& operator-=(const GroupElement& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  GroupElement& operator*=(const Rational& q) {
    for (auto& x : c_) x *= q;
    return *this;
  }
  friend GroupElement operator+(GroupElement a, const GroupElement& b) { return a += b; }
  friend GroupElement operator-(GroupElement a, const GroupElement& b) { return a -= b; }
  friend GroupElement operator*(GroupElement a, const Rational& q) { return a *= q; }
  friend GroupElement operator*(const Rational& q, GroupElement a) { return a *= q; }
  friend GroupElement operator/(GroupElement a, const Rational& q) {
    if (q == 0) fail(ErrorKind::division_by_zero, "group element divided by 0");
    return a *= Rational(1) / q;
  }
  GroupElement operator-() const {
    GroupElement r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    a.check(b);
    if (a.basis_.mode() == OrderMode::lexicographic) {
      for (std::size_t i = 0; i < a.c_.size(); ++i) {
        int s = cmp(a.c_[i], b.c_[i]);
        if (s != 0) return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
      }
      return std::strong_ordering::equal;
    }
    if (a.c_ == b.c_) return std::strong_ordering::equal;
    int s = (a - b).sign();
    return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    a.check(b);
    return a.c_ == b.c_;
  }

  // Single rational for rank 1, else "[q1,q2,...]".
  std::string to_string() const {
    if (c_.size() == 1) return c_[0].get_str();
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i].get_str();
    os << ']';
    return os.str();
  }

  // Readable form: rational part plus sqrt terms in real mode.
  std::string pretty() const {
    if (c_.size() == 1) return c_[0].get_str();
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (!first) os << (c_[i] > 0 ? "+" : "");
      first = false;
      os << c_[i].get_str();
      if (basis_.mode() == OrderMode::real_embedded) {
        if (basis_.weights()[i] != 1) os << "*sqrt" << basis_.weights()[i];
      } else {
        os << "*e" << i;
      }
    }
    if (first) os << '0';
    return os.str();
  }

  void check(const GroupElement& o) const {
    if (!(basis_ == o.basis_)) fail(ErrorKind::basis_mismatch, "group elements over different bases");
  }

 private:
  GroupBasis basis_;
  std::vector<Rational> c_;
};

// A value: finite group element or +infinity.
class Value {
 public:
  Value(GroupElement g) : g_(std::move(g)) {}  // NOLINT: implicit by design
  static Value inf() { return Value(); }

  bool is_inf() const { return !g_.has_value(); }
  bool is_finite() const { return g_.has_value(); }
  const GroupElement& finite() const {
    if (!g_) fail(ErrorKind::precondition, "finite value expected, got infinity");
    return *g_;
  }

  friend Value operator+(const Value& a, const Value& b) {
    if (a.is_inf() || b.is_inf()) return inf();
    return Value(*a.g_ + *b.g_);
  }
  friend Value operator-(const Value& a, const GroupElement& b) {
    if (a.is_inf()) return inf();
    return Value(*a.g_ - b);
  }
  friend Value operator*(const Value& a, const Rational& q) {
    if (a.is_inf()) {
      if (q <= 0) fail(ErrorKind::precondition, "infinity scaled by a non-positive rational");
      return inf();
    }
    return Value(*a.g_ * q);
  }

  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.is_inf()) return b.is_inf() ? std::strong_ordering::equal : std::strong_ordering::greater;
    if (b.is_inf()) return std::strong_ordering::less;
    return *a.g_ <=> *b.g_;
  }
  friend bool operator==(const Value& a, const Value& b) {
    if (a.is_inf() || b.is_inf()) return a.is_inf() == b.is_inf();
    return *a.g_ == *b.g_;
  }

  std::string to_string() const { return g_ ? g_->to_string() : "inf"; }
  std::string pretty() const { return g_ ? g_->pretty() : "inf"; }

 private:
  Value() = default;
  std::optional<GroupElement> g_;
};

inline Value vmin(const Value& a, const Value& b) { return b < a ? b : a; }
inline Value vmax(const Value& a, const Value& b) { return a < b ? b : a; }

namespace detail {

using IntRow = std::vector<Integer>;

// Row echelon form over Z of the lattice spanned by `rows`; zero rows dropped.
// Pivots are positive and strictly move right.
inline std::vector<IntRow> integer_echelon(std::vector<IntRow> rows, std::size_t ncols) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < ncols && r < rows.size(); ++col) {
    for (;;) {
      std::size_t piv = rows.size();
      for (std::size_t j = r; j < rows.size(); ++j) {
        if (rows[j][col] == 0) continue;
        if (piv == rows.size() || abs(rows[j][col]) < abs(rows[piv][col])) piv = j;
      }
      if (piv == rows.size()) break;
      std::swap(rows[r], rows[piv]);
      bool done = true;
      for (std::size_t j = r + 1; j < rows.size(); ++j) {
        if (rows[j][col] == 0) continue;
        Integer q = floor_div(rows[j][col], rows[r][col]);
        for (std::size_t c = col; c < ncols; ++c) rows[j][c] -= q * rows[r][c];
        if (rows[j][col] != 0) done = false;
      }
      if (done) {
        if (rows[r][col] < 0)
          for (auto& x : rows[r]) x = -x;
        ++r;
        break;
      }
    }
  }
  rows.resize(r);
  return rows;
}

// Coordinates of v in an echelon basis over Q; nullopt if v is outside the span.
inline std::optional<std::vector<Rational>> echelon_solve(const std::vector<IntRow>& basis,
                                                          const std::vector<Rational>& v) {
  std::vector<Rational> res(v);
  std::vector<Rational> out(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    std::size_t p = 0;
    while (basis[j][p] == 0) ++p;
    Rational c = res[p] / Rational(basis[j][p]);
    out[j] = c;
    if (c != 0)
      for (std::size_t k = p; k < res.size(); ++k) res[k] -= c * Rational(basis[j][k]);
  }
  for (const auto& x : res)
    if (x != 0) return std::nullopt;
  return out;
}

inline Integer bareiss_det(std::vector<IntRow> m) {
  std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(m[k], m[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = t;
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace detail

// Finitely generated subgroup of the rational span of a basis.
class Subgroup {
 public:
  Subgroup(GroupBasis b, std::vector<GroupElement> gens) : basis_(std::move(b)), gens_(std::move(gens)) {
    for (const auto& g : gens_)
      if (!(g.basis() == basis_)) fail(ErrorKind::basis_mismatch, "subgroup generator over another basis");
  }

  // Z^rank: the integer coordinate lattice.
  static Subgroup standard(const GroupBasis& b) {
    std::vector<GroupElement> g;
    for (std::size_t i = 0; i < b.rank(); ++i) g.push_back(GroupElement::unit(b, i));
    return Subgroup(b, std::move(g));
  }

  const GroupBasis& basis() const { return basis_; }
  const std::vector<GroupElement>& generators() const { return gens_; }

  Subgroup with(const std::vector<GroupElement>& extra) const {
    auto g = gens_;
    g.insert(g.end(), extra.begin(), extra.end());
    return Subgroup(basis_, std::move(g));
  }

  // Minimal n >= 1 with n*alpha in H; nullopt means no such n exists.
  std::optional<Integer> coset_order(const GroupElement& alpha) const {
    if (!(alpha.basis() == basis_)) fail(ErrorKind::basis_mismatch, "coset_order across bases");
    auto [ech, scale] = echelon({});
    std::vector<Rational> v(alpha.coords());
    for (auto& x : v) x *= scale;
    auto sol = detail::echelon_solve(ech, v);
    if (!sol) return std::nullopt;
    Integer n = 1;
    for (const auto& c : *sol) n = lcm(n, c.get_den());
    return n;
  }

  bool contains(const GroupElement& alpha) const {
    auto n = coset_order(alpha);
    return n && *n == 1;
  }

  // Index (super : *this); requires *this to be contained in super. nullopt when infinite.
  std::optional<Integer> index_in(const Subgroup& super) const {
    if (!(super.basis_ == basis_)) fail(ErrorKind::basis_mismatch, "index across bases");
    Integer scale = 1;
    for (const auto& g : gens_)
      for (const auto& c : g.coords()) scale = lcm(scale, c.get_den());
    for (const auto& g : super.gens_)
      for (const auto& c : g.coords()) scale = lcm(scale, c.get_den());
    auto sub = echelon_scaled(gens_, scale);
    auto sup = echelon_scaled(super.gens_, scale);
    if (sub.size() != sup.size()) return std::nullopt;
    std::vector<detail::IntRow> m;
    for (const auto& row : sub) {
      std::vector<Rational> v(row.begin(), row.end());
      auto sol = detail::echelon_solve(sup, v);
      if (!sol) fail(ErrorKind::precondition, "subgroup not contained in the claimed supergroup");
      detail::IntRow ir;
      for (const auto& c : *sol) {
        if (c.get_den() != 1) fail(ErrorKind::precondition, "subgroup not contained in the claimed supergroup");
        ir.push_back(c.get_num());
      }
      m.push_back(std::move(ir));
    }
    return abs(detail::bareiss_det(std::move(m)));
  }

  std::size_t rank() const { return echelon({}).first.size(); }

 private:
  static std::vector<detail::IntRow> echelon_scaled(const std::vector<GroupElement>& gens, const Integer& scale) {
    std::vector<detail::IntRow> rows;
    std::size_t n = gens.empty() ? 0 : gens[0].basis().rank();
    for (const auto& g : gens) {
      detail::IntRow r;
      for (const auto& c : g.coords()) {
        Rational x = c * scale;
        r.push_back(x.get_num());
      }
      rows.push_back(std::move(r));
    }
    return detail::integer_echelon(std::move(rows), n);
  }

  std::pair<std::vector<detail::IntRow>, Integer> echelon(const std::vector<GroupElement>&) const {
    Integer scale = 1;
    for (const auto& g : gens_)
      for (const auto& c : g.coords()) scale = lcm(scale, c.get_den());
    return {echelon_scaled(gens_, scale), scale};
  }

  GroupBasis basis_;
  std::vector<GroupElement> gens_;
};

}  // namespace valfield
