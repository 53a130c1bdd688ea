// Shared scalar types and the error type used throughout valfield.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace valfield {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ErrorKind {
  basis_mismatch,
  field_mismatch,
  division_by_zero,
  not_a_pth_power,
  undecidable_at_precision,
  negative_value,
  insufficient_precision,
  support_overflow,
  precondition,
  inseparable,
  not_solvable_here,
  condition_unverifiable,
  overflow,
  construction_inconsistency,
  insufficient_depth,
  residue_field_too_small,
  zero_polynomial,
  root_cap,
  search_exhausted,
  config,
  io,
};

inline std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::basis_mismatch: return "basis-mismatch";
    case ErrorKind::field_mismatch: return "field-mismatch";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::not_a_pth_power: return "not-a-pth-power";
    case ErrorKind::undecidable_at_precision: return "undecidable-at-precision";
    case ErrorKind::negative_value: return "negative-value";
    case ErrorKind::insufficient_precision: return "insufficient-input-precision";
    case ErrorKind::support_overflow: return "support-overflow";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::inseparable: return "unsupported-inseparable";
    case ErrorKind::not_solvable_here: return "not-solvable-here";
    case ErrorKind::condition_unverifiable: return "condition-unverifiable";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::construction_inconsistency: return "construction-inconsistency";
    case ErrorKind::insufficient_depth: return "insufficient-depth";
    case ErrorKind::residue_field_too_small: return "residue-field-too-small";
    case ErrorKind::zero_polynomial: return "zero-polynomial";
    case ErrorKind::root_cap: return "root-cap";
    case ErrorKind::search_exhausted: return "search-exhausted";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline std::string to_string(const Integer& z) { return z.get_str(); }
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) fail(ErrorKind::config, "not a rational: '" + s + "'");
  q.canonicalize();
  return q;
}

inline Integer pow_int(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

inline Integer ipow(unsigned long b, unsigned long e) { return pow_int(Integer(b), e); }

inline Integer isqrt(const Integer& n) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Integer floor(const Rational& q) {
  return floor_div(q.get_num(), q.get_den());
}

inline Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline bool is_squarefree(std::uint64_t d) {
  if (d == 0) return false;
  for (std::uint64_t q = 2; q * q <= d; ++q)
    if (d % (q * q) == 0) return false;
  return true;
}

}  // namespace valfield
