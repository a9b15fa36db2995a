#pragma once

#include <vector>

#include "qdm/rational.hpp"

namespace qdm {

struct FieldMismatchError : ArithmeticError {
  using ArithmeticError::ArithmeticError;
};

long euler_phi(long m);

// Coefficients of the m-th cyclotomic polynomial, ascending, degree phi(m).
// All coefficients are integers; returned as Rational for direct use in the
// field arithmetic below.
const std::vector<Rational>& cyclotomic_polynomial(long m);

// An element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^{phi(m)-1},
// kept reduced mod the m-th cyclotomic polynomial. The field order m is part
// of the value; binary operations require equal orders (use embedded() to
// move into a larger field first). Equality is coefficientwise at fixed m,
// which is canonical because the power basis is a Q-basis.
class CyclotomicNumber {
 public:
  CyclotomicNumber() : order_(1), c_(1, Rational(0)) {}

  static CyclotomicNumber zero(long m);
  static CyclotomicNumber one(long m);
  static CyclotomicNumber from_rational(long m, const Rational& r);
  // zeta_m^k for any integer k (reduced mod m).
  static CyclotomicNumber zeta(long m, long k = 1);

  long order() const { return order_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  // Throws unless the element lies in Q.
  Rational rational_value() const;

  CyclotomicNumber operator-() const;
  CyclotomicNumber& operator+=(const CyclotomicNumber& o);
  CyclotomicNumber& operator-=(const CyclotomicNumber& o);
  CyclotomicNumber& operator*=(const CyclotomicNumber& o);
  CyclotomicNumber& operator*=(const Rational& r);

  friend CyclotomicNumber operator+(CyclotomicNumber a, const CyclotomicNumber& b) { return a += b; }
  friend CyclotomicNumber operator-(CyclotomicNumber a, const CyclotomicNumber& b) { return a -= b; }
  friend CyclotomicNumber operator*(CyclotomicNumber a, const CyclotomicNumber& b) { return a *= b; }
  friend CyclotomicNumber operator*(CyclotomicNumber a, const Rational& r) { return a *= r; }
  friend CyclotomicNumber operator*(const Rational& r, CyclotomicNumber a) { return a *= r; }

  bool operator==(const CyclotomicNumber& o) const;
  bool operator!=(const CyclotomicNumber& o) const { return !(*this == o); }

  // Multiplicative inverse; throws ArithmeticError on zero.
  CyclotomicNumber inverse() const;
  CyclotomicNumber pow(long e) const;

  // Field automorphism zeta_m -> zeta_m^k, gcd(k, m) = 1.
  CyclotomicNumber galois(long k) const;
  CyclotomicNumber conjugate() const { return galois(-1); }

  // Inclusion Q(zeta_m) -> Q(zeta_M), requires m | M.
  CyclotomicNumber embedded(long M) const;

  std::string to_string() const;

 private:
  explicit CyclotomicNumber(long m) : order_(m), c_(euler_phi(m), Rational(0)) {}
  void reduce_from(std::vector<Rational> poly);  // poly in zeta^0..deg, any deg

  long order_;
  std::vector<Rational> c_;  // length phi(order_)

  friend CyclotomicNumber sqrt_integer(long n, long m);
  friend bool subfield_membership(const CyclotomicNumber& a, long m_sub);
  friend CyclotomicNumber to_subfield(const CyclotomicNumber& a, long m_sub);
};

// True iff a lies in Q(zeta_{m_sub}) inside Q(zeta_m); requires m_sub | m.
// Decided by Galois invariance under {k mod m : k = 1 mod m_sub}.
bool subfield_membership(const CyclotomicNumber& a, long m_sub);

// Rewrites a as an element of Q(zeta_{m_sub}); throws unless it is a member.
CyclotomicNumber to_subfield(const CyclotomicNumber& a, long m_sub);

// The positive square root of the positive integer n as an element of
// Q(zeta_m). Requires 4n | m (guarantees containment). Built from Gauss sums;
// the branch (sign) is fixed by a floating-point probe at zeta_m = e^{2 pi i/m}.
CyclotomicNumber sqrt_integer(long n, long m);

// Complex evaluation at zeta_m = e^{2 pi i / m}; for branch checks and tests
// only, never for exact decisions.
void complex_probe(const CyclotomicNumber& a, long double& re, long double& im);

}  // namespace qdm
