#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace qdm {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ArithmeticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "p", "-p" or "p/q". Exact; rejects anything else.
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw ArithmeticError("rational_from_string: empty string");
  for (char c : s)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '/'))
      throw ArithmeticError("rational_from_string: bad character in '" + s + "'");
  try {
    Rational r(s);
    return r;
  } catch (const std::exception&) {
    throw ArithmeticError("rational_from_string: cannot parse '" + s + "'");
  }
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational pow_rational(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (base == 0) {
    if (e < 0) throw ArithmeticError("pow_rational: zero to negative power");
    return Rational(0);
  }
  Rational acc(1), b = base;
  long n = e < 0 ? -e : e;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (e < 0) acc = Rational(1) / acc;
  return acc;
}

inline BigInt factorial_big(long n) {
  if (n < 0) throw ArithmeticError("factorial of negative");
  BigInt f(1);
  for (long k = 2; k <= n; ++k) f *= k;
  return f;
}

inline BigInt binomial_big(long n, long k) {
  if (k < 0 || k > n) return BigInt(0);
  BigInt num(1);
  for (long i = 0; i < k; ++i) num *= (n - i);
  return num / factorial_big(k);
}

}  // namespace qdm
