#include "qdm/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qdm {

namespace {

using Poly = std::vector<Rational>;  // ascending coefficients

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

// Returns {quotient, remainder}; b must be nonzero.
std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
  trim(a);
  if (b.empty()) throw ArithmeticError("poly_divmod: division by zero polynomial");
  Poly q;
  if (degree(a) >= degree(b)) q.assign(a.size() - b.size() + 1, Rational(0));
  const Rational lead = b.back();
  while (degree(a) >= degree(b)) {
    const int shift = degree(a) - degree(b);
    const Rational f = a.back() / lead;
    q[shift] = f;
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

Poly poly_mod(Poly a, const Poly& b) { return poly_divmod(std::move(a), b).second; }

// s*a + t*mod = gcd (monic); returns s with gcd scaled to 1. Requires
// gcd(a, mod) constant, i.e. a invertible mod the modulus.
Poly poly_inverse_mod(Poly a, Poly mod) {
  trim(a);
  trim(mod);
  Poly r0 = mod, r1 = a;
  Poly s0 = {}, s1 = {Rational(1)};  // coefficients of `a`
  while (!r1.empty()) {
    auto [q, rem] = poly_divmod(r0, r1);
    Poly s2 = s0;
    Poly qs = poly_mul(q, s1);
    if (s2.size() < qs.size()) s2.resize(qs.size(), Rational(0));
    for (size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
    trim(s2);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (degree(r0) != 0) throw ArithmeticError("inverse does not exist (zero or zero divisor)");
  const Rational inv_g = Rational(1) / r0[0];
  for (auto& c : s0) c *= inv_g;
  return poly_mod(std::move(s0), mod);
}

std::map<long, Poly>& phi_cache() {
  static std::map<long, Poly> cache;
  return cache;
}
std::mutex phi_mutex;

const Poly& cyclo_poly_impl(long m) {
  auto it = phi_cache().find(m);
  if (it != phi_cache().end()) return it->second;
  // x^m - 1 divided by the product of Phi_d over proper divisors d of m.
  Poly num(m + 1, Rational(0));
  num[0] = Rational(-1);
  num[m] = Rational(1);
  Poly den = {Rational(1)};
  for (long d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    den = poly_mul(den, cyclo_poly_impl(d));
  }
  auto [q, r] = poly_divmod(num, den);
  if (!r.empty()) throw ArithmeticError("cyclotomic polynomial division not exact");
  return phi_cache().emplace(m, std::move(q)).first->second;
}

}  // namespace

long euler_phi(long m) {
  if (m <= 0) throw ArithmeticError("euler_phi: order must be positive");
  long result = m, n = m;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

const std::vector<Rational>& cyclotomic_polynomial(long m) {
  if (m <= 0) throw ArithmeticError("cyclotomic_polynomial: order must be positive");
  std::lock_guard<std::mutex> lock(phi_mutex);
  return cyclo_poly_impl(m);
}

CyclotomicNumber CyclotomicNumber::zero(long m) { return CyclotomicNumber(m); }

CyclotomicNumber CyclotomicNumber::one(long m) {
  CyclotomicNumber x(m);
  x.c_[0] = Rational(1);
  return x;
}

CyclotomicNumber CyclotomicNumber::from_rational(long m, const Rational& r) {
  CyclotomicNumber x(m);
  x.c_[0] = r;
  return x;
}

CyclotomicNumber CyclotomicNumber::zeta(long m, long k) {
  CyclotomicNumber x(m);
  k %= m;
  if (k < 0) k += m;
  Poly p(k + 1, Rational(0));
  p[k] = Rational(1);
  x.reduce_from(std::move(p));
  return x;
}

void CyclotomicNumber::reduce_from(std::vector<Rational> poly) {
  const auto& phi = cyclotomic_polynomial(order_);
  Poly mod(phi);
  Poly r = poly_mod(std::move(poly), mod);
  c_.assign(euler_phi(order_), Rational(0));
  for (size_t i = 0; i < r.size(); ++i) c_[i] = r[i];
}

bool CyclotomicNumber::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& r) { return r == 0; });
}

bool CyclotomicNumber::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rational CyclotomicNumber::rational_value() const {
  if (!is_rational()) throw ArithmeticError("rational_value: element not in Q: " + to_string());
  return c_[0];
}

CyclotomicNumber CyclotomicNumber::operator-() const {
  CyclotomicNumber x(*this);
  for (auto& v : x.c_) v = -v;
  return x;
}

static void check_orders(long a, long b) {
  if (a != b)
    throw FieldMismatchError("cyclotomic order mismatch: " + std::to_string(a) + " vs " +
                             std::to_string(b) + " (embed first)");
}

CyclotomicNumber& CyclotomicNumber::operator+=(const CyclotomicNumber& o) {
  check_orders(order_, o.order_);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CyclotomicNumber& CyclotomicNumber::operator-=(const CyclotomicNumber& o) {
  check_orders(order_, o.order_);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CyclotomicNumber& CyclotomicNumber::operator*=(const CyclotomicNumber& o) {
  check_orders(order_, o.order_);
  Poly a(c_.begin(), c_.end());
  Poly b(o.c_.begin(), o.c_.end());
  trim(a);
  trim(b);
  reduce_from(poly_mul(a, b));
  return *this;
}

CyclotomicNumber& CyclotomicNumber::operator*=(const Rational& r) {
  for (auto& v : c_) v *= r;
  return *this;
}

bool CyclotomicNumber::operator==(const CyclotomicNumber& o) const {
  return order_ == o.order_ && c_ == o.c_;
}

CyclotomicNumber CyclotomicNumber::inverse() const {
  if (is_zero()) throw ArithmeticError("cyclotomic inverse of zero");
  Poly a(c_.begin(), c_.end());
  trim(a);
  Poly mod(cyclotomic_polynomial(order_));
  CyclotomicNumber x(order_);
  Poly inv = poly_inverse_mod(std::move(a), std::move(mod));
  for (size_t i = 0; i < inv.size(); ++i) x.c_[i] = inv[i];
  return x;
}

CyclotomicNumber CyclotomicNumber::pow(long e) const {
  if (e == 0) return one(order_);
  CyclotomicNumber base = e < 0 ? inverse() : *this;
  long n = e < 0 ? -e : e;
  CyclotomicNumber acc = one(order_);
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

CyclotomicNumber CyclotomicNumber::galois(long k) const {
  const long m = order_;
  long kk = k % m;
  if (kk < 0) kk += m;
  if (std::gcd(kk, m) != 1)
    throw ArithmeticError("galois: exponent not coprime to order");
  Poly p(m, Rational(0));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    p[(i * kk) % m] += c_[i];
  }
  CyclotomicNumber x(m);
  x.reduce_from(std::move(p));
  return x;
}

CyclotomicNumber CyclotomicNumber::embedded(long M) const {
  if (M % order_ != 0)
    throw FieldMismatchError("embedded: target order not a multiple of source order");
  const long step = M / order_;
  Poly p(static_cast<size_t>(euler_phi(order_) - 1) * step + 1, Rational(0));
  for (size_t i = 0; i < c_.size(); ++i) p[i * step] = c_[i];
  CyclotomicNumber x(M);
  x.reduce_from(std::move(p));
  return x;
}

std::string CyclotomicNumber::to_string() const {
  if (is_rational()) return qdm::to_string(c_[0]);
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    Rational v = c_[i];
    if (first) {
      if (v < 0) { os << "-"; v = -v; }
    } else {
      os << (v < 0 ? " - " : " + ");
      if (v < 0) v = -v;
    }
    first = false;
    const bool unit = (v == 1 && i != 0);
    if (!unit) os << qdm::to_string(v);
    if (i != 0) {
      if (!unit) os << "*";
      os << "z" << order_;
      if (i != 1) os << "^" << i;
    }
  }
  return os.str();
}

bool subfield_membership(const CyclotomicNumber& a, long m_sub) {
  const long m = a.order();
  if (m % m_sub != 0)
    throw FieldMismatchError("subfield_membership: claimed subfield order does not divide order");
  for (long k = 1; k < m; ++k) {
    if (std::gcd(k, m) != 1) continue;
    if (k % m_sub != 1 % m_sub) continue;
    if (a.galois(k) != a) return false;
  }
  return true;
}

CyclotomicNumber to_subfield(const CyclotomicNumber& a, long m_sub) {
  const long m = a.order();
  if (!subfield_membership(a, m_sub))
    throw ArithmeticError("to_subfield: element is not in the requested subfield");
  // Solve for coordinates in the basis zeta_{m_sub}^j embedded into Q(zeta_m).
  const long phi_sub = euler_phi(m_sub);
  const long phi_m = euler_phi(m);
  // Column j = embedded basis vector.
  std::vector<std::vector<Rational>> cols;
  for (long j = 0; j < phi_sub; ++j)
    cols.push_back(CyclotomicNumber::zeta(m_sub, j).embedded(m).coeffs());
  // Gaussian elimination on the phi_m x (phi_sub+1) system.
  std::vector<std::vector<Rational>> mat(phi_m, std::vector<Rational>(phi_sub + 1, Rational(0)));
  for (long i = 0; i < phi_m; ++i) {
    for (long j = 0; j < phi_sub; ++j) mat[i][j] = cols[j][i];
    mat[i][phi_sub] = a.coeffs()[i];
  }
  std::vector<long> pivot_col_of_row;
  long row = 0;
  for (long col = 0; col < phi_sub && row < phi_m; ++col) {
    long pr = -1;
    for (long i = row; i < phi_m; ++i)
      if (mat[i][col] != 0) { pr = i; break; }
    if (pr < 0) continue;
    std::swap(mat[row], mat[pr]);
    const Rational lead = mat[row][col];
    for (auto& v : mat[row]) v /= lead;
    for (long i = 0; i < phi_m; ++i) {
      if (i == row || mat[i][col] == 0) continue;
      const Rational f = mat[i][col];
      for (long j = col; j <= phi_sub; ++j) mat[i][j] -= f * mat[row][j];
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }
  for (long i = row; i < phi_m; ++i)
    if (mat[i][phi_sub] != 0)
      throw ArithmeticError("to_subfield: inconsistent system (internal)");
  CyclotomicNumber out = CyclotomicNumber::zero(m_sub);
  std::vector<Rational> coords(phi_sub, Rational(0));
  for (long i = 0; i < row; ++i) coords[pivot_col_of_row[i]] = mat[i][phi_sub];
  for (long j = 0; j < phi_sub; ++j)
    if (coords[j] != 0) out += CyclotomicNumber::zeta(m_sub, j) * coords[j];
  return out;
}

void complex_probe(const CyclotomicNumber& a, long double& re, long double& im) {
  const long m = a.order();
  re = 0.0L;
  im = 0.0L;
  const long double tau = 2.0L * 3.14159265358979323846264338327950288L / static_cast<long double>(m);
  const auto& c = a.coeffs();
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    const long double v = static_cast<long double>(c[i].convert_to<double>());
    re += v * std::cos(tau * static_cast<long double>(i));
    im += v * std::sin(tau * static_cast<long double>(i));
  }
}

namespace {

int legendre_symbol(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  // Euler criterion by fast modular exponentiation.
  long e = (p - 1) / 2;
  long base = a, acc = 1;
  while (e > 0) {
    if (e & 1) acc = (acc * base) % p;
    base = (base * base) % p;
    e >>= 1;
  }
  return acc == 1 ? 1 : -1;
}

CyclotomicNumber sqrt_prime(long p, long m) {
  if (p == 2) {
    // sqrt(2) = zeta_8 + zeta_8^{-1}.
    return (CyclotomicNumber::zeta(8, 1) + CyclotomicNumber::zeta(8, -1)).embedded(m);
  }
  CyclotomicNumber g = CyclotomicNumber::zero(p);
  for (long a = 1; a < p; ++a) {
    const int chi = legendre_symbol(a, p);
    g += CyclotomicNumber::zeta(p, a) * Rational(chi);
  }
  CyclotomicNumber ge = g.embedded(m);
  if (p % 4 == 1) return ge;
  // g^2 = -p here, so sqrt(p) = -i * g up to sign; fix sign by probe below.
  return CyclotomicNumber::zeta(4, -1).embedded(m) * ge;
}

}  // namespace

CyclotomicNumber sqrt_integer(long n, long m) {
  if (n <= 0) throw ArithmeticError("sqrt_integer: argument must be positive");
  if (m % (4 * n) != 0)
    throw ArithmeticError("sqrt_integer: order must be divisible by 4n");
  CyclotomicNumber out = CyclotomicNumber::one(m);
  long rest = n;
  long square_part = 1;
  for (long p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) { rest /= p; ++e; }
    for (int i = 0; i < e / 2; ++i) square_part *= p;
    if (e % 2) out *= sqrt_prime(p, m);
  }
  if (rest > 1) out *= sqrt_prime(rest, m);
  out *= Rational(square_part);
  long double re = 0, im = 0;
  complex_probe(out, re, im);
  const long double target = std::sqrt(static_cast<long double>(n));
  if (std::abs(re + target) < 1e-6L && std::abs(im) < 1e-6L) out = -out;
  complex_probe(out, re, im);
  if (!(std::abs(re - target) < 1e-6L && std::abs(im) < 1e-6L))
    throw ArithmeticError("sqrt_integer: probe failed to certify branch");
  return out;
}

}  // namespace qdm
