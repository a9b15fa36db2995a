#include <doctest.h>

#include <cstdint>
#include <numeric>
#include <vector>

#include "qdm/cyclotomic.hpp"

using qdm::CyclotomicNumber;
using qdm::Rational;

namespace {

// Deterministic PRNG so failures reproduce.
struct Lcg {
  std::uint64_t s = 0x2545F4914F6CDD1DULL;
  std::uint64_t next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
  }
  long range(long lo, long hi) { return lo + static_cast<long>(next() % (hi - lo + 1)); }
};

CyclotomicNumber random_elt(Lcg& rng, long m, int max_num = 7) {
  CyclotomicNumber x = CyclotomicNumber::zero(m);
  const long phi = qdm::euler_phi(m);
  for (long i = 0; i < phi; ++i) {
    long num = rng.range(-max_num, max_num);
    long den = rng.range(1, 4);
    if (num != 0) x += CyclotomicNumber::zeta(m, i) * Rational(num, den);
  }
  return x;
}

// Brute-force membership oracle: solve a rational linear system asking
// whether `a` is a Q-combination of the embedded subfield basis.
bool membership_by_linear_algebra(const CyclotomicNumber& a, long m_sub) {
  const long m = a.order();
  const long phi_m = qdm::euler_phi(m);
  const long phi_sub = qdm::euler_phi(m_sub);
  std::vector<std::vector<Rational>> mat(phi_m, std::vector<Rational>(phi_sub + 1, Rational(0)));
  for (long j = 0; j < phi_sub; ++j) {
    auto col = CyclotomicNumber::zeta(m_sub, j).embedded(m).coeffs();
    for (long i = 0; i < phi_m; ++i) mat[i][j] = col[i];
  }
  for (long i = 0; i < phi_m; ++i) mat[i][phi_sub] = a.coeffs()[i];
  long row = 0;
  for (long col = 0; col < phi_sub && row < phi_m; ++col) {
    long pr = -1;
    for (long i = row; i < phi_m; ++i)
      if (mat[i][col] != 0) { pr = i; break; }
    if (pr < 0) continue;
    std::swap(mat[row], mat[pr]);
    Rational lead = mat[row][col];
    for (auto& v : mat[row]) v /= lead;
    for (long i = 0; i < phi_m; ++i) {
      if (i == row || mat[i][col] == 0) continue;
      Rational f = mat[i][col];
      for (long j = col; j <= phi_sub; ++j) mat[i][j] -= f * mat[row][j];
    }
    ++row;
  }
  for (long i = row; i < phi_m; ++i)
    if (mat[i][phi_sub] != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("cyclotomic polynomial values") {
  // Phi_1 = x - 1, Phi_4 = x^2 + 1, Phi_8 = x^4 + 1, Phi_12 = x^4 - x^2 + 1.
  CHECK(qdm::cyclotomic_polynomial(1) == std::vector<Rational>{Rational(-1), Rational(1)});
  CHECK(qdm::cyclotomic_polynomial(4) ==
        std::vector<Rational>{Rational(1), Rational(0), Rational(1)});
  CHECK(qdm::cyclotomic_polynomial(8) ==
        std::vector<Rational>{Rational(1), Rational(0), Rational(0), Rational(0), Rational(1)});
  CHECK(qdm::cyclotomic_polynomial(12) ==
        std::vector<Rational>{Rational(1), Rational(0), Rational(-1), Rational(0), Rational(1)});
  CHECK(qdm::euler_phi(1) == 1);
  CHECK(qdm::euler_phi(12) == 4);
  CHECK(qdm::euler_phi(24) == 8);
}

TEST_CASE("primitive root relations") {
  // zeta_4^2 = -1.
  auto i4 = CyclotomicNumber::zeta(4);
  CHECK(i4 * i4 == CyclotomicNumber::from_rational(4, Rational(-1)));
  // (1 + zeta_3)(1 + zeta_3^2) = 1: product of (1 - roots of Phi_3) = Phi_3(-1)... value is 1.
  auto w = CyclotomicNumber::zeta(3);
  auto lhs = (CyclotomicNumber::one(3) + w) * (CyclotomicNumber::one(3) + w * w);
  CHECK(lhs == CyclotomicNumber::one(3));
  // Phi_m(zeta_m) = 0 for several m.
  for (long m : {2, 3, 4, 5, 6, 8, 9, 12, 15, 16, 20, 24}) {
    auto z = CyclotomicNumber::zeta(m);
    auto acc = CyclotomicNumber::zero(m);
    const auto& phi = qdm::cyclotomic_polynomial(m);
    for (size_t k = 0; k < phi.size(); ++k) acc += z.pow(static_cast<long>(k)) * phi[k];
    CHECK(acc.is_zero());
  }
  // zeta_m^m = 1.
  for (long m : {5, 7, 12, 24}) CHECK(CyclotomicNumber::zeta(m).pow(m) == CyclotomicNumber::one(m));
}

TEST_CASE("inverse frozen example and axioms") {
  // (1 + i)^{-1} = (1 - i)/2.
  auto i4 = CyclotomicNumber::zeta(4);
  auto inv = (CyclotomicNumber::one(4) + i4).inverse();
  auto expect = (CyclotomicNumber::one(4) - i4) * Rational(1, 2);
  CHECK(inv == expect);
  CHECK_THROWS_AS(CyclotomicNumber::zero(12).inverse(), qdm::ArithmeticError);

  Lcg rng;
  for (long m : {3, 4, 8, 12, 20, 24}) {
    for (int trial = 0; trial < 8; ++trial) {
      auto a = random_elt(rng, m);
      auto b = random_elt(rng, m);
      auto c = random_elt(rng, m);
      CHECK((a + b) * c == a * c + b * c);        // distributivity
      CHECK(a * b == b * a);                       // commutativity
      CHECK((a * b) * c == a * (b * c));           // associativity
      if (!a.is_zero()) CHECK(a * a.inverse() == CyclotomicNumber::one(m));
    }
  }
}

TEST_CASE("order mismatch is an error, embedding fixes it") {
  auto a = CyclotomicNumber::zeta(4);
  auto b = CyclotomicNumber::zeta(8);
  CHECK_THROWS_AS(a * b, qdm::FieldMismatchError);
  auto prod = a.embedded(8) * b;  // zeta_8^2 * zeta_8 = zeta_8^3
  CHECK(prod == CyclotomicNumber::zeta(8, 3));
  // Embedding is a field map: respects products and sums on random elements.
  Lcg rng;
  for (int t = 0; t < 6; ++t) {
    auto x = random_elt(rng, 6);
    auto y = random_elt(rng, 6);
    CHECK((x * y).embedded(24) == x.embedded(24) * y.embedded(24));
    CHECK((x + y).embedded(24) == x.embedded(24) + y.embedded(24));
  }
}

TEST_CASE("galois automorphisms") {
  auto z = CyclotomicNumber::zeta(12);
  CHECK(z.galois(5) == CyclotomicNumber::zeta(12, 5));
  CHECK_THROWS_AS(z.galois(2), qdm::ArithmeticError);
  Lcg rng;
  for (int t = 0; t < 6; ++t) {
    auto x = random_elt(rng, 12);
    auto y = random_elt(rng, 12);
    CHECK((x * y).galois(7) == x.galois(7) * y.galois(7));
    CHECK(x.galois(5).galois(5) == x);  // 5*5 = 25 = 1 mod 12
  }
  // conjugate(zeta) = zeta^{-1}; conjugation fixes rationals.
  CHECK(CyclotomicNumber::zeta(8).conjugate() == CyclotomicNumber::zeta(8, -1));
  CHECK(CyclotomicNumber::from_rational(8, Rational(3, 7)).conjugate() ==
        CyclotomicNumber::from_rational(8, Rational(3, 7)));
}

TEST_CASE("subfield membership matches the linear-algebra oracle") {
  // Frozen examples first.
  CHECK(qdm::subfield_membership(CyclotomicNumber::zeta(8, 2), 4));  // zeta_8^2 = i
  CHECK_FALSE(qdm::subfield_membership(CyclotomicNumber::zeta(8, 1), 4));
  Lcg rng;
  int disagreements = 0;
  for (long m : {8, 12, 16, 20, 24}) {
    std::vector<long> divisors;
    for (long d = 1; d <= m; ++d)
      if (m % d == 0) divisors.push_back(d);
    for (long d : divisors) {
      for (int t = 0; t < 4; ++t) {
        auto x = random_elt(rng, m, 3);
        if (qdm::subfield_membership(x, d) != membership_by_linear_algebra(x, d)) ++disagreements;
        // Elements built from the subfield must test positive.
        auto y = random_elt(rng, d, 3).embedded(m);
        if (!qdm::subfield_membership(y, d)) ++disagreements;
      }
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("zeta_12 + zeta_12^-1 is sqrt(3), not rational") {
  auto x = CyclotomicNumber::zeta(12, 1) + CyclotomicNumber::zeta(12, -1);
  CHECK_FALSE(x.is_rational());
  CHECK(x * x == CyclotomicNumber::from_rational(12, Rational(3)));
  CHECK_FALSE(qdm::subfield_membership(x, 1));
}

TEST_CASE("to_subfield rewrites in the smaller power basis") {
  auto i_in_8 = CyclotomicNumber::zeta(8, 2);
  auto i4 = qdm::to_subfield(i_in_8, 4);
  CHECK(i4 == CyclotomicNumber::zeta(4));
  CHECK_THROWS_AS(qdm::to_subfield(CyclotomicNumber::zeta(8), 4), qdm::ArithmeticError);
  Lcg rng;
  for (int t = 0; t < 6; ++t) {
    auto y = random_elt(rng, 6, 4);
    CHECK(qdm::to_subfield(y.embedded(24), 6) == y);
  }
}

TEST_CASE("sqrt_integer certifies squares up to 16") {
  // sqrt(2) in Q(zeta_8) equals zeta_8 + zeta_8^{-1}.
  auto s2 = qdm::sqrt_integer(2, 8);
  CHECK(s2 == CyclotomicNumber::zeta(8, 1) + CyclotomicNumber::zeta(8, -1));
  for (long n = 1; n <= 16; ++n) {
    const long m = 4 * n;
    auto s = qdm::sqrt_integer(n, m);
    CHECK(s * s == CyclotomicNumber::from_rational(m, Rational(n)));
    long double re = 0, im = 0;
    qdm::complex_probe(s, re, im);
    CHECK(re > 0);  // positive branch
    CHECK(std::abs(static_cast<double>(im)) < 1e-9);
  }
  // Also in a strictly larger field than required.
  auto s3 = qdm::sqrt_integer(3, 24);
  CHECK(s3 * s3 == CyclotomicNumber::from_rational(24, Rational(3)));
  CHECK_THROWS_AS(qdm::sqrt_integer(3, 8), qdm::ArithmeticError);
}

TEST_CASE("printing is canonical") {
  auto x = CyclotomicNumber::from_rational(8, Rational(1, 2)) -
           CyclotomicNumber::zeta(8, 3) * Rational(3);
  CHECK(x.to_string() == "1/2 - 3*z8^3");
  CHECK(CyclotomicNumber::zero(8).to_string() == "0");
  CHECK(CyclotomicNumber::zeta(8).to_string() == "z8");
}
