#pragma once

#include "qdm/geometry.hpp"
#include "qdm/series.hpp"

namespace qdm {

// q-step denominator s for codimension r: r-1 when r is even, 2(r-1) when r
// is odd. Chosen so that deg q^{1/s} = 2(r-1)/s is an integer and so that
// -r/(2(r-1)) clears the denominator (the fractional power carried by the
// sector normalizations below).
int q_step_denominator(int r);
int q_unit_degree(int r);

// Push-forward tables for rewriting the Novikov variables of a blowup and of
// its center over the common ring in (Q, q^{1/s}). Curve vectors on the
// total space map through phi_*, center curves through iota_*.
struct EmbeddingContext {
  int r = 2;
  int s = 1;
  long field_order = 4;  // 4(r-1)
  std::vector<CurveVector> total_push;   // total curve gens -> base monoid
  std::vector<int> total_exc_dot;        // exceptional divisor . gen
  std::vector<CurveVector> center_push;  // center curve gens -> base monoid
  std::vector<long> center_rho_dot;      // rho_Z . gen, an integer per gen

  static EmbeddingContext from_geometry(const BlowupGeometry& g);
};

// A monomial Q^d q^{q_num/s} of the common ring.
struct EmbeddedMonomial {
  CurveVector base;
  int q_num = 0;
};

// Qt^{dt} -> Q^{phi_* dt} q^{-D.dt}. Both sides have the same degree:
// c_1 of the blowup is phi^* c_1(X) - (r-1) D.
EmbeddedMonomial embed_total_curve(const EmbeddingContext& ctx, const CurveVector& dt);
// Q_Z^d -> Q^{iota_* d} q^{-rho_Z.d/(r-1)}; (r-1) | s makes the exponent
// integral over s.
EmbeddedMonomial embed_center_curve(const EmbeddingContext& ctx, const CurveVector& d);

// Substitution images of single generators for rebasing whole series. The
// center image for sector j carries the coefficient zeta_{2(r-1)}^{(2j+1)
// rho_Z.gen}: the divisor shift of the j-th sector acts on the embedded
// Novikov monomial as this root of unity.
NovikovImage total_gen_image(const EmbeddingContext& ctx, int gen);
NovikovImage center_gen_image(const EmbeddingContext& ctx, int gen, int j);

// Closed-form constants of the j-th sector, 0 <= j <= r-2, over the field
// Q(zeta_{4(r-1)}). Fractional powers follow the fixed branch
// (e^{-pi i})^{k/N} = zeta_{2N}^{-k}, under which
//   lambda_j  = -zeta_{2(r-1)}^{-(2j+1)} q^{1/(r-1)},
//   q_{Z,j}   = (i sqrt(r-1))^{-1} zeta_{2(r-1)}^{rj} zeta_{4(r-1)}^{r}
//               q^{-r/(2(r-1))},
//   h_{Z,j}   = ((2j+1)/(2(r-1))) * (2 pi i) rho_Z, kept as a rational
//               multiple of the formal symbol (2 pi i) rho_Z.
struct SectorConstants {
  int r = 0, j = 0;
  long field_order = 0;
  CyclotomicNumber lambda_coeff;
  int lambda_q_num = 0;  // q-exponent numerator over s
  CyclotomicNumber qz_coeff;
  int qz_q_num = 0;
  Rational h_multiple;  // of (2 pi i) rho_Z
};

SectorConstants sector_constants(int r, int j);

// lambda_j and q_{Z,j} as one-term series; the universe's q-denominator must
// equal s and the field order must be a multiple of 4(r-1).
GradedSeries lambda_term(const SectorConstants& c, VarsPtr vars, long field_order,
                         const TruncationPolicy& pol);
GradedSeries qz_term(const SectorConstants& c, VarsPtr vars, long field_order,
                     const TruncationPolicy& pol);

// Variable universe of the common ring for a blowup: the base model's
// Novikov generators, q^{1/s}, z, parameters t_<label> per base class and
// s<j>_<label> per center class for each sector j.
VarsPtr make_decomp_vars(const BlowupGeometry& g);

}  // namespace qdm
