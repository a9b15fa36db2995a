#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdm/rational.hpp"

namespace qdm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ClassVector = std::vector<Rational>;  // coordinates in a model's basis
using CurveVector = std::vector<int>;       // exponents over a model's curve generators

struct BasisClass {
  std::string label;
  int degree = 0;  // real cohomological degree
  int p = 0, q = 0;
  int parity() const { return degree & 1; }
};

struct CurveGen {
  std::string name;
  int ample_weight = 1;
  int c1 = 0;                     // first Chern class paired with the generator
  ClassVector divisor_pairing;    // pairing of each basis class with the generator
};

struct GWSeed {
  CurveVector curve;
  std::vector<int> insertions;  // basis indices, any order
  Rational value;
};

// A finite-dimensional graded Frobenius algebra presented by structure
// constants, together with its curve-class monoid and seeded invariants.
class CohomologyModel {
 public:
  std::string name;
  int dim_c = 0;
  std::vector<BasisClass> basis;
  std::vector<std::vector<ClassVector>> cup_table;  // cup_table[i][j]
  std::vector<ClassVector> pairing;                 // pairing[i][j]
  std::vector<ClassVector> pairing_inv;
  int unit_index = -1;
  ClassVector c1_class;
  ClassVector ample_class;
  std::vector<CurveGen> curves;
  std::vector<GWSeed> seeds;

  int size() const { return static_cast<int>(basis.size()); }
  int index_of(const std::string& label) const;  // throws on unknown label
  ClassVector basis_vector(int i) const;
  ClassVector zero_class() const { return ClassVector(basis.size(), Rational(0)); }

  ClassVector cup(const ClassVector& a, const ClassVector& b) const;
  Rational pair(const ClassVector& a, const ClassVector& b) const;
  Rational integral(const ClassVector& a) const;  // pairing against the unit
  long degree_of(const ClassVector& a) const;      // throws if inhomogeneous
  bool is_zero(const ClassVector& a) const;

  long c1_dot(const CurveVector& d) const;
  long weight_of(const CurveVector& d) const;
  Rational divisor_dot(const ClassVector& divisor, const CurveVector& d) const;

  // Writes a as sum of h cup b over degree-2 basis classes h; empty if the
  // class is not divisor-generated.
  struct DivisorFactor {
    int h_index;
    ClassVector cofactor;
  };
  std::optional<std::vector<DivisorFactor>> divisor_factorization(int basis_index) const;

  void validate() const;  // throws ConfigError naming the violated invariant
};

struct LambdaTerm {
  int lambda_exp = 0;
  ClassVector coeff;  // class on the blowup center
};
using LambdaPolynomial = std::vector<LambdaTerm>;

struct EulerWeight {
  Rational weight;  // multiple of lambda carried by this piece of the normal bundle
  int mult = 1;
  // log of the inverse Gamma-type normalization for one such piece:
  // sum of coeff * z^{z_exp} * lambda^{lambda_exp} (class part is a multiple
  // of the unit on the center).
  struct LogTerm {
    int z_exp = 0;
    int lambda_exp = 0;
    Rational coeff;
  };
  std::vector<LogTerm> log_delta_inv;
};

struct FourierData {
  int fixed_rank = 0;                 // rank of the normal bundle at the fixed locus
  ClassVector rho_fixed_class;        // H^2(center) part of its first Chern class
  Rational rho_fixed_lambda;          // lambda coefficient of the same
  std::vector<EulerWeight> weights;
};

// Blowup of `base` along `center` with exceptional divisor data. All tables
// are exact and validated against each other at load time.
class BlowupGeometry {
 public:
  std::string name;
  long field_order = 4;
  int codim = 2;  // r

  CohomologyModel base;    // X
  CohomologyModel center;  // Z
  CohomologyModel total;   // the blowup

  ClassVector rho_center;                    // c_1 of the normal bundle, on center
  std::vector<ClassVector> chern_normal;     // c_1..c_r of the normal bundle
  std::vector<ClassVector> iota_push;        // columns: center basis -> base classes
  std::vector<ClassVector> phi_pull;         // columns: base basis -> total classes
  std::vector<std::vector<ClassVector>> j_push;  // j_push[l][k]: center basis k -> total class
  int exceptional_index = -1;                // index of the exceptional divisor class in total

  std::vector<ClassVector> kappa_base;       // columns: total basis -> base classes
  std::vector<LambdaPolynomial> i_center;    // columns: total basis -> center classes with lambda

  // Curve data.
  struct TotalCurve {
    CurveVector phi_push;  // image in the base curve monoid
    int exc_dot = 0;       // pairing with the exceptional divisor
  };
  std::vector<TotalCurve> total_curves;  // parallel to total.curves
  int fiber_gen = -1;                    // index of the exceptional fiber line
  std::vector<CurveVector> center_curve_push;  // center gens -> base curve monoid

  FourierData fourier;

  // Derived at load.
  std::vector<ClassVector> iota_pull;    // adjoint of iota_push
  std::vector<ClassVector> dec_matrix;   // columns of [phi_pull | j_push 0..r-2]
  std::vector<ClassVector> dec_inverse;

  int decomp_rank() const { return base.size() + (codim - 1) * center.size(); }

  // The direct-sum coordinates of a class on the total space: base component
  // followed by r-1 center components.
  std::vector<Rational> dec_invert(const ClassVector& total_class) const;
  ClassVector dec_apply(const ClassVector& base_part,
                        const std::vector<ClassVector>& center_parts) const;

  Rational rho_dot(const CurveVector& center_curve) const;

  void validate() const;
};

// Exact Gaussian helpers shared by the geometry layer.
std::vector<ClassVector> invert_matrix(const std::vector<ClassVector>& columns);
std::optional<ClassVector> solve_linear(const std::vector<ClassVector>& columns,
                                        const ClassVector& rhs);

}  // namespace qdm
