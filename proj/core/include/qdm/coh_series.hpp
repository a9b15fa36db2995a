#pragma once

#include <vector>

#include "qdm/geometry.hpp"
#include "qdm/series.hpp"

namespace qdm {

// Cohomology-valued series: one scalar series per basis class of a fixed
// model. Coefficients sit to the left of basis classes, so products of odd
// parameters with odd classes pick up crossing signs.
class CohSeries {
 public:
  CohSeries() = default;
  CohSeries(const CohomologyModel* model, VarsPtr vars, long field_order, TruncationPolicy pol);

  static CohSeries from_class(const CohomologyModel* model, VarsPtr vars, long field_order,
                              TruncationPolicy pol, const ClassVector& cls);
  static CohSeries basis(const CohomologyModel* model, VarsPtr vars, long field_order,
                         TruncationPolicy pol, int basis_index);

  const CohomologyModel* model() const { return model_; }
  int size() const { return static_cast<int>(comp_.size()); }
  const GradedSeries& component(int i) const { return comp_[i]; }
  GradedSeries& component(int i) { return comp_[i]; }
  const VarsPtr& vars() const { return comp_[0].vars(); }
  long field_order() const { return comp_[0].field_order(); }
  const TruncationPolicy& policy() const { return comp_[0].policy(); }
  bool is_zero() const;

  CohSeries operator-() const;
  CohSeries& operator+=(const CohSeries& o);
  CohSeries& operator-=(const CohSeries& o);
  friend CohSeries operator+(CohSeries a, const CohSeries& b) { return a += b; }
  friend CohSeries operator-(CohSeries a, const CohSeries& b) { return a -= b; }

  CohSeries scaled(const CyclotomicNumber& c) const;
  CohSeries scaled(const Rational& r) const;
  // f * (this); the scalar enters from the left so no crossing signs appear.
  CohSeries left_mul(const GradedSeries& f) const;

  bool operator==(const CohSeries& o) const;
  bool operator!=(const CohSeries& o) const { return !(*this == o); }

  CohSeries truncated(const TruncationPolicy& pol) const;
  CohSeries with_field_order(long M) const;

  // Every term of component i has degree D - deg(phi_i) and matching parity.
  bool is_homogeneous(long degree, std::string* witness = nullptr) const;

  std::string to_string() const;

 private:
  const CohomologyModel* model_ = nullptr;
  std::vector<GradedSeries> comp_;
};

CohSeries cup(const CohSeries& a, const CohSeries& b);
GradedSeries pair_series(const CohSeries& a, const CohSeries& b);
GradedSeries integral_series(const CohSeries& a);

// Cup-exponential. Unit-component terms must be Novikov/parameter-positive
// or q-negative; positive-degree components are cup-nilpotent, so the sum
// terminates within the truncation window.
CohSeries coh_exp(const CohSeries& a);
// log(unit + y) with y as above.
CohSeries coh_log_1p(const CohSeries& y);

// Operator-valued series: a rows x cols matrix of scalar series over a shared
// variable universe. Entry products multiply with the incoming coefficient on
// the left: (A after B)_kj = sum_m B_mj * A_km. Composing or applying a
// parity-odd operator (multiplication by an odd class has constant entries in
// mixed-parity slots) crosses it over the incoming coefficients, so those
// pick up their parity sign; pass the operator's parity to compose/apply.
class OpSeries {
 public:
  OpSeries() = default;
  OpSeries(int rows, int cols, VarsPtr vars, long field_order, TruncationPolicy pol);

  static OpSeries identity(int n, VarsPtr vars, long field_order, TruncationPolicy pol);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const GradedSeries& entry(int i, int j) const { return m_[i * cols_ + j]; }
  GradedSeries& entry(int i, int j) { return m_[i * cols_ + j]; }
  const VarsPtr& vars() const { return m_[0].vars(); }
  long field_order() const { return m_[0].field_order(); }
  const TruncationPolicy& policy() const { return m_[0].policy(); }
  bool is_zero() const;

  OpSeries operator-() const;
  OpSeries& operator+=(const OpSeries& o);
  OpSeries& operator-=(const OpSeries& o);
  friend OpSeries operator+(OpSeries a, const OpSeries& b) { return a += b; }
  friend OpSeries operator-(OpSeries a, const OpSeries& b) { return a -= b; }
  OpSeries scaled(const CyclotomicNumber& c) const;
  OpSeries left_mul(const GradedSeries& f) const;

  bool operator==(const OpSeries& o) const;
  bool operator!=(const OpSeries& o) const { return !(*this == o); }

  OpSeries truncated(const TruncationPolicy& pol) const;
  OpSeries with_field_order(long M) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<GradedSeries> m_;
};

OpSeries compose(const OpSeries& a, const OpSeries& b, int a_parity = 0);
CohSeries apply(const OpSeries& a, const CohSeries& x, int a_parity = 0);
// Applies to a constant class written in the operator's column basis.
CohSeries apply_to_class(const OpSeries& a, const CohomologyModel* out_model,
                         const ClassVector& coords);

// Inverse of an operator whose Novikov- and parameter-free slice is an
// invertible matrix of q/z-series: exact Gauss-Jordan on that slice with
// series pivots, then a Neumann tail for the filtration-positive rest.
// Verifies a * a^{-1} against the identity within the truncation window.
OpSeries op_inverse(const OpSeries& a);

}  // namespace qdm
