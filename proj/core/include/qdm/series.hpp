#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdm/cyclotomic.hpp"

namespace qdm {

struct TruncationOverflow : ArithmeticError {
  using ArithmeticError::ArithmeticError;
};
struct ConvergenceError : ArithmeticError {
  using ArithmeticError::ArithmeticError;
};

// Novikov generator: one monoid generator of effective curve classes. The
// ample weight (pairing with a fixed ample divisor) is the filtration used
// for truncation; the degree is 2 * (first Chern class) . gen.
struct NovikovGenSpec {
  std::string name;
  int ample_weight = 1;
  int degree = 0;
};

struct ParamSpec {
  std::string name;
  int degree = 0;
  int parity = 0;  // 0 even, 1 odd; odd variables square to zero
};

// Variable universe shared by a family of series. Slot layout:
//   [0, novikov_count)          Novikov exponents (non-negative)
//   [q_slot]                    numerator of the fractional q-exponent (any sign)
//   [z_slot]                    z exponent (any sign)
//   [param_slot(0) ... )        parameter exponents (non-negative; odd <= 1)
// q^(1/q_denom) is the smallest q step; its degree is q_unit_degree.
class SeriesVars {
 public:
  static std::shared_ptr<const SeriesVars> make(std::vector<NovikovGenSpec> novikov,
                                                bool with_q, int q_denom, int q_unit_degree,
                                                bool with_z, std::vector<ParamSpec> params);

  int slot_count() const { return slots_; }
  int novikov_count() const { return static_cast<int>(novikov_.size()); }
  const NovikovGenSpec& novikov(int i) const { return novikov_[i]; }
  bool has_q() const { return has_q_; }
  int q_denom() const { return q_denom_; }
  int q_unit_degree() const { return q_unit_degree_; }
  int q_slot() const { return q_slot_; }
  bool has_z() const { return has_z_; }
  int z_slot() const { return z_slot_; }
  int param_count() const { return static_cast<int>(params_.size()); }
  const ParamSpec& param(int i) const { return params_[i]; }
  int param_slot(int i) const { return param_slot0_ + i; }
  int param_index(const std::string& name) const;  // -1 when absent
  int novikov_index(const std::string& name) const;

  bool same_universe(const SeriesVars& o) const;

 private:
  std::vector<NovikovGenSpec> novikov_;
  bool has_q_ = false;
  int q_denom_ = 1;
  int q_unit_degree_ = 0;
  bool has_z_ = false;
  std::vector<ParamSpec> params_;
  int q_slot_ = -1, z_slot_ = -1, param_slot0_ = -1, slots_ = 0;
};

using VarsPtr = std::shared_ptr<const SeriesVars>;

struct Monomial {
  std::vector<int16_t> e;
  bool operator<(const Monomial& o) const { return e < o.e; }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

struct TruncationPolicy {
  int max_novikov_weight = 0;
  int max_param_order = 0;
  int min_q_num = 0, max_q_num = 0;
  int min_z = 0, max_z = 0;
  bool error_on_z_overflow = false;

  bool operator==(const TruncationPolicy&) const = default;

  TruncationPolicy widened(int extra_weight, int extra_order, int extra_q, int extra_z) const;
};

class GradedSeries {
 public:
  GradedSeries() = default;
  GradedSeries(VarsPtr vars, long field_order, TruncationPolicy pol);

  static GradedSeries constant(VarsPtr vars, long field_order, TruncationPolicy pol,
                               const CyclotomicNumber& value);
  static GradedSeries monomial_term(VarsPtr vars, long field_order, TruncationPolicy pol,
                                    const Monomial& mono, const CyclotomicNumber& coeff);

  const VarsPtr& vars() const { return vars_; }
  long field_order() const { return field_order_; }
  const TruncationPolicy& policy() const { return policy_; }
  const std::map<Monomial, CyclotomicNumber>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  void add_term(const Monomial& mono, const CyclotomicNumber& coeff);
  CyclotomicNumber coefficient(const Monomial& mono) const;

  GradedSeries operator-() const;
  GradedSeries& operator+=(const GradedSeries& o);
  GradedSeries& operator-=(const GradedSeries& o);
  friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
  friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
  friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b);
  GradedSeries& operator*=(const GradedSeries& o) { return *this = *this * o; }

  GradedSeries scaled(const CyclotomicNumber& c) const;
  GradedSeries scaled(const Rational& r) const;

  bool operator==(const GradedSeries& o) const;
  bool operator!=(const GradedSeries& o) const { return !(*this == o); }

  // Re-filter terms under a (typically narrower) policy.
  GradedSeries truncated(const TruncationPolicy& pol) const;
  // Map coefficients into Q(zeta_M); requires field_order | M.
  GradedSeries with_field_order(long M) const;

  // Degree/parity bookkeeping (z contributes 2 per power, q contributes
  // q_unit_degree per numerator step; parities: z and q even).
  long degree_of(const Monomial& m) const;
  int parity_of(const Monomial& m) const;
  int novikov_weight(const Monomial& m) const;
  int param_order(const Monomial& m) const;
  // All terms have the given degree and parity; on failure, *witness names
  // the first offending monomial.
  bool is_homogeneous(long degree, int parity, std::string* witness = nullptr) const;
  // All terms share a fixed parity (used for substitution preconditions).
  std::optional<int> uniform_parity() const;

  std::string to_string() const;
  std::string monomial_to_string(const Monomial& m) const;

 private:
  VarsPtr vars_;
  long field_order_ = 1;
  TruncationPolicy policy_;
  std::map<Monomial, CyclotomicNumber> terms_;
};

// exp of a series each of whose terms either has positive Novikov/parameter
// filtration or strictly negative q exponent (so powers leave any window).
GradedSeries series_exp(const GradedSeries& x);
// log of 1 + y with y as above; the constant term of the argument must be 1.
GradedSeries series_log(const GradedSeries& x);
// Inverse of a unit: the Novikov- and parameter-free part must be nonzero
// with a single-term leading q-slice.
GradedSeries series_inverse(const GradedSeries& x);
// Left partial derivative along the i-th parameter (Koszul sign for odd vars).
GradedSeries series_derivative(const GradedSeries& x, int param_index);

// q -> e^{-2 pi i j} q twist: multiplies each coefficient by
// zeta_s^{-j * q_numerator} where s is the q denominator. Requires s | field order.
GradedSeries monodromy_twist(const GradedSeries& x, long j);

// Rewrites coefficients to be taken against powers of (-q) instead of q:
// each term gains zeta_{2s}^{q_numerator}. Requires 2s | field order.
GradedSeries minus_q_rewrite(const GradedSeries& x);

// Keeps only terms matching the given exponents at the given slots, then
// clears those slots (the coefficient series in the remaining variables).
GradedSeries coefficient_extract(const GradedSeries& x,
                                 const std::vector<std::pair<int, int>>& slot_exponents);

struct NovikovImage {
  std::vector<int> novikov;  // exponents in the target generators
  int q_num_shift = 0;
  CyclotomicNumber coeff = CyclotomicNumber::one(1);  // per unit source exponent
  std::optional<GradedSeries> extra;                  // optional multiplier per unit exponent
};

struct SubstPlan {
  VarsPtr target;
  TruncationPolicy policy;
  long field_order = 0;                   // 0 = keep source order
  std::vector<NovikovImage> novikov_images;
  int q_num_scale = 1;
  // One entry per source parameter: either the target parameter index
  // (passthrough) or a series in the target universe.
  std::vector<std::variant<int, GradedSeries>> param_images;
};

// General substitution/rebasing engine. Parameter images must be parity-pure
// matching the source variable and filtration-positive (or q-negative), so
// truncation commutes with substitution up to the policy windows.
GradedSeries substitute(const GradedSeries& src, const SubstPlan& plan);

// Convenience builders.
Monomial make_monomial(const SeriesVars& vars, std::initializer_list<std::pair<int, int>> exps);
GradedSeries q_power(VarsPtr vars, long field_order, TruncationPolicy pol, int q_num);
GradedSeries z_power(VarsPtr vars, long field_order, TruncationPolicy pol, int z_exp);

}  // namespace qdm
