#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdm/coh_series.hpp"
#include "qdm/geometry.hpp"
#include "qdm/series.hpp"

namespace qdm {

struct GWError : ArithmeticError {
  using ArithmeticError::ArithmeticError;
};
struct MissingSeedError : GWError {
  using GWError::GWError;
};

// Genus-zero invariants of a model, reconstructed on demand. Configured seeds
// are consulted first; then the unit, dimension, and divisor axioms; then a
// divisor-factorization exchange identity that trades the largest insertion
// for lower curve classes and fewer points. Every value is exact.
class GWStore {
 public:
  explicit GWStore(const CohomologyModel* model);

  const CohomologyModel& model() const { return *model_; }

  // Invariant of basis-class insertions in the given order (odd insertions
  // contribute the sign of sorting them).
  Rational correlator(const CurveVector& d, const std::vector<int>& insertions);
  // Multilinear extension to arbitrary classes.
  Rational correlator_classes(const CurveVector& d, const std::vector<ClassVector>& insertions);

  size_t cache_size() const { return cache_.size(); }

 private:
  struct Key {
    CurveVector d;
    std::vector<int> ins;  // ascending
    bool operator<(const Key& o) const {
      if (d != o.d) return d < o.d;
      return ins < o.ins;
    }
  };
  struct CycleError : GWError {
    using GWError::GWError;
  };

  std::string describe(const Key& k) const;
  Rational resolve(const Key& k);
  Rational resolve_wdvv(const Key& k);
  // One exchange identity for the given choices; nullopt when degenerate.
  std::optional<Rational> wdvv_attempt(const Key& k, size_t special_pos, int h_index,
                                       const ClassVector& cofactor, size_t p_pos, size_t q_pos);

  const CohomologyModel* model_;
  std::map<Key, Rational> cache_;
  std::set<Key> in_progress_;
  std::map<Key, Rational> seeds_;
};

// Effective curve classes of positive total ample weight up to the bound,
// ordered by (weight, exponents).
std::vector<CurveVector> enumerate_curves(const CohomologyModel& model, int max_weight);

// Series universe for quantum-product computations on a model: Novikov
// generators follow the model's curves (degree 2 c1.gen), one parameter per
// basis class (degree 2 - deg, matching parity), and a z variable.
struct QuantumUniverse {
  const CohomologyModel* model = nullptr;
  VarsPtr vars;
  long field_order = 1;
  TruncationPolicy pol;

  static QuantumUniverse make(const CohomologyModel* model, long field_order,
                              TruncationPolicy pol);

  GradedSeries t_param(int basis_index) const;
  GradedSeries novikov_term(const CurveVector& d) const;
  GradedSeries zero() const { return GradedSeries(vars, field_order, pol); }
  GradedSeries one() const;
};

// Cup multiplication operator by a fixed class (no quantum corrections).
OpSeries cup_operator(const QuantumUniverse& u, const ClassVector& c);

// Multiplication by phi_i in the big quantum product at the general point
// tau = sum_i t_i phi_i.
OpSeries star_operator(GWStore& store, const QuantumUniverse& u, int basis_index);
OpSeries star_operator_class(GWStore& store, const QuantumUniverse& u, const ClassVector& c);

// Fundamental solution of z d_i M = (phi_i *) M with M = Id + O(z^{-1}),
// normalized so the Novikov- and parameter-free part is the identity.
OpSeries fundamental_solution(GWStore& store, const QuantumUniverse& u);

// z d_i M - (phi_i *) M, restricted to parameter order max_param_order - 1
// (the top order needs coefficients beyond the window); vanishes iff M is
// flat in the i-th direction as far as the window determines it.
OpSeries flatness_defect(GWStore& store, const QuantumUniverse& u, const OpSeries& m,
                         int basis_index);

// Star operators commute pairwise (associativity of the product); on failure
// names the offending pair.
bool quantum_associativity_holds(GWStore& store, const QuantumUniverse& u, std::string* witness);

// First nonzero invariant within the bounds whose insertions have unbalanced
// Hodge bidegree, described; nullopt when all balance. Keys that are not
// determined by the seeds are skipped.
std::optional<std::string> correlator_bidegree_violation(GWStore& store, int max_weight,
                                                         int max_insertions);

}  // namespace qdm
