#pragma once

#include "qdm/coh_series.hpp"
#include "qdm/geometry.hpp"
#include "qdm/novikov.hpp"

namespace qdm {

// e_{-nu z}(N): sum_k c_k(N) (-nu z)^{r-k} over the center model, c_0 = 1.
CohSeries equivariant_euler(const CohomologyModel* center, const std::vector<ClassVector>& chern,
                            const Rational& nu, VarsPtr vars, long field_order,
                            const TruncationPolicy& pol);

// How the lambda part of rho_F enters the linear prefactor of the
// stationary-phase expansion. Keeping it (frozen at lambda_0 or varying with
// e^v) produces an unbounded tower of positive fractional powers in the
// bracket of the unit, which breaks both the Laurent-series membership and
// the leading-term asymptotics; only the class part may appear there. The
// alternates exist so the convention scan can demonstrate that failure.
enum class RhoMode { class_part, frozen, varying };

// Convention knobs for the stationary-phase expansion. The defaults are the
// validated set; the alternates exist so the convention scan can demonstrate
// that every other combination breaks a checked structural property.
struct FourierOptions {
  RhoMode rho_mode = RhoMode::class_part;
  // Sign of v in the identification lambda = lambda_0 e^{+-v}, relative to
  // the explicit e^{+v} factor.
  bool flip_identification = false;
  // r_F = fixed_rank + rank_offset.
  int rank_offset = 0;
  // Negate every fixed-point weight (and with it the lambda part of rho_F).
  bool flip_weights = false;
  // Test hook: drop the interaction series g. The reduced bracket of the
  // unit has the closed form e^{z/(c_Z lambda_0)}.
  bool with_g = true;
};

// The u = 0 stationary-phase bracket of the sector-j transform applied to an
// input restriction written as a lambda-polynomial over the center. The full
// transform is q_{Z,j} t^{-rho_Z/((r-1)z)} times this; both prefixes cancel
// against the sector shifts wherever the transform is consumed, so they are
// never materialized. u is truncated at u_max; coefficients beyond q-depth
// (r-1) u_max / 2 are not determined.
CohSeries fourier_bracket(const CohomologyModel* center, const FourierData& fd, int r,
                          const LambdaPolynomial& input, int j, int u_max, VarsPtr vars,
                          long field_order, const TruncationPolicy& pol,
                          const FourierOptions& opt = {});

// Initial data of the decomposition at Q = parameters = 0. sigma0[j] is the
// sector parameter with its formal (2 pi i) rho_Z multiple split off into
// h_multiple; psi0 rows follow the direct-sum layout (base block, then one
// center block per sector).
struct InitialConditions {
  const BlowupGeometry* g = nullptr;
  VarsPtr vars;
  long field_order = 1;
  TruncationPolicy pol;
  std::vector<SectorConstants> sectors;

  CohSeries tau0;                 // base-valued series in q^{-1}
  std::vector<CohSeries> sigma0;  // center-valued, one per sector
  std::vector<Rational> h_multiple;
  OpSeries psi0;  // decomp_rank x total
};

// [z^{-1}] log of the q-shifted Euler-class sum; leading term q^{-1}[Z].
CohSeries tau_init(const BlowupGeometry& g, VarsPtr vars, long field_order,
                   const TruncationPolicy& pol);

// -(r-1) lambda_j plus the [z^{-1}] log of the unit bracket (the latter
// vanishes identically: the bracket has no negative z powers).
CohSeries varsigma_init(const BlowupGeometry& g, int j, int u_max, VarsPtr vars,
                        long field_order, const TruncationPolicy& pol,
                        const FourierOptions& opt = {});

OpSeries psi_init(const BlowupGeometry& g, int u_max, VarsPtr vars, long field_order,
                  const TruncationPolicy& pol, const FourierOptions& opt = {});

// Bundles the pieces above; u_max <= 0 selects default_u_max.
InitialConditions build_initial_conditions(const BlowupGeometry& g, VarsPtr vars,
                                           long field_order, const TruncationPolicy& pol,
                                           int u_max = 0, const FourierOptions& opt = {});

// Smallest u truncation proven to determine every bracket coefficient the
// policy window retains: terms reaching fractional depth D from an input of
// lambda-degree p need at most 6 (p + D) powers of u, because each
// interaction factor costs three powers while regaining one unit of depth.
// The recompute tests diff against u_max + 2 to validate the bound.
int default_u_max(const BlowupGeometry& g, const TruncationPolicy& pol);

// Every psi0 entry is homogeneous: degree deg(col) - deg(row) in the base
// block and deg(col) - deg(row) - r in the sector blocks, parities matching.
bool psi_homogeneous(const InitialConditions& init, std::string* witness = nullptr);

}  // namespace qdm
