#include "qdm/init_cond.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qdm/cyclotomic.hpp"

namespace qdm {

namespace {

CyclotomicNumber cyc_pow(const CyclotomicNumber& c, long e) {
  return e >= 0 ? c.pow(e) : c.inverse().pow(-e);
}

// Pushforward of a center-valued series along the inclusion into the base.
CohSeries push_center(const BlowupGeometry& g, const CohSeries& x) {
  CohSeries out(&g.base, x.vars(), x.field_order(), x.policy());
  for (int k = 0; k < x.size(); ++k) {
    const GradedSeries& s = x.component(k);
    if (s.is_zero()) continue;
    const ClassVector& img = g.iota_push[k];
    for (int i = 0; i < g.base.size(); ++i) {
      if (img[i] == 0) continue;
      out.component(i) += s.scaled(img[i]);
    }
  }
  return out;
}

struct FKey {
  int v = 0, z = 0, lam = 0;
  bool operator<(const FKey& o) const {
    if (v != o.v) return v < o.v;
    if (z != o.z) return z < o.z;
    return lam < o.lam;
  }
};

// Working ring of the stationary-phase bracket: polynomial in v up to u_max,
// Laurent in z and in integer powers of lambda_0, center classes over Q as
// coefficients. Everything in here is rational; roots of unity only enter
// when lambda_0 powers are rewritten into fractional q powers at the end.
class FourierPoly {
 public:
  FourierPoly(const CohomologyModel* center, int u_max, int lam_min, int rise_cost,
              int zv_cut)
      : center_(center), u_max_(u_max), lam_min_(lam_min), rise_cost_(rise_cost),
        zv_cut_(zv_cut) {}

  const CohomologyModel* center() const { return center_; }
  int u_max() const { return u_max_; }
  int lam_min() const { return lam_min_; }
  int rise_cost() const { return rise_cost_; }
  const std::map<FKey, ClassVector>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  FourierPoly like() const {
    return FourierPoly(center_, u_max_, lam_min_, rise_cost_, zv_cut_);
  }

  // A term below the floor can only climb back by rise_cost powers of v per
  // unit of lambda, so anything out of reach of the window is dropped here.
  // Pairing sends a term to z exponent z + v/2, and 2z + v only decreases
  // under multiplication by the class part of the normal-bundle twist (one
  // unit per nilpotent factor, already folded into zv_cut), so 2z + v is cut
  // against the doubled z window.
  void add(const FKey& k, const ClassVector& c) {
    if (center_->is_zero(c)) return;
    if (k.v > u_max_) return;
    if (2 * k.z + k.v > zv_cut_) return;
    if (k.lam + (u_max_ - k.v) / rise_cost_ < lam_min_) return;
    auto it = t_.find(k);
    if (it == t_.end()) {
      t_.emplace(k, c);
    } else {
      for (size_t i = 0; i < c.size(); ++i) it->second[i] += c[i];
      if (center_->is_zero(it->second)) t_.erase(it);
    }
  }

  void add_unit(const FKey& k, const Rational& r) {
    ClassVector c = center_->zero_class();
    c[center_->unit_index] = r;
    add(k, c);
  }

  FourierPoly mul(const FourierPoly& o) const {
    FourierPoly out = like();
    for (const auto& [ka, ca] : t_) {
      for (const auto& [kb, cb] : o.t_) {
        FKey k{ka.v + kb.v, ka.z + kb.z, ka.lam + kb.lam};
        if (k.v > u_max_) continue;
        out.add(k, center_->cup(ca, cb));
      }
    }
    return out;
  }

  FourierPoly& scale(const Rational& r) {
    if (r == 0) {
      t_.clear();
      return *this;
    }
    for (auto& [k, c] : t_)
      for (auto& x : c) x *= r;
    return *this;
  }

  FourierPoly slice_v(int m) const {
    FourierPoly out = like();
    auto lo = t_.lower_bound(FKey{m, std::numeric_limits<int>::min(), 0});
    for (auto it = lo; it != t_.end() && it->first.v == m; ++it) out.add(it->first, it->second);
    return out;
  }

 private:
  const CohomologyModel* center_;
  int u_max_, lam_min_, rise_cost_, zv_cut_;
  std::map<FKey, ClassVector> t_;
};

// exp of an argument whose v-free part sits at strictly negative lambda and
// whose remaining terms carry at least one power of v. The v-free part is
// exponentiated by its (window-terminating) power series; the rest goes
// through the v-graded recursion n F_n = sum_m m A_m F_{n-m}.
FourierPoly fexp(const FourierPoly& a) {
  FourierPoly a0 = a.slice_v(0);
  for (const auto& [k, c] : a0.terms())
    if (k.lam >= 0)
      throw ConvergenceError("fourier exp: v-free argument term at non-negative lambda power");

  FourierPoly e0 = a.like();
  e0.add_unit(FKey{0, 0, 0}, Rational(1));
  FourierPoly power = e0;
  // Each v-free factor lowers lambda by at least one, and a term only
  // survives the floor cut while lambda >= lam_min - u_max / rise_cost.
  int iter_bound = -a.lam_min() + a.u_max() + 2;
  for (int k = 1; !power.is_zero(); ++k) {
    if (k > iter_bound)
      throw ConvergenceError("fourier exp: v-free part failed to terminate");
    power = power.mul(a0).scale(Rational(1) / k);
    for (const auto& [key, c] : power.terms()) e0.add(key, c);
  }

  std::vector<FourierPoly> aslice;
  aslice.reserve(a.u_max() + 1);
  for (int m = 0; m <= a.u_max(); ++m) aslice.push_back(a.slice_v(m));

  std::vector<FourierPoly> f;
  f.reserve(a.u_max() + 1);
  FourierPoly f0 = a.like();
  f0.add_unit(FKey{0, 0, 0}, Rational(1));
  f.push_back(f0);
  for (int n = 1; n <= a.u_max(); ++n) {
    FourierPoly fn = a.like();
    for (int m = 1; m <= n; ++m) {
      if (aslice[m].is_zero()) continue;
      FourierPoly part = aslice[m].mul(f[n - m]).scale(Rational(m, n));
      for (const auto& [key, c] : part.terms()) fn.add(key, c);
    }
    f.push_back(fn);
  }

  FourierPoly fsum = a.like();
  for (const FourierPoly& fn : f)
    for (const auto& [key, c] : fn.terms()) fsum.add(key, c);
  return e0.mul(fsum);
}

// The u = 0 bracket: even powers v^{2K} contract in pairs, each pair
// consuming z d^2/du^2 = (z / (c_Z lambda_0)) d^2/dv^2, i.e. contributing
// z (-1) (r-1)^{-1} lambda_0^{-1}; the combinatorial factor is (2K)!/K!.
// The propagator pairs one power of z per contraction: z/lambda_0 is the
// unique degree-zero choice, and it is what keeps every materialized term at
// the degree of its source once all kernel factors are written as functions
// of lambda / lambda_0 (each of which is degree-zero on its own).
// Integer lambda_0 powers are then rewritten as fractional q powers with the
// branch coefficient (-zeta_{2(r-1)}^{-1})^p carried by lambda_0 = -t^{1/(r-1)}.
CohSeries materialize_bracket(const FourierPoly& e, int r, int j, VarsPtr vars, long field_order,
                              const TruncationPolicy& pol) {
  SectorConstants c0 = sector_constants(r, 0);
  if (field_order % c0.field_order != 0)
    throw FieldMismatchError("fourier bracket: field order must contain Q(zeta_{4(r-1)})");
  if (!vars->has_q() || !vars->has_z())
    throw ConfigError("fourier bracket: universe must carry q and z");
  if (vars->q_denom() != q_step_denominator(r))
    throw ConfigError("fourier bracket: universe q denominator mismatch");

  const CohomologyModel* center = e.center();
  CohSeries out(center, vars, field_order, pol);
  for (const auto& [key, cls] : e.terms()) {
    if (key.v % 2 != 0) continue;
    int K = key.v / 2;
    int out_z = key.z + K;
    int out_lam = key.lam - K;
    Rational w = Rational(factorial_big(2 * K), factorial_big(K));
    if (K % 2 != 0) w = -w;
    w /= pow_rational(Rational(r - 1), K);
    CyclotomicNumber branch = cyc_pow(c0.lambda_coeff, out_lam).embedded(field_order);
    Monomial mono = make_monomial(*vars, {{vars->q_slot(), out_lam * c0.lambda_q_num},
                                          {vars->z_slot(), out_z}});
    for (int i = 0; i < center->size(); ++i) {
      if (cls[i] == 0) continue;
      out.component(i).add_term(mono, branch * (w * cls[i]));
    }
  }
  if (j != 0)
    for (int i = 0; i < center->size(); ++i)
      out.component(i) = monodromy_twist(out.component(i), j);
  return out;
}

// Bound on how many degree-two class factors a nonzero product can absorb;
// this caps the 2z + v deficit accumulated by the class part of rho_F.
int nilpotency_slack(const CohomologyModel& center) {
  int top = 0;
  for (const BasisClass& b : center.basis) top = std::max(top, b.degree);
  return top / 2;
}

// exp of the full stationary-phase argument for a geometry; shared by every
// column and by the sector parameter, since the input restriction enters only
// as a final multiplier.
class FourierKernel {
 public:
  FourierKernel(const CohomologyModel* center, const FourierData& fd, int r, int u_max,
                int lam_min, int z_ceiling, const FourierOptions& opt)
      : center_(center), r_(r), opt_(opt),
        expa_(center, u_max, lam_min, opt.rho_mode == RhoMode::varying ? 1 : 3,
              2 * z_ceiling + nilpotency_slack(*center)) {
    if (r < 2) throw ConfigError("fourier kernel: codimension must be at least 2");
    if (u_max < 2) throw ConfigError("fourier kernel: u truncation too small");

    Rational wsum(0);
    int msum = 0;
    for (const EulerWeight& ew : fd.weights) {
      msum += ew.mult;
      wsum += ew.weight * ew.mult;
    }
    if (msum != fd.fixed_rank)
      throw ConfigError("fourier kernel: weight multiplicities do not sum to the fixed rank");
    if (wsum != fd.rho_fixed_lambda)
      throw ConfigError("fourier kernel: weights do not sum to the lambda part of rho_F");

    const int eps = opt.flip_identification ? -1 : 1;
    const Rational wsign(opt.flip_weights ? -1 : 1);
    const Rational rho_lambda = fd.rho_fixed_lambda * wsign;
    const Rational r_f = Rational(fd.fixed_rank + opt.rank_offset);

    FourierPoly a = expa_.like();
    // e^{v} together with the -v r_F / 2 normalization.
    a.add_unit(FKey{1, 0, 0}, Rational(1) - r_f / 2);
    // -g/z = (r-1) lambda_0 sum_{n>=3} ((n-1)/n!) v^n / z.
    if (opt.with_g)
      for (int n = 3; n <= a.u_max(); ++n)
        a.add_unit(FKey{n, -1, 1}, Rational((r - 1) * (n - 1), 1) / Rational(factorial_big(n)));
    // -v rho_F / z, class part always, lambda part per mode.
    if (!fd.rho_fixed_class.empty()) {
      ClassVector neg = fd.rho_fixed_class;
      for (auto& x : neg) x = -x;
      a.add(FKey{1, -1, 0}, neg);
    }
    if (opt.rho_mode == RhoMode::frozen) {
      a.add_unit(FKey{1, -1, 1}, -rho_lambda);
    } else if (opt.rho_mode == RhoMode::varying) {
      Rational fact(1);
      for (int k = 0; k + 1 <= a.u_max(); ++k) {
        if (k > 0) fact *= k;
        a.add_unit(FKey{1 + k, -1, 1}, -rho_lambda * pow_rational(Rational(eps), k) / fact);
      }
    }
    // Normalization tails, one per fixed-point weight, with lambda identified
    // as lambda_0 e^{eps v}. A weight flip negates odd lambda powers.
    for (const EulerWeight& ew : fd.weights) {
      for (const EulerWeight::LogTerm& lt : ew.log_delta_inv) {
        Rational base = lt.coeff * ew.mult;
        if (opt.flip_weights && (lt.lambda_exp % 2 != 0)) base = -base;
        Rational fact(1);
        for (int k = 0; k <= a.u_max(); ++k) {
          if (k > 0) fact *= k;
          Rational c = base * pow_rational(Rational(eps * lt.lambda_exp), k) / fact;
          a.add_unit(FKey{k, lt.z_exp, lt.lambda_exp}, c);
        }
      }
    }
    expa_ = fexp(a);
  }

  CohSeries bracket(const LambdaPolynomial& input, int j, VarsPtr vars, long field_order,
                    const TruncationPolicy& pol) const {
    const int eps = opt_.flip_identification ? -1 : 1;
    FourierPoly in = expa_.like();
    for (const LambdaTerm& lt : input) {
      if (center_->is_zero(lt.coeff)) continue;
      Rational fact(1);
      for (int k = 0; k <= expa_.u_max(); ++k) {
        if (k > 0) fact *= k;
        Rational c = pow_rational(Rational(eps * lt.lambda_exp), k) / fact;
        ClassVector cls = lt.coeff;
        for (auto& x : cls) x *= c;
        in.add(FKey{k, 0, lt.lambda_exp}, cls);
      }
    }
    return materialize_bracket(expa_.mul(in), r_, j, vars, field_order, pol);
  }

 private:
  const CohomologyModel* center_;
  int r_;
  FourierOptions opt_;
  FourierPoly expa_;
};

// Lowest lambda_0 power the window can retain, conservatively rounded.
int lambda_floor(int r, const TruncationPolicy& pol) {
  int unit = q_step_denominator(r) / (r - 1);
  int f = pol.min_q_num / unit;
  while (f * unit > pol.min_q_num) --f;
  return f;
}

int max_lambda_exp(const CohomologyModel& center, const LambdaPolynomial& lp) {
  int p = 0;
  for (const LambdaTerm& lt : lp)
    if (!center.is_zero(lt.coeff)) p = std::max(p, lt.lambda_exp);
  return p;
}

int max_lambda_exp(const BlowupGeometry& g) {
  int p = 0;
  for (const LambdaPolynomial& lp : g.i_center) p = std::max(p, max_lambda_exp(g.center, lp));
  return p;
}

// Inputs of lambda degree up to p can lift kernel terms by p lambda units,
// so the kernel floor sits that much below what the output window retains.
int kernel_lam_min(int r, const TruncationPolicy& pol, int p_input) {
  return lambda_floor(r, pol) - p_input - 1;
}

LambdaPolynomial unit_restriction(const CohomologyModel& center) {
  LambdaTerm t;
  t.lambda_exp = 0;
  t.coeff = center.zero_class();
  t.coeff[center.unit_index] = 1;
  return {t};
}

// Widened z window for intermediate products of the q^{-k} z^{-k} sums; the
// final results are re-truncated to the caller's policy.
TruncationPolicy widened_for_depth(const TruncationPolicy& pol, int K, int r) {
  TruncationPolicy wide = pol;
  wide.min_z = std::min(pol.min_z, -(K + 2));
  wide.max_z = std::max(pol.max_z, K * r + 2);
  return wide;
}

CohSeries extract_z_inverse(const CohSeries& x, const TruncationPolicy& pol) {
  CohSeries out(x.model(), x.vars(), x.field_order(), pol);
  for (int i = 0; i < x.size(); ++i)
    out.component(i) =
        coefficient_extract(x.component(i), {{x.vars()->z_slot(), -1}}).truncated(pol);
  return out;
}

CohSeries unit_series(const CohomologyModel* model, VarsPtr vars, long field_order,
                      const TruncationPolicy& pol) {
  return CohSeries::basis(model, vars, field_order, pol, model->unit_index);
}

// e^{-x/z} as a cup exponential; x must be z-free with every term q-negative
// or filtration-positive.
CohSeries exp_minus_over_z(const CohSeries& x) {
  GradedSeries zinv = z_power(x.vars(), x.field_order(), x.policy(), -1);
  return coh_exp((-x).left_mul(zinv));
}

CohSeries sigma_interior(const FourierKernel& kernel, const BlowupGeometry& g, int j,
                         VarsPtr vars, long field_order, const TruncationPolicy& pol) {
  CohSeries bunit =
      kernel.bracket(unit_restriction(g.center), j, vars, field_order, pol);
  Monomial zero;
  zero.e.assign(vars->slot_count(), 0);
  if (bunit.component(g.center.unit_index).coefficient(zero) != CyclotomicNumber::one(field_order))
    throw ConvergenceError("sector bracket of the unit is not normalized");
  CohSeries rest = bunit - unit_series(&g.center, vars, field_order, bunit.policy());
  return extract_z_inverse(coh_log_1p(rest), pol);
}

}  // namespace

CohSeries equivariant_euler(const CohomologyModel* center, const std::vector<ClassVector>& chern,
                            const Rational& nu, VarsPtr vars, long field_order,
                            const TruncationPolicy& pol) {
  int r = static_cast<int>(chern.size());
  if (r < 1) throw ConfigError("equivariant euler class: empty Chern data");
  CohSeries out(center, vars, field_order, pol);
  for (int k = 0; k <= r; ++k) {
    ClassVector c = k == 0 ? center->basis_vector(center->unit_index) : chern[k - 1];
    if (center->is_zero(c)) continue;
    GradedSeries zs =
        z_power(vars, field_order, pol, r - k).scaled(pow_rational(-nu, r - k));
    out += CohSeries::from_class(center, vars, field_order, pol, c).left_mul(zs);
  }
  return out;
}

CohSeries tau_init(const BlowupGeometry& g, VarsPtr vars, long field_order,
                   const TruncationPolicy& pol) {
  const int r = g.codim;
  const int s = q_step_denominator(r);
  if (vars->q_denom() != s) throw ConfigError("tau: universe q denominator mismatch");
  const int K = std::max(0, -pol.min_q_num / s);
  TruncationPolicy wide = widened_for_depth(pol, K, r);

  CohSeries sum(&g.base, vars, field_order, wide);
  CohSeries prod = unit_series(&g.center, vars, field_order, wide);
  Rational kfact(1);
  for (int k = 1; k <= K; ++k) {
    kfact *= k;
    Monomial mono = make_monomial(*vars, {{vars->q_slot(), -k * s}, {vars->z_slot(), -k}});
    GradedSeries scalar = GradedSeries::monomial_term(
        vars, field_order, wide, mono,
        CyclotomicNumber::from_rational(field_order, Rational(1) / kfact));
    sum += push_center(g, prod).left_mul(scalar);
    if (k < K)
      prod = cup(prod, equivariant_euler(&g.center, g.chern_normal, Rational(k), vars,
                                         field_order, wide));
  }
  return extract_z_inverse(coh_log_1p(sum), pol);
}

CohSeries varsigma_init(const BlowupGeometry& g, int j, int u_max, VarsPtr vars,
                        long field_order, const TruncationPolicy& pol,
                        const FourierOptions& opt) {
  const int r = g.codim;
  SectorConstants cj = sector_constants(r, j);
  if (pol.max_q_num < cj.lambda_q_num)
    throw ConfigError("sector parameter: q window cannot hold the lambda term");
  if (u_max <= 0) u_max = default_u_max(g, pol);
  FourierKernel kernel(&g.center, g.fourier, r, u_max, kernel_lam_min(r, pol, 0),
                       pol.max_z, opt);
  CohSeries out = sigma_interior(kernel, g, j, vars, field_order, pol);
  out.component(g.center.unit_index) +=
      lambda_term(cj, vars, field_order, pol).scaled(Rational(-(r - 1)));
  return out;
}

OpSeries psi_init(const BlowupGeometry& g, int u_max, VarsPtr vars, long field_order,
                  const TruncationPolicy& pol, const FourierOptions& opt) {
  const int r = g.codim;
  const int s = q_step_denominator(r);
  if (vars->q_denom() != s) throw ConfigError("initial block: universe q denominator mismatch");
  const int nb = g.base.size();
  const int cs = g.center.size();
  const int nt = g.total.size();
  const int K = std::max(0, -pol.min_q_num / s);
  TruncationPolicy wide = widened_for_depth(pol, K, r);
  if (u_max <= 0) u_max = default_u_max(g, pol);

  OpSeries out(g.decomp_rank(), nt, vars, field_order, pol);

  // Base block: e^{-tau/z} (kappa(gamma) + sum_k q^{-k} iota_*(...) / k! z^k),
  // the k = 1 contribution cancelling the z^{-1} pole of the prefactor.
  CohSeries tau0 = tau_init(g, vars, field_order, pol);
  CohSeries pref = exp_minus_over_z(tau0.truncated(wide));
  for (int col = 0; col < nt; ++col) {
    CohSeries acc =
        CohSeries::from_class(&g.base, vars, field_order, wide, g.kappa_base[col]);
    CohSeries prod = unit_series(&g.center, vars, field_order, wide);
    Rational kfact(1);
    for (int k = 1; k <= K; ++k) {
      kfact *= k;
      CohSeries ev(&g.center, vars, field_order, wide);
      for (const LambdaTerm& lt : g.i_center[col]) {
        if (g.center.is_zero(lt.coeff)) continue;
        GradedSeries zs = z_power(vars, field_order, wide, lt.lambda_exp)
                              .scaled(pow_rational(Rational(k), lt.lambda_exp));
        ev += CohSeries::from_class(&g.center, vars, field_order, wide, lt.coeff).left_mul(zs);
      }
      if (!ev.is_zero()) {
        Monomial mono =
            make_monomial(*vars, {{vars->q_slot(), -k * s}, {vars->z_slot(), -k}});
        GradedSeries scalar = GradedSeries::monomial_term(
            vars, field_order, wide, mono,
            CyclotomicNumber::from_rational(field_order, Rational(1) / kfact));
        acc += push_center(g, cup(prod, ev)).left_mul(scalar);
      }
      if (k < K)
        prod = cup(prod, equivariant_euler(&g.center, g.chern_normal, Rational(k), vars,
                                           field_order, wide));
    }
    acc = cup(pref, acc);
    for (int row = 0; row < nb; ++row) out.entry(row, col) = acc.component(row).truncated(pol);
  }

  // Sector blocks: q_{Z,j} e^{-w_j/z} B_j(restriction of gamma), where w_j is
  // the z^{-1} log coefficient of the unit bracket (identically zero when the
  // bracket has no negative z powers, which the counting argument guarantees;
  // kept in the formula for shape).
  FourierKernel kernel(&g.center, g.fourier, r, u_max,
                       kernel_lam_min(r, pol, max_lambda_exp(g)), pol.max_z, opt);
  for (int j = 0; j + 1 < r; ++j) {
    SectorConstants cj = sector_constants(r, j);
    TruncationPolicy bpol = pol;
    bpol.min_q_num = pol.min_q_num - cj.qz_q_num;
    bpol.max_q_num = pol.max_q_num - cj.qz_q_num;
    GradedSeries qz = qz_term(cj, vars, field_order, pol);
    CohSeries w = sigma_interior(kernel, g, j, vars, field_order, bpol);
    CohSeries wexp = w.is_zero() ? unit_series(&g.center, vars, field_order, bpol)
                                 : exp_minus_over_z(w.truncated(widened_for_depth(bpol, K, r)));
    for (int col = 0; col < nt; ++col) {
      CohSeries b = kernel.bracket(g.i_center[col], j, vars, field_order, bpol);
      CohSeries zb = cup(wexp, b).left_mul(qz);
      for (int k = 0; k < cs; ++k)
        out.entry(nb + j * cs + k, col) = zb.component(k).truncated(pol);
    }
  }
  return out;
}

CohSeries fourier_bracket(const CohomologyModel* center, const FourierData& fd, int r,
                          const LambdaPolynomial& input, int j, int u_max, VarsPtr vars,
                          long field_order, const TruncationPolicy& pol,
                          const FourierOptions& opt) {
  FourierKernel kernel(center, fd, r, u_max,
                       kernel_lam_min(r, pol, max_lambda_exp(*center, input)), pol.max_z,
                       opt);
  return kernel.bracket(input, j, vars, field_order, pol);
}

int default_u_max(const BlowupGeometry& g, const TruncationPolicy& pol) {
  const int r = g.codim;
  const int unit = q_step_denominator(r) / (r - 1);
  SectorConstants c0 = sector_constants(r, 0);
  // Depth needed by the shifted column brackets and by the unit bracket.
  int deep_cols = std::max(0, -(pol.min_q_num - c0.qz_q_num));
  int deep_unit = std::max(0, -pol.min_q_num);
  int d_cols = (deep_cols + unit - 1) / unit;
  int d_unit = (deep_unit + unit - 1) / unit;
  int p_max = max_lambda_exp(g);
  return std::max(6 * (p_max + d_cols), std::max(6 * d_unit, 4));
}

InitialConditions build_initial_conditions(const BlowupGeometry& g, VarsPtr vars,
                                           long field_order, const TruncationPolicy& pol,
                                           int u_max, const FourierOptions& opt) {
  if (u_max <= 0) u_max = default_u_max(g, pol);
  InitialConditions init;
  init.g = &g;
  init.vars = vars;
  init.field_order = field_order;
  init.pol = pol;
  init.tau0 = tau_init(g, vars, field_order, pol);
  for (int j = 0; j + 1 < g.codim; ++j) {
    init.sectors.push_back(sector_constants(g.codim, j));
    init.sigma0.push_back(varsigma_init(g, j, u_max, vars, field_order, pol, opt));
    init.h_multiple.push_back(init.sectors.back().h_multiple);
  }
  init.psi0 = psi_init(g, u_max, vars, field_order, pol, opt);
  return init;
}

bool psi_homogeneous(const InitialConditions& init, std::string* witness) {
  const BlowupGeometry& g = *init.g;
  const int nb = g.base.size();
  const int cs = g.center.size();
  for (int col = 0; col < g.total.size(); ++col) {
    const BasisClass& bc = g.total.basis[col];
    for (int row = 0; row < init.psi0.rows(); ++row) {
      const BasisClass& br = row < nb ? g.base.basis[row] : g.center.basis[(row - nb) % cs];
      long shift = row < nb ? 0 : -g.codim;
      long need = bc.degree + shift - br.degree;
      int parity = (bc.parity() + br.parity()) % 2;
      std::string local;
      if (!init.psi0.entry(row, col).is_homogeneous(need, parity, &local)) {
        if (witness)
          *witness = "entry (" + br.label + " <- " + bc.label + "): " + local;
        return false;
      }
    }
  }
  return true;
}

}  // namespace qdm
