#include "qdm/novikov.hpp"

#include <string>

namespace qdm {

namespace {

void require_effective(const CurveVector& d, size_t gens, const char* what) {
  if (d.size() != gens)
    throw ConfigError(std::string(what) + ": curve vector has the wrong length");
  for (int e : d)
    if (e < 0) throw ConfigError(std::string(what) + ": curve class is not effective");
}

}  // namespace

int q_step_denominator(int r) {
  if (r < 2) throw ConfigError("q_step_denominator: codimension must be at least 2");
  return (r % 2 == 0) ? r - 1 : 2 * (r - 1);
}

int q_unit_degree(int r) { return 2 * (r - 1) / q_step_denominator(r); }

EmbeddingContext EmbeddingContext::from_geometry(const BlowupGeometry& g) {
  EmbeddingContext ctx;
  ctx.r = g.codim;
  ctx.s = q_step_denominator(g.codim);
  ctx.field_order = 4L * (g.codim - 1);
  for (const auto& tc : g.total_curves) {
    ctx.total_push.push_back(tc.phi_push);
    ctx.total_exc_dot.push_back(tc.exc_dot);
  }
  const int center_gens = static_cast<int>(g.center.curves.size());
  for (int i = 0; i < center_gens; ++i) {
    ctx.center_push.push_back(g.center_curve_push[i]);
    CurveVector unit(center_gens, 0);
    unit[i] = 1;
    Rational rd = g.rho_dot(unit);
    if (denominator(rd) != 1)
      throw ConfigError("embedding: rho_Z pairs non-integrally with a center curve generator");
    ctx.center_rho_dot.push_back(static_cast<long>(numerator(rd)));
  }
  return ctx;
}

EmbeddedMonomial embed_total_curve(const EmbeddingContext& ctx, const CurveVector& dt) {
  require_effective(dt, ctx.total_push.size(), "embed_total_curve");
  EmbeddedMonomial m;
  if (!ctx.total_push.empty()) m.base.assign(ctx.total_push[0].size(), 0);
  for (size_t i = 0; i < dt.size(); ++i) {
    for (size_t k = 0; k < m.base.size(); ++k) m.base[k] += dt[i] * ctx.total_push[i][k];
    m.q_num -= dt[i] * ctx.total_exc_dot[i] * ctx.s;
  }
  return m;
}

EmbeddedMonomial embed_center_curve(const EmbeddingContext& ctx, const CurveVector& d) {
  require_effective(d, ctx.center_push.size(), "embed_center_curve");
  EmbeddedMonomial m;
  if (!ctx.center_push.empty()) m.base.assign(ctx.center_push[0].size(), 0);
  for (size_t i = 0; i < d.size(); ++i) {
    for (size_t k = 0; k < m.base.size(); ++k) m.base[k] += d[i] * ctx.center_push[i][k];
    long num = ctx.center_rho_dot[i] * ctx.s;
    if (num % (ctx.r - 1) != 0)
      throw ConfigError("embed_center_curve: exponent does not clear the q denominator");
    m.q_num -= static_cast<int>(d[i] * (num / (ctx.r - 1)));
  }
  return m;
}

NovikovImage total_gen_image(const EmbeddingContext& ctx, int gen) {
  CurveVector unit(ctx.total_push.size(), 0);
  unit.at(gen) = 1;
  EmbeddedMonomial m = embed_total_curve(ctx, unit);
  NovikovImage img;
  img.novikov.assign(m.base.begin(), m.base.end());
  img.q_num_shift = m.q_num;
  img.coeff = CyclotomicNumber::one(ctx.field_order);
  return img;
}

NovikovImage center_gen_image(const EmbeddingContext& ctx, int gen, int j) {
  CurveVector unit(ctx.center_push.size(), 0);
  unit.at(gen) = 1;
  EmbeddedMonomial m = embed_center_curve(ctx, unit);
  NovikovImage img;
  img.novikov.assign(m.base.begin(), m.base.end());
  img.q_num_shift = m.q_num;
  img.coeff = CyclotomicNumber::zeta(ctx.field_order,
                                     2 * (2L * j + 1) * ctx.center_rho_dot[gen]);
  return img;
}

SectorConstants sector_constants(int r, int j) {
  if (r < 2) throw ConfigError("sector_constants: codimension must be at least 2");
  if (j < 0 || j > r - 2) throw ConfigError("sector_constants: sector out of range");
  SectorConstants c;
  c.r = r;
  c.j = j;
  c.field_order = 4L * (r - 1);
  const int s = q_step_denominator(r);
  // zeta_{2(r-1)} = zeta_{4(r-1)}^2.
  c.lambda_coeff = -CyclotomicNumber::zeta(c.field_order, -2L * (2 * j + 1));
  c.lambda_q_num = s / (r - 1);
  CyclotomicNumber i_unit = CyclotomicNumber::zeta(c.field_order, r - 1);
  CyclotomicNumber root = sqrt_integer(r - 1, c.field_order);
  c.qz_coeff = (i_unit * root).inverse() * CyclotomicNumber::zeta(c.field_order, 2L * r * j) *
               CyclotomicNumber::zeta(c.field_order, r);
  // -r/(2(r-1)) over denominator s: -r/2 for even r, -r for odd r.
  c.qz_q_num = (r % 2 == 0) ? -r / 2 : -r;
  c.h_multiple = Rational(2 * j + 1) / Rational(2 * (r - 1));
  return c;
}

namespace {

GradedSeries constant_q_power(const SectorConstants& c, const CyclotomicNumber& coeff, int q_num,
                              VarsPtr vars, long field_order, const TruncationPolicy& pol) {
  if (!vars->has_q() || vars->q_denom() != q_step_denominator(c.r))
    throw ConfigError("sector constant: universe q denominator does not match the codimension");
  if (field_order % c.field_order != 0)
    throw FieldMismatchError("sector constant: field order must contain zeta_{4(r-1)}");
  Monomial m;
  m.e.assign(vars->slot_count(), 0);
  m.e[vars->q_slot()] = static_cast<int16_t>(q_num);
  return GradedSeries::monomial_term(vars, field_order, pol, m, coeff.embedded(field_order));
}

}  // namespace

GradedSeries lambda_term(const SectorConstants& c, VarsPtr vars, long field_order,
                         const TruncationPolicy& pol) {
  return constant_q_power(c, c.lambda_coeff, c.lambda_q_num, vars, field_order, pol);
}

GradedSeries qz_term(const SectorConstants& c, VarsPtr vars, long field_order,
                     const TruncationPolicy& pol) {
  return constant_q_power(c, c.qz_coeff, c.qz_q_num, vars, field_order, pol);
}

VarsPtr make_decomp_vars(const BlowupGeometry& g) {
  std::vector<NovikovGenSpec> nov;
  for (const auto& cg : g.base.curves) nov.push_back({cg.name, cg.ample_weight, 2 * cg.c1});
  std::vector<ParamSpec> params;
  for (const auto& b : g.base.basis)
    params.push_back({"t_" + b.label, 2 - b.degree, b.parity()});
  for (int j = 0; j + 1 < g.codim; ++j)
    for (const auto& b : g.center.basis)
      params.push_back({"s" + std::to_string(j) + "_" + b.label, 2 - b.degree, b.parity()});
  return SeriesVars::make(std::move(nov), true, q_step_denominator(g.codim),
                          q_unit_degree(g.codim), true, std::move(params));
}

}  // namespace qdm
