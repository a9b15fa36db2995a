#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "qdm/config_io.hpp"
#include "qdm/cyclotomic.hpp"
#include "qdm/init_cond.hpp"

using namespace qdm;

namespace {

struct Bundle {
  GeometryConfig cfg;
  VarsPtr vars;
  TruncationPolicy pol;
  InitialConditions init;
};

TruncationPolicy window(int min_q, int max_q, int min_z, int max_z) {
  TruncationPolicy pol;
  pol.min_q_num = min_q;
  pol.max_q_num = max_q;
  pol.min_z = min_z;
  pol.max_z = max_z;
  return pol;
}

const Bundle& bundle(const std::string& name) {
  static std::map<std::string, Bundle> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    Bundle b;
    b.cfg = load_geometry(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    b.vars = make_decomp_vars(g);
    int s = q_step_denominator(g.codim);
    b.pol = g.codim == 2 ? window(-4 * s, 2 * s, -3, 8) : window(-2 * s, s, -3, 10);
    b.init = build_initial_conditions(g, b.vars, b.cfg.field_order, b.pol);
    it = cache.emplace(name, std::move(b)).first;
  }
  return it->second;
}

GradedSeries q_z_term(VarsPtr vars, long f, const TruncationPolicy& pol, int q_num, int z_exp,
                      const Rational& c) {
  Monomial mono = make_monomial(*vars, {{vars->q_slot(), q_num}, {vars->z_slot(), z_exp}});
  return GradedSeries::monomial_term(vars, f, pol, mono, CyclotomicNumber::from_rational(f, c));
}

// One row of the initial block applied to a constant total-space class.
GradedSeries column_combination(const OpSeries& psi, int row, const ClassVector& coords) {
  GradedSeries acc(psi.vars(), psi.field_order(), psi.policy());
  for (size_t col = 0; col < coords.size(); ++col) {
    if (coords[col] == 0) continue;
    acc += psi.entry(row, static_cast<int>(col)).scaled(coords[col]);
  }
  return acc;
}

// Removes the q_{Z,j} prefactor from a sector entry, widening the q window by
// the shift so nothing present gets clipped.
GradedSeries strip_sector_prefactor(const GradedSeries& x, const SectorConstants& cj) {
  TruncationPolicy shifted = x.policy();
  shifted.min_q_num -= cj.qz_q_num;
  shifted.max_q_num -= cj.qz_q_num;
  GradedSeries wide = x.truncated(shifted);
  GradedSeries shift = q_power(x.vars(), x.field_order(), shifted, -cj.qz_q_num)
                           .scaled(cj.qz_coeff.inverse());
  return (shift * wide).truncated(shifted);
}

GradedSeries slice_at_q(const GradedSeries& x, int q_num) {
  return coefficient_extract(x, {{x.vars()->q_slot(), q_num}});
}

bool zero_above_q(const GradedSeries& x, int q_num) {
  TruncationPolicy upper = x.policy();
  upper.min_q_num = q_num + 1;
  return x.truncated(upper).is_zero();
}

}  // namespace

TEST_CASE("equivariant Euler class expands the defining polynomial") {
  const Bundle& b = bundle("P2-blowup-point");
  const CohomologyModel& m = b.cfg.blowup->base;
  long f = b.cfg.field_order;
  TruncationPolicy pol = b.pol;

  std::vector<ClassVector> trivial{m.zero_class(), m.zero_class()};
  CohSeries e1 = equivariant_euler(&m, trivial, Rational(1), b.vars, f, pol);
  CohSeries e2 = equivariant_euler(&m, trivial, Rational(2), b.vars, f, pol);
  CohSeries expect1(&m, b.vars, f, pol);
  expect1.component(m.unit_index) = q_z_term(b.vars, f, pol, 0, 2, Rational(1));
  CHECK(e1 == expect1);
  CohSeries expect2(&m, b.vars, f, pol);
  expect2.component(m.unit_index) = q_z_term(b.vars, f, pol, 0, 2, Rational(4));
  CHECK(e2 == expect2);

  // Rank two with c_1 = h and c_2 = pt: (-nu z)^2 + h (-nu z) + pt.
  int h = m.index_of("h"), pt = m.index_of("pt");
  std::vector<ClassVector> chern{m.basis_vector(h), m.basis_vector(pt)};
  CohSeries e = equivariant_euler(&m, chern, Rational(3), b.vars, f, pol);
  CohSeries expect(&m, b.vars, f, pol);
  expect.component(m.unit_index) = q_z_term(b.vars, f, pol, 0, 2, Rational(9));
  expect.component(h) = q_z_term(b.vars, f, pol, 0, 1, Rational(-3));
  expect.component(pt) = q_z_term(b.vars, f, pol, 0, 0, Rational(1));
  CHECK(e == expect);
}

TEST_CASE("tau is exactly the q-inverse pushforward of the center unit") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    int s = q_step_denominator(g.codim);

    CohSeries expect(&g.base, b.vars, b.cfg.field_order, b.pol);
    for (int i = 0; i < g.base.size(); ++i) {
      if (g.iota_push[g.center.unit_index][i] == 0) continue;
      expect.component(i) =
          q_z_term(b.vars, b.cfg.field_order, b.pol, -s, 0, g.iota_push[g.center.unit_index][i]);
    }
    CHECK(b.init.tau0 == expect);

    std::string witness;
    CHECK_MESSAGE(b.init.tau0.is_homogeneous(2, &witness), witness);
  }
}

TEST_CASE("reduced unit bracket matches its closed form") {
  // With the interaction series disabled and no normalization data the
  // bracket of the unit is e^{z/(c_Z lambda_0)}.
  FourierOptions opt;
  opt.with_g = false;
  FourierData fd;  // rank zero, no weights

  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    const int r = g.codim;
    const int unit_q = q_step_denominator(r) / (r - 1);
    long f = b.cfg.field_order;
    TruncationPolicy pol = window(-3 * unit_q, 0, 0, 8);

    LambdaPolynomial one{{0, g.center.basis_vector(g.center.unit_index)}};
    CohSeries got = fourier_bracket(&g.center, fd, r, one, 0, 12, b.vars, f, pol, opt);

    SectorConstants c0 = sector_constants(r, 0);
    CohSeries expect(&g.center, b.vars, f, pol);
    Rational kfact(1);
    for (int k = 0; k <= 3; ++k) {
      if (k > 0) kfact *= k;
      // (c_Z lambda_0)^{-k} = (-(r-1))^{-k} lambda_coeff^{-k} q^{-k unit}.
      CyclotomicNumber c = c0.lambda_coeff.inverse().pow(k).embedded(f) *
                           (Rational(1) / (pow_rational(Rational(1 - r), k) * kfact));
      Monomial mono = make_monomial(*b.vars, {{b.vars->q_slot(), -k * unit_q},
                                              {b.vars->z_slot(), k}});
      expect.component(g.center.unit_index).add_term(mono, c);
    }
    CHECK(got == expect);
  }
}

TEST_CASE("bracket coefficients are rational over the signed variable") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    const int unit_q = q_step_denominator(g.codim) / (g.codim - 1);
    TruncationPolicy pol = window(-3 * unit_q, g.codim * unit_q, -2, 8);
    int u = default_u_max(g, pol);

    for (int col = 0; col < g.total.size(); ++col) {
      if (g.i_center[col].empty()) continue;
      CAPTURE(col);
      CohSeries bm = fourier_bracket(&g.center, g.fourier, g.codim, g.i_center[col], 0, u,
                                     b.vars, b.cfg.field_order, pol);
      for (int i = 0; i < g.center.size(); ++i) {
        GradedSeries rewritten = minus_q_rewrite(bm.component(i));
        for (const auto& [mono, coeff] : rewritten.terms()) {
          CAPTURE(rewritten.monomial_to_string(mono));
          CHECK(coeff.is_rational());
        }
      }
    }
  }
}

TEST_CASE("sector parameter is exactly its lambda multiple") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    for (int j = 0; j + 1 < g.codim; ++j) {
      CAPTURE(j);
      CohSeries expect(&g.center, b.vars, b.cfg.field_order, b.pol);
      expect.component(g.center.unit_index) =
          lambda_term(b.init.sectors[j], b.vars, b.cfg.field_order, b.pol)
              .scaled(Rational(1 - g.codim));
      CHECK(b.init.sigma0[j] == expect);
      CHECK(b.init.h_multiple[j] == Rational(2 * j + 1, 2 * (g.codim - 1)));
    }
  }

  // For the surface blowup the sector parameter collapses to -q.
  const Bundle& b = bundle("P2-blowup-point");
  CohSeries expect(&b.cfg.blowup->center, b.vars, b.cfg.field_order, b.pol);
  expect.component(0) = q_z_term(b.vars, b.cfg.field_order, b.pol, 1, 0, Rational(-1));
  CHECK(b.init.sigma0[0] == expect);
}

TEST_CASE("initial block leading terms follow the direct-sum asymptotics") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    const OpSeries& psi = b.init.psi0;
    const int nb = g.base.size();
    const int cs = g.center.size();
    const int unit_q = q_step_denominator(g.codim) / (g.codim - 1);
    long f = b.cfg.field_order;

    // Pullbacks of base classes: identity plus strictly q-negative terms in
    // the base block, and the center restriction at the q^0 slice of every
    // sector block with nothing above it.
    for (int i = 0; i < nb; ++i) {
      CAPTURE(g.base.basis[i].label);
      for (int row = 0; row < nb; ++row) {
        GradedSeries got = column_combination(psi, row, g.phi_pull[i]);
        GradedSeries top = slice_at_q(got, 0);
        GradedSeries expect(b.vars, f, psi.policy());
        if (row == i) expect += q_z_term(b.vars, f, psi.policy(), 0, 0, Rational(1));
        CHECK(top == expect);
        CHECK(zero_above_q(got, 0));
      }
      for (int j = 0; j + 1 < g.codim; ++j) {
        SectorConstants cj = sector_constants(g.codim, j);
        for (int k = 0; k < cs; ++k) {
          GradedSeries got = strip_sector_prefactor(
              column_combination(psi, nb + j * cs + k, g.phi_pull[i]), cj);
          GradedSeries expect(b.vars, f, got.policy());
          if (g.iota_pull[i][k] != 0)
            expect += q_z_term(b.vars, f, got.policy(), 0, 0, g.iota_pull[i][k]);
          CHECK(slice_at_q(got, 0) == expect);
          CHECK(zero_above_q(got, 0));
        }
      }
    }

    // Sector images: nothing at q >= 0 in the base block; the sector blocks
    // peak at the lambda power of the image with sign (-1)^l.
    for (int l = 0; l + 1 < g.codim; ++l) {
      for (int kc = 0; kc < cs; ++kc) {
        CAPTURE(l);
        CAPTURE(g.center.basis[kc].label);
        const ClassVector& coords = g.j_push[l][kc];
        for (int row = 0; row < nb; ++row) {
          GradedSeries got = column_combination(psi, row, coords);
          CHECK(zero_above_q(got, -1));
        }
        for (int j = 0; j + 1 < g.codim; ++j) {
          SectorConstants cj = sector_constants(g.codim, j);
          for (int row = 0; row < cs; ++row) {
            GradedSeries got = strip_sector_prefactor(
                column_combination(psi, nb + j * cs + row, coords), cj);
            int peak = (l + 1) * unit_q;
            GradedSeries expect(b.vars, f, got.policy());
            if (row == kc) {
              CyclotomicNumber c = cj.lambda_coeff.pow(l + 1).embedded(f);
              if (l % 2 != 0) c = c * Rational(-1);
              expect.add_term(make_monomial(*b.vars, {}), c);
            }
            CHECK(slice_at_q(got, peak) == expect);
            CHECK(zero_above_q(got, peak));
          }
        }
      }
    }
  }
}

TEST_CASE("surface base block matches the closed forms at depth four") {
  const Bundle& b = bundle("P2-blowup-point");
  const BlowupGeometry& g = *b.cfg.blowup;
  const OpSeries& psi = b.init.psi0;
  long f = b.cfg.field_order;
  const TruncationPolicy& pol = b.pol;
  int c1 = g.total.index_of("1"), cH = g.total.index_of("H");
  int cE = g.total.index_of("E"), cP = g.total.index_of("P");
  int r1 = g.base.index_of("1"), rh = g.base.index_of("h"), rpt = g.base.index_of("pt");

  GradedSeries one = q_z_term(b.vars, f, pol, 0, 0, Rational(1));
  GradedSeries zero(b.vars, f, pol);

  CHECK(psi.entry(r1, c1) == one);
  CHECK(psi.entry(rh, c1) == zero);
  GradedSeries unit_pt = q_z_term(b.vars, f, pol, -2, 0, Rational(1, 2)) +
                         q_z_term(b.vars, f, pol, -3, 1, Rational(2, 3)) +
                         q_z_term(b.vars, f, pol, -4, 2, Rational(3, 2));
  CHECK(psi.entry(rpt, c1) == unit_pt);

  CHECK(psi.entry(r1, cE) == zero);
  CHECK(psi.entry(rh, cE) == zero);
  GradedSeries exc_pt = q_z_term(b.vars, f, pol, -1, 0, Rational(1)) +
                        q_z_term(b.vars, f, pol, -2, 1, Rational(1)) +
                        q_z_term(b.vars, f, pol, -3, 2, Rational(2)) +
                        q_z_term(b.vars, f, pol, -4, 3, Rational(6));
  CHECK(psi.entry(rpt, cE) == exc_pt);

  CHECK(psi.entry(r1, cH) == zero);
  CHECK(psi.entry(rh, cH) == one);
  CHECK(psi.entry(rpt, cH) == zero);
  CHECK(psi.entry(r1, cP) == zero);
  CHECK(psi.entry(rh, cP) == zero);
  CHECK(psi.entry(rpt, cP) == one);
}

TEST_CASE("bracket coefficients are stable under deeper u truncation") {
  const Bundle& b = bundle("P2-blowup-point");
  const BlowupGeometry& g = *b.cfg.blowup;
  SectorConstants c0 = sector_constants(g.codim, 0);
  TruncationPolicy pol = b.pol;
  pol.min_q_num -= c0.qz_q_num;
  pol.max_q_num -= c0.qz_q_num;
  int u = default_u_max(g, b.pol);
  int ce = g.total.index_of("E");

  CohSeries at_default = fourier_bracket(&g.center, g.fourier, g.codim, g.i_center[ce], 0, u,
                                         b.vars, b.cfg.field_order, pol);
  CohSeries deeper = fourier_bracket(&g.center, g.fourier, g.codim, g.i_center[ce], 0, u + 2,
                                     b.vars, b.cfg.field_order, pol);
  CHECK(at_default == deeper);

  // Too shallow a truncation visibly drops interaction terms.
  CohSeries shallow = fourier_bracket(&g.center, g.fourier, g.codim, g.i_center[ce], 0, 4,
                                      b.vars, b.cfg.field_order, pol);
  CHECK(shallow != at_default);
}

TEST_CASE("sector data lives in the expected cyclotomic subfield") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;
    const int nb = g.base.size();
    const int cs = g.center.size();
    long sub = 2 * (g.codim - 1);

    SectorConstants c0 = sector_constants(g.codim, 0);
    for (int col = 0; col < g.total.size(); ++col) {
      for (int k = 0; k < cs; ++k) {
        GradedSeries stripped =
            strip_sector_prefactor(b.init.psi0.entry(nb + k, col), c0);
        for (const auto& [mono, coeff] : stripped.terms()) {
          CAPTURE(stripped.monomial_to_string(mono));
          CHECK(subfield_membership(coeff, sub));
        }
      }
    }
    for (int k = 0; k < cs; ++k)
      for (const auto& [mono, coeff] : b.init.sigma0[0].component(k).terms())
        CHECK(subfield_membership(coeff, sub));
  }
}

TEST_CASE("initial blocks are homogeneous and the base block has no poles") {
  for (const char* name : {"P2-blowup-point", "P3-blowup-point"}) {
    CAPTURE(name);
    const Bundle& b = bundle(name);
    const BlowupGeometry& g = *b.cfg.blowup;

    std::string witness;
    CHECK_MESSAGE(psi_homogeneous(b.init, &witness), witness);

    TruncationPolicy poles = b.pol;
    poles.max_z = -1;
    for (int row = 0; row < g.base.size(); ++row)
      for (int col = 0; col < g.total.size(); ++col)
        CHECK(b.init.psi0.entry(row, col).truncated(poles).is_zero());
  }
}
