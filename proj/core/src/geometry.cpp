#include "qdm/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace qdm {

namespace {

std::string fmt(const std::string& where, const std::string& what) {
  return where + ": " + what;
}

// Row-reduce [A | B] where A is built from columns; returns X with A X = B,
// or nullopt if inconsistent. Free variables are set to zero.
std::optional<std::vector<ClassVector>> solve_columns(const std::vector<ClassVector>& columns,
                                                      const std::vector<ClassVector>& rhs_cols) {
  if (columns.empty()) return std::vector<ClassVector>{};
  const size_t rows = columns[0].size();
  const size_t ncols = columns.size();
  const size_t nrhs = rhs_cols.size();
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(ncols + nrhs, Rational(0)));
  for (size_t j = 0; j < ncols; ++j) {
    if (columns[j].size() != rows) throw ConfigError("solve: ragged matrix");
    for (size_t i = 0; i < rows; ++i) m[i][j] = columns[j][i];
  }
  for (size_t j = 0; j < nrhs; ++j)
    for (size_t i = 0; i < rows; ++i) m[i][ncols + j] = rhs_cols[j][i];
  std::vector<int> pivot_of_col(ncols, -1);
  size_t row = 0;
  for (size_t col = 0; col < ncols && row < rows; ++col) {
    size_t pr = row;
    while (pr < rows && m[pr][col] == 0) ++pr;
    if (pr == rows) continue;
    std::swap(m[row], m[pr]);
    const Rational lead = m[row][col];
    for (auto& v : m[row]) v /= lead;
    for (size_t i = 0; i < rows; ++i) {
      if (i == row || m[i][col] == 0) continue;
      const Rational f = m[i][col];
      for (size_t j = col; j < ncols + nrhs; ++j) m[i][j] -= f * m[row][j];
    }
    pivot_of_col[col] = static_cast<int>(row);
    ++row;
  }
  for (size_t i = row; i < rows; ++i)
    for (size_t j = 0; j < nrhs; ++j)
      if (m[i][ncols + j] != 0) return std::nullopt;
  std::vector<ClassVector> out(nrhs, ClassVector(ncols, Rational(0)));
  for (size_t col = 0; col < ncols; ++col) {
    if (pivot_of_col[col] < 0) continue;
    for (size_t j = 0; j < nrhs; ++j) out[j][col] = m[pivot_of_col[col]][ncols + j];
  }
  return out;
}

}  // namespace

std::vector<ClassVector> invert_matrix(const std::vector<ClassVector>& columns) {
  const size_t n = columns.size();
  if (n == 0) return {};
  if (columns[0].size() != n) throw ConfigError("invert_matrix: matrix not square");
  std::vector<ClassVector> id(n, ClassVector(n, Rational(0)));
  for (size_t i = 0; i < n; ++i) id[i][i] = Rational(1);
  auto sol = solve_columns(columns, id);
  if (!sol) throw ConfigError("invert_matrix: matrix is singular");
  // Verify exactly (cheap, and guards against free-variable fill-ins).
  for (size_t j = 0; j < n; ++j) {
    ClassVector acc(n, Rational(0));
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i) acc[i] += columns[k][i] * (*sol)[j][k];
    for (size_t i = 0; i < n; ++i)
      if (acc[i] != (i == j ? Rational(1) : Rational(0)))
        throw ConfigError("invert_matrix: verification failed (singular matrix)");
  }
  return *sol;
}

std::optional<ClassVector> solve_linear(const std::vector<ClassVector>& columns,
                                        const ClassVector& rhs) {
  auto sol = solve_columns(columns, {rhs});
  if (!sol) return std::nullopt;
  // Verify the candidate (free variables were zeroed).
  const size_t rows = rhs.size();
  ClassVector acc(rows, Rational(0));
  for (size_t k = 0; k < columns.size(); ++k)
    for (size_t i = 0; i < rows; ++i) acc[i] += columns[k][i] * (*sol)[0][k];
  for (size_t i = 0; i < rows; ++i)
    if (acc[i] != rhs[i]) return std::nullopt;
  return (*sol)[0];
}

int CohomologyModel::index_of(const std::string& label) const {
  for (size_t i = 0; i < basis.size(); ++i)
    if (basis[i].label == label) return static_cast<int>(i);
  throw ConfigError(fmt(name, "unknown basis label '" + label + "'"));
}

ClassVector CohomologyModel::basis_vector(int i) const {
  ClassVector v = zero_class();
  v.at(i) = Rational(1);
  return v;
}

ClassVector CohomologyModel::cup(const ClassVector& a, const ClassVector& b) const {
  ClassVector out = zero_class();
  for (size_t i = 0; i < basis.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < basis.size(); ++j) {
      if (b[j] == 0) continue;
      const Rational f = a[i] * b[j];
      const ClassVector& t = cup_table[i][j];
      for (size_t k = 0; k < basis.size(); ++k) out[k] += f * t[k];
    }
  }
  return out;
}

Rational CohomologyModel::pair(const ClassVector& a, const ClassVector& b) const {
  Rational out(0);
  for (size_t i = 0; i < basis.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < basis.size(); ++j) out += a[i] * b[j] * pairing[i][j];
  }
  return out;
}

Rational CohomologyModel::integral(const ClassVector& a) const {
  return pair(a, basis_vector(unit_index));
}

long CohomologyModel::degree_of(const ClassVector& a) const {
  long deg = -1;
  for (size_t i = 0; i < basis.size(); ++i) {
    if (a[i] == 0) continue;
    if (deg < 0)
      deg = basis[i].degree;
    else if (deg != basis[i].degree)
      throw ConfigError(fmt(name, "inhomogeneous class where homogeneous expected"));
  }
  return deg < 0 ? 0 : deg;
}

bool CohomologyModel::is_zero(const ClassVector& a) const {
  return std::all_of(a.begin(), a.end(), [](const Rational& r) { return r == 0; });
}

long CohomologyModel::c1_dot(const CurveVector& d) const {
  long out = 0;
  for (size_t g = 0; g < curves.size(); ++g) out += static_cast<long>(curves[g].c1) * d[g];
  return out;
}

long CohomologyModel::weight_of(const CurveVector& d) const {
  long out = 0;
  for (size_t g = 0; g < curves.size(); ++g) out += static_cast<long>(curves[g].ample_weight) * d[g];
  return out;
}

Rational CohomologyModel::divisor_dot(const ClassVector& divisor, const CurveVector& d) const {
  Rational out(0);
  for (size_t g = 0; g < curves.size(); ++g) {
    if (d[g] == 0) continue;
    Rational dot(0);
    for (size_t i = 0; i < basis.size(); ++i) dot += divisor[i] * curves[g].divisor_pairing[i];
    out += dot * d[g];
  }
  return out;
}

std::optional<std::vector<CohomologyModel::DivisorFactor>> CohomologyModel::divisor_factorization(
    int basis_index) const {
  const int deg = basis[basis_index].degree;
  std::vector<int> h_indices;
  for (int i = 0; i < size(); ++i)
    if (basis[i].degree == 2) h_indices.push_back(i);
  std::vector<int> lower;
  for (int i = 0; i < size(); ++i)
    if (basis[i].degree == deg - 2) lower.push_back(i);
  if (h_indices.empty() || lower.empty()) return std::nullopt;
  // Unknowns: coefficient for each (h, lower) pair.
  std::vector<ClassVector> columns;
  for (int h : h_indices)
    for (int b : lower) columns.push_back(cup(basis_vector(h), basis_vector(b)));
  auto sol = solve_linear(columns, basis_vector(basis_index));
  if (!sol) return std::nullopt;
  std::vector<DivisorFactor> out;
  size_t idx = 0;
  for (int h : h_indices)
    for (int b : lower) {
      const Rational c = (*sol)[idx++];
      if (c == 0) continue;
      ClassVector cof = zero_class();
      cof[b] = c;
      bool merged = false;
      for (auto& f : out)
        if (f.h_index == h) {
          for (int k = 0; k < size(); ++k) f.cofactor[k] += cof[k];
          merged = true;
          break;
        }
      if (!merged) out.push_back({h, cof});
    }
  return out;
}

void CohomologyModel::validate() const {
  const int n = size();
  auto fail = [&](const std::string& what) { throw ConfigError(fmt(name, what)); };
  if (n == 0) fail("empty basis");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      if (basis[i].label == basis[j].label) fail("duplicate basis label " + basis[i].label);
    if (basis[i].degree < 0 || basis[i].degree > 2 * dim_c) fail("basis degree out of range");
    if (basis[i].p + basis[i].q != basis[i].degree)
      fail("p+q must equal the degree for " + basis[i].label);
    if (basis[i].p < 0 || basis[i].q < 0) fail("negative Hodge index");
  }
  if (unit_index < 0 || unit_index >= n || basis[unit_index].degree != 0)
    fail("unit class missing or has nonzero degree");
  if (static_cast<int>(cup_table.size()) != n) fail("cup table has wrong size");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(cup_table[i].size()) != n) fail("cup table row has wrong size");
    for (int j = 0; j < n; ++j) {
      const ClassVector& t = cup_table[i][j];
      if (static_cast<int>(t.size()) != n) fail("cup entry has wrong size");
      for (int k = 0; k < n; ++k) {
        if (t[k] == 0) continue;
        if (basis[k].degree != basis[i].degree + basis[j].degree)
          fail("cup is not degree-additive at " + basis[i].label + "*" + basis[j].label);
        if (basis[k].p != basis[i].p + basis[j].p || basis[k].q != basis[i].q + basis[j].q)
          fail("cup is not bidegree-additive at " + basis[i].label + "*" + basis[j].label);
      }
      // Graded commutativity.
      const int sign = (basis[i].parity() && basis[j].parity()) ? -1 : 1;
      for (int k = 0; k < n; ++k)
        if (t[k] != cup_table[j][i][k] * sign)
          fail("cup is not graded-commutative at " + basis[i].label + "*" + basis[j].label);
    }
    // Unit acts as identity.
    for (int k = 0; k < n; ++k)
      if (cup_table[unit_index][i][k] != (k == i ? Rational(1) : Rational(0)))
        fail("unit does not act as identity on " + basis[i].label);
  }
  // Associativity.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        ClassVector lhs = cup(cup_table[i][j], basis_vector(k));
        ClassVector rhs = cup(basis_vector(i), cup_table[j][k]);
        if (lhs != rhs)
          fail("cup is not associative at (" + basis[i].label + "," + basis[j].label + "," +
               basis[k].label + ")");
      }
  // Pairing: degree support, graded symmetry, Frobenius property, invertibility.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (pairing[i][j] != 0 && basis[i].degree + basis[j].degree != 2 * dim_c)
        fail("pairing supported off complementary degrees");
      const int sign = (basis[i].parity() && basis[j].parity()) ? -1 : 1;
      if (pairing[i][j] != pairing[j][i] * sign) fail("pairing is not graded-symmetric");
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Rational lhs = pair(cup_table[i][j], basis_vector(k));
        Rational rhs = pair(basis_vector(i), cup_table[j][k]);
        if (lhs != rhs) fail("pairing is not Frobenius");
      }
  if (pairing_inv.empty()) fail("pairing inverse missing (internal)");
  // c1 and ample classes are divisors.
  for (int i = 0; i < n; ++i) {
    if (c1_class[i] != 0 && basis[i].degree != 2) fail("c1 class is not a divisor");
    if (ample_class[i] != 0 && basis[i].degree != 2) fail("ample class is not a divisor");
  }
  for (size_t g = 0; g < curves.size(); ++g) {
    const auto& cg = curves[g];
    if (cg.ample_weight <= 0) fail("curve generator " + cg.name + " has non-positive ample weight");
    if (static_cast<int>(cg.divisor_pairing.size()) != n)
      fail("divisor pairing vector has wrong size for " + cg.name);
    for (int i = 0; i < n; ++i)
      if (cg.divisor_pairing[i] != 0 && basis[i].degree != 2)
        fail("divisor pairing supported off degree 2 for " + cg.name);
    CurveVector unit_curve(curves.size(), 0);
    unit_curve[g] = 1;
    if (divisor_dot(ample_class, unit_curve) != Rational(cg.ample_weight))
      fail("ample weight disagrees with the ample class for " + cg.name);
    if (divisor_dot(c1_class, unit_curve) != Rational(cg.c1))
      fail("c1 disagrees with the c1 class for " + cg.name);
  }
  for (const auto& s : seeds) {
    if (s.curve.size() != curves.size()) fail("seed curve vector has wrong size");
    for (int ins : s.insertions)
      if (ins < 0 || ins >= n) fail("seed insertion index out of range");
    // Dimension axiom: sum of insertion degrees matches the virtual dimension.
    long total = 0;
    for (int ins : s.insertions) total += basis[ins].degree;
    long need = 2L * dim_c + 2 * c1_dot(s.curve) + 2 * (static_cast<long>(s.insertions.size()) - 3);
    if (s.value != 0 && total != need)
      fail("seed violates the dimension constraint");
  }
}

std::vector<Rational> BlowupGeometry::dec_invert(const ClassVector& total_class) const {
  std::vector<Rational> out(decomp_rank(), Rational(0));
  for (int i = 0; i < decomp_rank(); ++i)
    for (int k = 0; k < total.size(); ++k) out[i] += dec_inverse[k][i] * total_class[k];
  return out;
}

ClassVector BlowupGeometry::dec_apply(const ClassVector& base_part,
                                      const std::vector<ClassVector>& center_parts) const {
  if (static_cast<int>(center_parts.size()) != codim - 1)
    throw ConfigError("dec_apply: expected r-1 center components");
  ClassVector out = total.zero_class();
  for (int i = 0; i < base.size(); ++i)
    for (int k = 0; k < total.size(); ++k) out[k] += phi_pull[i][k] * base_part[i];
  for (int l = 0; l < codim - 1; ++l)
    for (int i = 0; i < center.size(); ++i)
      for (int k = 0; k < total.size(); ++k) out[k] += j_push[l][i][k] * center_parts[l][i];
  return out;
}

Rational BlowupGeometry::rho_dot(const CurveVector& center_curve) const {
  return center.divisor_dot(rho_center, center_curve);
}

void BlowupGeometry::validate() const {
  auto fail = [&](const std::string& what) { throw ConfigError(fmt(name, what)); };
  if (codim < 2) fail("codimension must be at least 2");
  base.validate();
  center.validate();
  total.validate();
  if (total.size() != decomp_rank())
    fail("total cohomology rank must equal base + (r-1) * center rank");
  if (center.dim_c + codim != base.dim_c) fail("center dimension plus codimension must match base");
  if (base.dim_c != total.dim_c) fail("base and total dimensions differ");

  const int nB = base.size(), nZ = center.size(), nT = total.size();
  if (static_cast<int>(iota_push.size()) != nZ) fail("iota_push has wrong column count");
  if (static_cast<int>(phi_pull.size()) != nB) fail("phi_pull has wrong column count");
  if (static_cast<int>(j_push.size()) != codim - 1) fail("j_push needs r-1 layers");
  for (int k = 0; k < nZ; ++k)
    if (center.basis[k].degree + 2 * codim != base.degree_of(iota_push[k]) &&
        !base.is_zero(iota_push[k]))
      fail("iota_push does not shift degree by 2r");
  for (int i = 0; i < nB; ++i) {
    if (total.is_zero(phi_pull[i])) fail("phi_pull column vanishes");
    if (total.degree_of(phi_pull[i]) != base.basis[i].degree) fail("phi_pull changes degree");
  }
  // Pullback is a ring map.
  for (int i = 0; i < nB; ++i)
    for (int j = 0; j < nB; ++j) {
      ClassVector lhs = total.cup(phi_pull[i], phi_pull[j]);
      ClassVector rhs = total.zero_class();
      const ClassVector cb = base.cup_table[i][j];
      for (int k = 0; k < nB; ++k)
        for (int t = 0; t < nT; ++t) rhs[t] += phi_pull[k][t] * cb[k];
      if (lhs != rhs) fail("phi_pull is not a ring map");
    }
  for (int l = 0; l < codim - 1; ++l) {
    if (static_cast<int>(j_push[l].size()) != nZ) fail("j_push layer has wrong column count");
    for (int k = 0; k < nZ; ++k)
      if (!total.is_zero(j_push[l][k]) &&
          total.degree_of(j_push[l][k]) != center.basis[k].degree + 2 * (l + 1))
        fail("j_push layer " + std::to_string(l) + " does not shift degree by 2(l+1)");
  }
  if (exceptional_index < 0 || exceptional_index >= nT ||
      total.basis[exceptional_index].degree != 2)
    fail("exceptional divisor class missing or not degree 2");
  // The l = 0 layer applied to the center unit is the exceptional divisor
  // class itself: pushing the unit along the inclusion of the divisor.
  {
    ClassVector e = total.zero_class();
    e[exceptional_index] = Rational(1);
    if (j_push[0][center.unit_index] != e) fail("j_push[0] of the center unit must be E");
  }

  // Derived inverses must verify.
  if (static_cast<int>(dec_matrix.size()) != nT || static_cast<int>(dec_inverse.size()) != nT)
    fail("decomposition matrices missing (internal)");

  // Chern data of the normal bundle.
  if (static_cast<int>(chern_normal.size()) != codim) fail("chern_normal needs r entries");
  for (int i = 0; i < codim; ++i)
    if (!center.is_zero(chern_normal[i]) &&
        center.degree_of(chern_normal[i]) != 2 * (i + 1))
      fail("chern_normal[" + std::to_string(i) + "] has wrong degree");
  if (chern_normal[0] != rho_center) fail("rho_center must equal c_1 of the normal bundle");

  // Excess intersection: iota^* iota_* a = a cup c_r(N).
  for (int k = 0; k < nZ; ++k) {
    ClassVector pushed = iota_push[k];
    // iota^* via the derived adjoint table.
    ClassVector back = center.zero_class();
    for (int i = 0; i < nB; ++i)
      for (int c = 0; c < nZ; ++c) back[c] += iota_pull[i][c] * pushed[i];
    ClassVector expect = center.cup(center.basis_vector(k), chern_normal[codim - 1]);
    if (back != expect) fail("excess intersection (iota^* iota_*) fails on " +
                             center.basis[k].label);
  }
  // Projection formula: iota_*(a) cup x = iota_*(a cup iota^* x).
  for (int k = 0; k < nZ; ++k)
    for (int i = 0; i < nB; ++i) {
      ClassVector lhs = base.cup(iota_push[k], base.basis_vector(i));
      ClassVector pull = center.zero_class();
      for (int c = 0; c < nZ; ++c) pull[c] = iota_pull[i][c];
      ClassVector inner = center.cup(center.basis_vector(k), pull);
      ClassVector rhs = base.zero_class();
      for (int c = 0; c < nZ; ++c)
        for (int t = 0; t < nB; ++t) rhs[t] += iota_push[c][t] * inner[c];
      if (lhs != rhs) fail("projection formula fails");
    }

  // kappa_base columns: identity on pulled-back classes, zero on j-classes.
  if (static_cast<int>(kappa_base.size()) != nT) fail("kappa_base has wrong column count");
  for (int i = 0; i < nB; ++i) {
    ClassVector img(nB, Rational(0));
    for (int t = 0; t < nT; ++t)
      for (int b = 0; b < nB; ++b) img[b] += kappa_base[t][b] * phi_pull[i][t];
    if (img != base.basis_vector(i)) fail("kappa_base is not a left inverse of phi_pull");
  }
  for (int l = 0; l < codim - 1; ++l)
    for (int k = 0; k < nZ; ++k) {
      ClassVector img(nB, Rational(0));
      for (int t = 0; t < nT; ++t)
        for (int b = 0; b < nB; ++b) img[b] += kappa_base[t][b] * j_push[l][k][t];
      if (!base.is_zero(img)) fail("kappa_base does not annihilate exceptional classes");
    }

  // i_center columns: lambda-free restriction on pulled-back classes,
  // (-1)^l lambda^{l+1} on the j classes.
  if (static_cast<int>(i_center.size()) != nT) fail("i_center has wrong column count");
  auto eval_i_center = [&](const ClassVector& total_class) {
    // Returns map lambda_exp -> center class.
    std::vector<ClassVector> out;
    for (int t = 0; t < nT; ++t) {
      if (total_class[t] == 0) continue;
      for (const auto& term : i_center[t]) {
        if (static_cast<int>(out.size()) <= term.lambda_exp)
          out.resize(term.lambda_exp + 1, center.zero_class());
        for (int c = 0; c < nZ; ++c) out[term.lambda_exp][c] += total_class[t] * term.coeff[c];
      }
    }
    return out;
  };
  for (int i = 0; i < nB; ++i) {
    auto poly = eval_i_center(phi_pull[i]);
    ClassVector expect = center.zero_class();
    for (int c = 0; c < nZ; ++c) expect[c] = iota_pull[i][c];
    for (size_t l = 0; l < poly.size(); ++l) {
      if (l == 0) {
        if (poly[0] != expect) fail("i_center of a pulled-back class must be its restriction");
      } else if (!center.is_zero(poly[l])) {
        fail("i_center of a pulled-back class must be lambda-free");
      }
    }
    if (poly.empty() && !center.is_zero(expect))
      fail("i_center of a pulled-back class must be its restriction");
  }
  for (int l = 0; l < codim - 1; ++l)
    for (int k = 0; k < nZ; ++k) {
      auto poly = eval_i_center(j_push[l][k]);
      for (size_t e = 0; e < poly.size(); ++e) {
        ClassVector expect = center.zero_class();
        if (static_cast<int>(e) == l + 1) {
          expect = center.basis_vector(k);
          if (l % 2) for (auto& v : expect) v = -v;
        }
        if (poly[e] != expect)
          fail("i_center on exceptional classes must be (-1)^l lambda^{l+1}");
      }
      if (static_cast<int>(poly.size()) <= l + 1)
        fail("i_center on exceptional classes must reach lambda^{l+1}");
    }

  // Curves.
  if (total_curves.size() != total.curves.size()) fail("total_curves has wrong size");
  if (fiber_gen < 0 || fiber_gen >= static_cast<int>(total.curves.size()))
    fail("fiber generator missing");
  for (size_t g = 0; g < total_curves.size(); ++g) {
    const auto& tc = total_curves[g];
    if (tc.phi_push.size() != base.curves.size()) fail("phi_push has wrong size");
    CurveVector unit_curve(total.curves.size(), 0);
    unit_curve[g] = 1;
    // Degree relation: c1(total).g = c1(base).phi(g) - (r-1) D.g.
    long lhs = total.c1_dot(unit_curve);
    long rhs = base.c1_dot(tc.phi_push) - static_cast<long>(codim - 1) * tc.exc_dot;
    if (lhs != rhs) fail("curve degree relation fails for " + total.curves[g].name);
    // Exceptional pairing consistency with the divisor pairing table.
    ClassVector e_class = total.zero_class();
    e_class[exceptional_index] = Rational(1);
    if (total.divisor_dot(e_class, unit_curve) != Rational(tc.exc_dot))
      fail("exc_dot disagrees with the divisor pairing for " + total.curves[g].name);
  }
  {
    const auto& f = total_curves[fiber_gen];
    for (int x : f.phi_push)
      if (x != 0) fail("fiber line must push forward to zero");
    if (f.exc_dot != -1) fail("fiber line must pair to -1 with the exceptional divisor");
  }
  if (center_curve_push.size() != center.curves.size()) fail("center_curve_push has wrong size");
  for (size_t g = 0; g < center_curve_push.size(); ++g) {
    CurveVector unit_curve(center.curves.size(), 0);
    unit_curve[g] = 1;
    long lhs = center.c1_dot(unit_curve);
    Rational rhs = Rational(base.c1_dot(center_curve_push[g])) - rho_dot(unit_curve);
    if (Rational(lhs) != rhs) fail("center curve degree relation fails");
  }

  // Fourier data.
  int mult_sum = 0;
  for (const auto& w : fourier.weights) {
    if (w.weight == 0) fail("fixed-locus weight must be nonzero");
    if (w.mult <= 0) fail("fixed-locus weight multiplicity must be positive");
    mult_sum += w.mult;
    for (const auto& t : w.log_delta_inv) {
      if (t.z_exp < 1 || t.z_exp % 2 == 0) fail("delta log terms must have odd positive z powers");
      if (t.lambda_exp != -t.z_exp) fail("delta log terms must be functions of z/weight");
    }
  }
  if (mult_sum != fourier.fixed_rank) fail("fixed-locus weight multiplicities must sum to the rank");
  if (fourier.fixed_rank != codim + 1) fail("fixed-locus normal rank must be r+1");
  if (fourier.rho_fixed_class != rho_center)
    fail("fixed-locus rho class part must equal rho_center");
  if (fourier.rho_fixed_lambda != Rational(-(codim - 1)))
    fail("fixed-locus rho lambda part must be -(r-1)");
}

}  // namespace qdm
