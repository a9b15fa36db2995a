#include "qdm/coh_series.hpp"

#include <sstream>

namespace qdm {

namespace {

// Negates monomials carrying odd parameter content: the sign of moving an odd
// basis class across the scalar.
GradedSeries parity_twist(const GradedSeries& x) {
  GradedSeries out(x.vars(), x.field_order(), x.policy());
  for (const auto& [m, c] : x.terms())
    out.add_term(m, x.parity_of(m) ? -c : c);
  return out;
}

bool escapes_window(const GradedSeries& x, std::string* offender) {
  for (const auto& [m, c] : x.terms()) {
    int w = x.novikov_weight(m) + x.param_order(m);
    int qn = x.vars()->has_q() ? m.e[x.vars()->q_slot()] : 0;
    if (w == 0 && qn >= 0) {
      if (offender) *offender = x.monomial_to_string(m);
      return false;
    }
  }
  return true;
}

long nilpotent_power_bound(const CohSeries& a) {
  const auto& p = a.policy();
  long W = std::max(0, p.max_novikov_weight);
  long P = std::max(0, p.max_param_order);
  long D = std::max(0, -p.min_q_num);
  long Mq = std::max(0, p.max_q_num);
  return (W + P) * (Mq + 1) + D + 2 + a.model()->dim_c + 1;
}

}  // namespace

CohSeries::CohSeries(const CohomologyModel* model, VarsPtr vars, long field_order,
                     TruncationPolicy pol)
    : model_(model), comp_(model->size(), GradedSeries(vars, field_order, pol)) {}

CohSeries CohSeries::from_class(const CohomologyModel* model, VarsPtr vars, long field_order,
                                TruncationPolicy pol, const ClassVector& cls) {
  CohSeries out(model, vars, field_order, pol);
  Monomial unit;
  unit.e.assign(vars->slot_count(), 0);
  for (int i = 0; i < model->size(); ++i)
    if (cls[i] != 0)
      out.comp_[i].add_term(unit, CyclotomicNumber::from_rational(field_order, cls[i]));
  return out;
}

CohSeries CohSeries::basis(const CohomologyModel* model, VarsPtr vars, long field_order,
                           TruncationPolicy pol, int basis_index) {
  return from_class(model, vars, field_order, pol, model->basis_vector(basis_index));
}

bool CohSeries::is_zero() const {
  for (const auto& c : comp_)
    if (!c.is_zero()) return false;
  return true;
}

CohSeries CohSeries::operator-() const {
  CohSeries out = *this;
  for (auto& c : out.comp_) c = -c;
  return out;
}

CohSeries& CohSeries::operator+=(const CohSeries& o) {
  for (int i = 0; i < size(); ++i) comp_[i] += o.comp_[i];
  return *this;
}

CohSeries& CohSeries::operator-=(const CohSeries& o) {
  for (int i = 0; i < size(); ++i) comp_[i] -= o.comp_[i];
  return *this;
}

CohSeries CohSeries::scaled(const CyclotomicNumber& c) const {
  CohSeries out = *this;
  for (auto& x : out.comp_) x = x.scaled(c);
  return out;
}

CohSeries CohSeries::scaled(const Rational& r) const {
  CohSeries out = *this;
  for (auto& x : out.comp_) x = x.scaled(r);
  return out;
}

CohSeries CohSeries::left_mul(const GradedSeries& f) const {
  CohSeries out = *this;
  for (auto& x : out.comp_) x = f * x;
  return out;
}

bool CohSeries::operator==(const CohSeries& o) const {
  if (model_ != o.model_) return false;
  for (int i = 0; i < size(); ++i)
    if (comp_[i] != o.comp_[i]) return false;
  return true;
}

CohSeries CohSeries::truncated(const TruncationPolicy& pol) const {
  CohSeries out = *this;
  for (auto& x : out.comp_) x = x.truncated(pol);
  return out;
}

CohSeries CohSeries::with_field_order(long M) const {
  CohSeries out = *this;
  for (auto& x : out.comp_) x = x.with_field_order(M);
  return out;
}

bool CohSeries::is_homogeneous(long degree, std::string* witness) const {
  for (int i = 0; i < size(); ++i) {
    long want = degree - model_->basis[i].degree;
    int par = static_cast<int>(((want % 2) + 2) % 2);
    std::string w;
    if (!comp_[i].is_homogeneous(want, par, &w)) {
      if (witness) *witness = model_->basis[i].label + ": " + w;
      return false;
    }
  }
  return true;
}

std::string CohSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < size(); ++i) {
    if (comp_[i].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "[" << comp_[i].to_string() << "] " << model_->basis[i].label;
  }
  if (first) os << "0";
  return os.str();
}

CohSeries cup(const CohSeries& a, const CohSeries& b) {
  CohSeries out(a.model(), a.vars(), a.field_order(), a.policy());
  const CohomologyModel& m = *a.model();
  for (int i = 0; i < m.size(); ++i) {
    if (a.component(i).is_zero()) continue;
    const bool odd_i = m.basis[i].parity() != 0;
    for (int j = 0; j < m.size(); ++j) {
      if (b.component(j).is_zero()) continue;
      GradedSeries prod = odd_i ? a.component(i) * parity_twist(b.component(j))
                                : a.component(i) * b.component(j);
      if (prod.is_zero()) continue;
      const ClassVector& t = m.cup_table[i][j];
      for (int k = 0; k < m.size(); ++k)
        if (t[k] != 0) out.component(k) += prod.scaled(t[k]);
    }
  }
  return out;
}

GradedSeries pair_series(const CohSeries& a, const CohSeries& b) {
  GradedSeries out(a.vars(), a.field_order(), a.policy());
  const CohomologyModel& m = *a.model();
  for (int i = 0; i < m.size(); ++i) {
    if (a.component(i).is_zero()) continue;
    const bool odd_i = m.basis[i].parity() != 0;
    for (int j = 0; j < m.size(); ++j) {
      if (m.pairing[i][j] == 0 || b.component(j).is_zero()) continue;
      GradedSeries prod = odd_i ? a.component(i) * parity_twist(b.component(j))
                                : a.component(i) * b.component(j);
      out += prod.scaled(m.pairing[i][j]);
    }
  }
  return out;
}

GradedSeries integral_series(const CohSeries& a) {
  GradedSeries out(a.vars(), a.field_order(), a.policy());
  const CohomologyModel& m = *a.model();
  for (int i = 0; i < m.size(); ++i) {
    Rational v = m.integral(m.basis_vector(i));
    if (v != 0) out += a.component(i).scaled(v);
  }
  return out;
}

CohSeries coh_exp(const CohSeries& a) {
  std::string off;
  if (!escapes_window(a.component(a.model()->unit_index), &off))
    throw ConvergenceError("coh_exp: unit component term blocks convergence: " + off);
  CohSeries acc = CohSeries::basis(a.model(), a.vars(), a.field_order(), a.policy(),
                                   a.model()->unit_index);
  CohSeries power = acc;
  const long bound = nilpotent_power_bound(a);
  Rational kfact(1);
  for (long k = 1; k <= bound; ++k) {
    power = cup(power, a);
    if (power.is_zero()) return acc;
    kfact *= k;
    acc += power.scaled(Rational(1) / kfact);
  }
  throw ConvergenceError("coh_exp: did not terminate (internal bound)");
}

CohSeries coh_log_1p(const CohSeries& y) {
  std::string off;
  if (!escapes_window(y.component(y.model()->unit_index), &off))
    throw ConvergenceError("coh_log_1p: unit component term blocks convergence: " + off);
  CohSeries acc(y.model(), y.vars(), y.field_order(), y.policy());
  CohSeries power = CohSeries::basis(y.model(), y.vars(), y.field_order(), y.policy(),
                                     y.model()->unit_index);
  const long bound = nilpotent_power_bound(y);
  for (long k = 1; k <= bound; ++k) {
    power = cup(power, y);
    if (power.is_zero()) return acc;
    acc += power.scaled(Rational((k % 2) ? 1 : -1, k));
  }
  throw ConvergenceError("coh_log_1p: did not terminate (internal bound)");
}

OpSeries::OpSeries(int rows, int cols, VarsPtr vars, long field_order, TruncationPolicy pol)
    : rows_(rows), cols_(cols),
      m_(static_cast<size_t>(rows) * cols, GradedSeries(vars, field_order, pol)) {}

OpSeries OpSeries::identity(int n, VarsPtr vars, long field_order, TruncationPolicy pol) {
  OpSeries out(n, n, vars, field_order, pol);
  Monomial unit;
  unit.e.assign(vars->slot_count(), 0);
  for (int i = 0; i < n; ++i)
    out.entry(i, i).add_term(unit, CyclotomicNumber::one(field_order));
  return out;
}

bool OpSeries::is_zero() const {
  for (const auto& e : m_)
    if (!e.is_zero()) return false;
  return true;
}

OpSeries OpSeries::operator-() const {
  OpSeries out = *this;
  for (auto& e : out.m_) e = -e;
  return out;
}

OpSeries& OpSeries::operator+=(const OpSeries& o) {
  for (size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
  return *this;
}

OpSeries& OpSeries::operator-=(const OpSeries& o) {
  for (size_t i = 0; i < m_.size(); ++i) m_[i] -= o.m_[i];
  return *this;
}

OpSeries OpSeries::scaled(const CyclotomicNumber& c) const {
  OpSeries out = *this;
  for (auto& e : out.m_) e = e.scaled(c);
  return out;
}

OpSeries OpSeries::left_mul(const GradedSeries& f) const {
  OpSeries out = *this;
  for (auto& e : out.m_) e = f * e;
  return out;
}

bool OpSeries::operator==(const OpSeries& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (size_t i = 0; i < m_.size(); ++i)
    if (m_[i] != o.m_[i]) return false;
  return true;
}

OpSeries OpSeries::truncated(const TruncationPolicy& pol) const {
  OpSeries out = *this;
  for (auto& e : out.m_) e = e.truncated(pol);
  return out;
}

OpSeries OpSeries::with_field_order(long M) const {
  OpSeries out = *this;
  for (auto& e : out.m_) e = e.with_field_order(M);
  return out;
}

OpSeries compose(const OpSeries& a, const OpSeries& b, int a_parity) {
  if (a.cols() != b.rows()) throw ArithmeticError("compose: dimension mismatch");
  OpSeries out(a.rows(), b.cols(), a.vars(), a.field_order(), a.policy());
  for (int k = 0; k < a.rows(); ++k)
    for (int j = 0; j < b.cols(); ++j) {
      GradedSeries acc(a.vars(), a.field_order(), a.policy());
      for (int m = 0; m < a.cols(); ++m) {
        if (b.entry(m, j).is_zero() || a.entry(k, m).is_zero()) continue;
        GradedSeries in = (a_parity % 2) ? parity_twist(b.entry(m, j)) : b.entry(m, j);
        acc += in * a.entry(k, m);
      }
      out.entry(k, j) = acc;
    }
  return out;
}

CohSeries apply(const OpSeries& a, const CohSeries& x, int a_parity) {
  if (a.cols() != x.size()) throw ArithmeticError("apply: dimension mismatch");
  CohSeries out(x.model(), a.vars(), a.field_order(), a.policy());
  for (int k = 0; k < a.rows(); ++k) {
    GradedSeries acc(a.vars(), a.field_order(), a.policy());
    for (int j = 0; j < a.cols(); ++j) {
      if (x.component(j).is_zero() || a.entry(k, j).is_zero()) continue;
      GradedSeries in = (a_parity % 2) ? parity_twist(x.component(j)) : x.component(j);
      acc += in * a.entry(k, j);
    }
    out.component(k) = acc;
  }
  return out;
}

CohSeries apply_to_class(const OpSeries& a, const CohomologyModel* out_model,
                         const ClassVector& coords) {
  if (a.cols() != static_cast<int>(coords.size()))
    throw ArithmeticError("apply_to_class: dimension mismatch");
  CohSeries out(out_model, a.vars(), a.field_order(), a.policy());
  for (int k = 0; k < a.rows(); ++k) {
    GradedSeries acc(a.vars(), a.field_order(), a.policy());
    for (int j = 0; j < a.cols(); ++j)
      if (coords[j] != 0) acc += a.entry(k, j).scaled(coords[j]);
    out.component(k) = acc;
  }
  return out;
}

OpSeries op_inverse(const OpSeries& a) {
  if (a.rows() != a.cols()) throw ArithmeticError("op_inverse: operator is not square");
  const int n = a.rows();
  const VarsPtr& vars = a.vars();
  const long order = a.field_order();
  const TruncationPolicy& pol = a.policy();

  // Novikov- and parameter-free slice; its entries are commuting q/z-series.
  OpSeries a0(n, n, vars, order, pol);
  OpSeries rest(n, n, vars, order, pol);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (const auto& [m, c] : a.entry(i, j).terms()) {
        const GradedSeries& e = a.entry(i, j);
        if (e.novikov_weight(m) == 0 && e.param_order(m) == 0)
          a0.entry(i, j).add_term(m, c);
        else
          rest.entry(i, j).add_term(m, c);
      }
    }

  // Gauss-Jordan with invertible-series pivots.
  OpSeries work = a0;
  OpSeries inv0 = OpSeries::identity(n, vars, order, pol);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    GradedSeries pivot_inv;
    for (int row = col; row < n; ++row) {
      if (work.entry(row, col).is_zero()) continue;
      try {
        pivot_inv = series_inverse(work.entry(row, col));
        pivot = row;
        break;
      } catch (const ArithmeticError&) {
      }
    }
    if (pivot < 0) throw ArithmeticError("op_inverse: constant slice is not invertible");
    for (int j = 0; j < n; ++j) {
      std::swap(work.entry(pivot, j), work.entry(col, j));
      std::swap(inv0.entry(pivot, j), inv0.entry(col, j));
    }
    for (int j = 0; j < n; ++j) {
      work.entry(col, j) = pivot_inv * work.entry(col, j);
      inv0.entry(col, j) = pivot_inv * inv0.entry(col, j);
    }
    for (int row = 0; row < n; ++row) {
      if (row == col || work.entry(row, col).is_zero()) continue;
      GradedSeries f = work.entry(row, col);
      for (int j = 0; j < n; ++j) {
        work.entry(row, j) -= f * work.entry(col, j);
        inv0.entry(row, j) -= f * inv0.entry(col, j);
      }
    }
  }

  // a = a0 (Id + a0^{-1} rest); Neumann series in the filtration-positive tail.
  OpSeries t = compose(inv0, rest);
  OpSeries acc = OpSeries::identity(n, vars, order, pol);
  OpSeries power = acc;
  const long bound = (std::max(0, pol.max_novikov_weight) + std::max(0, pol.max_param_order)) + 1;
  for (long k = 1; k <= bound; ++k) {
    power = compose(power, t);
    if (power.is_zero()) break;
    if (k % 2)
      acc -= power;
    else
      acc += power;
  }
  if (!power.is_zero())
    throw ConvergenceError("op_inverse: Neumann tail did not terminate");
  OpSeries result = compose(acc, inv0);
  if (compose(a, result) != OpSeries::identity(n, vars, order, pol))
    throw ArithmeticError("op_inverse: verification against the identity failed");
  return result;
}

}  // namespace qdm
