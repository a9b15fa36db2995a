#include "qdm/series.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace qdm {

std::shared_ptr<const SeriesVars> SeriesVars::make(std::vector<NovikovGenSpec> novikov,
                                                   bool with_q, int q_denom, int q_unit_degree,
                                                   bool with_z, std::vector<ParamSpec> params) {
  auto v = std::make_shared<SeriesVars>();
  for (const auto& g : novikov)
    if (g.ample_weight <= 0) throw ArithmeticError("SeriesVars: ample weight must be positive");
  if (with_q && q_denom <= 0) throw ArithmeticError("SeriesVars: q denominator must be positive");
  for (const auto& p : params)
    if (p.parity != 0 && p.parity != 1) throw ArithmeticError("SeriesVars: parity must be 0 or 1");
  v->novikov_ = std::move(novikov);
  v->has_q_ = with_q;
  v->q_denom_ = with_q ? q_denom : 1;
  v->q_unit_degree_ = with_q ? q_unit_degree : 0;
  v->has_z_ = with_z;
  v->params_ = std::move(params);
  int s = static_cast<int>(v->novikov_.size());
  v->q_slot_ = with_q ? s++ : -1;
  v->z_slot_ = with_z ? s++ : -1;
  v->param_slot0_ = s;
  s += static_cast<int>(v->params_.size());
  v->slots_ = s;
  return v;
}

int SeriesVars::param_index(const std::string& name) const {
  for (size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return static_cast<int>(i);
  return -1;
}

int SeriesVars::novikov_index(const std::string& name) const {
  for (size_t i = 0; i < novikov_.size(); ++i)
    if (novikov_[i].name == name) return static_cast<int>(i);
  return -1;
}

bool SeriesVars::same_universe(const SeriesVars& o) const {
  if (this == &o) return true;
  if (novikov_.size() != o.novikov_.size() || params_.size() != o.params_.size()) return false;
  for (size_t i = 0; i < novikov_.size(); ++i) {
    const auto& a = novikov_[i];
    const auto& b = o.novikov_[i];
    if (a.name != b.name || a.ample_weight != b.ample_weight || a.degree != b.degree) return false;
  }
  if (has_q_ != o.has_q_ || q_denom_ != o.q_denom_ || q_unit_degree_ != o.q_unit_degree_ ||
      has_z_ != o.has_z_)
    return false;
  for (size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = o.params_[i];
    if (a.name != b.name || a.degree != b.degree || a.parity != b.parity) return false;
  }
  return true;
}

TruncationPolicy TruncationPolicy::widened(int extra_weight, int extra_order, int extra_q,
                                           int extra_z) const {
  TruncationPolicy p = *this;
  p.max_novikov_weight += extra_weight;
  p.max_param_order += extra_order;
  p.min_q_num -= extra_q;
  p.max_q_num += extra_q;
  p.min_z -= extra_z;
  p.max_z += extra_z;
  return p;
}

GradedSeries::GradedSeries(VarsPtr vars, long field_order, TruncationPolicy pol)
    : vars_(std::move(vars)), field_order_(field_order), policy_(pol) {
  if (!vars_) throw ArithmeticError("GradedSeries: null universe");
  if (field_order_ < 1) throw ArithmeticError("GradedSeries: bad field order");
}

GradedSeries GradedSeries::constant(VarsPtr vars, long field_order, TruncationPolicy pol,
                                    const CyclotomicNumber& value) {
  GradedSeries s(std::move(vars), field_order, pol);
  Monomial m;
  m.e.assign(s.vars_->slot_count(), 0);
  s.add_term(m, value);
  return s;
}

GradedSeries GradedSeries::monomial_term(VarsPtr vars, long field_order, TruncationPolicy pol,
                                         const Monomial& mono, const CyclotomicNumber& coeff) {
  GradedSeries s(std::move(vars), field_order, pol);
  s.add_term(mono, coeff);
  return s;
}

namespace {

bool policy_keeps(const SeriesVars& v, const TruncationPolicy& p, const Monomial& m,
                  bool* z_overflow = nullptr) {
  int w = 0, ord = 0;
  for (int i = 0; i < v.novikov_count(); ++i) {
    if (m.e[i] < 0) throw ArithmeticError("negative Novikov exponent");
    w += v.novikov(i).ample_weight * m.e[i];
  }
  for (int i = 0; i < v.param_count(); ++i) {
    int e = m.e[v.param_slot(i)];
    if (e < 0) throw ArithmeticError("negative parameter exponent");
    ord += e;
  }
  if (w > p.max_novikov_weight || ord > p.max_param_order) return false;
  if (v.has_q()) {
    int qn = m.e[v.q_slot()];
    if (qn < p.min_q_num || qn > p.max_q_num) return false;
  }
  if (v.has_z()) {
    int ze = m.e[v.z_slot()];
    if (ze > p.max_z && z_overflow) *z_overflow = true;
    if (ze < p.min_z || ze > p.max_z) return false;
  }
  return true;
}

}  // namespace

void GradedSeries::add_term(const Monomial& mono, const CyclotomicNumber& coeff) {
  if (static_cast<int>(mono.e.size()) != vars_->slot_count())
    throw ArithmeticError("add_term: monomial has wrong slot count");
  if (coeff.order() != field_order_)
    throw FieldMismatchError("add_term: coefficient field order mismatch");
  if (coeff.is_zero()) return;
  for (int i = 0; i < vars_->param_count(); ++i) {
    if (vars_->param(i).parity == 1 && mono.e[vars_->param_slot(i)] > 1)
      return;  // odd variable squared
  }
  if (!policy_keeps(*vars_, policy_, mono)) return;
  auto it = terms_.find(mono);
  if (it == terms_.end()) {
    terms_.emplace(mono, coeff);
  } else {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

CyclotomicNumber GradedSeries::coefficient(const Monomial& mono) const {
  auto it = terms_.find(mono);
  if (it == terms_.end()) return CyclotomicNumber::zero(field_order_);
  return it->second;
}

GradedSeries GradedSeries::operator-() const {
  GradedSeries r(*this);
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

static void check_compat(const GradedSeries& a, const GradedSeries& b) {
  if (!a.vars()->same_universe(*b.vars()))
    throw ArithmeticError("series universe mismatch");
  if (a.field_order() != b.field_order())
    throw FieldMismatchError("series field order mismatch");
}

GradedSeries& GradedSeries::operator+=(const GradedSeries& o) {
  check_compat(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

GradedSeries& GradedSeries::operator-=(const GradedSeries& o) {
  check_compat(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) {
  check_compat(a, b);
  const SeriesVars& v = *a.vars();
  // The product policy is the tighter of the two windows.
  TruncationPolicy pol = a.policy();
  const TruncationPolicy& pb = b.policy();
  pol.max_novikov_weight = std::min(pol.max_novikov_weight, pb.max_novikov_weight);
  pol.max_param_order = std::min(pol.max_param_order, pb.max_param_order);
  pol.min_q_num = std::max(pol.min_q_num, pb.min_q_num);
  pol.max_q_num = std::min(pol.max_q_num, pb.max_q_num);
  pol.min_z = std::max(pol.min_z, pb.min_z);
  pol.max_z = std::min(pol.max_z, pb.max_z);
  pol.error_on_z_overflow = pol.error_on_z_overflow || pb.error_on_z_overflow;
  GradedSeries r(a.vars(), a.field_order(), pol);

  const int nslots = v.slot_count();
  std::vector<int> odd_slots;
  for (int i = 0; i < v.param_count(); ++i)
    if (v.param(i).parity == 1) odd_slots.push_back(v.param_slot(i));

  Monomial prod;
  prod.e.assign(nslots, 0);
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      bool dead = false;
      int crossings = 0;
      if (!odd_slots.empty()) {
        // Koszul sign: each odd variable of b moves left past the odd
        // variables of a sitting at strictly larger slots.
        for (size_t bi = 0; bi < odd_slots.size() && !dead; ++bi) {
          int sb = odd_slots[bi];
          if (mb.e[sb] == 0) continue;
          if (ma.e[sb] != 0) { dead = true; break; }
          for (int sa : odd_slots)
            if (sa > sb && ma.e[sa] != 0) ++crossings;
        }
      }
      if (dead) continue;
      bool overflow = false;
      for (int s = 0; s < nslots; ++s) prod.e[s] = static_cast<int16_t>(ma.e[s] + mb.e[s]);
      bool keep = policy_keeps(v, pol, prod, &overflow);
      if (overflow && pol.error_on_z_overflow)
        throw TruncationOverflow("series product exceeds the z window (enlarge max_z)");
      if (!keep) continue;
      CyclotomicNumber c = ca * cb;
      if (crossings & 1) c = -c;
      r.add_term(prod, c);
    }
  }
  return r;
}

GradedSeries GradedSeries::scaled(const CyclotomicNumber& c) const {
  if (c.order() != field_order_) throw FieldMismatchError("scaled: field order mismatch");
  GradedSeries r(vars_, field_order_, policy_);
  for (const auto& [m, v] : terms_) r.add_term(m, v * c);
  return r;
}

GradedSeries GradedSeries::scaled(const Rational& q) const {
  GradedSeries r(vars_, field_order_, policy_);
  if (q == 0) return r;
  for (const auto& [m, v] : terms_) r.add_term(m, v * q);
  return r;
}

bool GradedSeries::operator==(const GradedSeries& o) const {
  if (!vars_ || !o.vars_) return terms_.empty() && o.terms_.empty();
  if (!vars_->same_universe(*o.vars_) || field_order_ != o.field_order_) return false;
  return terms_ == o.terms_;
}

GradedSeries GradedSeries::truncated(const TruncationPolicy& pol) const {
  GradedSeries r(vars_, field_order_, pol);
  for (const auto& [m, c] : terms_) r.add_term(m, c);
  return r;
}

GradedSeries GradedSeries::with_field_order(long M) const {
  GradedSeries r(vars_, M, policy_);
  for (const auto& [m, c] : terms_) r.add_term(m, c.embedded(M));
  return r;
}

long GradedSeries::degree_of(const Monomial& m) const {
  long d = 0;
  const SeriesVars& v = *vars_;
  for (int i = 0; i < v.novikov_count(); ++i) d += static_cast<long>(v.novikov(i).degree) * m.e[i];
  if (v.has_q()) d += static_cast<long>(v.q_unit_degree()) * m.e[v.q_slot()];
  if (v.has_z()) d += 2L * m.e[v.z_slot()];
  for (int i = 0; i < v.param_count(); ++i)
    d += static_cast<long>(v.param(i).degree) * m.e[v.param_slot(i)];
  return d;
}

int GradedSeries::parity_of(const Monomial& m) const {
  int p = 0;
  for (int i = 0; i < vars_->param_count(); ++i)
    if (vars_->param(i).parity == 1) p ^= (m.e[vars_->param_slot(i)] & 1);
  return p;
}

int GradedSeries::novikov_weight(const Monomial& m) const {
  int w = 0;
  for (int i = 0; i < vars_->novikov_count(); ++i) w += vars_->novikov(i).ample_weight * m.e[i];
  return w;
}

int GradedSeries::param_order(const Monomial& m) const {
  int o = 0;
  for (int i = 0; i < vars_->param_count(); ++i) o += m.e[vars_->param_slot(i)];
  return o;
}

bool GradedSeries::is_homogeneous(long degree, int parity, std::string* witness) const {
  for (const auto& [m, c] : terms_) {
    if (degree_of(m) != degree || parity_of(m) != parity) {
      if (witness) *witness = monomial_to_string(m);
      return false;
    }
  }
  return true;
}

std::optional<int> GradedSeries::uniform_parity() const {
  std::optional<int> p;
  for (const auto& [m, c] : terms_) {
    int q = parity_of(m);
    if (!p) p = q;
    else if (*p != q) return std::nullopt;
  }
  return p ? p : std::optional<int>(0);
}

std::string GradedSeries::monomial_to_string(const Monomial& m) const {
  const SeriesVars& v = *vars_;
  std::ostringstream os;
  bool any = false;
  auto emit = [&](const std::string& name, int e) {
    if (e == 0) return;
    if (any) os << "*";
    any = true;
    os << name;
    if (e != 1) os << "^" << e;
  };
  for (int i = 0; i < v.novikov_count(); ++i) emit(v.novikov(i).name, m.e[i]);
  if (v.has_q() && m.e[v.q_slot()] != 0) {
    int num = m.e[v.q_slot()], den = v.q_denom();
    int g = std::gcd(num < 0 ? -num : num, den);
    num /= g;
    den /= g;
    if (any) os << "*";
    any = true;
    os << "q^";
    if (den == 1)
      os << num;
    else
      os << "(" << num << "/" << den << ")";
  }
  if (v.has_z()) emit("z", m.e[v.z_slot()]);
  for (int i = 0; i < v.param_count(); ++i) emit(v.param(i).name, m.e[v.param_slot(i)]);
  if (!any) os << "1";
  return os.str();
}

std::string GradedSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")*" << monomial_to_string(m);
  }
  return os.str();
}

namespace {

// True when every term escapes any fixed window under repeated products:
// positive Novikov/parameter filtration or strictly negative q exponent.
bool filtration_positive(const GradedSeries& x, std::string* offender) {
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

long power_iteration_bound(const GradedSeries& x) {
  const auto& p = x.policy();
  long W = std::max(0, p.max_novikov_weight);
  long P = std::max(0, p.max_param_order);
  long D = std::max(0, -p.min_q_num);
  long Mq = std::max(0, p.max_q_num);
  return (W + P) * (Mq + 1) + D + 2;
}

}  // namespace

GradedSeries series_exp(const GradedSeries& x) {
  std::string off;
  if (!filtration_positive(x, &off))
    throw ConvergenceError("series_exp: term is not filtration-positive: " + off);
  GradedSeries acc = GradedSeries::constant(x.vars(), x.field_order(), x.policy(),
                                            CyclotomicNumber::one(x.field_order()));
  GradedSeries power = acc;
  const long bound = power_iteration_bound(x);
  Rational kfact(1);
  for (long k = 1; k <= bound; ++k) {
    power = power * x;
    if (power.is_zero()) return acc;
    kfact *= k;
    acc += power.scaled(Rational(1) / kfact);
  }
  if (!power.is_zero()) throw ConvergenceError("series_exp: did not terminate (internal bound)");
  return acc;
}

GradedSeries series_log(const GradedSeries& x) {
  Monomial unit;
  unit.e.assign(x.vars()->slot_count(), 0);
  GradedSeries y = x;
  CyclotomicNumber c0 = x.coefficient(unit);
  if (!(c0 == CyclotomicNumber::one(x.field_order())))
    throw ConvergenceError("series_log: constant term must be exactly 1");
  y.add_term(unit, -CyclotomicNumber::one(x.field_order()));
  std::string off;
  if (!filtration_positive(y, &off))
    throw ConvergenceError("series_log: term is not filtration-positive: " + off);
  GradedSeries acc(x.vars(), x.field_order(), x.policy());
  GradedSeries power = GradedSeries::constant(x.vars(), x.field_order(), x.policy(),
                                              CyclotomicNumber::one(x.field_order()));
  const long bound = power_iteration_bound(y);
  for (long k = 1; k <= bound; ++k) {
    power = power * y;
    if (power.is_zero()) return acc;
    acc += power.scaled(Rational((k % 2) ? 1 : -1, k));
  }
  if (!power.is_zero()) throw ConvergenceError("series_log: did not terminate (internal bound)");
  return acc;
}

GradedSeries series_inverse(const GradedSeries& x) {
  if (x.is_zero()) throw ArithmeticError("series_inverse: zero series");
  const SeriesVars& v = *x.vars();
  const long m = x.field_order();
  // Split off the Novikov- and parameter-free part.
  GradedSeries lead_part(x.vars(), m, x.policy());
  GradedSeries rest(x.vars(), m, x.policy());
  for (const auto& [mono, c] : x.terms()) {
    if (x.novikov_weight(mono) == 0 && x.param_order(mono) == 0)
      lead_part.add_term(mono, c);
    else
      rest.add_term(mono, c);
  }
  if (lead_part.is_zero())
    throw ArithmeticError("series_inverse: no Novikov/parameter-free part (not a unit)");
  // Leading q-slice must be a single monomial.
  int qmax = std::numeric_limits<int>::min();
  if (v.has_q()) {
    for (const auto& [mono, c] : lead_part.terms())
      qmax = std::max(qmax, static_cast<int>(mono.e[v.q_slot()]));
  } else {
    qmax = 0;
  }
  const Monomial* lead_mono = nullptr;
  const CyclotomicNumber* lead_coeff = nullptr;
  int lead_count = 0;
  for (const auto& [mono, c] : lead_part.terms()) {
    int qn = v.has_q() ? mono.e[v.q_slot()] : 0;
    if (qn == qmax) {
      ++lead_count;
      lead_mono = &mono;
      lead_coeff = &c;
    }
  }
  if (lead_count != 1)
    throw ArithmeticError("series_inverse: leading q-slice is not a single monomial");
  // T^{-1}.
  Monomial inv_mono;
  inv_mono.e.resize(v.slot_count());
  for (int s = 0; s < v.slot_count(); ++s) inv_mono.e[s] = static_cast<int16_t>(-(*lead_mono).e[s]);
  GradedSeries t_inv =
      GradedSeries::monomial_term(x.vars(), m, x.policy(), inv_mono, lead_coeff->inverse());
  // lead_part = T (1 + n) with n strictly q-deeper; invert by Neumann in q-depth.
  GradedSeries n = t_inv * lead_part;
  Monomial unit;
  unit.e.assign(v.slot_count(), 0);
  n.add_term(unit, -CyclotomicNumber::one(m));
  GradedSeries lead_inv = GradedSeries::constant(x.vars(), m, x.policy(), CyclotomicNumber::one(m));
  {
    GradedSeries power = lead_inv;
    const auto& p = x.policy();
    long bound = static_cast<long>(std::max(0, p.max_q_num) - std::min(0, p.min_q_num)) + 2;
    for (long k = 1; k <= bound; ++k) {
      power = power * n;
      if (power.is_zero()) break;
      lead_inv += (k % 2) ? -power : power;
    }
    if (!power.is_zero())
      throw ConvergenceError("series_inverse: q-slice Neumann did not terminate");
    lead_inv = lead_inv * t_inv;
  }
  // x = lead (1 + y), y = lead^{-1} rest, filtration-positive.
  GradedSeries y = lead_inv * rest;
  GradedSeries out = lead_inv;
  GradedSeries power = lead_inv;
  const long bound = x.policy().max_novikov_weight + x.policy().max_param_order + 1;
  for (long k = 1; k <= bound; ++k) {
    power = power * y;
    if (power.is_zero()) break;
    out += (k % 2) ? -power : power;
  }
  return out;
}

GradedSeries series_derivative(const GradedSeries& x, int param_index) {
  const SeriesVars& v = *x.vars();
  if (param_index < 0 || param_index >= v.param_count())
    throw ArithmeticError("series_derivative: bad parameter index");
  const int slot = v.param_slot(param_index);
  const bool odd = v.param(param_index).parity == 1;
  GradedSeries r(x.vars(), x.field_order(), x.policy());
  for (const auto& [mono, c] : x.terms()) {
    int e = mono.e[slot];
    if (e == 0) continue;
    Monomial m2 = mono;
    m2.e[slot] = static_cast<int16_t>(e - 1);
    CyclotomicNumber coeff = c * Rational(e);
    if (odd) {
      int sign = 0;
      for (int i = 0; i < v.param_count(); ++i) {
        int s = v.param_slot(i);
        if (s < slot && v.param(i).parity == 1 && mono.e[s]) sign ^= 1;
      }
      if (sign) coeff = -coeff;
    }
    r.add_term(m2, coeff);
  }
  return r;
}

GradedSeries monodromy_twist(const GradedSeries& x, long j) {
  const SeriesVars& v = *x.vars();
  if (!v.has_q()) return x;
  const long m = x.field_order();
  const long s = v.q_denom();
  if (m % s != 0)
    throw FieldMismatchError("monodromy_twist: q denominator must divide the field order");
  GradedSeries r(x.vars(), m, x.policy());
  for (const auto& [mono, c] : x.terms()) {
    long qn = mono.e[v.q_slot()];
    // q^{num/s} -> e^{-2 pi i j num/s} q^{num/s}.
    CyclotomicNumber tw = CyclotomicNumber::zeta(m, -(m / s) * j * qn);
    r.add_term(mono, c * tw);
  }
  return r;
}

GradedSeries minus_q_rewrite(const GradedSeries& x) {
  const SeriesVars& v = *x.vars();
  if (!v.has_q()) return x;
  const long m = x.field_order();
  const long s = v.q_denom();
  if (m % (2 * s) != 0)
    throw FieldMismatchError("minus_q_rewrite: field order must contain zeta_{2s}");
  GradedSeries r(x.vars(), m, x.policy());
  for (const auto& [mono, c] : x.terms()) {
    long qn = mono.e[v.q_slot()];
    // c q^{num/s} = c zeta_{2s}^{num} (-q)^{num/s} under the fixed branch.
    CyclotomicNumber tw = CyclotomicNumber::zeta(m, (m / (2 * s)) * qn);
    r.add_term(mono, c * tw);
  }
  return r;
}

GradedSeries coefficient_extract(const GradedSeries& x,
                                 const std::vector<std::pair<int, int>>& slot_exponents) {
  GradedSeries r(x.vars(), x.field_order(), x.policy());
  for (const auto& [mono, c] : x.terms()) {
    bool match = true;
    for (const auto& [slot, e] : slot_exponents)
      if (mono.e[slot] != e) { match = false; break; }
    if (!match) continue;
    Monomial m2 = mono;
    for (const auto& [slot, e] : slot_exponents) m2.e[slot] = 0;
    r.add_term(m2, c);
  }
  return r;
}

GradedSeries substitute(const GradedSeries& src, const SubstPlan& plan) {
  const SeriesVars& v = *src.vars();
  const SeriesVars& t = *plan.target;
  const long m_out = plan.field_order ? plan.field_order : src.field_order();
  if (m_out % src.field_order() != 0)
    throw FieldMismatchError("substitute: target field order must be a multiple of the source");
  if (v.novikov_count() > 0 &&
      static_cast<int>(plan.novikov_images.size()) != v.novikov_count())
    throw ArithmeticError("substitute: one Novikov image per source generator required");
  if (static_cast<int>(plan.param_images.size()) != v.param_count())
    throw ArithmeticError("substitute: one image per source parameter required");

  // Preconditions on parameter images.
  for (int i = 0; i < v.param_count(); ++i) {
    if (std::holds_alternative<int>(plan.param_images[i])) {
      int ti = std::get<int>(plan.param_images[i]);
      if (ti < 0 || ti >= t.param_count())
        throw ArithmeticError("substitute: passthrough target parameter out of range");
      if (t.param(ti).parity != v.param(i).parity)
        throw ArithmeticError("substitute: passthrough parity mismatch for " + v.param(i).name);
    } else {
      const GradedSeries& img = std::get<GradedSeries>(plan.param_images[i]);
      auto par = img.uniform_parity();
      if (!par || *par != v.param(i).parity)
        throw ArithmeticError("substitute: image parity mismatch for " + v.param(i).name);
      std::string off;
      if (!filtration_positive(img, &off))
        throw ConvergenceError("substitute: image of " + v.param(i).name +
                               " is not filtration-positive: " + off);
    }
  }

  GradedSeries out(plan.target, m_out, plan.policy);
  const CyclotomicNumber one = CyclotomicNumber::one(m_out);
  for (const auto& [mono, c] : src.terms()) {
    GradedSeries acc = GradedSeries::constant(plan.target, m_out, plan.policy, c.embedded(m_out));
    // Novikov generators.
    for (int g = 0; g < v.novikov_count(); ++g) {
      int e = mono.e[g];
      if (e == 0) continue;
      const NovikovImage& im = plan.novikov_images[g];
      if (static_cast<int>(im.novikov.size()) != t.novikov_count())
        throw ArithmeticError("substitute: Novikov image has wrong generator count");
      Monomial gm;
      gm.e.assign(t.slot_count(), 0);
      for (int k = 0; k < t.novikov_count(); ++k) gm.e[k] = static_cast<int16_t>(im.novikov[k] * e);
      if (im.q_num_shift != 0) {
        if (!t.has_q()) throw ArithmeticError("substitute: q shift into a q-free universe");
        gm.e[t.q_slot()] = static_cast<int16_t>(im.q_num_shift * e);
      }
      CyclotomicNumber cf = im.coeff.embedded(m_out).pow(e);
      acc = acc * GradedSeries::monomial_term(plan.target, m_out, plan.policy, gm, cf);
      if (im.extra) {
        GradedSeries ex = im.extra->field_order() == m_out ? *im.extra
                                                           : im.extra->with_field_order(m_out);
        for (int k = 0; k < e; ++k) acc = acc * ex;
      }
      if (acc.is_zero()) break;
    }
    if (acc.is_zero()) continue;
    // q and z passthrough.
    {
      Monomial qm;
      qm.e.assign(t.slot_count(), 0);
      bool needed = false;
      if (v.has_q() && mono.e[v.q_slot()] != 0) {
        if (!t.has_q()) throw ArithmeticError("substitute: q term into a q-free universe");
        qm.e[t.q_slot()] = static_cast<int16_t>(mono.e[v.q_slot()] * plan.q_num_scale);
        needed = true;
      }
      if (v.has_z() && mono.e[v.z_slot()] != 0) {
        if (!t.has_z()) throw ArithmeticError("substitute: z term into a z-free universe");
        qm.e[t.z_slot()] = mono.e[v.z_slot()];
        needed = true;
      }
      if (needed)
        acc = acc * GradedSeries::monomial_term(plan.target, m_out, plan.policy, qm, one);
    }
    // Parameters, ascending slot order so Koszul signs match the canonical
    // ordering of the source monomial.
    for (int i = 0; i < v.param_count() && !acc.is_zero(); ++i) {
      int e = mono.e[v.param_slot(i)];
      if (e == 0) continue;
      if (std::holds_alternative<int>(plan.param_images[i])) {
        Monomial pm;
        pm.e.assign(t.slot_count(), 0);
        pm.e[t.param_slot(std::get<int>(plan.param_images[i]))] = static_cast<int16_t>(e);
        acc = acc * GradedSeries::monomial_term(plan.target, m_out, plan.policy, pm, one);
      } else {
        GradedSeries img = std::get<GradedSeries>(plan.param_images[i]);
        if (img.field_order() != m_out) img = img.with_field_order(m_out);
        img = img.truncated(plan.policy);
        for (int k = 0; k < e; ++k) acc = acc * img;
      }
    }
    out += acc;
  }
  return out;
}

Monomial make_monomial(const SeriesVars& vars, std::initializer_list<std::pair<int, int>> exps) {
  Monomial m;
  m.e.assign(vars.slot_count(), 0);
  for (const auto& [slot, e] : exps) {
    if (slot < 0 || slot >= vars.slot_count()) throw ArithmeticError("make_monomial: bad slot");
    m.e[slot] = static_cast<int16_t>(e);
  }
  return m;
}

GradedSeries q_power(VarsPtr vars, long field_order, TruncationPolicy pol, int q_num) {
  if (!vars->has_q()) throw ArithmeticError("q_power: universe has no q");
  Monomial m;
  m.e.assign(vars->slot_count(), 0);
  m.e[vars->q_slot()] = static_cast<int16_t>(q_num);
  return GradedSeries::monomial_term(std::move(vars), field_order, pol, m,
                                     CyclotomicNumber::one(field_order));
}

GradedSeries z_power(VarsPtr vars, long field_order, TruncationPolicy pol, int z_exp) {
  if (!vars->has_z()) throw ArithmeticError("z_power: universe has no z");
  Monomial m;
  m.e.assign(vars->slot_count(), 0);
  m.e[vars->z_slot()] = static_cast<int16_t>(z_exp);
  return GradedSeries::monomial_term(std::move(vars), field_order, pol, m,
                                     CyclotomicNumber::one(field_order));
}

}  // namespace qdm
