#include "qdm/gw.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

namespace qdm {

namespace {

struct Canonical {
  std::vector<int> ins;
  int sign;  // 0 when a repeated odd insertion kills the invariant
};

Canonical canonicalize(const CohomologyModel& m, std::vector<int> ins) {
  int sign = 1;
  for (size_t a = 1; a < ins.size(); ++a)
    for (size_t b = a; b > 0 && ins[b] < ins[b - 1]; --b) {
      if (m.basis[ins[b]].parity() && m.basis[ins[b - 1]].parity()) sign = -sign;
      std::swap(ins[b], ins[b - 1]);
    }
  for (size_t a = 1; a < ins.size(); ++a)
    if (ins[a] == ins[a - 1] && m.basis[ins[a]].parity()) return {std::move(ins), 0};
  return {std::move(ins), sign};
}

bool is_zero_curve(const CurveVector& d) {
  return std::all_of(d.begin(), d.end(), [](int x) { return x == 0; });
}

// Split of a sorted multiset into two parts, weighted by the number of ways
// to pick the first part from the labelled points.
struct MultisetSplit {
  std::vector<int> s1, s2;
  Rational mult;
};

std::vector<MultisetSplit> multiset_splits(const std::vector<int>& s) {
  std::vector<std::pair<int, int>> runs;
  for (int v : s) {
    if (!runs.empty() && runs.back().first == v)
      ++runs.back().second;
    else
      runs.push_back({v, 1});
  }
  std::vector<MultisetSplit> out;
  std::vector<int> take(runs.size(), 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == runs.size()) {
      MultisetSplit sp;
      sp.mult = Rational(1);
      for (size_t r = 0; r < runs.size(); ++r) {
        for (int k = 0; k < take[r]; ++k) sp.s1.push_back(runs[r].first);
        for (int k = take[r]; k < runs[r].second; ++k) sp.s2.push_back(runs[r].first);
        sp.mult *= Rational(binomial_big(runs[r].second, take[r]));
      }
      out.push_back(std::move(sp));
      return;
    }
    for (take[i] = 0; take[i] <= runs[i].second; ++take[i]) rec(i + 1);
    take[i] = 0;
  };
  rec(0);
  return out;
}

// Decompositions d = d1 + d2 with both parts nonzero.
std::vector<std::pair<CurveVector, CurveVector>> curve_splits(const CurveVector& d) {
  std::vector<std::pair<CurveVector, CurveVector>> out;
  CurveVector d1(d.size(), 0);
  std::function<void(size_t)> rec = [&](size_t g) {
    if (g == d.size()) {
      if (is_zero_curve(d1)) return;
      CurveVector d2(d.size());
      bool nz = false;
      for (size_t t = 0; t < d.size(); ++t) {
        d2[t] = d[t] - d1[t];
        nz = nz || d2[t] != 0;
      }
      if (nz) out.push_back({d1, d2});
      return;
    }
    for (d1[g] = 0; d1[g] <= d[g]; ++d1[g]) rec(g + 1);
    d1[g] = 0;
    return;
  };
  rec(0);
  return out;
}

std::string describe_curve(const CohomologyModel& m, const CurveVector& d) {
  std::ostringstream os;
  bool any = false;
  for (size_t g = 0; g < d.size(); ++g)
    if (d[g]) {
      if (any) os << " + ";
      if (d[g] != 1) os << d[g] << " ";
      os << m.curves[g].name;
      any = true;
    }
  if (!any) os << "0";
  return os.str();
}

std::string describe_invariant(const CohomologyModel& m, const CurveVector& d,
                               const std::vector<int>& ins) {
  std::ostringstream os;
  os << "<";
  for (size_t i = 0; i < ins.size(); ++i) os << (i ? ", " : "") << m.basis[ins[i]].label;
  os << ">_(" << describe_curve(m, d) << ")";
  return os.str();
}

}  // namespace

GWStore::GWStore(const CohomologyModel* model) : model_(model) {
  for (const auto& s : model->seeds) {
    auto c = canonicalize(*model, s.insertions);
    if (c.sign == 0) {
      if (s.value != 0) throw GWError("seed with a repeated odd insertion must vanish");
      continue;
    }
    Rational v = s.value * Rational(c.sign);
    Key k{s.curve, std::move(c.ins)};
    auto [it, fresh] = seeds_.emplace(std::move(k), v);
    if (!fresh && it->second != v) throw GWError("conflicting seeds for " + describe(it->first));
  }
}

std::string GWStore::describe(const Key& k) const {
  return describe_invariant(*model_, k.d, k.ins);
}

Rational GWStore::correlator(const CurveVector& d, const std::vector<int>& insertions) {
  if (d.size() != model_->curves.size()) throw GWError("correlator: curve vector size mismatch");
  for (int x : d)
    if (x < 0) throw GWError("correlator: curve class is not effective");
  for (int i : insertions)
    if (i < 0 || i >= model_->size()) throw GWError("correlator: basis index out of range");
  auto c = canonicalize(*model_, insertions);
  if (c.sign == 0) return Rational(0);
  return Rational(c.sign) * resolve(Key{d, std::move(c.ins)});
}

Rational GWStore::correlator_classes(const CurveVector& d,
                                     const std::vector<ClassVector>& insertions) {
  Rational total(0);
  std::vector<int> chosen(insertions.size(), 0);
  std::function<void(size_t, Rational)> rec = [&](size_t pos, Rational coeff) {
    if (pos == insertions.size()) {
      total += coeff * correlator(d, chosen);
      return;
    }
    for (int i = 0; i < model_->size(); ++i) {
      if (insertions[pos][i] == 0) continue;
      chosen[pos] = i;
      rec(pos + 1, coeff * insertions[pos][i]);
    }
  };
  rec(0, Rational(1));
  return total;
}

Rational GWStore::resolve(const Key& k) {
  if (auto it = cache_.find(k); it != cache_.end()) return it->second;
  if (auto it = seeds_.find(k); it != seeds_.end()) {
    cache_.emplace(k, it->second);
    return it->second;
  }
  if (in_progress_.count(k)) throw CycleError("cyclic reconstruction at " + describe(k));
  auto inserted = in_progress_.insert(k).first;
  struct Guard {
    std::set<Key>& s;
    std::set<Key>::iterator it;
    ~Guard() { s.erase(it); }
  } guard{in_progress_, inserted};

  const auto& m = *model_;
  const int n = static_cast<int>(k.ins.size());
  if (n == 0) throw GWError("invariant with no insertions at " + describe(k));
  const bool d0 = is_zero_curve(k.d);
  auto finish = [&](Rational v) {
    cache_[k] = v;
    return v;
  };

  // unit: only the constant triple intersection survives
  auto unit_pos = std::find(k.ins.begin(), k.ins.end(), m.unit_index);
  if (unit_pos != k.ins.end()) {
    if (d0 && n == 3) {
      std::vector<int> rest;
      bool skipped = false;
      for (int i : k.ins) {
        if (!skipped && i == m.unit_index) {
          skipped = true;
          continue;
        }
        rest.push_back(i);
      }
      return finish(m.integral(m.cup(m.basis_vector(rest[0]), m.basis_vector(rest[1]))));
    }
    return finish(Rational(0));
  }

  // dimension: insertion degrees must exhaust the virtual class
  long total_deg = 0;
  for (int i : k.ins) total_deg += m.basis[i].degree;
  const long need = 2 * m.dim_c + 2 * m.c1_dot(k.d) + 2 * (n - 3);
  if (total_deg != need) return finish(Rational(0));

  if (d0) {
    if (n == 3) {
      ClassVector ab = m.cup(m.basis_vector(k.ins[0]), m.basis_vector(k.ins[1]));
      return finish(m.integral(m.cup(ab, m.basis_vector(k.ins[2]))));
    }
    return finish(Rational(0));
  }

  // divisor: strip a degree-2 insertion against the curve class
  if (n >= 2) {
    for (size_t pos = 0; pos < k.ins.size(); ++pos) {
      if (m.basis[k.ins[pos]].degree != 2) continue;
      Rational coeff = m.divisor_dot(m.basis_vector(k.ins[pos]), k.d);
      if (coeff == 0) return finish(Rational(0));
      Key k2{k.d, {}};
      for (size_t t = 0; t < k.ins.size(); ++t)
        if (t != pos) k2.ins.push_back(k.ins[t]);
      return finish(coeff * resolve(k2));
    }
  }

  if (n < 3) throw MissingSeedError("no seed determines " + describe(k));
  return finish(resolve_wdvv(k));
}

Rational GWStore::resolve_wdvv(const Key& k) {
  const auto& m = *model_;
  for (int i : k.ins)
    if (m.basis[i].parity())
      throw GWError("exchange identity does not support odd insertions at " + describe(k));

  std::vector<size_t> order(k.ins.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return m.basis[k.ins[a]].degree > m.basis[k.ins[b]].degree;
  });

  std::set<std::tuple<int, int, int, int>> tried;
  for (size_t sp : order) {
    if (m.basis[k.ins[sp]].degree < 4) continue;
    auto factors = m.divisor_factorization(k.ins[sp]);
    if (!factors) continue;
    for (const auto& f : *factors) {
      for (size_t p = 0; p < k.ins.size(); ++p) {
        if (p == sp) continue;
        for (size_t q = p + 1; q < k.ins.size(); ++q) {
          if (q == sp) continue;
          if (!tried.insert({k.ins[sp], f.h_index, k.ins[p], k.ins[q]}).second) continue;
          try {
            auto r = wdvv_attempt(k, sp, f.h_index, f.cofactor, p, q);
            if (r) return *r;
          } catch (const CycleError&) {
          }
        }
      }
    }
  }
  throw GWError("reconstruction is degenerate at " + describe(k));
}

std::optional<Rational> GWStore::wdvv_attempt(const Key& k, size_t special_pos, int h_index,
                                              const ClassVector& cofactor, size_t p_pos,
                                              size_t q_pos) {
  const auto& m = *model_;
  const int ap = k.ins[p_pos], aq = k.ins[q_pos];
  std::vector<int> S;
  for (size_t t = 0; t < k.ins.size(); ++t)
    if (t != special_pos && t != p_pos && t != q_pos) S.push_back(k.ins[t]);
  const Rational hd = m.divisor_dot(m.basis_vector(h_index), k.d);

  auto key_of = [](const CurveVector& d, std::vector<int> ins) {
    std::sort(ins.begin(), ins.end());
    return Key{d, std::move(ins)};
  };
  auto differs = [](const Key& a, const Key& b) { return a < b || b < a; };

  Rational total(0), self_coeff(0);

  // <h u a_p, cof, a_q, S>_d, which may hit the target key again
  {
    ClassVector hp = m.cup(m.basis_vector(h_index), m.basis_vector(ap));
    for (int i = 0; i < m.size(); ++i) {
      if (hp[i] == 0) continue;
      for (int j = 0; j < m.size(); ++j) {
        if (cofactor[j] == 0) continue;
        std::vector<int> ins = S;
        ins.push_back(i);
        ins.push_back(j);
        ins.push_back(aq);
        Key k2 = key_of(k.d, std::move(ins));
        Rational c = hp[i] * cofactor[j];
        if (differs(k2, k))
          total += c * resolve(k2);
        else
          self_coeff += c;
      }
    }
  }

  if (hd != 0) {
    // + (h.d) <a_p, cof u a_q, S>_d
    ClassVector ca = m.cup(cofactor, m.basis_vector(aq));
    for (int j = 0; j < m.size(); ++j) {
      if (ca[j] == 0) continue;
      std::vector<int> ins = S;
      ins.push_back(ap);
      ins.push_back(j);
      total += hd * ca[j] * resolve(key_of(k.d, std::move(ins)));
    }
    // - (h.d) <cof, a_p u a_q, S>_d
    ClassVector pq = m.cup(m.basis_vector(ap), m.basis_vector(aq));
    for (int i = 0; i < m.size(); ++i) {
      if (cofactor[i] == 0) continue;
      for (int j = 0; j < m.size(); ++j) {
        if (pq[j] == 0) continue;
        std::vector<int> ins = S;
        ins.push_back(i);
        ins.push_back(j);
        total -= hd * cofactor[i] * pq[j] * resolve(key_of(k.d, std::move(ins)));
      }
    }
  }

  // proper degree splits; diagonal classes run over the even basis, the odd
  // part pairing with an odd insertion count that dies by degree parity
  for (const auto& [d1, d2] : curve_splits(k.d)) {
    for (const auto& split : multiset_splits(S)) {
      for (int mu = 0; mu < m.size(); ++mu) {
        if (m.basis[mu].parity()) continue;
        for (int nu = 0; nu < m.size(); ++nu) {
          const Rational& g = m.pairing_inv[mu][nu];
          if (g == 0) continue;
          {
            std::vector<int> ins1 = split.s1;
            ins1.push_back(h_index);
            ins1.push_back(ap);
            ins1.push_back(mu);
            Rational a = resolve(key_of(d1, std::move(ins1)));
            if (a != 0) {
              Rational b(0);
              for (int j = 0; j < m.size(); ++j) {
                if (cofactor[j] == 0) continue;
                std::vector<int> ins2 = split.s2;
                ins2.push_back(nu);
                ins2.push_back(j);
                ins2.push_back(aq);
                b += cofactor[j] * resolve(key_of(d2, std::move(ins2)));
              }
              total += split.mult * g * a * b;
            }
          }
          {
            std::vector<int> ins2 = split.s2;
            ins2.push_back(nu);
            ins2.push_back(ap);
            ins2.push_back(aq);
            Rational b = resolve(key_of(d2, std::move(ins2)));
            if (b != 0) {
              Rational a(0);
              for (int j = 0; j < m.size(); ++j) {
                if (cofactor[j] == 0) continue;
                std::vector<int> ins1 = split.s1;
                ins1.push_back(h_index);
                ins1.push_back(j);
                ins1.push_back(mu);
                a += cofactor[j] * resolve(key_of(d1, std::move(ins1)));
              }
              total -= split.mult * g * a * b;
            }
          }
        }
      }
    }
  }

  if (self_coeff == 1) return std::nullopt;
  return total / (Rational(1) - self_coeff);
}

std::vector<CurveVector> enumerate_curves(const CohomologyModel& model, int max_weight) {
  std::vector<CurveVector> out;
  CurveVector cur(model.curves.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t g, int left) {
    if (g == cur.size()) {
      if (!is_zero_curve(cur)) out.push_back(cur);
      return;
    }
    const int w = model.curves[g].ample_weight;
    for (cur[g] = 0; cur[g] * w <= left; ++cur[g]) rec(g + 1, left - cur[g] * w);
    cur[g] = 0;
  };
  rec(0, max_weight);
  std::sort(out.begin(), out.end(), [&](const CurveVector& a, const CurveVector& b) {
    long wa = model.weight_of(a), wb = model.weight_of(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
  return out;
}

QuantumUniverse QuantumUniverse::make(const CohomologyModel* model, long field_order,
                                      TruncationPolicy pol) {
  std::vector<NovikovGenSpec> nov;
  for (const auto& c : model->curves)
    nov.push_back({c.name, c.ample_weight, 2 * c.c1});
  std::vector<ParamSpec> params;
  for (const auto& b : model->basis)
    params.push_back({"t_" + b.label, 2 - b.degree, b.parity()});
  QuantumUniverse u;
  u.model = model;
  u.vars = SeriesVars::make(std::move(nov), false, 1, 0, true, std::move(params));
  u.field_order = field_order;
  u.pol = pol;
  return u;
}

GradedSeries QuantumUniverse::t_param(int basis_index) const {
  Monomial mo;
  mo.e.assign(vars->slot_count(), 0);
  mo.e[vars->param_slot(basis_index)] = 1;
  return GradedSeries::monomial_term(vars, field_order, pol, mo,
                                     CyclotomicNumber::from_rational(field_order, Rational(1)));
}

GradedSeries QuantumUniverse::novikov_term(const CurveVector& d) const {
  if (static_cast<int>(d.size()) != vars->novikov_count())
    throw ArithmeticError("novikov_term: curve vector size mismatch");
  Monomial mo;
  mo.e.assign(vars->slot_count(), 0);
  for (size_t g = 0; g < d.size(); ++g) mo.e[g] = static_cast<int16_t>(d[g]);
  return GradedSeries::monomial_term(vars, field_order, pol, mo,
                                     CyclotomicNumber::from_rational(field_order, Rational(1)));
}

GradedSeries QuantumUniverse::one() const {
  return GradedSeries::constant(vars, field_order, pol, CyclotomicNumber::one(field_order));
}

OpSeries cup_operator(const QuantumUniverse& u, const ClassVector& c) {
  const auto& m = *u.model;
  const int n = m.size();
  OpSeries out(n, n, u.vars, u.field_order, u.pol);
  for (int j = 0; j < n; ++j) {
    ClassVector img = m.cup(c, m.basis_vector(j));
    for (int k = 0; k < n; ++k)
      if (img[k] != 0)
        out.entry(k, j) = GradedSeries::constant(
            u.vars, u.field_order, u.pol, CyclotomicNumber::from_rational(u.field_order, img[k]));
  }
  return out;
}

OpSeries star_operator(GWStore& store, const QuantumUniverse& u, int basis_index) {
  const auto& m = *u.model;
  const int n = m.size();
  OpSeries out(n, n, u.vars, u.field_order, u.pol);

  std::vector<CurveVector> all_d;
  all_d.push_back(CurveVector(m.curves.size(), 0));
  for (auto& d : enumerate_curves(m, u.pol.max_novikov_weight)) all_d.push_back(std::move(d));

  // sorted parameter multisets; repeated odd entries vanish identically
  std::vector<std::vector<int>> gammas;
  std::vector<int> cur;
  std::function<void(int)> gen = [&](int start) {
    gammas.push_back(cur);
    if (static_cast<int>(cur.size()) >= u.pol.max_param_order) return;
    for (int a = start; a < n; ++a) {
      if (m.basis[a].parity() && !cur.empty() && cur.back() == a) continue;
      cur.push_back(a);
      gen(a);
      cur.pop_back();
    }
  };
  gen(0);

  const int par_i = m.basis[basis_index].parity();
  for (const auto& d : all_d) {
    const bool d0 = is_zero_curve(d);
    for (const auto& g : gammas) {
      if (d0 && !g.empty()) continue;  // no curve class: only three points survive
      Monomial mo;
      mo.e.assign(u.vars->slot_count(), 0);
      for (size_t t = 0; t < d.size(); ++t) mo.e[t] = static_cast<int16_t>(d[t]);
      Rational repeats(1);
      {
        int run = 1;
        for (size_t t = 0; t < g.size(); ++t) {
          mo.e[u.vars->param_slot(g[t])] += 1;
          run = (t > 0 && g[t] == g[t - 1]) ? run + 1 : 1;
          repeats *= Rational(run);
        }
      }
      int odd_count = 0;
      for (int a : g) odd_count += m.basis[a].parity();

      for (int j = 0; j < n; ++j) {
        for (int mu = 0; mu < n; ++mu) {
          std::vector<int> ins;
          ins.reserve(3 + g.size());
          ins.push_back(basis_index);
          ins.push_back(j);
          ins.push_back(mu);
          ins.insert(ins.end(), g.begin(), g.end());
          Rational v = store.correlator(d, ins);
          if (v == 0) continue;
          // sign of pulling the parameter monomial out to the left
          const int par = par_i + m.basis[j].parity() + m.basis[mu].parity();
          const int flips = odd_count * (odd_count - 1) / 2 + odd_count * par;
          Rational w = v * Rational(flips % 2 ? -1 : 1) / repeats;
          for (int nu = 0; nu < n; ++nu) {
            const Rational& gmn = m.pairing_inv[mu][nu];
            if (gmn == 0) continue;
            out.entry(nu, j).add_term(mo,
                                      CyclotomicNumber::from_rational(u.field_order, w * gmn));
          }
        }
      }
    }
  }
  return out;
}

OpSeries star_operator_class(GWStore& store, const QuantumUniverse& u, const ClassVector& c) {
  const int n = u.model->size();
  OpSeries out(n, n, u.vars, u.field_order, u.pol);
  for (int i = 0; i < n; ++i)
    if (c[i] != 0)
      out += star_operator(store, u, i)
                 .scaled(CyclotomicNumber::from_rational(u.field_order, c[i]));
  return out;
}

OpSeries fundamental_solution(GWStore& store, const QuantumUniverse& u) {
  const auto& m = *u.model;
  const int n = m.size();

  OpSeries M = OpSeries::identity(n, u.vars, u.field_order, u.pol);

  // purely quantum part of multiplication by the ample class; drives the
  // parameter-free levels, where no coordinate direction is available
  OpSeries omega_q = star_operator_class(store, u, m.ample_class) - cup_operator(u, m.ample_class);

  std::vector<OpSeries> dir_ops(n);
  std::vector<char> dir_built(n, 0);
  auto direction_op = [&](int i) -> const OpSeries& {
    if (!dir_built[i]) {
      dir_ops[i] = star_operator(store, u, i);
      dir_built[i] = 1;
    }
    return dir_ops[i];
  };

  struct Level {
    CurveVector d;
    std::vector<int> beta;
    int total;
  };
  std::vector<Level> levels;

  std::vector<CurveVector> all_d;
  all_d.push_back(CurveVector(m.curves.size(), 0));
  for (auto& d : enumerate_curves(m, u.pol.max_novikov_weight)) all_d.push_back(std::move(d));

  std::vector<std::vector<int>> betas;
  std::vector<int> cur(n, 0);
  std::function<void(int, int)> gen = [&](int idx, int left) {
    if (idx == n) {
      betas.push_back(cur);
      return;
    }
    const int cap = m.basis[idx].parity() ? std::min(left, 1) : left;
    for (int e = 0; e <= cap; ++e) {
      cur[idx] = e;
      gen(idx + 1, left - e);
    }
    cur[idx] = 0;
  };
  gen(0, u.pol.max_param_order);

  for (const auto& d : all_d) {
    const int w = static_cast<int>(m.weight_of(d));
    for (const auto& b : betas) {
      int ord = 0;
      for (int e : b) ord += e;
      if (w + ord == 0) continue;
      levels.push_back({d, b, w + ord});
    }
  }
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    return std::tie(a.total, a.d, a.beta) < std::tie(b.total, b.d, b.beta);
  });

  const GradedSeries zinv = z_power(u.vars, u.field_order, u.pol, -1);

  size_t li = 0;
  while (li < levels.size()) {
    const size_t lo = li;
    while (li < levels.size() && levels[li].total == levels[lo].total) ++li;
    std::map<int, OpSeries> composed;  // direction index; -1 for the ample route
    for (size_t t = lo; t < li; ++t) {
      const Level& lv = levels[t];
      int ord = 0;
      for (int e : lv.beta) ord += e;

      int dir = -1;
      Rational scale;
      std::vector<std::pair<int, int>> slots;
      for (size_t g = 0; g < lv.d.size(); ++g) slots.push_back({static_cast<int>(g), lv.d[g]});
      if (ord == 0) {
        if (!composed.count(dir)) composed.emplace(dir, compose(omega_q, M));
        for (int p = 0; p < n; ++p) slots.push_back({u.vars->param_slot(p), 0});
        scale = Rational(1) / m.divisor_dot(m.ample_class, lv.d);
      } else {
        dir = 0;
        while (lv.beta[dir] == 0) ++dir;  // least direction: no crossing sign
        if (!composed.count(dir))
          composed.emplace(dir, compose(direction_op(dir), M, m.basis[dir].parity()));
        for (int p = 0; p < n; ++p)
          slots.push_back({u.vars->param_slot(p), p == dir ? lv.beta[p] - 1 : lv.beta[p]});
        scale = Rational(1) / Rational(lv.beta[dir]);
      }
      const OpSeries& comp = composed.at(dir);

      Monomial mo;
      mo.e.assign(u.vars->slot_count(), 0);
      for (size_t g = 0; g < lv.d.size(); ++g) mo.e[g] = static_cast<int16_t>(lv.d[g]);
      for (int p = 0; p < n; ++p)
        mo.e[u.vars->param_slot(p)] = static_cast<int16_t>(lv.beta[p]);
      const GradedSeries mono = GradedSeries::monomial_term(
          u.vars, u.field_order, u.pol, mo,
          CyclotomicNumber::from_rational(u.field_order, scale));

      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          GradedSeries coeffz = coefficient_extract(comp.entry(r, c), slots);
          if (coeffz.is_zero()) continue;
          M.entry(r, c) += (coeffz * zinv) * mono;
        }
    }
  }
  return M;
}

OpSeries flatness_defect(GWStore& store, const QuantumUniverse& u, const OpSeries& m,
                         int basis_index) {
  OpSeries a = star_operator(store, u, basis_index);
  OpSeries out = compose(a, m, u.model->basis[basis_index].parity());
  const GradedSeries z1 = z_power(u.vars, u.field_order, u.pol, 1);
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c)
      out.entry(r, c) =
          series_derivative(m.entry(r, c), basis_index) * z1 - out.entry(r, c);
  // the derivative consumes one parameter order, so the top order of the
  // window is not determined; compare one order below it
  TruncationPolicy determined = u.pol;
  if (determined.max_param_order > 0) --determined.max_param_order;
  return out.truncated(determined);
}

bool quantum_associativity_holds(GWStore& store, const QuantumUniverse& u, std::string* witness) {
  const auto& m = *u.model;
  std::vector<int> even;
  for (int i = 0; i < m.size(); ++i)
    if (!m.basis[i].parity()) even.push_back(i);
  std::vector<OpSeries> ops;
  ops.reserve(even.size());
  for (int i : even) ops.push_back(star_operator(store, u, i));
  for (size_t a = 0; a < ops.size(); ++a)
    for (size_t b = a + 1; b < ops.size(); ++b)
      if (compose(ops[a], ops[b]) != compose(ops[b], ops[a])) {
        if (witness)
          *witness = m.basis[even[a]].label + " and " + m.basis[even[b]].label;
        return false;
      }
  return true;
}

std::optional<std::string> correlator_bidegree_violation(GWStore& store, int max_weight,
                                                         int max_insertions) {
  const auto& m = store.model();
  const int n = m.size();
  std::vector<std::vector<int>> keys;
  std::vector<int> cur;
  std::function<void(int)> gen = [&](int start) {
    if (!cur.empty()) keys.push_back(cur);
    if (static_cast<int>(cur.size()) >= max_insertions) return;
    for (int a = start; a < n; ++a) {
      if (m.basis[a].parity() && !cur.empty() && cur.back() == a) continue;
      cur.push_back(a);
      gen(a);
      cur.pop_back();
    }
  };
  gen(0);

  for (const auto& d : enumerate_curves(m, max_weight)) {
    for (const auto& key : keys) {
      Rational v;
      try {
        v = store.correlator(d, key);
      } catch (const MissingSeedError&) {
        continue;
      }
      if (v == 0) continue;
      int ps = 0, qs = 0;
      for (int i : key) {
        ps += m.basis[i].p;
        qs += m.basis[i].q;
      }
      if (ps != qs) {
        std::ostringstream os;
        os << describe_invariant(m, d, key) << " = " << v << " has bidegree (" << ps << ", "
           << qs << ")";
        return os.str();
      }
    }
  }
  return std::nullopt;
}

}  // namespace qdm
