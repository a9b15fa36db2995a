#include "qdm/config_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace qdm {

namespace {

using nlohmann::json;

Rational rat(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  throw ConfigError(where + ": rationals must be integers or strings like \"3/4\"");
}

ClassVector class_vector(const CohomologyModel& m, const json& j, const std::string& where) {
  ClassVector v = m.zero_class();
  if (j.is_null()) return v;
  if (!j.is_object()) throw ConfigError(where + ": class must be an object {label: value}");
  for (auto it = j.begin(); it != j.end(); ++it)
    v[m.index_of(it.key())] = rat(it.value(), where + "." + it.key());
  return v;
}

CurveVector curve_vector(const CohomologyModel& m, const json& j, const std::string& where) {
  CurveVector v(m.curves.size(), 0);
  if (j.is_null()) return v;
  if (!j.is_object()) throw ConfigError(where + ": curve class must be an object {gen: int}");
  for (auto it = j.begin(); it != j.end(); ++it) {
    int idx = -1;
    for (size_t g = 0; g < m.curves.size(); ++g)
      if (m.curves[g].name == it.key()) idx = static_cast<int>(g);
    if (idx < 0) throw ConfigError(where + ": unknown curve generator '" + it.key() + "'");
    if (!it.value().is_number_integer())
      throw ConfigError(where + ": curve exponents must be integers");
    v[idx] = it.value().get<int>();
  }
  return v;
}

std::pair<std::string, std::string> split_pair_key(const std::string& key,
                                                   const std::string& where) {
  auto star = key.find('*');
  if (star == std::string::npos || star == 0 || star + 1 == key.size())
    throw ConfigError(where + ": keys must look like \"a*b\", got '" + key + "'");
  return {key.substr(0, star), key.substr(star + 1)};
}

CohomologyModel parse_model(const json& j, const std::string& where) {
  CohomologyModel m;
  m.name = j.value("name", where);
  if (!j.contains("dim")) throw ConfigError(where + ": missing dim");
  m.dim_c = j.at("dim").get<int>();
  if (!j.contains("basis")) throw ConfigError(where + ": missing basis");
  for (const auto& b : j.at("basis")) {
    BasisClass bc;
    bc.label = b.at("label").get<std::string>();
    bc.degree = b.at("degree").get<int>();
    bc.p = b.at("p").get<int>();
    bc.q = b.at("q").get<int>();
    m.basis.push_back(bc);
  }
  const int n = m.size();
  m.unit_index = m.index_of(j.value("unit", "1"));

  // Cup table: unit products implicit; nonzero products given once, the
  // graded-commuted mirror derived; everything else zero.
  m.cup_table.assign(n, std::vector<ClassVector>(n, m.zero_class()));
  for (int i = 0; i < n; ++i) {
    m.cup_table[m.unit_index][i] = m.basis_vector(i);
    m.cup_table[i][m.unit_index] = m.basis_vector(i);
  }
  std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
  if (j.contains("cup")) {
    for (auto it = j.at("cup").begin(); it != j.at("cup").end(); ++it) {
      auto [a, b] = split_pair_key(it.key(), where + ".cup");
      int ia = m.index_of(a), ib = m.index_of(b);
      ClassVector v = class_vector(m, it.value(), where + ".cup." + it.key());
      if (given[ia][ib]) throw ConfigError(where + ".cup: duplicate entry " + it.key());
      m.cup_table[ia][ib] = v;
      given[ia][ib] = true;
      if (ia != ib && !given[ib][ia]) {
        ClassVector w = v;
        if (m.basis[ia].parity() && m.basis[ib].parity())
          for (auto& x : w) x = -x;
        m.cup_table[ib][ia] = w;
        given[ib][ia] = true;
      }
    }
  }

  m.pairing.assign(n, ClassVector(n, Rational(0)));
  if (j.contains("pairing")) {
    for (auto it = j.at("pairing").begin(); it != j.at("pairing").end(); ++it) {
      auto [a, b] = split_pair_key(it.key(), where + ".pairing");
      int ia = m.index_of(a), ib = m.index_of(b);
      Rational v = rat(it.value(), where + ".pairing." + it.key());
      m.pairing[ia][ib] = v;
      if (ia != ib) {
        Rational w = v;
        if (m.basis[ia].parity() && m.basis[ib].parity()) w = -w;
        m.pairing[ib][ia] = w;
      }
    }
  }
  std::vector<ClassVector> cols(n, ClassVector(n, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) cols[i][k] = m.pairing[k][i];
  try {
    auto inv_cols = invert_matrix(cols);
    m.pairing_inv.assign(n, ClassVector(n, Rational(0)));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m.pairing_inv[k][i] = inv_cols[i][k];
  } catch (const ConfigError&) {
    throw ConfigError(where + ": pairing is degenerate");
  }

  m.c1_class = class_vector(m, j.contains("c1_class") ? j.at("c1_class") : json(), where + ".c1_class");
  m.ample_class =
      class_vector(m, j.contains("ample_class") ? j.at("ample_class") : json(), where + ".ample_class");
  if (j.contains("curves")) {
    for (const auto& c : j.at("curves")) {
      CurveGen g;
      g.name = c.at("name").get<std::string>();
      g.ample_weight = c.at("ample_weight").get<int>();
      g.c1 = c.at("c1").get<int>();
      g.divisor_pairing = class_vector(m, c.at("divisor_pairing"), where + ".curves");
      m.curves.push_back(g);
    }
  }
  if (j.contains("gw_seeds")) {
    for (const auto& s : j.at("gw_seeds")) {
      GWSeed seed;
      seed.curve = curve_vector(m, s.at("curve"), where + ".gw_seeds");
      for (const auto& lbl : s.at("insertions")) seed.insertions.push_back(m.index_of(lbl));
      seed.value = rat(s.at("value"), where + ".gw_seeds.value");
      m.seeds.push_back(seed);
    }
  }
  return m;
}

std::vector<ClassVector> parse_map_columns(const CohomologyModel& from, const CohomologyModel& to,
                                           const json& j, const std::string& where) {
  std::vector<ClassVector> cols(from.size(), to.zero_class());
  if (j.is_null()) return cols;
  for (auto it = j.begin(); it != j.end(); ++it)
    cols[from.index_of(it.key())] = class_vector(to, it.value(), where + "." + it.key());
  return cols;
}

std::shared_ptr<BlowupGeometry> parse_blowup(const json& j, const std::string& name) {
  auto g = std::make_shared<BlowupGeometry>();
  g->name = name;
  g->field_order = j.value("field_order", 4);
  g->codim = j.at("codim").get<int>();
  g->base = parse_model(j.at("base"), name + ".base");
  g->center = parse_model(j.at("center"), name + ".center");
  g->total = parse_model(j.at("total"), name + ".total");

  g->rho_center = class_vector(g->center, j.contains("rho_center") ? j.at("rho_center") : json(),
                               name + ".rho_center");
  if (!j.contains("chern_normal")) throw ConfigError(name + ": missing chern_normal");
  for (const auto& c : j.at("chern_normal"))
    g->chern_normal.push_back(class_vector(g->center, c, name + ".chern_normal"));

  g->iota_push = parse_map_columns(g->center, g->base, j.at("iota_push"), name + ".iota_push");
  g->phi_pull = parse_map_columns(g->base, g->total, j.at("phi_pull"), name + ".phi_pull");
  for (const auto& layer : j.at("j_push"))
    g->j_push.push_back(parse_map_columns(g->center, g->total, layer, name + ".j_push"));
  g->exceptional_index = g->total.index_of(j.at("exceptional").get<std::string>());
  g->kappa_base = parse_map_columns(g->total, g->base, j.at("kappa_base"), name + ".kappa_base");

  g->i_center.assign(g->total.size(), {});
  for (auto it = j.at("i_center").begin(); it != j.at("i_center").end(); ++it) {
    int col = g->total.index_of(it.key());
    for (const auto& term : it.value()) {
      LambdaTerm t;
      t.lambda_exp = term.at("lambda").get<int>();
      if (t.lambda_exp < 0) throw ConfigError(name + ".i_center: negative lambda power");
      t.coeff = class_vector(g->center, term.at("class"), name + ".i_center");
      g->i_center[col].push_back(t);
    }
  }

  const auto& tc = j.at("total_curves");
  if (tc.size() != g->total.curves.size())
    throw ConfigError(name + ": total_curves must match the total model curve list");
  for (size_t i = 0; i < tc.size(); ++i) {
    if (tc[i].at("name").get<std::string>() != g->total.curves[i].name)
      throw ConfigError(name + ": total_curves order must match the total model");
    BlowupGeometry::TotalCurve c;
    c.phi_push = curve_vector(g->base, tc[i].at("phi_push"), name + ".total_curves");
    c.exc_dot = tc[i].at("exc_dot").get<int>();
    g->total_curves.push_back(c);
  }
  {
    const std::string fiber = j.at("fiber").get<std::string>();
    for (size_t i = 0; i < g->total.curves.size(); ++i)
      if (g->total.curves[i].name == fiber) g->fiber_gen = static_cast<int>(i);
    if (g->fiber_gen < 0) throw ConfigError(name + ": fiber generator not found");
  }
  if (j.contains("center_curve_push")) {
    g->center_curve_push.assign(g->center.curves.size(), CurveVector(g->base.curves.size(), 0));
    for (auto it = j.at("center_curve_push").begin(); it != j.at("center_curve_push").end(); ++it) {
      int idx = -1;
      for (size_t k = 0; k < g->center.curves.size(); ++k)
        if (g->center.curves[k].name == it.key()) idx = static_cast<int>(k);
      if (idx < 0) throw ConfigError(name + ": unknown center curve " + it.key());
      g->center_curve_push[idx] = curve_vector(g->base, it.value(), name + ".center_curve_push");
    }
  } else {
    g->center_curve_push.assign(g->center.curves.size(), CurveVector(g->base.curves.size(), 0));
    if (!g->center.curves.empty())
      throw ConfigError(name + ": center has curves but center_curve_push missing");
  }

  const auto& f = j.at("fourier");
  g->fourier.fixed_rank = f.at("fixed_rank").get<int>();
  g->fourier.rho_fixed_class =
      class_vector(g->center, f.at("rho_fixed").at("class"), name + ".fourier.rho_fixed");
  g->fourier.rho_fixed_lambda = rat(f.at("rho_fixed").at("lambda"), name + ".fourier.rho_fixed");
  for (const auto& w : f.at("weights")) {
    EulerWeight ew;
    ew.weight = rat(w.at("weight"), name + ".fourier.weights");
    ew.mult = w.at("mult").get<int>();
    for (const auto& t : w.at("log_delta_inv")) {
      EulerWeight::LogTerm lt;
      lt.z_exp = t.at("z").get<int>();
      lt.lambda_exp = t.at("lambda").get<int>();
      lt.coeff = rat(t.at("coeff"), name + ".fourier.log_delta_inv");
      ew.log_delta_inv.push_back(lt);
    }
    g->fourier.weights.push_back(ew);
  }

  // Derived tables.
  {
    const int nB = g->base.size(), nZ = g->center.size();
    // iota_pull: adjoint of iota_push under the two pairings.
    // v = G_Z^{-T} P^T G_X^T x for each base basis vector x.
    std::vector<ClassVector> gz_t(nZ, ClassVector(nZ, Rational(0)));
    for (int i = 0; i < nZ; ++i)
      for (int k = 0; k < nZ; ++k) gz_t[i][k] = g->center.pairing[i][k];  // columns of G_Z^T
    auto gz_t_inv = invert_matrix(gz_t);
    g->iota_pull.assign(nB, g->center.zero_class());
    for (int x = 0; x < nB; ++x) {
      // w = P^T G_X^T e_x, i.e. w_a = sum_i P[a][i] * G_X[x][i]... careful:
      // (G_X^T e_x)_i = G_X[x][i]; then w_a = sum_i iota_push[a][i] * that.
      ClassVector w(nZ, Rational(0));
      for (int a = 0; a < nZ; ++a)
        for (int i = 0; i < nB; ++i) w[a] += g->iota_push[a][i] * g->base.pairing[x][i];
      for (int a = 0; a < nZ; ++a)
        for (int b = 0; b < nZ; ++b) g->iota_pull[x][a] += gz_t_inv[b][a] * w[b];
    }
    // Decomposition matrix and inverse.
    g->dec_matrix = g->phi_pull;
    for (int l = 0; l < g->codim - 1; ++l)
      for (int k = 0; k < nZ; ++k) g->dec_matrix.push_back(g->j_push[l][k]);
    g->dec_inverse.clear();
    auto inv = invert_matrix(g->dec_matrix);
    // inv columns are indexed by total basis; dec_inverse[k] = coordinates of
    // the k-th total basis vector in the decomposition basis.
    g->dec_inverse = inv;
  }

  g->validate();
  return g;
}

}  // namespace

GeometryConfig load_geometry_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("geometry config is not valid JSON: ") + e.what());
  }
  if (j.value("schema", "") != std::string("qdm-geometry/1"))
    throw ConfigError("geometry config must declare schema qdm-geometry/1");
  GeometryConfig cfg;
  cfg.name = j.value("name", "unnamed");
  cfg.kind = j.value("kind", "");
  cfg.field_order = j.value("field_order", 1);
  if (cfg.kind == "space") {
    cfg.space = std::make_shared<CohomologyModel>(parse_model(j.at("space"), cfg.name));
    cfg.space->validate();
  } else if (cfg.kind == "blowup") {
    cfg.blowup = parse_blowup(j, cfg.name);
    cfg.field_order = cfg.blowup->field_order;
  } else {
    throw ConfigError("geometry kind must be 'space' or 'blowup'");
  }
  return cfg;
}

GeometryConfig load_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open geometry config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_geometry_json(ss.str());
}

std::string resolve_geometry_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (name_or_path.find('/') != std::string::npos || name_or_path.ends_with(".json")) {
    if (fs::exists(name_or_path)) return name_or_path;
    throw ConfigError("geometry file not found: " + name_or_path);
  }
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("QDM_DATA_DIR")) dirs.push_back(env);
#ifdef QDM_DATA_BUILD_DIR
  dirs.push_back(QDM_DATA_BUILD_DIR);
#endif
#ifdef QDM_DATA_INSTALL_DIR
  dirs.push_back(QDM_DATA_INSTALL_DIR);
#endif
  for (const auto& d : dirs) {
    fs::path p = fs::path(d) / (name_or_path + ".json");
    if (fs::exists(p)) return p.string();
  }
  throw ConfigError("unknown bundled geometry '" + name_or_path + "'");
}

GeometryConfig load_geometry(const std::string& name_or_path) {
  return load_geometry_file(resolve_geometry_path(name_or_path));
}

std::vector<std::string> bundled_geometry_names() {
  namespace fs = std::filesystem;
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("QDM_DATA_DIR")) dirs.push_back(env);
#ifdef QDM_DATA_BUILD_DIR
  dirs.push_back(QDM_DATA_BUILD_DIR);
#endif
#ifdef QDM_DATA_INSTALL_DIR
  dirs.push_back(QDM_DATA_INSTALL_DIR);
#endif
  std::vector<std::string> names;
  for (const auto& d : dirs) {
    if (!fs::is_directory(d)) continue;
    for (const auto& ent : fs::directory_iterator(d)) {
      if (ent.path().extension() == ".json") {
        std::string stem = ent.path().stem().string();
        if (std::find(names.begin(), names.end(), stem) == names.end()) names.push_back(stem);
      }
    }
    if (!names.empty()) break;
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace qdm
