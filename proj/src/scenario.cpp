#include "deflect/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace deflect {

using nlohmann::json;

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

double true_from_mean(double m, double e) {
  double ea = m;
  for (int k = 0; k < 50; ++k) ea -= (ea - e * std::sin(ea) - m) / (1.0 - e * std::cos(ea));
  return 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(ea / 2.0),
                          std::sqrt(1.0 - e) * std::cos(ea / 2.0));
}

// Reads fields of one JSON object and complains about keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ScenarioError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ScenarioError(where_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!j_.contains(key)) throw ScenarioError(where_ + ": missing required key '" + key + "'");
    get(key, out);
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.at(key), where_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ScenarioError(where_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json elements_json(const KeplerianElements& k) {
  return {{"a_km", k.a}, {"e", k.e}, {"i_rad", k.i}, {"raan_rad", k.raan},
          {"argp_rad", k.argp}, {"theta_rad", k.theta}};
}

KeplerianElements read_elements(Reader r) {
  KeplerianElements k;
  r.require("a_km", k.a);
  r.require("e", k.e);
  r.require("i_rad", k.i);
  r.require("raan_rad", k.raan);
  r.require("argp_rad", k.argp);
  r.require("theta_rad", k.theta);
  r.finish();
  return k;
}

json properties_json(const AsteroidProperties& p) {
  return {{"c_a", p.c_a},         {"k_a", p.k_a},           {"rho_a", p.rho_a},
          {"t_subl", p.t_subl},   {"e_sub", p.e_sub},       {"t_0", p.t_0},
          {"albedo", p.albedo},   {"emiss_bb", p.emiss_bb}, {"a1_m", p.a1},
          {"b1_m", p.b1},         {"omega_a", p.omega_a},   {"m_a_kg", p.m_a},
          {"mol_mass_kg", p.mol_mass}};
}

void read_properties(Reader r, AsteroidProperties& p) {
  r.get("c_a", p.c_a);
  r.get("k_a", p.k_a);
  r.get("rho_a", p.rho_a);
  r.get("t_subl", p.t_subl);
  r.get("e_sub", p.e_sub);
  r.get("t_0", p.t_0);
  r.get("albedo", p.albedo);
  r.get("emiss_bb", p.emiss_bb);
  r.get("a1_m", p.a1);
  r.get("b1_m", p.b1);
  r.get("omega_a", p.omega_a);
  r.get("m_a_kg", p.m_a);
  r.get("mol_mass_kg", p.mol_mass);
  r.finish();
}

json tech_json(const TechnologyParams& t) {
  return {{"eta_l", t.eta_l},   {"eta_sa", t.eta_sa}, {"eta_p", t.eta_p},
          {"emiss_m", t.emiss_m}, {"rho_r", t.rho_r}, {"rho_l", t.rho_l},
          {"rho_m", t.rho_m},   {"rho_s", t.rho_s},   {"mf_c", t.mf_c},
          {"mf_p", t.mf_p},     {"m_bus", t.m_bus},   {"c_geo", t.c_geo},
          {"t_rad", t.t_rad},   {"emiss_rad", t.emiss_rad}};
}

void read_tech(Reader r, TechnologyParams& t) {
  r.get("eta_l", t.eta_l);
  r.get("eta_sa", t.eta_sa);
  r.get("eta_p", t.eta_p);
  r.get("emiss_m", t.emiss_m);
  r.get("rho_r", t.rho_r);
  r.get("rho_l", t.rho_l);
  r.get("rho_m", t.rho_m);
  r.get("rho_s", t.rho_s);
  r.get("mf_c", t.mf_c);
  r.get("mf_p", t.mf_p);
  r.get("m_bus", t.m_bus);
  r.get("c_geo", t.c_geo);
  r.get("t_rad", t.t_rad);
  r.get("emiss_rad", t.emiss_rad);
  r.finish();
}

json constants_json(const PhysicalConstants& c) {
  return {{"sigma", c.sigma},         {"k_b", c.k_b},   {"s0", c.s0},
          {"au_km", c.au},            {"lambda_scatter", c.lambda_scatter},
          {"j_c", c.j_c},             {"kappa", c.kappa}, {"rho_layer", c.rho_layer},
          {"eta_abs_per_cm", c.eta_abs}};
}

void read_constants(Reader r, PhysicalConstants& c) {
  r.get("sigma", c.sigma);
  r.get("k_b", c.k_b);
  r.get("s0", c.s0);
  r.get("au_km", c.au);
  r.get("lambda_scatter", c.lambda_scatter);
  r.get("j_c", c.j_c);
  r.get("kappa", c.kappa);
  r.get("rho_layer", c.rho_layer);
  r.get("eta_abs_per_cm", c.eta_abs);
  r.finish();
}

json intervals_json(const std::vector<UncertainInterval>& ivs) {
  json a = json::array();
  for (const auto& iv : ivs) a.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"bpa", iv.bpa}});
  return a;
}

std::vector<UncertainInterval> read_intervals(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of intervals");
  std::vector<UncertainInterval> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    Reader r(j[k], where + "[" + std::to_string(k) + "]");
    UncertainInterval iv;
    r.require("lo", iv.lo);
    r.require("hi", iv.hi);
    r.require("bpa", iv.bpa);
    r.finish();
    out.push_back(iv);
  }
  return out;
}

json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(what + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario reference_scenario() {
  Scenario s;
  auto& m = s.mission;
  const double e_earth = 0.01671123;
  m.earth_elements = {1.00000261 * kAU, e_earth, 0.0, 0.0, deg(102.93768),
                      true_from_mean(deg(100.46457 - 102.93768), e_earth)};
  m.earth_epoch = 0.0;  // J2000
  m.asteroid_elements = {0.9224 * kAU, 0.1912, deg(3.339), deg(203.96), deg(126.60), 0.0};
  m.asteroid_epoch = 678369600.0;  // 2021-07-01
  m.t_impact = 1144929600.0;       // 2036-04-13
  m.asteroid.omega_a = 1e-5;
  m.asteroid.albedo = 0.1;
  m.asteroid.emiss_bb = 0.5;
  m.arc = {0.05, 1.0, 0.2, 0.0};
  // Each block of the full structure costs two inner searches on the
  // deflection model, so the curve budget is kept at desk scale.
  s.curve.bpa_floor = 1e-3;
  s.curve.max_partitions = 1000;
  s.experts_file = "experts.json";
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  const auto& m = s.mission;
  json nominal = json::object();
  for (std::size_t i = 0; i < kNumUncertain; ++i) nominal[std::string(kUncertainNames[i])] = m.nominal[i];
  json j = {
      {"schema_version", kScenarioSchemaVersion},
      {"asteroid",
       {{"elements", elements_json(m.asteroid_elements)},
        {"epoch_s", m.asteroid_epoch},
        {"properties", properties_json(m.asteroid)},
        {"derive_mass", m.derive_mass}}},
      {"earth", {{"elements", elements_json(m.earth_elements)}, {"epoch_s", m.earth_epoch}}},
      {"t_impact_s", m.t_impact},
      {"calibrate", s.calibrate},
      {"technology", tech_json(m.tech)},
      {"margins",
       {{"k_dry", m.margins.k_dry}, {"k_s", m.margins.k_s}, {"k_m", m.margins.k_m},
        {"k_l", m.margins.k_l}}},
      {"design_bounds",
       {{"d_m", {m.bounds.d_m_lo, m.bounds.d_m_hi}},
        {"n_sc", {m.bounds.n_sc_lo, m.bounds.n_sc_hi}},
        {"t_warn_years", {m.bounds.t_warn_lo, m.bounds.t_warn_hi}},
        {"c_r", {m.bounds.c_r_lo, m.bounds.c_r_hi}}}},
      {"station",
       {{"x_m", m.station.x}, {"y_m", m.station.y}, {"z_m", m.station.z},
        {"theta_va_rad", m.station.theta_va}, {"psi_vf_rad", m.station.psi_vf}}},
      {"constants", constants_json(m.consts)},
      {"arc_control",
       {{"a_const", m.arc.a_const}, {"k_const", m.arc.k_const}, {"dl_max_rad", m.arc.dl_max}}},
      {"max_arcs", m.max_arcs},
      {"contamination", m.contamination},
      {"nominal_uncertain", nominal},
      {"experts_file", s.experts_file},
      {"solver",
       {{"outer_budget", s.solver.outer_budget}, {"outer_pop", s.solver.outer_pop},
        {"explorers", s.solver.explorers}, {"inner_budget", s.solver.inner_budget},
        {"inner_pop", s.solver.inner_pop}, {"archive_capacity", s.solver.archive_capacity}}},
      {"evidence",
       {{"n_v", s.curve.n_v}, {"bpa_floor", s.curve.bpa_floor},
        {"max_partitions", s.curve.max_partitions}}},
      {"seed", s.solver.seed},
  };
  return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  const json j = parse_text(text, "scenario");
  Scenario s;
  auto& m = s.mission;
  Reader r(j, "scenario");
  int version = 0;
  r.require("schema_version", version);
  if (version != kScenarioSchemaVersion) {
    throw ScenarioError("scenario: unsupported schema_version " + std::to_string(version));
  }
  for (const char* key : {"asteroid", "earth", "t_impact_s"}) {
    if (!r.has(key)) throw ScenarioError(std::string("scenario: missing required key '") + key + "'");
  }
  {
    Reader a = r.child("asteroid");
    if (!a.has("elements")) throw ScenarioError("scenario.asteroid: missing 'elements'");
    m.asteroid_elements = read_elements(a.child("elements"));
    a.require("epoch_s", m.asteroid_epoch);
    if (a.has("properties")) read_properties(a.child("properties"), m.asteroid);
    a.get("derive_mass", m.derive_mass);
    a.finish();
  }
  {
    Reader e = r.child("earth");
    if (!e.has("elements")) throw ScenarioError("scenario.earth: missing 'elements'");
    m.earth_elements = read_elements(e.child("elements"));
    e.require("epoch_s", m.earth_epoch);
    e.finish();
  }
  r.require("t_impact_s", m.t_impact);
  r.get("calibrate", s.calibrate);
  if (r.has("technology")) read_tech(r.child("technology"), m.tech);
  if (r.has("margins")) {
    Reader g = r.child("margins");
    g.get("k_dry", m.margins.k_dry);
    g.get("k_s", m.margins.k_s);
    g.get("k_m", m.margins.k_m);
    g.get("k_l", m.margins.k_l);
    g.finish();
  }
  if (r.has("design_bounds")) {
    Reader g = r.child("design_bounds");
    auto pair = [&](const char* key, auto& lo, auto& hi) {
      std::vector<double> v{static_cast<double>(lo), static_cast<double>(hi)};
      g.get(key, v);
      if (v.size() != 2 || !(v[0] <= v[1])) {
        throw ScenarioError(std::string("scenario.design_bounds.") + key + ": need [lo, hi]");
      }
      lo = static_cast<std::remove_reference_t<decltype(lo)>>(v[0]);
      hi = static_cast<std::remove_reference_t<decltype(hi)>>(v[1]);
    };
    pair("d_m", m.bounds.d_m_lo, m.bounds.d_m_hi);
    pair("n_sc", m.bounds.n_sc_lo, m.bounds.n_sc_hi);
    pair("t_warn_years", m.bounds.t_warn_lo, m.bounds.t_warn_hi);
    pair("c_r", m.bounds.c_r_lo, m.bounds.c_r_hi);
    g.finish();
  }
  if (r.has("station")) {
    Reader g = r.child("station");
    g.get("x_m", m.station.x);
    g.get("y_m", m.station.y);
    g.get("z_m", m.station.z);
    g.get("theta_va_rad", m.station.theta_va);
    g.get("psi_vf_rad", m.station.psi_vf);
    g.finish();
  }
  if (r.has("constants")) read_constants(r.child("constants"), m.consts);
  if (r.has("arc_control")) {
    Reader g = r.child("arc_control");
    g.get("a_const", m.arc.a_const);
    g.get("k_const", m.arc.k_const);
    g.get("dl_max_rad", m.arc.dl_max);
    g.finish();
  }
  r.get("max_arcs", m.max_arcs);
  r.get("contamination", m.contamination);
  if (r.has("nominal_uncertain")) {
    Reader g = r.child("nominal_uncertain");
    for (std::size_t i = 0; i < kNumUncertain; ++i) g.get(std::string(kUncertainNames[i]), m.nominal[i]);
    g.finish();
  }
  r.get("experts_file", s.experts_file);
  if (r.has("solver")) {
    Reader g = r.child("solver");
    g.get("outer_budget", s.solver.outer_budget);
    g.get("outer_pop", s.solver.outer_pop);
    g.get("explorers", s.solver.explorers);
    g.get("inner_budget", s.solver.inner_budget);
    g.get("inner_pop", s.solver.inner_pop);
    g.get("archive_capacity", s.solver.archive_capacity);
    g.finish();
  }
  if (r.has("evidence")) {
    Reader g = r.child("evidence");
    g.get("n_v", s.curve.n_v);
    g.get("bpa_floor", s.curve.bpa_floor);
    g.get("max_partitions", s.curve.max_partitions);
    g.finish();
  }
  r.get("seed", s.solver.seed);
  r.finish();

  try {
    s.solver.validate();
    m.tech.validate();
    AsteroidProperties check = m.asteroid;
    if (m.derive_mass) check.m_a = ellipsoid_mass(check.rho_a, check.a1, check.b1);
    check.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (s.curve.n_v < 2) throw ScenarioError("scenario.evidence.n_v must be at least 2");
  if (!(m.asteroid_elements.e < 1.0 && m.earth_elements.e < 1.0)) {
    throw ScenarioError("scenario: orbits must be elliptic");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, bool apply_calibration) {
  Scenario s = parse_scenario(read_file(path));
  if (!s.experts_file.empty()) {
    std::filesystem::path ep(s.experts_file);
    if (ep.is_relative()) ep = path.parent_path() / ep;
    s.experts = load_experts(ep);
  }
  if (apply_calibration && s.calibrate) calibrate_scenario(s.mission);
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path.string());
  out << serialize_scenario(s);
}

std::string serialize_experts(const std::vector<ExpertOpinion>& experts) {
  json arr = json::array();
  for (const auto& e : experts) {
    json params = json::object();
    for (const auto& [name, ivs] : e.parameters) params[name] = intervals_json(ivs);
    arr.push_back({{"id", e.id}, {"weight", e.weight}, {"parameters", params}});
  }
  return json{{"schema_version", kScenarioSchemaVersion}, {"experts", arr}}.dump(2) + "\n";
}

std::vector<ExpertOpinion> parse_experts(const std::string& text) {
  const json j = parse_text(text, "experts");
  Reader r(j, "experts");
  int version = 0;
  r.require("schema_version", version);
  if (version != kScenarioSchemaVersion) {
    throw ScenarioError("experts: unsupported schema_version " + std::to_string(version));
  }
  json list;
  r.require("experts", list);
  r.finish();
  if (!list.is_array() || list.empty()) throw ScenarioError("experts: need a non-empty array");
  std::vector<ExpertOpinion> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "experts[" + std::to_string(k) + "]";
    Reader e(list[k], where);
    ExpertOpinion op;
    e.require("id", op.id);
    e.get("weight", op.weight);
    json params;
    e.require("parameters", params);
    e.finish();
    if (!params.is_object()) throw ScenarioError(where + ".parameters: expected an object");
    for (const auto& [name, ivs] : params.items()) {
      if (std::find(kUncertainNames.begin(), kUncertainNames.end(), name) == kUncertainNames.end()) {
        throw ScenarioError(where + ".parameters: unknown parameter '" + name + "'");
      }
      op.parameters[name] = read_intervals(ivs, where + ".parameters." + name);
      try {
        ParameterBPA{name, op.parameters[name]}.validate();
      } catch (const EvidenceError& err) {
        throw ScenarioError(where + ": " + err.what());
      }
    }
    out.push_back(std::move(op));
  }
  return out;
}

std::vector<ExpertOpinion> load_experts(const std::filesystem::path& path) {
  return parse_experts(read_file(path));
}

std::vector<ParameterBPA> fuse_all(const std::vector<ExpertOpinion>& experts) {
  std::vector<ParameterBPA> out;
  for (auto name : kUncertainNames) out.push_back(fuse_experts(experts, std::string(name)));
  return out;
}

EvidenceStructure evidence_from(const std::vector<ExpertOpinion>& experts) {
  return EvidenceStructure(fuse_all(experts));
}

EvidenceStructure single_parameter_evidence(const std::vector<ExpertOpinion>& experts,
                                            std::size_t parameter,
                                            const UncertainVector& fixed) {
  if (parameter >= kNumUncertain) throw std::invalid_argument("parameter index out of range");
  std::vector<ParameterBPA> ps;
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    const std::string name(kUncertainNames[i]);
    if (i == parameter) {
      ps.push_back(fuse_experts(experts, name));
    } else {
      ps.push_back({name, {{fixed[i], fixed[i], 1.0}}});
    }
  }
  return EvidenceStructure(ps);
}

}  // namespace deflect
