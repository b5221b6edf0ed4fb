#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "deflect/scenario.hpp"
#include "json.hpp"

using namespace deflect;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kData = fs::path(DEFLECT_SOURCE_DIR) / "data";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string edited(const std::function<void(json&)>& f) {
  json j = json::parse(serialize_scenario(reference_scenario()));
  f(j);
  return j.dump();
}

const Scenario& loaded() {
  static const Scenario s = load_scenario(kData / "reference_scenario.json");
  return s;
}

const MissionModel& model() {
  static const MissionModel m(loaded().mission);
  return m;
}

SolverConfig small_config(int inner_budget = 60) {
  SolverConfig c;
  c.inner_budget = inner_budget;
  c.inner_pop = 6;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("serialize and parse are inverse") {
  const std::string once = serialize_scenario(reference_scenario());
  const std::string twice = serialize_scenario(parse_scenario(once));
  CHECK(once == twice);
  const Scenario s = parse_scenario(once);
  const Scenario r = reference_scenario();
  CHECK(s.mission.asteroid_elements.a == r.mission.asteroid_elements.a);
  CHECK(s.mission.asteroid.mol_mass == r.mission.asteroid.mol_mass);
  CHECK(s.mission.arc.dl_max == r.mission.arc.dl_max);
  CHECK(s.mission.nominal.values == r.mission.nominal.values);
  CHECK(s.solver.seed == r.solver.seed);
}

TEST_CASE("shipped scenario file is the reference scenario") {
  CHECK(slurp(kData / "reference_scenario.json") == serialize_scenario(reference_scenario()));
}

TEST_CASE("rejects unknown keys, wrong versions and bad values") {
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j["colour"] = 1; })), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j["asteroid"]["properties"]["spin"] = 1; })),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j["solver"]["cooling"] = 1; })), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j["schema_version"] = 2; })), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j.erase("schema_version"); })), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(edited([](json& j) { j["t_impact_s"] = "soon"; })), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("{ not json"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[]"), ScenarioError);
}

TEST_CASE("loading calibrates unless asked not to") {
  const Scenario raw = load_scenario(kData / "reference_scenario.json", false);
  CHECK(raw.mission.asteroid_elements.theta == reference_scenario().mission.asteroid_elements.theta);
  auto m = loaded().mission;
  CHECK(loaded().mission.asteroid_elements.theta != raw.mission.asteroid_elements.theta);
  CHECK(calibrate_scenario(m).miss_distance < 1e-3);
  CHECK(loaded().experts.size() == 3);
}

TEST_CASE("expert file is resolved next to the scenario") {
  const fs::path dir = fs::temp_directory_path() / "deflect_scenario_test";
  fs::create_directories(dir);
  save_scenario(reference_scenario(), dir / "s.json");
  fs::remove(dir / "experts.json");
  CHECK_THROWS_AS(load_scenario(dir / "s.json", false), ScenarioError);
  fs::copy_file(kData / "experts.json", dir / "experts.json", fs::copy_options::overwrite_existing);
  CHECK(load_scenario(dir / "s.json", false).experts.size() == 3);
  fs::remove_all(dir);
  CHECK_THROWS_AS(load_scenario(dir / "missing.json"), ScenarioError);
}

TEST_CASE("expert files round trip and reject unknown parameters") {
  const auto experts = load_experts(kData / "experts.json");
  const std::string text = serialize_experts(experts);
  CHECK(serialize_experts(parse_experts(text)) == text);
  json j = json::parse(text);
  j["experts"][0]["parameters"]["colour"] = json::array();
  CHECK_THROWS_AS(parse_experts(j.dump()), ScenarioError);
}

TEST_CASE("fused evidence of the shipped experts") {
  const auto fused = fuse_all(loaded().experts);
  REQUIRE(fused.size() == kNumUncertain);
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    CHECK(fused[i].name == kUncertainNames[i]);
    double sum = 0.0;
    for (const auto& iv : fused[i].intervals) sum += iv.bpa;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto ev = evidence_from(loaded().experts);
  CHECK(ev.element_count() == 93312);
  CHECK_FALSE(ev.physical_to_unit(std::vector<double>(loaded().mission.nominal.values.begin(),
                                                      loaded().mission.nominal.values.end()))
                  .empty());
}

TEST_CASE("single-parameter evidence keeps the other parameters fixed") {
  const auto& nominal = loaded().mission.nominal;
  const std::size_t k = UncertainVector::index_of("E_sub");
  const auto ev = single_parameter_evidence(loaded().experts, k, nominal);
  CHECK(ev.element_count() == fuse_all(loaded().experts)[k].intervals.size());
  const auto phys = ev.unit_to_physical(std::vector<double>(kNumUncertain, 0.37));
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    if (i != k) CHECK(phys[i] == nominal[i]);
  }
}

TEST_CASE("deterministic evaluation uses the nominal point and the margins") {
  const RobustEvaluator ev(model(), evidence_from(loaded().experts), Mode::deterministic, false,
                           small_config());
  const DesignVector d{10.0, 5, 2.0, 2000.0};
  const auto ind = ev.evaluate(d);
  const auto out = model().evaluate(d, loaded().mission.nominal, loaded().mission.margins, false);
  CHECK(ind.obj.m_sys == out.m_sys);
  CHECK(ind.obj.neg_b == -out.b);
  CHECK(ind.witness_m.empty());
}

TEST_CASE("parameters that do not enter an objective leave it at the fixed value") {
  const auto& nominal = loaded().mission.nominal;
  const auto ev = single_parameter_evidence(loaded().experts, UncertainVector::index_of("rho_M"), nominal);
  const DesignVector d{10.0, 5, 2.0, 2000.0};
  const double b = model().impact_parameter(d, nominal, false);
  for (Mode m : {Mode::minmin, Mode::minmax}) {
    const RobustEvaluator r(model(), ev, m, false, small_config());
    CHECK(r.evaluate(d).obj.neg_b == -b);
  }
}

TEST_CASE("robust bounds sandwich the fixed-value objectives") {
  const auto ev = evidence_from(loaded().experts);
  const RobustEvaluator lo(model(), ev, Mode::minmin, false, small_config());
  const RobustEvaluator hi(model(), ev, Mode::minmax, false, small_config());
  const auto& nominal = loaded().mission.nominal;
  for (const DesignVector d : {DesignVector{4.0, 2, 1.5, 1200.0}, DesignVector{15.0, 8, 3.0, 2600.0}}) {
    const auto out = model().evaluate(d, nominal, Margins::none(), false);
    const auto a = lo.evaluate(d);
    const auto b = hi.evaluate(d);
    CHECK(a.obj.m_sys <= out.m_sys);
    CHECK(out.m_sys <= b.obj.m_sys);
    CHECK(a.obj.neg_b <= -out.b);
    CHECK(-out.b <= b.obj.neg_b);
    CHECK(a.obj.m_sys < b.obj.m_sys);
    CHECK(a.obj.neg_b < b.obj.neg_b);
    // Witnesses reproduce the reported values.
    UncertainVector w;
    std::copy(b.witness_m.begin(), b.witness_m.end(), w.values.begin());
    CHECK(model().system_mass(d, w, Margins::none()) == b.obj.m_sys);
    std::copy(a.witness_b.begin(), a.witness_b.end(), w.values.begin());
    CHECK(-model().impact_parameter(d, w, false) == a.obj.neg_b);
  }
}

TEST_CASE("worst-case mass sits at the heaviest areal densities") {
  const auto ev = evidence_from(loaded().experts);
  const RobustEvaluator hi(model(), ev, Mode::minmax, false, small_config(600));
  const auto ind = hi.evaluate(DesignVector{12.0, 4, 2.0, 2000.0});
  const auto fused = fuse_all(loaded().experts);
  for (const char* name : {"rho_M", "rho_L", "rho_R"}) {
    const std::size_t k = UncertainVector::index_of(name);
    double top = 0.0, bottom = INFINITY;
    for (const auto& iv : fused[k].intervals) {
      top = std::max(top, iv.hi);
      bottom = std::min(bottom, iv.lo);
    }
    CAPTURE(name);
    CHECK(ind.witness_m[k] > top - 0.02 * (top - bottom));
  }
}

TEST_CASE("robust evaluation is deterministic and cached") {
  const auto ev = evidence_from(loaded().experts);
  const RobustEvaluator a(model(), ev, Mode::minmin_margins, false, small_config());
  const RobustEvaluator b(model(), ev, Mode::minmin_margins, false, small_config());
  const DesignVector d{7.0, 3, 2.5, 1800.0};
  const auto x = a.evaluate(d);
  const auto y = b.evaluate(d);
  CHECK(x.obj.m_sys == y.obj.m_sys);
  CHECK(x.obj.neg_b == y.obj.neg_b);
  CHECK(x.witness_b == y.witness_b);
  CHECK(a.cache_size() == 1);
  a.evaluate(d);
  CHECK(a.cache_size() == 1);
  CHECK(a.margins().k_dry == loaded().mission.margins.k_dry);
}

TEST_CASE("evaluator rejects evidence over the wrong parameters") {
  std::vector<ParameterBPA> params;
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    params.push_back({i == 3 ? "T_subl" : std::string(kUncertainNames[i]), {{1.0, 2.0, 1.0}}});
  }
  CHECK_THROWS_AS(RobustEvaluator(model(), EvidenceStructure(params), Mode::minmax, false, small_config()),
                  std::invalid_argument);
}
