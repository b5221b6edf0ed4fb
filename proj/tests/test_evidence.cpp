#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "deflect/evidence.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace deflect;
using namespace fixtures;

namespace {

ExpertOpinion expert(std::string id,
                     std::map<std::string, std::vector<UncertainInterval>> params) {
  return {std::move(id), 1.0, std::move(params)};
}

// Expert tables typed in by hand, independent of the shipped data file.
std::vector<ExpertOpinion> three_experts() {
  return {
      expert("a", {{"c_A", {{375, 470, .3}, {470, 600, .7}}},
                   {"k_A", {{0.2, 0.5, .2}, {1.47, 1.6, .8}}},
                   {"rho_A", {{1100, 2000, .3}, {2000, 3700, .7}}},
                   {"T_sub", {{1700, 1720, 1}}},
                   {"E_sub", {{2.7e5, 6e6, 1}}},
                   {"eta_L", {{.4, .5, .7}, {.5, .6, .3}}},
                   {"eta_SA", {{.2, .5, 1}}},
                   {"rho_M", {{.1, .3, .5}, {.3, .5, .5}}},
                   {"rho_L", {{.005, .01, .4}, {.01, .02, .6}}},
                   {"rho_R", {{1, 2, .4}, {2, 4, .6}}}}),
      expert("b", {{"c_A", {{470, 600, .4}, {600, 750, .6}}},
                   {"k_A", {{0.2, 2, 1}}},
                   {"rho_A", {{1100, 3700, 1}}},
                   {"T_sub", {{1720, 1812, 1}}},
                   {"E_sub", {{2.7e5, 1e6, .2}, {1e7, 1.9686e7, .8}}},
                   {"eta_L", {{.4, .5, .3}, {.5, .6, .6}, {.6, .664, .1}}},
                   {"eta_SA", {{.2, .3, .4}, {.3, .5, .6}}},
                   {"rho_M", {{.3, .5, 1}}},
                   {"rho_L", {{.01, .02, 1}}}}),
      expert("c", {{"c_A", {{470, 750, 1}}},
                   {"rho_A", {{2000, 3700, 1}}},
                   {"T_sub", {{1700, 1812, 1}}},
                   {"E_sub", {{4e6, 6e6, .7}, {1e7, 1.9686e7, .3}}},
                   {"eta_L", {{.55, .664, 1}}},
                   {"rho_M", {{.01, .05, 1}}},
                   {"rho_R", {{1, 3, 1}}}}),
  };
}

}  // namespace

TEST_CASE("laser efficiency fusion matrix") {
  const auto fused = fuse_experts(three_experts(), "eta_L");
  REQUIRE(fused.intervals.size() == 4);
  CHECK(bpa_of(fused, .4, .5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(bpa_of(fused, .5, .6) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(bpa_of(fused, .55, .664) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(bpa_of(fused, .6, .664) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("all ten fused parameters match the expected tables") {
  const auto experts = three_experts();
  for (const auto& row : expected_fusion()) {
    CAPTURE(row.name);
    const auto fused = fuse_experts(experts, row.name);
    CHECK(fused.intervals.size() == row.expected.size());
    double sum = 0.0;
    for (const auto& iv : fused.intervals) sum += iv.bpa;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (const auto& e : row.expected) {
      CAPTURE(e.lo);
      CAPTURE(e.hi);
      CHECK(std::abs(bpa_of(fused, e.lo, e.hi) - e.bpa) <= 5e-5);
    }
  }
}

TEST_CASE("fusion of one or identical opinions is the identity") {
  const std::vector<UncertainInterval> ivs{{1, 2, .25}, {3, 5, .75}};
  const auto one = fuse_experts({expert("x", {{"p", ivs}})}, "p");
  REQUIRE(one.intervals.size() == 2);
  CHECK(one.intervals[0].bpa == doctest::Approx(.25));
  CHECK(one.intervals[1].bpa == doctest::Approx(.75));
  const auto three =
      fuse_experts({expert("x", {{"p", ivs}}), expert("y", {{"p", ivs}}), expert("z", {{"p", ivs}})}, "p");
  REQUIRE(three.intervals.size() == 2);
  CHECK(three.intervals[0].bpa == doctest::Approx(.25));
  CHECK(three.intervals[1].lo == 3);
  CHECK(three.intervals[1].hi == 5);
}

TEST_CASE("fusion errors") {
  CHECK_THROWS_AS(fuse_experts({}, "p"), EvidenceError);
  CHECK_THROWS_AS(fuse_experts({expert("x", {{"q", {{0, 1, 1}}}})}, "p"), EvidenceError);
  CHECK_THROWS_AS(fuse_experts({expert("x", {{"p", {{0, 1, .6}}}})}, "p"), EvidenceError);
  CHECK_THROWS_AS(fuse_experts({expert("x", {{"p", {{2, 1, 1}}}})}, "p"), EvidenceError);
}

TEST_CASE("weights scale each expert's contribution") {
  auto a = expert("a", {{"p", {{0, 1, 1}}}});
  auto b = expert("b", {{"p", {{1, 2, 1}}}});
  a.weight = 3.0;
  const auto f = fuse_experts({a, b}, "p");
  CHECK(bpa_of(f, 0, 1) == doctest::Approx(0.75));
  CHECK(bpa_of(f, 1, 2) == doctest::Approx(0.25));
}

TEST_CASE("focal element products") {
  const EvidenceStructure s({{"x", {{0, 1, .7}, {1, 2, .3}}}, {"y", {{0, 1, .4}, {1, 2, .6}}}});
  const auto els = s.build_focal_elements();
  REQUIRE(els.size() == 4);
  CHECK(els[0].bpa == doctest::Approx(.28));
  CHECK(els[1].bpa == doctest::Approx(.12));
  CHECK(els[2].bpa == doctest::Approx(.42));
  CHECK(els[3].bpa == doctest::Approx(.18));
  double sum = 0.0;
  for (const auto& e : els) sum += e.bpa;
  CHECK(std::abs(sum - 1.0) < 1e-12);

  const auto single = build_focal_elements({{"z", {{3, 4, 1}}}});
  REQUIRE(single.size() == 1);
  CHECK(single[0].bpa == 1.0);
  CHECK_THROWS_AS(s.build_focal_elements(3), EvidenceError);
}

TEST_CASE("fused structure focal count and unit cells tile the cube") {
  const auto experts = three_experts();
  std::vector<ParameterBPA> ps;
  for (const auto& row : expected_fusion()) ps.push_back(fuse_experts(experts, row.name));
  const EvidenceStructure s(ps);
  // 4*3*3*3*4 physical times 4*3*3*2*3 technological.
  CHECK(s.element_count() == 432u * 216u);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < s.element_count(); ++i) sum += s.element(i).bpa;
  CHECK(std::abs(sum - 1.0) < 1e-9);
  for (std::size_t d = 0; d < s.dimension(); ++d) {
    const auto& e = s.edges(d);
    CHECK(e.front() == 0.0);
    CHECK(e.back() == 1.0);
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      CHECK(e[k + 1] > e[k]);
      CHECK(e[k + 1] - e[k] == doctest::Approx(ps[d].intervals[k].bpa).epsilon(1e-12));
    }
  }
}

TEST_CASE("unit to physical mapping") {
  const EvidenceStructure s({{"x", {{10, 20, .25}, {5, 6, .75}}}});
  CHECK(s.unit_to_physical({0.0})[0] == 10.0);
  CHECK(s.unit_to_physical({0.25})[0] == 20.0);  // boundary belongs to the lower cell
  CHECK(s.unit_to_physical({0.125})[0] == doctest::Approx(15.0));
  CHECK(s.unit_to_physical({1.0})[0] == 6.0);
  CHECK(s.unit_to_physical({0.625})[0] == doctest::Approx(5.5));
  CHECK(s.cell_of(0, 0.25) == 0);
  CHECK(s.cell_of(0, std::nextafter(0.25, 1.0)) == 1);
}

TEST_CASE("uniform unit samples hit cells in proportion to their BPA") {
  const std::vector<double> m{0.1, 0.25, 0.05, 0.6};
  ParameterBPA p{"x", {}};
  for (std::size_t k = 0; k < m.size(); ++k) p.intervals.push_back({double(k), k + 1.0, m[k]});
  const EvidenceStructure s({p});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 200000;
  std::vector<int> hits(m.size(), 0);
  for (int i = 0; i < n; ++i) {
    const double x = s.unit_to_physical({u(rng)})[0];
    hits[std::min<std::size_t>(static_cast<std::size_t>(x), m.size() - 1)]++;
  }
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double sigma = std::sqrt(n * m[k] * (1 - m[k]));
    CHECK(std::abs(hits[k] - n * m[k]) < 3.0 * sigma);
  }
}

TEST_CASE("threshold examples") {
  const EvidenceStructure s({{"u", {{.4, .5, .7}, {.5, .6, .3}}}});
  const auto f = linear_bounder(s, {1.0});
  const auto at = bel_pl_of_threshold(s, f, 0.55);
  CHECK(at.bel == doctest::Approx(0.7));
  CHECK(at.pl == doctest::Approx(1.0));
  const auto below = bel_pl_of_threshold(s, f, 0.3);
  CHECK(below.bel == 0.0);
  CHECK(below.pl == 0.0);
  const auto above = bel_pl_of_threshold(s, f, 0.7);
  CHECK(above.bel == doctest::Approx(1.0));
  CHECK(above.pl == doctest::Approx(1.0));
  // Complement {u > 0.55}: plausible wherever the maximum exceeds v.
  const double pl_not = 1.0 - at.bel;
  CHECK(pl_not == doctest::Approx(0.3));
  CHECK(duality_check(at.bel, at.pl, 1.0 - at.pl, pl_not).ok);
}

TEST_CASE("two-dimensional sum matches the enumeration oracle") {
  const std::vector<ParameterBPA> ps{{"x", {{0, 1, .5}, {0.5, 2, .5}}},
                                     {"y", {{1, 3, .2}, {2, 2.5, .8}}}};
  const EvidenceStructure s(ps);
  const auto f = linear_bounder(s, {1.0, 1.0});
  for (double v = 0.5; v <= 5.0; v += 0.25) {
    const auto got = bel_pl_of_threshold(s, f, v);
    const auto [bel, pl] = oracle::linear_bel_pl(plain(ps), {1.0, 1.0}, v);
    CHECK(got.bel == doctest::Approx(bel).epsilon(1e-12));
    CHECK(got.pl == doctest::Approx(pl).epsilon(1e-12));
  }
}

TEST_CASE("single focal element curve is a 0 to 1 step") {
  const EvidenceStructure s({{"u", {{2, 3, 1}}}});
  const auto c = bel_pl_curve(s, linear_bounder(s, {1.0}), {5, 1e-4, 1000});
  CHECK(c.v_min == 2.0);
  CHECK(c.v_max == 3.0);
  CHECK(c.bel.front() == 0.0);
  CHECK(c.pl.front() == 1.0);  // f <= v_min is plausible
  CHECK(c.bel.back() == 1.0);
  for (std::size_t j = 1; j + 1 < c.v.size(); ++j) {
    CHECK(c.bel[j] == 0.0);
    CHECK(c.pl[j] == 1.0);
  }
}

TEST_CASE("binary tree matches enumeration on a monotone three-parameter toy") {
  const std::vector<ParameterBPA> ps{{"a", {{0, 1, .3}, {1, 2, .7}}},
                                     {"b", {{0, 2, .6}, {1, 3, .4}}},
                                     {"c", {{5, 6, .5}, {4, 7, .5}}}};
  const EvidenceStructure s(ps);
  const std::vector<double> c{1.0, 2.0, -1.0};
  const auto curve = bel_pl_curve(s, linear_bounder(s, c), {40, 0.0, 100000});
  CHECK_FALSE(curve.partial);
  for (std::size_t j = 0; j < curve.v.size(); ++j) {
    const auto [bel, pl] = oracle::linear_bel_pl(plain(ps), c, curve.v[j]);
    CHECK(std::abs(curve.bel[j] - bel) < 1e-12);
    CHECK(std::abs(curve.pl[j] - pl) < 1e-12);
  }
}

TEST_CASE("randomized structures: tree equals enumeration and curve invariants hold") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dims(1, 4);
  std::normal_distribution<double> coef(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = dims(rng);
    const auto ps = random_structure(rng, d, d <= 2 ? 12 : 9);
    const EvidenceStructure s(ps);
    REQUIRE(s.element_count() <= 10000);
    std::vector<double> c(d);
    for (auto& x : c) x = coef(rng);
    const auto bounder = linear_bounder(s, c);
    const auto curve = bel_pl_curve(s, bounder, {25, 0.0, 1000000});
    CAPTURE(trial);
    CHECK_FALSE(curve.partial);
    CHECK(curve.bel.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curve.pl.back() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < curve.v.size(); ++j) {
      const auto [bel, pl] = oracle::linear_bel_pl(plain(ps), c, curve.v[j]);
      CHECK(std::abs(curve.bel[j] - bel) < 1e-12);
      CHECK(std::abs(curve.pl[j] - pl) < 1e-12);
      CHECK(curve.bel[j] <= curve.pl[j] + 1e-15);
      if (j > 0) {
        CHECK(curve.bel[j] >= curve.bel[j - 1] - 1e-15);
        CHECK(curve.pl[j] >= curve.pl[j - 1] - 1e-15);
      }
      // Complement A' = {f > v} from the mirrored objective.
      double bel_not = 0.0, pl_not = 0.0;
      for (std::uint64_t i = 0; i < s.element_count(); ++i) {
        const auto e = s.element(i);
        const auto b = bounder(e.unit_box);
        if (b.min > curve.v[j]) bel_not += e.bpa;
        if (b.max > curve.v[j]) pl_not += e.bpa;
      }
      const auto rep = duality_check(curve.bel[j], curve.pl[j], bel_not, pl_not);
      CHECK_MESSAGE(rep.ok, rep.failed);
    }
    // Below the global minimum nothing is plausible.
    const auto low = bel_pl_of_threshold(s, bounder, curve.v_min - 1e-9);
    CHECK(low.pl == 0.0);
  }
}

TEST_CASE("bpa floor and partition cap only move mass to plausibility") {
  std::mt19937_64 rng(99);
  const auto ps = random_structure(rng, 3, 8);
  const EvidenceStructure s(ps);
  const std::vector<double> c{1.0, -0.5, 2.0};
  const auto b = linear_bounder(s, c);
  const auto exact = bel_pl_curve(s, b, {20, 0.0, 1000000});
  const auto floored = bel_pl_curve(s, b, {20, 0.05, 1000000});
  const auto capped = bel_pl_curve(s, b, {20, 0.0, 8});
  CHECK(capped.partial);
  CHECK(capped.boxes_solved < exact.boxes_solved);
  for (std::size_t j = 0; j < exact.v.size(); ++j) {
    CHECK(floored.bel[j] <= exact.bel[j] + 1e-12);
    CHECK(floored.pl[j] >= exact.pl[j] - 1e-12);
    CHECK(capped.bel[j] <= exact.bel[j] + 1e-12);
    CHECK(capped.pl[j] >= exact.pl[j] - 1e-12);
    CHECK(floored.bel[j] <= floored.pl[j]);
  }
}

TEST_CASE("duality check names the violated relation") {
  CHECK(duality_check(1.0, 1.0, 0.0, 0.0).ok);
  const auto bad = duality_check(0.7, 0.8, 0.4, 0.1);
  CHECK_FALSE(bad.ok);
  CHECK(bad.failed.find("Bel(A) + Bel(not A)") != std::string::npos);
}
