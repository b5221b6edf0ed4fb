#pragma once

// Evidence fixtures shared by the unit tests and the acceptance checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "deflect/evidence.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace deflect;

struct Row {
  const char* name;
  std::vector<UncertainInterval> expected;
};

// Fused structures of the three shipped opinions, four-digit BPAs.
inline std::vector<Row> expected_fusion() {
  return {
      {"c_A", {{375, 470, .1}, {470, 600, .3667}, {470, 750, .3333}, {600, 750, .2}}},
      {"k_A", {{0.2, 0.5, .1}, {1.47, 1.6, .4}, {0.2, 2, .5}}},
      {"rho_A", {{1100, 2000, .1}, {2000, 3700, .5667}, {1100, 3700, .3333}}},
      {"T_sub", {{1700, 1720, .3333}, {1720, 1812, .3333}, {1700, 1812, .3333}}},
      {"E_sub", {{2.7e5, 1e6, .0667}, {2.7e5, 6e6, .3333}, {4e6, 6e6, .2333}, {1e7, 1.9686e7, .3667}}},
      {"eta_L", {{.4, .5, .3333}, {.5, .6, .3}, {.55, .664, .3333}, {.6, .664, .0333}}},
      {"eta_SA", {{.2, .3, .2}, {.3, .5, .3}, {.2, .5, .5}}},
      {"rho_M", {{.3, .5, .5}, {.1, .3, .1667}, {.01, .05, .3333}}},
      {"rho_L", {{.005, .01, .2}, {.01, .02, .8}}},
      {"rho_R", {{1, 2, .2}, {1, 3, .5}, {2, 4, .3}}},
  };
}

inline double bpa_of(const ParameterBPA& p, double lo, double hi) {
  for (const auto& iv : p.intervals) {
    if (iv.lo == lo && iv.hi == hi) return iv.bpa;
  }
  return -1.0;
}

// Exact bounds of a linear objective over the cells a unit box covers.
inline BoxBounder linear_bounder(const EvidenceStructure& s, std::vector<double> c) {
  return [&s, c](const std::vector<Range>& box) {
    Bounds b{0.0, 0.0};
    for (std::size_t d = 0; d < s.dimension(); ++d) {
      const auto& e = s.edges(d);
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (e[k + 1] <= box[d].lo || e[k] >= box[d].hi) continue;
        const auto& iv = s.parameters()[d].intervals[k];
        lo = std::min({lo, c[d] * iv.lo, c[d] * iv.hi});
        hi = std::max({hi, c[d] * iv.lo, c[d] * iv.hi});
      }
      b.min += lo;
      b.max += hi;
    }
    return b;
  };
}

inline std::vector<std::vector<oracle::Interval>> plain(const std::vector<ParameterBPA>& ps) {
  std::vector<std::vector<oracle::Interval>> out;
  for (const auto& p : ps) {
    std::vector<oracle::Interval> d;
    for (const auto& iv : p.intervals) d.push_back({iv.lo, iv.hi, iv.bpa});
    out.push_back(d);
  }
  return out;
}

inline std::vector<ParameterBPA> random_structure(std::mt19937_64& rng, std::size_t dims,
                                           std::size_t max_intervals) {
  std::uniform_int_distribution<std::size_t> count(1, max_intervals);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ParameterBPA> ps;
  for (std::size_t d = 0; d < dims; ++d) {
    ParameterBPA p{"p" + std::to_string(d), {}};
    const std::size_t n = count(rng);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = u(rng) * 10.0, w = u(rng) * 3.0;
      const double m = 0.05 + u(rng);
      p.intervals.push_back({a, a + w, m});
      sum += m;
    }
    for (auto& iv : p.intervals) iv.bpa /= sum;
    // Make the sum exact to the last bit for validation.
    double partial = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) partial += p.intervals[k].bpa;
    p.intervals.back().bpa = 1.0 - partial;
    ps.push_back(p);
  }
  return ps;
}

}  // namespace fixtures
