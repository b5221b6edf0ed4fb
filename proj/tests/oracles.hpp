#pragma once

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library code it is meant to check.

#include <array>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "deflect/orbital.hpp"

namespace oracle {

using deflect::EquinoctialState;
using deflect::ThrustRTN;

/// Gauss equations written out independently of the library version, with
/// the acceleration given as RTN components.
inline std::array<double, 6> element_rates(const std::array<double, 5>& x, double ell,
                                           const ThrustRTN& f, double mu) {
  const double a = x[0], p1 = x[1], p2 = x[2], q1 = x[3], q2 = x[4];
  const double fr = f.eps * std::cos(f.beta) * std::cos(f.alpha);
  const double ft = f.eps * std::cos(f.beta) * std::sin(f.alpha);
  const double fn = f.eps * std::sin(f.beta);
  const double p = a * (1.0 - p1 * p1 - p2 * p2);
  const double sl = std::sin(ell), cl = std::cos(ell);
  const double w = 1.0 + p1 * sl + p2 * cl;
  const double r = p / w;
  const double h = std::sqrt(mu * p);
  const double qc = q1 * cl - q2 * sl;
  const double b2 = 1.0 + q1 * q1 + q2 * q2;
  return {2.0 * a * a / h * ((p2 * sl - p1 * cl) * fr + (p / r) * ft),
          (r / h) * (-(p / r) * cl * fr + (p1 + (1.0 + p / r) * sl) * ft - p2 * qc * fn),
          (r / h) * ((p / r) * sl * fr + (p2 + (1.0 + p / r) * cl) * ft + p1 * qc * fn),
          (r / (2.0 * h)) * b2 * sl * fn,
          (r / (2.0 * h)) * b2 * cl * fn,
          h / (r * r) - (r / h) * qc * fn};
}

/// Result of integrating the Gauss equations with L as the independent
/// variable. Elements are returned as offsets from the start values, and
/// time as an offset from the Keplerian time of flight, so that the
/// integrator's relative tolerance acts on the small perturbation itself.
struct ElementDeviation {
  std::array<double, 5> d_elements{};
  double d_time = 0.0;
};

inline ElementDeviation integrate_in_longitude(const EquinoctialState& eq0, double dl,
                                               const ThrustRTN& f, double mu,
                                               double tol = 1e-15) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 6>;
  const std::array<double, 5> x0{eq0.a, eq0.p1, eq0.p2, eq0.q1, eq0.q2};
  const ThrustRTN zero{};
  auto rhs = [&](const State& y, State& dy, double ell) {
    std::array<double, 5> x;
    for (int k = 0; k < 5; ++k) x[k] = x0[k] + y[k];
    const auto rates = element_rates(x, ell, f, mu);
    const auto kepler = element_rates(x0, ell, zero, mu);
    for (int k = 0; k < 5; ++k) dy[k] = rates[k] / rates[5];
    dy[5] = 1.0 / rates[5] - 1.0 / kepler[5];
  };
  State y{};
  auto stepper =
      odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-30, tol);
  odeint::integrate_adaptive(stepper, rhs, y, eq0.ell, eq0.ell + dl, dl / 50.0);
  ElementDeviation out;
  for (int k = 0; k < 5; ++k) out.d_elements[k] = y[k];
  out.d_time = y[5];
  return out;
}

}  // namespace oracle

namespace oracle {

/// One uncertain dimension as plain (lo, hi, bpa) triples.
struct Interval {
  double lo, hi, bpa;
};

/// Bel/Pl of "sum_d c[d]*x[d] <= v" by visiting every Cartesian product of
/// intervals and bounding the linear objective with interval arithmetic.
inline std::pair<double, double> linear_bel_pl(const std::vector<std::vector<Interval>>& dims,
                                               const std::vector<double>& c, double v) {
  double bel = 0.0, pl = 0.0;
  std::vector<std::size_t> idx(dims.size(), 0);
  while (true) {
    double lo = 0.0, hi = 0.0, m = 1.0;
    for (std::size_t d = 0; d < dims.size(); ++d) {
      const auto& iv = dims[d][idx[d]];
      const double a = c[d] * iv.lo, b = c[d] * iv.hi;
      lo += std::min(a, b);
      hi += std::max(a, b);
      m *= iv.bpa;
    }
    if (hi <= v) bel += m;
    if (lo <= v) pl += m;
    std::size_t d = 0;
    while (d < dims.size() && ++idx[d] == dims[d].size()) idx[d++] = 0;
    if (d == dims.size()) break;
  }
  return {bel, pl};
}

}  // namespace oracle

namespace oracle {

/// Inputs of the straight-line sizing oracle, all plain numbers.
struct SizingInputs {
  double d_m, c_r;
  int n_sc;
  double eta_l, eta_sa, rho_r, rho_l, rho_m, rho_s, mf_c, mf_p, m_bus, c_geo, t_rad, emiss_rad;
  double k_dry, k_s, k_m, k_l;
  double flux;
};

/// System mass written out line by line from the sizing equations.
inline double system_mass(const SizingInputs& in) {
  const double sigma = 5.670374419e-8;
  const double mirror = 3.14159265358979323846 * in.d_m * in.d_m / 4.0;
  const double secondary = mirror / 100.0;
  const double directional = mirror / in.c_r;
  const double arrays = mirror / in.c_geo;
  const double laser_power = in.eta_sa * in.flux * mirror;
  const double m_laser = in.k_l * in.rho_l * laser_power * in.eta_l;
  const double m_arrays = in.k_s * in.rho_s * arrays;
  const double m_mirrors = in.k_m * in.rho_m * (directional + mirror + 2.0 * secondary);
  const double m_harness = in.mf_c * (m_arrays + m_laser);
  const double heat = laser_power / in.eta_sa - laser_power * in.eta_l;
  const double radiator = heat / (in.emiss_rad * sigma * std::pow(in.t_rad, 4));
  const double m_radiator = in.rho_r * radiator;
  const double dry = in.k_dry * (m_harness + m_arrays + m_mirrors + m_laser + m_radiator + in.m_bus);
  const double wet = dry + 1.1 * in.mf_p * dry;
  return in.n_sc * wet;
}

}  // namespace oracle
