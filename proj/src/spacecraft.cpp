#include "deflect/spacecraft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace deflect {

bool DesignBounds::contains(const DesignVector& d) const {
  return d.d_m >= d_m_lo && d.d_m <= d_m_hi && d.n_sc >= n_sc_lo && d.n_sc <= n_sc_hi &&
         d.t_warn >= t_warn_lo && d.t_warn <= t_warn_hi && d.c_r >= c_r_lo && d.c_r <= c_r_hi;
}

void TechnologyParams::validate() const {
  auto efficiency = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("efficiency ") + name + " must lie in (0, 1]");
    }
  };
  efficiency(eta_l, "eta_l");
  efficiency(eta_sa, "eta_sa");
  efficiency(eta_p, "eta_p");
  efficiency(emiss_m, "emiss_m");
  efficiency(emiss_rad, "emiss_rad");
  for (double v : {rho_r, rho_l, rho_m, rho_s, c_geo, t_rad}) {
    if (!(v > 0.0)) throw std::invalid_argument("technology masses and sizes must be positive");
  }
  if (!(mf_c >= 0.0 && mf_p >= 0.0 && m_bus >= 0.0)) {
    throw std::invalid_argument("mass fractions and bus mass must be non-negative");
  }
}

double system_efficiency(const TechnologyParams& tech) {
  return tech.eta_l * tech.eta_sa * tech.eta_p * tech.emiss_m;
}

double waste_heat(double p_l, const TechnologyParams& tech) {
  // Sunlight collected for the arrays, minus what leaves as laser light.
  const double collected = p_l / tech.eta_sa;
  return collected * (1.0 - tech.eta_sa * tech.eta_l);
}

double radiator_area(double p_waste, double t_rad, double emiss_rad, double sigma) {
  if (!(t_rad > 0.0)) throw std::invalid_argument("radiator temperature must be positive");
  const double t2 = t_rad * t_rad;
  return p_waste / (emiss_rad * sigma * t2 * t2);
}

MassBudget size_spacecraft(const DesignVector& design, const TechnologyParams& tech,
                           const Margins& margins, double solar_flux) {
  MassBudget b;
  b.eta_sys = system_efficiency(tech);
  b.a_m1 = std::numbers::pi * design.d_m * design.d_m / 4.0;
  b.a_m2 = 0.01 * b.a_m1;
  b.a_d = b.a_m1 / design.c_r;
  b.a_s = b.a_m1 / tech.c_geo;
  b.p_l = tech.eta_sa * solar_flux * b.a_m1;

  b.m_l = margins.k_l * tech.rho_l * b.p_l * tech.eta_l;
  b.m_s = margins.k_s * tech.rho_s * b.a_s;
  b.m_m = margins.k_m * tech.rho_m * (b.a_d + b.a_m1 + 2.0 * b.a_m2);
  b.m_c = tech.mf_c * (b.m_s + b.m_l);
  b.a_r = radiator_area(waste_heat(b.p_l, tech), tech.t_rad, tech.emiss_rad);
  b.m_r = tech.rho_r * b.a_r;
  b.m_bus = tech.m_bus;

  b.m_dry = margins.k_dry * (b.m_c + b.m_s + b.m_m + b.m_l + b.m_r + b.m_bus);
  b.m_p = 1.1 * tech.mf_p * b.m_dry;
  b.m_sc = b.m_dry + b.m_p;
  b.m_sys = design.n_sc * b.m_sc;
  return b;
}

}  // namespace deflect
