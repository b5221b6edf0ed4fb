#pragma once

// Sizing of the laser spacecraft formation: subsystem areas, powers and
// masses, and the system mass objective.

namespace deflect {

struct DesignVector {
  double d_m = 20.0;     // primary mirror diameter [m]
  int n_sc = 10;         // number of spacecraft
  double t_warn = 8.0;   // warning time [years]
  double c_r = 3000.0;   // concentration ratio
};

struct DesignBounds {
  double d_m_lo = 2.0, d_m_hi = 20.0;
  int n_sc_lo = 1, n_sc_hi = 10;
  double t_warn_lo = 1.0, t_warn_hi = 8.0;
  double c_r_lo = 1000.0, c_r_hi = 3000.0;

  bool contains(const DesignVector& d) const;
};

struct TechnologyParams {
  double eta_l = 0.6;     // laser efficiency
  double eta_sa = 0.41;   // solar array efficiency
  double eta_p = 0.95;    // power bus efficiency
  double emiss_m = 0.95;  // mirror emissivity (reflective throughput)
  double rho_r = 1.4;     // radiator areal mass [kg/m^2]
  double rho_l = 0.005;   // laser specific mass [kg/W]
  double rho_m = 0.1;     // mirror areal mass [kg/m^2]
  double rho_s = 1.0;     // solar array areal mass [kg/m^2]
  double mf_c = 0.1;      // harness mass fraction
  double mf_p = 0.05;     // propellant mass fraction
  double m_bus = 50.0;    // [kg]
  double c_geo = 25.0;    // geometric concentration on the arrays
  double t_rad = 350.0;   // radiator temperature [K]
  double emiss_rad = 0.9; // radiator emissivity

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
};

struct Margins {
  double k_dry = 1.2;
  double k_s = 1.15;
  double k_m = 1.25;
  double k_l = 1.5;

  static Margins none() { return {1.0, 1.0, 1.0, 1.0}; }
};

struct MassBudget {
  double m_c = 0, m_s = 0, m_m = 0, m_l = 0, m_r = 0, m_bus = 0;
  double m_dry = 0, m_p = 0, m_sc = 0, m_sys = 0;
  double p_l = 0;  // electrical power to the laser [W]
  double a_s = 0, a_r = 0, a_m1 = 0, a_m2 = 0, a_d = 0;  // [m^2]
  double eta_sys = 0;
};

double system_efficiency(const TechnologyParams& tech);

/// Heat the radiator must reject [W] given the laser input power.
double waste_heat(double p_l, const TechnologyParams& tech);

/// Radiator area [m^2] rejecting p_waste at temperature t_rad.
double radiator_area(double p_waste, double t_rad, double emiss_rad,
                     double sigma = 5.670374419e-8);

/// solar_flux: sunlight at the formation used for power sizing [W/m^2].
MassBudget size_spacecraft(const DesignVector& design, const TechnologyParams& tech,
                           const Margins& margins, double solar_flux);

}  // namespace deflect
