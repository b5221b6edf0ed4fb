#pragma once

// Laser-ablation deflection model: energy balance at the illuminated spot,
// sublimated mass flow, resulting acceleration on the asteroid, and the
// optics degradation caused by the ejecta plume condensing on the mirrors.
//
// SI units throughout, except heliocentric distances [km] and the thrust
// returned to the propagator [km/s^2].

#include <numbers>

#include "deflect/orbital.hpp"
#include "deflect/reference_propagator.hpp"

namespace deflect {

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // [kg]

/// Molecular mass of forsterite, Mg2SiO4 [kg].
inline constexpr double kForsteriteMass =
    (2.0 * 24.305 + 28.085 + 4.0 * 15.999) * kAtomicMassUnit;

struct PhysicalConstants {
  double sigma = 5.670374419e-8;     // Stefan-Boltzmann [W/(m^2 K^4)]
  double k_b = 1.380649e-23;         // Boltzmann [J/K]
  double s0 = 1367.0;                // solar flux at 1 AU [W/m^2]
  double au = kAU;                   // [km]
  double lambda_scatter = 2.0 / std::numbers::pi;
  double j_c = 0.345;                // jet constant
  double kappa = 1.4;                // adiabatic index of the ejecta
  double rho_layer = 1000.0;         // density of the condensed layer [kg/m^3]
  double eta_abs = 1.0e4;            // absorption coefficient of the layer [1/cm]
};

struct AsteroidProperties {
  double c_a = 750.0;       // specific heat [J/(kg K)]
  double k_a = 2.0;         // thermal conductivity [W/(m K)]
  double rho_a = 2600.0;    // density [kg/m^3]
  double t_subl = 1800.0;   // sublimation temperature [K]
  double e_sub = 5.0e6;     // sublimation enthalpy [J/kg]
  double t_0 = 278.0;       // temperature of the material before heating [K]
  double albedo = 0.2;
  double emiss_bb = 0.9;
  double a1 = 135.0;        // ellipsoid semi-axes [m]
  double b1 = 135.0;
  double omega_a = 1.0e-5;  // spin rate [rad/s]
  double m_a = 0.0;         // mass [kg]
  double mol_mass = kForsteriteMass;  // [kg]

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
};

/// Mass of a rotation ellipsoid with semi-axes (a1, b1, b1).
double ellipsoid_mass(double rho, double a1, double b1);

/// Spacecraft station in the asteroid Hill frame and spot placement.
struct StationGeometry {
  double x = 2000.0;  // [m]
  double y = 0.0;
  double z = 0.0;
  double theta_va = std::numbers::pi / 2.0;  // spot elevation over the y axis [rad]
  double psi_vf = 0.0;                       // view-factor angle [rad]
};

struct PlumeState {
  double h_cond = 0.0;  // condensed layer thickness [cm]
  double tau = 1.0;     // optical degradation factor
};

/// Laser power per unit area delivered on the spot [W/m^2].
double input_power_density(double sys_eff, double c_r, double r_a_km,
                           const AsteroidProperties& ast, double tau,
                           const PhysicalConstants& c = {});

/// Black-body re-radiation [W/m^2].
double radiation_loss(double t_surface, double emiss_bb, double sigma);

/// Conductive loss after an exposure of t_exposure seconds [W/m^2].
double conduction_loss(const AsteroidProperties& ast, double t_exposure);

/// Total sublimated mass flow of the formation [kg/s].
///
/// Every surface strip crossing the spot is heated for a dwell time set by
/// the chord length and the surface speed omega_a * r_ell; the 1/sqrt(t)
/// conduction loss is integrated in closed form along the strip and the
/// net flux is clamped at zero.
double mass_flow_rate(double p_in, const AsteroidProperties& ast, double r_ell, int n_sc,
                      double c_r, double a_m1, const PhysicalConstants& c = {});

/// Mean thermal speed of the ejecta [m/s].
double ejecta_velocity(const AsteroidProperties& ast, double k_b);

/// Acceleration magnitude [m/s^2] produced by a mass flow [kg/s].
double ablation_acceleration_si(double mdot, double vbar, const AsteroidProperties& ast,
                                const PhysicalConstants& c = {});

/// Acceleration along the heliocentric velocity of the asteroid, in RTN,
/// with eps in [km/s^2].
ThrustRTN ablation_acceleration(double mdot, double vbar, const AsteroidProperties& ast,
                                const EquinoctialState& eq, const PhysicalConstants& c = {});

/// Plume density at distance r_dist [m] from the spot and angle phi from
/// the plume axis. mdot is the flow from a single spot [kg/s].
double plume_density(double mdot, double vbar, double a_spot, double d_spot, double r_dist,
                     double phi, const PhysicalConstants& c = {});

struct SpotVector {
  Vec3 r_spot_sc = Vec3::Zero();  // from the spot to the spacecraft [m]
  double r_ell = 0.0;             // radius of the asteroid at the spot [m]
};

SpotVector spot_vector(const StationGeometry& geom, const AsteroidProperties& ast, double t);

/// Angle between the spot-to-spacecraft vector and the plume axis, taken
/// as the outward surface direction at the spot.
double plume_angle(const StationGeometry& geom, const SpotVector& sv);

/// Growth rate of the condensed layer [cm/s].
double contamination_rate(double rho_exp, double vbar, const StationGeometry& geom,
                          const PhysicalConstants& c = {});

PlumeState contamination_step(const PlumeState& plume, double rho_exp, double vbar,
                              const StationGeometry& geom, double dt,
                              const PhysicalConstants& c = {});

double degradation_factor(double h_cond, const PhysicalConstants& c = {});

/// Laser-system quantities the ablation model needs from the sizing.
struct LaserSetup {
  double sys_eff = 0.2;  // overall conversion efficiency
  double c_r = 3000.0;   // concentration ratio
  double a_m1 = 314.0;   // primary mirror area [m^2]
  int n_sc = 1;
};

/// Instantaneous state of the ablation process.
struct AblationSample {
  double p_in = 0.0;       // [W/m^2]
  double mdot = 0.0;       // whole formation [kg/s]
  double accel = 0.0;      // [m/s^2]
  double h_rate = 0.0;     // layer growth [cm/s]
};

/// Full ablation chain at heliocentric distance r_a_km, with the optics
/// throughput tau and spin phase time t.
AblationSample evaluate_ablation(const LaserSetup& laser, const AsteroidProperties& ast,
                                 const StationGeometry& geom, double r_a_km, double tau,
                                 double t, const PhysicalConstants& c = {});

/// Thrust callback for the arc propagator. Keeps the plume accumulator:
/// at each call the layer is first advanced over the arc just completed
/// with the growth rate found at the start of that arc.
class AblationThrust {
 public:
  AblationThrust(LaserSetup laser, AsteroidProperties ast, StationGeometry geom,
                 bool contamination, PhysicalConstants consts = {});

  ThrustRTN operator()(const EquinoctialState& eq, double t_elapsed);

  /// Cartesian force for the reference integrator; the auxiliary state is
  /// the layer thickness [cm].
  OracleForce cartesian(double t_elapsed, const CartesianState& s, double h_cond) const;

  const PlumeState& plume() const { return plume_; }
  const AblationSample& last() const { return last_; }

 private:
  LaserSetup laser_;
  AsteroidProperties ast_;
  StationGeometry geom_;
  bool contamination_;
  PhysicalConstants consts_;
  PlumeState plume_;
  AblationSample last_;
  double last_t_ = 0.0;
  bool started_ = false;
};

}  // namespace deflect
