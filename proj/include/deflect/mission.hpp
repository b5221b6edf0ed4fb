#pragma once

// End-to-end deflection model: a design vector and a point of the uncertain
// space are turned into the two objectives, system mass and impact
// parameter, by composing the sizing, the ablation model and the arc
// propagator.

#include <array>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "deflect/ablation.hpp"
#include "deflect/orbital.hpp"
#include "deflect/reference_propagator.hpp"
#include "deflect/spacecraft.hpp"

namespace deflect {

inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

inline constexpr std::size_t kNumUncertain = 10;

/// Order of the uncertain parameters in every vector and file.
inline constexpr std::array<std::string_view, kNumUncertain> kUncertainNames = {
    "c_A", "k_A", "rho_A", "T_sub", "E_sub", "eta_L", "eta_SA", "rho_M", "rho_L", "rho_R"};

/// Point of the uncertain space in physical units.
struct UncertainVector {
  std::array<double, kNumUncertain> values{750.0, 2.0,  2600.0, 1800.0, 5.0e6,
                                           0.6,   0.41, 0.1,    0.005,  1.4};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  /// Index of a parameter name, throws std::invalid_argument if unknown.
  static std::size_t index_of(std::string_view name);
};

struct MissionScenario {
  KeplerianElements asteroid_elements;
  double asteroid_epoch = 0.0;  // [s past J2000]
  KeplerianElements earth_elements;
  double earth_epoch = 0.0;
  double t_impact = 0.0;

  AsteroidProperties asteroid;  // uncertain fields are overwritten per evaluation
  bool derive_mass = true;      // m_A from rho_A and the ellipsoid volume
  TechnologyParams tech;
  Margins margins;              // used in the margined modes
  DesignBounds bounds;
  StationGeometry station;
  PhysicalConstants consts;
  ArcControl arc;
  bool contamination = false;
  UncertainVector nominal;      // fixed values for the deterministic problem
  std::size_t max_arcs = 200000;
};

struct MissionOutcome {
  double m_sys = 0.0;  // [kg]
  double b = 0.0;      // [km]
};

class MissionModel {
 public:
  explicit MissionModel(MissionScenario scenario);

  const MissionScenario& scenario() const { return scenario_; }

  /// Flux at the asteroid perihelion, used to size the power system.
  double sizing_flux() const { return sizing_flux_; }

  MassBudget budget(const DesignVector& design, const UncertainVector& u,
                    const Margins& margins) const;
  double system_mass(const DesignVector& design, const UncertainVector& u,
                     const Margins& margins) const;

  /// Impact parameter [km] reached with the given design and parameters.
  double impact_parameter(const DesignVector& design, const UncertainVector& u,
                          bool contamination) const;

  MissionOutcome evaluate(const DesignVector& design, const UncertainVector& u,
                          const Margins& margins, bool contamination) const;

  /// Full deflected trajectory (start of the campaign to t_impact).
  std::vector<TrajectoryNode> trajectory(const DesignVector& design, const UncertainVector& u,
                                         bool contamination, bool keep_history = true) const;

  /// Same impact parameter computed with the Cartesian Runge-Kutta reference.
  double reference_impact_parameter(const DesignVector& design, const UncertainVector& u,
                                    bool contamination,
                                    const ReferenceOptions& opts = {}) const;

  AsteroidProperties asteroid_for(const UncertainVector& u) const;
  TechnologyParams tech_for(const UncertainVector& u) const;
  AblationThrust thrust_for(const DesignVector& design, const UncertainVector& u,
                            bool contamination) const;

  /// Asteroid state at the start of a campaign with warning time t_warn.
  EquinoctialState campaign_start(double t_warn_years) const;
  const EquinoctialState& nominal_at_impact() const { return nominal_impact_; }
  const EquinoctialState& earth_at_impact() const { return earth_impact_; }

 private:
  MissionScenario scenario_;
  EquinoctialState asteroid_epoch_state_;
  EquinoctialState nominal_impact_;
  EquinoctialState earth_impact_;
  double sizing_flux_ = 0.0;
};

/// Raised when the asteroid orbit cannot be made to intercept the Earth.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationReport {
  double miss_distance = 0.0;  // |r_asteroid - r_earth| at t_impact [km]
  double b = 0.0;              // b-plane miss of the calibrated orbit [km]
  int iterations = 0;
};

/// Adjusts the asteroid node, argument of periapsis and phase so that the
/// unperturbed orbit passes through the Earth's centre at t_impact. The
/// node is placed on the Earth's heliocentric direction at impact, the
/// argument of periapsis (the solution closest to the input one) makes the
/// nodal radius equal to the Earth's, and the true anomaly at the epoch is
/// found by a root search on the along-track offset. Idempotent.
CalibrationReport calibrate_scenario(MissionScenario& scenario, double tolerance_km = 1e-3);

}  // namespace deflect
