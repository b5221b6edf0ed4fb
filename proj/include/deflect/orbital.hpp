#pragma once

// Two-body orbital mechanics in non-singular equinoctial elements, the
// first-order analytic arc propagator (FPET) and the b-plane impact
// parameter.
//
// Units: km, s, rad. Accelerations in km/s^2.

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace deflect {

using Vec3 = Eigen::Vector3d;

/// Gravitational parameter of the Sun [km^3/s^2].
inline constexpr double kMuSun = 1.32712440018e11;

/// Astronomical unit [km].
inline constexpr double kAU = 1.495978707e8;

/// Raised when an orbital quantity is requested outside its valid domain.
class OrbitDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solve (Kepler equation, landing bisection,
/// arc budget) does not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeplerianElements {
  double a = 0.0;      // semi-major axis [km]
  double e = 0.0;      // eccentricity
  double i = 0.0;      // inclination [rad]
  double raan = 0.0;   // right ascension of the ascending node [rad]
  double argp = 0.0;   // argument of periapsis [rad]
  double theta = 0.0;  // true anomaly [rad]
};

/// Equinoctial state (a, P1, P2, Q1, Q2, L) plus epoch.
///
/// P1 = e sin(raan + argp), P2 = e cos(raan + argp),
/// Q1 = tan(i/2) sin(raan), Q2 = tan(i/2) cos(raan), L = raan + argp + theta.
/// The true longitude is kept unwrapped along a propagated trajectory.
struct EquinoctialState {
  double a = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double ell = 0.0;
  double t = 0.0;  // epoch [s past the scenario reference]

  double eccentricity() const;
  double semi_latus_rectum() const;
  /// 1 + P1 sin L + P2 cos L, i.e. p / r.
  double w() const;
  double radius() const;
  double angular_momentum(double mu) const;
};

/// Thrust acceleration in the radial / transversal / normal frame.
/// alpha is measured from the radial direction towards the transversal one,
/// beta is the elevation out of the orbit plane.
struct ThrustRTN {
  double eps = 0.0;    // modulus [km/s^2]
  double alpha = 0.0;  // azimuth [rad]
  double beta = 0.0;   // elevation [rad]

  /// Cartesian components (radial, transversal, normal).
  Vec3 rtn() const;
};

/// Constants of the adaptive arc-length law and the running maximum of the
/// acceleration seen so far along the trajectory (caller-owned).
struct ArcControl {
  double a_const = 0.05;
  double k_const = 2.0;
  double dl_max = 0.5;
  double eps_max_seen = 0.0;
};

struct BPlaneResult {
  double b = 0.0;  // [km]
  Vec3 v_inf = Vec3::Zero();
  Vec3 b_vec = Vec3::Zero();
};

/// Time derivatives of (a, P1, P2, Q1, Q2, L).
struct ElementRates {
  double a = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double ell = 0.0;
};

struct CartesianState {
  Vec3 r = Vec3::Zero();  // [km]
  Vec3 v = Vec3::Zero();  // [km/s]
};

EquinoctialState keplerian_to_equinoctial(const KeplerianElements& kep, double t = 0.0);
KeplerianElements equinoctial_to_keplerian(const EquinoctialState& eq);

/// Gauss' variational equations in equinoctial elements.
ElementRates gauss_rhs(const EquinoctialState& eq, const ThrustRTN& f, double mu);

CartesianState to_cartesian(const EquinoctialState& eq, double mu);
EquinoctialState from_cartesian(const CartesianState& s, double mu, double t);

/// Unit vectors of the radial / transversal / normal frame at `s`,
/// returned as the columns of the matrix.
Eigen::Matrix3d rtn_frame(const CartesianState& s);

/// Mean anomaly, continuous in L (no 2*pi wrapping).
double mean_anomaly_at(const EquinoctialState& eq, double ell);

/// Keplerian time of flight from eq.ell to eq.ell + dl.
double kepler_time_of_flight(const EquinoctialState& eq, double dl, double mu);

/// Unperturbed propagation to epoch `t` (either direction).
EquinoctialState kepler_propagate(const EquinoctialState& eq, double t, double mu);

/// One FPET arc: state at L0 + dl under constant RTN thrust, expanded to
/// first order in the thrust modulus.
EquinoctialState fpet_step(const EquinoctialState& eq0, double dl, const ThrustRTN& f, double mu);

/// Arc length law. Updates ctrl.eps_max_seen before sizing the arc.
double adaptive_arc_length(double eps_now, ArcControl& ctrl);

/// Thrust evaluated at the start of each arc: (state, time since eq0.t).
using ThrustCallback = std::function<ThrustRTN(const EquinoctialState&, double)>;

struct TrajectoryNode {
  EquinoctialState state;
  ThrustRTN thrust;  // thrust applied on the arc that starts here
};

struct PropagationOptions {
  std::size_t max_arcs = 200000;
  double time_tolerance = 1e-6;  // landing tolerance on t_end [s]
  bool keep_history = true;      // otherwise only the first and last nodes
};

/// Arc-by-arc FPET propagation until t_end. The final arc is shortened so
/// that the last node lands on t_end.
std::vector<TrajectoryNode> propagate_trajectory(const EquinoctialState& eq0,
                                                 const ThrustCallback& thrust, double t_end,
                                                 ArcControl ctrl, double mu,
                                                 const PropagationOptions& opts = {});

/// b-plane miss of `deviated` with respect to `nominal`. All states must be
/// at epoch t_impact; `earth` supplies V_E for the incoming velocity.
BPlaneResult impact_parameter(const EquinoctialState& deviated, const EquinoctialState& nominal,
                              const EquinoctialState& earth, double t_impact, double mu_sun);

/// Same as above on Cartesian states.
BPlaneResult impact_parameter(const CartesianState& deviated, const CartesianState& nominal,
                              const CartesianState& earth);

double wrap_two_pi(double angle);

}  // namespace deflect
