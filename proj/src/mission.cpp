#include "deflect/mission.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "deflect/reference_propagator.hpp"

namespace deflect {

std::size_t UncertainVector::index_of(std::string_view name) {
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    if (kUncertainNames[i] == name) return i;
  }
  throw std::invalid_argument("unknown uncertain parameter '" + std::string(name) + "'");
}

MissionModel::MissionModel(MissionScenario scenario) : scenario_(std::move(scenario)) {
  scenario_.tech.validate();
  asteroid_epoch_state_ =
      keplerian_to_equinoctial(scenario_.asteroid_elements, scenario_.asteroid_epoch);
  nominal_impact_ = kepler_propagate(asteroid_epoch_state_, scenario_.t_impact, kMuSun);
  const auto earth0 = keplerian_to_equinoctial(scenario_.earth_elements, scenario_.earth_epoch);
  earth_impact_ = kepler_propagate(earth0, scenario_.t_impact, kMuSun);
  const double r_peri = scenario_.asteroid_elements.a * (1.0 - scenario_.asteroid_elements.e);
  const double ratio = scenario_.consts.au / r_peri;
  sizing_flux_ = scenario_.consts.s0 * ratio * ratio;
}

AsteroidProperties MissionModel::asteroid_for(const UncertainVector& u) const {
  AsteroidProperties a = scenario_.asteroid;
  a.c_a = u[0];
  a.k_a = u[1];
  a.rho_a = u[2];
  a.t_subl = u[3];
  a.e_sub = u[4];
  if (scenario_.derive_mass) a.m_a = ellipsoid_mass(a.rho_a, a.a1, a.b1);
  return a;
}

TechnologyParams MissionModel::tech_for(const UncertainVector& u) const {
  TechnologyParams t = scenario_.tech;
  t.eta_l = u[5];
  t.eta_sa = u[6];
  t.rho_m = u[7];
  t.rho_l = u[8];
  t.rho_r = u[9];
  return t;
}

MassBudget MissionModel::budget(const DesignVector& design, const UncertainVector& u,
                                const Margins& margins) const {
  return size_spacecraft(design, tech_for(u), margins, sizing_flux_);
}

double MissionModel::system_mass(const DesignVector& design, const UncertainVector& u,
                                 const Margins& margins) const {
  return budget(design, u, margins).m_sys;
}

AblationThrust MissionModel::thrust_for(const DesignVector& design, const UncertainVector& u,
                                        bool contamination) const {
  LaserSetup laser;
  laser.sys_eff = system_efficiency(tech_for(u));
  laser.c_r = design.c_r;
  laser.a_m1 = std::numbers::pi * design.d_m * design.d_m / 4.0;
  laser.n_sc = design.n_sc;
  return AblationThrust(laser, asteroid_for(u), scenario_.station, contamination,
                        scenario_.consts);
}

EquinoctialState MissionModel::campaign_start(double t_warn_years) const {
  if (!(t_warn_years > 0.0)) throw std::invalid_argument("warning time must be positive");
  return kepler_propagate(asteroid_epoch_state_,
                          scenario_.t_impact - t_warn_years * kSecondsPerYear, kMuSun);
}

std::vector<TrajectoryNode> MissionModel::trajectory(const DesignVector& design,
                                                     const UncertainVector& u, bool contamination,
                                                     bool keep_history) const {
  AblationThrust thrust = thrust_for(design, u, contamination);
  PropagationOptions opts;
  opts.max_arcs = scenario_.max_arcs;
  opts.keep_history = keep_history;
  ArcControl ctrl = scenario_.arc;
  ctrl.eps_max_seen = 0.0;
  return propagate_trajectory(
      campaign_start(design.t_warn),
      [&thrust](const EquinoctialState& s, double t) { return thrust(s, t); },
      scenario_.t_impact, ctrl, kMuSun, opts);
}

double MissionModel::impact_parameter(const DesignVector& design, const UncertainVector& u,
                                      bool contamination) const {
  const auto traj = trajectory(design, u, contamination, false);
  EquinoctialState last = traj.back().state;
  last.t = scenario_.t_impact;  // landed within the propagation tolerance
  return deflect::impact_parameter(last, nominal_impact_, earth_impact_, scenario_.t_impact,
                                   kMuSun)
      .b;
}

MissionOutcome MissionModel::evaluate(const DesignVector& design, const UncertainVector& u,
                                      const Margins& margins, bool contamination) const {
  return {system_mass(design, u, margins), impact_parameter(design, u, contamination)};
}

double MissionModel::reference_impact_parameter(const DesignVector& design,
                                                const UncertainVector& u, bool contamination,
                                                const ReferenceOptions& opts) const {
  const AblationThrust thrust = thrust_for(design, u, contamination);
  const EquinoctialState start = campaign_start(design.t_warn);
  const auto res = rk_propagate(
      to_cartesian(start, kMuSun), scenario_.t_impact - start.t,
      [&thrust](double t, const CartesianState& s, double h) { return thrust.cartesian(t, s, h); },
      kMuSun, opts);
  return deflect::impact_parameter(res.deviated, res.nominal, to_cartesian(earth_impact_, kMuSun))
      .b;
}

}  // namespace deflect

namespace deflect {

CalibrationReport calibrate_scenario(MissionScenario& scenario, double tolerance_km) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const auto earth0 = keplerian_to_equinoctial(scenario.earth_elements, scenario.earth_epoch);
  const auto earth = to_cartesian(kepler_propagate(earth0, scenario.t_impact, kMuSun), kMuSun);
  const double r_earth = earth.r.norm();

  KeplerianElements k = scenario.asteroid_elements;
  if (std::abs(earth.r.z()) > 1e-9 * r_earth) {
    throw CalibrationError("calibration assumes the Earth orbit defines the reference plane");
  }
  k.raan = wrap_two_pi(std::atan2(earth.r.y(), earth.r.x()));
  const double p = k.a * (1.0 - k.e * k.e);
  const double cos_argp = (p / r_earth - 1.0) / k.e;
  if (!(std::abs(cos_argp) <= 1.0)) {
    throw CalibrationError("asteroid orbit never reaches the Earth's heliocentric distance");
  }
  const double w1 = std::acos(cos_argp);
  const double w2 = kTwoPi - w1;
  auto gap = [&](double w) {
    double d = std::fmod(std::abs(w - wrap_two_pi(k.argp)), kTwoPi);
    return std::min(d, kTwoPi - d);
  };
  k.argp = gap(w1) <= gap(w2) ? w1 : w2;

  // Mean anomaly at the node crossing, moved back to the element epoch.
  const double theta_node = wrap_two_pi(-k.argp);
  KeplerianElements at_node = k;
  at_node.theta = theta_node;
  const auto eq_node = keplerian_to_equinoctial(at_node, scenario.t_impact);
  const auto eq_epoch = kepler_propagate(eq_node, scenario.asteroid_epoch, kMuSun);
  k.theta = equinoctial_to_keplerian(eq_epoch).theta;

  // Root search on the along-track offset at t_impact (Newton in time).
  CalibrationReport rep;
  for (rep.iterations = 0; rep.iterations < 50; ++rep.iterations) {
    const auto eq = keplerian_to_equinoctial(k, scenario.asteroid_epoch);
    const auto ast = to_cartesian(kepler_propagate(eq, scenario.t_impact, kMuSun), kMuSun);
    const Vec3 d = ast.r - earth.r;
    rep.miss_distance = d.norm();
    if (rep.miss_distance <= tolerance_km) break;
    const double along = -d.dot(ast.v) / ast.v.squaredNorm();  // time shift [s]
    auto shifted = kepler_propagate(eq, scenario.asteroid_epoch + along, kMuSun);
    shifted.t = scenario.asteroid_epoch;
    k.theta = equinoctial_to_keplerian(shifted).theta;
  }
  if (rep.miss_distance > 1.0) {
    throw CalibrationError("no intercept geometry found (residual miss " +
                           std::to_string(rep.miss_distance) + " km)");
  }
  scenario.asteroid_elements = k;
  const MissionModel model(scenario);
  const CartesianState ast_cart = to_cartesian(model.nominal_at_impact(), kMuSun);
  const Vec3 u = (ast_cart.v - earth.v).normalized();
  const Vec3 d = ast_cart.r - earth.r;
  rep.b = (d - d.dot(u) * u).norm();
  return rep;
}

}  // namespace deflect
