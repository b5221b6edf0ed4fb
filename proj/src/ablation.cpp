#include "deflect/ablation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "deflect/quadrature.hpp"

namespace deflect {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("asteroid property ") + name + " must be positive");
}

// Strip quadrature in phi, y = y_cut sin(phi), phi in [0, pi/2]; the
// substitution smooths the square-root behaviour at the spot edge.
struct StripRule {
  static constexpr int N = 24;
  std::array<double, N> sin_phi{};
  std::array<double, N> weight{};  // includes cos(phi) and the pi/4 scale

  StripRule() {
    const auto& gl = GaussLegendre<N>::get();
    for (int j = 0; j < N; ++j) {
      const double phi = 0.25 * std::numbers::pi * (gl.nodes[j] + 1.0);
      sin_phi[j] = std::sin(phi);
      weight[j] = 0.25 * std::numbers::pi * gl.weights[j] * std::cos(phi);
    }
  }
};

const StripRule& strip_rule() {
  static const StripRule rule;
  return rule;
}

}  // namespace

void AsteroidProperties::validate() const {
  require_positive(c_a, "c_a");
  require_positive(k_a, "k_a");
  require_positive(rho_a, "rho_a");
  require_positive(t_subl, "t_subl");
  require_positive(e_sub, "e_sub");
  require_positive(t_0, "t_0");
  require_positive(a1, "a1");
  require_positive(b1, "b1");
  require_positive(m_a, "m_a");
  require_positive(mol_mass, "mol_mass");
  if (!(omega_a >= 0.0)) throw std::invalid_argument("spin rate must be non-negative");
  if (!(albedo >= 0.0 && albedo < 1.0)) throw std::invalid_argument("albedo must lie in [0, 1)");
  if (!(emiss_bb > 0.0 && emiss_bb <= 1.0)) {
    throw std::invalid_argument("black-body emissivity must lie in (0, 1]");
  }
  if (!(t_subl > t_0)) throw std::invalid_argument("sublimation temperature must exceed t_0");
}

double ellipsoid_mass(double rho, double a1, double b1) {
  return rho * 4.0 / 3.0 * std::numbers::pi * a1 * b1 * b1;
}

double input_power_density(double sys_eff, double c_r, double r_a_km,
                           const AsteroidProperties& ast, double tau,
                           const PhysicalConstants& c) {
  if (!(r_a_km > 0.0)) throw std::invalid_argument("heliocentric distance must be positive");
  const double ratio = c.au / r_a_km;
  return tau * sys_eff * c_r * (1.0 - ast.albedo) * c.s0 * ratio * ratio;
}

double radiation_loss(double t_surface, double emiss_bb, double sigma) {
  const double t2 = t_surface * t_surface;
  return sigma * emiss_bb * t2 * t2;
}

double conduction_loss(const AsteroidProperties& ast, double t_exposure) {
  if (!(t_exposure > 0.0)) throw std::invalid_argument("conduction loss is singular at t = 0");
  return (ast.t_subl - ast.t_0) *
         std::sqrt(ast.c_a * ast.k_a * ast.rho_a / (std::numbers::pi * t_exposure));
}

double mass_flow_rate(double p_in, const AsteroidProperties& ast, double r_ell, int n_sc,
                      double c_r, double a_m1, const PhysicalConstants& c) {
  const double q_rad = radiation_loss(ast.t_subl, ast.emiss_bb, c.sigma);
  const double net = p_in - q_rad;
  if (net <= 0.0 || n_sc <= 0) return 0.0;
  const double a_spot = a_m1 / c_r;
  const double half_width = 0.5 * std::sqrt(4.0 * a_spot / std::numbers::pi);
  const double v_rot = ast.omega_a * r_ell;
  if (v_rot <= 0.0) {
    // Fixed spot: conduction dies out and the whole spot sublimates.
    return n_sc * net * a_spot / ast.e_sub;
  }
  // Q_cond = k_cond / sqrt(t); net flux turns positive after t_onset.
  const double k_cond = (ast.t_subl - ast.t_0) *
                        std::sqrt(ast.c_a * ast.k_a * ast.rho_a / std::numbers::pi);
  const double t_onset = (k_cond / net) * (k_cond / net);
  const double chord_needed = 0.5 * v_rot * t_onset;
  if (chord_needed >= half_width) return 0.0;
  // Strips with |y| < y_cut dwell longer than t_onset.
  const double y_cut = std::sqrt(half_width * half_width - chord_needed * chord_needed);

  const StripRule& rule = strip_rule();
  const double sqrt_onset = std::sqrt(t_onset);
  const double hw2 = half_width * half_width;
  double integral = 0.0;
  for (int j = 0; j < StripRule::N; ++j) {
    const double y = y_cut * rule.sin_phi[j];
    const double dwell = 2.0 * std::sqrt(hw2 - y * y) / v_rot;
    const double energy =
        net * (dwell - t_onset) - 2.0 * k_cond * (std::sqrt(dwell) - sqrt_onset);
    if (energy > 0.0) integral += rule.weight[j] * energy;
  }
  integral *= y_cut;
  return 2.0 * n_sc * v_rot * integral / ast.e_sub;
}

double ejecta_velocity(const AsteroidProperties& ast, double k_b) {
  return std::sqrt(8.0 * k_b * ast.t_subl / (std::numbers::pi * ast.mol_mass));
}

double ablation_acceleration_si(double mdot, double vbar, const AsteroidProperties& ast,
                                const PhysicalConstants& c) {
  if (mdot < 0.0) throw std::invalid_argument("mass flow must be non-negative");
  return c.lambda_scatter * vbar * mdot / ast.m_a;
}

ThrustRTN ablation_acceleration(double mdot, double vbar, const AsteroidProperties& ast,
                                const EquinoctialState& eq, const PhysicalConstants& c) {
  ThrustRTN f;
  f.eps = ablation_acceleration_si(mdot, vbar, ast, c) * 1e-3;
  const double sl = std::sin(eq.ell);
  const double cl = std::cos(eq.ell);
  // Velocity direction: radial part ~ P2 sinL - P1 cosL, transversal ~ w.
  f.alpha = std::atan2(eq.w(), eq.p2 * sl - eq.p1 * cl);
  f.beta = 0.0;
  return f;
}

double plume_density(double mdot, double vbar, double a_spot, double d_spot, double r_dist,
                     double phi, const PhysicalConstants& c) {
  constexpr double phi_max = std::numbers::pi / 2.0;
  if (std::abs(phi) >= phi_max) return 0.0;
  const double big_theta = std::numbers::pi * phi / (2.0 * phi_max);
  const double spread = d_spot / (2.0 * r_dist + d_spot);
  return c.j_c * (mdot / (vbar * a_spot)) * spread * spread *
         std::pow(std::cos(big_theta), 2.0 / (c.kappa - 1.0));
}

SpotVector spot_vector(const StationGeometry& geom, const AsteroidProperties& ast, double t) {
  const double angle = ast.omega_a * t + geom.theta_va;
  const double bc = ast.b1 * std::cos(angle);
  const double as = ast.a1 * std::sin(angle);
  SpotVector sv;
  sv.r_ell = ast.a1 * ast.b1 / std::sqrt(bc * bc + as * as);
  sv.r_spot_sc = Vec3(geom.x - sv.r_ell * std::sin(geom.theta_va),
                      geom.y - sv.r_ell * std::cos(geom.theta_va), geom.z);
  return sv;
}

double plume_angle(const StationGeometry& geom, const SpotVector& sv) {
  const Vec3 axis(std::sin(geom.theta_va), std::cos(geom.theta_va), 0.0);
  const double n = sv.r_spot_sc.norm();
  if (n == 0.0) return 0.0;
  return std::acos(std::clamp(axis.dot(sv.r_spot_sc) / n, -1.0, 1.0));
}

double contamination_rate(double rho_exp, double vbar, const StationGeometry& geom,
                          const PhysicalConstants& c) {
  if (geom.x <= 0.0) return 0.0;  // mirrors face away from the plume
  return 2.0 * vbar * rho_exp / c.rho_layer * std::cos(geom.psi_vf) * 100.0;
}

double degradation_factor(double h_cond, const PhysicalConstants& c) {
  return std::exp(-2.0 * c.eta_abs * h_cond);
}

PlumeState contamination_step(const PlumeState& plume, double rho_exp, double vbar,
                              const StationGeometry& geom, double dt,
                              const PhysicalConstants& c) {
  if (!(dt > 0.0)) throw std::invalid_argument("contamination_step: dt must be positive");
  PlumeState out = plume;
  out.h_cond += contamination_rate(rho_exp, vbar, geom, c) * dt;
  out.tau = degradation_factor(out.h_cond, c);
  return out;
}

namespace {

AblationSample sample_ablation(const LaserSetup& laser, const AsteroidProperties& ast,
                               const StationGeometry& geom, double r_a_km, double tau, double t,
                               const PhysicalConstants& c, bool with_plume) {
  AblationSample s;
  const SpotVector sv = spot_vector(geom, ast, t);
  s.p_in = input_power_density(laser.sys_eff, laser.c_r, r_a_km, ast, tau, c);
  s.mdot = mass_flow_rate(s.p_in, ast, sv.r_ell, laser.n_sc, laser.c_r, laser.a_m1, c);
  if (s.mdot > 0.0) {
    const double vbar = ejecta_velocity(ast, c.k_b);
    s.accel = ablation_acceleration_si(s.mdot, vbar, ast, c);
    if (with_plume) {
      const double a_spot = laser.a_m1 / laser.c_r;
      const double d_spot = std::sqrt(4.0 * a_spot / std::numbers::pi);
      const double rho = plume_density(s.mdot / laser.n_sc, vbar, a_spot, d_spot,
                                       sv.r_spot_sc.norm(), plume_angle(geom, sv), c);
      s.h_rate = contamination_rate(rho, vbar, geom, c);
    }
  }
  return s;
}

}  // namespace

AblationSample evaluate_ablation(const LaserSetup& laser, const AsteroidProperties& ast,
                                 const StationGeometry& geom, double r_a_km, double tau,
                                 double t, const PhysicalConstants& c) {
  return sample_ablation(laser, ast, geom, r_a_km, tau, t, c, true);
}

AblationThrust::AblationThrust(LaserSetup laser, AsteroidProperties ast, StationGeometry geom,
                               bool contamination, PhysicalConstants consts)
    : laser_(laser), ast_(ast), geom_(geom), contamination_(contamination), consts_(consts) {
  ast_.validate();
}

ThrustRTN AblationThrust::operator()(const EquinoctialState& eq, double t_elapsed) {
  if (contamination_ && started_ && t_elapsed > last_t_) {
    plume_.h_cond += last_.h_rate * (t_elapsed - last_t_);
    plume_.tau = degradation_factor(plume_.h_cond, consts_);
  }
  started_ = true;
  last_t_ = t_elapsed;
  const double sl = std::sin(eq.ell);
  const double cl = std::cos(eq.ell);
  const double w = 1.0 + eq.p1 * sl + eq.p2 * cl;
  last_ = sample_ablation(laser_, ast_, geom_, eq.semi_latus_rectum() / w,
                          contamination_ ? plume_.tau : 1.0, t_elapsed, consts_, contamination_);
  // Along the heliocentric velocity: radial part ~ P2 sinL - P1 cosL, transversal ~ w.
  return {last_.accel * 1e-3, std::atan2(w, eq.p2 * sl - eq.p1 * cl), 0.0};
}

OracleForce AblationThrust::cartesian(double t_elapsed, const CartesianState& s,
                                      double h_cond) const {
  const double tau = contamination_ ? degradation_factor(h_cond, consts_) : 1.0;
  const AblationSample a =
      sample_ablation(laser_, ast_, geom_, s.r.norm(), tau, t_elapsed, consts_, contamination_);
  OracleForce f;
  f.accel = s.v.normalized() * (a.accel * 1e-3);
  f.aux_rate = contamination_ ? a.h_rate : 0.0;
  return f;
}

}  // namespace deflect
