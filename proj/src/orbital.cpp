#include "deflect/orbital.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "deflect/quadrature.hpp"

namespace deflect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Eccentric anomaly from true anomaly, continuous over all real theta.
double eccentric_from_true(double theta, double e) {
  const double beta = e / (1.0 + std::sqrt(1.0 - e * e));
  return theta - 2.0 * std::atan2(beta * std::sin(theta), 1.0 + beta * std::cos(theta));
}

double true_from_eccentric(double ecc_anomaly, double e) {
  const double beta = e / (1.0 + std::sqrt(1.0 - e * e));
  return ecc_anomaly +
         2.0 * std::atan2(beta * std::sin(ecc_anomaly), 1.0 - beta * std::cos(ecc_anomaly));
}

double solve_kepler(double mean_anomaly, double e) {
  const double turns = std::round(mean_anomaly / kTwoPi);
  const double m = mean_anomaly - turns * kTwoPi;
  double ecc = (e < 0.8) ? m : (m >= 0.0 ? std::numbers::pi : -std::numbers::pi);
  for (int it = 0; it < 60; ++it) {
    const double s = std::sin(ecc);
    const double c = std::cos(ecc);
    const double f = ecc - e * s - m;
    const double fp = 1.0 - e * c;
    const double fpp = e * s;
    // Halley step
    const double step = f / (fp - 0.5 * f * fpp / fp);
    ecc -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(ecc))) {
      return ecc + turns * kTwoPi;
    }
  }
  throw ConvergenceError("Kepler equation did not converge (M=" + std::to_string(mean_anomaly) +
                         ", e=" + std::to_string(e) + ")");
}

void check_elliptic(const EquinoctialState& eq) {
  if (!(eq.a > 0.0)) throw OrbitDomainError("semi-major axis must be positive");
  if (!(eq.p1 * eq.p1 + eq.p2 * eq.p2 < 1.0)) {
    throw OrbitDomainError("equinoctial state is not elliptic (P1^2 + P2^2 >= 1)");
  }
}

}  // namespace

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double EquinoctialState::eccentricity() const { return std::hypot(p1, p2); }

double EquinoctialState::semi_latus_rectum() const { return a * (1.0 - p1 * p1 - p2 * p2); }

double EquinoctialState::w() const { return 1.0 + p1 * std::sin(ell) + p2 * std::cos(ell); }

double EquinoctialState::radius() const { return semi_latus_rectum() / w(); }

double EquinoctialState::angular_momentum(double mu) const {
  return std::sqrt(mu * semi_latus_rectum());
}

Vec3 ThrustRTN::rtn() const {
  if (beta == 0.0) return {eps * std::cos(alpha), eps * std::sin(alpha), 0.0};
  const double cb = std::cos(beta);
  return {eps * cb * std::cos(alpha), eps * cb * std::sin(alpha), eps * std::sin(beta)};
}

EquinoctialState keplerian_to_equinoctial(const KeplerianElements& kep, double t) {
  if (!(kep.a > 0.0)) throw OrbitDomainError("semi-major axis must be positive");
  if (!(kep.e >= 0.0 && kep.e < 1.0)) {
    throw OrbitDomainError("eccentricity must lie in [0, 1), got " + std::to_string(kep.e));
  }
  if (!(kep.i >= 0.0 && kep.i < std::numbers::pi - 1e-12)) {
    throw OrbitDomainError("inclination must lie in [0, pi), got " + std::to_string(kep.i));
  }
  const double lon_peri = kep.raan + kep.argp;
  const double tan_half_i = std::tan(0.5 * kep.i);
  EquinoctialState eq;
  eq.a = kep.a;
  eq.p1 = kep.e * std::sin(lon_peri);
  eq.p2 = kep.e * std::cos(lon_peri);
  eq.q1 = tan_half_i * std::sin(kep.raan);
  eq.q2 = tan_half_i * std::cos(kep.raan);
  eq.ell = wrap_two_pi(lon_peri + kep.theta);
  eq.t = t;
  return eq;
}

KeplerianElements equinoctial_to_keplerian(const EquinoctialState& eq) {
  check_elliptic(eq);
  KeplerianElements kep;
  kep.a = eq.a;
  kep.e = eq.eccentricity();
  kep.i = 2.0 * std::atan(std::hypot(eq.q1, eq.q2));
  kep.raan = wrap_two_pi(std::atan2(eq.q1, eq.q2));
  const double lon_peri = std::atan2(eq.p1, eq.p2);
  kep.argp = wrap_two_pi(lon_peri - kep.raan);
  kep.theta = wrap_two_pi(eq.ell - lon_peri);
  return kep;
}

ElementRates gauss_rhs(const EquinoctialState& eq, const ThrustRTN& f, double mu) {
  const double sl = std::sin(eq.ell);
  const double cl = std::cos(eq.ell);
  const double p = eq.semi_latus_rectum();
  const double w = 1.0 + eq.p1 * sl + eq.p2 * cl;
  const double r = p / w;
  const double h = std::sqrt(mu * p);
  const Vec3 acc = f.rtn();
  const double fr = acc.x();
  const double ft = acc.y();
  const double fn = acc.z();
  const double r_h = r / h;
  const double q_term = eq.q1 * cl - eq.q2 * sl;
  const double s2 = 1.0 + eq.q1 * eq.q1 + eq.q2 * eq.q2;

  ElementRates d;
  d.a = 2.0 * eq.a * eq.a / h * ((eq.p2 * sl - eq.p1 * cl) * fr + w * ft);
  d.p1 = r_h * (-w * cl * fr + (eq.p1 + (1.0 + w) * sl) * ft - eq.p2 * q_term * fn);
  d.p2 = r_h * (w * sl * fr + (eq.p2 + (1.0 + w) * cl) * ft + eq.p1 * q_term * fn);
  d.q1 = 0.5 * r_h * s2 * sl * fn;
  d.q2 = 0.5 * r_h * s2 * cl * fn;
  d.ell = h / (r * r) - r_h * q_term * fn;
  return d;
}

CartesianState to_cartesian(const EquinoctialState& eq, double mu) {
  check_elliptic(eq);
  const double f = eq.p2;
  const double g = eq.p1;
  const double hh = eq.q2;
  const double kk = eq.q1;
  const double sl = std::sin(eq.ell);
  const double cl = std::cos(eq.ell);
  const double alpha2 = hh * hh - kk * kk;
  const double s2 = 1.0 + hh * hh + kk * kk;
  const double p = eq.semi_latus_rectum();
  const double w = 1.0 + f * cl + g * sl;
  const double r = p / w;
  const double smp = std::sqrt(mu / p);

  CartesianState s;
  s.r = (r / s2) * Vec3(cl + alpha2 * cl + 2.0 * hh * kk * sl,
                        sl - alpha2 * sl + 2.0 * hh * kk * cl, 2.0 * (hh * sl - kk * cl));
  s.v = (-smp / s2) *
        Vec3(sl + alpha2 * sl - 2.0 * hh * kk * cl + g - 2.0 * f * hh * kk + alpha2 * g,
             -cl + alpha2 * cl + 2.0 * hh * kk * sl - f + 2.0 * g * hh * kk + alpha2 * f,
             -2.0 * (hh * cl + kk * sl + f * hh + g * kk));
  return s;
}

EquinoctialState from_cartesian(const CartesianState& s, double mu, double t) {
  const Vec3 hvec = s.r.cross(s.v);
  const double hnorm = hvec.norm();
  if (!(hnorm > 0.0)) throw OrbitDomainError("rectilinear state has no orbit plane");
  const Vec3 hhat = hvec / hnorm;
  if (hhat.z() <= -1.0 + 1e-14) throw OrbitDomainError("retrograde equatorial orbit (i = pi)");
  const double kk = hhat.x() / (1.0 + hhat.z());
  const double hh = -hhat.y() / (1.0 + hhat.z());
  const double s2 = 1.0 + hh * hh + kk * kk;
  const Vec3 fhat = Vec3(1.0 - kk * kk + hh * hh, 2.0 * kk * hh, -2.0 * kk) / s2;
  const Vec3 ghat = Vec3(2.0 * kk * hh, 1.0 + kk * kk - hh * hh, 2.0 * hh) / s2;
  const Vec3 evec = s.v.cross(hvec) / mu - s.r / s.r.norm();
  const double p = hnorm * hnorm / mu;

  EquinoctialState eq;
  eq.p2 = evec.dot(fhat);
  eq.p1 = evec.dot(ghat);
  eq.q1 = kk;
  eq.q2 = hh;
  const double one_minus_e2 = 1.0 - eq.p1 * eq.p1 - eq.p2 * eq.p2;
  if (!(one_minus_e2 > 0.0)) throw OrbitDomainError("Cartesian state is not elliptic");
  eq.a = p / one_minus_e2;
  eq.ell = wrap_two_pi(std::atan2(s.r.dot(ghat), s.r.dot(fhat)));
  eq.t = t;
  return eq;
}

Eigen::Matrix3d rtn_frame(const CartesianState& s) {
  const Vec3 rhat = s.r.normalized();
  const Vec3 nhat = s.r.cross(s.v).normalized();
  const Vec3 that = nhat.cross(rhat);
  Eigen::Matrix3d m;
  m.col(0) = rhat;
  m.col(1) = that;
  m.col(2) = nhat;
  return m;
}

double mean_anomaly_at(const EquinoctialState& eq, double ell) {
  const double e = eq.eccentricity();
  const double lon_peri = std::atan2(eq.p1, eq.p2);
  const double ecc = eccentric_from_true(ell - lon_peri, e);
  return ecc - e * std::sin(ecc);
}

namespace {

// Mean anomaly minus true longitude up to a constant (the longitude of
// periapsis), from sin/cos of the longitude. Differences of this quantity
// give times of flight without locating the periapsis.
double mean_minus_longitude(const EquinoctialState& eq, double sl, double cl) {
  const double root = std::sqrt(1.0 - eq.p1 * eq.p1 - eq.p2 * eq.p2);
  const double es = eq.p2 * sl - eq.p1 * cl;  // e sin(theta)
  const double ec = eq.p1 * sl + eq.p2 * cl;  // e cos(theta)
  const double k = 1.0 / (1.0 + root);
  return -2.0 * std::atan2(k * es, 1.0 + k * ec) - root * es / (1.0 + ec);
}

double time_of_flight(const EquinoctialState& eq, double dl, double sl0, double cl0, double sl1,
                      double cl1, double mu) {
  const double n = std::sqrt(mu / (eq.a * eq.a * eq.a));
  return (dl + mean_minus_longitude(eq, sl1, cl1) - mean_minus_longitude(eq, sl0, cl0)) / n;
}

}  // namespace

double kepler_time_of_flight(const EquinoctialState& eq, double dl, double mu) {
  check_elliptic(eq);
  return time_of_flight(eq, dl, std::sin(eq.ell), std::cos(eq.ell), std::sin(eq.ell + dl),
                        std::cos(eq.ell + dl), mu);
}

EquinoctialState kepler_propagate(const EquinoctialState& eq, double t, double mu) {
  check_elliptic(eq);
  const double e = eq.eccentricity();
  const double lon_peri = std::atan2(eq.p1, eq.p2);
  const double n = std::sqrt(mu / (eq.a * eq.a * eq.a));
  const double m0 = mean_anomaly_at(eq, eq.ell);
  const double m1 = m0 + n * (t - eq.t);
  const double ecc = solve_kepler(m1, e);
  EquinoctialState out = eq;
  // Anchor on the input longitude so that the result stays unwrapped.
  const double theta0 = eq.ell - lon_peri;
  const double ecc0 = eccentric_from_true(theta0, e);
  out.ell = eq.ell + (true_from_eccentric(ecc, e) - true_from_eccentric(ecc0, e));
  out.t = t;
  return out;
}

EquinoctialState fpet_step(const EquinoctialState& eq0, double dl, const ThrustRTN& f, double mu) {
  check_elliptic(eq0);
  constexpr int N = 8;
  const auto& gl = GaussLegendre<N>::get();
  const double half = 0.5 * dl;
  // Nodes are symmetric about the arc midpoint: sin/cos of mid +- offset.
  const double sin_mid = std::sin(eq0.ell + half);
  const double cos_mid = std::cos(eq0.ell + half);
  const double sin_half = std::sin(half);
  const double cos_half = std::cos(half);

  EquinoctialState out = eq0;
  out.ell = eq0.ell + dl;
  out.t = eq0.t + time_of_flight(eq0, dl, sin_mid * cos_half - cos_mid * sin_half,
                                 cos_mid * cos_half + sin_mid * sin_half,
                                 sin_mid * cos_half + cos_mid * sin_half,
                                 cos_mid * cos_half - sin_mid * sin_half, mu);
  if (f.eps == 0.0 || dl == 0.0) return out;

  const double p = eq0.semi_latus_rectum();
  const double one_minus_e2 = 1.0 - eq0.p1 * eq0.p1 - eq0.p2 * eq0.p2;
  const double h = std::sqrt(mu * p);
  const double s2 = 1.0 + eq0.q1 * eq0.q1 + eq0.q2 * eq0.q2;
  const Vec3 unit = ThrustRTN{1.0, f.alpha, f.beta}.rtn();
  const double fr = unit.x();
  const double ft = unit.y();
  const double fn = unit.z();

  std::array<double, N> sin_node{};
  std::array<double, N> cos_node{};
  for (int j = 0; j < N / 2; ++j) {
    const double off = half * gl.nodes[j];
    const double so = std::sin(off);
    const double co = std::cos(off);
    sin_node[j] = sin_mid * co + cos_mid * so;
    cos_node[j] = cos_mid * co - sin_mid * so;
    sin_node[N - 1 - j] = sin_mid * co - cos_mid * so;
    cos_node[N - 1 - j] = cos_mid * co + sin_mid * so;
  }

  // First-order integrands d(element)/dL per unit thrust, and the pieces of
  // dt/dL needed for the time correction, at each node of the arc.
  std::array<std::array<double, N>, 5> dx{};
  std::array<double, N> inv_rate{};   // r^2 / h
  std::array<double, N> ell_pert{};   // perturbation of dL/dt per unit thrust
  for (int j = 0; j < N; ++j) {
    const double sl = sin_node[j];
    const double cl = cos_node[j];
    const double w = 1.0 + eq0.p1 * sl + eq0.p2 * cl;
    const double r = p / w;
    const double r_h = r / h;
    const double q_term = eq0.q1 * cl - eq0.q2 * sl;
    const double dt_dl = r * r / h;
    dx[0][j] = dt_dl * 2.0 * eq0.a * eq0.a / h * ((eq0.p2 * sl - eq0.p1 * cl) * fr + w * ft);
    dx[1][j] = dt_dl * r_h * (-w * cl * fr + (eq0.p1 + (1.0 + w) * sl) * ft - eq0.p2 * q_term * fn);
    dx[2][j] = dt_dl * r_h * (w * sl * fr + (eq0.p2 + (1.0 + w) * cl) * ft + eq0.p1 * q_term * fn);
    dx[3][j] = dt_dl * 0.5 * r_h * s2 * sl * fn;
    dx[4][j] = dt_dl * 0.5 * r_h * s2 * cl * fn;
    inv_rate[j] = dt_dl;
    ell_pert[j] = -r_h * q_term * fn;
    // Reuse the sin/cos slots for d(r^2/h)/dP1 and d(r^2/h)/dP2 factors.
    sin_node[j] = sl / w;
    cos_node[j] = cl / w;
  }

  std::array<double, 5> first{};
  for (int m = 0; m < 5; ++m) {
    for (int j = 0; j < N; ++j) first[m] += gl.weights[j] * dx[m][j];
  }
  // Only a, P1 and P2 enter r^2/h, so the time correction needs their
  // partial integrals at the nodes.
  double t_first = 0.0;
  for (int j = 0; j < N; ++j) {
    double pa = 0.0;
    double pp1 = 0.0;
    double pp2 = 0.0;
    for (int k = 0; k < N; ++k) {
      const double c = gl.cumulative[j][k];
      pa += c * dx[0][k];
      pp1 += c * dx[1][k];
      pp2 += c * dx[2][k];
    }
    const double g = inv_rate[j];
    const double grad_a = 1.5 * g / eq0.a;
    const double grad_p1 = g * (-3.0 * eq0.p1 / one_minus_e2 - 2.0 * sin_node[j]);
    const double grad_p2 = g * (-3.0 * eq0.p2 / one_minus_e2 - 2.0 * cos_node[j]);
    const double integrand =
        half * (grad_a * pa + grad_p1 * pp1 + grad_p2 * pp2) - ell_pert[j] * g * g;
    t_first += gl.weights[j] * integrand;
  }

  const double eps = f.eps;
  out.a += eps * half * first[0];
  out.p1 += eps * half * first[1];
  out.p2 += eps * half * first[2];
  out.q1 += eps * half * first[3];
  out.q2 += eps * half * first[4];
  out.t += eps * half * t_first;
  return out;
}

double adaptive_arc_length(double eps_now, ArcControl& ctrl) {
  ctrl.eps_max_seen = std::max(ctrl.eps_max_seen, eps_now);
  if (!(eps_now > 0.0)) return ctrl.dl_max;
  const double exponent =
      (-std::log10(eps_now) + std::log10(ctrl.eps_max_seen) + 1.0) / ctrl.k_const;
  return std::min(ctrl.a_const * std::exp(exponent), ctrl.dl_max);
}

std::vector<TrajectoryNode> propagate_trajectory(const EquinoctialState& eq0,
                                                 const ThrustCallback& thrust, double t_end,
                                                 ArcControl ctrl, double mu,
                                                 const PropagationOptions& opts) {
  if (t_end < eq0.t) throw std::invalid_argument("propagate_trajectory: t_end before start epoch");
  if (!(ctrl.a_const > 0.0 && ctrl.k_const > 0.0 && ctrl.dl_max > 0.0 &&
        ctrl.dl_max <= 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("propagate_trajectory: invalid arc control constants");
  }
  std::vector<TrajectoryNode> nodes;
  nodes.push_back({eq0, {}});
  EquinoctialState state = eq0;
  std::size_t arcs = 0;
  while (t_end - state.t > opts.time_tolerance) {
    if (++arcs > opts.max_arcs) {
      throw ConvergenceError("propagate_trajectory: arc budget exhausted (" +
                             std::to_string(opts.max_arcs) + " arcs)");
    }
    const ThrustRTN f = thrust(state, state.t - eq0.t);
    nodes.back().thrust = f;
    const double dl = adaptive_arc_length(f.eps, ctrl);
    EquinoctialState next = fpet_step(state, dl, f, mu);
    if (next.t > t_end) {
      // Land on t_end: Newton on the arc length, safeguarded by bisection.
      double lo = 0.0;
      double hi = dl;
      double x = std::clamp(kepler_propagate(state, t_end, mu).ell - state.ell, 0.0, dl);
      bool landed = false;
      for (int it = 0; it < 200; ++it) {
        next = fpet_step(state, x, f, mu);
        const double g = next.t - t_end;
        if (std::abs(g) <= opts.time_tolerance) {
          landed = true;
          break;
        }
        if (g > 0.0) {
          hi = x;
        } else {
          lo = x;
        }
        const double r = next.radius();
        const double slope = r * r / next.angular_momentum(mu);
        double trial = x - g / slope;
        if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
        x = trial;
      }
      if (!landed) throw ConvergenceError("propagate_trajectory: final arc did not land on t_end");
    }
    state = next;
    if (opts.keep_history || nodes.size() < 2) {
      nodes.push_back({state, {}});
    } else {
      nodes.back() = {state, {}};
    }
  }
  return nodes;
}

BPlaneResult impact_parameter(const CartesianState& deviated, const CartesianState& nominal,
                              const CartesianState& earth) {
  BPlaneResult out;
  out.v_inf = nominal.v - earth.v;
  const double vnorm = out.v_inf.norm();
  if (!(vnorm > 1e-9)) throw OrbitDomainError("degenerate b-plane: |V_inf| below tolerance");
  const Vec3 u = out.v_inf / vnorm;
  const Vec3 d = deviated.r - nominal.r;
  out.b_vec = d - d.dot(u) * u;
  out.b = out.b_vec.norm();
  return out;
}

BPlaneResult impact_parameter(const EquinoctialState& deviated, const EquinoctialState& nominal,
                              const EquinoctialState& earth, double t_impact, double mu_sun) {
  constexpr double kEpochTolerance = 1e-3;
  for (const auto* s : {&deviated, &nominal, &earth}) {
    if (std::abs(s->t - t_impact) > kEpochTolerance) {
      throw std::invalid_argument("impact_parameter: state epoch differs from t_impact");
    }
  }
  return impact_parameter(to_cartesian(deviated, mu_sun), to_cartesian(nominal, mu_sun),
                          to_cartesian(earth, mu_sun));
}

}  // namespace deflect
