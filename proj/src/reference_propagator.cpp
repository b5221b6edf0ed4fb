#include "deflect/reference_propagator.hpp"

#include <array>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace deflect {

namespace {

// [r_dev, v_dev, aux, r_nom, v_nom]
using State = std::array<double, 13>;
// [r_dev, v_dev, aux]
using SingleState = std::array<double, 7>;

ReferenceResult propagate_single(const CartesianState& s0, double duration,
                                 const OracleForceFn& force, double mu,
                                 const ReferenceOptions& opts, double aux0) {
  namespace odeint = boost::numeric::odeint;
  SingleState x{s0.r[0], s0.r[1], s0.r[2], s0.v[0], s0.v[1], s0.v[2], aux0};
  auto rhs = [&](const SingleState& y, SingleState& dy, double t) {
    CartesianState dev{{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
    const double rd = dev.r.norm();
    const OracleForce f = force(t, dev, y[6]);
    const Vec3 acc = -mu / (rd * rd * rd) * dev.r + f.accel;
    for (int k = 0; k < 3; ++k) {
      dy[k] = y[3 + k];
      dy[3 + k] = acc[k];
    }
    dy[6] = f.aux_rate;
  };
  ReferenceResult out;
  if (duration > 0.0) {
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<SingleState>>(
        opts.abs_tol, opts.rel_tol);
    out.steps = odeint::integrate_adaptive(stepper, rhs, x, 0.0, duration,
                                           std::min(opts.initial_step, duration));
  }
  out.deviated = {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
  out.aux = x[6];
  const EquinoctialState eq0 = from_cartesian(s0, mu, 0.0);
  out.nominal = to_cartesian(kepler_propagate(eq0, duration, mu), mu);
  return out;
}

}  // namespace

ReferenceResult rk_propagate(const CartesianState& s0, double duration, const OracleForceFn& force,
                             double mu, const ReferenceOptions& opts, double aux0) {
  namespace odeint = boost::numeric::odeint;
  if (duration < 0.0) throw std::invalid_argument("rk_propagate: negative duration");
  if (!opts.coupled_nominal) return propagate_single(s0, duration, force, mu, opts, aux0);

  State x{};
  for (int k = 0; k < 3; ++k) {
    x[k] = s0.r[k];
    x[3 + k] = s0.v[k];
    x[7 + k] = s0.r[k];
    x[10 + k] = s0.v[k];
  }
  x[6] = aux0;

  auto rhs = [&](const State& y, State& dy, double t) {
    CartesianState dev{{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
    const Vec3 r_nom(y[7], y[8], y[9]);
    const double rd = dev.r.norm();
    const double rn = r_nom.norm();
    const OracleForce f = force(t, dev, y[6]);
    const Vec3 acc_dev = -mu / (rd * rd * rd) * dev.r + f.accel;
    const Vec3 acc_nom = -mu / (rn * rn * rn) * r_nom;
    for (int k = 0; k < 3; ++k) {
      dy[k] = y[3 + k];
      dy[3 + k] = acc_dev[k];
      dy[7 + k] = y[10 + k];
      dy[10 + k] = acc_nom[k];
    }
    dy[6] = f.aux_rate;
  };

  ReferenceResult out;
  if (duration > 0.0) {
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(opts.abs_tol,
                                                                                 opts.rel_tol);
    out.steps = odeint::integrate_adaptive(stepper, rhs, x, 0.0, duration,
                                           std::min(opts.initial_step, duration));
  }
  out.deviated = {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
  out.aux = x[6];
  out.nominal = {{x[7], x[8], x[9]}, {x[10], x[11], x[12]}};
  return out;
}

}  // namespace deflect
