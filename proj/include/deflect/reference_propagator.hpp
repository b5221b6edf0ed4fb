#pragma once

// High-order adaptive Runge-Kutta integration of the Cartesian two-body
// problem plus a thrust acceleration. Used as the independent accuracy
// reference for the analytic arc propagator.

#include <cstddef>
#include <functional>

#include "deflect/orbital.hpp"

namespace deflect {

/// Thrust acceleration [km/s^2] and the rate of one scalar auxiliary state
/// (e.g. a contamination layer thickness) integrated alongside the orbit.
struct OracleForce {
  Vec3 accel = Vec3::Zero();
  double aux_rate = 0.0;
};

/// (time since start [s], Cartesian state, auxiliary state) -> force.
using OracleForceFn = std::function<OracleForce(double, const CartesianState&, double)>;

struct ReferenceOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;  // applied to every component
  double initial_step = 3600.0;
  // When false only the thrusted trajectory is integrated and the nominal
  // one is obtained from the analytic two-body solution (the conventional
  // set-up, cheaper per step but without error cancellation).
  bool coupled_nominal = true;
};

struct ReferenceResult {
  CartesianState deviated;
  CartesianState nominal;  // same initial state, no thrust, same step sequence
  double aux = 0.0;
  std::size_t steps = 0;
};

/// Integrates the thrusted and the unthrusted trajectories from the same
/// initial state in one coupled system so that their truncation errors
/// largely cancel in the difference.
ReferenceResult rk_propagate(const CartesianState& s0, double duration, const OracleForceFn& force,
                             double mu, const ReferenceOptions& opts = {}, double aux0 = 0.0);

}  // namespace deflect
