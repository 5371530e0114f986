#pragma once

#include <vector>

#include "tickwork/ledger.hpp"
#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::pendulum {

/// Physical (SI) description of an escapement pendulum.
struct PhysicalPendulum {
  double mass = 1.0;         // m [kg]
  double length = 1.0;       // l [m]
  double damping = 0.1;      // gamma [1/s]
  double temperature = 300;  // T [K]
  double gravity = 9.80665;  // g [m/s^2]
  double boltzmann = 1.380649e-23;
  double mu = 0.1;    // kick magnitude (scaled)
  double psi0 = 0.0;  // escapement design angle [rad]
};

/// Scaled-unit parameters of the kicked pendulum (time in units of 1/omega).
struct PendulumParams {
  double Gamma = 0.1;        // damping
  double mu = 0.1;           // kick magnitude
  double psi0 = 0.0;         // escapement design angle, |psi0| < pi/2
  double sigma = 0.0;        // on-cycle noise amplitude
  double Dprime = 0.0;       // diffusion constant of the scaled Langevin force
  double omega_tilde = 1.0;  // on-cycle angular frequency

  /// Throws ParameterError if an invariant is violated.
  void validate() const;

  /// On-cycle noise amplitude implied by D': sigma = sqrt(D'/2).
  static double sigma_from_dprime(double Dprime);
  /// Parameters with sigma set and D' = 2 sigma^2.
  static PendulumParams with_sigma(double Gamma, double mu, double psi0, double sigma);
  /// Scaled parameters from physical ones, with Gamma = gamma/(m omega^2 l) and
  /// D' = 2 omega gamma kB T / (m g^2).
  static PendulumParams from_physical(const PhysicalPendulum& p);
};

/// Force-noise strength D = 2 m gamma kB T of the dimensional Langevin equation.
double diffusion_constant(const PhysicalPendulum& p);
/// omega = sqrt(g / l).
double natural_frequency(const PhysicalPendulum& p);

/// Escapement kick K(x, y) = -mu sign(sin psi0 x - cos psi0 y).
double kick_force(double x, double y, const PendulumParams& p);

struct LangevinOptions {
  double x0 = 0.1;
  double y0 = 0.0;
  std::size_t record_every = 1;
};

/// Euler-Maruyama integration of x' = y, y' = -x - Gamma y + K(x, y) + noise,
/// with the noise entering y as sqrt(D') dW. Components: x, y, K.
Trajectory simulate_pendulum(const PendulumParams& p, double dt, double horizon, Rng& rng,
                             const LangevinOptions& opts = {});

enum class NoisyRadius {
  printed,         // r = 2 mu c/(pi Gamma) + sqrt(4 mu^2 c^2/(pi^2 Gamma^2) + D'/4)
  quadratic_root,  // positive root of Gamma r^2/2 - 2 mu c r/pi - D'/4 = 0
};

/// Radial fixed point of the phase-averaged dynamics, c = cos psi0.
double limit_cycle_radius(const PendulumParams& p, bool with_noise, NoisyRadius variant = NoisyRadius::printed);

/// Mean on-cycle energy r*^2/2 = 8 mu^2 cos^2 psi0 / (Gamma^2 pi^2).
double mean_cycle_energy(const PendulumParams& p);

/// Phase-averaged energy rate -Gamma E + 2 sqrt(2E) mu cos psi0 / pi.
double energy_rate(double E, const PendulumParams& p);

/// Phase diffusion on the limit cycle: d psi = -omega_tilde dt + (sigma/r*) dW,
/// with r* the deterministic radius and psi(0) = -pi/2 - psi0 so that t = 0 is
/// a -mu -> +mu switch. Components: psi, K with K = -mu sign(cos(psi + psi0)).
Trajectory simulate_phase_on_cycle(const PendulumParams& p, double dt, double horizon, Rng& rng,
                                   std::size_t record_every = 1);

/// Switch times of K(t) along a phase trajectory. The n-th switch is the first
/// time the phase has advanced by n*pi from its start (first passage), which
/// suppresses chattering re-crossings under noise. Even n are -mu -> +mu.
std::vector<double> kick_switch_times(const Trajectory& phase_traj, const PendulumParams& p);

/// Analytic ensemble mean of K(t) for psi0 = 0 (Fourier series with Gaussian
/// phase-diffusion envelope, truncated once the envelope drops below 1e-12).
double mean_kick_signal(double t, const PendulumParams& p);

/// Per-cycle period, escapement work and heat Q = W/Gamma from a phase
/// trajectory. A cycle runs between consecutive -mu -> +mu switches; work is
/// the trapezoidal integral of the on-cycle power K(t) * y(t) with
/// y(t) = -r* cos psi(t).
CycleLedger cycle_ledger(const Trajectory& phase_traj, const PendulumParams& p);

/// Same bookkeeping on a full (x, y, K) Langevin trajectory: work is the
/// integral of K y between consecutive -mu -> +mu transitions of K.
CycleLedger langevin_cycle_ledger(const Trajectory& traj, const PendulumParams& p);

struct PowerBalance {
  double escapement = 0.0;  // time average of K y
  double dissipated = 0.0;  // time average of Gamma y^2
};

/// Time-averaged powers over samples with t >= t_from.
PowerBalance power_balance(const Trajectory& traj, const PendulumParams& p, double t_from);

/// Oscillation amplitude: mean of the per-cycle maxima of x for t >= t_from.
double oscillation_amplitude(const Trajectory& traj, double t_from);

}  // namespace tickwork::pendulum
