#pragma once

#include <utility>

#include "tickwork/error.hpp"
#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::quartz {

/// The gain curve has no turning points (beta <= 1).
class NoHysteresis : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Schmitt trigger coupled to a quartz LC resonator; saturation voltage is 1.
struct QuartzParams {
  double gamma = 0.1;  // trigger relaxation rate
  double eta = 8.0;    // input sensitivity
  double beta = 1.0;   // feedback gain
  double omega = 1.0;  // LC natural frequency
  double kappa = 1.0;  // LC damping
  double chi = 5.0;    // trigger -> LC coupling
  double D = 0.0;      // thermal diffusion constant (Johnson noise)

  void validate() const;
};

/// g(V) = (V + tanh(beta V)) / (1 + V tanh(beta V)); |V| < 1.
double schmitt_gain(double V, double beta);

/// Static input-output curve X(V) = -(beta/eta) V + ln((1+V)/(1-V)) / (2 eta).
double steady_input_curve(double V, double beta, double eta);

/// Turning points +-sqrt((beta-1)/beta) of the static curve. Returns (-Vc, +Vc).
std::pair<double, double> hysteresis_thresholds(double beta);

struct QuartzState {
  double V = 0.01;
  double X = 0.0;
  double Y = 0.0;
};

/// V' = gamma (1-g(V)) e^{-eta X} - gamma (1+g(V)) e^{eta X}
/// X' = omega Y
/// dY = (-omega X - kappa Y + chi V) dt + sqrt(D) dW
/// Components: V, X, Y. Throws NumericalBlowup if V leaves (-1, 1).
Trajectory simulate_quartz(const QuartzParams& p, double dt, double horizon, Rng& rng,
                           const QuartzState& initial = {}, std::size_t record_every = 1);

/// Output of the sign-function reduction, -tanh(beta V + eta X).
double reduced_output(double V, double X, const QuartzParams& p);

struct HysteresisSweep {
  double up_switch = 0.0;    // X at which V jumps from the lower to the upper branch
  double down_switch = 0.0;  // X at which V jumps back
};

/// Quasi-static sweep of the input X from -x_max to +x_max and back. At each
/// input value V relaxes under V' = X - X(V) (the outer branches of the static
/// curve are attracting) until converged; a switch is recorded where V
/// changes sign.
HysteresisSweep hysteresis_sweep(double beta, double eta, double x_max = 2.0, double dx = 1e-4);

/// Coupling chi at which the origin loses stability, located by bisection on
/// the growth or decay of a small perturbation of the deterministic system.
double hopf_threshold(QuartzParams p, double chi_lo, double chi_hi, double tol = 1e-3, double dt = 1e-3,
                      double horizon = 400.0);

}  // namespace tickwork::quartz
