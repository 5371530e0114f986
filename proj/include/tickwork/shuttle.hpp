#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "tickwork/error.hpp"
#include "tickwork/ledger.hpp"
#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::shuttle {

/// e^{mu x^2} = cosh x has no nonzero root (mu >= 1/2).
class NoLimitCycle : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ShuttleParams {
  double gamma_L = 0.1;  // bare tunnelling rate onto the island
  double gamma_R = 0.1;  // bare tunnelling rate off the island
  double nu = 1.0;       // mechanical frequency
  double eta = 1.0;      // tunnelling length scale
  double chi = 1.0;      // electrostatic drive
  double kappa = 0.1;    // mechanical damping

  void validate() const;
};

struct OccupationState {
  double n = 0.0;
  std::complex<double> alpha{0.0, 0.0};  // X + iY
};

struct ShuttleDerivative {
  double dn = 0.0;
  std::complex<double> dalpha{0.0, 0.0};
};

/// dn/dt = gamma_L (1-n) e^{-4 eta X} - gamma_R n e^{4 eta X}
/// dalpha/dt = -i nu alpha - (kappa/2) alpha + i chi n
/// Throws NumericalBlowup when |4 eta X| > 700.
ShuttleDerivative shuttle_drift(const OccupationState& s, const ShuttleParams& p);

/// Magnitude of the mean current, (gamma_L e^{-4 eta X}(1-n) + gamma_R e^{4 eta X} n)/2 in units of e.
double mean_current(const OccupationState& s, const ShuttleParams& p);

/// Mean-field equations by Strang splitting (exact n and alpha sub-flows).
/// Components: n, X, Y, I.
Trajectory simulate_shuttle_ensemble(const ShuttleParams& p, double dt, double horizon,
                                     const OccupationState& initial = {0.0, {0.1, 0.0}}, std::size_t record_every = 1);

struct ShuttleRun {
  Trajectory trajectory;  // n, X, Y
  EventRecord events;     // tunnel-left (0 -> 1), tunnel-right (1 -> 0)
};

/// Piecewise-deterministic realization: n in {0, 1} jumps with rates
/// gamma_L e^{-4 eta X} (n = 0) and gamma_R e^{4 eta X} (n = 1) while alpha
/// follows the drift with the instantaneous n. Jumps fire when the integrated
/// hazard reaches an Exp(1) threshold; the jump time is interpolated within
/// the step.
ShuttleRun simulate_shuttle_trajectory(const ShuttleParams& p, double dt, double horizon, Rng& rng,
                                       const OccupationState& initial = {0.0, {0.1, 0.0}},
                                       std::size_t record_every = 1);

/// Occupation switching under a prescribed cycle X(t) = r* sin(Omega t),
/// sampled exactly by thinning. Symmetric rates are not required here.
EventRecord simulate_gated_tunnelling(const ShuttleParams& p, double r_star, double Omega, double horizon, Rng& rng,
                                      bool initially_occupied = false);

struct TranscendentalRoot {
  double x = 0.0;
  bool stable = false;
};

/// Nonnegative roots of e^{mu x^2} = cosh x in increasing order, with their
/// stability under the averaged energy flow (stable where mu x^2 - ln cosh x
/// increases through zero). Requires 0 < mu < 1/2.
std::vector<TranscendentalRoot> transcendental_roots(double mu);

/// mu = kappa pi / (4 eta chi).
double transcendental_mu(const ShuttleParams& p);

/// Stable nonzero root x/eta. Throws NoLimitCycle when mu >= 1/2.
double limit_cycle_amplitude(const ShuttleParams& p);

/// (lambda_L, lambda_R) = (gamma e^{-4 eta r* sin Omega t}, gamma e^{4 eta r* sin Omega t}).
/// Requires gamma_L == gamma_R.
std::pair<double, double> tunneling_intensities(double t, double r_star, double Omega, const ShuttleParams& p);

/// exp(-int_0^t lambda_R), by adaptive Gauss-Kronrod quadrature.
double waiting_time_survival(double t, const ShuttleParams& p, double r_star, double Omega);

struct CycleWork {
  double work = 0.0;          // 2 chi r* T / pi
  double heat_nominal = 0.0;    // W / kappa
  double heat_balance = 0.0;  // W
};

CycleWork shuttle_cycle_work(double T_k, const ShuttleParams& p, double r_star);

/// Long-run heat (2 chi r* tau / (pi kappa)) gamma_L / (gamma_L + gamma_R).
double average_heat(double tau, const ShuttleParams& p, double r_star);

/// Ledger from a trajectory-mode run: one entry per occupied interval
/// (tunnel-left to the next tunnel-right), W_k = 2 chi r* T_k / pi. The
/// heat column follows `convention` ("nominal" = W/kappa, "balance" = W).
CycleLedger shuttle_ledger(const EventRecord& events, const ShuttleParams& p, double r_star,
                           const std::string& convention = "nominal");

}  // namespace tickwork::shuttle
