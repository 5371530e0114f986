#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::thermal {

// Units: hbar = k_B = 1. Basis order is (|e>, |g>), so sigma_z = diag(1, -1).

struct TlsParams {
  double epsilon = 1.0;     // level splitting
  double gamma = 0.1;       // spontaneous emission rate
  double n_bar = 0.9;       // bath occupation
  double beta = NAN;        // inverse temperature; checked against n_bar when finite
  double Gamma_meas = 5.0;  // measurement rate 4 Delta chi / kappa
  double Delta = 0.0;       // Stark shift 4 chi E^2 / kappa^2
  double chi_disp = NAN;
  double E_drive = NAN;
  double kappa_cav = NAN;
  double eta_det = 1.0;

  void validate() const;

  /// n_bar = 1/(e^{beta eps} - 1).
  static double occupation(double beta, double epsilon);
  TlsParams with_temperature(double beta_) const;
  /// Fills Delta and Gamma_meas from the readout cavity.
  TlsParams with_readout(double chi, double E, double kappa) const;
};

/// 2x2 density matrix.
struct DensityMatrix {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity() / 2.0;

  static DensityMatrix excited();
  static DensityMatrix ground();
  static DensityMatrix from_bloch(double x, double y, double z);

  double p_excited() const { return m(0, 0).real(); }
  double sigma_z() const { return (m(0, 0) - m(1, 1)).real(); }
  std::complex<double> coherence() const { return m(0, 1); }
  /// Throws ParameterError on Hermiticity > 1e-10, |tr - 1| > 1e-9 or an
  /// eigenvalue below -1e-10.
  void check() const;
};

struct EstimateRecord {
  double estimate = 0.0;
  double relative_error = NAN;  // NaN when undefined
  bool error_defined = false;
  std::map<std::string, double> inputs;
};

/// t_est = N / gamma with relative error 1/sqrt(N). N = 0 gives estimate 0
/// with the error flagged undefined.
EstimateRecord radiocarbon_estimate(double N, double gamma);

/// Number of events of a rate-`rate` Poisson process on [0, t].
std::size_t poisson_count(double rate, double t, Rng& rng);

struct MachState {
  std::array<double, 3> T{};
  double time = 0.0;
};

/// Three equal bodies with all-to-all Newton cooling dT_i/dt = k sum_j (T_j - T_i),
/// integrated by RK4 to time t.
MachState mach_clock(const std::array<double, 3>& T_init, double k, double t, double dt = 1e-3);
/// Components T1, T2, T3.
Trajectory mach_trajectory(const std::array<double, 3>& T_init, double k, double dt, double horizon,
                           std::size_t record_every = 1);
/// tau = -ln((Tbar - T1)/A) / (3k) with A = Tbar - T1(0). Equal initial
/// temperatures make A = 0 and the returned record carries error_defined = false.
/// relative_error is 1/(3 k tau), the fractional error in tau per unit
/// fractional error in Tbar - T1.
EstimateRecord mach_elapsed_time(const std::array<double, 3>& T_init, double k, double T1);

/// t_est = N / (gamma n_bar), or eps N / (gamma T) with `high_temperature`.
/// Throws DomainError when n_bar = 0.
EstimateRecord tls_time_estimate(double N, const TlsParams& p, bool high_temperature = false);
/// T_est = eps N / (gamma t).
EstimateRecord tls_temperature_estimate(double N, double t, const TlsParams& p);
/// eps N / gamma, the fixed value of t_est * T_est.
double tls_duality_constant(double N, const TlsParams& p);

/// Telegraph record of the TLS: up at gamma n_bar, down at gamma (n_bar + 1).
EventRecord simulate_tls_telegraph(const TlsParams& p, double horizon, Rng& rng, bool initially_excited = false);
/// Stationary transition rate gamma n_bar p_g + gamma (n_bar + 1) p_e.
double tls_transition_rate(const TlsParams& p);
/// Stationary excited fraction n_bar / (2 n_bar + 1).
double tls_excited_fraction(const TlsParams& p);

DensityMatrix thermal_state(double beta, double epsilon);

struct ReadoutOptions {
  DensityMatrix initial = DensityMatrix::ground();
  std::size_t record_every = 1;
};

/// Conditional master equation of the dispersively measured TLS:
///   d rho = -i(Delta + eps)[sz, rho] dt + gamma(N+1) D[s-] rho dt + gamma N D[s+] rho dt
///         + Gamma D[sz] rho dt + sqrt(eta Gamma) H[sz] rho dW
/// stepped in Kraus form (Rouchon-Ralph), which keeps rho positive. Current
/// I dt = <sz> dt + dW / sqrt(eta Gamma), averaged over each record block.
/// Components: rho_ee, re_rho_eg, im_rho_eg, sz, current.
Trajectory simulate_readout_trajectory(const TlsParams& p, double dt, double horizon, Rng& rng,
                                       const ReadoutOptions& opts = {});

/// Unconditional master equation (RK4). Components: rho_ee, re_rho_eg, im_rho_eg, sz.
Trajectory unconditional_master_equation(const TlsParams& p, const DensityMatrix& rho0, double dt, double horizon,
                                         std::size_t record_every = 1);

struct JumpDetection {
  EventRecord events;  // jump_up / jump_down
  bool initial_up = false;
  std::vector<double> filtered;
  std::vector<std::string> warnings;
};

/// Centred boxcar of width `window` (time units) over a uniformly sampled
/// current, thresholded at `threshold`. A jump is accepted once the filtered
/// current passes threshold -+ hysteresis and is timed at the last threshold
/// crossing (linear interpolation). Warns when the window exceeds the mean
/// detected dwell time, or `expected_dwell` when that is given.
JumpDetection detect_jumps(std::span<const double> times, std::span<const double> current, double window,
                           double threshold = 0.0, double hysteresis = 0.5, double expected_dwell = NAN);
/// Default window 4 / (eta Gamma).
double default_jump_window(const TlsParams& p);
/// Mean of the two stationary dwell times.
double mean_dwell_time(const TlsParams& p);

/// T0 sqrt(g44).
double tolman_product(double T0, double g44);
/// T0 sqrt(1 - v^2/c^2).
double moving_temperature(double T0, double v, double c = 1.0);

/// One step of d rho/dt = r (U rho U^dag - rho), r = gamma n_bar,
/// U = exp(-i H / r), solved exactly in the eigenbasis of H. d <= 8.
Eigen::MatrixXcd thermal_time_step(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& H, double gamma,
                                   double n_bar, double dt);

}  // namespace tickwork::thermal
