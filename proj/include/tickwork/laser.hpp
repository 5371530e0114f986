#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::laser {

struct LaserParams {
  double G = 100.0;       // small-signal gain
  double n_s = 1.0;       // saturation photon number
  double kappa = 4.0;     // cavity decay rate
  double epsilon = 0.0;   // injected signal amplitude
  double delta = 0.0;     // detuning
  double chi_kerr = 0.0;  // Kerr coefficient
  double eta_det = 1.0;   // detection efficiency
  double dither = 0.0;    // strength of an optional complex Gaussian dither on epsilon

  void validate() const;
};

/// Photon-number distribution over n = 0..n_max.
struct PhotonDistribution {
  std::vector<double> p;

  std::size_t n_max() const noexcept { return p.empty() ? 0 : p.size() - 1; }
  double mean() const;
  double variance() const;
  double fano() const;
  double l1_distance(const PhotonDistribution& other) const;
  /// Throws ParameterError on negative entries or |sum - 1| > 1e-9.
  void check() const;

  static PhotonDistribution vacuum(std::size_t n_max);
};

/// ceil(n + 10 sqrt(n) + 20).
std::size_t default_n_max(double n_bar);

/// Time derivative of p under the birth-death equation, with no births out
/// of n_max.
std::vector<double> birth_death_rate(const PhotonDistribution& p, const LaserParams& params);

/// `steps` RK4 steps of the birth-death equation. Requires
/// dt (G n_s + kappa n_max) < 0.1; throws NumericalBlowup if the total
/// probability drifts by more than 1e-6.
PhotonDistribution evolve_photon_distribution(PhotonDistribution p, const LaserParams& params, double dt,
                                              std::size_t steps);

/// Detailed-balance steady state p_n ~ (G n_s/kappa)^(n+n_s)/(n+n_s)!,
/// evaluated in log space. n_max = 0 selects default_n_max of the
/// above-threshold mean. Throws ParameterError if p(n_max) >= 1e-12.
PhotonDistribution steady_state_distribution(const LaserParams& params, std::size_t n_max = 0);

/// Gamma = kappa / (2 n_bar).
double phase_diffusion_rate(double kappa, double n_bar);

/// g1(tau) = exp(-kappa tau / (4 n_bar)).
double g1_correlation(double tau, double kappa, double n_bar);

/// d phi = -Omega dt + sqrt(Gamma) dW. Component: phi.
Trajectory simulate_phase(double Gamma, double dt, double horizon, Rng& rng, double Omega = 0.0,
                          std::size_t record_every = 1);

/// Semiclassical amplitude flow
///   alpha' = -i eps - i (delta + 2 chi |alpha|^2) alpha
///            - (kappa alpha / 2)(1 - G n_s / (kappa (|alpha|^2 + n_s))).
/// With kerr = false, epsilon, delta and chi are ignored (plain laser).
/// Components: re, im.
Trajectory simulate_semiclassical(const LaserParams& params, double dt, double horizon, Rng& rng, bool kerr,
                                  std::complex<double> alpha0 = {0.1, 0.0}, std::size_t record_every = 1);

/// Fixed point |alpha|^2 = G n_s / kappa - n_s of the plain flow (0 below threshold).
double semiclassical_intensity(const LaserParams& params);

/// Angular frequency of a component from its rising zero crossings after t_from.
double oscillation_frequency(const Trajectory& traj, std::string_view component, double t_from);

/// E' = -kappa E + kappa n_bar.
double energy_balance_rate(double E, double kappa, double n_bar);

}  // namespace tickwork::laser
