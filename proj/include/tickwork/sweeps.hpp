#pragma once

#include <cstdint>
#include <span>

#include "tickwork/metrics.hpp"
#include "tickwork/shuttle.hpp"

namespace tickwork::metrics {

/// Pendulum on its limit cycle (phase model, sigma fixed, mu swept). Each
/// point: mean heat per cycle and fractional period std from one run.
TradeoffCurve pendulum_mu_sweep(std::span<const double> mus, double sigma, double Gamma, double horizon, double dt,
                                std::uint64_t seed);

/// Laser phase clock with Gamma = kappa / (2 n_bar) and carrier Omega. Ticks
/// are first passages of the phase through multiples of 2 pi. Each point:
/// kappa n_bar times the mean period, and the fractional period std.
TradeoffCurve laser_nbar_sweep(std::span<const double> n_bars, double kappa, double Omega, double horizon, double dt,
                               std::uint64_t seed);

struct ShuttleSweepPoint {
  double chi = 0.0;
  double mean_energy = 0.0;      // time average of (X^2 + Y^2)/2
  double heat_per_cycle = 0.0;   // kappa <E> 2 pi / nu
  double fractional_std = 0.0;   // of tunnel-right intervals
  double fano = 0.0;             // tunnel-right counts in windows of `fano_window`
};

/// Trajectory-mode shuttle at each chi. The first `transient` time units are discarded.
std::vector<ShuttleSweepPoint> shuttle_chi_sweep(const shuttle::ShuttleParams& base, std::span<const double> chis,
                                                 double dt, double horizon, double transient, double fano_window,
                                                 std::uint64_t seed);
/// Tradeoff curve (heat per cycle, fractional std) of a shuttle sweep.
TradeoffCurve shuttle_tradeoff(const std::vector<ShuttleSweepPoint>& sweep);

}  // namespace tickwork::metrics
