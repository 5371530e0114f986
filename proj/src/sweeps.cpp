#include "tickwork/sweeps.hpp"

#include <cmath>
#include <numbers>

#include "tickwork/error.hpp"
#include "tickwork/laser.hpp"
#include "tickwork/pendulum.hpp"
#include "tickwork/stochastic.hpp"

namespace tickwork::metrics {

using std::numbers::pi;

TradeoffCurve pendulum_mu_sweep(std::span<const double> mus, double sigma, double Gamma, double horizon, double dt,
                                std::uint64_t seed) {
  std::vector<TradeoffPoint> pts;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const auto p = pendulum::PendulumParams::with_sigma(Gamma, mus[i], 0.0, sigma);
    Rng rng(RngStream{seed, i});
    const auto traj = pendulum::simulate_phase_on_cycle(p, dt, horizon, rng);
    const auto ledger = pendulum::cycle_ledger(traj, p);
    const auto sw = pendulum::kick_switch_times(traj, p);
    TickSeries ticks;
    for (std::size_t n = 0; n < sw.size(); n += 2) ticks.tick_times.push_back(sw[n]);
    ticks.tick_times.resize(ledger.size() + 1);
    ticks.end = horizon;
    const auto rep = accuracy_dissipation_report(ledger, ticks);
    pts.push_back({mus[i], rep.mean_heat, rep.fractional_period_std});
  }
  return tradeoff_curve(std::move(pts));
}

TradeoffCurve laser_nbar_sweep(std::span<const double> n_bars, double kappa, double Omega, double horizon, double dt,
                               std::uint64_t seed) {
  if (!(Omega > 0.0)) throw ParameterError("Omega must be > 0");
  std::vector<TradeoffPoint> pts;
  for (std::size_t i = 0; i < n_bars.size(); ++i) {
    const double G = laser::phase_diffusion_rate(kappa, n_bars[i]);
    Rng rng(RngStream{seed, i});
    const auto traj = laser::simulate_phase(G, dt, horizon, rng, Omega);
    const auto phi = traj.column("phi");
    TickSeries ticks;
    ticks.end = horizon;
    std::size_t next = 1;
    for (std::size_t k = 1; k < phi.size(); ++k) {
      const double prog = phi.front() - phi[k], prev = phi.front() - phi[k - 1];
      while (prog >= 2.0 * pi * static_cast<double>(next)) {
        const double level = 2.0 * pi * static_cast<double>(next);
        const double f = prog > prev ? std::clamp((level - prev) / (prog - prev), 0.0, 1.0) : 1.0;
        ticks.tick_times.push_back(traj.times[k - 1] + f * (traj.times[k] - traj.times[k - 1]));
        ++next;
      }
    }
    const auto st = period_statistics(ticks);
    pts.push_back({n_bars[i], kappa * n_bars[i] * st.mean, st.fractional_std});
  }
  return tradeoff_curve(std::move(pts));
}

std::vector<ShuttleSweepPoint> shuttle_chi_sweep(const shuttle::ShuttleParams& base, std::span<const double> chis,
                                                 double dt, double horizon, double transient, double fano_window,
                                                 std::uint64_t seed) {
  if (!(transient >= 0.0 && transient < horizon)) throw ParameterError("transient must lie in [0, horizon)");
  auto out = run_ensemble(chis.size(), seed, [&](Rng& rng, std::size_t i) {
    auto p = base;
    p.chi = chis[i];
    const std::size_t every = 10;
    const auto run = shuttle::simulate_shuttle_trajectory(p, dt, horizon, rng, {0.0, {0.1, 0.0}}, every);
    ShuttleSweepPoint pt;
    pt.chi = p.chi;
    const auto X = run.trajectory.column("X");
    const auto Y = run.trajectory.column("Y");
    std::size_t n = 0;
    for (std::size_t k = 0; k < X.size(); ++k) {
      if (run.trajectory.times[k] < transient) continue;
      pt.mean_energy += 0.5 * (X[k] * X[k] + Y[k] * Y[k]);
      ++n;
    }
    pt.mean_energy /= static_cast<double>(n);
    pt.heat_per_cycle = p.kappa * pt.mean_energy * 2.0 * pi / p.nu;
    TickSeries ticks;
    for (double t : run.events.times(EventLabel::tunnel_right))
      if (t >= transient) ticks.tick_times.push_back(t);
    ticks.start = transient;
    ticks.end = horizon;
    const auto st = period_statistics(ticks, fano_window);
    pt.fractional_std = st.fractional_std;
    pt.fano = st.fano;
    return pt;
  });
  return out;
}

TradeoffCurve shuttle_tradeoff(const std::vector<ShuttleSweepPoint>& sweep) {
  std::vector<TradeoffPoint> pts;
  for (const auto& s : sweep) pts.push_back({s.chi, s.heat_per_cycle, s.fractional_std});
  return tradeoff_curve(std::move(pts));
}

}  // namespace tickwork::metrics
