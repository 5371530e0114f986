#include "tickwork/pendulum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "tickwork/error.hpp"
#include "tickwork/stochastic.hpp"

namespace tickwork::pendulum {

namespace {

using std::numbers::pi;

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

std::map<std::string, double> provenance(const PendulumParams& p) {
  return {{"Gamma", p.Gamma}, {"mu", p.mu},         {"psi0", p.psi0},
          {"sigma", p.sigma}, {"Dprime", p.Dprime}, {"omega_tilde", p.omega_tilde}};
}

// Value of a piecewise-linear cumulative integral at time t on a uniform grid.
double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t) {
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  auto i = static_cast<std::size_t>((t - times.front()) / h);
  i = std::min(i, times.size() - 2);
  const double f = (t - times[i]) / h;
  return values[i] + f * (values[i + 1] - values[i]);
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& times, const std::vector<double>& rate) {
  std::vector<double> out(rate.size(), 0.0);
  for (std::size_t i = 1; i < rate.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (rate[i] + rate[i - 1]) * (times[i] - times[i - 1]);
  return out;
}

template <class WorkAt>
CycleLedger ledger_from_ticks(const std::vector<double>& ticks, WorkAt&& work_at, const PendulumParams& p) {
  CycleLedger ledger;
  ledger.heat_convention = "nominal";  // Q = W / Gamma
  ledger.params = provenance(p);
  for (std::size_t k = 1; k < ticks.size(); ++k) {
    CycleLedger::Entry e;
    e.period = ticks[k] - ticks[k - 1];
    e.work = work_at(ticks[k]) - work_at(ticks[k - 1]);
    e.heat = e.work / p.Gamma;
    ledger.entries.push_back(e);
  }
  return ledger;
}

}  // namespace

void PendulumParams::validate() const {
  if (!(Gamma > 0.0)) throw ParameterError("Gamma must be > 0");
  if (!(mu >= 0.0)) throw ParameterError("mu must be >= 0");
  if (!(std::abs(psi0) < pi / 2)) throw ParameterError("|psi0| must be < pi/2");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  if (!(Dprime >= 0.0)) throw ParameterError("Dprime must be >= 0");
  if (!(omega_tilde > 0.0)) throw ParameterError("omega_tilde must be > 0");
}

double PendulumParams::sigma_from_dprime(double Dprime) {
  if (Dprime < 0.0) throw ParameterError("Dprime must be >= 0");
  return std::sqrt(Dprime / 2.0);
}

PendulumParams PendulumParams::with_sigma(double Gamma, double mu, double psi0, double sigma) {
  PendulumParams p;
  p.Gamma = Gamma;
  p.mu = mu;
  p.psi0 = psi0;
  p.sigma = sigma;
  p.Dprime = 2.0 * sigma * sigma;
  p.validate();
  return p;
}

double natural_frequency(const PhysicalPendulum& p) {
  if (!(p.gravity > 0.0) || !(p.length > 0.0)) throw ParameterError("gravity and length must be > 0");
  return std::sqrt(p.gravity / p.length);
}

double diffusion_constant(const PhysicalPendulum& p) {
  return 2.0 * p.mass * p.damping * p.boltzmann * p.temperature;
}

PendulumParams PendulumParams::from_physical(const PhysicalPendulum& phys) {
  if (!(phys.mass > 0.0) || !(phys.damping > 0.0) || !(phys.temperature >= 0.0))
    throw ParameterError("mass, damping must be > 0 and temperature >= 0");
  const double omega = natural_frequency(phys);
  PendulumParams p;
  p.Gamma = phys.damping / (phys.mass * omega * omega * phys.length);
  p.mu = phys.mu;
  p.psi0 = phys.psi0;
  p.Dprime = 2.0 * omega * phys.damping * phys.boltzmann * phys.temperature / (phys.mass * phys.gravity * phys.gravity);
  p.sigma = sigma_from_dprime(p.Dprime);
  p.validate();
  return p;
}

double kick_force(double x, double y, const PendulumParams& p) {
  return -p.mu * sgn(std::sin(p.psi0) * x - std::cos(p.psi0) * y);
}

Trajectory simulate_pendulum(const PendulumParams& p, double dt, double horizon, Rng& rng,
                             const LangevinOptions& opts) {
  p.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (!(dt < 0.01 / std::max({1.0, p.Gamma, p.mu})))
    throw ParameterError("dt must be < 0.01/max(1, Gamma, mu)");
  if (opts.record_every == 0) throw ParameterError("record_every must be >= 1");

  using State = std::array<double, 2>;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double noise = std::sqrt(p.Dprime);
  const double sq = std::sqrt(dt);

  Trajectory traj({"x", "y", "K"});
  traj.params = provenance(p);
  traj.seed = rng.id();
  traj.reserve(steps / opts.record_every + 1);

  State s{opts.x0, opts.y0};
  auto push = [&](double t) {
    const std::array<double, 3> row{s[0], s[1], kick_force(s[0], s[1], p)};
    traj.append(t, row);
  };
  push(0.0);

  auto drift = [&p](const State& v) {
    return State{v[1], -v[0] - p.Gamma * v[1] + kick_force(v[0], v[1], p)};
  };
  auto diffusion = [noise](const State&) { return State{0.0, noise}; };

  for (std::size_t k = 0; k < steps; ++k) {
    const State dW{0.0, noise > 0.0 ? sq * rng.normal() : 0.0};
    s = ito_step(s, drift, diffusion, dt, dW, k, static_cast<double>(k) * dt);
    if ((k + 1) % opts.record_every == 0) push(static_cast<double>(k + 1) * dt);
  }
  return traj;
}

double limit_cycle_radius(const PendulumParams& p, bool with_noise, NoisyRadius variant) {
  if (!(p.Gamma > 0.0)) throw ParameterError("Gamma must be > 0");
  const double c = std::cos(p.psi0);
  if (!with_noise) return 4.0 * p.mu * c / (pi * p.Gamma);
  const double a = 2.0 * p.mu * c / pi;
  switch (variant) {
    case NoisyRadius::printed:
      return a / p.Gamma + std::sqrt(a * a / (p.Gamma * p.Gamma) + p.Dprime / 4.0);
    case NoisyRadius::quadratic_root:
      return (a + std::sqrt(a * a + p.Gamma * p.Dprime / 2.0)) / p.Gamma;
  }
  return NAN;
}

double mean_cycle_energy(const PendulumParams& p) {
  const double c = std::cos(p.psi0);
  return 8.0 * p.mu * p.mu * c * c / (p.Gamma * p.Gamma * pi * pi);
}

double energy_rate(double E, const PendulumParams& p) {
  if (E < 0.0) throw ParameterError("energy must be >= 0");
  return -p.Gamma * E + 2.0 * std::sqrt(2.0 * E) * p.mu * std::cos(p.psi0) / pi;
}

Trajectory simulate_phase_on_cycle(const PendulumParams& p, double dt, double horizon, Rng& rng,
                                   std::size_t record_every) {
  p.validate();
  const double r_star = limit_cycle_radius(p, false);
  if (!(r_star > 0.0)) throw ParameterError("limit-cycle radius must be > 0 (mu > 0)");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");

  using State = std::array<double, 1>;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double amp = p.sigma / r_star;
  const double sq = std::sqrt(dt);

  Trajectory traj({"psi", "K"});
  traj.params = provenance(p);
  traj.params["r_star"] = r_star;
  traj.seed = rng.id();
  traj.reserve(steps / record_every + 1);

  State psi{-pi / 2.0 - p.psi0};
  auto push = [&](double t) {
    const std::array<double, 2> row{psi[0], -p.mu * sgn(std::cos(psi[0] + p.psi0))};
    traj.append(t, row);
  };
  push(0.0);

  auto drift = [&p](const State&) { return State{-p.omega_tilde}; };
  auto diffusion = [amp](const State&) { return State{amp}; };
  for (std::size_t k = 0; k < steps; ++k) {
    const State dW{amp > 0.0 ? sq * rng.normal() : 0.0};
    psi = ito_step(psi, drift, diffusion, dt, dW, k, static_cast<double>(k) * dt);
    if ((k + 1) % record_every == 0) push(static_cast<double>(k + 1) * dt);
  }
  return traj;
}

std::vector<double> kick_switch_times(const Trajectory& phase_traj, const PendulumParams& p) {
  (void)p;
  const auto psi = phase_traj.column("psi");
  const auto& t = phase_traj.times;
  std::vector<double> out;
  if (psi.empty()) return out;
  out.push_back(t.front());
  std::size_t next = 1;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    // phase progress psi(0) - psi(t); the previous sample is below `level`
    // because every earlier crossing has already been consumed
    const double prog = psi.front() - psi[i];
    const double prev_prog = psi.front() - psi[i - 1];
    while (prog >= static_cast<double>(next) * pi) {
      const double level = static_cast<double>(next) * pi;
      double f = (prog > prev_prog) ? (level - prev_prog) / (prog - prev_prog) : 1.0;
      f = std::clamp(f, 0.0, 1.0);
      out.push_back(t[i - 1] + f * (t[i] - t[i - 1]));
      ++next;
    }
  }
  return out;
}

double mean_kick_signal(double t, const PendulumParams& p) {
  if (p.psi0 != 0.0) throw UnsupportedCase("mean_kick_signal is only derived for psi0 = 0");
  if (t < 0.0) throw ParameterError("t must be >= 0");
  const double r_star = limit_cycle_radius(p, false);
  const double w = p.omega_tilde * t;
  const double spread = p.sigma * p.sigma * t / (2.0 * r_star * r_star);
  if (spread == 0.0) {
    // Limit of the undamped series: the square wave mu sign(sin w t).
    return p.mu * sgn(std::sin(w));
  }
  constexpr std::size_t max_terms = 10'000'000;
  double sum = 0.0;
  for (std::size_t k = 1; k <= max_terms; ++k) {
    const double m = static_cast<double>(2 * k - 1);
    const double envelope = std::exp(-spread * m * m);
    if (envelope < 1e-12) break;
    sum += envelope * std::sin(m * w) / m;
  }
  return 4.0 * p.mu / pi * sum;
}

CycleLedger cycle_ledger(const Trajectory& phase_traj, const PendulumParams& p) {
  p.validate();
  const double r_star = limit_cycle_radius(p, false);
  const auto psi = phase_traj.column("psi");
  const auto& t = phase_traj.times;
  auto kick = [&p](double v) { return -p.mu * sgn(std::cos(v + p.psi0)); };
  auto power = [&](double v, double k) { return k * (-r_star * std::cos(v)); };

  // Trapezoid rule over the first fraction f of step i, with the step split
  // at the linearly interpolated switch phase when K changes inside it.
  auto partial = [&](std::size_t i, double f) {
    const double a = psi[i - 1], h = t[i] - t[i - 1];
    const double b = a + f * (psi[i] - a);
    const double ka = kick(a), kb = kick(b);
    if (ka == kb || a == b) return 0.5 * (power(a, ka) + power(b, kb)) * f * h;
    const double m = std::floor(std::max(a, b) / pi + p.psi0 / pi - 0.5);
    const double s = (m + 0.5) * pi - p.psi0;
    const double g = std::clamp((s - a) / (b - a), 0.0, 1.0);
    return (0.5 * (power(a, ka) + power(s, ka)) * g + 0.5 * (power(s, kb) + power(b, kb)) * (1.0 - g)) * f * h;
  };
  std::vector<double> work(psi.size(), 0.0);
  for (std::size_t i = 1; i < psi.size(); ++i) work[i] = work[i - 1] + partial(i, 1.0);

  auto work_at = [&](double tau) {
    if (tau <= t.front()) return 0.0;
    if (tau >= t.back()) return work.back();
    const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    auto i = static_cast<std::size_t>((tau - t.front()) / h) + 1;
    i = std::min(i, t.size() - 1);
    return work[i - 1] + partial(i, std::clamp((tau - t[i - 1]) / (t[i] - t[i - 1]), 0.0, 1.0));
  };

  const auto switches = kick_switch_times(phase_traj, p);
  std::vector<double> ticks;
  for (std::size_t n = 0; n < switches.size(); n += 2) ticks.push_back(switches[n]);
  return ledger_from_ticks(ticks, work_at, p);
}

CycleLedger langevin_cycle_ledger(const Trajectory& traj, const PendulumParams& p) {
  p.validate();
  const auto y = traj.column("y");
  const auto K = traj.column("K");
  std::vector<double> power(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) power[i] = K[i] * y[i];
  const auto work = cumulative_trapezoid(traj.times, power);

  std::vector<double> ticks;
  for (std::size_t i = 1; i < K.size(); ++i)
    if (K[i - 1] < 0.0 && K[i] > 0.0) ticks.push_back(0.5 * (traj.times[i - 1] + traj.times[i]));
  return ledger_from_ticks(ticks, [&](double tau) { return interpolate(traj.times, work, tau); }, p);
}

PowerBalance power_balance(const Trajectory& traj, const PendulumParams& p, double t_from) {
  const auto y = traj.column("y");
  const auto K = traj.column("K");
  PowerBalance out;
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (traj.times[i] < t_from) continue;
    out.escapement += K[i] * y[i];
    out.dissipated += p.Gamma * y[i] * y[i];
    ++n;
  }
  if (n == 0) throw InsufficientData("no samples after t_from");
  out.escapement /= static_cast<double>(n);
  out.dissipated /= static_cast<double>(n);
  return out;
}

double oscillation_amplitude(const Trajectory& traj, double t_from) {
  const auto x = traj.column("x");
  std::vector<std::size_t> ups;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (traj.times[i] >= t_from && x[i - 1] < 0.0 && x[i] >= 0.0) ups.push_back(i);
  if (ups.size() < 2) throw InsufficientData("fewer than two oscillation cycles after t_from");
  double sum = 0.0;
  for (std::size_t k = 1; k < ups.size(); ++k)
    sum += *std::max_element(x.begin() + static_cast<std::ptrdiff_t>(ups[k - 1]),
                             x.begin() + static_cast<std::ptrdiff_t>(ups[k]));
  return sum / static_cast<double>(ups.size() - 1);
}

}  // namespace tickwork::pendulum
