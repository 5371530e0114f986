#include "tickwork/quartz.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tickwork/stochastic.hpp"

namespace tickwork::quartz {

void QuartzParams::validate() const {
  if (!(gamma > 0.0) || !(eta > 0.0) || !(omega > 0.0) || !(kappa > 0.0))
    throw ParameterError("gamma, eta, omega and kappa must be > 0");
  if (!(beta >= 0.0)) throw ParameterError("beta must be >= 0");
  if (!(chi >= 0.0)) throw ParameterError("chi must be >= 0");
  if (!(D >= 0.0)) throw ParameterError("D must be >= 0");
}

double schmitt_gain(double V, double beta) {
  if (!(std::abs(V) < 1.0)) throw DomainError("schmitt_gain: |V| must be < 1");
  const double t = std::tanh(beta * V);
  return (V + t) / (1.0 + V * t);
}

double steady_input_curve(double V, double beta, double eta) {
  if (!(std::abs(V) < 1.0)) throw DomainError("steady_input_curve: |V| must be < 1");
  if (!(eta > 0.0)) throw ParameterError("eta must be > 0");
  return -(beta / eta) * V + std::atanh(V) / eta;
}

std::pair<double, double> hysteresis_thresholds(double beta) {
  if (!(beta > 1.0)) throw NoHysteresis("no hysteresis for beta <= 1");
  const double vc = std::sqrt((beta - 1.0) / beta);
  return {-vc, vc};
}

double reduced_output(double V, double X, const QuartzParams& p) { return -std::tanh(p.beta * V + p.eta * X); }

Trajectory simulate_quartz(const QuartzParams& p, double dt, double horizon, Rng& rng, const QuartzState& initial,
                           std::size_t record_every) {
  p.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (!(dt * p.gamma < 0.1)) throw ParameterError("dt must be well below 1/gamma");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  if (!(std::abs(initial.V) < 1.0)) throw ParameterError("initial |V| must be < 1");

  using State = std::array<double, 3>;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double noise = std::sqrt(p.D);
  const double sq = std::sqrt(dt);

  Trajectory traj({"V", "X", "Y"});
  traj.params = {{"gamma", p.gamma}, {"eta", p.eta},     {"beta", p.beta}, {"omega", p.omega},
                 {"kappa", p.kappa}, {"chi", p.chi}, {"D", p.D}};
  traj.seed = rng.id();
  traj.reserve(steps / record_every + 1);

  State s{initial.V, initial.X, initial.Y};
  traj.append(0.0, s);

  std::size_t k = 0;
  auto drift = [&](const State& v) {
    if (!(std::abs(v[0]) < 1.0)) throw NumericalBlowup("trigger output left (-1, 1)", k, static_cast<double>(k) * dt);
    const double g = schmitt_gain(v[0], p.beta);
    const double e = std::exp(p.eta * v[1]);
    return State{p.gamma * (1.0 - g) / e - p.gamma * (1.0 + g) * e, p.omega * v[2],
                 -p.omega * v[1] - p.kappa * v[2] + p.chi * v[0]};
  };
  auto diffusion = [noise](const State&) { return State{0.0, 0.0, noise}; };

  for (; k < steps; ++k) {
    const State dW{0.0, 0.0, noise > 0.0 ? sq * rng.normal() : 0.0};
    s = ito_step(s, drift, diffusion, dt, dW, k, static_cast<double>(k) * dt);
    if (!(std::abs(s[0]) < 1.0))
      throw NumericalBlowup("trigger output left (-1, 1)", k, static_cast<double>(k + 1) * dt);
    if ((k + 1) % record_every == 0) traj.append(static_cast<double>(k + 1) * dt, s);
  }
  return traj;
}

HysteresisSweep hysteresis_sweep(double beta, double eta, double x_max, double dx) {
  if (!(eta > 0.0) || !(x_max > 0.0) || !(dx > 0.0)) throw ParameterError("eta, x_max and dx must be > 0");
  hysteresis_thresholds(beta);

  // Relax in u = atanh(V), where the static curve is (u - beta tanh u)/eta
  // with slope at most 1/eta, so a pseudo-time step of eta is stable.
  auto curve = [&](double u) { return (u - beta * std::tanh(u)) / eta; };
  auto relax = [&](double u, double X) {
    for (int it = 0; it < 100000; ++it) {
      const double r = X - curve(u);
      u += eta * r;
      if (std::abs(r) < 1e-13) break;
    }
    return u;
  };

  HysteresisSweep out{NAN, NAN};
  const auto n = static_cast<long>(std::ceil(x_max / dx));
  double u = relax(-20.0, -x_max);
  for (long i = -n; i <= n; ++i) {
    const double X = static_cast<double>(i) * dx;
    const double prev = u;
    u = relax(u, X);
    if (prev < 0.0 && u >= 0.0 && std::isnan(out.up_switch)) out.up_switch = X;
  }
  for (long i = n; i >= -n; --i) {
    const double X = static_cast<double>(i) * dx;
    const double prev = u;
    u = relax(u, X);
    if (prev > 0.0 && u <= 0.0 && std::isnan(out.down_switch)) out.down_switch = X;
  }
  if (std::isnan(out.up_switch) || std::isnan(out.down_switch))
    throw InsufficientData("sweep range does not cover both switching points");
  return out;
}

double hopf_threshold(QuartzParams p, double chi_lo, double chi_hi, double tol, double dt, double horizon) {
  p.D = 0.0;
  auto grows = [&](double chi) {
    p.chi = chi;
    Rng rng(RngStream{0, 0});
    QuartzState init{0.0, 1e-3, 0.0};
    const auto x = simulate_quartz(p, dt, horizon, rng, init).column("X");
    const std::size_t n = x.size();
    double early = 0.0, late = 0.0;
    for (std::size_t i = n / 4; i < n / 2; ++i) early = std::max(early, std::abs(x[i]));
    for (std::size_t i = 3 * n / 4; i < n; ++i) late = std::max(late, std::abs(x[i]));
    return late > early || late > 10.0 * init.X;
  };
  if (grows(chi_lo) || !grows(chi_hi)) throw ParameterError("hopf_threshold: bracket does not contain the threshold");
  while (chi_hi - chi_lo > tol) {
    const double mid = 0.5 * (chi_lo + chi_hi);
    (grows(mid) ? chi_hi : chi_lo) = mid;
  }
  return 0.5 * (chi_lo + chi_hi);
}

}  // namespace tickwork::quartz
