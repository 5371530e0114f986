#include "tickwork/laser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tickwork/error.hpp"
#include "tickwork/stochastic.hpp"

namespace tickwork::laser {

void LaserParams::validate() const {
  if (!(G > 0.0) || !(kappa > 0.0) || !(n_s > 0.0)) throw ParameterError("G, kappa and n_s must be > 0");
  if (!(eta_det > 0.0 && eta_det <= 1.0)) throw ParameterError("eta_det must lie in (0, 1]");
  if (!(dither >= 0.0)) throw ParameterError("dither must be >= 0");
  if (!std::isfinite(epsilon) || !std::isfinite(delta) || !std::isfinite(chi_kerr))
    throw ParameterError("epsilon, delta and chi_kerr must be finite");
}

double PhotonDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double PhotonDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) v += (static_cast<double>(n) - m) * (static_cast<double>(n) - m) * p[n];
  return v;
}

double PhotonDistribution::fano() const {
  const double m = mean();
  if (!(m > 0.0)) throw InsufficientData("Fano factor undefined for zero mean");
  return variance() / m;
}

double PhotonDistribution::l1_distance(const PhotonDistribution& other) const {
  const std::size_t n = std::max(p.size(), other.p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < other.p.size() ? other.p[i] : 0.0;
    d += std::abs(a - b);
  }
  return d;
}

void PhotonDistribution::check() const {
  if (p.empty()) throw ParameterError("empty photon distribution");
  for (double x : p)
    if (!(x >= 0.0)) throw ParameterError("negative photon probability");
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-9) throw ParameterError("photon distribution not normalized");
}

PhotonDistribution PhotonDistribution::vacuum(std::size_t n_max) {
  PhotonDistribution d;
  d.p.assign(n_max + 1, 0.0);
  d.p[0] = 1.0;
  return d;
}

std::size_t default_n_max(double n_bar) {
  if (!(n_bar >= 0.0)) throw ParameterError("n_bar must be >= 0");
  return static_cast<std::size_t>(std::ceil(n_bar + 10.0 * std::sqrt(n_bar) + 20.0));
}

std::vector<double> birth_death_rate(const PhotonDistribution& d, const LaserParams& params) {
  const auto& p = d.p;
  const std::size_t N = d.n_max();
  const double A = params.G * params.n_s;
  auto birth = [&](std::size_t n) {  // rate n -> n+1
    if (n >= N) return 0.0;
    const double m = static_cast<double>(n + 1);
    return A * m / (m + params.n_s);
  };
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    const double death = params.kappa * static_cast<double>(n);
    double r = -(birth(n) + death) * p[n];
    if (n > 0) r += birth(n - 1) * p[n - 1];
    if (n < N) r += params.kappa * static_cast<double>(n + 1) * p[n + 1];
    out[n] = r;
  }
  return out;
}

PhotonDistribution evolve_photon_distribution(PhotonDistribution d, const LaserParams& params, double dt,
                                              std::size_t steps) {
  params.validate();
  d.check();
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  if (!(dt * (params.G * params.n_s + params.kappa * static_cast<double>(d.n_max())) < 0.1))
    throw ParameterError("dt (G n_s + kappa n_max) must be < 0.1");

  const std::size_t n = d.p.size();
  PhotonDistribution tmp = d;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto k1 = birth_death_rate(d, params);
    for (std::size_t i = 0; i < n; ++i) tmp.p[i] = d.p[i] + 0.5 * dt * k1[i];
    const auto k2 = birth_death_rate(tmp, params);
    for (std::size_t i = 0; i < n; ++i) tmp.p[i] = d.p[i] + 0.5 * dt * k2[i];
    const auto k3 = birth_death_rate(tmp, params);
    for (std::size_t i = 0; i < n; ++i) tmp.p[i] = d.p[i] + dt * k3[i];
    const auto k4 = birth_death_rate(tmp, params);
    for (std::size_t i = 0; i < n; ++i) d.p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double total = std::accumulate(d.p.begin(), d.p.end(), 0.0);
    if (!(std::abs(total - 1.0) <= 1e-6))
      throw NumericalBlowup("photon distribution normalization drifted", s, static_cast<double>(s + 1) * dt);
  }
  return d;
}

PhotonDistribution steady_state_distribution(const LaserParams& params, std::size_t n_max) {
  params.validate();
  const double x = params.G * params.n_s / params.kappa;
  if (n_max == 0) n_max = default_n_max(x);

  std::vector<double> logp(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double m = static_cast<double>(n) + params.n_s;
    logp[n] = m * std::log(x) - std::lgamma(m + 1.0);
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  PhotonDistribution d;
  d.p.resize(n_max + 1);
  double s = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) s += d.p[n] = std::exp(logp[n] - top);
  for (auto& v : d.p) v /= s;
  if (!(d.p.back() < 1e-12))
    throw ParameterError("n_max = " + std::to_string(n_max) + " truncates the steady state (p(n_max) >= 1e-12)");
  return d;
}

double phase_diffusion_rate(double kappa, double n_bar) {
  if (!(n_bar > 0.0)) throw ParameterError("n_bar must be > 0");
  return kappa / (2.0 * n_bar);
}

double g1_correlation(double tau, double kappa, double n_bar) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
  if (!(n_bar > 0.0)) throw ParameterError("n_bar must be > 0");
  return std::exp(-kappa * tau / (4.0 * n_bar));
}

Trajectory simulate_phase(double Gamma, double dt, double horizon, Rng& rng, double Omega, std::size_t record_every) {
  if (!(Gamma >= 0.0)) throw ParameterError("Gamma must be >= 0");
  StochasticProcessSpec<1> spec;
  spec.drift = [Omega](double, const auto&) { return std::array<double, 1>{-Omega}; };
  if (Gamma > 0.0) {
    const double amp = std::sqrt(Gamma);
    spec.diffusion = [amp](double, const auto&) { return std::array<double, 1>{amp}; };
  }
  spec.dt = dt;
  spec.horizon = horizon;
  spec.record_every = record_every;
  spec.labels = {"phi"};
  spec.params = {{"Gamma", Gamma}, {"Omega", Omega}};
  return simulate(spec, rng);
}

Trajectory simulate_semiclassical(const LaserParams& params, double dt, double horizon, Rng& rng, bool kerr,
                                  std::complex<double> alpha0, std::size_t record_every) {
  params.validate();
  if (kerr && params.epsilon == 0.0 && std::abs(alpha0) == 0.0)
    throw ParameterError("Kerr flow needs epsilon > 0 or a nonzero initial amplitude");
  const double eps = kerr ? params.epsilon : 0.0;
  const double delta = kerr ? params.delta : 0.0;
  const double chi = kerr ? params.chi_kerr : 0.0;
  const double A = params.G * params.n_s / params.kappa;
  const double k = params.kappa;
  const double ns = params.n_s;

  StochasticProcessSpec<2> spec;
  spec.drift = [=](double, const std::array<double, 2>& s) {
    const std::complex<double> a{s[0], s[1]};
    const double I = std::norm(a);
    const std::complex<double> i{0.0, 1.0};
    const std::complex<double> d = -i * eps - i * (delta + 2.0 * chi * I) * a - 0.5 * k * a * (1.0 - A / (I + ns));
    return std::array<double, 2>{d.real(), d.imag()};
  };
  if (kerr && params.dither > 0.0) {
    const double amp = params.dither / std::sqrt(2.0);
    spec.diffusion = [amp](double, const auto&) { return std::array<double, 2>{amp, amp}; };
  }
  spec.initial = {alpha0.real(), alpha0.imag()};
  spec.dt = dt;
  spec.horizon = horizon;
  spec.record_every = record_every;
  spec.labels = {"re", "im"};
  spec.params = {{"G", params.G},         {"n_s", params.n_s}, {"kappa", params.kappa},
                 {"epsilon", eps},        {"delta", delta},    {"chi_kerr", chi},
                 {"dither", params.dither}};
  return simulate(spec, rng);
}

double semiclassical_intensity(const LaserParams& params) {
  params.validate();
  return std::max(0.0, params.G * params.n_s / params.kappa - params.n_s);
}

double oscillation_frequency(const Trajectory& traj, std::string_view component, double t_from) {
  const auto x = traj.column(component);
  std::vector<double> ups;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (traj.times[i] < t_from || !(x[i - 1] < 0.0 && x[i] >= 0.0)) continue;
    const double f = -x[i - 1] / (x[i] - x[i - 1]);
    ups.push_back(traj.times[i - 1] + f * (traj.times[i] - traj.times[i - 1]));
  }
  if (ups.size() < 2) throw InsufficientData("fewer than two rising zero crossings");
  const double period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
  return 2.0 * std::numbers::pi / period;
}

double energy_balance_rate(double E, double kappa, double n_bar) {
  if (!(E >= 0.0)) throw ParameterError("E must be >= 0");
  return -kappa * E + kappa * n_bar;
}

}  // namespace tickwork::laser
