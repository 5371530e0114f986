#include <cmath>
#include <complex>
#include <numeric>

#include "doctest.h"
#include "tickwork/error.hpp"
#include "tickwork/laser.hpp"
#include "tickwork/stochastic.hpp"

using namespace tickwork;
using namespace tickwork::laser;

namespace {

// Steady state from the balance ratio p_n / p_{n-1} = G n_s / (kappa (n + n_s)).
std::vector<double> recursion_oracle(double G, double ns, double kappa, std::size_t n_max) {
  std::vector<double> p(n_max + 1, 1.0);
  for (std::size_t n = 1; n <= n_max; ++n) p[n] = p[n - 1] * G * ns / (kappa * (n + ns));
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

double mean_of(const std::vector<double>& p) {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += n * p[n];
  return m;
}

}  // namespace

TEST_CASE("steady state above threshold") {
  LaserParams lp;
  const auto d = steady_state_distribution(lp);
  d.check();
  CHECK(d.n_max() == default_n_max(25.0));
  CHECK(d.p.back() < 1e-12);
  const auto oracle = recursion_oracle(100, 1, 4, d.n_max());
  for (std::size_t n = 0; n <= d.n_max(); ++n) CHECK(d.p[n] == doctest::Approx(oracle[n]).epsilon(1e-10).scale(0));
  CHECK(d.mean() == doctest::Approx(mean_of(oracle)).epsilon(1e-12));
  // the shifted-Poisson mean is G n_s / kappa - n_s, not G n_s / kappa
  CHECK(d.mean() == doctest::Approx(24.0).epsilon(1e-6));
  CHECK(d.fano() == doctest::Approx(1.0).epsilon(0.05));

  const double A = lp.G * lp.n_s;
  for (std::size_t n = 1; n <= d.n_max(); ++n) {
    const double flux = A * n / (n + lp.n_s) * d.p[n - 1];
    CHECK(std::abs(flux - lp.kappa * n * d.p[n]) <= 1e-10 * flux + 1e-300);
  }
}

TEST_CASE("steady state below threshold is nearly geometric") {
  LaserParams lp;
  lp.G = 0.5;
  lp.kappa = 1.0;
  lp.n_s = 1000.0;
  const auto d = steady_state_distribution(lp, 200);
  CHECK(d.mean() == doctest::Approx(lp.G / (lp.kappa - lp.G)).epsilon(0.05));
  CHECK_THROWS_AS(steady_state_distribution(LaserParams{}, 30), ParameterError);
}

TEST_CASE("birth-death evolution") {
  LaserParams lp;
  const auto ss = steady_state_distribution(lp);
  const double dt = 1e-4;
  const auto same = evolve_photon_distribution(ss, lp, dt, 10000);
  CHECK(same.l1_distance(ss) < 1e-8);

  auto d = PhotonDistribution::vacuum(ss.n_max());
  double prev = d.mean();
  bool monotone = true;
  for (int block = 0; block < 100; ++block) {
    d = evolve_photon_distribution(d, lp, dt, 1000);
    const double s = std::accumulate(d.p.begin(), d.p.end(), 0.0);
    CHECK(std::abs(s - 1.0) < 1e-9);
    monotone = monotone && d.mean() >= prev - 1e-12;
    prev = d.mean();
  }
  CHECK(monotone);
  CHECK(d.l1_distance(ss) < 1e-6);
  CHECK(d.mean() == doctest::Approx(ss.mean()).epsilon(1e-6));
  CHECK_THROWS_AS(evolve_photon_distribution(ss, lp, 1e-3, 1), ParameterError);
}

TEST_CASE("phase diffusion rate and g1") {
  CHECK(phase_diffusion_rate(4, 25) == doctest::Approx(0.08));
  CHECK(phase_diffusion_rate(4, 50) == doctest::Approx(phase_diffusion_rate(4, 25) / 2));
  CHECK(phase_diffusion_rate(4, 1e12) < 1e-11);
  CHECK(g1_correlation(0, 4, 25) == 1.0);
  CHECK(g1_correlation(25, 4, 25) == doctest::Approx(std::exp(-1.0)));
  CHECK(energy_balance_rate(25, 4, 25) == 0.0);
  CHECK(energy_balance_rate(0, 4, 25) == doctest::Approx(100));
  CHECK(energy_balance_rate(30, 4, 25) == doctest::Approx(-20));
}

TEST_CASE("phase paths") {
  Rng rng(RngStream{1, 0});
  const auto flat = simulate_phase(0.0, 0.01, 10.0, rng);
  for (double v : flat.column("phi")) CHECK(v == 0.0);

  const double G = 0.08, t = 20.0;
  auto end = run_ensemble(2000, 4, [&](Rng& r, std::size_t) {
    const auto tr = simulate_phase(G, 0.01, t, r, 0.0, 100);
    return tr.at(tr.size() - 1, 0);
  });
  const double m = std::accumulate(end.begin(), end.end(), 0.0) / end.size();
  double v = 0.0;
  for (double x : end) v += (x - m) * (x - m);
  v /= end.size() - 1;
  CHECK(v == doctest::Approx(G * t).epsilon(0.10));

  Rng r2(RngStream{1, 1});
  const auto drifted = simulate_phase(G, 0.01, 200.0, r2, 25 * 0.2);
  const auto phi = drifted.column("phi");
  const double slope = (phi.back() - phi.front()) / 200.0;
  CHECK(slope == doctest::Approx(-5.0).epsilon(0.02));
}

TEST_CASE("Monte-Carlo g1 matches the closed form") {
  const double kappa = 4, nb = 25, G = phase_diffusion_rate(kappa, nb);
  const double dt = 0.01;
  auto paths = run_ensemble(2000, 8, [&](Rng& r, std::size_t) { return simulate_phase(G, dt, 50.0, r).column("phi"); });
  for (double tau : {5.0, 25.0, 50.0}) {
    const auto k = static_cast<std::size_t>(std::llround(tau / dt));
    std::vector<double> c;
    for (const auto& p : paths) c.push_back(std::cos(p[k] - p[0]));
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / c.size();
    double v = 0.0;
    for (double x : c) v += (x - m) * (x - m);
    const double se = std::sqrt(v / (c.size() - 1) / c.size());
    // Brownian oracle E[exp(i dphi)] = exp(-Gamma tau / 2)
    CHECK(std::abs(m - std::exp(-G * tau / 2)) < 3 * se);
    CHECK(std::abs(m - g1_correlation(tau, kappa, nb)) < 3 * se);
  }
}

TEST_CASE("semiclassical laser flow") {
  LaserParams lp;
  Rng rng(RngStream{1, 0});
  const auto tr = simulate_semiclassical(lp, 1e-3, 20.0, rng, false);
  const double I = std::norm(std::complex<double>(tr.at(tr.size() - 1, 0), tr.at(tr.size() - 1, 1)));
  CHECK(I == doctest::Approx(lp.G * lp.n_s / lp.kappa - lp.n_s).epsilon(0.01));
  CHECK(semiclassical_intensity(lp) == doctest::Approx(24.0));

  LaserParams below = lp;
  below.G = 2.0;
  const auto tb = simulate_semiclassical(below, 1e-3, 20.0, rng, false);
  CHECK(std::abs(tb.at(tb.size() - 1, 0)) < 1e-3);
  CHECK(semiclassical_intensity(below) == 0.0);

  LaserParams k = lp;
  CHECK_THROWS_AS(simulate_semiclassical(k, 1e-3, 1.0, rng, true, {0.0, 0.0}), ParameterError);
}

TEST_CASE("Kerr self-pulsing frequency is linear in chi") {
  LaserParams lp;
  lp.epsilon = 0.01;
  std::vector<double> chis{0.05, 0.1, 0.2}, freq;
  for (double chi : chis) {
    lp.chi_kerr = chi;
    Rng rng(RngStream{1, 0});
    const auto tr = simulate_semiclassical(lp, 1e-4, 40.0, rng, true);
    freq.push_back(oscillation_frequency(tr, "im", 10.0));
  }
  const double n = semiclassical_intensity(lp);
  // on the limit cycle |alpha|^2 = n and the rotation rate is 2 chi |alpha|^2
  for (std::size_t i = 0; i < chis.size(); ++i) CHECK(freq[i] == doctest::Approx(2 * chis[i] * n).epsilon(0.05));
  const double slope = (freq[2] - freq[0]) / (chis[2] - chis[0]);
  CHECK(slope == doctest::Approx(2 * n).epsilon(0.05));
}

TEST_CASE("good-clock tradeoff") {
  const double kappa = 4.0;
  for (double nb : {5.0, 25.0, 100.0}) {
    CHECK(kappa * nb * phase_diffusion_rate(kappa, nb) == doctest::Approx(kappa * kappa / 2));

    // dissipated power from the energy balance, relaxed from E = 0
    double E = 0.0;
    for (int i = 0; i < 20000; ++i) E += 1e-3 * energy_balance_rate(E, kappa, nb);
    const double power = kappa * E;

    // Gamma from the variance of simulated phase increments
    const double G = phase_diffusion_rate(kappa, nb);
    auto incr = run_ensemble(1000, 17, [&](Rng& r, std::size_t) {
      const auto tr = simulate_phase(G, 0.01, 10.0, r, 0.0, 1000);
      return tr.at(tr.size() - 1, 0);
    });
    double v = 0.0;
    for (double x : incr) v += x * x;
    const double G_fit = v / incr.size() / 10.0;
    CHECK(power * G_fit == doctest::Approx(kappa * kappa / 2).epsilon(0.15));
  }
}
