// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tickwork/error.hpp"
#include "tickwork/laser.hpp"
#include "tickwork/metrics.hpp"
#include "tickwork/pendulum.hpp"
#include "tickwork/quartz.hpp"
#include "tickwork/shuttle.hpp"
#include "tickwork/stochastic.hpp"
#include "tickwork/sweeps.hpp"
#include "tickwork/thermal.hpp"

using namespace tickwork;
using std::numbers::pi;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

pendulum::PendulumParams fig_pendulum() {
  pendulum::PendulumParams p;
  p.Gamma = 0.1;
  p.mu = 0.1;
  p.psi0 = std::asin(0.1);
  return p;
}

// 1. deterministic period
Outcome c1() {
  Outcome o;
  Rng rng(RngStream{1, 0});
  const auto tr = pendulum::simulate_pendulum(fig_pendulum(), 1e-3, 400.0, rng);
  auto ticks = metrics::extract_ticks(tr, "K", metrics::TickMode::kick_transition);
  std::erase_if(ticks.tick_times, [](double t) { return t < 200.0; });
  ticks.start = 200.0;
  const double T = metrics::period_statistics(ticks).mean;
  o.require(std::abs(T - 6.35) <= 0.1, "mean period " + fmt("%.4f", T) + " vs 6.35 +- 0.1");
  return o;
}

// 2. limit-cycle radius
Outcome c2() {
  Outcome o;
  const auto p = fig_pendulum();
  const double oracle = 4 * p.mu * std::cos(p.psi0) / (pi * p.Gamma);
  Rng rng(RngStream{1, 0});
  const double A = pendulum::oscillation_amplitude(pendulum::simulate_pendulum(p, 1e-3, 400.0, rng), 200.0);
  // 1.2668 is quoted to four decimals
  o.require(std::abs(oracle / 1.2668 - 1) < 1e-4, "radius formula " + fmt("%.5f", oracle) + " vs 1.2668");
  o.require(std::abs(A / 1.2668 - 1) < 0.02, "simulated amplitude " + fmt("%.5f", A) + " vs 1.2668 within 2%");
  return o;
}

// 3. work-period regression
Outcome c3() {
  Outcome o;
  const auto p = pendulum::PendulumParams::with_sigma(0.1, 0.1, std::asin(0.2), 0.1);
  const auto first = run_ensemble(50, 3, [&](Rng& rng, std::size_t) {
    return pendulum::cycle_ledger(pendulum::simulate_phase_on_cycle(p, 1e-3, 16.0, rng), p).entries.at(0);
  });
  std::vector<double> T, W;
  for (const auto& e : first) {
    T.push_back(e.period);
    W.push_back(e.work);
  }
  const double s = slope(T, W);
  o.require(s >= 0.06 && s <= 0.10, "slope dW/dT " + fmt("%.4f", s) + " in [0.06, 0.10]");
  return o;
}

// 4. mean kick signal
Outcome c4() {
  Outcome o;
  const auto p = pendulum::PendulumParams::with_sigma(1.0, 1.0, 0.0, 0.2);
  const std::size_t every = 100;  // dt = 1e-3, samples every 0.1
  const auto K = run_ensemble(100, 4, [&](Rng& rng, std::size_t) {
    return pendulum::simulate_phase_on_cycle(p, 1e-3, 30.0, rng, every).column("K");
  });
  int outside = 0, points = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < K[0].size(); ++i) {
    const double t = 0.1 * i;
    double m = 0.0;
    for (const auto& k : K) m += k[i];
    m /= K.size();
    const double a = pendulum::mean_kick_signal(t, p);
    // K = +-mu, so the predicted standard error follows from the analytic mean
    const double se = std::sqrt(std::max(p.mu * p.mu - a * a, 0.0) / K.size());
    const double z = se > 0 ? std::abs(m - a) / se : (std::abs(m - a) < 1e-9 ? 0.0 : INFINITY);
    worst = std::max(worst, z);
    outside += z > 3.0;
    ++points;
  }
  o.require(outside == 0, std::to_string(points) + " points on (0, 30], max |dev|/SE " + fmt("%.2f", worst) + " <= 3");
  return o;
}

// 5. quartz hysteresis
Outcome c5() {
  Outcome o;
  const double beta = 1.8, eta = 0.6;
  const auto [lo, hi] = quartz::hysteresis_thresholds(beta);
  o.require(std::abs(hi - 2.0 / 3.0) < 1e-9 && std::abs(lo + 2.0 / 3.0) < 1e-9,
            "thresholds +-" + fmt("%.10f", hi) + " vs +-0.66667");
  const double vc = std::sqrt((beta - 1) / beta);
  auto X = [&](double V) { return -(beta / eta) * V + std::log((1 + V) / (1 - V)) / (2 * eta); };
  const auto s = quartz::hysteresis_sweep(beta, eta);
  o.require(std::abs(X(vc) + 0.6588) < 1e-4, "X(Vc) " + fmt("%.5f", X(vc)) + " vs -0.6588");
  o.require(std::abs(s.up_switch / X(-vc) - 1) < 0.01 && std::abs(s.down_switch / X(vc) - 1) < 0.01,
            "sweep switches " + fmt("%.5f", s.up_switch) + ", " + fmt("%.5f", s.down_switch) + " within 1%");
  return o;
}

// 6. laser steady state
Outcome c6() {
  Outcome o;
  laser::LaserParams lp;
  const auto d = laser::steady_state_distribution(lp);
  // independent detailed-balance recursion p_n / p_{n-1} = G n_s / (kappa (n + n_s))
  std::vector<double> q(d.p.size(), 1.0);
  for (std::size_t n = 1; n < q.size(); ++n) q[n] = q[n - 1] * lp.G * lp.n_s / (lp.kappa * (n + lp.n_s));
  const double Z = std::accumulate(q.begin(), q.end(), 0.0);
  double m = 0, m2 = 0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    m += n * q[n] / Z;
    m2 += n * static_cast<double>(n) * q[n] / Z;
  }
  const double fano_oracle = (m2 - m * m) / m;
  o.require(std::abs(d.mean() - m) < 1e-9, "mean matches recursion oracle " + fmt("%.6f", m));
  o.require(std::abs(d.mean() - 25.0) <= 0.5, "mean " + fmt("%.4f", d.mean()) + " vs 25 +- 0.5");
  o.require(std::abs(d.fano() - 1.0) <= 0.05, "Fano " + fmt("%.4f", d.fano()) + " (oracle " + fmt("%.4f", fano_oracle) + ") vs 1 +- 0.05");
  auto e = laser::PhotonDistribution::vacuum(d.n_max());
  e = laser::evolve_photon_distribution(e, lp, 1e-4, 100000);
  o.require(e.l1_distance(d) < 1e-6, "evolver L1 " + fmt("%.2e", e.l1_distance(d)) + " < 1e-6");
  return o;
}

// 7. laser coherence
Outcome c7() {
  Outcome o;
  const double kappa = 4, nb = 25, dt = 0.01;
  const double G = laser::phase_diffusion_rate(kappa, nb);
  const auto paths = run_ensemble(2000, 8, [&](Rng& r, std::size_t) { return laser::simulate_phase(G, dt, 50.0, r).column("phi"); });
  for (double tau : {5.0, 25.0, 50.0}) {
    const auto k = static_cast<std::size_t>(std::llround(tau / dt));
    std::vector<double> c;
    for (const auto& p : paths) c.push_back(std::cos(p[k] - p[0]));
    const double se = sd(c) / std::sqrt(c.size());
    const double oracle = std::exp(-kappa * tau / (4 * nb));
    o.require(std::abs(mean(c) - oracle) < 3 * se, "tau " + fmt("%.0f", tau) + ": " + fmt("%.4f", mean(c)) + " vs " +
                                                       fmt("%.4f", oracle) + " (SE " + fmt("%.4f", se) + ")");
  }
  return o;
}

// 8. Kerr self-pulsing
Outcome c8() {
  Outcome o;
  laser::LaserParams lp;
  lp.epsilon = 0.01;
  lp.G = 104.0;  // semiclassical n_bar = G n_s / kappa - n_s = 25
  const double nb = laser::semiclassical_intensity(lp);
  for (double chi : {0.1, 0.2}) {
    lp.chi_kerr = chi;
    Rng rng(RngStream{1, 0});
    const double w = laser::oscillation_frequency(laser::simulate_semiclassical(lp, 1e-4, 40.0, rng, true), "im", 10.0);
    o.require(std::abs(w / (chi * nb) - 1) < 0.05, "chi " + fmt("%.1f", chi) + ": frequency " + fmt("%.4f", w) +
                                                       " vs chi n_bar " + fmt("%.4f", chi * nb) + " (2 chi n_bar " +
                                                       fmt("%.4f", 2 * chi * nb) + ")");
  }
  return o;
}

// 9. shuttle amplitude and count regularity
Outcome c9() {
  Outcome o;
  shuttle::ShuttleParams fig;
  const double mu = shuttle::transcendental_mu(fig);
  const double x = shuttle::transcendental_roots(mu).back().x;
  const double res = std::abs(std::exp(mu * x * x) - std::cosh(x)) / std::cosh(x);
  o.require(res < 1e-8, "root x = " + fmt("%.6f", x) + ", relative residual " + fmt("%.1e", res));

  shuttle::ShuttleParams p;
  p.gamma_L = p.gamma_R = 1.0;
  p.eta = 0.3;
  const double Omega = 2 * pi, H = 4000.0, w = 10 * 2 * pi / Omega;
  auto fano_at = [&](double r, std::uint64_t seed) {
    Rng rng(RngStream{seed, 0});
    const auto rec = shuttle::simulate_gated_tunnelling(p, r, Omega, H, rng);
    return metrics::windowed_fano(rec.times(EventLabel::tunnel_right), 0.0, H, w);
  };
  const double f3 = fano_at(3.0, 9), f0 = fano_at(0.0, 10);
  o.require(f3 < 0.3, "Fano at r* = 3: " + fmt("%.3f", f3) + " < 0.3");
  o.require(std::abs(f0 - 1.0) <= 0.1, "Fano at r* = 0: " + fmt("%.3f", f0) + " vs 1 +- 0.1");
  // diagnostic only: independent right tunnelling at rate gamma
  const auto poisson = thinning_sample([&](double) { return p.gamma_R; }, p.gamma_R, H, RngStream{11, 0});
  o.detail += "; Poisson baseline Fano " + fmt("%.3f", metrics::windowed_fano(poisson.times(EventLabel::tick), 0.0, H, w)) +
              " (diagnostic)";
  return o;
}

// 10. TLS quantum jumps
Outcome c10() {
  Outcome o;
  thermal::TlsParams p;  // N = 0.9, Gamma = 5, gamma = 0.1
  const double oracle = p.n_bar / (2 * p.n_bar + 1);
  const double dt = 2e-4;
  const auto frac = run_ensemble(8, 21, [&](Rng& rng, std::size_t) {
    const auto tr = thermal::simulate_readout_trajectory(p, dt, 5000.0, rng,
                                                         {thermal::thermal_state(std::log1p(1 / p.n_bar), p.epsilon), 10});
    const auto det = thermal::detect_jumps(tr.times, tr.column("current"), thermal::default_jump_window(p), 0.0, 0.5,
                                           thermal::mean_dwell_time(p));
    return up_fraction(det.events, det.initial_up);
  });
  const double f = mean(frac);
  o.require(std::abs(f - oracle) <= 0.02, "detected excited fraction " + fmt("%.4f", f) + " vs " + fmt("%.4f", oracle) + " +- 0.02");

  const auto r0 = thermal::DensityMatrix::from_bloch(0.6, 0.0, 0.8);
  const std::size_t every = 2500;
  const auto zs = run_ensemble(500, 11, [&](Rng& rng, std::size_t) {
    return thermal::simulate_readout_trajectory(p, dt, 10.0, rng, {r0, every}).column("sz");
  });
  const auto me = thermal::unconditional_master_equation(p, r0, dt, 10.0, every).column("sz");
  int outside = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < me.size(); ++i) {
    std::vector<double> c;
    for (const auto& z : zs) c.push_back(z[i]);
    const double zdev = std::abs(mean(c) - me[i]) / (sd(c) / std::sqrt(c.size()));
    worst = std::max(worst, zdev);
    outside += zdev > 3.0;
  }
  o.require(outside == 0, "500-trajectory <sz> vs master equation at " + std::to_string(me.size() - 1) +
                              " checkpoints, max |dev|/SE " + fmt("%.2f", worst));
  return o;
}

// 11. time-temperature duality and radiocarbon
Outcome c11() {
  Outcome o;
  thermal::TlsParams p;
  p.gamma = 1.0;
  p.epsilon = 0.01;
  p = p.with_temperature(1.0);
  const double N = 250;
  double worst = 0.0;
  for (double beta : {1.0, 0.5, 2.0, 0.1}) {
    const auto q = p.with_temperature(beta);
    const double t = thermal::tls_time_estimate(N, q, true).estimate;
    // n_bar = T / eps at high temperature, so t_est T = N eps / gamma
    const double c = N * q.epsilon / q.gamma;
    worst = std::max(worst, std::abs(t * (1 / beta) - c) / c);
  }
  o.require(worst <= 1e-12, "t_est T invariance, max relative deviation " + fmt("%.1e", worst));

  const double gamma = 1.0, t = 100.0;
  const auto est = run_ensemble(2000, 3, [&](Rng& rng, std::size_t) {
    return thermal::radiocarbon_estimate(static_cast<double>(thermal::poisson_count(gamma, t, rng)), gamma).estimate;
  });
  const double bias = std::abs(mean(est) - t) / t, rel = sd(est) / mean(est);
  o.require(bias < 0.02, "radiocarbon bias " + fmt("%.4f", bias) + " < 0.02");
  o.require(std::abs(rel * std::sqrt(gamma * t) - 1) < 0.10, "relative error " + fmt("%.4f", rel) + " vs 1/sqrt(N) = 0.1 within 10%");
  return o;
}

// 12. thermal-time map
Outcome c12() {
  Outcome o;
  const double eps = 1.0;
  Eigen::MatrixXcd H(2, 2);
  H << 0.5 * eps, 0, 0, -0.5 * eps;

  Eigen::MatrixXcd diag(2, 2);
  diag << 0.3, 0, 0, 0.7;
  const double d = (thermal::thermal_time_step(diag, H, 1.3, 0.7, 5.0) - diag).norm();
  o.require(d < 1e-12, "diagonal drift " + fmt("%.1e", d));

  Eigen::MatrixXcd rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  Eigen::MatrixXcd U(2, 2);
  U << std::exp(cplx{0, -0.5 * eps}), 0, 0, std::exp(cplx{0, 0.5 * eps});
  const double u = (thermal::thermal_time_step(rho, H, 1e4 * H.norm(), 1.0, 1.0) - U * rho * U.adjoint()).norm();
  o.require(u < 1e-3, "good-clock deviation from unitary " + fmt("%.1e", u));

  const double r = 0.8;
  Eigen::MatrixXcd x = rho;
  for (int i = 0; i < 10; ++i) x = thermal::thermal_time_step(x, H, r, 1.0, 0.5);
  const double rate = -std::log(std::abs(x(0, 1)) / 0.5) / 5.0, oracle = r * (1 - std::cos(eps / r));
  o.require(std::abs(rate / oracle - 1) < 0.05, "decay rate " + fmt("%.5f", rate) + " vs " + fmt("%.5f", oracle));
  return o;
}

// 13. CLI determinism
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> run_lines(const std::string& cmd) {
  std::vector<std::string> out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out.emplace_back(buf);
  pclose(pipe);
  return out;
}

Outcome c13() {
  Outcome o;
  const std::string cli = TICKWORK_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "tickwork_acceptance_13";
  fs::remove_all(dir);
  std::vector<std::string> names;
  for (const auto& line : run_lines(cli + " list")) names.push_back(line.substr(0, line.find(' ')));
  int mismatched = 0;
  for (const auto& n : names) {
    for (const char* threads : {"1", "4"}) {
      const auto cmd = std::string("TICKWORK_THREADS=") + threads + " " + cli + " run --preset " + n + " --seed 7 --out " +
                       (dir / (n + "_" + threads)).string() + " > /dev/null 2>&1";
      const int st = std::system(cmd.c_str());
      if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) {
        ++mismatched;
        o.detail += "preset " + n + " failed to run; ";
      }
    }
    const auto a = dir / (n + "_1"), b = dir / (n + "_4");
    std::vector<std::string> fa, fb;
    if (fs::exists(a))
      for (const auto& e : fs::directory_iterator(a)) fa.push_back(e.path().filename());
    if (fs::exists(b))
      for (const auto& e : fs::directory_iterator(b)) fb.push_back(e.path().filename());
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    bool same = !fa.empty() && fa == fb;
    for (std::size_t i = 0; same && i < fa.size(); ++i) same = slurp(a / fa[i]) == slurp(b / fa[i]);
    mismatched += !same;
  }
  fs::remove_all(dir);
  o.require(names.size() >= 8 && mismatched == 0,
            std::to_string(names.size()) + " presets, " + std::to_string(mismatched) + " differ between 1 and 4 threads");
  return o;
}

// 14. accuracy-dissipation thesis
Outcome c14() {
  Outcome o;
  const std::vector<double> mus{0.05, 0.1, 0.2, 0.4}, nbars{5, 25, 100}, chis{0.125, 0.25, 0.5, 1.0, 2.0};
  const auto pend = metrics::pendulum_mu_sweep(mus, 0.1, 0.1, 2000.0, 1e-3, 14);
  o.require(pend.monotone_decreasing, "pendulum mu sweep monotone (log-log slope " + fmt("%.3f", pend.loglog_slope) + ")");
  const auto las = metrics::laser_nbar_sweep(nbars, 4.0, 1.0, 2000.0, 0.01, 14);
  o.require(las.monotone_decreasing, "laser n_bar sweep monotone");
  o.require(std::abs(las.loglog_slope + 0.5) <= 0.15, "laser log-log slope " + fmt("%.3f", las.loglog_slope) + " vs -0.5 +- 0.15");
  shuttle::ShuttleParams b;
  b.gamma_L = b.gamma_R = 0.3;
  b.eta = 0.3;
  b.kappa = 0.1;
  const auto sw = metrics::shuttle_chi_sweep(b, chis, 2e-3, 20000.0, 200.0, 20 * pi, 14);
  const auto sh = metrics::shuttle_tradeoff(sw);
  o.require(sh.monotone_decreasing, "shuttle chi sweep monotone (log-log slope " + fmt("%.3f", sh.loglog_slope) + ")");
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items{
      {1, "pendulum deterministic period", c1},   {2, "pendulum limit-cycle radius", c2},
      {3, "work-period regression", c3},          {4, "mean kick signal", c4},
      {5, "quartz hysteresis", c5},               {6, "laser steady state", c6},
      {7, "laser coherence", c7},                 {8, "Kerr self-pulsing", c8},
      {9, "shuttle amplitude and regularity", c9}, {10, "TLS quantum jumps", c10},
      {11, "time-temperature duality", c11},      {12, "thermal-time map", c12},
      {13, "CLI determinism", c13},               {14, "accuracy-dissipation thesis", c14},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2d %s  %s (%.1f s): %s\n", it.id, o.pass ? "PASS" : "FAIL", it.name, s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
