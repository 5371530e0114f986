#include <cmath>

#include "doctest.h"
#include "tickwork/quartz.hpp"

using namespace tickwork;
using namespace tickwork::quartz;

namespace {

double envelope(const std::vector<double>& v, std::size_t from) {
  double m = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

TEST_CASE("gain curve") {
  CHECK(schmitt_gain(0.0, 1.8) == 0.0);
  for (double V : {0.1, 0.4, 0.77, 0.95}) CHECK(schmitt_gain(-V, 1.8) == doctest::Approx(-schmitt_gain(V, 1.8)));
  const double t = std::tanh(0.9);
  CHECK(schmitt_gain(0.5, 1.8) == doctest::Approx((0.5 + t) / (1 + 0.5 * t)));
  CHECK(schmitt_gain(0.5, 1.8) == doctest::Approx(0.89556).epsilon(1e-5));
  CHECK_THROWS_AS(schmitt_gain(1.0, 1.8), DomainError);
}

TEST_CASE("static input curve and turning points") {
  CHECK(steady_input_curve(0.0, 1.8, 0.6) == 0.0);
  const double vc = std::sqrt(0.8 / 1.8);
  CHECK(steady_input_curve(vc, 1.8, 0.6) == doctest::Approx(-0.6588).epsilon(1e-4));
  const double h = 1e-5;
  const double slope = (steady_input_curve(vc + h, 1.8, 0.6) - steady_input_curve(vc - h, 1.8, 0.6)) / (2 * h);
  CHECK(std::abs(slope) < 1e-6);
  CHECK_THROWS_AS(steady_input_curve(-1.0, 1.8, 0.6), DomainError);

  const auto [lo, hi] = hysteresis_thresholds(1.8);
  CHECK(hi == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(lo == -hi);
  CHECK(hysteresis_thresholds(2.0).second == doctest::Approx(std::sqrt(0.5)));
  CHECK(hysteresis_thresholds(1.0 + 1e-10).second < 1e-4);
  CHECK_THROWS_AS(hysteresis_thresholds(1.0), NoHysteresis);
}

TEST_CASE("quasi-static hysteresis loop") {
  const auto s = hysteresis_sweep(1.8, 0.6);
  const double vc = std::sqrt(0.8 / 1.8);
  CHECK(s.up_switch == doctest::Approx(steady_input_curve(-vc, 1.8, 0.6)).epsilon(0.01));
  CHECK(s.down_switch == doctest::Approx(steady_input_curve(vc, 1.8, 0.6)).epsilon(0.01));
  CHECK(s.up_switch > s.down_switch);
}

TEST_CASE("limit cycle at the figure parameters") {
  QuartzParams p;
  Rng rng(RngStream{1, 0});
  const auto traj = simulate_quartz(p, 1e-3, 200.0, rng);
  const auto V = traj.column("V"), X = traj.column("X");
  const std::size_t half = traj.size() / 2;
  CHECK(envelope(X, half) > 0.5);
  CHECK(envelope(V, half) > 0.9);
  // square-ish output: most of the time |V| is near saturation
  std::size_t sat = 0;
  for (std::size_t i = half; i < V.size(); ++i) sat += std::abs(V[i]) > 0.8;
  CHECK(sat > (V.size() - half) / 2);
}

TEST_CASE("weak coupling decays to the origin") {
  QuartzParams p;
  p.chi = 0.01;
  Rng rng(RngStream{1, 0});
  const auto X = simulate_quartz(p, 1e-3, 200.0, rng, QuartzState{0.1, 0.1, 0.0}).column("X");
  CHECK(envelope(X, X.size() * 9 / 10) < 1e-3);
}

TEST_CASE("sign-function reduction tracks the output between switches") {
  QuartzParams p;
  Rng rng(RngStream{1, 0});
  const auto traj = simulate_quartz(p, 1e-3, 200.0, rng);
  const auto V = traj.column("V"), X = traj.column("X");
  double ss = 0.0, ss_all = 0.0;
  std::size_t n = 0, n_all = 0;
  for (std::size_t i = traj.size() / 2; i < traj.size(); ++i) {
    const double d = V[i] - reduced_output(V[i], X[i], p);
    ss_all += d * d;
    ++n_all;
    // skip the switching intervals, where the output lags the input
    if (p.eta * std::abs(X[i]) < 4.0 || std::abs(V[i]) < 0.95 || V[i] * X[i] > 0.0) continue;
    ss += d * d;
    ++n;
  }
  REQUIRE(n > n_all / 3);
  CHECK(std::sqrt(ss / n) < 0.05);
  // including the switching intervals the lag dominates the residual
  CHECK(std::sqrt(ss_all / n_all) > 0.05);
}

TEST_CASE("mirror symmetry without noise") {
  QuartzParams p;
  Rng a(RngStream{1, 0}), b(RngStream{1, 1});
  const auto t1 = simulate_quartz(p, 1e-3, 30.0, a, QuartzState{0.2, 0.1, -0.3}, 100);
  const auto t2 = simulate_quartz(p, 1e-3, 30.0, b, QuartzState{-0.2, -0.1, 0.3}, 100);
  for (std::size_t i = 0; i < t1.states.size(); ++i) CHECK(t1.states[i] == doctest::Approx(-t2.states[i]).scale(1.0));
}

TEST_CASE("Hopf threshold agrees with the linear stability boundary") {
  QuartzParams p;
  // linearisation at the origin: V' = -a V - b X, X' = omega Y, Y' = -omega X - kappa Y + chi V
  // characteristic cubic l^3 + (a+kappa) l^2 + (a kappa + omega^2) l + a omega^2 + b omega chi;
  // Routh-Hurwitz boundary c2 c1 = c0
  const double a = 2 * p.gamma * (1 + p.beta), b = 2 * p.gamma * p.eta;
  const double chi_c = ((a + p.kappa) * (a * p.kappa + p.omega * p.omega) - a * p.omega * p.omega) / (b * p.omega);
  CHECK(hopf_threshold(p, 0.2, 3.0, 1e-3) == doctest::Approx(chi_c).epsilon(0.02));
}

TEST_CASE("noise is validated and blowups are reported") {
  QuartzParams p;
  p.D = -1.0;
  Rng rng(RngStream{1, 0});
  CHECK_THROWS_AS(simulate_quartz(p, 1e-3, 1.0, rng), ParameterError);
  p.D = 0.01;
  CHECK_NOTHROW(simulate_quartz(p, 1e-3, 10.0, rng));
}
