#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "tickwork/stochastic.hpp"

using namespace tickwork;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// Composite Simpson rule, independent of the library.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(RngStream{7, 0}), b(RngStream{7, 0}), c(RngStream{7, 1});
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  Rng d(RngStream{7, 0});
  const int n = 100000;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = d.uniform(), y = c.uniform();
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double cov = sxy / n - sx * sy / n / n;
  const double rho = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(rho) < 0.05);
}

TEST_CASE("wiener increments") {
  const auto w = wiener_increments(RngStream{1, 0}, 100000, 0.01);
  CHECK(std::abs(mean(w)) < 4.0 * std::sqrt(0.01 / 100000));
  CHECK(variance(w) == doctest::Approx(0.01).epsilon(0.05));
  CHECK_THROWS_AS(wiener_increments(RngStream{1, 0}, 1, 0.0), ParameterError);
  CHECK(wiener_increments(RngStream{1, 0}, 50, 0.1) == wiener_increments(RngStream{1, 0}, 50, 0.1));
}

TEST_CASE("ito_step") {
  using S = std::array<double, 1>;
  auto zero = [](const S&) { return S{0.0}; };
  CHECK(ito_step(S{3.5}, zero, zero, 0.1, S{0.7})[0] == 3.5);

  S x{1.0};
  auto decay = [](const S& s) { return S{-s[0]}; };
  for (int k = 0; k < 10000; ++k) x = ito_step(x, decay, zero, 1e-4, S{0.0});
  CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-3);

  auto blow = [](const S&) { return S{NAN}; };
  CHECK_THROWS_AS(ito_step(S{1.0}, blow, zero, 0.1, S{0.0}, 12, 1.2), NumericalBlowup);
  try {
    ito_step(S{1.0}, blow, zero, 0.1, S{0.0}, 12, 1.2);
  } catch (const NumericalBlowup& e) {
    CHECK(e.step() == 12);
  }
}

TEST_CASE("ito_step diffusion variance") {
  StochasticProcessSpec<1> spec;
  const double G = 0.04;
  spec.drift = [](double, const auto&) { return std::array<double, 1>{0.0}; };
  spec.diffusion = [G](double, const auto&) { return std::array<double, 1>{std::sqrt(G)}; };
  spec.dt = 0.01;
  spec.horizon = 10.0;
  spec.record_every = 1000;
  spec.labels = {"x"};
  const auto trajs = run_ensemble(spec, 2000, 3);
  std::vector<double> end;
  for (const auto& t : trajs) end.push_back(t.at(t.size() - 1, 0));
  CHECK(variance(end) == doctest::Approx(G * 10.0).epsilon(0.10));
}

TEST_CASE("thinning sampler") {
  auto rec = thinning_sample([](double) { return 2.0; }, 2.0, 1000.0, RngStream{5, 0});
  CHECK(std::abs(static_cast<double>(rec.events.size()) - 2000.0) < 4.0 * std::sqrt(2000.0));
  rec.check();

  CHECK(thinning_sample([](double) { return 0.0; }, 1.0, 100.0, RngStream{5, 1}).events.empty());
  CHECK_THROWS_AS(thinning_sample([](double) { return 3.0; }, 1.0, 100.0, RngStream{5, 2}), ParameterError);

  const double two_pi = 2.0 * std::numbers::pi;
  auto lam = [two_pi](double t) { return std::exp(1.2 * std::sin(two_pi * t)); };
  const double expected = simpson(lam, 0.0, 100.0, 200000);
  CHECK(expected == doctest::Approx(100.0 * std::cyl_bessel_i(0.0, 1.2)).epsilon(1e-8));
  double total = 0.0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k)
    total += thinning_sample(lam, std::exp(1.2), 100.0, RngStream{9, static_cast<std::uint64_t>(k)}).events.size();
  CHECK(total / trials == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("homogeneous Poisson counts have mean equal to variance") {
  std::vector<double> counts;
  for (std::uint64_t k = 0; k < 400; ++k)
    counts.push_back(thinning_sample([](double) { return 5.0; }, 5.0, 10.0, RngStream{21, k}).events.size());
  const double m = mean(counts), v = variance(counts);
  // standard error of the sample variance of a Poisson count is about m*sqrt(2/(n-1))
  CHECK(std::abs(v - m) < 3.0 * m * std::sqrt(2.0 / 399.0));
}

TEST_CASE("telegraph sampler") {
  const double g = 1.0;
  auto sym = telegraph_sample(g, g, false, 1e4 / g, RngStream{2, 0});
  sym.check();
  CHECK(up_fraction(sym, false) == doctest::Approx(0.5).epsilon(0.02));

  const double nb = 0.9;
  auto th = telegraph_sample(g * nb, g * (nb + 1), false, 1e5, RngStream{2, 1});
  CHECK(up_fraction(th, false) == doctest::Approx(nb / (2 * nb + 1)).epsilon(0.02));

  // absorbing states: no exit rate from the initial state
  CHECK(telegraph_sample(0.0, 1.0, false, 100.0, RngStream{2, 2}).events.empty());
  CHECK(telegraph_sample(1.0, 0.0, true, 100.0, RngStream{2, 3}).events.empty());
  CHECK_THROWS_AS(telegraph_sample(0.0, 0.0, false, 1.0, RngStream{2, 4}), ParameterError);

  // alternation
  auto alt = telegraph_sample(2.0, 3.0, true, 50.0, RngStream{2, 5});
  for (std::size_t i = 0; i < alt.events.size(); ++i)
    CHECK(alt.events[i].label == (i % 2 == 0 ? EventLabel::jump_down : EventLabel::jump_up));
}

TEST_CASE("ensemble determinism across worker counts") {
  StochasticProcessSpec<2> spec;
  spec.drift = [](double, const auto& s) { return std::array<double, 2>{s[1], -s[0]}; };
  spec.diffusion = [](double, const auto&) { return std::array<double, 2>{0.0, 0.3}; };
  spec.initial = {1.0, 0.0};
  spec.dt = 1e-3;
  spec.horizon = 2.0;
  spec.labels = {"x", "y"};

  const auto one = run_ensemble(spec, 6, 42, 1);
  const auto many = run_ensemble(spec, 6, 42, 4);
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].states == many[k].states);
    CHECK(one[k].seed.stream_index == k);
  }
  Rng direct(RngStream{42, 0});
  CHECK(simulate(spec, direct).states == run_ensemble(spec, 1, 42)[0].states);
  one[0].check();
}

TEST_CASE("ensemble errors carry the trial index") {
  auto fn = [](Rng&, std::size_t k) -> int {
    if (k == 3) throw NumericalBlowup("nan", 5, 0.5);
    if (k == 5) throw ParameterError("bad");
    return static_cast<int>(k);
  };
  try {
    run_ensemble(8, 1, fn, 3);
    FAIL("expected TrialError");
  } catch (const TrialError& e) {
    CHECK(e.trial() == 3);
    CHECK(e.numerical());
  }
}
