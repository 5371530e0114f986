#include "tickwork/shuttle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace tickwork::shuttle {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

void check_exponent(double X, double eta, std::size_t step, double t) {
  if (!(std::abs(4.0 * eta * X) <= 700.0)) throw NumericalBlowup("tunnelling exponent |4 eta X| exceeds 700", step, t);
}

cplx alpha_rate(cplx a, double n, const ShuttleParams& p) {
  const cplx i{0.0, 1.0};
  return -i * p.nu * a - 0.5 * p.kappa * a + i * p.chi * n;
}

// Exact flow of alpha over dt at fixed occupation n (linear in alpha).
cplx alpha_step(cplx a, double n, double dt, const ShuttleParams& p) {
  const cplx lambda{-0.5 * p.kappa, -p.nu};
  const cplx fixed = -cplx{0.0, p.chi * n} / lambda;
  return fixed + (a - fixed) * std::exp(lambda * dt);
}

// Exact flow of n over dt at fixed position X (linear in n).
double occupation_step(double n, double X, double dt, const ShuttleParams& p) {
  const double e = std::exp(4.0 * p.eta * X);
  const double in = p.gamma_L / e, out = p.gamma_R * e;
  const double total = in + out;
  const double fixed = in / total;
  return fixed + (n - fixed) * std::exp(-total * dt);
}

std::map<std::string, double> provenance(const ShuttleParams& p) {
  return {{"gamma_L", p.gamma_L}, {"gamma_R", p.gamma_R}, {"nu", p.nu},
          {"eta", p.eta},         {"chi", p.chi},         {"kappa", p.kappa}};
}

double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

}  // namespace

void ShuttleParams::validate() const {
  if (!(gamma_L >= 0.0) || !(gamma_R >= 0.0)) throw ParameterError("tunnelling rates must be >= 0");
  if (gamma_L == 0.0 && gamma_R == 0.0) throw ParameterError("at least one tunnelling rate must be > 0");
  if (!(nu > 0.0) || !(kappa > 0.0)) throw ParameterError("nu and kappa must be > 0");
  if (!(eta >= 0.0) || !(chi >= 0.0)) throw ParameterError("eta and chi must be >= 0");
}

ShuttleDerivative shuttle_drift(const OccupationState& s, const ShuttleParams& p) {
  const double X = s.alpha.real();
  check_exponent(X, p.eta, 0, NAN);
  const double e = std::exp(4.0 * p.eta * X);
  return {p.gamma_L * (1.0 - s.n) / e - p.gamma_R * s.n * e, alpha_rate(s.alpha, s.n, p)};
}

double mean_current(const OccupationState& s, const ShuttleParams& p) {
  const double e = std::exp(4.0 * p.eta * s.alpha.real());
  return 0.5 * (p.gamma_L * (1.0 - s.n) / e + p.gamma_R * s.n * e);
}

Trajectory simulate_shuttle_ensemble(const ShuttleParams& p, double dt, double horizon, const OccupationState& initial,
                                     std::size_t record_every) {
  p.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  if (!(initial.n >= 0.0 && initial.n <= 1.0)) throw ParameterError("initial n must lie in [0, 1]");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj({"n", "X", "Y", "I"});
  traj.params = provenance(p);
  traj.reserve(steps / record_every + 1);

  OccupationState s = initial;
  auto push = [&](double t) {
    const std::array<double, 4> row{s.n, s.alpha.real(), s.alpha.imag(), mean_current(s, p)};
    traj.append(t, row);
  };
  push(0.0);

  // Strang splitting: half step of n at frozen X, full step of alpha at
  // frozen n, half step of n. Both sub-flows are exact, so the stiff
  // tunnelling rates near the turning points do not limit dt.
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    check_exponent(s.alpha.real(), p.eta, k, t);
    s.n = occupation_step(s.n, s.alpha.real(), 0.5 * dt, p);
    s.alpha = alpha_step(s.alpha, s.n, dt, p);
    check_exponent(s.alpha.real(), p.eta, k, t + dt);
    s.n = occupation_step(s.n, s.alpha.real(), 0.5 * dt, p);
    if (!std::isfinite(s.n) || !std::isfinite(s.alpha.real()) || !std::isfinite(s.alpha.imag()))
      throw NumericalBlowup("non-finite shuttle state", k, static_cast<double>(k + 1) * dt);
    if ((k + 1) % record_every == 0) push(static_cast<double>(k + 1) * dt);
  }
  return traj;
}

ShuttleRun simulate_shuttle_trajectory(const ShuttleParams& p, double dt, double horizon, Rng& rng,
                                       const OccupationState& initial, std::size_t record_every) {
  p.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  if (initial.n != 0.0 && initial.n != 1.0) throw ParameterError("trajectory mode needs n in {0, 1}");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  ShuttleRun run{Trajectory({"n", "X", "Y"}), EventRecord{}};
  run.trajectory.params = provenance(p);
  run.trajectory.seed = rng.id();
  run.trajectory.reserve(steps / record_every + 1);
  run.events.horizon = horizon;

  double n = initial.n;
  cplx a = initial.alpha;
  auto rate = [&](double X, double occ) {
    const double e = std::exp(4.0 * p.eta * X);
    return occ > 0.5 ? p.gamma_R * e : p.gamma_L / e;
  };
  auto push = [&](double t) {
    const std::array<double, 3> row{n, a.real(), a.imag()};
    run.trajectory.append(t, row);
  };
  push(0.0);

  double hazard = 0.0;
  double threshold = rng.exponential(1.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    check_exponent(a.real(), p.eta, k, t);
    const double r0 = rate(a.real(), n);
    const cplx next = alpha_step(a, n, dt, p);
    check_exponent(next.real(), p.eta, k, t + dt);
    const double r1 = rate(next.real(), n);
    const double inc = 0.5 * (r0 + r1) * dt;
    if (hazard + inc >= threshold) {
      // linear hazard within the step: solve r0 s + (r1 - r0) s^2 / (2 dt) = threshold - hazard
      const double need = threshold - hazard;
      double s = dt;
      const double c = (r1 - r0) / (2.0 * dt);
      if (std::abs(c) * dt < 1e-12 * (r0 + 1e-300)) {
        s = need / r0;
      } else {
        const double disc = r0 * r0 + 4.0 * c * need;
        s = (-r0 + std::sqrt(std::max(disc, 0.0))) / (2.0 * c);
      }
      s = std::clamp(s, 0.0, dt);
      run.events.events.push_back({t + s, n > 0.5 ? EventLabel::tunnel_right : EventLabel::tunnel_left});
      // alpha up to the jump with the old occupation, then the rest with the new one
      a = alpha_step(a, n, s, p);
      n = 1.0 - n;
      if (dt - s > 0.0) a = alpha_step(a, n, dt - s, p);
      hazard = 0.0;
      threshold = rng.exponential(1.0);
    } else {
      hazard += inc;
      a = next;
    }
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw NumericalBlowup("non-finite oscillator amplitude", k, t + dt);
    if ((k + 1) % record_every == 0) push(t + dt);
  }
  return run;
}

EventRecord simulate_gated_tunnelling(const ShuttleParams& p, double r_star, double Omega, double horizon, Rng& rng,
                                      bool initially_occupied) {
  p.validate();
  if (!(r_star >= 0.0) || !(Omega > 0.0) || !(horizon > 0.0))
    throw ParameterError("r_star >= 0, Omega > 0 and horizon > 0 are required");
  const double span = 4.0 * p.eta * r_star;
  if (span > 700.0) throw NumericalBlowup("tunnelling exponent 4 eta r* exceeds 700", 0, 0.0);
  const double bound = std::max(p.gamma_L, p.gamma_R) * std::exp(span);

  EventRecord rec;
  rec.horizon = horizon;
  bool occupied = initially_occupied;
  double t = 0.0;
  while (true) {
    t += rng.exponential(bound);
    if (t > horizon) break;
    const double e = std::exp(span * std::sin(Omega * t));
    const double lam = occupied ? p.gamma_R * e : p.gamma_L / e;
    if (rng.uniform() * bound < lam) {
      rec.events.push_back({t, occupied ? EventLabel::tunnel_right : EventLabel::tunnel_left});
      occupied = !occupied;
    }
  }
  return rec;
}

std::vector<TranscendentalRoot> transcendental_roots(double mu) {
  if (!(mu > 0.0)) throw ParameterError("mu must be > 0");
  if (!(mu < 0.5)) throw NoLimitCycle("e^{mu x^2} = cosh x has no nonzero root for mu >= 1/2");

  // h(x) = mu x^2 - ln cosh x is negative just above 0 (h ~ (mu - 1/2) x^2)
  // and positive for large x; the log form avoids overflow.
  auto h = [mu](double x) { return mu * x * x - log_cosh(x); };
  double hi = 1.0;
  while (h(hi) <= 0.0) hi *= 2.0;
  double lo = hi;
  while (h(lo) > 0.0 && lo > 1e-150) lo *= 0.5;
  if (!(h(lo) < 0.0)) throw NumericalBlowup("could not bracket the nonzero root", 0, 0.0);
  // bisection down to adjacent doubles (well below 1e-10)
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  auto residual = [mu](double x) { return std::abs(std::exp(mu * x * x) - std::cosh(x)); };
  const double x = residual(lo) <= residual(hi) ? lo : hi;
  return {{0.0, false}, {x, true}};
}

double transcendental_mu(const ShuttleParams& p) {
  if (!(p.eta > 0.0) || !(p.chi > 0.0)) throw ParameterError("eta and chi must be > 0");
  return p.kappa * pi / (4.0 * p.eta * p.chi);
}

double limit_cycle_amplitude(const ShuttleParams& p) {
  p.validate();
  const auto roots = transcendental_roots(transcendental_mu(p));
  for (const auto& r : roots)
    if (r.stable && r.x > 0.0) return r.x / p.eta;
  throw NoLimitCycle("no stable nonzero root");
}

std::pair<double, double> tunneling_intensities(double t, double r_star, double Omega, const ShuttleParams& p) {
  if (p.gamma_L != p.gamma_R) throw UnsupportedCase("tunneling_intensities requires gamma_L == gamma_R");
  const double e = std::exp(4.0 * p.eta * r_star * std::sin(Omega * t));
  return {p.gamma_L / e, p.gamma_R * e};
}

double waiting_time_survival(double t, const ShuttleParams& p, double r_star, double Omega) {
  if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
  if (t == 0.0) return 1.0;
  auto lam = [&](double s) { return tunneling_intensities(s, r_star, Omega, p).second; };
  // one panel per half period keeps the integrand smooth on each piece
  const double half = pi / Omega;
  double integral = 0.0;
  for (double a = 0.0; a < t; a += half) {
    const double b = std::min(t, a + half);
    integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(lam, a, b, 10, 1e-13);
  }
  return std::exp(-integral);
}

CycleWork shuttle_cycle_work(double T_k, const ShuttleParams& p, double r_star) {
  if (!(T_k > 0.0)) throw ParameterError("T_k must be > 0");
  CycleWork w;
  w.work = 2.0 * p.chi * r_star * T_k / pi;
  w.heat_nominal = w.work / p.kappa;
  w.heat_balance = w.work;
  return w;
}

double average_heat(double tau, const ShuttleParams& p, double r_star) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
  return 2.0 * p.chi * r_star * tau / (pi * p.kappa) * p.gamma_L / (p.gamma_L + p.gamma_R);
}

CycleLedger shuttle_ledger(const EventRecord& events, const ShuttleParams& p, double r_star,
                           const std::string& convention) {
  if (convention != "nominal" && convention != "balance")
    throw ParameterError("heat convention must be 'nominal' or 'balance'");
  CycleLedger ledger;
  ledger.heat_convention = convention;
  ledger.params = provenance(p);
  ledger.params["r_star"] = r_star;
  double entered = NAN;
  for (const auto& e : events.events) {
    if (e.label == EventLabel::tunnel_left) {
      entered = e.time;
    } else if (e.label == EventLabel::tunnel_right && !std::isnan(entered)) {
      const double T = e.time - entered;
      if (T > 0.0) {
        const auto w = shuttle_cycle_work(T, p, r_star);
        ledger.entries.push_back({T, w.work, convention == "nominal" ? w.heat_nominal : w.heat_balance});
      }
      entered = NAN;
    }
  }
  return ledger;
}

}  // namespace tickwork::shuttle
