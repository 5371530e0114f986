#include "tickwork/thermal.hpp"

#include <algorithm>
#include <complex>
#include <numeric>

#include "tickwork/error.hpp"
#include "tickwork/stochastic.hpp"

namespace tickwork::thermal {

namespace {

using cplx = std::complex<double>;

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

std::map<std::string, double> provenance(const TlsParams& p) {
  return {{"epsilon", p.epsilon}, {"gamma", p.gamma},         {"n_bar", p.n_bar},
          {"Delta", p.Delta},     {"Gamma_meas", p.Gamma_meas}, {"eta_det", p.eta_det}};
}

Eigen::Matrix2cd lindblad_rhs(const Eigen::Matrix2cd& r, const TlsParams& p) {
  const double w = p.Delta + p.epsilon;
  const double down = p.gamma * (p.n_bar + 1.0), up = p.gamma * p.n_bar;
  Eigen::Matrix2cd d;
  // -i w [sz, rho]: diagonal untouched, rho_eg picks up -2 i w
  d(0, 0) = -down * r(0, 0) + up * r(1, 1);
  d(1, 1) = -d(0, 0);
  const double decay = 0.5 * (down + up) + 2.0 * p.Gamma_meas;
  d(0, 1) = (cplx{0.0, -2.0 * w} - decay) * r(0, 1);
  d(1, 0) = std::conj(d(0, 1));
  return d;
}

void push_state(Trajectory& traj, double t, const Eigen::Matrix2cd& r, const double* current) {
  std::array<double, 5> row{r(0, 0).real(), r(0, 1).real(), r(0, 1).imag(), (r(0, 0) - r(1, 1)).real(),
                            current ? *current : 0.0};
  traj.append(t, std::span<const double>(row.data(), current ? 5 : 4));
}

}  // namespace

void TlsParams::validate() const {
  if (!(epsilon > 0.0) || !(gamma > 0.0)) throw ParameterError("epsilon and gamma must be > 0");
  if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw ParameterError("n_bar must be finite and >= 0");
  if (!(Gamma_meas >= 0.0)) throw ParameterError("Gamma_meas must be >= 0");
  if (!std::isfinite(Delta)) throw ParameterError("Delta must be finite");
  if (!(eta_det > 0.0 && eta_det <= 1.0)) throw ParameterError("eta_det must lie in (0, 1]");
  if (std::isfinite(beta) && !close(n_bar, occupation(beta, epsilon), 1e-9))
    throw ParameterError("n_bar inconsistent with beta and epsilon");
  if (std::isfinite(chi_disp) && std::isfinite(E_drive) && std::isfinite(kappa_cav)) {
    if (!(kappa_cav > 0.0)) throw ParameterError("kappa_cav must be > 0");
    const double D = 4.0 * chi_disp * E_drive * E_drive / (kappa_cav * kappa_cav);
    if (!close(Delta, D, 1e-9)) throw ParameterError("Delta inconsistent with 4 chi E^2 / kappa^2");
    if (!close(Gamma_meas, 4.0 * D * chi_disp / kappa_cav, 1e-9))
      throw ParameterError("Gamma_meas inconsistent with 4 Delta chi / kappa");
  }
}

double TlsParams::occupation(double beta, double epsilon) {
  if (!(beta >= 0.0) || !(epsilon > 0.0)) throw ParameterError("beta >= 0 and epsilon > 0 are required");
  if (beta == 0.0) return INFINITY;
  return 1.0 / std::expm1(beta * epsilon);
}

TlsParams TlsParams::with_temperature(double beta_) const {
  TlsParams q = *this;
  q.beta = beta_;
  q.n_bar = occupation(beta_, epsilon);
  return q;
}

TlsParams TlsParams::with_readout(double chi, double E, double kappa) const {
  if (!(kappa > 0.0)) throw ParameterError("kappa_cav must be > 0");
  TlsParams q = *this;
  q.chi_disp = chi;
  q.E_drive = E;
  q.kappa_cav = kappa;
  q.Delta = 4.0 * chi * E * E / (kappa * kappa);
  q.Gamma_meas = 4.0 * q.Delta * chi / kappa;
  return q;
}

DensityMatrix DensityMatrix::excited() { return from_bloch(0.0, 0.0, 1.0); }
DensityMatrix DensityMatrix::ground() { return from_bloch(0.0, 0.0, -1.0); }

DensityMatrix DensityMatrix::from_bloch(double x, double y, double z) {
  DensityMatrix d;
  d.m << cplx{0.5 * (1.0 + z), 0.0}, cplx{0.5 * x, -0.5 * y}, cplx{0.5 * x, 0.5 * y}, cplx{0.5 * (1.0 - z), 0.0};
  return d;
}

void DensityMatrix::check() const {
  if (!m.allFinite()) throw ParameterError("density matrix has non-finite entries");
  if ((m - m.adjoint()).norm() > 1e-10) throw ParameterError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > 1e-9) throw ParameterError("density matrix trace differs from 1");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ParameterError("density matrix has a negative eigenvalue");
}

EstimateRecord radiocarbon_estimate(double N, double gamma) {
  if (!(N >= 0.0)) throw ParameterError("N must be >= 0");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be > 0");
  EstimateRecord r;
  r.inputs = {{"N", N}, {"gamma", gamma}};
  r.estimate = N / gamma;
  if (N > 0.0) {
    r.relative_error = 1.0 / std::sqrt(gamma * r.estimate);
    r.error_defined = true;
  }
  return r;
}

std::size_t poisson_count(double rate, double t, Rng& rng) {
  if (!(rate >= 0.0) || !(t >= 0.0)) throw ParameterError("rate and t must be >= 0");
  if (rate == 0.0) return 0;
  std::size_t n = 0;
  for (double s = rng.exponential(rate); s <= t; s += rng.exponential(rate)) ++n;
  return n;
}

namespace {

std::array<double, 3> cooling(const std::array<double, 3>& T, double k) {
  const double s = T[0] + T[1] + T[2];
  return {k * (s - 3.0 * T[0]), k * (s - 3.0 * T[1]), k * (s - 3.0 * T[2])};
}

std::array<double, 3> rk4_cooling(const std::array<double, 3>& T, double k, double h) {
  auto add = [](const std::array<double, 3>& a, const std::array<double, 3>& b, double c) {
    return std::array<double, 3>{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  const auto k1 = cooling(T, k);
  const auto k2 = cooling(add(T, k1, 0.5 * h), k);
  const auto k3 = cooling(add(T, k2, 0.5 * h), k);
  const auto k4 = cooling(add(T, k3, h), k);
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = T[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

void check_mach(const std::array<double, 3>& T, double k, double dt) {
  if (!(k > 0.0)) throw ParameterError("cooling constant k must be > 0");
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  for (double x : T)
    if (!std::isfinite(x)) throw ParameterError("temperatures must be finite");
}

}  // namespace

MachState mach_clock(const std::array<double, 3>& T_init, double k, double t, double dt) {
  check_mach(T_init, k, dt);
  if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
  MachState s{T_init, 0.0};
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt));
  const double h = steps ? t / static_cast<double>(steps) : 0.0;
  for (std::size_t i = 0; i < steps; ++i) s.T = rk4_cooling(s.T, k, h);
  s.time = t;
  return s;
}

Trajectory mach_trajectory(const std::array<double, 3>& T_init, double k, double dt, double horizon,
                           std::size_t record_every) {
  check_mach(T_init, k, dt);
  if (!(horizon > 0.0)) throw ParameterError("horizon must be > 0");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj({"T1", "T2", "T3"});
  traj.params = {{"k", k}, {"T1_0", T_init[0]}, {"T2_0", T_init[1]}, {"T3_0", T_init[2]}};
  traj.reserve(steps / record_every + 1);
  auto T = T_init;
  traj.append(0.0, T);
  for (std::size_t i = 0; i < steps; ++i) {
    T = rk4_cooling(T, k, dt);
    if ((i + 1) % record_every == 0) traj.append(static_cast<double>(i + 1) * dt, T);
  }
  return traj;
}

EstimateRecord mach_elapsed_time(const std::array<double, 3>& T_init, double k, double T1) {
  check_mach(T_init, k, 1.0);
  const double Tbar = (T_init[0] + T_init[1] + T_init[2]) / 3.0;
  const double A = Tbar - T_init[0];
  EstimateRecord r;
  r.inputs = {{"k", k}, {"T1", T1}, {"A", A}, {"Tbar", Tbar}};
  if (A == 0.0) {
    r.estimate = NAN;
    return r;
  }
  const double ratio = (Tbar - T1) / A;
  if (!(ratio > 0.0 && ratio <= 1.0)) throw DomainError("T1 is not reachable from the initial temperatures");
  r.estimate = -std::log(ratio) / (3.0 * k);
  if (r.estimate > 0.0) {
    r.relative_error = 1.0 / (3.0 * k * r.estimate);
    r.error_defined = true;
  }
  return r;
}

EstimateRecord tls_time_estimate(double N, const TlsParams& p, bool high_temperature) {
  p.validate();
  if (!(N >= 0.0)) throw ParameterError("N must be >= 0");
  double rate = p.gamma * p.n_bar;
  if (high_temperature) {
    if (!std::isfinite(p.beta)) throw ParameterError("high-temperature estimate needs beta");
    rate = p.gamma / (p.beta * p.epsilon);
  }
  if (!(rate > 0.0)) throw DomainError("no thermal transitions (n_bar = 0): time estimate undefined");
  EstimateRecord r;
  r.inputs = {{"N", N}, {"gamma", p.gamma}, {"n_bar", p.n_bar}, {"epsilon", p.epsilon}};
  if (std::isfinite(p.beta)) r.inputs["beta"] = p.beta;
  r.estimate = N / rate;
  if (N > 0.0) {
    r.relative_error = 1.0 / std::sqrt(N);
    r.error_defined = true;
  }
  return r;
}

EstimateRecord tls_temperature_estimate(double N, double t, const TlsParams& p) {
  p.validate();
  if (!(N >= 0.0)) throw ParameterError("N must be >= 0");
  if (!(t > 0.0)) throw ParameterError("t must be > 0");
  EstimateRecord r;
  r.inputs = {{"N", N}, {"t", t}, {"gamma", p.gamma}, {"epsilon", p.epsilon}};
  r.estimate = p.epsilon * N / (p.gamma * t);
  if (N > 0.0) {
    r.relative_error = 1.0 / std::sqrt(N);
    r.error_defined = true;
  }
  return r;
}

double tls_duality_constant(double N, const TlsParams& p) {
  p.validate();
  return p.epsilon * N / p.gamma;
}

EventRecord simulate_tls_telegraph(const TlsParams& p, double horizon, Rng& rng, bool initially_excited) {
  p.validate();
  return telegraph_sample(p.gamma * p.n_bar, p.gamma * (p.n_bar + 1.0), initially_excited, horizon, rng);
}

double tls_excited_fraction(const TlsParams& p) {
  p.validate();
  return p.n_bar / (2.0 * p.n_bar + 1.0);
}

double tls_transition_rate(const TlsParams& p) {
  const double pe = tls_excited_fraction(p);
  return p.gamma * p.n_bar * (1.0 - pe) + p.gamma * (p.n_bar + 1.0) * pe;
}

DensityMatrix thermal_state(double beta, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(beta >= 0.0)) throw ParameterError("beta must be >= 0");
  const double th = std::tanh(0.5 * beta * epsilon);
  return DensityMatrix::from_bloch(0.0, 0.0, -th);
}

Trajectory simulate_readout_trajectory(const TlsParams& p, double dt, double horizon, Rng& rng,
                                       const ReadoutOptions& opts) {
  p.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (!(dt * std::max(p.Gamma_meas, p.gamma * (p.n_bar + 1.0)) < 0.01))
    throw ParameterError("dt max(Gamma, gamma(N+1)) must be < 0.01");
  if (!(p.Gamma_meas > 0.0)) throw ParameterError("readout needs Gamma_meas > 0");
  if (opts.record_every == 0) throw ParameterError("record_every must be >= 1");
  opts.initial.check();

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj({"rho_ee", "re_rho_eg", "im_rho_eg", "sz", "current"});
  traj.params = provenance(p);
  traj.seed = rng.id();
  traj.reserve(steps / opts.record_every + 1);

  const double G = p.Gamma_meas, eta = p.eta_det;
  const double down = p.gamma * (p.n_bar + 1.0), up = p.gamma * p.n_bar;
  const double w = p.Delta + p.epsilon;
  const double sq = std::sqrt(eta * G);
  const double sdt = std::sqrt(dt);

  double ee = opts.initial.m(0, 0).real(), gg = opts.initial.m(1, 1).real();
  cplx eg = opts.initial.m(0, 1);
  {
    const double z0 = ee - gg;
    Eigen::Matrix2cd r;
    r << ee, eg, std::conj(eg), gg;
    push_state(traj, 0.0, r, &z0);
  }

  // Every operator is diagonal in (e, g) except s-/s+, so the Kraus update
  // reduces to scalar arithmetic on the three independent entries.
  const cplx a_e = cplx{0.5 * (G + down), w} * dt;
  const cplx a_g = cplx{0.5 * (G + up), -w} * dt;
  double block = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double z = ee - gg;
    const double dW = sdt * rng.normal();
    const double dy = 2.0 * sq * z * dt + dW;
    const double second = 0.5 * eta * G * (dy * dy - dt);
    const cplx me = 1.0 - a_e + sq * dy + second;
    const cplx mg = 1.0 - a_g - sq * dy + second;
    const double lost = (1.0 - eta) * G * dt;
    const double nee = std::norm(me) * ee + lost * ee + up * dt * gg;
    const double ngg = std::norm(mg) * gg + lost * gg + down * dt * ee;
    const cplx neg = me * std::conj(mg) * eg - lost * eg;
    const double tr = nee + ngg;
    if (!(tr > 0.0) || !std::isfinite(tr))
      throw NumericalBlowup("conditional state lost its trace", k, static_cast<double>(k + 1) * dt);
    ee = nee / tr;
    gg = ngg / tr;
    eg = neg / tr;
    if (ee * gg - std::norm(eg) < -1e-8)
      throw NumericalBlowup("conditional state lost positivity", k, static_cast<double>(k + 1) * dt);

    block += z + dW / (sq * dt);
    if ((k + 1) % opts.record_every == 0) {
      const double I = block / static_cast<double>(opts.record_every);
      block = 0.0;
      Eigen::Matrix2cd r;
      r << ee, eg, std::conj(eg), gg;
      push_state(traj, static_cast<double>(k + 1) * dt, r, &I);
    }
  }
  return traj;
}

Trajectory unconditional_master_equation(const TlsParams& p, const DensityMatrix& rho0, double dt, double horizon,
                                         std::size_t record_every) {
  p.validate();
  rho0.check();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ParameterError("dt and horizon must be > 0");
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj({"rho_ee", "re_rho_eg", "im_rho_eg", "sz"});
  traj.params = provenance(p);
  traj.reserve(steps / record_every + 1);
  Eigen::Matrix2cd r = rho0.m;
  push_state(traj, 0.0, r, nullptr);
  for (std::size_t k = 0; k < steps; ++k) {
    const Eigen::Matrix2cd k1 = lindblad_rhs(r, p);
    const Eigen::Matrix2cd k2 = lindblad_rhs(r + 0.5 * dt * k1, p);
    const Eigen::Matrix2cd k3 = lindblad_rhs(r + 0.5 * dt * k2, p);
    const Eigen::Matrix2cd k4 = lindblad_rhs(r + dt * k3, p);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!r.allFinite()) throw NumericalBlowup("non-finite density matrix", k, static_cast<double>(k + 1) * dt);
    if ((k + 1) % record_every == 0) push_state(traj, static_cast<double>(k + 1) * dt, r, nullptr);
  }
  return traj;
}

JumpDetection detect_jumps(std::span<const double> times, std::span<const double> current, double window,
                           double threshold, double hysteresis, double expected_dwell) {
  if (times.size() != current.size()) throw ParameterError("times and current differ in length");
  if (times.size() < 2) throw InsufficientData("current record needs at least two samples");
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw ParameterError("times must increase");
  if (!(window >= h)) throw ParameterError("filter window shorter than the sample spacing");
  if (!(hysteresis >= 0.0)) throw ParameterError("hysteresis must be >= 0");

  const std::size_t n = current.size();
  const auto half = static_cast<std::size_t>(std::llround(0.5 * window / h));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + current[i];

  JumpDetection out;
  out.filtered.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    out.filtered[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }

  // Schmitt-style decision: a state change needs the filtered current to
  // leave the band threshold +- hysteresis; the event is placed at the last
  // crossing of the threshold itself.
  const auto& f = out.filtered;
  out.events.horizon = times.back();
  out.initial_up = f[0] > threshold;
  bool up = out.initial_up;
  double last_cross = times[0];
  for (std::size_t i = 1; i < n; ++i) {
    if ((f[i - 1] > threshold) != (f[i] > threshold)) {
      const double s = (threshold - f[i - 1]) / (f[i] - f[i - 1]);
      last_cross = times[i - 1] + s * (times[i] - times[i - 1]);
    }
    const bool flip = up ? f[i] < threshold - hysteresis : f[i] > threshold + hysteresis;
    if (!flip) continue;
    up = !up;
    out.events.events.push_back({last_cross, up ? EventLabel::jump_up : EventLabel::jump_down});
  }

  const double span = times.back() - times.front();
  const double dwell = span / static_cast<double>(out.events.events.size() + 1);
  if (window > dwell)
    out.warnings.push_back("filter window " + std::to_string(window) + " exceeds the mean detected dwell time " +
                           std::to_string(dwell) + "; jump detection is unreliable");
  if (std::isfinite(expected_dwell) && window > expected_dwell)
    out.warnings.push_back("filter window " + std::to_string(window) + " exceeds the expected mean dwell time " +
                           std::to_string(expected_dwell) + "; jump detection is unreliable");
  return out;
}

double default_jump_window(const TlsParams& p) {
  p.validate();
  if (!(p.Gamma_meas > 0.0)) throw ParameterError("Gamma_meas must be > 0");
  return 4.0 / (p.eta_det * p.Gamma_meas);
}

double mean_dwell_time(const TlsParams& p) {
  p.validate();
  if (!(p.n_bar > 0.0)) throw DomainError("no upward transitions at n_bar = 0");
  return 0.5 * (1.0 / (p.gamma * p.n_bar) + 1.0 / (p.gamma * (p.n_bar + 1.0)));
}

double tolman_product(double T0, double g44) {
  if (!(g44 > 0.0)) throw ParameterError("g44 must be > 0");
  if (!(T0 >= 0.0)) throw ParameterError("T0 must be >= 0");
  return T0 * std::sqrt(g44);
}

double moving_temperature(double T0, double v, double c) {
  if (!(c > 0.0)) throw ParameterError("c must be > 0");
  if (!(std::abs(v) < c)) throw ParameterError("|v| must be below c");
  if (!(T0 >= 0.0)) throw ParameterError("T0 must be >= 0");
  return T0 * std::sqrt(1.0 - (v / c) * (v / c));
}

Eigen::MatrixXcd thermal_time_step(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& H, double gamma,
                                   double n_bar, double dt) {
  const auto d = H.rows();
  if (H.cols() != d || rho.rows() != d || rho.cols() != d) throw ParameterError("rho and H must be square and equal in size");
  if (d < 1 || d > 8) throw ParameterError("dimension must lie in [1, 8]");
  if ((H - H.adjoint()).norm() > 1e-12 * std::max(1.0, H.norm())) throw ParameterError("H is not Hermitian");
  const double r = gamma * n_bar;
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("gamma n_bar must be finite and > 0");
  if (!(dt >= 0.0)) throw ParameterError("dt must be >= 0");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::MatrixXcd& V = es.eigenvectors();
  const Eigen::VectorXd& E = es.eigenvalues();
  Eigen::MatrixXcd x = V.adjoint() * rho * V;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      if (j == k) continue;
      const cplx phase = std::exp(cplx{0.0, -(E(j) - E(k)) / r});
      x(j, k) *= std::exp(r * (phase - 1.0) * dt);
    }
  Eigen::MatrixXcd out = V * x * V.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace tickwork::thermal
