#include "scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tickwork/laser.hpp"
#include "tickwork/metrics.hpp"
#include "tickwork/pendulum.hpp"
#include "tickwork/quartz.hpp"
#include "tickwork/shuttle.hpp"
#include "tickwork/stochastic.hpp"
#include "tickwork/thermal.hpp"

namespace tickwork::cli {

namespace {

using std::numbers::pi;

struct ModelSpec {
  json defaults;
  std::map<std::string, std::vector<std::string>> choices;  // string-valued params
};

const std::map<std::string, ModelSpec>& registry() {
  static const std::map<std::string, ModelSpec> r = {
      {"pendulum",
       {json{{"mode", "langevin"}, {"Gamma", 0.1}, {"mu", 0.1}, {"psi0", std::asin(0.1)}, {"sigma", 0.0},
             {"Dprime", 0.0}, {"x0", 0.1}, {"y0", 0.0}},
        {{"mode", {"langevin", "phase"}}}}},
      {"quartz",
       {json{{"gamma", 0.1}, {"eta", 8.0}, {"beta", 1.0}, {"omega", 1.0}, {"kappa", 1.0}, {"chi", 5.0}, {"D", 0.0},
             {"V0", 0.01}, {"X0", 0.0}, {"Y0", 0.0}},
        {}}},
      {"laser", {json{{"G", 100.0}, {"n_s", 1.0}, {"kappa", 4.0}, {"n_max", 0.0}, {"Omega", 0.0}}, {}}},
      {"kerr",
       {json{{"G", 100.0}, {"n_s", 1.0}, {"kappa", 4.0}, {"epsilon", 0.01}, {"delta", 0.0}, {"chi_kerr", 0.1},
             {"dither", 0.0}, {"alpha_re", 0.1}, {"alpha_im", 0.0}},
        {}}},
      {"shuttle",
       {json{{"mode", "trajectory"}, {"gamma_L", 0.1}, {"gamma_R", 0.1}, {"nu", 1.0}, {"eta", 1.0}, {"chi", 1.0},
             {"kappa", 0.1}, {"r_star", 0.0}, {"Omega", 1.0}, {"n0", 0.0}, {"X0", 0.1}, {"Y0", 0.0},
             {"fano_window", 20.0 * pi}},
        {{"mode", {"trajectory", "mean-field", "gated"}}}}},
      {"radiocarbon", {json{{"gamma", 1.0}, {"t", 100.0}}, {}}},
      {"mach", {json{{"T1", 10.0}, {"T2", 20.0}, {"T3", 30.0}, {"k", 1.0 / 3.0}}, {}}},
      {"tls-thermal", {json{{"epsilon", 1.0}, {"gamma", 1.0}, {"n_bar", 5.0}}, {}}},
      {"tls-readout",
       {json{{"epsilon", 1.0}, {"gamma", 0.1}, {"n_bar", 0.9}, {"Gamma_meas", 5.0}, {"Delta", 0.0}, {"eta_det", 1.0},
             {"initial_z", -1.0}},
        {}}},
      {"thermal-time", {json{{"epsilon", 1.0}, {"gamma", 1.0}, {"n_bar", 1.0}, {"coherence", 0.5}}, {}}},
  };
  return r;
}

const std::vector<std::string> kTopKeys{"model", "params", "run", "outputs", "out_path"};
const std::vector<std::string> kRunKeys{"dt", "horizon", "trials", "master_seed", "record_every"};
const std::vector<std::string> kOutputKeys{"trajectory", "events", "ledger", "metrics"};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

[[noreturn]] void unknown_key(const std::string& where, const std::string& key, const std::vector<std::string>& valid) {
  std::string msg = "unknown key \"" + key + "\" in " + where;
  const auto s = suggest_key(key, valid);
  if (!s.empty()) msg += "; did you mean \"" + s + "\"?";
  throw ConfigError(msg);
}

void check_keys(const json& obj, const std::string& where, const std::vector<std::string>& valid) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : obj.items())
    if (std::find(valid.begin(), valid.end(), k) == valid.end()) unknown_key(where, k, valid);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double P(const json& p, const char* key) { return p.at(key).get<double>(); }

pendulum::PendulumParams pendulum_params(const json& p) {
  pendulum::PendulumParams q;
  q.Gamma = P(p, "Gamma");
  q.mu = P(p, "mu");
  q.psi0 = P(p, "psi0");
  q.sigma = P(p, "sigma");
  q.Dprime = P(p, "Dprime");
  return q;
}

quartz::QuartzParams quartz_params(const json& p) {
  quartz::QuartzParams q;
  q.gamma = P(p, "gamma");
  q.eta = P(p, "eta");
  q.beta = P(p, "beta");
  q.omega = P(p, "omega");
  q.kappa = P(p, "kappa");
  q.chi = P(p, "chi");
  q.D = P(p, "D");
  return q;
}

laser::LaserParams laser_params(const json& p) {
  laser::LaserParams q;
  q.G = P(p, "G");
  q.n_s = P(p, "n_s");
  q.kappa = P(p, "kappa");
  if (p.contains("epsilon")) {
    q.epsilon = P(p, "epsilon");
    q.delta = P(p, "delta");
    q.chi_kerr = P(p, "chi_kerr");
    q.dither = P(p, "dither");
  }
  return q;
}

shuttle::ShuttleParams shuttle_params(const json& p) {
  shuttle::ShuttleParams q;
  q.gamma_L = P(p, "gamma_L");
  q.gamma_R = P(p, "gamma_R");
  q.nu = P(p, "nu");
  q.eta = P(p, "eta");
  q.chi = P(p, "chi");
  q.kappa = P(p, "kappa");
  return q;
}

thermal::TlsParams tls_params(const json& p) {
  thermal::TlsParams q;
  q.epsilon = P(p, "epsilon");
  q.gamma = P(p, "gamma");
  q.n_bar = P(p, "n_bar");
  if (p.contains("Gamma_meas")) {
    q.Gamma_meas = P(p, "Gamma_meas");
    q.Delta = P(p, "Delta");
    q.eta_det = P(p, "eta_det");
  }
  return q;
}

double shuttle_r_star(const json& p) {
  const double r = P(p, "r_star");
  return r > 0.0 ? r : shuttle::limit_cycle_amplitude(shuttle_params(p));
}

struct TrialResult {
  Trajectory traj;
  std::size_t stride = 1;  // rows of `traj` kept when writing
  bool has_traj = false;
  EventRecord events;
  bool has_events = false;
  CycleLedger ledger;
  bool has_ledger = false;
  json metrics = json::object();
};

json period_json(const metrics::TickSeries& ticks) {
  json j;
  j["ticks"] = ticks.size();
  if (ticks.size() >= 10) {
    const auto st = metrics::period_statistics(ticks);
    j["mean_period"] = st.mean;
    j["period_variance"] = st.variance;
    j["fractional_std"] = st.fractional_std;
    j["fano"] = st.fano;
    j["fano_window"] = st.fano_window;
    j["histogram"] = {{"edges", st.histogram.edges}, {"counts", st.histogram.counts}};
  } else if (ticks.size() >= 2) {
    j["mean_period"] = (ticks.tick_times.back() - ticks.tick_times.front()) / static_cast<double>(ticks.size() - 1);
  }
  return j;
}

TrialResult run_pendulum(const ScenarioConfig& c, Rng& rng) {
  const auto p = pendulum_params(c.params);
  TrialResult r;
  r.stride = c.run.record_every;
  r.has_traj = true;
  metrics::TickSeries ticks;
  if (c.params.at("mode") == "phase") {
    r.traj = pendulum::simulate_phase_on_cycle(p, c.run.dt, c.run.horizon, rng);
    const auto sw = pendulum::kick_switch_times(r.traj, p);
    for (std::size_t n = 0; n < sw.size(); n += 2) ticks.tick_times.push_back(sw[n]);
    r.ledger = pendulum::cycle_ledger(r.traj, p);
  } else {
    r.traj = pendulum::simulate_pendulum(p, c.run.dt, c.run.horizon, rng, {P(c.params, "x0"), P(c.params, "y0"), 1});
    ticks = metrics::extract_ticks(r.traj, "K", metrics::TickMode::kick_transition);
    r.ledger = pendulum::langevin_cycle_ledger(r.traj, p);
    // period statistics on the settled half of the run
    auto settled = ticks;
    std::erase_if(settled.tick_times, [&](double t) { return t < 0.5 * c.run.horizon; });
    settled.start = 0.5 * c.run.horizon;
    settled.end = c.run.horizon;
    r.metrics["periods"] = period_json(settled);
    try {
      r.metrics["amplitude"] = pendulum::oscillation_amplitude(r.traj, 0.5 * c.run.horizon);
    } catch (const InsufficientData&) {
      r.metrics["amplitude"] = nullptr;
    }
    r.metrics["limit_cycle_radius"] = pendulum::limit_cycle_radius(p, p.Dprime > 0.0);
  }
  ticks.end = c.run.horizon;
  r.has_ledger = true;
  if (!r.metrics.contains("periods")) r.metrics["periods"] = period_json(ticks);
  if (r.ledger.size() >= 2) {
    ticks.tick_times.resize(std::min(ticks.size(), r.ledger.size() + 1));
    if (ticks.size() == r.ledger.size() + 1) {
      const auto rep = metrics::accuracy_dissipation_report(r.ledger, ticks);
      r.metrics["accuracy_dissipation"] = {{"slope", rep.slope},
                                           {"mean_heat", rep.mean_heat},
                                           {"dissipation_rate", rep.dissipation_rate},
                                           {"fractional_period_std", rep.fractional_period_std}};
    }
  }
  return r;
}

TrialResult run_quartz(const ScenarioConfig& c, Rng& rng) {
  const auto p = quartz_params(c.params);
  TrialResult r;
  r.has_traj = true;
  r.traj = quartz::simulate_quartz(p, c.run.dt, c.run.horizon, rng,
                                   {P(c.params, "V0"), P(c.params, "X0"), P(c.params, "Y0")}, c.run.record_every);
  auto ticks = metrics::extract_ticks(r.traj, "X", metrics::TickMode::rising_zero_cross);
  std::erase_if(ticks.tick_times, [&](double t) { return t < 0.5 * c.run.horizon; });
  ticks.start = 0.5 * c.run.horizon;
  r.metrics["periods"] = period_json(ticks);
  return r;
}

TrialResult run_laser(const ScenarioConfig& c, Rng& rng) {
  const auto p = laser_params(c.params);
  const double n = laser::semiclassical_intensity(p);
  if (!(n > 0.0)) throw ConfigError("params: laser is below threshold (G n_s / kappa <= n_s), phase diffusion undefined");
  const double G = laser::phase_diffusion_rate(p.kappa, n);
  TrialResult r;
  r.has_traj = true;
  r.traj = laser::simulate_phase(G, c.run.dt, c.run.horizon, rng, P(c.params, "Omega"), c.run.record_every);
  const auto phi = r.traj.column("phi");
  r.metrics["Gamma"] = G;
  r.metrics["final_phase_offset"] = phi.back() - phi.front() + P(c.params, "Omega") * c.run.horizon;
  return r;
}

TrialResult run_kerr(const ScenarioConfig& c, Rng& rng) {
  const auto p = laser_params(c.params);
  TrialResult r;
  r.has_traj = true;
  r.traj = laser::simulate_semiclassical(p, c.run.dt, c.run.horizon, rng, true,
                                         {P(c.params, "alpha_re"), P(c.params, "alpha_im")}, c.run.record_every);
  try {
    r.metrics["frequency"] = laser::oscillation_frequency(r.traj, "im", 0.5 * c.run.horizon);
  } catch (const InsufficientData&) {
    r.metrics["frequency"] = nullptr;
  }
  r.metrics["intensity"] = laser::semiclassical_intensity(p);
  return r;
}

TrialResult run_shuttle(const ScenarioConfig& c, Rng& rng) {
  const auto p = shuttle_params(c.params);
  const auto mode = c.params.at("mode").get<std::string>();
  TrialResult r;
  if (mode == "mean-field") {
    r.has_traj = true;
    r.traj = shuttle::simulate_shuttle_ensemble(p, c.run.dt, c.run.horizon,
                                                {P(c.params, "n0"), {P(c.params, "X0"), P(c.params, "Y0")}},
                                                c.run.record_every);
    const auto X = r.traj.column("X");
    const auto I = r.traj.column("I");
    const std::size_t from = X.size() / 2;
    r.metrics["X_max"] = *std::max_element(X.begin() + from, X.end());
    r.metrics["X_min"] = *std::min_element(X.begin() + from, X.end());
    double s = 0.0;
    for (std::size_t i = from; i < I.size(); ++i) s += I[i];
    r.metrics["mean_current"] = s / static_cast<double>(I.size() - from);
    return r;
  }
  r.has_events = true;
  if (mode == "gated") {
    r.events = shuttle::simulate_gated_tunnelling(p, P(c.params, "r_star"), P(c.params, "Omega"), c.run.horizon, rng,
                                                  P(c.params, "n0") > 0.5);
  } else {
    auto run = shuttle::simulate_shuttle_trajectory(p, c.run.dt, c.run.horizon, rng,
                                                    {P(c.params, "n0"), {P(c.params, "X0"), P(c.params, "Y0")}},
                                                    c.run.record_every);
    r.traj = std::move(run.trajectory);
    r.has_traj = true;
    r.events = std::move(run.events);
    const auto X = r.traj.column("X");
    const auto Y = r.traj.column("Y");
    double E = 0.0;
    for (std::size_t i = X.size() / 2; i < X.size(); ++i) E += 0.5 * (X[i] * X[i] + Y[i] * Y[i]);
    E /= static_cast<double>(X.size() - X.size() / 2);
    r.metrics["mean_energy"] = E;
    r.metrics["amplitude"] = std::sqrt(2.0 * E);
    if (c.outputs.ledger) {
      r.ledger = shuttle::shuttle_ledger(r.events, p, shuttle_r_star(c.params), "nominal");
      r.has_ledger = true;
    }
  }
  const auto right = r.events.times(EventLabel::tunnel_right);
  r.metrics["tunnel_left"] = r.events.count(EventLabel::tunnel_left);
  r.metrics["tunnel_right"] = right.size();
  r.metrics["fano_right"] = metrics::windowed_fano(right, 0.0, c.run.horizon, P(c.params, "fano_window"));
  return r;
}

TrialResult run_radiocarbon(const ScenarioConfig& c, Rng& rng) {
  const double g = P(c.params, "gamma"), t = P(c.params, "t");
  TrialResult r;
  r.has_events = true;
  r.events = thinning_sample([g](double) { return g; }, g, t, rng);
  const auto est = thermal::radiocarbon_estimate(static_cast<double>(r.events.events.size()), g);
  r.metrics["count"] = r.events.events.size();
  r.metrics["t_est"] = est.estimate;
  r.metrics["relative_error"] = est.error_defined ? json(est.relative_error) : json(nullptr);
  return r;
}

TrialResult run_mach(const ScenarioConfig& c) {
  const std::array<double, 3> T0{P(c.params, "T1"), P(c.params, "T2"), P(c.params, "T3")};
  const double k = P(c.params, "k");
  TrialResult r;
  r.has_traj = true;
  r.traj = thermal::mach_trajectory(T0, k, c.run.dt, c.run.horizon, c.run.record_every);
  const double T1 = r.traj.at(r.traj.size() - 1, 0);
  r.metrics["T_final"] = {T1, r.traj.at(r.traj.size() - 1, 1), r.traj.at(r.traj.size() - 1, 2)};
  const auto est = thermal::mach_elapsed_time(T0, k, T1);
  r.metrics["tau_est"] = std::isfinite(est.estimate) ? json(est.estimate) : json(nullptr);
  r.metrics["tau_true"] = r.traj.times.back();
  return r;
}

TrialResult run_tls_thermal(const ScenarioConfig& c, Rng& rng) {
  const auto p = tls_params(c.params);
  TrialResult r;
  r.has_events = true;
  r.events = thermal::simulate_tls_telegraph(p, c.run.horizon, rng);
  const double N = static_cast<double>(r.events.count(EventLabel::jump_up));
  r.metrics["up_transitions"] = N;
  r.metrics["t_est"] = thermal::tls_time_estimate(N, p).estimate;
  r.metrics["T_est_high_temperature"] = thermal::tls_temperature_estimate(N, c.run.horizon, p).estimate;
  r.metrics["excited_fraction"] = up_fraction(r.events, false);
  return r;
}

TrialResult run_tls_readout(const ScenarioConfig& c, Rng& rng) {
  const auto p = tls_params(c.params);
  TrialResult r;
  r.has_traj = true;
  r.traj = thermal::simulate_readout_trajectory(
      p, c.run.dt, c.run.horizon, rng, {thermal::DensityMatrix::from_bloch(0, 0, P(c.params, "initial_z")), c.run.record_every});
  double dwell = NAN;
  if (p.n_bar > 0.0) dwell = thermal::mean_dwell_time(p);
  const auto det = thermal::detect_jumps(r.traj.times, r.traj.column("current"), thermal::default_jump_window(p), 0.0,
                                         0.5, dwell);
  r.events = det.events;
  r.has_events = true;
  r.metrics["detected_transitions"] = det.events.events.size();
  r.metrics["detected_rate"] = static_cast<double>(det.events.events.size()) / c.run.horizon;
  r.metrics["detected_excited_fraction"] = up_fraction(det.events, det.initial_up);
  r.metrics["warnings"] = det.warnings;
  return r;
}

TrialResult run_thermal_time(const ScenarioConfig& c) {
  const double eps = P(c.params, "epsilon"), g = P(c.params, "gamma"), nb = P(c.params, "n_bar");
  const double coh = P(c.params, "coherence");
  Eigen::MatrixXcd H(2, 2), rho(2, 2);
  H << 0.5 * eps, 0.0, 0.0, -0.5 * eps;
  rho << 0.5, coh, coh, 0.5;
  TrialResult r;
  r.has_traj = true;
  r.traj = Trajectory({"rho_ee", "re_rho_eg", "im_rho_eg", "abs_rho_eg"});
  auto push = [&](double t) {
    const std::array<double, 4> row{rho(0, 0).real(), rho(0, 1).real(), rho(0, 1).imag(), std::abs(rho(0, 1))};
    r.traj.append(t, row);
  };
  push(0.0);
  const auto steps = static_cast<std::size_t>(std::llround(c.run.horizon / c.run.dt));
  for (std::size_t k = 0; k < steps; ++k) {
    rho = thermal::thermal_time_step(rho, H, g, nb, c.run.dt);
    if ((k + 1) % c.run.record_every == 0) push(static_cast<double>(k + 1) * c.run.dt);
  }
  const double rate = g * nb;
  r.metrics["closed_form_decay_rate"] = rate * (1.0 - std::cos(eps / rate));
  if (coh != 0.0)
    r.metrics["decay_rate"] = -std::log(std::abs(rho(0, 1)) / std::abs(coh)) / (static_cast<double>(steps) * c.run.dt);
  return r;
}

TrialResult run_trial(const ScenarioConfig& c, Rng& rng) {
  const auto& m = c.model;
  if (m == "pendulum") return run_pendulum(c, rng);
  if (m == "quartz") return run_quartz(c, rng);
  if (m == "laser") return run_laser(c, rng);
  if (m == "kerr") return run_kerr(c, rng);
  if (m == "shuttle") return run_shuttle(c, rng);
  if (m == "radiocarbon") return run_radiocarbon(c, rng);
  if (m == "mach") return run_mach(c);
  if (m == "tls-thermal") return run_tls_thermal(c, rng);
  if (m == "tls-readout") return run_tls_readout(c, rng);
  return run_thermal_time(c);
}

json summarize(const ScenarioConfig& c, const std::vector<TrialResult>& res) {
  json s = json::object();
  auto collect = [&](const char* key) {
    std::vector<double> v;
    for (const auto& r : res)
      if (r.metrics.contains(key) && r.metrics[key].is_number()) v.push_back(r.metrics[key].get<double>());
    return v;
  };
  auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0, q = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) q += (x - m) * (x - m);
    return std::pair{m, v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0};
  };
  if (c.model == "radiocarbon") {
    const auto [m, sd] = mean_std(collect("t_est"));
    const double t = P(c.params, "t");
    s["mean_t_est"] = m;
    s["bias"] = (m - t) / t;
    s["relative_std"] = sd / m;
    s["expected_relative_std"] = 1.0 / std::sqrt(P(c.params, "gamma") * t);
  } else if (c.model == "laser") {
    const auto p = laser_params(c.params);
    const auto d = laser::steady_state_distribution(p, static_cast<std::size_t>(P(c.params, "n_max")));
    s["steady_state"] = {{"n_max", d.n_max()}, {"mean", d.mean()}, {"variance", d.variance()}, {"fano", d.fano()}};
    const auto off = collect("final_phase_offset");
    if (off.size() > 1) s["phase_variance_per_time"] = std::pow(mean_std(off).second, 2) / c.run.horizon;
  } else if (c.model == "tls-readout" || c.model == "tls-thermal") {
    const auto p = tls_params(c.params);
    s["oracle_excited_fraction"] = thermal::tls_excited_fraction(p);
    s["oracle_transition_rate"] = thermal::tls_transition_rate(p);
  }
  return s;
}

std::string trajectory_csv(const std::vector<TrialResult>& res) {
  std::string out;
  bool header = false;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    if (!r.has_traj) continue;
    if (!header) {
      out += "trial,t";
      for (const auto& l : r.traj.labels) out += "," + l;
      out += "\n";
      header = true;
    }
    for (std::size_t row = 0; row < r.traj.size(); row += r.stride) {
      out += std::to_string(i) + "," + format_number(r.traj.times[row]);
      for (std::size_t col = 0; col < r.traj.width(); ++col) out += "," + format_number(r.traj.at(row, col));
      out += "\n";
    }
  }
  return out;
}

std::string events_csv(const std::vector<TrialResult>& res) {
  std::string out = "trial,time,label\n";
  for (std::size_t i = 0; i < res.size(); ++i)
    for (const auto& e : res[i].events.events)
      out += std::to_string(i) + "," + format_number(e.time) + "," + std::string(to_string(e.label)) + "\n";
  return out;
}

std::string ledger_csv(const std::vector<TrialResult>& res) {
  std::string out = "trial,cycle,period,work,heat\n";
  for (std::size_t i = 0; i < res.size(); ++i)
    for (std::size_t k = 0; k < res[i].ledger.entries.size(); ++k) {
      const auto& e = res[i].ledger.entries[k];
      out += std::to_string(i) + "," + std::to_string(k) + "," + format_number(e.period) + "," + format_number(e.work) +
             "," + format_number(e.heat) + "\n";
    }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

json preset_config(const std::string& model, json params, json run, json outputs) {
  return json{{"model", model}, {"params", std::move(params)}, {"run", std::move(run)}, {"outputs", std::move(outputs)}};
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, spec] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates) {
  for (const auto& c : candidates)
    if (!c.empty() && (key.rfind(c, 0) == 0 || c.rfind(key, 0) == 0)) return c;
  std::string best;
  std::size_t best_d = 4;
  for (const auto& c : candidates) {
    const auto d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

ScenarioConfig parse_config(const json& j) {
  check_keys(j, "config", kTopKeys);
  if (!j.contains("model")) throw ConfigError("config: missing key \"model\"");
  if (!j["model"].is_string()) throw ConfigError("config.model must be a string");
  ScenarioConfig c;
  c.model = j["model"].get<std::string>();
  const auto it = registry().find(c.model);
  if (it == registry().end()) unknown_key("config.model", c.model, model_names());
  const auto& spec = it->second;

  c.params = spec.defaults;
  if (j.contains("params")) {
    std::vector<std::string> valid;
    for (const auto& [k, v] : spec.defaults.items()) valid.push_back(k);
    check_keys(j["params"], "params", valid);
    for (const auto& [k, v] : j["params"].items()) {
      if (spec.choices.count(k)) {
        const auto& opts = spec.choices.at(k);
        if (!v.is_string() || std::find(opts.begin(), opts.end(), v.get<std::string>()) == opts.end()) {
          std::string all;
          for (const auto& o : opts) all += (all.empty() ? "" : ", ") + o;
          throw ConfigError("params." + k + " must be one of: " + all);
        }
      } else if (!v.is_number()) {
        throw ConfigError("params." + k + " must be a number");
      }
      c.params[k] = v;
    }
  }
  if (j.contains("run")) {
    const auto& r = j["run"];
    check_keys(r, "run", kRunKeys);
    if (r.contains("dt")) c.run.dt = number(r, "dt", "run");
    if (r.contains("horizon")) c.run.horizon = number(r, "horizon", "run");
    if (r.contains("trials")) c.run.trials = count(r, "trials", "run");
    if (r.contains("master_seed")) c.run.master_seed = count(r, "master_seed", "run");
    if (r.contains("record_every")) c.run.record_every = count(r, "record_every", "run");
  }
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    check_keys(o, "outputs", kOutputKeys);
    auto flag = [&](const char* k, bool& dst) {
      if (!o.contains(k)) return;
      if (!o[k].is_boolean()) throw ConfigError(std::string("outputs.") + k + " must be true or false");
      dst = o[k].get<bool>();
    };
    flag("trajectory", c.outputs.trajectory);
    flag("events", c.outputs.events);
    flag("ledger", c.outputs.ledger);
    flag("metrics", c.outputs.metrics);
  }
  if (j.contains("out_path")) {
    if (!j["out_path"].is_string()) throw ConfigError("config.out_path must be a string");
    c.out_path = j["out_path"].get<std::string>();
  }
  return c;
}

void validate_config(const ScenarioConfig& c) {
  const auto& r = c.run;
  if (!(r.dt > 0.0) || !std::isfinite(r.dt)) throw ConfigError("run.dt must be finite and > 0");
  if (!(r.horizon > 0.0) || !std::isfinite(r.horizon)) throw ConfigError("run.horizon must be finite and > 0");
  if (r.horizon / r.dt > 1e9) throw ConfigError("run.horizon / run.dt exceeds 1e9 steps");
  if (r.trials < 1) throw ConfigError("run.trials must be >= 1");
  if (r.record_every < 1) throw ConfigError("run.record_every must be >= 1");
  for (const auto& [k, v] : c.params.items())
    if (v.is_number() && !std::isfinite(v.get<double>())) throw ConfigError("params." + k + " must be finite");

  const auto& p = c.params;
  auto wrap = [](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  const auto& m = c.model;
  wrap("params", [&] {
    if (m == "pendulum") {
      const auto q = pendulum_params(p);
      q.validate();
      if (p.at("mode") == "phase" && q.mu == 0.0) throw ConfigError("params.mu must be > 0 in phase mode");
    } else if (m == "quartz") {
      const auto q = quartz_params(p);
      q.validate();
      if (!(r.dt * q.gamma < 0.1)) throw ConfigError("run.dt: dt * gamma must be < 0.1");
    } else if (m == "laser") {
      const auto q = laser_params(p);
      q.validate();
      if (P(p, "n_max") < 0.0) throw ConfigError("params.n_max must be >= 0");
      laser::steady_state_distribution(q, static_cast<std::size_t>(P(p, "n_max")));
    } else if (m == "kerr") {
      const auto q = laser_params(p);
      q.validate();
      if (q.epsilon == 0.0 && P(p, "alpha_re") == 0.0 && P(p, "alpha_im") == 0.0)
        throw ConfigError("params.epsilon: Kerr flow needs epsilon > 0 or a nonzero initial amplitude");
    } else if (m == "shuttle") {
      const auto q = shuttle_params(p);
      q.validate();
      const auto mode = p.at("mode").get<std::string>();
      if (mode == "gated" && !(P(p, "r_star") >= 0.0 && P(p, "Omega") > 0.0))
        throw ConfigError("params.r_star >= 0 and params.Omega > 0 are required in gated mode");
      if (mode != "mean-field" && P(p, "n0") != 0.0 && P(p, "n0") != 1.0)
        throw ConfigError("params.n0 must be 0 or 1 outside mean-field mode");
      if (mode == "mean-field" && !(P(p, "n0") >= 0.0 && P(p, "n0") <= 1.0))
        throw ConfigError("params.n0 must lie in [0, 1]");
      if (!(P(p, "fano_window") > 0.0)) throw ConfigError("params.fano_window must be > 0");
      if (mode == "trajectory" && c.outputs.ledger) shuttle_r_star(p);
    } else if (m == "radiocarbon") {
      if (!(P(p, "gamma") > 0.0)) throw ConfigError("params.gamma must be > 0");
      if (!(P(p, "t") > 0.0)) throw ConfigError("params.t must be > 0");
    } else if (m == "mach") {
      if (!(P(p, "k") > 0.0)) throw ConfigError("params.k must be > 0");
    } else if (m == "tls-thermal") {
      const auto q = tls_params(p);
      q.validate();
      if (!(q.n_bar > 0.0)) throw ConfigError("params.n_bar must be > 0 for a thermal clock");
    } else if (m == "tls-readout") {
      const auto q = tls_params(p);
      q.validate();
      if (!(q.Gamma_meas > 0.0)) throw ConfigError("params.Gamma_meas must be > 0");
      if (!(r.dt * std::max(q.Gamma_meas, q.gamma * (q.n_bar + 1.0)) < 0.01))
        throw ConfigError("run.dt: dt * max(Gamma_meas, gamma (n_bar + 1)) must be < 0.01");
      if (!(std::abs(P(p, "initial_z")) <= 1.0)) throw ConfigError("params.initial_z must lie in [-1, 1]");
    } else if (m == "thermal-time") {
      if (!(P(p, "epsilon") > 0.0)) throw ConfigError("params.epsilon must be > 0");
      if (!(P(p, "gamma") * P(p, "n_bar") > 0.0)) throw ConfigError("params.gamma * params.n_bar must be > 0");
      if (!(std::abs(P(p, "coherence")) <= 0.5)) throw ConfigError("params.coherence must lie in [-0.5, 0.5]");
    }
  });
}

json to_json(const ScenarioConfig& c) {
  return json{{"model", c.model},
              {"params", c.params},
              {"run",
               {{"dt", c.run.dt},
                {"horizon", c.run.horizon},
                {"trials", c.run.trials},
                {"master_seed", c.run.master_seed},
                {"record_every", c.run.record_every}}},
              {"outputs",
               {{"trajectory", c.outputs.trajectory},
                {"events", c.outputs.events},
                {"ledger", c.outputs.ledger},
                {"metrics", c.outputs.metrics}}},
              {"out_path", c.out_path}};
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    const json traj_only = {{"trajectory", true}, {"metrics", true}};
    std::vector<Preset> v;
    v.push_back({"pendulum-kicked", "kicked pendulum: displacement and impulse (sin psi0 = 0.1, Gamma = mu = 0.1)",
                 preset_config("pendulum", {{"Gamma", 0.1}, {"mu", 0.1}, {"psi0", std::asin(0.1)}},
                               {{"dt", 1e-3}, {"horizon", 400.0}, {"record_every", 10}},
                               {{"trajectory", true}, {"ledger", true}, {"metrics", true}})});
    v.push_back({"pendulum-phase-paths", "five K(t) paths with phase diffusion (sin psi0 = 0.1, mu = Gamma = 1, sigma = 0.1)",
                 preset_config("pendulum",
                               {{"mode", "phase"}, {"Gamma", 1.0}, {"mu", 1.0}, {"psi0", std::asin(0.1)}, {"sigma", 0.1}},
                               {{"dt", 1e-3}, {"horizon", 30.0}, {"trials", 5}, {"record_every", 10}}, traj_only)});
    v.push_back({"pendulum-kick-ensemble", "ensemble mean of K(t), 100 samples (psi0 = 0, mu = Gamma = 1, sigma = 0.2)",
                 preset_config("pendulum", {{"mode", "phase"}, {"Gamma", 1.0}, {"mu", 1.0}, {"psi0", 0.0}, {"sigma", 0.2}},
                               {{"dt", 1e-2}, {"horizon", 30.0}, {"trials", 100}, {"record_every", 10}}, traj_only)});
    v.push_back({"pendulum-period-histogram", "period histogram over 300 trials (psi0 = 0, Gamma = mu = 0.1)",
                 preset_config("pendulum", {{"mode", "phase"}, {"Gamma", 0.1}, {"mu", 0.1}, {"psi0", 0.0}, {"sigma", 0.1}},
                               {{"dt", 1e-2}, {"horizon", 8.0}, {"trials", 300}},
                               {{"trajectory", false}, {"ledger", true}, {"metrics", true}})});
    v.push_back({"pendulum-work-period", "work vs period, first cycle of 50 trials (sin psi0 = 0.2, sigma = 0.1)",
                 preset_config("pendulum",
                               {{"mode", "phase"}, {"Gamma", 0.1}, {"mu", 0.1}, {"psi0", std::asin(0.2)}, {"sigma", 0.1}},
                               {{"dt", 1e-3}, {"horizon", 16.0}, {"trials", 50}},
                               {{"trajectory", false}, {"ledger", true}, {"metrics", true}})});
    v.push_back({"quartz-limit-cycle", "Schmitt trigger and quartz voltages (eta = 8, chi = 5, beta = 1)",
                 preset_config("quartz", json::object(), {{"dt", 1e-3}, {"horizon", 100.0}, {"record_every", 10}},
                               traj_only)});
    v.push_back({"laser-steady-state", "photon statistics and phase diffusion (G = 100, n_s = 1, kappa = 4)",
                 preset_config("laser", json::object(), {{"dt", 1e-2}, {"horizon", 50.0}, {"trials", 20}, {"record_every", 10}},
                               traj_only)});
    v.push_back({"kerr-self-pulsing", "Kerr self-pulsing, Im alpha (epsilon = 0.01, kappa = 4, G = 100, chi = 0.1)",
                 preset_config("kerr", json::object(), {{"dt", 1e-4}, {"horizon", 20.0}, {"record_every", 10}}, traj_only)});
    v.push_back({"shuttle-lc", "semiclassical shuttle limit cycle (gamma_L = gamma_R = 0.1, nu = eta = chi = 1, kappa = 0.1)",
                 preset_config("shuttle", {{"mode", "mean-field"}}, {{"dt", 1e-3}, {"horizon", 300.0}, {"record_every", 10}},
                               traj_only)});
    v.push_back({"shuttle-counting", "integrated right-tunnelling count under a prescribed cycle (gamma = 1, Omega = 2 pi, eta = 0.3)",
                 preset_config("shuttle",
                               {{"mode", "gated"}, {"gamma_L", 1.0}, {"gamma_R", 1.0}, {"eta", 0.3}, {"r_star", 2.0},
                                {"Omega", 2.0 * pi}, {"n0", 1.0}, {"fano_window", 1.0}},
                               {{"horizon", 50.0}, {"trials", 4}},
                               {{"trajectory", false}, {"events", true}, {"metrics", true}})});
    v.push_back({"mach-clock", "three-body Newton cooling clock", preset_config("mach", json::object(),
                                                                                {{"dt", 1e-3}, {"horizon", 5.0}, {"record_every", 10}},
                                                                                traj_only)});
    v.push_back({"radiocarbon", "Poisson decay counting estimator, 2000 trials",
                 preset_config("radiocarbon", json::object(), {{"horizon", 100.0}, {"trials", 2000}},
                               {{"trajectory", false}, {"metrics", true}})});
    v.push_back({"tls-telegraph", "thermal two-level telegraph clock (n_bar = 5)",
                 preset_config("tls-thermal", json::object(), {{"horizon", 1000.0}},
                               {{"trajectory", false}, {"events", true}, {"metrics", true}})});
    v.push_back({"tls-quantum-jumps", "conditional TLS energy with quantum jumps (N = 0.9, Gamma = 5, gamma = 0.1)",
                 preset_config("tls-readout", json::object(), {{"dt", 2e-4}, {"horizon", 500.0}, {"record_every", 50}},
                               {{"trajectory", true}, {"events", true}, {"metrics", true}})});
    v.push_back({"thermal-time", "stochastic-time map: intrinsic decoherence of a qubit",
                 preset_config("thermal-time", json::object(), {{"dt", 0.05}, {"horizon", 20.0}}, traj_only)});
    return v;
  }();
  return list;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  unknown_key("presets", name, names);
}

Artifacts run_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  auto res = run_ensemble(cfg.run.trials, cfg.run.master_seed, [&](Rng& rng, std::size_t) { return run_trial(cfg, rng); });

  Artifacts out;
  if (cfg.outputs.trajectory) {
    auto csv = trajectory_csv(res);
    if (!csv.empty()) out["trajectory.csv"] = std::move(csv);
  }
  if (cfg.outputs.events) out["events.csv"] = events_csv(res);
  if (cfg.outputs.ledger) out["ledger.csv"] = ledger_csv(res);
  if (cfg.outputs.metrics) {
    json m{{"model", cfg.model}, {"summary", summarize(cfg, res)}, {"trials", json::array()}};
    for (const auto& r : res) m["trials"].push_back(r.metrics);
    out["metrics.json"] = m.dump(2) + "\n";
    if (cfg.model == "laser") {
      const auto d = laser::steady_state_distribution(laser_params(cfg.params), static_cast<std::size_t>(P(cfg.params, "n_max")));
      std::string csv = "n,p\n";
      for (std::size_t n = 0; n < d.p.size(); ++n) csv += std::to_string(n) + "," + format_number(d.p[n]) + "\n";
      out["distribution.csv"] = std::move(csv);
    }
  }
  // out_path is left out so that re-running a manifest elsewhere reproduces it byte for byte
  json resolved = to_json(cfg);
  resolved.erase("out_path");
  json manifest{{"tool", "tickwork"}, {"format", 1}, {"config", resolved}, {"files", json::object()}};
  for (const auto& [name, content] : out) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a(content));
    manifest["files"][name] = {{"bytes", content.size()}, {"fnv1a64", hex}};
  }
  out["manifest.json"] = manifest.dump(2) + "\n";
  return out;
}

void write_artifacts(const Artifacts& files, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = dir / (name + ".tmp");
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      staged.push_back(tmp);
      f.write(content.data(), static_cast<std::streamsize>(content.size()));
      f.close();
      if (!f) throw Error("cannot write " + tmp.string());
    }
  } catch (...) {
    for (const auto& t : staged) fs::remove(t);
    throw;
  }
  for (const auto& [name, content] : files) fs::rename(dir / (name + ".tmp"), dir / name);
}

}  // namespace tickwork::cli
