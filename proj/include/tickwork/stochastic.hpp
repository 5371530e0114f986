#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "tickwork/error.hpp"
#include "tickwork/random.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork {

/// n independent Wiener increments with variance dt.
std::vector<double> wiener_increments(RngStream stream, std::size_t n, double dt);

/// One Euler-Maruyama step with diagonal noise:
/// x + drift(x) dt + diffusion(x) .* dW.
///
/// `drift` and `diffusion` map a state to a state-shaped vector. Any
/// non-finite component of the result raises NumericalBlowup tagged with
/// `step` and `time`.
template <class State, class Drift, class Diffusion>
State ito_step(const State& x, Drift&& drift, Diffusion&& diffusion, double dt, const State& dW,
               std::size_t step = 0, double time = NAN) {
  if (!(dt > 0.0)) throw ParameterError("ito_step: dt must be positive");
  const State a = drift(x);
  const State b = diffusion(x);
  State out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x[i] + a[i] * dt + b[i] * dW[i];
    if (!std::isfinite(out[i])) throw NumericalBlowup("non-finite state component " + std::to_string(i), step, time);
  }
  return out;
}

/// Inhomogeneous Poisson process on [0, horizon] by Lewis-Shedler thinning.
/// Throws ParameterError if intensity(t) exceeds `bound` at a proposal.
EventRecord thinning_sample(const std::function<double(double)>& intensity, double bound, double horizon, Rng& rng,
                            EventLabel label = EventLabel::tick);
EventRecord thinning_sample(const std::function<double(double)>& intensity, double bound, double horizon,
                            RngStream stream, EventLabel label = EventLabel::tick);

/// Two-state telegraph process. `rate_up` is the down->up rate and
/// `rate_down` the up->down rate; events are labelled jump_up/jump_down.
EventRecord telegraph_sample(double rate_up, double rate_down, bool initial_up, double horizon, Rng& rng);
EventRecord telegraph_sample(double rate_up, double rate_down, bool initial_up, double horizon, RngStream stream);

/// Drift/diffusion description of an N-dimensional Ito SDE with diagonal noise.
template <std::size_t N>
struct StochasticProcessSpec {
  using State = std::array<double, N>;

  std::function<State(double, const State&)> drift;
  /// Per-component noise amplitude; null means a deterministic ODE.
  std::function<State(double, const State&)> diffusion;
  State initial{};
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t record_every = 1;
  std::array<std::string, N> labels{};
  std::map<std::string, double> params;
};

template <std::size_t N>
Trajectory simulate(const StochasticProcessSpec<N>& spec, Rng& rng) {
  using State = typename StochasticProcessSpec<N>::State;
  if (!(spec.dt > 0.0) || !(spec.horizon > 0.0)) throw ParameterError("dt and horizon must be positive");
  if (spec.record_every == 0) throw ParameterError("record_every must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));

  Trajectory traj(std::vector<std::string>(spec.labels.begin(), spec.labels.end()));
  traj.params = spec.params;
  traj.seed = rng.id();
  traj.reserve(steps / spec.record_every + 1);

  State x = spec.initial;
  traj.append(0.0, x);
  const double sq = std::sqrt(spec.dt);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    State dW{};
    if (spec.diffusion)
      for (auto& w : dW) w = sq * rng.normal();
    x = ito_step(
        x, [&](const State& s) { return spec.drift(t, s); },
        [&](const State& s) { return spec.diffusion ? spec.diffusion(t, s) : State{}; }, spec.dt, dW, k, t);
    if ((k + 1) % spec.record_every == 0) traj.append(static_cast<double>(k + 1) * spec.dt, x);
  }
  return traj;
}

/// Worker count for ensembles: TICKWORK_THREADS when set (>= 1), otherwise
/// the hardware concurrency.
std::size_t worker_count();

/// Runs `fn(rng, trial)` for trial = 0..trials-1, trial k drawing from
/// RngStream{master_seed, k}. Results are returned in trial order and do not
/// depend on `workers`. The first failing trial (lowest index) is rethrown
/// as TrialError.
template <class Fn>
auto run_ensemble(std::size_t trials, std::uint64_t master_seed, Fn&& fn, std::size_t workers = 0)
    -> std::vector<std::invoke_result_t<Fn&, Rng&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, Rng&, std::size_t>;
  if (trials == 0) throw ParameterError("run_ensemble: trials must be >= 1");
  if (workers == 0) workers = worker_count();
  workers = std::min(workers, trials);

  std::vector<std::optional<Result>> slots(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < trials; k = next.fetch_add(1)) {
      try {
        Rng rng(RngStream{master_seed, k});
        slots[k].emplace(fn(rng, k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t k = 0; k < trials; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const NumericalBlowup& e) {
      throw TrialError(k, e.what(), true);
    } catch (const TrialError& e) {
      throw TrialError(k, e.what(), e.numerical());
    } catch (const std::exception& e) {
      throw TrialError(k, e.what(), false);
    }
  }

  std::vector<Result> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Ensemble of SDE trajectories.
template <std::size_t N>
std::vector<Trajectory> run_ensemble(const StochasticProcessSpec<N>& spec, std::size_t trials,
                                     std::uint64_t master_seed, std::size_t workers = 0) {
  return run_ensemble(
      trials, master_seed, [&spec](Rng& rng, std::size_t) { return simulate(spec, rng); }, workers);
}

}  // namespace tickwork
