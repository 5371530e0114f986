#include "tickwork/stochastic.hpp"

#include <cstdlib>
#include <string>

namespace tickwork {

std::vector<double> wiener_increments(RngStream stream, std::size_t n, double dt) {
  if (!(dt > 0.0)) throw ParameterError("wiener_increments: dt must be positive");
  if (n == 0) throw ParameterError("wiener_increments: n must be >= 1");
  Rng rng(stream);
  const double sq = std::sqrt(dt);
  std::vector<double> out(n);
  for (auto& w : out) w = sq * rng.normal();
  return out;
}

EventRecord thinning_sample(const std::function<double(double)>& intensity, double bound, double horizon, Rng& rng,
                            EventLabel label) {
  if (!(bound > 0.0)) throw ParameterError("thinning_sample: intensity bound must be positive");
  if (!(horizon > 0.0)) throw ParameterError("thinning_sample: horizon must be positive");
  EventRecord rec;
  rec.horizon = horizon;
  double t = 0.0;
  while (true) {
    t += rng.exponential(bound);
    if (t > horizon) break;
    const double lam = intensity(t);
    if (lam > bound) throw ParameterError("thinning_sample: intensity " + std::to_string(lam) +
                                          " exceeds bound " + std::to_string(bound) + " at t=" + std::to_string(t));
    if (rng.uniform() * bound < lam) rec.events.push_back({t, label});
  }
  return rec;
}

EventRecord thinning_sample(const std::function<double(double)>& intensity, double bound, double horizon,
                            RngStream stream, EventLabel label) {
  Rng rng(stream);
  return thinning_sample(intensity, bound, horizon, rng, label);
}

EventRecord telegraph_sample(double rate_up, double rate_down, bool initial_up, double horizon, Rng& rng) {
  if (rate_up < 0.0 || rate_down < 0.0) throw ParameterError("telegraph_sample: rates must be non-negative");
  if (rate_up == 0.0 && rate_down == 0.0) throw ParameterError("telegraph_sample: both rates are zero");
  if (!(horizon > 0.0)) throw ParameterError("telegraph_sample: horizon must be positive");
  EventRecord rec;
  rec.horizon = horizon;
  bool up = initial_up;
  double t = 0.0;
  while (true) {
    const double exit_rate = up ? rate_down : rate_up;
    if (exit_rate == 0.0) break;  // absorbing
    t += rng.exponential(exit_rate);
    if (t > horizon) break;
    up = !up;
    rec.events.push_back({t, up ? EventLabel::jump_up : EventLabel::jump_down});
  }
  return rec;
}

EventRecord telegraph_sample(double rate_up, double rate_down, bool initial_up, double horizon, RngStream stream) {
  Rng rng(stream);
  return telegraph_sample(rate_up, rate_down, initial_up, horizon, rng);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("TICKWORK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace tickwork
