#include "tickwork/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "tickwork/error.hpp"

namespace tickwork {

double Trajectory::dt() const {
  if (times.size() < 2) throw InsufficientData("trajectory has fewer than two samples");
  return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

void Trajectory::append(double t, std::span<const double> row) {
  if (row.size() != width()) throw ParameterError("trajectory row width mismatch");
  times.push_back(t);
  states.insert(states.end(), row.begin(), row.end());
}

void Trajectory::reserve(std::size_t rows) {
  times.reserve(rows);
  states.reserve(rows * width());
}

std::size_t Trajectory::index_of(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ParameterError("trajectory has no component '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

std::vector<double> Trajectory::column(std::string_view label) const {
  const std::size_t c = index_of(label);
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = at(i, c);
  return out;
}

void Trajectory::check() const {
  if (states.size() != times.size() * width()) throw ParameterError("trajectory state matrix shape mismatch");
  if (times.size() < 2) return;
  const double h = dt();
  if (!(h > 0.0)) throw ParameterError("trajectory times not strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (!(step > 0.0)) throw ParameterError("trajectory times not strictly increasing");
    // Grid points are generated as t0 + i*dt, so the tolerance is relative to
    // the time magnitude as well as to the step.
    const double tol = 1e-12 * std::max(std::abs(times[i]), h) * 4.0;
    if (std::abs(times[i] - (times.front() + static_cast<double>(i) * h)) > tol + 1e-12 * h)
      throw ParameterError("trajectory grid is not uniform");
  }
}

std::string_view to_string(EventLabel label) noexcept {
  switch (label) {
    case EventLabel::tick: return "tick";
    case EventLabel::tunnel_left: return "tunnel-left";
    case EventLabel::tunnel_right: return "tunnel-right";
    case EventLabel::jump_up: return "jump-up";
    case EventLabel::jump_down: return "jump-down";
  }
  return "unknown";
}

std::size_t EventRecord::count(EventLabel label) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [label](const Event& e) { return e.label == label; }));
}

std::vector<double> EventRecord::times(EventLabel label) const {
  std::vector<double> out;
  for (const auto& e : events)
    if (e.label == label) out.push_back(e.time);
  return out;
}

void EventRecord::check() const {
  double last = -INFINITY;
  for (const auto& e : events) {
    if (e.time < last) throw ParameterError("event times decrease");
    if (e.time > horizon) throw ParameterError("event beyond horizon");
    last = e.time;
  }
}

double up_fraction(const EventRecord& record, bool initial_up) {
  if (!(record.horizon > 0.0)) throw ParameterError("horizon must be positive");
  bool up = initial_up;
  double last = 0.0, up_time = 0.0;
  for (const auto& e : record.events) {
    if (e.label != EventLabel::jump_up && e.label != EventLabel::jump_down) continue;
    if (up) up_time += e.time - last;
    last = e.time;
    up = e.label == EventLabel::jump_up;
  }
  if (up) up_time += record.horizon - last;
  return up_time / record.horizon;
}

}  // namespace tickwork
