#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tickwork/random.hpp"

namespace tickwork {

/// Uniformly sampled multivariate time series with provenance.
///
/// `states` is row-major: one row of `labels.size()` values per time.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<double> states;
  std::map<std::string, double> params;
  RngStream seed{};

  Trajectory() = default;
  explicit Trajectory(std::vector<std::string> component_labels) : labels(std::move(component_labels)) {}

  std::size_t size() const noexcept { return times.size(); }
  std::size_t width() const noexcept { return labels.size(); }
  double dt() const;

  void append(double t, std::span<const double> row);
  void reserve(std::size_t rows);

  double at(std::size_t row, std::size_t col) const { return states[row * width() + col]; }
  std::size_t index_of(std::string_view label) const;
  std::vector<double> column(std::string_view label) const;

  /// Throws ParameterError when the grid is not strictly increasing and
  /// uniform (relative tolerance 1e-12) or the shape is inconsistent.
  void check() const;
};

enum class EventLabel { tick, tunnel_left, tunnel_right, jump_up, jump_down };

std::string_view to_string(EventLabel label) noexcept;

struct Event {
  double time = 0.0;
  EventLabel label = EventLabel::tick;
};

/// Ordered event times of a point or telegraph process.
struct EventRecord {
  std::vector<Event> events;
  double horizon = 0.0;

  std::size_t count(EventLabel label) const noexcept;
  std::vector<double> times(EventLabel label) const;
  /// Throws ParameterError when times decrease or exceed the horizon.
  void check() const;
};

/// Fraction of [0, horizon] spent in the "up" state of a telegraph record.
double up_fraction(const EventRecord& record, bool initial_up);

}  // namespace tickwork
