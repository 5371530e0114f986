#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tickwork/ledger.hpp"
#include "tickwork/trajectory.hpp"

namespace tickwork::metrics {

/// Increasing tick times with the provenance of the run that produced them.
/// `start` and `end` delimit the observation interval used for window counts.
struct TickSeries {
  std::vector<double> tick_times;
  std::map<std::string, double> source;
  double start = 0.0;
  double end = 0.0;

  std::size_t size() const noexcept { return tick_times.size(); }
  std::vector<double> periods() const;
  /// Throws ParameterError unless times are strictly increasing and inside [start, end].
  void check() const;
};

enum class TickMode { rising_zero_cross, kick_transition };

/// Rising zero crossings (x[i-1] < 0 <= x[i]) or kick transitions
/// (K[i-1] < 0 < K[i]) of one component, placed by linear interpolation.
/// No crossing gives an empty series.
TickSeries extract_ticks(const Trajectory& traj, std::string_view component, TickMode mode);
/// Event-label mode: copies the times of `label` events.
TickSeries extract_ticks(const EventRecord& record, EventLabel label);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

/// Freedman-Diaconis bin width 2 IQR n^{-1/3}, with at least `min_bins` bins.
Histogram histogram(std::span<const double> values, std::size_t min_bins = 8);

/// Fano factor (sample variance / mean) of event counts in consecutive
/// windows of width `window` that fit inside [start, end]. NaN when fewer
/// than two windows fit or the mean count is zero.
double windowed_fano(std::span<const double> times, double start, double end, double window);

struct PeriodStatistics {
  std::size_t ticks = 0;
  double mean = 0.0;      // (last - first) / (ticks - 1)
  double variance = 0.0;  // sample variance of the periods
  double fractional_std = 0.0;
  Histogram histogram;
  double fano = 0.0;
  double fano_window = 0.0;
};

/// Needs >= 10 ticks (InsufficientData otherwise). `fano_window` <= 0 selects
/// ten mean periods.
PeriodStatistics period_statistics(const TickSeries& ticks, double fano_window = 0.0);

struct CyclePair {
  double dQ_over_Q = 0.0;
  double dT_over_T = 0.0;
};

struct AccuracyDissipationReport {
  static constexpr std::string_view header =
      "per-cycle fractional heat and period fluctuations; frequency fluctuation d omega/omega = -dT/T to first order";
  std::vector<CyclePair> pairs;
  double slope = 0.0;  // OLS slope of dQ/Q on dT/T
  double mean_heat = 0.0;
  double mean_period = 0.0;
  double dissipation_rate = 0.0;  // mean heat / mean period
  double fractional_period_std = 0.0;
};

/// Pairs the ledger's heat column with the tick intervals. Throws
/// AlignmentError unless the ticks delimit exactly ledger.size() cycles.
AccuracyDissipationReport accuracy_dissipation_report(const CycleLedger& ledger, const TickSeries& ticks);

struct TradeoffPoint {
  double parameter = 0.0;
  double dissipation = 0.0;      // per-cycle heat or dissipation rate
  double fractional_std = 0.0;   // fractional period fluctuation (or Fano)
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;  // sorted by dissipation
  bool monotone_decreasing = false;
  double loglog_slope = 0.0;
};

TradeoffCurve tradeoff_curve(std::vector<TradeoffPoint> points);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tickwork::metrics
