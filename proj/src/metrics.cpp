#include "tickwork/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tickwork/error.hpp"

namespace tickwork::metrics {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return NAN;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<double> TickSeries::periods() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < tick_times.size(); ++i) out.push_back(tick_times[i] - tick_times[i - 1]);
  return out;
}

void TickSeries::check() const {
  for (std::size_t i = 0; i < tick_times.size(); ++i) {
    if (i > 0 && !(tick_times[i] > tick_times[i - 1])) throw ParameterError("tick times must increase strictly");
    if (tick_times[i] < start || tick_times[i] > end) throw ParameterError("tick outside the observation interval");
  }
}

TickSeries extract_ticks(const Trajectory& traj, std::string_view component, TickMode mode) {
  const auto x = traj.column(component);
  TickSeries out;
  out.source = traj.params;
  out.start = traj.times.empty() ? 0.0 : traj.times.front();
  out.end = traj.times.empty() ? 0.0 : traj.times.back();
  for (std::size_t i = 1; i < x.size(); ++i) {
    const bool hit = mode == TickMode::rising_zero_cross ? (x[i - 1] < 0.0 && x[i] >= 0.0) : (x[i - 1] < 0.0 && x[i] > 0.0);
    if (!hit) continue;
    const double f = -x[i - 1] / (x[i] - x[i - 1]);
    out.tick_times.push_back(traj.times[i - 1] + f * (traj.times[i] - traj.times[i - 1]));
  }
  return out;
}

TickSeries extract_ticks(const EventRecord& record, EventLabel label) {
  TickSeries out;
  out.tick_times = record.times(label);
  out.end = record.horizon;
  return out;
}

Histogram histogram(std::span<const double> values, std::size_t min_bins) {
  if (values.empty()) throw InsufficientData("histogram of no values");
  if (min_bins == 0) throw ParameterError("min_bins must be >= 1");
  const std::vector<double> v(values.begin(), values.end());
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    const double pad = 0.5e-6 * std::max(1.0, std::abs(lo));
    lo -= pad;
    hi += pad;
  }
  std::size_t bins = min_bins;
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    bins = std::max(bins, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

double windowed_fano(std::span<const double> times, double start, double end, double window) {
  if (!(window > 0.0)) throw ParameterError("window must be > 0");
  const auto n = static_cast<std::size_t>(std::floor((end - start) / window));
  if (n < 2) return NAN;
  std::vector<double> counts(n, 0.0);
  for (double t : times) {
    if (t < start) continue;
    const auto k = static_cast<std::size_t>((t - start) / window);
    if (k < n) counts[k] += 1.0;
  }
  const double m = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(n);
  if (!(m > 0.0)) return NAN;
  return sample_variance(counts) / m;
}

PeriodStatistics period_statistics(const TickSeries& ticks, double fano_window) {
  if (ticks.size() < 10) throw InsufficientData("period statistics need at least 10 ticks, got " + std::to_string(ticks.size()));
  ticks.check();
  const auto P = ticks.periods();
  PeriodStatistics s;
  s.ticks = ticks.size();
  s.mean = (ticks.tick_times.back() - ticks.tick_times.front()) / static_cast<double>(ticks.size() - 1);
  s.variance = sample_variance(P);
  s.fractional_std = std::sqrt(s.variance) / s.mean;
  s.histogram = histogram(P);
  s.fano_window = fano_window > 0.0 ? fano_window : 10.0 * s.mean;
  s.fano = windowed_fano(ticks.tick_times, ticks.start, ticks.end, s.fano_window);
  return s;
}

AccuracyDissipationReport accuracy_dissipation_report(const CycleLedger& ledger, const TickSeries& ticks) {
  if (ticks.size() < 2 || ticks.size() - 1 != ledger.size())
    throw AlignmentError("ledger has " + std::to_string(ledger.size()) + " cycles but the ticks delimit " +
                         std::to_string(ticks.size() < 2 ? 0 : ticks.size() - 1));
  if (ledger.size() < 2) throw InsufficientData("need at least two cycles");
  const auto P = ticks.periods();
  const auto Q = ledger.heats();
  AccuracyDissipationReport r;
  r.mean_period = std::accumulate(P.begin(), P.end(), 0.0) / static_cast<double>(P.size());
  r.mean_heat = std::accumulate(Q.begin(), Q.end(), 0.0) / static_cast<double>(Q.size());
  if (!(r.mean_period > 0.0) || r.mean_heat == 0.0) throw DomainError("mean period and mean heat must be nonzero");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < P.size(); ++k) {
    r.pairs.push_back({(Q[k] - r.mean_heat) / r.mean_heat, (P[k] - r.mean_period) / r.mean_period});
    x.push_back(r.pairs.back().dT_over_T);
    y.push_back(r.pairs.back().dQ_over_Q);
  }
  r.slope = ols_slope(x, y);
  r.dissipation_rate = r.mean_heat / r.mean_period;
  r.fractional_period_std = std::sqrt(sample_variance(P)) / r.mean_period;
  return r;
}

TradeoffCurve tradeoff_curve(std::vector<TradeoffPoint> points) {
  if (points.size() < 2) throw InsufficientData("a tradeoff curve needs at least two points");
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.dissipation < b.dissipation; });
  TradeoffCurve c;
  c.monotone_decreasing = true;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].fractional_std < points[i - 1].fractional_std)) c.monotone_decreasing = false;
    if (points[i].dissipation > 0.0 && points[i].fractional_std > 0.0) {
      lx.push_back(std::log(points[i].dissipation));
      ly.push_back(std::log(points[i].fractional_std));
    }
  }
  c.loglog_slope = lx.size() >= 2 ? ols_slope(lx, ly) : NAN;
  c.points = std::move(points);
  return c;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("x and y differ in length");
  if (x.size() < 2) throw InsufficientData("regression needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw DomainError("regression on constant x");
  return sxy / sxx;
}

}  // namespace tickwork::metrics
