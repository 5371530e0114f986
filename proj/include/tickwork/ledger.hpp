#pragma once

#include <map>
#include <string>
#include <vector>

namespace tickwork {

/// Per-cycle thermodynamic bookkeeping: period, work done by the drive and
/// heat dissipated, in the model's scaled units.
struct CycleLedger {
  struct Entry {
    double period = 0.0;
    double work = 0.0;
    double heat = 0.0;
  };

  std::vector<Entry> entries;
  /// Which heat convention the `heat` column follows (e.g. "nominal", "balance").
  std::string heat_convention;
  std::map<std::string, double> params;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
  std::vector<double> periods() const;
  std::vector<double> works() const;
  std::vector<double> heats() const;
};

}  // namespace tickwork
