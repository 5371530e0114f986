#include "tickwork/ledger.hpp"

namespace tickwork {

std::vector<double> CycleLedger::periods() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.period);
  return out;
}

std::vector<double> CycleLedger::works() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.work);
  return out;
}

std::vector<double> CycleLedger::heats() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.heat);
  return out;
}

}  // namespace tickwork
