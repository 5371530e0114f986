#include "tickwork/random.hpp"

#include <array>
#include <cmath>

namespace tickwork {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(RngStream id) {
  std::uint64_t h = mix64(id.master_seed) ^ mix64(id.stream_index ^ 0x5851f42d4c957f2dULL);
  std::array<std::uint32_t, 8> words{};
  for (auto& w : words) {
    h = mix64(h);
    w = static_cast<std::uint32_t>(h >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(RngStream id) : id_(id), engine_(seeded_engine(id)) {}

double Rng::uniform() noexcept {
  // 53 random mantissa bits, offset by half an ulp so 0 is never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

}  // namespace tickwork
