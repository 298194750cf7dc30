#include "qoc/rng.hpp"

#include <cmath>
#include <numbers>

namespace qoc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x6a09e667f3bcc909ULL;  // arbitrary nonzero start
  for (std::uint64_t p : parts) {
    s += kGolden;
    s = mix64(s ^ p);
  }
  return s;
}

std::uint64_t SplitMix::next() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix::normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int SplitMix::pm_one(double p_plus) {
  return uniform01() < p_plus ? 1 : -1;
}

}  // namespace qoc
