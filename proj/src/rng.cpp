#include "qvlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qvlab {
namespace {

// splitmix64 finalizer; full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

}  // namespace

RandomStream RandomStream::derive(std::uint64_t seed, std::string_view tag,
                                  std::uint64_t member, std::uint64_t sub) {
  std::uint64_t h = mix64(seed);
  for (unsigned char c : tag) h = hash_combine(h, c);
  h = hash_combine(h, member);
  h = hash_combine(h, sub);
  return RandomStream(h);
}

std::uint64_t RandomStream::next_u64() {
  return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double RandomStream::next_unit() {
  // 53 random bits into (0,1); offset by half an ulp step to avoid 0.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

std::uint64_t RandomStream::next_poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= next_unit();
  } while (p > limit);
  return k - 1;
}

}  // namespace qvlab
