#pragma once

#include <cstdint>
#include <string_view>

namespace qvlab {

// Counter-based random stream. Each draw is a stateless mix of (key, counter),
// so streams derived from distinct (seed, tag, member) tuples are independent
// and the output does not depend on evaluation order across streams.
class RandomStream {
 public:
  RandomStream() = default;
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  // Derives a stream key from a base seed, a component tag and a member index.
  static RandomStream derive(std::uint64_t seed, std::string_view tag,
                             std::uint64_t member = 0, std::uint64_t sub = 0);

  std::uint64_t next_u64();

  // Uniform on (0, 1), never returning the endpoints.
  double next_unit();

  // Standard normal via Box-Muller (pairwise, cached).
  double next_normal();

  // Poisson via Knuth's product-of-uniforms method; mean must be modest
  // (desk-scale intensities), which it always is here.
  std::uint64_t next_poisson(double mean);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace qvlab
