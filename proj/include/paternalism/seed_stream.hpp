#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace paternalism {

// One independent random stream. Streams are derived from a root seed and a
// path of integer labels (entity kind, entity id, condition, ...) by
// counter-based hashing, so the stream of one entity does not depend on how
// many other entities exist.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  // Child stream for the given label path.
  SeedStream substream(std::initializer_list<std::uint64_t> path) const {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t label : path) h = mix(h ^ mix(label + 0x632be59bd9b4e019ULL));
    return SeedStream(h);
  }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace paternalism
