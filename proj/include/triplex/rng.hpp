#ifndef TRIPLEX_RNG_HPP_
#define TRIPLEX_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

#include "triplex/math.hpp"

namespace triplex {

// Keyed random stream. Every consumer derives its own stream from a master
// seed plus integer keys (replicate index, cell index, ...), so results do not
// depend on scheduling or evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master, std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t state = master;
    std::uint64_t mixed = splitmix64(state);
    for (std::uint64_t k : keys) {
      state ^= k + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
      mixed = splitmix64(state);
    }
    std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                      static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32)};
    gen_.seed(seq);
  }

  // Uniform on the open interval (0,1); safe as input to inverse-CDF draws.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(double mean, double sd) { return mean + sd * standard_normal_quantile(uniform01()); }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    // Rejection-free Lemire-style bounded draw is overkill here; modulo bias
    // at n << 2^64 is far below anything these simulations can resolve.
    return gen_() % n;
  }

  std::mt19937_64& raw() { return gen_; }

 private:
  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
};

// Collision-resistant seed derivation for nested simulation layers.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k1, std::uint64_t k2 = 0) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master + 0x9e3779b97f4a7c15ULL * (k1 + 1)) ^ (0xd1b54a32d192ed03ULL * (k2 + 1)));
}

}  // namespace triplex

#endif  // TRIPLEX_RNG_HPP_
