#pragma once

#include <cmath>
#include <cstdint>

namespace pspin {

// Seed layout shared by every Monte Carlo operation: a master seed plus the
// number of replicas it will be split across.
struct SeedSpec {
  std::uint64_t master_seed = 12345;
  std::uint64_t replica_count = 1;
};

// Counter-based SplitMix64 generator keyed by (master, replica, substream).
// Each replica owns an independent stream, so replicas can be evaluated in
// any order or on any thread and still produce identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t master, std::uint64_t replica = 0,
               std::uint64_t substream = 0) {
    const std::uint64_t s = mix64(master + kKey1 * (replica + 1));
    state_ = mix64(s + kKey2 * (substream + 1));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on (0,1) from the top 53 bits.
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  // Standard normal via the polar method, with the spare deviate cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double x, y, s;
    do {
      x = 2.0 * uniform() - 1.0;
      y = 2.0 * uniform() - 1.0;
      s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * f;
    has_spare_ = true;
    return x * f;
  }

 private:
  static constexpr std::uint64_t kKey1 = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kKey2 = 0xd1342543de82ef95ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pspin
