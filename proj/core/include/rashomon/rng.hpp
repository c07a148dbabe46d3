#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace rashomon {

// Deterministic splitmix64 generator. Identical streams on every platform;
// deliberately avoids std::* distributions, whose output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform(double lo, double hi);

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

  // uniform integer in [lo, hi] inclusive
  long long range(long long lo, long long hi);

  // standard normal via Box-Muller
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n), in draw order
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Order-independent way to derive child seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// FNV-1a over a byte string; used for stable content hashing.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace rashomon
