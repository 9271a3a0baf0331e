#pragma once

#include <cstdint>
#include <stdexcept>

namespace chfmatch {

// Thrown when a Poisson mean exceeds the overflow guard (pathological theta
// probed by the optimizer); objective wrappers translate it into +inf.
struct mean_overflow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPoissonMeanOverflow = 1e8;

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based keyed random stream (SplitMix64 in counter mode): draw i of a
// stream is a pure function of (key, i), so streams never share mutable state
// and replaying a stream reproduces it bit for bit.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  double next_normal();
  double next_exponential();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class StreamDomain : std::uint64_t {
  DataPath = 1,
  SimBlocks = 2,
  TGrid = 3,
  Diagnostics = 4,
  Reference = 5,
};

// Keyed stream factory. Identical master_seed yields bitwise identical
// streams for every (domain, replication, block) regardless of the order or
// thread in which they are instantiated.
struct SeedPlan {
  std::uint64_t master_seed = 0;

  CounterStream stream(StreamDomain domain, std::uint64_t replication,
                       std::uint64_t block) const {
    std::uint64_t k = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
    k = mix64(k ^ static_cast<std::uint64_t>(domain));
    k = mix64(k ^ replication);
    k = mix64(k ^ block);
    return CounterStream(k);
  }
};

// Standard normal quantile; rational approximation refined by one Halley
// step against erfc, accurate to full double precision on (0,1).
double norm_ppf(double u);

// Poisson quantile at probability u for the given mean: exact CDF summation
// for moderate means, Cornish-Fisher for very large ones. Monotone in u, so
// fixed-u draws are piecewise constant in the mean (the CRN contract).
// Throws mean_overflow_error when mean > kPoissonMeanOverflow.
long long poisson_icdf(double u, double mean);

}  // namespace chfmatch
