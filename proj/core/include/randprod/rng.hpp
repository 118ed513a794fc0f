#pragma once

#include <array>
#include <cstdint>

// Counter-based pseudorandom source (Philox4x32-10). A stream is addressed by
// (seed, stream_id); any two distinct addresses yield statistically
// independent sequences, which is what makes per-replicate substreams in the
// Monte Carlo engine reproducible regardless of thread count.

namespace randprod {

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key0_(std::uint32_t(seed)), key1_(std::uint32_t(seed >> 32)), stream_(stream) {}

  // Rewind this stream to its first output.
  void reset() {
    block_ = 0;
    pos_ = 4;
    has_spare_ = false;
  }

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();             // standard normal (Box-Muller, cached spare)
  double gamma(double shape);  // Gamma(shape, 1), shape >= 1 (Marsaglia-Tsang)

  // Binomial(n, p) draw; exact (BTRS for large mean, inversion otherwise).
  std::int64_t binomial(std::int64_t n, double p);

 private:
  void refill();

  std::uint32_t key0_, key1_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace randprod
