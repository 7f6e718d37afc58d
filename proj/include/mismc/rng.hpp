#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace mismc {

namespace detail {

// splitmix64 finalizer; used for seed/stream derivation only.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One Philox4x32-10 block: 128-bit counter = (block, stream), 64-bit key.
inline void philox4x32_block(std::uint64_t block, std::uint64_t stream,
                             std::uint64_t key, std::uint32_t out[4]) {
  std::uint32_t c0 = static_cast<std::uint32_t>(block);
  std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(stream);
  std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

}  // namespace detail

// Counter-based random stream (Philox4x32-10 core).
//
// A stream is identified by a 64-bit key and a 64-bit stream id; the block
// counter occupies the remaining 64 bits, so streams never overlap. child()
// derives an independent stream by hashing a tag into the (key, stream)
// identity, which makes hierarchical seeding (task -> index -> stage ->
// particle) reproducible and independent of execution order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed)
      : key_(detail::mix64(seed ^ 0x2545F4914F6CDD1Dull)),
        stream_(detail::mix64(seed + 0x6A09E667F3BCC909ull)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  RngStream child(std::uint64_t tag) const {
    const std::uint64_t t = detail::mix64(tag + 0x632BE59BD9B4E019ull);
    RngStream c;
    c.key_ = detail::mix64(key_ ^ t);
    c.stream_ = detail::mix64(stream_ + (t | 1ull) * 0x9E3779B97F4A7C15ull);
    return c;
  }

  RngStream child(std::initializer_list<std::uint64_t> tags) const {
    RngStream c = *this;
    for (std::uint64_t t : tags) c = c.child(t);
    return c;
  }

  result_type operator()() {
    if (buffered_ == 0) {
      std::uint32_t out[4];
      detail::philox4x32_block(block_++, stream_, key_, out);
      buf_[0] = out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
      buf_[1] = out[2] | (static_cast<std::uint64_t>(out[3]) << 32);
      buffered_ = 2;
    }
    return buf_[2 - buffered_--];
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; no cached spare, so the draw count per
  // call is fixed (two 64-bit words).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential() { return -std::log(1.0 - uniform01()); }

  // Exact Poisson by counting unit-exponential arrivals; O(lambda).
  long poisson(double lambda) {
    assert(lambda >= 0.0);
    long k = -1;
    double t = 0.0;
    while (t < lambda) {
      t += exponential();
      ++k;
    }
    return k < 0 ? 0 : k;
  }

  // Unbiased integer on [0, n) by rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r;
    do {
      r = (*this)();
    } while (r < rem);
    return r % n;
  }

 private:
  RngStream() = default;

  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int buffered_ = 0;
};

}  // namespace mismc
