#pragma once

#include <array>
#include <cstdint>

namespace ipvt {

/// Philox4x32-10 block function, as in the Random123 reference implementation.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The 64-bit seed is the Philox key; the stream id occupies the upper two
/// counter words and the block index the lower two, so distinct
/// (seed, stream_id) pairs never share a block. Satisfies
/// UniformRandomBitGenerator with 64-bit output.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform angle on [-pi, pi).
  double angle();
  double exponential();
  double standard_cauchy();
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int next_ = 2;
};

}  // namespace ipvt
