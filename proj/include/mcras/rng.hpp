#pragma once

#include <cstdint>

namespace mcras {

// splitmix64 output scrambler. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

// Deterministic random stream keyed by (seed, stream_id).
//
// Identical keys produce the identical draw sequence on every platform; the
// generator and all draw transforms are fixed here rather than delegated to
// <random>, whose distributions are implementation-defined. Distinct
// stream_ids under one seed give statistically independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit();

  // Uniform on (0, 1), never returns an endpoint; safe under log().
  double next_open_unit();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

}  // namespace mcras
