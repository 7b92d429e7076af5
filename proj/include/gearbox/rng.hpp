// Seeded, named random streams. One master seed is split into independent
// streams by label so module-level reproducibility survives reordering of
// calls between modules.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace gearbox {

// All draws go through mt19937_64 (sequence mandated by the standard) and
// arithmetic-only transforms, so identical (seed, stream_id) pairs yield
// identical sequences across runs and platforms.
class RngStream {
 public:
  RngStream(uint64_t seed, std::string_view stream_id);

  uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform01();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform in {0, ..., n-1}.
  uint64_t uniform_int(uint64_t n);
  // Marsaglia polar method (no trig, one spare discarded).
  double normal(double mean = 0.0, double sigma = 1.0);

  // Derive an independent child stream; independent of how many draws
  // have been consumed from this stream.
  RngStream substream(std::string_view label) const;

  uint64_t seed() const { return seed_; }
  const std::string& stream_id() const { return id_; }

  // Per-trial seed derivation: depends on (master, index) only.
  static uint64_t derive_seed(uint64_t master, uint64_t index);

 private:
  uint64_t seed_;
  std::string id_;
  std::mt19937_64 engine_;
};

}  // namespace gearbox
