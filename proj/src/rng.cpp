#include "gearbox/rng.hpp"

#include <cmath>

namespace gearbox {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

RngStream::RngStream(uint64_t seed, std::string_view stream_id)
    : seed_(seed), id_(stream_id) {
  engine_.seed(splitmix64(seed ^ splitmix64(fnv1a64(id_))));
}

uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform01() {
  // 53 mantissa bits => exact, platform-independent doubles.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

uint64_t RngStream::uniform_int(uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::normal(double mean, double sigma) {
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return mean + sigma * u * std::sqrt(-2.0 * std::log(s) / s);
}

RngStream RngStream::substream(std::string_view label) const {
  return RngStream(seed_, id_ + "/" + std::string(label));
}

uint64_t RngStream::derive_seed(uint64_t master, uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

}  // namespace gearbox
