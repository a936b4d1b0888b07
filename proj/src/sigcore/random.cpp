#include "vlink/random.hpp"

namespace vlink {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, SeedStream stream) {
  return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

}  // namespace vlink
