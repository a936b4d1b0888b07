#include "vlink/prbs.hpp"

#include <stdexcept>

namespace vlink {

std::vector<std::uint8_t> prbs_bits(int degree, std::uint64_t seed, std::size_t n) {
  int tap = 0;
  switch (degree) {
    case 7: tap = 6; break;
    case 15: tap = 14; break;
    case 31: tap = 28; break;
    default: throw std::invalid_argument("PRBS degree must be 7, 15 or 31");
  }
  const std::uint64_t mask = (std::uint64_t{1} << degree) - 1;
  std::uint64_t state = seed & mask;
  if (state == 0) throw std::invalid_argument("PRBS seed must be nonzero in the low register bits");

  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = ((state >> (degree - 1)) ^ (state >> (tap - 1))) & 1u;
    state = ((state << 1) | bit) & mask;
    out[i] = static_cast<std::uint8_t>(bit);
  }
  return out;
}

}  // namespace vlink
